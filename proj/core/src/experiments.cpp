#include "kdvduo/experiments.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <thread>

#include "kdvduo/critical.hpp"
#include "kdvduo/csv.hpp"
#include "kdvduo/diagonal.hpp"
#include "kdvduo/nonlinear.hpp"
#include "kdvduo/time_sobolev.hpp"

namespace kdvduo {

using nlohmann::json;

const char* version_string() { return "0.1.0"; }

Experiment experiment_from_name(const std::string& name) {
    if (name == "simulate") return Experiment::Simulate;
    if (name == "adjoint") return Experiment::Adjoint;
    if (name == "atlas" || name == "critical-atlas") return Experiment::CriticalAtlas;
    if (name == "witness" || name == "witness-scan") return Experiment::WitnessScan;
    if (name == "margin" || name == "gramian-margin") return Experiment::GramianMargin;
    if (name == "control") return Experiment::Control;
    if (name == "nlcontrol" || name == "nonlinear-control") return Experiment::NonlinearControl;
    if (name == "verify" || name == "verify-suite") return Experiment::VerifySuite;
    throw ConfigError("unknown experiment: " + name);
}

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Simulate: return "simulate";
        case Experiment::Adjoint: return "adjoint";
        case Experiment::CriticalAtlas: return "critical-atlas";
        case Experiment::WitnessScan: return "witness-scan";
        case Experiment::GramianMargin: return "gramian-margin";
        case Experiment::Control: return "control";
        case Experiment::NonlinearControl: return "nonlinear-control";
        case Experiment::VerifySuite: return "verify-suite";
    }
    return "?";
}

double ExperimentConfig::tol(const std::string& name, double fallback) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
}

namespace {

ControlConfig control_from_name(const std::string& name) {
    if (name == "four") return {ControlConfig::Variant::FourControl};
    if (name == "one") return {ControlConfig::Variant::OneControl};
    if (name == "alt-mop") return {ControlConfig::Variant::AltMOP};
    if (name == "alt-b") return {ControlConfig::Variant::AltB};
    if (name == "alt-g2") return {ControlConfig::Variant::AltG2};
    throw ConfigError("unknown control configuration: " + name);
}

StateSpec parse_state_spec(const json& j, const std::string& where) {
    StateSpec spec;
    for (auto& [key, val] : j.items()) {
        if (key == "kind") {
            const std::string k = val.get<std::string>();
            if (k == "zero") spec.kind = StateSpec::Kind::Zero;
            else if (k == "sine") spec.kind = StateSpec::Kind::Sine;
            else if (k == "random") spec.kind = StateSpec::Kind::Random;
            else throw ConfigError(where + ": unknown state kind " + k);
        } else if (key == "amplitude") {
            spec.amplitude = val.get<double>();
        } else if (key == "mode") {
            spec.mode = val.get<int>();
        } else if (key == "component") {
            spec.component = val.get<std::string>();
            if (spec.component != "u" && spec.component != "v" && spec.component != "both")
                throw ConfigError(where + ": component must be u, v or both");
        } else {
            throw ConfigError(where + ": unknown key " + key);
        }
    }
    return spec;
}

StatePair build_state(const StateSpec& spec, const Grid& g, std::mt19937_64& rng) {
    StatePair s = StatePair::zero(g.nx);
    auto fill = [&](Eigen::VectorXd& comp, auto&& fn) {
        for (int i = 0; i < g.nx; ++i) comp[i] = fn(g.x(i));
    };
    const bool on_u = spec.component == "u" || spec.component == "both";
    const bool on_v = spec.component == "v" || spec.component == "both";
    switch (spec.kind) {
        case StateSpec::Kind::Zero:
            break;
        case StateSpec::Kind::Sine: {
            auto fn = [&](double x) {
                return spec.amplitude * std::sin(spec.mode * std::numbers::pi * x / g.L);
            };
            if (on_u) fill(s.u, fn);
            if (on_v) fill(s.v, fn);
            break;
        }
        case StateSpec::Kind::Random: {
            std::normal_distribution<double> normal(0.0, 1.0);
            for (int comp = 0; comp < 2; ++comp) {
                Eigen::VectorXd& target = comp == 0 ? s.u : s.v;
                const bool active = comp == 0 ? on_u : on_v;
                for (int k = 1; k <= 8; ++k) {
                    const double ck = normal(rng) / (k * k);
                    if (!active) continue;
                    for (int i = 0; i < g.nx; ++i)
                        target[i] +=
                            spec.amplitude * ck * std::sin(k * std::numbers::pi * g.x(i) / g.L);
                }
            }
            break;
        }
    }
    return s;
}

json state_spec_json(const StateSpec& s) {
    const char* kind = s.kind == StateSpec::Kind::Zero ? "zero"
                       : s.kind == StateSpec::Kind::Sine ? "sine"
                                                         : "random";
    return json{{"kind", kind}, {"amplitude", s.amplitude}, {"mode", s.mode},
                {"component", s.component}};
}

json config_echo(const ExperimentConfig& c) {
    return json{
        {"params",
         {{"a", c.params.a}, {"b", c.params.b}, {"c", c.params.c}, {"r", c.params.r},
          {"a1", c.params.a1}, {"a2", c.params.a2}}},
        {"grid", {{"L", c.L}, {"T", c.T}, {"nx", c.nx}, {"nt", c.nt}}},
        {"control", variant_name(c.control.variant)},
        {"experiment", experiment_name(c.experiment)},
        {"seed", c.seed},
        {"output_dir", c.output_dir.string()},
        {"tolerances", c.tolerances},
        {"initial", state_spec_json(c.initial)},
        {"target", state_spec_json(c.target)},
        {"atlas", {{"l_max", c.l_max}}},
        {"witness", {{"p_min", c.p_min}, {"p_max", c.p_max}, {"points", c.p_points}}},
        {"output", {{"time_stride", c.time_stride}}},
    };
}

void write_gnuplot(const std::filesystem::path& csv, const std::string& title,
                   const std::string& using_spec) {
    std::filesystem::path gp = csv;
    gp.replace_extension(".gp");
    std::ofstream out(gp);
    if (!out) throw IoError("cannot write " + gp.string());
    out << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set title '" << title << "'\n"
        << "plot '" << csv.filename().string() << "' using " << using_spec << " with lines\n";
}

struct ManifestBuilder {
    json doc;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit ManifestBuilder(const ExperimentConfig& c) {
        doc["config"] = config_echo(c);
        doc["version"] = version_string();
        doc["operations"] = json::object();
        doc["metrics"] = json::object();
    }
    void op(const std::string& name, const std::string& status) { doc["operations"][name] = status; }
    void metric(const std::string& name, double value) { doc["metrics"][name] = value; }
    void write(const std::filesystem::path& dir) {
        doc["wall_time_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ofstream out(dir / "manifest.json");
        if (!out) throw IoError("cannot write manifest in " + dir.string());
        out << doc.dump(2) << "\n";
    }
};

void dump_trajectory(const std::filesystem::path& dir, const std::string& name,
                     const Trajectory& traj, const Grid& g, int stride) {
    CsvWriter csv(dir / (name + ".csv"));
    csv.header({"t", "x", "u", "v"});
    for (int n = 0; n <= g.nt; n += std::max(1, stride)) {
        const StatePair& s = traj.slices[n];
        for (int i = 0; i < g.nx; ++i)
            csv.row({g.t(n), g.x(i), s.u[i], s.v[i]});
    }
    write_gnuplot(dir / (name + ".csv"), name, "2:3");
}

void dump_norms(const std::filesystem::path& dir, const Trajectory& traj, const Grid& g,
                const ValidatedParams& p) {
    CsvWriter csv(dir / "norms.csv");
    csv.header({"t", "x_norm"});
    for (int n = 0; n <= g.nt; ++n) csv.row({g.t(n), x_norm(traj.slices[n], p, g)});
    write_gnuplot(dir / "norms.csv", "state norm", "1:2");
}

void dump_controls(const std::filesystem::path& dir, const BoundaryData& bd, const Grid& g) {
    CsvWriter csv(dir / "controls.csv");
    csv.header({"t", "h0", "h1", "h2", "g0", "g1", "g2"});
    for (int n = 0; n <= g.nt; ++n)
        csv.row({g.t(n), bd[Channel::H0][n], bd[Channel::H1][n], bd[Channel::H2][n],
                 bd[Channel::G0][n], bd[Channel::G1][n], bd[Channel::G2][n]});
    write_gnuplot(dir / "controls.csv", "boundary controls", "1:4");
}

void dump_traces(const std::filesystem::path& dir, const TraceSet& tr, const Grid& g) {
    CsvWriter csv(dir / "traces.csv");
    std::vector<std::string> names = {"t"};
    for (int comp = 0; comp < 2; ++comp)
        for (int k = 0; k <= 2; ++k)
            for (const char* end : {"0", "L"})
                names.push_back(std::string(comp == 0 ? "u" : "v") + "_k" + std::to_string(k) +
                                "_" + end);
    csv.header(names);
    for (int n = 0; n <= g.nt; ++n) {
        std::vector<double> row = {g.t(n)};
        for (int comp = 0; comp < 2; ++comp)
            for (int k = 0; k <= 2; ++k)
                for (End e : {End::Left, End::Right}) row.push_back(tr.at(comp, k, e)[n]);
        csv.row(row);
    }
    write_gnuplot(dir / "traces.csv", "boundary traces", "1:2");
}

int max_threads_from_env() {
    const char* env = std::getenv("KDVDUO_THREADS");
    if (!env) return static_cast<int>(std::thread::hardware_concurrency());
    const int n = std::atoi(env);
    return n > 0 ? n : 1;
}

// per-point work shared by run() and sweep(); returns metrics
std::map<std::string, double> margin_and_witness(const ExperimentConfig& c,
                                                 const ValidatedParams& p, const Grid& g) {
    std::map<std::string, double> m;
    const int matvecs = static_cast<int>(c.tol("margin_matvecs", 60));
    double ritz_max = 0.0;
    m["margin"] = observability_margin(p, g, c.control, matvecs, c.seed, &ritz_max);
    m["ritz_max"] = ritz_max;
    const auto grid = default_p_grid(c.p_points, c.p_min, c.p_max);
    SpectralWitness w = spectral_witness(p, g.L, grid);
    m["sigma_min"] = w.min_sigma;
    m["argmin_p"] = w.argmin_p;
    return m;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        for (auto& [key, val] : j.items()) {
            if (key == "params") {
                for (auto& [pk, pv] : val.items()) {
                    if (pk == "a") c.params.a = pv.get<double>();
                    else if (pk == "b") c.params.b = pv.get<double>();
                    else if (pk == "c") c.params.c = pv.get<double>();
                    else if (pk == "r") c.params.r = pv.get<double>();
                    else if (pk == "a1") c.params.a1 = pv.get<double>();
                    else if (pk == "a2") c.params.a2 = pv.get<double>();
                    else throw ConfigError("params: unknown key " + pk);
                }
            } else if (key == "grid") {
                for (auto& [gk, gv] : val.items()) {
                    if (gk == "L") c.L = gv.get<double>();
                    else if (gk == "T") c.T = gv.get<double>();
                    else if (gk == "nx") c.nx = gv.get<int>();
                    else if (gk == "nt") c.nt = gv.get<int>();
                    else throw ConfigError("grid: unknown key " + gk);
                }
            } else if (key == "control") {
                c.control = control_from_name(val.get<std::string>());
            } else if (key == "experiment") {
                c.experiment = experiment_from_name(val.get<std::string>());
            } else if (key == "seed") {
                c.seed = val.get<std::uint64_t>();
            } else if (key == "output_dir") {
                c.output_dir = val.get<std::string>();
            } else if (key == "tolerances") {
                for (auto& [tk, tv] : val.items()) c.tolerances[tk] = tv.get<double>();
            } else if (key == "initial") {
                c.initial = parse_state_spec(val, "initial");
            } else if (key == "target") {
                c.target = parse_state_spec(val, "target");
            } else if (key == "atlas") {
                for (auto& [ak, av] : val.items()) {
                    if (ak == "l_max") c.l_max = av.get<double>();
                    else throw ConfigError("atlas: unknown key " + ak);
                }
            } else if (key == "witness") {
                for (auto& [wk, wv] : val.items()) {
                    if (wk == "p_min") c.p_min = wv.get<double>();
                    else if (wk == "p_max") c.p_max = wv.get<double>();
                    else if (wk == "points") c.p_points = wv.get<int>();
                    else throw ConfigError("witness: unknown key " + wk);
                }
            } else if (key == "output") {
                for (auto& [ok, ov] : val.items()) {
                    if (ok == "time_stride") c.time_stride = ov.get<int>();
                    else throw ConfigError("output: unknown key " + ok);
                }
            } else {
                throw ConfigError("unknown config key: " + key);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has wrong type: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

namespace {

int run_verify_suite(const ExperimentConfig& c, const ValidatedParams& p, const Grid& g,
                     ManifestBuilder& manifest) {
    struct Check {
        std::string name;
        double value;
        double threshold;
        bool pass;
    };
    std::vector<Check> checks;
    auto add = [&](const std::string& name, double value, double threshold, bool below = true) {
        checks.push_back({name, value, threshold, below ? value <= threshold : value >= threshold});
    };
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    // decoupling conjugation residual over random parameter draws
    {
        double worst = 0.0;
        std::uniform_real_distribution<double> uni(0.1, 2.0);
        std::uniform_real_distribution<double> unit(-0.95, 0.95);
        for (int i = 0; i < 1000; ++i) {
            SystemParams sp;
            sp.b = uni(rng);
            sp.c = uni(rng);
            sp.a = unit(rng) / std::sqrt(sp.b);
            sp.r = uni(rng);
            const ValidatedParams vp = validate_params(sp);
            const DecoupledParams d = compute_decoupling(vp);
            Eigen::Matrix2d B;
            B << 1.0, vp.a(), vp.a() * vp.b() / vp.c(), 1.0 / vp.c();
            const Eigen::Matrix2d diag =
                (Eigen::Matrix2d() << d.alpha_plus, 0.0, 0.0, d.alpha_minus).finished();
            worst = std::max(worst, ((d.M_inv * B * d.M - diag).norm()) / B.norm());
        }
        add("decoupling_conjugation", worst, 1e-12);
    }
    // transpose duality on the configured grid, 20 random pairs
    {
        LinearSolver solver(p, g);
        std::array<const Eigen::VectorXd*, 6> no_controls{};
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            StatePair q = StatePair::zero(g.nx), z = StatePair::zero(g.nx);
            for (int j = 0; j < g.nx; ++j) {
                q.u[j] = normal(rng);
                q.v[j] = normal(rng);
                z.u[j] = normal(rng);
                z.v[j] = normal(rng);
            }
            const StatePair fq = solver.forward_terminal(q, no_controls);
            const TransposeAdjointRun az = solver.adjoint_transpose(z);
            const double lhs = euclidean_pairing(fq, z);
            const double rhs = euclidean_pairing(q, az.initial);
            const double scale = std::sqrt(euclidean_pairing(q, q) * euclidean_pairing(z, z));
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
        add("transpose_duality", worst, 1e-11);
    }
    // dissipativity of one band-limited probe
    {
        std::mt19937_64 rng2(c.seed + 1);
        StateSpec spec;
        spec.kind = StateSpec::Kind::Random;
        spec.amplitude = 1.0;
        spec.component = "both";
        const StatePair init = build_state(spec, g, rng2);
        ForwardRun run = solve_forward_linear(p, g, init, BoundaryData::zero(g.nt));
        const double e0 = std::pow(x_norm(init, p, g), 2);
        double worst = -1.0;
        double prev = e0;
        for (int n = 1; n <= g.nt; ++n) {
            const double e = std::pow(x_norm(run.trajectory.slices[n], p, g), 2);
            worst = std::max(worst, (e - prev) / e0);
            prev = e;
        }
        add("dissipativity_drift", worst, 1e-8);
    }
    // fractional operator inverse pair on a random mean-free series
    {
        Eigen::VectorXd series(g.nt);
        for (int i = 0; i < g.nt; ++i) series[i] = normal(rng);
        series.array() -= series.mean();
        SobolevSpec spec{0.0, g.T, SobolevSpec::Mode::Homogeneous};
        const Eigen::VectorXd round_trip = fractional_time_operator(
            fractional_time_operator(series, -1.0 / 3.0, spec), 1.0 / 3.0, spec);
        add("fractional_inverse_pair", (round_trip - series).cwiseAbs().maxCoeff(), 1e-10);
    }
    // witness floor at the configured length
    {
        const auto grid = default_p_grid(c.p_points, c.p_min, c.p_max);
        SpectralWitness w = spectral_witness(p, g.L, grid);
        add("witness_sigma_min", w.min_sigma, c.tol("witness_floor", 1e-3), /*below=*/false);
    }

    CsvWriter csv(c.output_dir / "verify.csv");
    csv.header({"check", "value", "threshold", "pass"});
    bool all_pass = true;
    for (const auto& chk : checks) {
        csv.row_mixed({chk.name, CsvWriter::format(chk.value), CsvWriter::format(chk.threshold),
                       chk.pass ? "1" : "0"});
        manifest.metric("verify." + chk.name, chk.value);
        all_pass = all_pass && chk.pass;
    }
    manifest.op("verify-suite", all_pass ? "ok" : "failed");
    return all_pass ? 0 : 2;
}

}  // namespace

RunOutcome run(const ExperimentConfig& c) {
    const ValidatedParams p = validate_params(c.params);
    const Grid g(c.L, c.T, c.nx, c.nt);
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + c.output_dir.string());

    ManifestBuilder manifest(c);
    RunOutcome outcome;
    std::mt19937_64 rng(c.seed);

    try {
        switch (c.experiment) {
            case Experiment::Simulate: {
                const StatePair init = build_state(c.initial, g, rng);
                const bool nonlinear = c.params.a1 != 0.0 || c.params.a2 != 0.0;
                Trajectory traj;
                if (nonlinear) {
                    PicardSettings set;
                    set.tol = c.tol("picard_tol", 1e-10);
                    set.maxit = static_cast<int>(c.tol("picard_maxit", 30));
                    NonlinearRun run_ = solve_nonlinear(p, g, init, BoundaryData::zero(g.nt), set);
                    manifest.metric("picard_iterations", run_.iterations);
                    traj = std::move(run_.trajectory);
                } else {
                    ForwardRun run_ = solve_forward_linear(p, g, init, BoundaryData::zero(g.nt));
                    traj = std::move(run_.trajectory);
                }
                dump_trajectory(c.output_dir, "solution", traj, g, c.time_stride);
                dump_norms(c.output_dir, traj, g, p);
                manifest.metric("terminal_x_norm", x_norm(traj.terminal(), p, g));
                manifest.op("simulate", "ok");
                break;
            }
            case Experiment::Adjoint: {
                const StatePair final_data = build_state(c.target, g, rng);
                const AdjointMode mode = c.tol("transpose_mode", 0.0) != 0.0
                                             ? AdjointMode::Transpose
                                             : AdjointMode::Reflection;
                ForwardRun adj = solve_adjoint(p, g, final_data, mode);
                dump_trajectory(c.output_dir, "solution", adj.trajectory, g, c.time_stride);
                dump_traces(c.output_dir, adj.traces, g);
                manifest.metric("initial_x_norm", x_norm(adj.trajectory.slices.front(), p, g));
                manifest.op("adjoint", "ok");
                break;
            }
            case Experiment::CriticalAtlas: {
                const bool include_zero = c.tol("include_zero_entries", 1.0) != 0.0;
                const auto cands = enumerate_candidates(p, c.l_max, include_zero);
                CsvWriter csv(c.output_dir / "atlas.csv");
                csv.header({"L", "alpha", "k", "l", "m", "n", "s", "consistent", "degenerate",
                            "e1", "e2", "e3", "e4", "e5", "e6"});
                for (const auto& cd : cands) {
                    csv.row({cd.L, static_cast<double>(cd.alpha), static_cast<double>(cd.index.k),
                             static_cast<double>(cd.index.l), static_cast<double>(cd.index.m),
                             static_cast<double>(cd.index.n), static_cast<double>(cd.index.s),
                             cd.consistent ? 1.0 : 0.0, cd.degenerate ? 1.0 : 0.0,
                             cd.vieta_residuals[0], cd.vieta_residuals[1], cd.vieta_residuals[2],
                             cd.vieta_residuals[3], cd.vieta_residuals[4], cd.vieta_residuals[5]});
                }
                write_gnuplot(c.output_dir / "atlas.csv", "candidate lengths", "1:2");
                manifest.metric("candidates", static_cast<double>(cands.size()));
                manifest.op("critical-atlas", "ok");
                break;
            }
            case Experiment::WitnessScan: {
                const auto grid = default_p_grid(c.p_points, c.p_min, c.p_max);
                SpectralWitness w = spectral_witness(p, g.L, grid);
                CsvWriter csv(c.output_dir / "witness.csv");
                csv.header({"p", "sigma_min"});
                for (const auto& [pv, s] : w.lambda_scan) csv.row({pv, s});
                write_gnuplot(c.output_dir / "witness.csv", "spectral witness", "1:2");
                manifest.metric("sigma_min", w.min_sigma);
                manifest.metric("argmin_p", w.argmin_p);
                manifest.metric("skipped_modes", w.skipped_modes);
                outcome.metrics["sigma_min"] = w.min_sigma;
                manifest.op("witness-scan", "ok");
                break;
            }
            case Experiment::GramianMargin: {
                const auto m = margin_and_witness(c, p, g);
                CsvWriter csv(c.output_dir / "margin.csv");
                csv.header({"L", "T", "margin", "ritz_max", "sigma_min"});
                csv.row({g.L, g.T, m.at("margin"), m.at("ritz_max"), m.at("sigma_min")});
                for (const auto& [k, v] : m) {
                    manifest.metric(k, v);
                    outcome.metrics[k] = v;
                }
                manifest.op("gramian-margin", "ok");
                break;
            }
            case Experiment::Control: {
                const StatePair init = build_state(c.initial, g, rng);
                const StatePair target = build_state(c.target, g, rng);
                HumOptions opt;
                opt.tol = c.tol("hum_tol", 1e-3);
                opt.maxit = static_cast<int>(c.tol("hum_maxit", 300));
                opt.tikhonov = c.tol("tikhonov", 0.0);
                HumSolution hum = solve_hum(p, g, c.control, init, target, opt);
                dump_controls(c.output_dir, hum.controls, g);
                dump_trajectory(c.output_dir, "solution", hum.trajectory, g, c.time_stride);
                manifest.metric("cg_iterations", hum.report.cg_iterations);
                manifest.metric("terminal_error", hum.report.terminal_error);
                manifest.metric("observability_margin", hum.report.observability_margin);
                outcome.metrics["terminal_error"] = hum.report.terminal_error;
                manifest.op("control", "ok");
                break;
            }
            case Experiment::NonlinearControl: {
                const StatePair init = build_state(c.initial, g, rng);
                const StatePair target = build_state(c.target, g, rng);
                PicardSettings set;
                set.tol = c.tol("picard_tol", 1e-10);
                set.maxit = static_cast<int>(c.tol("picard_maxit", 30));
                NonlinearControlSolution sol = control_nonlinear(
                    p, g, c.control, init, target, set, c.tol("hum_tol", 1e-4),
                    static_cast<int>(c.tol("hum_maxit", 300)),
                    static_cast<int>(c.tol("outer_maxit", 20)));
                dump_controls(c.output_dir, sol.controls, g);
                dump_trajectory(c.output_dir, "solution", sol.trajectory, g, c.time_stride);
                manifest.metric("outer_iterations", sol.report.outer_iterations);
                manifest.metric("terminal_error", sol.report.terminal_error);
                outcome.metrics["terminal_error"] = sol.report.terminal_error;
                manifest.op("nonlinear-control", "ok");
                break;
            }
            case Experiment::VerifySuite: {
                outcome.exit_code = run_verify_suite(c, p, g, manifest);
                break;
            }
        }
    } catch (const NoConvergence& e) {
        manifest.op(experiment_name(c.experiment), std::string("no-convergence: ") + e.what());
        manifest.metric("no_convergence_iterations", e.iterations);
        manifest.metric("no_convergence_residual", e.residual);
        if (c.experiment == Experiment::Control || c.experiment == Experiment::NonlinearControl) {
            double ritz_max = 0.0;
            const double margin = observability_margin(
                p, g, c.control, static_cast<int>(c.tol("margin_matvecs", 60)), c.seed, &ritz_max);
            manifest.metric("observability_margin", margin);
            outcome.metrics["observability_margin"] = margin;
        }
        outcome.exit_code = 2;
    }

    manifest.write(c.output_dir);
    return outcome;
}

RunOutcome sweep(const ExperimentConfig& base, const std::string& axis,
                 const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sweep requires a nonempty value list");
    if (axis != "L" && axis != "T" && axis != "amplitude")
        throw ConfigError("sweep axis must be L, T or amplitude");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw ConfigError("sweep values must be positive");
        if (i && values[i] <= values[i - 1]) throw ConfigError("sweep values must be sorted");
    }

    std::error_code ec;
    std::filesystem::create_directories(base.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + base.output_dir.string());

    struct Row {
        double value = 0.0;
        double margin = std::numeric_limits<double>::quiet_NaN();
        double sigma_min = std::numeric_limits<double>::quiet_NaN();
        double terminal_error = std::numeric_limits<double>::quiet_NaN();
        int exit_code = 0;
    };
    std::vector<Row> rows(values.size());

    auto work = [&](std::size_t i) {
        ExperimentConfig c = base;
        c.seed = base.seed + i;
        if (axis == "L") c.L = values[i];
        else if (axis == "T") c.T = values[i];
        else {
            c.initial.amplitude = values[i];
            c.target.amplitude = values[i];
        }
        Row row;
        row.value = values[i];
        const ValidatedParams p = validate_params(c.params);
        const Grid g(c.L, c.T, c.nx, c.nt);
        const auto m = margin_and_witness(c, p, g);
        row.margin = m.at("margin");
        row.sigma_min = m.at("sigma_min");
        if (base.experiment == Experiment::Control ||
            base.experiment == Experiment::NonlinearControl) {
            std::mt19937_64 rng(c.seed);
            const StatePair init = build_state(c.initial, g, rng);
            const StatePair target = build_state(c.target, g, rng);
            try {
                HumOptions opt;
                opt.tol = c.tol("hum_tol", 1e-3);
                opt.maxit = static_cast<int>(c.tol("hum_maxit", 300));
                HumSolution hum = solve_hum(p, g, c.control, init, target, opt);
                row.terminal_error = hum.report.terminal_error;
            } catch (const NoConvergence&) {
                row.exit_code = 2;
            }
        }
        rows[i] = row;
    };

    const int max_threads =
        std::min<int>(max_threads_from_env(), static_cast<int>(values.size()));
    if (max_threads <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(max_threads);
        for (int t = 0; t < max_threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1))
                    work(i);
            });
        for (auto& th : pool) th.join();
    }

    ManifestBuilder manifest(base);
    CsvWriter csv(base.output_dir / "sweep.csv");
    csv.header({axis, "margin", "sigma_min", "terminal_error", "status"});
    RunOutcome outcome;
    for (const auto& row : rows) {
        csv.row({row.value, row.margin, row.sigma_min, row.terminal_error,
                 static_cast<double>(row.exit_code)});
        outcome.exit_code = std::max(outcome.exit_code, row.exit_code);
    }
    write_gnuplot(base.output_dir / "sweep.csv", "sweep over " + axis, "1:2");
    manifest.op("sweep", "ok");
    manifest.metric("points", static_cast<double>(values.size()));
    manifest.write(base.output_dir);
    return outcome;
}

}  // namespace kdvduo
