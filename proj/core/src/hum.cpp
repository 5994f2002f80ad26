#include "kdvduo/hum.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "kdvduo/time_sobolev.hpp"

namespace kdvduo {

bool ControlConfig::active(Channel ch) const {
    switch (variant) {
        case Variant::FourControl:
            return ch == Channel::H2 || ch == Channel::G0 || ch == Channel::G1 || ch == Channel::G2;
        case Variant::OneControl:
            return ch == Channel::H2;
        case Variant::AltMOP:
            return ch == Channel::H1 || ch == Channel::G1 || ch == Channel::H2 || ch == Channel::G2;
        case Variant::AltB:
            return ch == Channel::H0 || ch == Channel::H1 || ch == Channel::H2 || ch == Channel::G2;
        case Variant::AltG2:
            return ch == Channel::G2;
    }
    return false;
}

const char* variant_name(ControlConfig::Variant v) {
    switch (v) {
        case ControlConfig::Variant::FourControl: return "four";
        case ControlConfig::Variant::OneControl: return "one";
        case ControlConfig::Variant::AltMOP: return "alt-mop";
        case ControlConfig::Variant::AltB: return "alt-b";
        case ControlConfig::Variant::AltG2: return "alt-g2";
    }
    return "?";
}

namespace {

// duality partner of each channel from physical adjoint traces, with the
// x=L Dirichlet sign flip; k is the trace order entering the channel
struct ChannelFormula {
    int k;        // 1 for the derivative channels, 2 for the Dirichlet ones
    End end;
    double sign;  // applied to the smoothed combination
    bool smooth;  // (-Delta_t)^(-1/3) applied
};

ChannelFormula channel_formula(Channel ch) {
    switch (ch) {
        case Channel::H0: return {2, End::Left, +1.0, true};
        case Channel::G0: return {2, End::Left, +1.0, true};
        case Channel::H1: return {2, End::Right, -1.0, true};
        case Channel::G1: return {2, End::Right, -1.0, true};
        case Channel::H2: return {1, End::Right, +1.0, false};
        case Channel::G2: return {1, End::Right, +1.0, false};
    }
    return {0, End::Left, 0.0, false};
}

// the u-row combinations pair with the h channels, the v-row ones with g
Eigen::VectorXd channel_combo(Channel ch, const TraceSet& traces, const ValidatedParams& p) {
    const ChannelFormula f = channel_formula(ch);
    const bool is_h = (ch == Channel::H0 || ch == Channel::H1 || ch == Channel::H2);
    const Eigen::VectorXd& phi = traces.at(0, f.k, f.end);
    const Eigen::VectorXd& psi = traces.at(1, f.k, f.end);
    if (phi.size() == 0 || psi.size() == 0 || phi.size() != psi.size())
        throw MissingTrace("adjoint trace series missing or inconsistent");
    if (is_h) return phi + (p.a() * p.b() / p.c()) * psi;
    return p.a() * phi + psi / p.c();
}

Eigen::VectorXd smooth_interior(const Eigen::VectorXd& interior, double T, double* removed_mean) {
    if (removed_mean) *removed_mean = interior.mean();
    SobolevSpec spec{0.0, T, SobolevSpec::Mode::Homogeneous};
    return fractional_time_operator(interior, -1.0 / 3.0, spec);
}

}  // namespace

BoundaryData control_formulas(const TraceSet& traces, const ControlConfig& cfg,
                              const ValidatedParams& p, const Grid& g) {
    const int nt = g.nt;
    BoundaryData bd = BoundaryData::zero(nt);
    for (Channel ch : kChannels) {
        if (!cfg.active(ch)) continue;
        const ChannelFormula f = channel_formula(ch);
        Eigen::VectorXd combo = channel_combo(ch, traces, p);
        if (combo.size() != nt + 1) throw MissingTrace("trace series length does not match grid");
        Eigen::VectorXd interior = combo.segment(1, nt);
        if (f.smooth) interior = smooth_interior(interior, g.T, nullptr);
        bd[ch].segment(1, nt) = f.sign * interior;
    }
    return bd;
}

GramianOperator::GramianOperator(const ValidatedParams& p, const Grid& g, const ControlConfig& cfg)
    : params_(p), grid_(g), cfg_(cfg), forward_(p, g) {}

std::array<Eigen::VectorXd, 6> GramianOperator::controls_for(
    const StatePair& z, std::array<double, 6>* removed_means) const {
    TransposeAdjointRun adj = forward_.adjoint_transpose(z);
    // the boundary dual series scaled by dx/dt are the trace combinations of
    // the control formulas, signs included; every active channel smooths its
    // own series with a plus sign
    const double fac = grid_.dx() / grid_.dt();
    const int nt = grid_.nt;
    std::array<Eigen::VectorXd, 6> controls;
    for (Channel ch : kChannels) {
        const int ci = static_cast<int>(ch);
        if (removed_means) (*removed_means)[ci] = 0.0;
        if (!cfg_.active(ch)) continue;
        Eigen::VectorXd interior = fac * adj.boundary_series[ci].segment(1, nt);
        if (channel_formula(ch).smooth) {
            double mean = 0.0;
            interior = smooth_interior(interior, grid_.T, &mean);
            if (removed_means) (*removed_means)[ci] = mean;
        }
        controls[ci] = std::move(interior);
    }
    return controls;
}

StatePair GramianOperator::apply(const StatePair& z) const {
    const auto controls = controls_for(z);
    std::array<const Eigen::VectorXd*, 6> ptrs{};
    for (int i = 0; i < 6; ++i) ptrs[i] = controls[i].size() ? &controls[i] : nullptr;
    return forward_.forward_terminal(StatePair::zero(grid_.nx), ptrs);
}

namespace {

double smallest_ritz(const std::vector<double>& alphas, const std::vector<double>& betas,
                     double* largest = nullptr) {
    const int k = static_cast<int>(alphas.size());
    if (k == 0) return 0.0;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) T(i, i) = alphas[i];
    for (int i = 0; i + 1 < k; ++i) T(i, i + 1) = T(i + 1, i) = betas[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    if (largest) *largest = es.eigenvalues().maxCoeff();
    return es.eigenvalues().minCoeff();
}

}  // namespace

HumSolution solve_hum(const ValidatedParams& p, const Grid& g, const ControlConfig& cfg,
                      const StatePair& init, const StatePair& target, const HumOptions& opt) {
    if (!(opt.tol > 0.0)) throw InvalidParams("hum tolerance must be positive");
    GramianOperator gram(p, g, cfg);

    // reduce to zero initial state by superposition
    std::array<const Eigen::VectorXd*, 6> no_controls{};
    StatePair free_terminal = gram.forward_solver().forward_terminal(init, no_controls);
    StatePair b = StatePair(target.u - free_terminal.u, target.v - free_terminal.v);

    const double b_x = x_norm(b, p, g);
    auto apply = [&](const StatePair& z) {
        StatePair out = gram.apply(z);
        if (opt.tikhonov != 0.0) {
            out.u += opt.tikhonov * z.u;
            out.v += opt.tikhonov * z.v;
        }
        return out;
    };

    HumSolution sol;
    StatePair z = StatePair::zero(g.nx);
    StatePair r = b;
    if (opt.warm_start) {
        z = *opt.warm_start;
        StatePair az = apply(z);
        r = StatePair(b.u - az.u, b.v - az.v);
    }
    StatePair d = r;
    double rr = euclidean_pairing(r, r);

    // conjugate gradient in the Euclidean pairing; cg coefficients double as
    // a Lanczos tridiagonal for the margin estimate
    std::vector<double> lanczos_diag, lanczos_off;
    double alpha_prev = 0.0, beta_prev = 0.0;
    int it = 0;
    while (true) {
        const double r_x = x_norm(r, p, g);
        sol.report.cg_residual_history.push_back(r_x);
        if (b_x == 0.0 || r_x <= opt.tol * b_x) break;
        if (r_x > opt.blowup_factor * b_x)
            throw NoConvergence("hum conjugate gradient (residual diverged)", it, r_x / b_x);
        if (it >= opt.maxit) throw NoConvergence("hum conjugate gradient", it, r_x / b_x);

        const StatePair ad = apply(d);
        const double dad = euclidean_pairing(d, ad);
        if (!(dad > 0.0))
            throw NoConvergence("hum conjugate gradient (operator lost positivity)", it, r_x / b_x);
        const double alpha = rr / dad;
        z.u += alpha * d.u;
        z.v += alpha * d.v;
        r.u -= alpha * ad.u;
        r.v -= alpha * ad.v;
        const double rr_new = euclidean_pairing(r, r);
        const double beta = rr_new / rr;
        d.u = r.u + beta * d.u;
        d.v = r.v + beta * d.v;

        if (it == 0) {
            lanczos_diag.push_back(1.0 / alpha);
        } else {
            lanczos_diag.push_back(1.0 / alpha + beta_prev / alpha_prev);
        }
        lanczos_off.push_back(std::sqrt(beta) / alpha);
        alpha_prev = alpha;
        beta_prev = beta;
        rr = rr_new;
        ++it;
    }
    if (!lanczos_off.empty()) lanczos_off.pop_back();
    sol.report.cg_iterations = it;
    sol.report.observability_margin = smallest_ritz(lanczos_diag, lanczos_off);

    // synthesize the controls and replay from the actual initial state
    const auto controls = gram.controls_for(z, &sol.report.removed_means);
    BoundaryData bd = BoundaryData::zero(g.nt);
    for (Channel ch : kChannels) {
        const int ci = static_cast<int>(ch);
        if (controls[ci].size()) bd[ch].segment(1, g.nt) = controls[ci];
    }
    ForwardRun run = gram.forward_solver().forward(init, bd);
    sol.report.terminal_error =
        x_norm(StatePair(run.trajectory.terminal().u - target.u,
                         run.trajectory.terminal().v - target.v),
               p, g);
    for (Channel ch : kChannels) {
        const int ci = static_cast<int>(ch);
        if (!controls[ci].size()) continue;
        if (channel_formula(ch).smooth) {
            SobolevSpec spec{1.0 / 3.0, g.T, SobolevSpec::Mode::Inhomogeneous};
            sol.report.control_norms[ci] = sobolev_norm(controls[ci], spec);
        } else {
            sol.report.control_norms[ci] = l2_time_norm(controls[ci], g.T);
        }
    }
    sol.controls = std::move(bd);
    sol.trajectory = std::move(run.trajectory);
    sol.adjoint_seed = std::move(z);
    return sol;
}

double observability_margin(const ValidatedParams& p, const Grid& g, const ControlConfig& cfg,
                            int matvecs, std::uint64_t seed, double* ritz_max) {
    GramianOperator gram(p, g, cfg);

    // deterministic band-limited probe: the margin of the resolved scales
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    StatePair v = StatePair::zero(g.nx);
    for (int k = 1; k <= 6; ++k) {
        const double cu = normal(rng) / (k * k);
        const double cv = normal(rng) / (k * k);
        for (int i = 0; i < g.nx; ++i) {
            const double s = std::sin(k * std::numbers::pi * g.x(i) / g.L);
            v.u[i] += cu * s;
            v.v[i] += cv * s;
        }
    }
    const double nv = std::sqrt(euclidean_pairing(v, v));
    v.u /= nv;
    v.v /= nv;

    std::vector<StatePair> basis;
    std::vector<double> alphas, betas;
    basis.push_back(v);
    for (int j = 0; j < matvecs; ++j) {
        StatePair w = gram.apply(basis.back());
        const double alpha = euclidean_pairing(w, basis.back());
        alphas.push_back(alpha);
        // full reorthogonalization (small subspace, exactness over speed)
        for (const auto& q : basis) {
            const double c = euclidean_pairing(w, q);
            w.u -= c * q.u;
            w.v -= c * q.v;
        }
        for (const auto& q : basis) {
            const double c = euclidean_pairing(w, q);
            w.u -= c * q.u;
            w.v -= c * q.v;
        }
        const double beta = std::sqrt(euclidean_pairing(w, w));
        if (beta < 1e-14) break;
        betas.push_back(beta);
        w.u /= beta;
        w.v /= beta;
        basis.push_back(std::move(w));
    }
    if (!betas.empty() && betas.size() == alphas.size()) betas.pop_back();
    return smallest_ritz(alphas, betas, ritz_max);
}

std::pair<bool, double> check_one_control_condition(const ValidatedParams& p, double L, double T,
                                                    double beta_hat, double c_t_hat) {
    if (!(beta_hat > 0.0) || !(c_t_hat > 0.0))
        throw InvalidParams("empirical constants must be positive");
    const double bound =
        std::min(p.b(), p.c()) * T / (std::max(p.b(), p.c()) * beta_hat * c_t_hat);
    return {L < bound, bound};
}

double estimate_trace_constant(const ValidatedParams& p, const Grid& g, int probes) {
    double best = 0.0;
    for (int j = 1; j <= probes; ++j) {
        for (int comp = 0; comp < 2; ++comp) {
            StatePair probe = StatePair::zero(g.nx);
            Eigen::VectorXd mode(g.nx);
            for (int i = 0; i < g.nx; ++i)
                mode[i] = std::sin(j * std::numbers::pi * g.x(i) / g.L);
            (comp == 0 ? probe.u : probe.v) = mode;
            const double denom = x_norm(probe, p, g);
            ForwardRun adj = solve_adjoint(p, g, probe, AdjointMode::Reflection);
            for (int k = 0; k <= 2; ++k) {
                SobolevSpec spec{(1.0 - k) / 3.0, g.T, SobolevSpec::Mode::Inhomogeneous};
                for (End e : {End::Left, End::Right}) {
                    for (int c2 = 0; c2 < 2; ++c2) {
                        const Eigen::VectorXd interior =
                            adj.traces.at(c2, k, e).segment(1, g.nt);
                        best = std::max(best, sobolev_norm(interior, spec) / denom);
                    }
                }
            }
        }
    }
    return best;
}

}  // namespace kdvduo
