#include "kdvduo/nonlinear.hpp"

#include <cmath>

namespace kdvduo {

namespace {

Eigen::VectorXd d_dx(const Eigen::VectorXd& f, double dx) {
    const int nx = static_cast<int>(f.size());
    Eigen::VectorXd out(nx);
    for (int i = 1; i < nx - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    out[0] = (-1.5 * f[0] + 2.0 * f[1] - 0.5 * f[2]) / dx;
    out[nx - 1] = (1.5 * f[nx - 1] - 2.0 * f[nx - 2] + 0.5 * f[nx - 3]) / dx;
    return out;
}

}  // namespace

StatePair nonlinearity(const ValidatedParams& p, const StatePair& slice, const Grid& g) {
    if (slice.size() != g.nx) throw DimensionMismatch("slice size does not match grid");
    const double dx = g.dx();
    const Eigen::VectorXd ux = d_dx(slice.u, dx);
    const Eigen::VectorXd vx = d_dx(slice.v, dx);
    const Eigen::VectorXd uvx = d_dx(slice.u.cwiseProduct(slice.v), dx);
    StatePair out;
    out.u = -p.a1() * slice.v.cwiseProduct(vx) - p.a2() * uvx;
    out.v = -(p.a2() * p.b() / p.c()) * slice.u.cwiseProduct(ux) -
            (p.a1() * p.b() / p.c()) * uvx;
    return out;
}

SourcePair nonlinearity_sources(const ValidatedParams& p, const Trajectory& traj, const Grid& g) {
    SourcePair src;
    src.slices.reserve(traj.slices.size());
    for (const auto& sl : traj.slices) src.slices.push_back(nonlinearity(p, sl, g));
    return src;
}

NonlinearRun solve_nonlinear(const ValidatedParams& p, const Grid& g, const StatePair& init,
                             const BoundaryData& bd, const PicardSettings& set,
                             const SourcePair& extra_src) {
    if (!(set.tol > 0.0) || set.maxit < 1) throw InvalidParams("picard settings invalid");
    if (!(set.damping > 0.0) || set.damping > 1.0)
        throw InvalidParams("picard damping must lie in (0,1]");
    LinearSolver solver(p, g);

    ForwardRun current = solver.forward(init, bd, extra_src);
    std::vector<double> diffs;
    double diff = 0.0;
    for (int it = 1; it <= set.maxit; ++it) {
        SourcePair src = nonlinearity_sources(p, current.trajectory, g);
        if (!extra_src.empty())
            for (std::size_t n = 0; n < src.slices.size(); ++n) {
                src.slices[n].u += extra_src.slices[n].u;
                src.slices[n].v += extra_src.slices[n].v;
            }
        ForwardRun next = solver.forward(init, bd, src);
        if (set.damping < 1.0) {
            for (std::size_t n = 0; n < next.trajectory.slices.size(); ++n) {
                next.trajectory.slices[n].u = (1.0 - set.damping) * current.trajectory.slices[n].u +
                                              set.damping * next.trajectory.slices[n].u;
                next.trajectory.slices[n].v = (1.0 - set.damping) * current.trajectory.slices[n].v +
                                              set.damping * next.trajectory.slices[n].v;
            }
        }
        diff = 0.0;
        for (std::size_t n = 0; n < next.trajectory.slices.size(); ++n) {
            StatePair delta(next.trajectory.slices[n].u - current.trajectory.slices[n].u,
                            next.trajectory.slices[n].v - current.trajectory.slices[n].v);
            diff = std::max(diff, x_norm(delta, p, g));
        }
        current = std::move(next);
        diffs.push_back(diff);
        if (diff < set.tol) {
            NonlinearRun run;
            run.traces = extract_traces(current.trajectory, g);
            run.trajectory = std::move(current.trajectory);
            run.iterations = it;
            run.picard_differences = std::move(diffs);
            return run;
        }
    }
    throw NoConvergence("nonlinear picard iteration", set.maxit, diff);
}

StatePair duhamel_endpoint(const ValidatedParams& p, const Grid& g, const Trajectory& traj) {
    if (static_cast<int>(traj.slices.size()) != g.nt + 1)
        throw DimensionMismatch("trajectory length does not match grid");
    LinearSolver solver(p, g);
    SourcePair src = nonlinearity_sources(p, traj, g);
    for (auto& sl : src.slices) {
        sl.u = -sl.u;
        sl.v = -sl.v;
    }
    std::array<const Eigen::VectorXd*, 6> no_controls{};
    return solver.forward_terminal(StatePair::zero(g.nx), no_controls, src);
}

NonlinearControlSolution control_nonlinear(const ValidatedParams& p, const Grid& g,
                                           const ControlConfig& cfg, const StatePair& init,
                                           const StatePair& target, const PicardSettings& set,
                                           double hum_tol, int hum_maxit, int outer_maxit) {
    NonlinearControlSolution sol;
    StatePair duhamel = StatePair::zero(g.nx);
    StatePair warm = StatePair::zero(g.nx);
    StatePair prev_term;
    bool have_prev = false;
    double diff = 0.0;

    for (int outer = 1; outer <= outer_maxit; ++outer) {
        StatePair augmented(target.u + duhamel.u, target.v + duhamel.v);
        HumOptions opt;
        opt.tol = hum_tol;
        opt.maxit = hum_maxit;
        opt.warm_start = (outer > 1) ? &warm : nullptr;
        HumSolution hum = solve_hum(p, g, cfg, init, augmented, opt);
        warm = hum.adjoint_seed;

        NonlinearRun nl = solve_nonlinear(p, g, init, hum.controls, set);
        const StatePair term = nl.trajectory.terminal();
        if (have_prev) {
            diff = x_norm(StatePair(term.u - prev_term.u, term.v - prev_term.v), p, g);
            sol.report.outer_differences.push_back(diff);
        }
        sol.report.outer_iterations = outer;
        sol.report.last_hum = hum.report;
        sol.controls = std::move(hum.controls);
        sol.trajectory = std::move(nl.trajectory);
        sol.report.terminal_error =
            x_norm(StatePair(term.u - target.u, term.v - target.v), p, g);

        if (have_prev && diff < set.tol) return sol;
        prev_term = term;
        have_prev = true;
        duhamel = duhamel_endpoint(p, g, sol.trajectory);
    }
    throw NoConvergence("nonlinear control outer iteration", outer_maxit, diff);
}

}  // namespace kdvduo
