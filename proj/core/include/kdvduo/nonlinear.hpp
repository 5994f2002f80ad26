#pragma once

#include "kdvduo/hum.hpp"
#include "kdvduo/solver.hpp"

namespace kdvduo {

/// Control of the Picard iteration used by the nonlinear solver.
struct PicardSettings {
    double tol = 1e-10;   // sup-over-time X-norm of successive iterate differences
    int maxit = 30;
    double damping = 1.0; // in (0,1]; 1 = undamped
};

/// Evaluates the nonlinear source terms on one slice:
///   f = -a1 v v_x - a2 (uv)_x
///   s = -(a2 b / c) u u_x - (a1 b / c) (uv)_x
/// (the transport term r v_x / c lives in the linear operator, not here).
/// Derivatives are centered second order, one-sided at the endpoints;
/// products are formed pointwise before differentiating.
StatePair nonlinearity(const ValidatedParams& p, const StatePair& slice, const Grid& g);

/// Per-slice nonlinear sources of a whole trajectory.
SourcePair nonlinearity_sources(const ValidatedParams& p, const Trajectory& traj, const Grid& g);

struct NonlinearRun {
    Trajectory trajectory;
    TraceSet traces;
    int iterations = 0;
    std::vector<double> picard_differences;  // successive-iterate norms
};

/// Picard iteration on the Duhamel form: repeatedly solves the linear system
/// with the previous iterate's nonlinear sources. extra_src is added to the
/// nonlinear sources on every iterate (used by manufactured-solution tests).
NonlinearRun solve_nonlinear(const ValidatedParams& p, const Grid& g, const StatePair& init,
                             const BoundaryData& bd, const PicardSettings& set = {},
                             const SourcePair& extra_src = SourcePair::zero());

/// Integral of the (sign-reversed) nonlinear sources along the homogeneous
/// linear flow, evaluated at t = T: the correction added to the target in the
/// outer control iteration. For a trajectory solving the nonlinear system,
/// terminal slice = linear evolution of (init, bd) minus this endpoint.
StatePair duhamel_endpoint(const ValidatedParams& p, const Grid& g, const Trajectory& traj);

struct NonlinearControlReport {
    int outer_iterations = 0;
    double terminal_error = 0.0;            // x_norm((u,v)(T) - target)
    std::vector<double> outer_differences;  // successive terminal differences
    HumReport last_hum;
};

struct NonlinearControlSolution {
    BoundaryData controls;
    Trajectory trajectory;
    NonlinearControlReport report;
};

/// Outer fixed point: controls from solve_hum(init, target + duhamel
/// endpoint of the current trajectory), trajectory from solve_nonlinear with
/// those controls, until successive terminal slices settle below set.tol.
/// The conjugate gradient is warm-started across outer iterations.
NonlinearControlSolution control_nonlinear(const ValidatedParams& p, const Grid& g,
                                           const ControlConfig& cfg, const StatePair& init,
                                           const StatePair& target, const PicardSettings& set = {},
                                           double hum_tol = 1e-4, int hum_maxit = 300,
                                           int outer_maxit = 20);

}  // namespace kdvduo
