#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <vector>

#include "kdvduo/solver.hpp"

namespace kdvduo {

/// Which boundary channels carry controls. Inactive channels are pinned to
/// zero in any synthesized BoundaryData.
struct ControlConfig {
    enum class Variant {
        FourControl,  ///< h2, g0, g1, g2
        OneControl,   ///< h2 only
        AltMOP,       ///< h1, g1, h2, g2
        AltB,         ///< h0, h1, h2, g2
        AltG2,        ///< g2 only
    };
    Variant variant = Variant::FourControl;

    bool active(Channel ch) const;
    static ControlConfig four() { return {Variant::FourControl}; }
    static ControlConfig one() { return {Variant::OneControl}; }
};

const char* variant_name(ControlConfig::Variant v);

/// Convergence record of a control solve.
struct HumReport {
    int cg_iterations = 0;
    std::vector<double> cg_residual_history;  // X-norm of the residual per iteration
    double terminal_error = 0.0;              // x_norm((u,v)(T) - target)
    double observability_margin = 0.0;        // smallest Ritz value seen by CG
    std::array<double, 6> control_norms{};    // natural-control-space norm per channel
    std::array<double, 6> removed_means{};    // mean removed by the smoothing channels
};

/// Fills the active channels from adjoint traces:
///   g0 = (-Delta_t)^(-1/3)(a phi_xx(0,.) + psi_xx(0,.)/c)
///   g1 = -(-Delta_t)^(-1/3)(a phi_xx(L,.) + psi_xx(L,.)/c)
///   g2 = a phi_x(L,.) + psi_x(L,.)/c
///   h2 = phi_x(L,.) + (ab/c) psi_x(L,.)
/// and the analogous combinations for the alternate configurations (x=0
/// channels take +, x=L Dirichlet channels take -, second-derivative
/// channels are smoothed, first-derivative channels are not).
BoundaryData control_formulas(const TraceSet& traces, const ControlConfig& cfg,
                              const ValidatedParams& p, const Grid& g);

/// One application of the control Gramian: discrete-transpose adjoint from z,
/// control synthesis, forward solve from zero state, terminal slice.
/// Symmetric positive semidefinite under the Euclidean pairing.
class GramianOperator {
  public:
    GramianOperator(const ValidatedParams& p, const Grid& g, const ControlConfig& cfg);

    StatePair apply(const StatePair& z) const;

    /// Controls synthesized for a given final-state seed z (interior series
    /// per channel, length nt; inactive channels empty).
    std::array<Eigen::VectorXd, 6> controls_for(const StatePair& z,
                                                std::array<double, 6>* removed_means = nullptr) const;

    const LinearSolver& forward_solver() const { return forward_; }
    const ControlConfig& config() const { return cfg_; }

  private:
    ValidatedParams params_;
    Grid grid_;
    ControlConfig cfg_;
    LinearSolver forward_;
};

struct HumOptions {
    double tol = 1e-3;          // stop when x_norm(residual) <= tol * x_norm(rhs)
    int maxit = 300;
    double tikhonov = 0.0;      // optional shift added to the Gramian
    double blowup_factor = 1e6; // residual growth that triggers NoConvergence
    const StatePair* warm_start = nullptr;
};

/// Result of a linear control solve.
struct HumSolution {
    BoundaryData controls;   // full-length series, index 0 = 0
    Trajectory trajectory;   // controlled trajectory from the given initial state
    HumReport report;
    StatePair adjoint_seed;  // the CG solution z (final data of the adjoint)
};

/// Steers init to target: conjugate gradient on the Gramian with right-hand
/// side target - free evolution of init. Throws NoConvergence when the
/// iteration budget is exhausted or the residual diverges (near-critical
/// length or an unobservable configuration).
HumSolution solve_hum(const ValidatedParams& p, const Grid& g, const ControlConfig& cfg,
                      const StatePair& init, const StatePair& target, const HumOptions& opt = {});

/// Smallest Ritz value of the Gramian from a Lanczos run on a fixed
/// band-limited probe (matvecs applications, deterministic for a fixed seed).
double observability_margin(const ValidatedParams& p, const Grid& g, const ControlConfig& cfg,
                            int matvecs = 60, std::uint64_t seed = 0x5eedULL,
                            double* ritz_max = nullptr);

/// Sufficient small-length condition for the one-control configuration:
/// L < min{b,c} * T / (max{b,c} * beta * C_T) with empirical estimates of
/// beta and C_T. Returns (holds, bound).
std::pair<bool, double> check_one_control_condition(const ValidatedParams& p, double L, double T,
                                                    double beta_hat, double c_t_hat);

/// Empirical trace constant: largest ratio of a boundary-trace Sobolev norm
/// (exponent (1-k)/3) to the X-norm of the final data, over a deterministic
/// probe basis of sine modes.
double estimate_trace_constant(const ValidatedParams& p, const Grid& g, int probes = 5);

}  // namespace kdvduo
