#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <array>
#include <complex>
#include <memory>

#include "kdvduo/state.hpp"

namespace kdvduo {

/// Endpoint selector for trace series.
enum class End { Left = 0, Right = 1 };

/// Boundary traces d^k/dx^k u and v at x = 0 and x = L, k = 0,1,2.
/// Each series has length nt+1.
struct TraceSet {
    // [component 0=u,1=v][k][end]
    std::array<std::array<std::array<Eigen::VectorXd, 2>, 3>, 2> series;

    Eigen::VectorXd& at(int comp, int k, End e) { return series[comp][k][static_cast<int>(e)]; }
    const Eigen::VectorXd& at(int comp, int k, End e) const {
        return series[comp][k][static_cast<int>(e)];
    }

    static TraceSet zero(int nt);
};

/// Result of a forward (or reflected-adjoint) solve.
struct ForwardRun {
    Trajectory trajectory;
    TraceSet traces;
};

/// Result of the discrete-transpose adjoint recursion.
///
/// boundary_series[ch][n] is the entry of the transposed step at the boundary
/// row of channel ch, time index n (index 0 unused). These pair exactly with
/// the boundary data in the Euclidean duality identity; dividing by dt/dx
/// gives second-order approximations of the adjoint trace combinations.
struct TransposeAdjointRun {
    StatePair initial;                              // z at t=0
    std::array<Eigen::VectorXd, 6> boundary_series; // per channel, length nt+1
    Trajectory trajectory;                          // filled when requested
};

/// Crank-Nicolson solver for the coupled linear system
///   u_t + u_xxx + d12 v_xxx = f
///   v_t + (r/c) v_x + d21 u_xxx + (1/c) v_xxx = s
/// with boundary rows u(0), u(L), u_x(L), v(0), v(L), v_x(L).
///
/// The forward system has (d12, d21) = (a, ab/c); the adjoint system (after
/// the x -> L-x, t -> T-t reflection) has the transposed coupling (ab/c, a).
/// The step matrices are constant, factorized once at construction.
class LinearSolver {
  public:
    LinearSolver(const ValidatedParams& p, const Grid& g, bool adjoint_coupling = false);
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    const Grid& grid() const { return grid_; }
    const ValidatedParams& params() const { return params_; }

    /// Full forward solve; keeps the trajectory and extracts traces.
    ForwardRun forward(const StatePair& init, const BoundaryData& bd,
                       const SourcePair& src = SourcePair::zero()) const;

    /// Forward solve returning only the terminal slice (fast path for the
    /// Gramian loop). Controls are interior series of length nt (values at
    /// t_1..t_nt) for the active channels; null entries mean zero.
    StatePair forward_terminal(const StatePair& init,
                               const std::array<const Eigen::VectorXd*, 6>& controls,
                               const SourcePair& src = SourcePair::zero()) const;

    /// Discrete-transpose adjoint from final data z: applies the exact
    /// transpose of the forward one-step operator backward in time.
    TransposeAdjointRun adjoint_transpose(const StatePair& final, bool keep_trajectory = false) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    ValidatedParams params_;
    Grid grid_;
};

/// Monolithic implicit solve of the coupled linear system. Returns the
/// trajectory together with the extracted boundary traces.
ForwardRun solve_forward_linear(const ValidatedParams& p, const Grid& g, const StatePair& init,
                                const BoundaryData& bd, const SourcePair& src = SourcePair::zero());

/// Cross-check route: diagonalize, solve the two scalar equations, iterate the
/// transport term as a lagged source (Picard) until the trajectory is stable.
ForwardRun solve_forward_via_diagonalization(const ValidatedParams& p, const Grid& g,
                                             const StatePair& init, const BoundaryData& bd,
                                             const SourcePair& src = SourcePair::zero(),
                                             double tol = 1e-10, int maxit = 50);

enum class AdjointMode {
    Reflection,  ///< reflect x -> L-x, t -> T-t and reuse the forward solver
    Transpose,   ///< exact transpose of the discrete forward step
};

/// Solves the adjoint system backward from final data with homogeneous
/// adjoint boundary conditions phi(0)=phi(L)=phi_x(0)=0 (same for psi).
/// The returned trajectory is indexed by forward time (slice n ~ t_n).
ForwardRun solve_adjoint(const ValidatedParams& p, const Grid& g, const StatePair& final,
                         AdjointMode mode);

/// One-sided second-order boundary traces of a trajectory.
TraceSet extract_traces(const Trajectory& traj, const Grid& g);

/// Roots of s + a*lambda^3 = 0 with s = i*a*(rho*L)^3:
/// lambda_0 = i*L*rho, lambda_{1,2} = -i*L*rho*(1 +- i*sqrt(3))/2.
std::array<std::complex<double>, 3> cubic_characteristic_roots(double a_coef, double L, double rho);

}  // namespace kdvduo
