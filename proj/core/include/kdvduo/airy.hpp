#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "kdvduo/grid.hpp"
#include "kdvduo/state.hpp"

namespace kdvduo {

/// Trajectory of a scalar field with its boundary traces
/// (traces[k][0] at x=0, traces[k][1] at x=L, k = 0,1,2).
struct ScalarRun {
    std::vector<Eigen::VectorXd> slices;                   // length nt+1
    std::array<std::array<Eigen::VectorXd, 2>, 3> traces;  // [k][end]
};

/// Crank-Nicolson solve of u_t + alpha u_xxx = f with u(0)=h0, u(L)=h1,
/// u_x(L)=h2. Sources are per time node (empty = zero).
ScalarRun solve_airy_ibvp(double alpha, const Grid& g, const Eigen::VectorXd& u0,
                          const Eigen::VectorXd& h0, const Eigen::VectorXd& h1,
                          const Eigen::VectorXd& h2,
                          const std::vector<Eigen::VectorXd>& f = {});

}  // namespace kdvduo
