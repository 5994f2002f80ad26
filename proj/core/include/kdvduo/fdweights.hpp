#pragma once

#include <Eigen/Core>

namespace kdvduo {

/// Finite-difference weights for the m-th derivative at x0 on the given nodes
/// (Fornberg's algorithm). Weights are exact on polynomials of degree
/// nodes.size()-1.
Eigen::VectorXd fd_weights(const Eigen::VectorXd& nodes, double x0, int m);

}  // namespace kdvduo
