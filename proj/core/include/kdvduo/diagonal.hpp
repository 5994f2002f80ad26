#pragma once

#include <Eigen/Core>

#include "kdvduo/state.hpp"

namespace kdvduo {

/// Eigen-decomposition of the dispersion matrix B = [[1, a], [ab/c, 1/c]].
///
/// The change of variable (u,v) = M (u~,v~) turns the coupled dispersive part
/// into two scalar equations with coefficients alpha_plus, alpha_minus (the
/// eigenvalues of B). The transport term r*v_x/c is not diagonalized and is
/// carried as a source. identity is set when a == 0 and the system is already
/// decoupled; then M = I and the coefficients are (1, 1/c).
struct DecoupledParams {
    double lambda = 0.0;
    double alpha_plus = 0.0;
    double alpha_minus = 0.0;
    Eigen::Matrix2d M;
    Eigen::Matrix2d M_inv;
    bool identity = false;
};

/// Builds the decoupling transform. Eigenvalues are computed as
/// ((1 + 1/c) +- lambda)/2, lambda = sqrt((1/c - 1)^2 + 4 a^2 b / c), and
/// cross-checked against a direct 2x2 eigensolve.
DecoupledParams compute_decoupling(const ValidatedParams& p);

/// Applies M_inv nodewise: physical state -> decoupled variables.
StatePair to_diagonal(const StatePair& s, const DecoupledParams& d);
/// Applies M nodewise: decoupled variables -> physical state.
StatePair from_diagonal(const StatePair& s, const DecoupledParams& d);

/// Applies M_inv to each boundary-channel pair (h_i, g_i) and to the source
/// fields; same linear map as to_diagonal.
BoundaryData transform_boundary(const BoundaryData& bd, const DecoupledParams& d);
SourcePair transform_sources(const SourcePair& src, const DecoupledParams& d);

}  // namespace kdvduo
