#include "kdvduo/diagonal.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "kdvduo/errors.hpp"

namespace kdvduo {

DecoupledParams compute_decoupling(const ValidatedParams& p) {
    DecoupledParams d;
    const double a = p.a(), b = p.b(), c = p.c();
    if (a == 0.0) {
        d.identity = true;
        d.lambda = std::abs(1.0 / c - 1.0);
        d.alpha_plus = 1.0;
        d.alpha_minus = 1.0 / c;
        d.M = Eigen::Matrix2d::Identity();
        d.M_inv = Eigen::Matrix2d::Identity();
        return d;
    }
    const double q = 1.0 / c - 1.0;
    d.lambda = std::sqrt(q * q + 4.0 * a * a * b / c);
    d.alpha_plus = 0.5 * ((1.0 + 1.0 / c) + d.lambda);
    d.alpha_minus = 0.5 * ((1.0 + 1.0 / c) - d.lambda);

    d.M << 2.0 * a, 2.0 * a, q + d.lambda, q - d.lambda;
    const double det = d.M.determinant();
    if (std::abs(det) < 1e-12 * d.M.squaredNorm())
        throw DegenerateTransform("eigenvector matrix is numerically singular");
    d.M_inv = d.M.inverse();

    // cross-check against a direct 2x2 eigensolve of the dispersion matrix
    Eigen::Matrix2d B;
    B << 1.0, a, a * b / c, 1.0 / c;
    Eigen::EigenSolver<Eigen::Matrix2d> es(B);
    const double e0 = es.eigenvalues()[0].real();
    const double e1 = es.eigenvalues()[1].real();
    const double lo = std::min(e0, e1), hi = std::max(e0, e1);
    const double scale = B.norm();
    if (std::abs(hi - d.alpha_plus) > 1e-10 * scale || std::abs(lo - d.alpha_minus) > 1e-10 * scale)
        throw DegenerateTransform("closed-form eigenvalues disagree with direct eigensolve");
    return d;
}

namespace {

StatePair apply_2x2(const StatePair& s, const Eigen::Matrix2d& T) {
    if (s.u.size() != s.v.size()) throw DimensionMismatch("component lengths differ");
    StatePair out;
    out.u = T(0, 0) * s.u + T(0, 1) * s.v;
    out.v = T(1, 0) * s.u + T(1, 1) * s.v;
    return out;
}

}  // namespace

StatePair to_diagonal(const StatePair& s, const DecoupledParams& d) {
    return apply_2x2(s, d.M_inv);
}

StatePair from_diagonal(const StatePair& s, const DecoupledParams& d) {
    return apply_2x2(s, d.M);
}

BoundaryData transform_boundary(const BoundaryData& bd, const DecoupledParams& d) {
    BoundaryData out = bd;
    const std::array<std::pair<Channel, Channel>, 3> pairs = {
        std::pair{Channel::H0, Channel::G0},
        std::pair{Channel::H1, Channel::G1},
        std::pair{Channel::H2, Channel::G2},
    };
    for (auto [hc, gc] : pairs) {
        if (bd[hc].size() != bd[gc].size())
            throw DimensionMismatch("boundary channel lengths differ");
        out[hc] = d.M_inv(0, 0) * bd[hc] + d.M_inv(0, 1) * bd[gc];
        out[gc] = d.M_inv(1, 0) * bd[hc] + d.M_inv(1, 1) * bd[gc];
    }
    return out;
}

SourcePair transform_sources(const SourcePair& src, const DecoupledParams& d) {
    SourcePair out;
    out.slices.reserve(src.slices.size());
    for (const auto& sl : src.slices) out.slices.push_back(apply_2x2(sl, d.M_inv));
    return out;
}

}  // namespace kdvduo
