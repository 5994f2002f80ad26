#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "kdvduo/grid.hpp"
#include "kdvduo/params.hpp"

namespace kdvduo {

/// One (u, v) field pair on the spatial nodes.
struct StatePair {
    Eigen::VectorXd u;
    Eigen::VectorXd v;

    StatePair() = default;
    StatePair(Eigen::VectorXd u, Eigen::VectorXd v) : u(std::move(u)), v(std::move(v)) {}

    static StatePair zero(int nx) {
        return {Eigen::VectorXd::Zero(nx), Eigen::VectorXd::Zero(nx)};
    }
    int size() const { return static_cast<int>(u.size()); }
};

/// Time sequence of states; slices.front() is the initial state.
struct Trajectory {
    std::vector<StatePair> slices;

    const StatePair& terminal() const { return slices.back(); }
    int steps() const { return static_cast<int>(slices.size()) - 1; }
};

/// Boundary channels, in the order used throughout: values of
/// u(0,.), u(L,.), u_x(L,.), v(0,.), v(L,.), v_x(L,.).
enum class Channel { H0 = 0, H1, H2, G0, G1, G2 };
inline constexpr std::array<Channel, 6> kChannels = {Channel::H0, Channel::H1, Channel::H2,
                                                     Channel::G0, Channel::G1, Channel::G2};
const char* channel_name(Channel c);

/// The six boundary input series, each of length nt+1.
struct BoundaryData {
    std::array<Eigen::VectorXd, 6> series;

    static BoundaryData zero(int nt) {
        BoundaryData bd;
        for (auto& s : bd.series) s = Eigen::VectorXd::Zero(nt + 1);
        return bd;
    }
    Eigen::VectorXd& operator[](Channel c) { return series[static_cast<int>(c)]; }
    const Eigen::VectorXd& operator[](Channel c) const { return series[static_cast<int>(c)]; }

    int length() const { return static_cast<int>(series[0].size()); }
    void require_length(int nt_plus_1) const;
};

/// Source fields f(x,t), s(x,t) stored per time node.
struct SourcePair {
    std::vector<StatePair> slices;  // length nt+1, or empty for zero sources

    bool empty() const { return slices.empty(); }
    static SourcePair zero() { return {}; }
};

/// Trapezoid-rule inner product on the weighted state space:
/// (b/c) * int u*phi + int v*psi.
double inner_product_X(const StatePair& lhs, const StatePair& rhs, const ValidatedParams& p,
                       const Grid& g);

/// Norm induced by inner_product_X.
double x_norm(const StatePair& s, const ValidatedParams& p, const Grid& g);

/// Plain Euclidean pairing sum(u1*u2) + sum(v1*v2). This is the pairing under
/// which the discrete control Gramian is symmetric.
double euclidean_pairing(const StatePair& a, const StatePair& b);

/// Unweighted trapezoid pairing int u1*u2 + int v1*v2 (diagnostic).
double l2_pairing(const StatePair& a, const StatePair& b, const Grid& g);

}  // namespace kdvduo
