#include "kdvduo/state.hpp"

#include <cmath>

namespace kdvduo {

const char* channel_name(Channel c) {
    switch (c) {
        case Channel::H0: return "h0";
        case Channel::H1: return "h1";
        case Channel::H2: return "h2";
        case Channel::G0: return "g0";
        case Channel::G1: return "g1";
        case Channel::G2: return "g2";
    }
    return "?";
}

void BoundaryData::require_length(int nt_plus_1) const {
    for (const auto& s : series)
        if (s.size() != nt_plus_1)
            throw DimensionMismatch("boundary series length does not match nt+1");
}

namespace {

// trapezoid weight for node i
inline double trap_w(int i, int nx, double dx) {
    return (i == 0 || i == nx - 1) ? 0.5 * dx : dx;
}

}  // namespace

double inner_product_X(const StatePair& lhs, const StatePair& rhs, const ValidatedParams& p,
                       const Grid& g) {
    if (lhs.u.size() != g.nx || lhs.v.size() != g.nx || rhs.u.size() != g.nx ||
        rhs.v.size() != g.nx)
        throw DimensionMismatch("state size does not match grid");
    const double dx = g.dx();
    const double wu = p.b() / p.c();
    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double w = trap_w(i, g.nx, dx);
        acc += w * (wu * lhs.u[i] * rhs.u[i] + lhs.v[i] * rhs.v[i]);
    }
    return acc;
}

double x_norm(const StatePair& s, const ValidatedParams& p, const Grid& g) {
    return std::sqrt(inner_product_X(s, s, p, g));
}

double euclidean_pairing(const StatePair& a, const StatePair& b) {
    if (a.u.size() != b.u.size() || a.v.size() != b.v.size())
        throw DimensionMismatch("state sizes differ");
    return a.u.dot(b.u) + a.v.dot(b.v);
}

double l2_pairing(const StatePair& a, const StatePair& b, const Grid& g) {
    if (a.u.size() != g.nx || b.u.size() != g.nx)
        throw DimensionMismatch("state size does not match grid");
    const double dx = g.dx();
    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double w = trap_w(i, g.nx, dx);
        acc += w * (a.u[i] * b.u[i] + a.v[i] * b.v[i]);
    }
    return acc;
}

}  // namespace kdvduo
