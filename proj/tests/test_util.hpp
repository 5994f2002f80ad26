#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "kdvduo/solver.hpp"

namespace kdvduo::testutil {

inline ValidatedParams make_params(double a, double b, double c, double r, double a1 = 0.0,
                                   double a2 = 0.0) {
    SystemParams sp;
    sp.a = a;
    sp.b = b;
    sp.c = c;
    sp.r = r;
    sp.a1 = a1;
    sp.a2 = a2;
    return validate_params(sp);
}

/// reference parameters used by most checks
inline ValidatedParams reference_params(double a1 = 0.0, double a2 = 0.0) {
    return make_params(0.5, 1.0, 1.0, 1.0, a1, a2);
}

/// random band-limited field sum_k c_k sin(k pi x / L), c_k ~ N(0,1)/k^2
inline Eigen::VectorXd random_field(const Grid& g, std::mt19937_64& rng, int modes = 8) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(g.nx);
    for (int k = 1; k <= modes; ++k) {
        const double ck = normal(rng) / (k * k);
        for (int i = 0; i < g.nx; ++i)
            f[i] += ck * std::sin(k * std::numbers::pi * g.x(i) / g.L);
    }
    return f;
}

inline StatePair random_band_state(const Grid& g, std::mt19937_64& rng, int modes = 8) {
    return {random_field(g, rng, modes), random_field(g, rng, modes)};
}

/// same, with an envelope making the state and its derivative vanish at both
/// ends (compatible with homogeneous boundary rows)
inline StatePair random_compatible_state(const Grid& g, std::mt19937_64& rng, int modes = 5) {
    StatePair s = random_band_state(g, rng, modes);
    for (int i = 0; i < g.nx; ++i) {
        const double xr = g.x(i) / g.L;
        const double env = xr * xr * (1.0 - xr) * (1.0 - xr);
        s.u[i] *= env;
        s.v[i] *= env;
    }
    return s;
}

/// random smooth time series sum_k c_k sin(k pi t / T)
inline Eigen::VectorXd random_series(const Grid& g, std::mt19937_64& rng, int modes = 5) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(g.nt + 1);
    for (int k = 1; k <= modes; ++k) {
        const double ck = normal(rng) / (k * k);
        for (int n = 0; n <= g.nt; ++n)
            f[n] += ck * std::sin(k * std::numbers::pi * g.t(n) / g.T);
    }
    return f;
}

/// manufactured solution of the coupled linear system:
/// u* = e^{-t} sin(2 pi x/L), v* = e^{-t} cos(pi x/L) t/(1+t)
struct Manufactured {
    const ValidatedParams& p;
    const Grid& g;

    double u(double x, double t) const {
        return std::exp(-t) * std::sin(2.0 * std::numbers::pi * x / g.L);
    }
    double v(double x, double t) const {
        return std::exp(-t) * std::cos(std::numbers::pi * x / g.L) * t / (1.0 + t);
    }
    double ux(double x, double t) const {
        const double k = 2.0 * std::numbers::pi / g.L;
        return std::exp(-t) * k * std::cos(k * x);
    }
    double vx(double x, double t) const {
        const double k = std::numbers::pi / g.L;
        return -std::exp(-t) * k * std::sin(k * x) * t / (1.0 + t);
    }
    double uxxx(double x, double t) const {
        const double k = 2.0 * std::numbers::pi / g.L;
        return -std::exp(-t) * k * k * k * std::cos(k * x);
    }
    double vxxx(double x, double t) const {
        const double k = std::numbers::pi / g.L;
        return std::exp(-t) * k * k * k * std::sin(k * x) * t / (1.0 + t);
    }
    double ut(double x, double t) const { return -u(x, t); }
    double vt(double x, double t) const {
        const double k = std::numbers::pi / g.L;
        return std::exp(-t) * std::cos(k * x) * (1.0 / ((1.0 + t) * (1.0 + t)) - t / (1.0 + t));
    }
    double f(double x, double t) const { return ut(x, t) + uxxx(x, t) + p.a() * vxxx(x, t); }
    double s(double x, double t) const {
        return vt(x, t) + (p.r() / p.c()) * vx(x, t) + (p.a() * p.b() / p.c()) * uxxx(x, t) +
               vxxx(x, t) / p.c();
    }

    StatePair initial() const {
        StatePair s0 = StatePair::zero(g.nx);
        for (int i = 0; i < g.nx; ++i) {
            s0.u[i] = u(g.x(i), 0.0);
            s0.v[i] = v(g.x(i), 0.0);
        }
        return s0;
    }
    BoundaryData boundary() const {
        BoundaryData bd = BoundaryData::zero(g.nt);
        for (int n = 0; n <= g.nt; ++n) {
            const double t = g.t(n);
            bd[Channel::H0][n] = u(0.0, t);
            bd[Channel::H1][n] = u(g.L, t);
            bd[Channel::H2][n] = ux(g.L, t);
            bd[Channel::G0][n] = v(0.0, t);
            bd[Channel::G1][n] = v(g.L, t);
            bd[Channel::G2][n] = vx(g.L, t);
        }
        return bd;
    }
    SourcePair sources() const {
        SourcePair src;
        src.slices.reserve(g.nt + 1);
        for (int n = 0; n <= g.nt; ++n) {
            StatePair sl = StatePair::zero(g.nx);
            for (int i = 0; i < g.nx; ++i) {
                sl.u[i] = f(g.x(i), g.t(n));
                sl.v[i] = s(g.x(i), g.t(n));
            }
            src.slices.push_back(std::move(sl));
        }
        return src;
    }
    double max_error(const Trajectory& traj) const {
        double err = 0.0;
        for (int n = 0; n <= g.nt; ++n)
            for (int i = 0; i < g.nx; ++i) {
                err = std::max(err, std::abs(traj.slices[n].u[i] - u(g.x(i), g.t(n))));
                err = std::max(err, std::abs(traj.slices[n].v[i] - v(g.x(i), g.t(n))));
            }
        return err;
    }
};

/// solve the manufactured problem at (nx, nt) and return the max-norm error
inline double mms_error(const ValidatedParams& p, double L, double T, int nx, int nt) {
    const Grid g(L, T, nx, nt);
    Manufactured mms{p, g};
    ForwardRun run = solve_forward_linear(p, g, mms.initial(), mms.boundary(), mms.sources());
    return mms.max_error(run.trajectory);
}

}  // namespace kdvduo::testutil
