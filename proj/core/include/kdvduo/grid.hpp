#pragma once

#include <Eigen/Core>

#include "kdvduo/errors.hpp"

namespace kdvduo {

/// Uniform space-time grid on [0,L] x [0,T].
///
/// Spatial nodes include both endpoints: x_i = i*dx, i = 0..nx-1.
/// Time nodes t_n = n*dt, n = 0..nt.
struct Grid {
    double L = 1.0;
    double T = 1.0;
    int nx = 0;
    int nt = 0;

    Grid() = default;
    Grid(double L, double T, int nx, int nt) : L(L), T(T), nx(nx), nt(nt) {
        if (L <= 0.0 || T <= 0.0) throw InvalidParams("grid requires L > 0 and T > 0");
        if (nx < 5) throw GridTooCoarse("grid requires nx >= 5");
        if (nt < 2) throw GridTooCoarse("grid requires nt >= 2");
    }

    double dx() const { return L / (nx - 1); }
    double dt() const { return T / nt; }
    double x(int i) const { return i * dx(); }
    double t(int n) const { return n * dt(); }

    Eigen::VectorXd x_nodes() const {
        Eigen::VectorXd v(nx);
        for (int i = 0; i < nx; ++i) v[i] = x(i);
        return v;
    }
    Eigen::VectorXd t_nodes() const {
        Eigen::VectorXd v(nt + 1);
        for (int n = 0; n <= nt; ++n) v[n] = t(n);
        return v;
    }
};

}  // namespace kdvduo
