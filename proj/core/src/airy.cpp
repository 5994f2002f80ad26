#include "kdvduo/airy.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <vector>

#include "kdvduo/fdweights.hpp"

namespace kdvduo {

ScalarRun solve_airy_ibvp(double alpha, const Grid& g, const Eigen::VectorXd& u0,
                          const Eigen::VectorXd& h0, const Eigen::VectorXd& h1,
                          const Eigen::VectorXd& h2, const std::vector<Eigen::VectorXd>& f) {
    const int nx = g.nx, nt = g.nt;
    const double dx = g.dx(), dt = g.dt();
    if (alpha == 0.0) throw InvalidParams("scalar dispersion coefficient must be nonzero");
    if (u0.size() != nx) throw DimensionMismatch("initial data size does not match grid");
    if (h0.size() != nt + 1 || h1.size() != nt + 1 || h2.size() != nt + 1)
        throw DimensionMismatch("boundary series length does not match nt+1");
    if (!f.empty() && static_cast<int>(f.size()) != nt + 1)
        throw DimensionMismatch("source slices do not match nt+1");

    Eigen::VectorXd cent_nodes(5), left_nodes(5);
    for (int j = 0; j < 5; ++j) cent_nodes[j] = (j - 2) * dx;
    for (int j = 0; j < 5; ++j) left_nodes[j] = (j - 1) * dx;
    const Eigen::VectorXd w_cent = fd_weights(cent_nodes, 0.0, 3);
    const Eigen::VectorXd w_left = fd_weights(left_nodes, 0.0, 3);

    std::vector<Eigen::Triplet<double>> ta, tb;
    for (int i = 1; i <= nx - 3; ++i) {
        const bool shifted = (i == 1);
        const Eigen::VectorXd& w3 = shifted ? w_left : w_cent;
        const int off0 = shifted ? -1 : -2;
        ta.emplace_back(i, i, 1.0);
        tb.emplace_back(i, i, 1.0);
        for (int j = 0; j < 5; ++j) {
            const double w = alpha * w3[j];
            ta.emplace_back(i, i + off0 + j, 0.5 * dt * w);
            tb.emplace_back(i, i + off0 + j, -0.5 * dt * w);
        }
    }
    ta.emplace_back(0, 0, 1.0);
    ta.emplace_back(nx - 1, nx - 1, 1.0);
    Eigen::VectorXd dxr_nodes(3);
    for (int j = 0; j < 3; ++j) dxr_nodes[j] = (nx - 3 + j) * dx;
    const Eigen::VectorXd w_dxr = fd_weights(dxr_nodes, g.L, 1);
    for (int j = 0; j < 3; ++j) ta.emplace_back(nx - 2, nx - 3 + j, w_dxr[j]);

    Eigen::SparseMatrix<double> A(nx, nx), B(nx, nx);
    A.setFromTriplets(ta.begin(), ta.end());
    B.setFromTriplets(tb.begin(), tb.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SingularStep(0, "scalar step matrix");

    double scale = u0.cwiseAbs().maxCoeff() + h0.cwiseAbs().maxCoeff() +
                   h1.cwiseAbs().maxCoeff() + h2.cwiseAbs().maxCoeff() + 1e-300;
    for (const auto& s : f) scale = std::max(scale, s.cwiseAbs().maxCoeff());

    ScalarRun run;
    run.slices.reserve(nt + 1);
    run.slices.push_back(u0);
    Eigen::VectorXd x = u0;
    for (int n = 1; n <= nt; ++n) {
        Eigen::VectorXd rhs = B * x;
        if (!f.empty()) rhs += 0.5 * dt * (f[n - 1] + f[n]);
        rhs[0] = h0[n];
        rhs[nx - 1] = h1[n];
        rhs[nx - 2] = h2[n];
        x = lu.solve(rhs);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e12 * scale)
            throw Unstable(n, x.cwiseAbs().maxCoeff());
        run.slices.push_back(x);
    }

    // boundary traces, one-sided 4-point stencils
    Eigen::VectorXd nodes(4);
    for (int j = 0; j < 4; ++j) nodes[j] = j * dx;
    const Eigen::VectorXd wl1 = fd_weights(nodes, 0.0, 1);
    const Eigen::VectorXd wl2 = fd_weights(nodes, 0.0, 2);
    for (auto& ks : run.traces)
        for (auto& s : ks) s = Eigen::VectorXd::Zero(nt + 1);
    for (int n = 0; n <= nt; ++n) {
        const Eigen::VectorXd& s = run.slices[n];
        run.traces[0][0][n] = s[0];
        run.traces[0][1][n] = s[nx - 1];
        double d1l = 0, d2l = 0, d1r = 0, d2r = 0;
        for (int j = 0; j < 4; ++j) {
            d1l += wl1[j] * s[j];
            d2l += wl2[j] * s[j];
            d1r -= wl1[j] * s[nx - 1 - j];
            d2r += wl2[j] * s[nx - 1 - j];
        }
        run.traces[1][0][n] = d1l;
        run.traces[1][1][n] = d1r;
        run.traces[2][0][n] = d2l;
        run.traces[2][1][n] = d2r;
    }
    return run;
}

}  // namespace kdvduo
