#include "kdvduo/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "kdvduo/airy.hpp"
#include "kdvduo/diagonal.hpp"
#include "kdvduo/fdweights.hpp"

namespace kdvduo {

namespace {

// interleaved ordering keeps the step matrix banded
inline int iu(int i) { return 2 * i; }
inline int iv(int i) { return 2 * i + 1; }

struct BoundaryRows {
    std::array<int, 6> row;  // indexed by Channel
    int operator[](Channel c) const { return row[static_cast<int>(c)]; }
};

BoundaryRows boundary_rows(int nx) {
    BoundaryRows r{};
    r.row[static_cast<int>(Channel::H0)] = iu(0);
    r.row[static_cast<int>(Channel::G0)] = iv(0);
    r.row[static_cast<int>(Channel::H2)] = iu(nx - 2);
    r.row[static_cast<int>(Channel::G2)] = iv(nx - 2);
    r.row[static_cast<int>(Channel::H1)] = iu(nx - 1);
    r.row[static_cast<int>(Channel::G1)] = iv(nx - 1);
    return r;
}

}  // namespace

TraceSet TraceSet::zero(int nt) {
    TraceSet t;
    for (auto& comp : t.series)
        for (auto& k : comp)
            for (auto& s : k) s = Eigen::VectorXd::Zero(nt + 1);
    return t;
}

struct LinearSolver::Impl {
    Eigen::SparseMatrix<double> A, B, AT, BT;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> luA, luAT;
    BoundaryRows rows;
    int n = 0;

    void assemble(const ValidatedParams& p, const Grid& g, bool adjoint_coupling) {
        const int nx = g.nx;
        const double dx = g.dx(), dt = g.dt();
        n = 2 * nx;
        rows = boundary_rows(nx);

        const double d11 = 1.0, d22 = 1.0 / p.c();
        const double d12 = adjoint_coupling ? p.a() * p.b() / p.c() : p.a();
        const double d21 = adjoint_coupling ? p.a() : p.a() * p.b() / p.c();
        const double rc = p.r() / p.c();

        // third-derivative stencils: centered 5-point in the interior, a
        // shifted 5-point at the node next to x=0 (the right end has two
        // boundary rows, so centered stencils fit everywhere else)
        Eigen::VectorXd cent_nodes(5), left_nodes(5), d1_nodes(3);
        for (int j = 0; j < 5; ++j) cent_nodes[j] = (j - 2) * dx;
        for (int j = 0; j < 5; ++j) left_nodes[j] = (j - 1) * dx;
        for (int j = 0; j < 3; ++j) d1_nodes[j] = (j - 1) * dx;
        const Eigen::VectorXd w_cent = fd_weights(cent_nodes, 0.0, 3);
        const Eigen::VectorXd w_left = fd_weights(left_nodes, 0.0, 3);
        const Eigen::VectorXd w_d1 = fd_weights(d1_nodes, 0.0, 1);

        std::vector<Eigen::Triplet<double>> ta, tb;
        auto add = [&](int r_, int c_, double va, double vb) {
            ta.emplace_back(r_, c_, va);
            tb.emplace_back(r_, c_, vb);
        };

        for (int i = 1; i <= nx - 3; ++i) {
            const bool shifted = (i == 1);
            const Eigen::VectorXd& w3 = shifted ? w_left : w_cent;
            const int off0 = shifted ? -1 : -2;
            add(iu(i), iu(i), 1.0, 1.0);
            add(iv(i), iv(i), 1.0, 1.0);
            for (int j = 0; j < 5; ++j) {
                const int col = i + off0 + j;
                const double w = w3[j];
                add(iu(i), iu(col), 0.5 * dt * d11 * w, -0.5 * dt * d11 * w);
                add(iu(i), iv(col), 0.5 * dt * d12 * w, -0.5 * dt * d12 * w);
                add(iv(i), iu(col), 0.5 * dt * d21 * w, -0.5 * dt * d21 * w);
                add(iv(i), iv(col), 0.5 * dt * d22 * w, -0.5 * dt * d22 * w);
            }
            for (int j = 0; j < 3; ++j) {
                const double w = rc * w_d1[j];
                add(iv(i), iv(i - 1 + j), 0.5 * dt * w, -0.5 * dt * w);
            }
        }

        // boundary rows: Dirichlet at both ends, one-sided u_x(L) at nx-2
        Eigen::VectorXd dxr_nodes(3);
        for (int j = 0; j < 3; ++j) dxr_nodes[j] = (nx - 3 + j) * dx;
        const Eigen::VectorXd w_dxr = fd_weights(dxr_nodes, g.L, 1);
        ta.emplace_back(rows[Channel::H0], iu(0), 1.0);
        ta.emplace_back(rows[Channel::G0], iv(0), 1.0);
        ta.emplace_back(rows[Channel::H1], iu(nx - 1), 1.0);
        ta.emplace_back(rows[Channel::G1], iv(nx - 1), 1.0);
        for (int j = 0; j < 3; ++j) {
            ta.emplace_back(rows[Channel::H2], iu(nx - 3 + j), w_dxr[j]);
            ta.emplace_back(rows[Channel::G2], iv(nx - 3 + j), w_dxr[j]);
        }

        A.resize(n, n);
        B.resize(n, n);
        A.setFromTriplets(ta.begin(), ta.end());
        B.setFromTriplets(tb.begin(), tb.end());
        AT = A.transpose();
        BT = B.transpose();

        luA.compute(A);
        if (luA.info() != Eigen::Success) throw SingularStep(0, "forward step matrix");
        luAT.compute(AT);
        if (luAT.info() != Eigen::Success) throw SingularStep(0, "transposed step matrix");
    }
};

LinearSolver::LinearSolver(const ValidatedParams& p, const Grid& g, bool adjoint_coupling)
    : impl_(std::make_unique<Impl>()), params_(p), grid_(g) {
    impl_->assemble(p, g, adjoint_coupling);
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

namespace {

Eigen::VectorXd interleave(const StatePair& s) {
    const int nx = s.size();
    Eigen::VectorXd x(2 * nx);
    for (int i = 0; i < nx; ++i) {
        x[iu(i)] = s.u[i];
        x[iv(i)] = s.v[i];
    }
    return x;
}

StatePair deinterleave(const Eigen::VectorXd& x) {
    const int nx = static_cast<int>(x.size()) / 2;
    StatePair s = StatePair::zero(nx);
    for (int i = 0; i < nx; ++i) {
        s.u[i] = x[iu(i)];
        s.v[i] = x[iv(i)];
    }
    return s;
}

double data_scale(const StatePair& init, const BoundaryData* bd, const SourcePair& src) {
    double scale = init.u.cwiseAbs().maxCoeff() + init.v.cwiseAbs().maxCoeff();
    if (bd)
        for (const auto& s : bd->series) scale = std::max(scale, s.cwiseAbs().maxCoeff());
    for (const auto& sl : src.slices)
        scale = std::max(scale, sl.u.cwiseAbs().maxCoeff() + sl.v.cwiseAbs().maxCoeff());
    return scale;
}

}  // namespace

ForwardRun LinearSolver::forward(const StatePair& init, const BoundaryData& bd,
                                 const SourcePair& src) const {
    const Grid& g = grid_;
    const int nx = g.nx, nt = g.nt;
    if (init.size() != nx) throw DimensionMismatch("initial state size does not match grid");
    bd.require_length(nt + 1);
    if (!src.empty() && static_cast<int>(src.slices.size()) != nt + 1)
        throw DimensionMismatch("source slices do not match nt+1");

    const double dt = g.dt();
    const double scale = data_scale(init, &bd, src) + 1e-300;

    Eigen::VectorXd x = interleave(init);
    Trajectory traj;
    traj.slices.reserve(nt + 1);
    traj.slices.push_back(init);

    Eigen::VectorXd srcv_prev = Eigen::VectorXd::Zero(impl_->n);
    Eigen::VectorXd srcv = Eigen::VectorXd::Zero(impl_->n);
    if (!src.empty()) srcv_prev = interleave(src.slices[0]);

    for (int n = 1; n <= nt; ++n) {
        Eigen::VectorXd rhs = impl_->B * x;
        if (!src.empty()) {
            srcv = interleave(src.slices[n]);
            rhs += 0.5 * dt * (srcv_prev + srcv);
            srcv_prev.swap(srcv);
        }
        for (Channel ch : kChannels) rhs[impl_->rows[ch]] = bd[ch][n];
        x = impl_->luA.solve(rhs);
        if (!(x.allFinite()) || x.cwiseAbs().maxCoeff() > 1e12 * scale)
            throw Unstable(n, x.cwiseAbs().maxCoeff());
        traj.slices.push_back(deinterleave(x));
    }

    ForwardRun run;
    run.traces = extract_traces(traj, g);
    run.trajectory = std::move(traj);
    return run;
}

StatePair LinearSolver::forward_terminal(const StatePair& init,
                                         const std::array<const Eigen::VectorXd*, 6>& controls,
                                         const SourcePair& src) const {
    const Grid& g = grid_;
    const int nt = g.nt;
    const double dt = g.dt();
    Eigen::VectorXd x = interleave(init);
    Eigen::VectorXd srcv_prev, srcv;
    if (!src.empty()) srcv_prev = interleave(src.slices[0]);
    for (int n = 1; n <= nt; ++n) {
        Eigen::VectorXd rhs = impl_->B * x;
        if (!src.empty()) {
            srcv = interleave(src.slices[n]);
            rhs += 0.5 * dt * (srcv_prev + srcv);
            srcv_prev.swap(srcv);
        }
        for (Channel ch : kChannels) {
            const Eigen::VectorXd* c = controls[static_cast<int>(ch)];
            rhs[impl_->rows[ch]] = c ? (*c)[n - 1] : 0.0;
        }
        x = impl_->luA.solve(rhs);
    }
    return deinterleave(x);
}

TransposeAdjointRun LinearSolver::adjoint_transpose(const StatePair& final,
                                                    bool keep_trajectory) const {
    const Grid& g = grid_;
    const int nt = g.nt;
    if (final.size() != g.nx) throw DimensionMismatch("final state size does not match grid");

    TransposeAdjointRun run;
    for (auto& s : run.boundary_series) s = Eigen::VectorXd::Zero(nt + 1);
    if (keep_trajectory) {
        run.trajectory.slices.assign(nt + 1, StatePair());
        run.trajectory.slices[nt] = final;
    }

    Eigen::VectorXd z = interleave(final);
    for (int n = nt; n >= 1; --n) {
        Eigen::VectorXd w = impl_->luAT.solve(z);
        for (Channel ch : kChannels)
            run.boundary_series[static_cast<int>(ch)][n] = w[impl_->rows[ch]];
        z = impl_->BT * w;
        if (keep_trajectory) run.trajectory.slices[n - 1] = deinterleave(z);
    }
    run.initial = deinterleave(z);
    return run;
}

ForwardRun solve_forward_linear(const ValidatedParams& p, const Grid& g, const StatePair& init,
                                const BoundaryData& bd, const SourcePair& src) {
    LinearSolver solver(p, g);
    return solver.forward(init, bd, src);
}

namespace {

Eigen::VectorXd centered_dx(const Eigen::VectorXd& f, double dx) {
    const int nx = static_cast<int>(f.size());
    Eigen::VectorXd out(nx);
    for (int i = 1; i < nx - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    out[0] = (-1.5 * f[0] + 2.0 * f[1] - 0.5 * f[2]) / dx;
    out[nx - 1] = (1.5 * f[nx - 1] - 2.0 * f[nx - 2] + 0.5 * f[nx - 3]) / dx;
    return out;
}

}  // namespace

ForwardRun solve_forward_via_diagonalization(const ValidatedParams& p, const Grid& g,
                                             const StatePair& init, const BoundaryData& bd,
                                             const SourcePair& src, double tol, int maxit) {
    const int nt = g.nt, nx = g.nx;
    bd.require_length(nt + 1);
    const DecoupledParams d = compute_decoupling(p);

    const StatePair init_t = to_diagonal(init, d);
    const BoundaryData bd_t = transform_boundary(bd, d);
    SourcePair src_t = transform_sources(src, d);
    if (src_t.empty() && p.r() != 0.0) {
        src_t.slices.assign(nt + 1, StatePair::zero(nx));
    }

    // transport term iterated as a lagged source: extra = -(r/c) M_inv (0, v_x)
    std::vector<Eigen::VectorXd> ut(nt + 1, init_t.u), vt(nt + 1, init_t.v);
    const double rc = p.r() / p.c();
    int iterations = 0;
    for (int it = 0; it < maxit; ++it) {
        ++iterations;
        std::vector<Eigen::VectorXd> fser(nt + 1), sser(nt + 1);
        for (int n = 0; n <= nt; ++n) {
            Eigen::VectorXd f = src_t.empty() ? Eigen::VectorXd::Zero(nx) : src_t.slices[n].u;
            Eigen::VectorXd s = src_t.empty() ? Eigen::VectorXd::Zero(nx) : src_t.slices[n].v;
            if (rc != 0.0) {
                const Eigen::VectorXd vphys = d.M(1, 0) * ut[n] + d.M(1, 1) * vt[n];
                const Eigen::VectorXd vx = centered_dx(vphys, g.dx());
                f -= rc * d.M_inv(0, 1) * vx;
                s -= rc * d.M_inv(1, 1) * vx;
            }
            fser[n] = std::move(f);
            sser[n] = std::move(s);
        }
        ScalarRun ru = solve_airy_ibvp(d.alpha_plus, g, init_t.u, bd_t[Channel::H0],
                                       bd_t[Channel::H1], bd_t[Channel::H2], fser);
        ScalarRun rv = solve_airy_ibvp(d.alpha_minus, g, init_t.v, bd_t[Channel::G0],
                                       bd_t[Channel::G1], bd_t[Channel::G2], sser);
        double diff = 0.0;
        for (int n = 0; n <= nt; ++n) {
            diff = std::max(diff, (ru.slices[n] - ut[n]).cwiseAbs().maxCoeff());
            diff = std::max(diff, (rv.slices[n] - vt[n]).cwiseAbs().maxCoeff());
            ut[n] = ru.slices[n];
            vt[n] = rv.slices[n];
        }
        if (diff < tol || rc == 0.0) break;
        if (it == maxit - 1) throw NoConvergence("diagonalized transport iteration", maxit, diff);
    }
    (void)iterations;

    Trajectory traj;
    traj.slices.reserve(nt + 1);
    for (int n = 0; n <= nt; ++n)
        traj.slices.push_back(from_diagonal(StatePair(ut[n], vt[n]), d));

    ForwardRun run;
    run.traces = extract_traces(traj, g);
    run.trajectory = std::move(traj);
    return run;
}

namespace {

StatePair reflect_x(const StatePair& s) {
    return {s.u.reverse(), s.v.reverse()};
}

}  // namespace

ForwardRun solve_adjoint(const ValidatedParams& p, const Grid& g, const StatePair& final,
                         AdjointMode mode) {
    const int nt = g.nt;
    if (mode == AdjointMode::Reflection) {
        LinearSolver solver(p, g, /*adjoint_coupling=*/true);
        ForwardRun reflected = solver.forward(reflect_x(final), BoundaryData::zero(nt));
        Trajectory traj;
        traj.slices.resize(nt + 1);
        for (int n = 0; n <= nt; ++n) traj.slices[n] = reflect_x(reflected.trajectory.slices[nt - n]);
        ForwardRun run;
        run.traces = extract_traces(traj, g);
        run.trajectory = std::move(traj);
        return run;
    }

    LinearSolver solver(p, g);
    TransposeAdjointRun tr = solver.adjoint_transpose(final, /*keep_trajectory=*/true);

    // recover physical traces from the boundary dual series: the series pair
    // with the boundary data in the exact duality, so dividing by dt/dx gives
    // the trace combinations; the 2x2 dispersion block separates them.
    TraceSet traces = TraceSet::zero(nt);
    const double fac = g.dx() / g.dt();
    const double a = p.a(), b = p.b(), c = p.c();
    Eigen::Matrix2d D;
    D << 1.0, a * b / c, a, 1.0 / c;
    const Eigen::Matrix2d Dinv = D.inverse();
    auto& w = tr.boundary_series;
    auto series = [&](Channel ch) -> const Eigen::VectorXd& {
        return w[static_cast<int>(ch)];
    };
    for (int n = 1; n <= nt; ++n) {
        Eigen::Vector2d rhs0(series(Channel::H0)[n] * fac, series(Channel::G0)[n] * fac);
        Eigen::Vector2d xx0 = Dinv * rhs0;
        traces.at(0, 2, End::Left)[n] = xx0[0];
        traces.at(1, 2, End::Left)[n] = xx0[1];

        Eigen::Vector2d rhs1(-series(Channel::H1)[n] * fac, -series(Channel::G1)[n] * fac);
        Eigen::Vector2d xxL = Dinv * rhs1;
        traces.at(0, 2, End::Right)[n] = xxL[0];
        traces.at(1, 2, End::Right)[n] = xxL[1];

        Eigen::Vector2d rhs2(series(Channel::H2)[n] * fac, series(Channel::G2)[n] * fac);
        Eigen::Vector2d xL = Dinv * rhs2;
        traces.at(0, 1, End::Right)[n] = xL[0];
        traces.at(1, 1, End::Right)[n] = xL[1];
    }
    // k=0 traces and x=0 first derivatives vanish by the adjoint boundary conditions

    ForwardRun run;
    run.trajectory = std::move(tr.trajectory);
    run.traces = std::move(traces);
    return run;
}

TraceSet extract_traces(const Trajectory& traj, const Grid& g) {
    if (g.nx < 5) throw GridTooCoarse("trace extraction needs nx >= 5");
    const int nt = static_cast<int>(traj.slices.size()) - 1;
    const int nx = g.nx;
    const double dx = g.dx();

    Eigen::VectorXd nodes(4);
    for (int j = 0; j < 4; ++j) nodes[j] = j * dx;
    const Eigen::VectorXd wl1 = fd_weights(nodes, 0.0, 1);
    const Eigen::VectorXd wl2 = fd_weights(nodes, 0.0, 2);

    TraceSet out = TraceSet::zero(nt);
    for (int n = 0; n <= nt; ++n) {
        const StatePair& s = traj.slices[n];
        if (s.size() != nx) throw DimensionMismatch("trajectory slice does not match grid");
        for (int comp = 0; comp < 2; ++comp) {
            const Eigen::VectorXd& f = comp == 0 ? s.u : s.v;
            out.at(comp, 0, End::Left)[n] = f[0];
            out.at(comp, 0, End::Right)[n] = f[nx - 1];
            double d1l = 0, d2l = 0, d1r = 0, d2r = 0;
            for (int j = 0; j < 4; ++j) {
                d1l += wl1[j] * f[j];
                d2l += wl2[j] * f[j];
                // mirrored stencil: odd derivatives flip sign
                d1r -= wl1[j] * f[nx - 1 - j];
                d2r += wl2[j] * f[nx - 1 - j];
            }
            out.at(comp, 1, End::Left)[n] = d1l;
            out.at(comp, 2, End::Left)[n] = d2l;
            out.at(comp, 1, End::Right)[n] = d1r;
            out.at(comp, 2, End::Right)[n] = d2r;
        }
    }
    return out;
}

std::array<std::complex<double>, 3> cubic_characteristic_roots(double a_coef, double L,
                                                               double rho) {
    (void)a_coef;
    using cd = std::complex<double>;
    const cd i(0.0, 1.0);
    const double s3 = std::sqrt(3.0);
    const cd l0 = i * L * rho;
    const cd l1 = -i * L * rho * (cd(1.0, s3) / 2.0);
    const cd l2 = -i * L * rho * (cd(1.0, -s3) / 2.0);
    return {l0, l1, l2};
}

}  // namespace kdvduo
