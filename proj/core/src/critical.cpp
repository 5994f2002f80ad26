#include "kdvduo/critical.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "kdvduo/errors.hpp"

namespace kdvduo {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kConsistencyTol = 1e-8;
}  // namespace

long long alpha_index(const CriticalIndex& idx) {
    if (idx.all_zero()) throw AllZeroIndex("alpha index of the all-zero tuple");
    const long long k = idx.k, l = idx.l, m = idx.m, n = idx.n, s = idx.s;
    // expanded form of 6*sum(partial sums squared) - (5k+4l+3m+2n+s)^2;
    // the ls coefficient is 4 (the root relations force it)
    return 5 * k * k + 8 * l * l + 9 * m * m + 8 * n * n + 5 * s * s + 8 * k * l + 6 * k * m +
           4 * k * n + 2 * k * s + 12 * m * l + 8 * l * n + 4 * l * s + 12 * m * n + 6 * m * s +
           8 * n * s;
}

double critical_length(const ValidatedParams& p, const CriticalIndex& idx) {
    if (!(p.r() > 0.0)) throw NonpositiveR("critical lengths require r > 0");
    return kPi * std::sqrt(p.one_minus_a2b() * static_cast<double>(alpha_index(idx)) /
                           (3.0 * p.r()));
}

void build_roots(const ValidatedParams& p, const CriticalIndex& idx, double L,
                 std::array<double, 6>& xi, std::complex<double>& pval) {
    if (L <= 0.0) throw InvalidParams("root construction requires L > 0");
    const double sigma = 5.0 * idx.k + 4.0 * idx.l + 3.0 * idx.m + 2.0 * idx.n + 1.0 * idx.s;
    xi[0] = -(kPi / (3.0 * L)) * sigma;
    const std::array<int, 5> gaps = {idx.k, idx.l, idx.m, idx.n, idx.s};
    for (int j = 0; j < 5; ++j) xi[j + 1] = xi[j] + (2.0 * kPi / L) * gaps[j];

    double prod = 1.0;
    for (double x : xi) prod *= x;
    pval = std::sqrt(std::complex<double>(p.one_minus_a2b() * prod / p.c(), 0.0));
}

namespace {

// elementary symmetric polynomials via incremental expansion of prod(x - xi_j)
std::array<double, 7> monic_coefficients(const std::array<double, 6>& xi) {
    std::array<double, 7> c{};  // c[k] multiplies x^k
    c[0] = 1.0;
    int deg = 0;
    for (double root : xi) {
        for (int k = deg + 1; k >= 1; --k) c[k] = c[k - 1] - root * c[k];
        c[0] = -root * c[0];
        ++deg;
    }
    return c;  // c[6] = 1
}

double rel_residual(std::complex<double> value, std::complex<double> target) {
    const double scale = std::max({1.0, std::abs(value), std::abs(target)});
    return std::abs(value - target) / scale;
}

}  // namespace

std::array<double, 6> verify_vieta(const ValidatedParams& p, const CriticalCandidate& cand) {
    bool populated = false;
    for (double x : cand.xi)
        if (x != 0.0) populated = true;
    if (!populated) throw RootsNotPopulated("candidate roots not populated");

    // e_k with alternating signs from the monic expansion
    const auto c = monic_coefficients(cand.xi);
    std::array<double, 6> e{};
    for (int k = 1; k <= 6; ++k) e[k - 1] = ((k % 2) ? -1.0 : 1.0) * c[6 - k];

    const double omb = p.one_minus_a2b();
    const std::complex<double> pv = cand.p;
    const std::array<std::complex<double>, 6> target = {
        std::complex<double>(0.0, 0.0),
        std::complex<double>(-p.r() / omb, 0.0),
        (p.c() + 1.0) * pv / omb,
        std::complex<double>(0.0, 0.0),
        -p.r() * pv / omb,
        p.c() * pv * pv / omb,
    };

    std::array<double, 6> res{};
    for (int k = 0; k < 6; ++k) res[k] = rel_residual(e[k], target[k]);
    return res;
}

std::vector<CriticalCandidate> enumerate_candidates(const ValidatedParams& p, double L_max,
                                                    bool include_zero_entries) {
    if (!(p.r() > 0.0)) throw NonpositiveR("candidate enumeration requires r > 0");
    if (!(L_max > 0.0)) throw InvalidParams("candidate enumeration requires L_max > 0");

    const double alpha_max = 3.0 * p.r() * L_max * L_max / (p.one_minus_a2b() * kPi * kPi);
    if (alpha_max < 1.0) return {};
    // alpha >= sum of squared partial sums >= (k+l+m+n+s)^2
    const int sum_max = static_cast<int>(std::floor(std::sqrt(alpha_max) + 1e-9));
    const int lo = include_zero_entries ? 0 : 1;

    std::vector<CriticalCandidate> all;
    for (int k = lo; k <= sum_max; ++k)
        for (int l = lo; l + k <= sum_max; ++l)
            for (int m = lo; m + l + k <= sum_max; ++m)
                for (int n = lo; n + m + l + k <= sum_max; ++n)
                    for (int s = lo; s + n + m + l + k <= sum_max; ++s) {
                        const CriticalIndex idx{k, l, m, n, s};
                        if (idx.all_zero()) continue;
                        CriticalCandidate cand;
                        cand.index = idx;
                        cand.alpha = alpha_index(idx);
                        cand.L = critical_length(p, idx);
                        if (cand.L > L_max * (1.0 + 1e-12)) continue;
                        build_roots(p, idx, cand.L, cand.xi, cand.p);
                        cand.vieta_residuals = verify_vieta(p, cand);
                        cand.consistent = true;
                        for (double r_ : cand.vieta_residuals)
                            if (r_ > kConsistencyTol) cand.consistent = false;
                        cand.degenerate = (k == 0 || l == 0 || m == 0 || n == 0 || s == 0);
                        all.push_back(cand);
                    }

    auto idx_less = [](const CriticalIndex& a, const CriticalIndex& b) {
        return a.as_array() < b.as_array();
    };
    std::sort(all.begin(), all.end(), [&](const CriticalCandidate& a, const CriticalCandidate& b) {
        if (a.L != b.L) return a.L < b.L;
        return idx_less(a.index, b.index);
    });

    std::vector<CriticalCandidate> out;
    for (const auto& cand : all) {
        if (!out.empty() && std::abs(cand.L - out.back().L) <= 1e-9 * std::max(1.0, out.back().L))
            continue;
        out.push_back(cand);
    }
    return out;
}

// ---------------------------------------------------------------------------
// spectral witness
// ---------------------------------------------------------------------------

namespace {

using cd = std::complex<double>;

// symbol matrix of the boundary eigenproblem at lambda = i p and its
// entrywise xi-derivatives
Eigen::Matrix2cd symbol_matrix(const ValidatedParams& pp, double pval, cd xi, int q) {
    const double a = pp.a(), b = pp.b(), c = pp.c(), r = pp.r();
    const cd xi3 = xi * xi * xi;
    Eigen::Matrix2cd M;
    switch (q) {
        case 0:
            M << pval - xi3, -(a * b / c) * xi3, -a * xi3, pval + (r / c) * xi - xi3 / c;
            break;
        case 1:
            M << -3.0 * xi * xi, -(a * b / c) * 3.0 * xi * xi, -a * 3.0 * xi * xi,
                (r / c) - 3.0 * xi * xi / c;
            break;
        case 2:
            M << -6.0 * xi, -(a * b / c) * 6.0 * xi, -a * 6.0 * xi, -6.0 * xi / c;
            break;
        case 3:
            M << cd(-6.0), cd(-(a * b / c) * 6.0), cd(-a * 6.0), cd(-6.0 / c);
            break;
        default:
            M.setZero();
            break;
    }
    return M;
}

std::array<cd, 6> polynomial_roots(const ValidatedParams& p, double pval) {
    const double omb = p.one_minus_a2b();
    // coefficients of P(xi), low to high degree
    const std::array<double, 7> coef = {
        p.c() * pval * pval, p.r() * pval, 0.0, -(p.c() + 1.0) * pval, -p.r(), 0.0, omb,
    };
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 1; i < 6; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < 6; ++i) comp(i, 5) = -coef[i] / coef[6];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    std::array<cd, 6> roots;
    for (int i = 0; i < 6; ++i) roots[i] = es.eigenvalues()[i];
    return roots;
}

// one fundamental solution as sum_s coef[s] * x^s * e^{i xi x} with vector
// coefficients; evaluate value and first two x-derivatives at x
struct PolyExpSolution {
    cd xi;
    std::vector<Eigen::Vector2cd> coef;

    std::array<Eigen::Vector2cd, 3> eval(double x, double shift) const {
        // derivative recursion c'_s = i xi c_s + (s+1) c_{s+1}
        auto deriv = [&](const std::vector<Eigen::Vector2cd>& cs) {
            std::vector<Eigen::Vector2cd> out(cs.size(), Eigen::Vector2cd::Zero());
            for (std::size_t s = 0; s < cs.size(); ++s) {
                out[s] += cd(0.0, 1.0) * xi * cs[s];
                if (s + 1 < cs.size()) out[s] += static_cast<double>(s + 1) * cs[s + 1];
            }
            return out;
        };
        const auto c1 = deriv(coef);
        const auto c2 = deriv(c1);
        const cd e = std::exp(cd(0.0, 1.0) * xi * (x - shift));
        auto sum = [&](const std::vector<Eigen::Vector2cd>& cs) {
            Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
            double xp = 1.0;
            for (std::size_t s = 0; s < cs.size(); ++s) {
                acc += cs[s] * xp;
                xp *= x;
            }
            return (acc * e).eval();
        };
        return {sum(coef), sum(c1), sum(c2)};
    }
};

long long binom(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

double witness_sigma_min(const ValidatedParams& p, double L, double pval, int* skipped) {
    const auto roots = polynomial_roots(p, pval);
    double maxabs = 0.0;
    for (auto r_ : roots) maxabs = std::max(maxabs, std::abs(r_));
    const double cluster_tol = 1e-6 * (1.0 + maxabs);

    // cluster nearby roots; repeated roots get polynomial-times-exponential chains
    std::array<bool, 6> used{};
    std::vector<PolyExpSolution> solutions;
    int skipped_local = 0;
    for (int i = 0; i < 6; ++i) {
        if (used[i]) continue;
        std::vector<cd> cluster = {roots[i]};
        used[i] = true;
        for (int j = i + 1; j < 6; ++j) {
            if (!used[j] && std::abs(roots[j] - cluster.front()) < cluster_tol) {
                cluster.push_back(roots[j]);
                used[j] = true;
            }
        }
        cd xi = 0.0;
        for (cd r_ : cluster) xi += r_;
        xi /= static_cast<double>(cluster.size());

        // kernel vector of the 2x2 symbol from its adjugate; fall back to the
        // other adjugate column when the first vanishes
        const Eigen::Matrix2cd M0 = symbol_matrix(p, pval, xi, 0);
        const double mscale = 1.0 + std::abs(pval) + std::pow(std::abs(xi), 3.0);
        auto col_v = [&](int q) {
            const Eigen::Matrix2cd M = symbol_matrix(p, pval, xi, q);
            return Eigen::Vector2cd(M(1, 1), -M(1, 0));
        };
        auto col_u = [&](int q) {
            const Eigen::Matrix2cd M = symbol_matrix(p, pval, xi, q);
            return Eigen::Vector2cd(-M(0, 1), M(0, 0));
        };
        const double nv = col_v(0).norm(), nu = col_u(0).norm();
        if (M0.cwiseAbs().maxCoeff() < 1e-12 * mscale || std::max(nv, nu) < 1e-12 * mscale) {
            // identically singular symbol: skip this mode
            skipped_local += static_cast<int>(cluster.size());
            continue;
        }
        const bool use_v = nv >= nu;

        for (int q = 0; q < static_cast<int>(cluster.size()); ++q) {
            PolyExpSolution sol;
            sol.xi = xi;
            sol.coef.assign(q + 1, Eigen::Vector2cd::Zero());
            for (int s = 0; s <= q; ++s) {
                const Eigen::Vector2cd f = use_v ? col_v(q - s) : col_u(q - s);
                sol.coef[s] = static_cast<double>(binom(q, s)) * std::pow(cd(0.0, 1.0), s) * f;
            }
            solutions.push_back(std::move(sol));
        }
    }
    if (skipped) *skipped += skipped_local;
    if (solutions.empty()) return 0.0;

    const int ncols = static_cast<int>(solutions.size());
    Eigen::MatrixXcd Abc(10, ncols);
    for (int j = 0; j < ncols; ++j) {
        const auto& sol = solutions[j];
        const double shift = (sol.xi.imag() < 0.0) ? L : 0.0;
        const auto at0 = sol.eval(0.0, shift);
        const auto atL = sol.eval(L, shift);
        Abc(0, j) = at0[0][0];  // phi(0)
        Abc(1, j) = atL[0][0];  // phi(L)
        Abc(2, j) = at0[0][1];  // psi(0)
        Abc(3, j) = atL[0][1];  // psi(L)
        Abc(4, j) = at0[1][0];  // phi'(0)
        Abc(5, j) = atL[1][0];  // phi'(L)
        Abc(6, j) = at0[1][1];  // psi'(0)
        Abc(7, j) = atL[1][1];  // psi'(L)
        Abc(8, j) = p.a() * at0[2][0] + at0[2][1] / p.c();
        Abc(9, j) = p.a() * atL[2][0] + atL[2][1] / p.c();
    }
    for (int j = 0; j < ncols; ++j) {
        const double nrm = Abc.col(j).norm();
        if (nrm > 0.0) Abc.col(j) /= nrm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Abc);
    return svd.singularValues().tail(1)[0];
}

SpectralWitness spectral_witness(const ValidatedParams& p, double L,
                                 const std::vector<double>& p_grid) {
    if (L <= 0.0) throw InvalidParams("witness requires L > 0");
    if (p_grid.empty()) throw InvalidParams("witness requires a nonempty p grid");
    SpectralWitness w;
    w.lambda_scan.reserve(p_grid.size());
    w.min_sigma = std::numeric_limits<double>::infinity();
    for (double pv : p_grid) {
        const double s = witness_sigma_min(p, L, pv, &w.skipped_modes);
        w.lambda_scan.emplace_back(pv, s);
        if (s < w.min_sigma) {
            w.min_sigma = s;
            w.argmin_p = pv;
        }
    }
    return w;
}

std::vector<double> default_p_grid(int points_per_side, double p_min, double p_max) {
    std::vector<double> grid;
    grid.reserve(2 * points_per_side);
    const double ratio = std::log(p_max / p_min);
    for (int i = points_per_side - 1; i >= 0; --i) {
        const double t = (points_per_side == 1) ? 0.0 : static_cast<double>(i) / (points_per_side - 1);
        grid.push_back(-p_min * std::exp(ratio * t));
    }
    for (int i = 0; i < points_per_side; ++i) {
        const double t = (points_per_side == 1) ? 0.0 : static_cast<double>(i) / (points_per_side - 1);
        grid.push_back(p_min * std::exp(ratio * t));
    }
    return grid;
}

}  // namespace kdvduo
