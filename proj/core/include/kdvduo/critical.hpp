#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "kdvduo/params.hpp"

namespace kdvduo {

/// Index tuple (k,l,m,n,s) of nonnegative integers, not all zero.
struct CriticalIndex {
    int k = 0, l = 0, m = 0, n = 0, s = 0;
    bool all_zero() const { return k == 0 && l == 0 && m == 0 && n == 0 && s == 0; }
    std::array<int, 5> as_array() const { return {k, l, m, n, s}; }
};

/// One candidate critical length with its six-root configuration and the
/// residuals of the root-coefficient relations e1..e6 of the characteristic
/// polynomial P. e1, e2 and e6 vanish by construction; e3, e4, e5 measure
/// whether the candidate supports an actual eigenfunction. degenerate marks
/// repeated roots (some index entries zero).
struct CriticalCandidate {
    CriticalIndex index;
    long long alpha = 0;
    double L = 0.0;
    std::array<double, 6> xi{};
    std::complex<double> p{0.0, 0.0};
    std::array<double, 6> vieta_residuals{};
    bool consistent = false;
    bool degenerate = false;
};

/// Quadratic form alpha(k,l,m,n,s) = 5k^2+8l^2+9m^2+8n^2+5s^2+8kl+6km+4kn
/// +2ks+12ml+8ln+4ls+12mn+6ms+8ns. Equals 6*sum(S_j^2) - sigma^2 with S_j the
/// partial sums and sigma = 5k+4l+3m+2n+s (the ls coefficient is 4, forced by
/// the root relations; see verify_vieta).
long long alpha_index(const CriticalIndex& idx);

/// Candidate length L = pi * sqrt((1-a^2 b) * alpha / (3 r)); requires r > 0.
double critical_length(const ValidatedParams& p, const CriticalIndex& idx);

/// Root configuration for the index at length L:
/// xi_0 = -(pi/(3L)) * (5k+4l+3m+2n+s), consecutive gaps 2*pi*(index)/L,
/// and the spectral parameter p = sqrt((1-a^2 b) * prod(xi) / c).
void build_roots(const ValidatedParams& p, const CriticalIndex& idx, double L,
                 std::array<double, 6>& xi, std::complex<double>& pval);

/// Relative residuals of the six root-coefficient relations against the monic
/// form of P(xi) = (1-a^2b) xi^6 - r xi^4 - (c+1) p xi^3 + r p xi + c p^2.
std::array<double, 6> verify_vieta(const ValidatedParams& p, const CriticalCandidate& cand);

/// All candidates with L <= L_max, deduplicated by L (1e-9 relative) and
/// sorted. include_zero_entries admits index tuples with zero entries
/// (repeated roots, flagged degenerate).
std::vector<CriticalCandidate> enumerate_candidates(const ValidatedParams& p, double L_max,
                                                    bool include_zero_entries = true);

/// Smallest singular value of the column-scaled 10x6 boundary-condition
/// matrix over a grid of spectral parameters lambda = i*p.
struct SpectralWitness {
    std::vector<std::pair<double, double>> lambda_scan;  // (p, sigma_min)
    double min_sigma = 0.0;
    double argmin_p = 0.0;
    int skipped_modes = 0;  // columns dropped for an identically singular symbol
};

/// Evaluates the boundary eigenproblem witness: for each p on the grid, the
/// six exponential solutions e^{i xi x} of the symbol (repeated roots handled
/// by polynomial-times-exponential chains) are tested against the ten
/// homogeneous boundary conditions; sigma_min near zero certifies a
/// nontrivial eigenfunction (lost observability).
SpectralWitness spectral_witness(const ValidatedParams& p, double L,
                                 const std::vector<double>& p_grid);

/// sigma_min at a single spectral parameter.
double witness_sigma_min(const ValidatedParams& p, double L, double pval, int* skipped = nullptr);

/// Default p-grid: log-spaced over [0.05, 200] in both signs.
std::vector<double> default_p_grid(int points_per_side = 80, double p_min = 0.05,
                                   double p_max = 200.0);

}  // namespace kdvduo
