#include "kdvduo/time_sobolev.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace kdvduo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// signed mode index for DFT bin j of an m-point transform
inline int signed_mode(int j, int m) { return (j <= m / 2) ? j : j - m; }

std::vector<std::complex<double>> dft(const Eigen::VectorXd& series) {
    Eigen::FFT<double> fft;
    std::vector<double> in(series.data(), series.data() + series.size());
    std::vector<std::complex<double>> out;
    fft.fwd(out, in);
    return out;
}

}  // namespace

Eigen::VectorXd fractional_time_operator(const Eigen::VectorXd& series, double sigma,
                                         const SobolevSpec& spec) {
    const int m = static_cast<int>(series.size());
    if (m == 0) throw EmptySeries("fractional operator on empty series");
    if (m == 1) return Eigen::VectorXd::Zero(1);

    auto spectrum = dft(series);
    const double kappa = kTwoPi / spec.T;
    for (int j = 0; j < m; ++j) {
        const double mu = kTwoPi * signed_mode(j, m) / spec.T;
        double mult;
        if (spec.mode == SobolevSpec::Mode::Homogeneous) {
            mult = (j == 0) ? 0.0 : std::pow(mu * mu, sigma);
        } else {
            mult = std::pow(kappa * kappa + mu * mu, sigma);
        }
        spectrum[j] *= mult;
    }
    Eigen::FFT<double> fft;
    std::vector<double> out;
    fft.inv(out, spectrum);
    return Eigen::Map<Eigen::VectorXd>(out.data(), m);
}

double sobolev_norm(const Eigen::VectorXd& series, const SobolevSpec& spec) {
    const int m = static_cast<int>(series.size());
    if (m == 0) throw EmptySeries("sobolev norm of empty series");
    const double dt = spec.T / m;
    auto spectrum = dft(series);
    const double kappa = kTwoPi / spec.T;
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
        const double mu = kTwoPi * signed_mode(j, m) / spec.T;
        double w;
        if (spec.mode == SobolevSpec::Mode::Homogeneous) {
            if (j == 0) continue;
            w = std::pow(mu * mu, spec.s);
        } else {
            w = std::pow(kappa * kappa + mu * mu, spec.s);
        }
        acc += w * std::norm(spectrum[j]);
    }
    return std::sqrt(acc * dt / m);
}

double l2_time_norm(const Eigen::VectorXd& series, double T) {
    const int m = static_cast<int>(series.size());
    if (m == 0) throw EmptySeries("l2 norm of empty series");
    const double dt = T / m;
    return std::sqrt(dt * series.squaredNorm());
}

double embedding_constant_estimate(const SobolevSpec& spec, int series_length) {
    const int m = series_length;
    if (m < 2) throw EmptySeries("embedding estimate needs at least two samples");
    const double kappa = kTwoPi / spec.T;
    double best = 0.0;
    for (int j = 0; j < m; ++j) {
        const double mu = kTwoPi * signed_mode(j, m) / spec.T;
        // per-mode L2 / H^s ratio under the inhomogeneous weight
        const double ratio = std::pow(kappa * kappa + mu * mu, -spec.s / 2.0);
        best = std::max(best, ratio);
    }
    return best;
}

}  // namespace kdvduo
