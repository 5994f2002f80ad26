#pragma once

#include <Eigen/Core>

#include "kdvduo/errors.hpp"

namespace kdvduo {

/// Fractional Sobolev norms in time and the smoothing operators (-Delta_t)^s.
///
/// A series of length m on horizon T is treated as m uniform samples of a
/// T-periodic signal; frequencies are mu_j = 2*pi*j/T for the signed mode
/// index j. On inclusive node series (length nt+1, spacing T/nt) the period is
/// off by one sample spacing; all identities below are exact within the
/// convention. The homogeneous variant removes the mean and acts only on
/// nonzero modes (required for negative powers); the inhomogeneous variant
/// shifts by kappa = 2*pi/T, the smallest nonzero frequency.
struct SobolevSpec {
    enum class Mode { Homogeneous, Inhomogeneous };
    double s = 0.0;
    double T = 1.0;
    Mode mode = Mode::Homogeneous;
};

/// Applies (-Delta_t)^sigma: DFT, multiplier |mu_j|^(2 sigma) (homogeneous;
/// zero mode mapped to 0) or (kappa^2 + mu_j^2)^sigma (inhomogeneous), inverse
/// DFT. Symmetric as a real linear map.
Eigen::VectorXd fractional_time_operator(const Eigen::VectorXd& series, double sigma,
                                         const SobolevSpec& spec);

/// sqrt( (dt/m) * sum_j w_j |X_j|^2 ) with w_j = (kappa^2+mu_j^2)^s
/// (inhomogeneous) or |mu_j|^(2s) over nonzero modes (homogeneous);
/// s = 0 inhomogeneous reproduces the discrete L2(0,T) norm exactly.
double sobolev_norm(const Eigen::VectorXd& series, const SobolevSpec& spec);

/// Discrete L2(0,T) norm sqrt(dt * sum x_n^2) used as the s = 0 reference.
double l2_time_norm(const Eigen::VectorXd& series, double T);

/// Empirical constant of the embedding H^s(0,T) into L2(0,T): the largest
/// L2-to-H^s ratio over the discrete mode basis (attained at the zero mode,
/// kappa^(-s) for the inhomogeneous norm). Deterministic for a fixed grid.
double embedding_constant_estimate(const SobolevSpec& spec, int series_length);

}  // namespace kdvduo
