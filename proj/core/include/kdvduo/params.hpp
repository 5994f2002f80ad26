#pragma once

#include "kdvduo/errors.hpp"

namespace kdvduo {

/// Physical coefficients of the coupled two-KdV system.
///
/// a couples the dispersive terms, b and c weight the second equation,
/// r is the first-order transport coefficient, a1/a2 the nonlinear couplings.
struct SystemParams {
    double a = 0.0;
    double b = 1.0;
    double c = 1.0;
    double r = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

/// SystemParams that passed validate_params. Construct only through validate_params.
class ValidatedParams {
  public:
    double a() const { return p_.a; }
    double b() const { return p_.b; }
    double c() const { return p_.c; }
    double r() const { return p_.r; }
    double a1() const { return p_.a1; }
    double a2() const { return p_.a2; }

    /// 1 - a^2 b, positive for valid parameters.
    double one_minus_a2b() const { return 1.0 - p_.a * p_.a * p_.b; }

    const SystemParams& raw() const { return p_; }

  private:
    friend ValidatedParams validate_params(const SystemParams& p);
    explicit ValidatedParams(const SystemParams& p) : p_(p) {}
    SystemParams p_;
};

/// Checks b > 0, c > 0 and 1 - a^2 b > 0; throws InvalidParams naming the
/// violated constraint.
ValidatedParams validate_params(const SystemParams& p);

}  // namespace kdvduo
