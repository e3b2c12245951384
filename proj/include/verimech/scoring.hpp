#pragma once

#include <cmath>

namespace verimech {

/// Continuous semi power scoring rule: alpha * s * x^(alpha-1) - (alpha-1) * x^alpha.
///
/// For any distribution of s with mean m, the expectation equals the value at
/// s = m and is maximized at x = m. 0^(alpha-1) is taken as 0.
inline double scoring_rule(double alpha, double x, double s) {
  const double x_pow = x == 0.0 ? 0.0 : std::pow(x, alpha - 1.0);
  return alpha * s * x_pow - (alpha - 1.0) * x_pow * x;
}

}  // namespace verimech
