// SPDX-License-Identifier: Apache-2.0
//
// Small numeric helpers shared across the library: Gaussian tail functions,
// a log-scaled modified Bessel I0, and a golden-section minimizer.
#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace mrrlink {

inline constexpr double kPi = 3.14159265358979323846;

inline double sqr(double x) { return x * x; }

// Gaussian right-tail probability Q(x) = P(Z > x), Z ~ N(0,1).
// erfc-based, relative accuracy better than 1e-12 over the used range.
inline double q_function(double x) {
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * kPi * var);
}

// log(I0(x)) for x >= 0 without overflow. Power series below the crossover,
// asymptotic expansion I0(x) ~ e^x/sqrt(2 pi x) * (1 + 1/(8x) + ...) above it.
inline double log_bessel_i0(double x) {
  x = std::fabs(x);
  if (x < 60.0) {
    // sum_k (x^2/4)^k / (k!)^2
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 400; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < sum * 1e-18) break;
    }
    return std::log(sum);
  }
  const double ix = 1.0 / x;
  // coefficients ((2k-1)!!)^2 / (k! 8^k)
  const double s = ix * (0.125 + ix * (0.0703125 + ix * (0.0732421875 +
                   ix * (0.112152099609375 + ix * (0.22710800170898438 +
                   ix * 0.57250142097473145)))));
  return x - 0.5 * std::log(2.0 * kPi * x) + std::log1p(s);
}

// Golden-section search for the minimum of a unimodal f on [a, b].
// Returns the midpoint of the final bracket (width <= tol).
inline double golden_section_min(const std::function<double(double)>& f,
                                 double a, double b, double tol) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

} // namespace mrrlink
