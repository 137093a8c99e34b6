// SPDX-License-Identifier: Apache-2.0
//
// Adaptive Gauss-Kronrod (G7/K15) quadrature. Worst-interval refinement with
// the raw |K15 - G7| error estimate; the library-wide contract is a relative
// target of 1e-6 with an absolute floor of 1e-30, and a blown refinement
// budget raises an exception instead of returning a silently bad value.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrrlink {

struct QuadratureNotConverged : std::runtime_error {
  explicit QuadratureNotConverged(const std::string& what)
      : std::runtime_error(what) {}
};

inline constexpr double kQuadRelTol = 1e-6;
inline constexpr double kQuadAbsFloor = 1e-30;

namespace quad_detail {

// 15-point Kronrod nodes (positive half) and weights; rows marked g carry the
// embedded 7-point Gauss weights.
inline constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <typename F>
void g7k15(const F& f, double a, double b, double* value, double* err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k15 = kWeights[7] * fc;
  double g7 = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double fx = f(c + h * kNodes[i]) + f(c - h * kNodes[i]);
    k15 += kWeights[i] * fx;
    if (i % 2 == 1) g7 += kGaussWeights[i / 2] * fx;
  }
  *value = h * k15;
  *err = std::fabs(h * (k15 - g7));
}

} // namespace quad_detail

template <typename F>
double integrate(const F& f, double a, double b,
                 double rel_tol = kQuadRelTol,
                 double abs_floor = kQuadAbsFloor, int max_intervals = 2000) {
  if (!(b > a)) return 0.0;
  struct Seg {
    double a, b, value, err;
  };
  std::vector<Seg> segs;
  segs.reserve(64);
  auto eval = [&](double lo, double hi) {
    Seg s{lo, hi, 0.0, 0.0};
    quad_detail::g7k15(f, lo, hi, &s.value, &s.err);
    return s;
  };
  segs.push_back(eval(a, b));
  for (;;) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].value;
      err += segs[i].err;
      if (segs[i].err > segs[worst].err) worst = i;
    }
    const double budget = std::max(abs_floor, rel_tol * std::fabs(total));
    if (err <= budget) return total;
    if (static_cast<int>(segs.size()) >= max_intervals) {
      throw QuadratureNotConverged(
          "integral on [" + std::to_string(a) + ", " + std::to_string(b) +
          "]: error estimate " + std::to_string(err) +
          " above budget after " + std::to_string(segs.size()) + " intervals");
    }
    const Seg s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    segs[worst] = eval(s.a, mid);
    segs.push_back(eval(mid, s.b));
  }
}

// Tensor-product adaptive rule over an axis-aligned rectangle.
template <typename F>
double integrate2d(const F& f, double ax, double bx, double ay, double by,
                   double rel_tol = kQuadRelTol) {
  return integrate(
      [&](double x) {
        return integrate([&, x](double y) { return f(x, y); }, ay, by,
                         0.1 * rel_tol);
      },
      ax, bx, rel_tol);
}

} // namespace mrrlink
