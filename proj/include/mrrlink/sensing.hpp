// SPDX-License-Identifier: Apache-2.0
//
// Acquisition-phase analytics and simulation: conditional moments of the
// integrated channel gain h_si (exact quadrature route and the Gaussian-regime
// closed forms), the ML and averaging range estimators, the estimator-error
// density, per-step sensing probability, mean sensing time, and the
// sensing-beamwidth scan.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mrrlink/channel.hpp"
#include "mrrlink/config.hpp"
#include "mrrlink/math_util.hpp"
#include "mrrlink/quadrature.hpp"
#include "mrrlink/rng.hpp"

namespace mrrlink {

// Derived constants of the Gaussian-regime moment expressions, built for one
// beamwidth and one integration length. A2 always reduces to
// -2/(w^2 + 4 sigma_e^2); all forms below avoid dividing by sigma_e so the
// jitter-free limit is exact.
struct SensingCoefficients {
  double w = 0.0;        // beamwidth these constants were built for (m)
  int K_d = 0;
  int K_c = 0;
  double M = 0.0;
  double sigma_e = 0.0;  // FSM error scale in the beam plane (m)
  double hmax = 0.0;     // 2 A_MRR / (pi w^2)
  double c1 = 0.0;       // w^2 / (4 sigma_e^2)  (inf when sigma_e = 0)
  double c2 = 0.0;       // K_c h_L^2 h_pg
  double A1 = 0.0, A2 = 0.0, A5 = 0.0, A6 = 0.0;
  double A3 = 0.0, A4 = 0.0, A7 = 0.0;  // inf / -inf in the sigma_e = 0 limit
  double erf_slope = 0.0;  // A4 / sqrt(A7), as a coefficient of R
  double gg1 = 1.0;        // E[h_a]  (identically 1)
  double gg2 = 1.0;        // E[h_a^2]
  double AA1 = 0.0;        // mean coefficient
  double AA2 = 0.0;        // printed second-moment coefficient (erf-free form)
  double AA3 = 0.0;        // squared-mean coefficient, K_d (K_d - 1) scaling
  double array_factor = 0.0;  // gg2^2 + (M - 1) gg1^4
  double A1_0 = 0.0, A2_0 = 0.0, AA1_0 = 0.0;  // jitter-free variants
  double K = 0.0;          // K_c * K_d
  double Rp = 0.0;         // R * P_t
  double noise_var = 0.0;  // K * N_0
};

inline SensingCoefficients build_coefficients(const Scenario& s,
                                              const ChannelState& st,
                                              double w, int K_d) {
  SensingCoefficients c;
  c.w = w;
  c.K_d = K_d;
  c.K_c = s.K_c;
  c.M = static_cast<double>(s.M);
  c.sigma_e = st.sigma_e;
  const double w2 = w * w;
  const double se2 = c.sigma_e * c.sigma_e;
  c.hmax = pointing_loss_peak(s.A_MRR, w);
  c.c1 = (se2 > 0.0) ? w2 / (4.0 * se2)
                     : std::numeric_limits<double>::infinity();
  c.c2 = s.K_c * st.h_L_rt * receiver_geometric_gain(s.d_g, w);
  c.A1 = c.hmax / std::sqrt(1.0 + 4.0 * se2 / w2);
  c.A2 = -2.0 / (w2 + 4.0 * se2);
  c.A5 = c.hmax * c.hmax / (2.0 * std::sqrt(1.0 + 8.0 * se2 / w2));
  c.A6 = -4.0 / (w2 + 8.0 * se2);
  if (se2 > 0.0) {
    c.A3 = 2.0 / w2 + 1.0 / (2.0 * se2);
    c.A4 = -1.0 / (2.0 * se2);
    c.A7 = 4.0 / w2 + 1.0 / (2.0 * se2);
  } else {
    c.A3 = std::numeric_limits<double>::infinity();
    c.A4 = -std::numeric_limits<double>::infinity();
    c.A7 = std::numeric_limits<double>::infinity();
  }
  c.erf_slope = (c.sigma_e > 0.0)
                    ? -w / (c.sigma_e * std::sqrt(2.0 * (w2 + 8.0 * se2)))
                    : -std::numeric_limits<double>::infinity();
  if (st.gg_model == GgModel::off) {
    c.gg1 = 1.0;
    c.gg2 = 1.0;
  } else {
    c.gg1 = gg_mean(st.fading);
    c.gg2 = gg_second_moment(st.fading);
  }
  const double gg1_2 = c.gg1 * c.gg1;
  const double gg1_4 = gg1_2 * gg1_2;
  c.array_factor = c.gg2 * c.gg2 + (c.M - 1.0) * gg1_4;
  c.AA1 = c.c2 * K_d * c.M * c.A1 * gg1_2;
  c.AA2 = K_d * c.M * c.c2 * c.c2 * c.A5 * c.array_factor;
  c.AA3 = c.c2 * c.c2 * c.M * c.M * static_cast<double>(K_d) * (K_d - 1.0) *
          c.A1 * c.A1 * gg1_4;
  c.A1_0 = c.hmax;
  c.A2_0 = -2.0 / w2;
  c.AA1_0 = c.c2 * K_d * c.M * c.hmax * gg1_2;
  c.K = static_cast<double>(s.K_c) * K_d;
  c.Rp = s.R * s.P_t;
  c.noise_var = c.K * s.N_0;
  return c;
}

inline SensingCoefficients sensing_coefficients(const Scenario& s,
                                                const ChannelState& st) {
  return build_coefficients(s, st, s.w_zs, s.K_d);
}

// ----- conditional moments of the per-interval pointing loss --------------

struct HpsMoments {
  double e1 = 0.0;  // E[h_ps | R]
  double e2 = 0.0;  // E[h_ps^2 | R]
};

namespace detail {

// log of integral_0^inf 2 t exp(-(c1+p) t^2) I0(b t) dt, evaluated with the
// peak exponent factored out so huge Bessel arguments cannot overflow.
inline double log_bessel_weighted_integral(double c1p, double b) {
  const double sigma_t = 1.0 / std::sqrt(2.0 * c1p);
  // crude bracket around the exponent maximum, then golden-section refine
  const double t_guess = std::max(b / (2.0 * c1p), sigma_t);
  const double t_hi_bracket = 3.0 * t_guess + 10.0 * sigma_t;
  auto phi = [&](double t) {
    return std::log(2.0 * t) - c1p * t * t + log_bessel_i0(b * t);
  };
  const double t_star = golden_section_min(
      [&](double t) { return -phi(t); }, 1e-12 * t_hi_bracket, t_hi_bracket,
      1e-10 * t_hi_bracket);
  const double phi_star = phi(t_star);
  const double lo = std::max(0.0, t_star - 14.0 * sigma_t);
  const double hi = t_star + 14.0 * sigma_t;
  const double scaled = integrate(
      [&](double t) {
        if (t <= 0.0) return 0.0;
        return std::exp(phi(t) - phi_star);
      },
      lo, hi);
  return phi_star + std::log(scaled);
}

} // namespace detail

// Quadrature evaluation of the inner Bessel-I0 integrals: the conditional
// moments of h_ps given the commanded offset R, with the Rician jitter law
// folded in. Substituting h = hmax exp(-t^2) turns the finite-interval
// integrand with its essential singularity into a smooth Gaussian-like one.
inline HpsMoments hps_conditional_moments(double R,
                                          const SensingCoefficients& c) {
  HpsMoments m;
  if (c.sigma_e <= 0.0) {
    const double g = std::exp(-2.0 * R * R / (c.w * c.w));
    m.e1 = c.hmax * g;
    m.e2 = c.hmax * c.hmax * g * g;
    return m;
  }
  const double se2 = c.sigma_e * c.sigma_e;
  const double b = R * c.w / (std::sqrt(2.0) * se2);
  const double base = -R * R / (2.0 * se2) + std::log(c.c1);
  const double l1 = base + detail::log_bessel_weighted_integral(c.c1 + 1.0, b);
  const double l2 = base + detail::log_bessel_weighted_integral(c.c1 + 2.0, b);
  m.e1 = c.hmax * std::exp(l1);
  m.e2 = c.hmax * c.hmax * std::exp(l2);
  return m;
}

// ----- conditional moments of h_si -----------------------------------------

struct HsiMoments {
  double mean = 0.0;
  double second = 0.0;
  double variance = 0.0;
  bool regime_ok = true;  // Gaussian-regime validity flag (R > 5 sigma_e)
};

enum class SecondMomentForm {
  erf_corrected,  // Appendix-style closed form keeping the [1 - erf] factor
  printed         // erf-free variant
};

inline constexpr SecondMomentForm kDefaultSecondMoment =
    SecondMomentForm::erf_corrected;

inline HsiMoments combine_hsi_moments(const SensingCoefficients& c,
                                      const HpsMoments& hps) {
  HsiMoments out;
  const double gg1_2 = c.gg1 * c.gg1;
  out.mean = c.c2 * c.K_d * c.M * hps.e1 * gg1_2;
  out.second = c.K_d * c.M * c.c2 * c.c2 * hps.e2 * c.array_factor +
               c.c2 * c.c2 * c.M * c.M * static_cast<double>(c.K_d) *
                   (c.K_d - 1.0) * hps.e1 * hps.e1 * gg1_2 * gg1_2;
  out.variance = std::max(out.second - out.mean * out.mean, 0.0);
  return out;
}

inline HsiMoments hsi_moments_exact(double R, const SensingCoefficients& c) {
  HsiMoments m = combine_hsi_moments(c, hps_conditional_moments(R, c));
  m.regime_ok = true;
  return m;
}

// Gaussian-regime validity: the closed forms hold for offsets well past the
// jitter scale.
inline bool accuracy_regime_ok(double R, const SensingCoefficients& c) {
  return R > 5.0 * c.sigma_e;
}

inline double erf_tail_factor(double R, const SensingCoefficients& c) {
  if (c.sigma_e <= 0.0) return (R > 0.0) ? 2.0 : 1.0;
  return 1.0 - std::erf(c.erf_slope * R);
}

inline double hsi_mean_approx(double R, const SensingCoefficients& c) {
  return c.AA1 * std::exp(c.A2 * R * R);
}

inline double hsi_second_approx(double R, const SensingCoefficients& c,
                                SecondMomentForm form = kDefaultSecondMoment) {
  const double tail =
      (form == SecondMomentForm::erf_corrected) ? erf_tail_factor(R, c) : 1.0;
  return c.AA2 * std::exp(c.A6 * R * R) * tail +
         c.AA3 * std::exp(2.0 * c.A2 * R * R);
}

inline HsiMoments hsi_moments_approx(double R, const SensingCoefficients& c,
                                     SecondMomentForm form = kDefaultSecondMoment) {
  HsiMoments m;
  m.mean = hsi_mean_approx(R, c);
  m.second = hsi_second_approx(R, c, form);
  m.variance = std::max(m.second - m.mean * m.mean, 0.0);
  m.regime_ok = accuracy_regime_ok(R, c);
  return m;
}

inline double hsi_variance_approx(double R, const SensingCoefficients& c,
                                  SecondMomentForm form = kDefaultSecondMoment) {
  return hsi_moments_approx(R, c, form).variance;
}

// Rician density of the instantaneous beam-center offset r given the
// commanded offset R.
inline double rician_offset_pdf(double r, double R, double sigma_e) {
  if (r < 0.0) return 0.0;
  const double se2 = sigma_e * sigma_e;
  return r / se2 *
         std::exp(-(r * r + R * R) / (2.0 * se2) +
                  log_bessel_i0(r * R / se2));
}

// Gaussian density of the integrated step power P_rsi given R.
enum class MomentsSource { exact, approx };

inline double received_power_pdf(double P, double R,
                                 const SensingCoefficients& c,
                                 MomentsSource src = MomentsSource::approx,
                                 SecondMomentForm form = kDefaultSecondMoment) {
  const HsiMoments m = (src == MomentsSource::exact)
                           ? hsi_moments_exact(R, c)
                           : hsi_moments_approx(R, c, form);
  const double var = c.Rp * c.Rp * m.variance + c.noise_var;
  return normal_pdf(P, c.Rp * m.mean, var);
}

// ----- range estimators -----------------------------------------------------

// Closed-form inversion of the noiseless mean model: R = sqrt(ln(P / (Rp AA1)) / A2).
// Powers above the zero-offset mean clamp to 0; non-positive powers are not
// estimable (the log has no domain there) and signal a non-detection.
inline std::optional<double> invert_mean_model(double P, double Rp_AA1,
                                               double A2) {
  if (!(P > 0.0)) return std::nullopt;
  if (P >= Rp_AA1) return 0.0;
  return std::sqrt(std::log(P / Rp_AA1) / A2);
}

// Fast ML variant: the closed-form stationary point of the simplified metric.
inline std::optional<double> estimate_range_fast(double P,
                                                 const SensingCoefficients& c) {
  return invert_mean_model(P, c.Rp * c.AA1, c.A2);
}

// Low-complexity averaging estimator: same inversion through the jitter-free
// mean model. Used as the ML initializer; carries a systematic bias that
// grows with sigma_e^2 / w^2.
inline std::optional<double> estimate_range_averaging(double P,
                                                      const SensingCoefficients& c) {
  return invert_mean_model(P, c.Rp * c.AA1_0, c.A2_0);
}

enum class MlMetric {
  least_squares,  // (P - Rp E[h_si])^2; the large-w simplification
  log_variance    // adds ln(Rp^2 V + K N0); the full likelihood metric
};

struct MlOptions {
  MlMetric metric = MlMetric::least_squares;
  double tol = 1e-3;            // golden-section bracket width (m)
  double bracket_rel = 0.5;     // initializer bracket half-width (fraction)
  double fallback_hi = 0.0;     // 0 = 6 sigma_ge decided by caller
  int fallback_grid = 4096;
  SecondMomentForm form = kDefaultSecondMoment;
};

// Full ML estimate: 1-D search of the metric, bracketed around the averaging
// initializer and refined by golden section; falls back to a coarse full-range
// grid when the initializer fails or the bracket does not contain the minimum.
inline std::optional<double> estimate_range_ml(double P,
                                               const SensingCoefficients& c,
                                               double sigma_ge,
                                               MlOptions opt = {}) {
  if (!(P > 0.0)) return std::nullopt;
  if (P >= c.Rp * c.AA1) return 0.0;

  auto metric = [&](double rho) {
    const double mean = c.Rp * hsi_mean_approx(rho, c);
    const double d = P - mean;
    if (opt.metric == MlMetric::least_squares) return d * d;
    const double var =
        c.Rp * c.Rp * hsi_variance_approx(rho, c, opt.form) + c.noise_var;
    return std::log(var) + d * d / var;
  };

  const double hi_full =
      (opt.fallback_hi > 0.0) ? opt.fallback_hi : 6.0 * sigma_ge;
  double lo = 0.0, hi = hi_full;
  const auto init = estimate_range_averaging(P, c);
  bool bracketed = false;
  if (init && *init > opt.tol) {
    lo = std::max(0.0, *init * (1.0 - opt.bracket_rel));
    hi = std::min(hi_full, *init * (1.0 + opt.bracket_rel));
    bracketed = true;
  } else if (init) {
    lo = 0.0;
    hi = std::min(hi_full, std::max(5.0, 10.0 * opt.tol));
    bracketed = true;
  }
  if (bracketed) {
    const double r = golden_section_min(metric, lo, hi, opt.tol);
    const bool at_edge = (r - lo < 2.0 * opt.tol && lo > 0.0) ||
                         (hi - r < 2.0 * opt.tol && hi < hi_full);
    if (!at_edge) return r;
  }
  // full-range grid, then a local golden refinement
  double best = 0.0, best_val = metric(0.0);
  const double step = hi_full / (opt.fallback_grid - 1);
  for (int i = 1; i < opt.fallback_grid; ++i) {
    const double rho = i * step;
    const double v = metric(rho);
    if (v < best_val) {
      best_val = v;
      best = rho;
    }
  }
  return golden_section_min(metric, std::max(0.0, best - step),
                            std::min(hi_full, best + step), opt.tol);
}

// ----- estimator distribution (fast-path transform of the power law) --------

inline double power_noise_std(double R, const SensingCoefficients& c,
                              SecondMomentForm form = kDefaultSecondMoment) {
  return std::sqrt(c.Rp * c.Rp * hsi_variance_approx(R, c, form) +
                   c.noise_var);
}

// P(Rhat < x | R). The clamp at zero gives Rhat an atom at 0, included here
// for x >= 0; x < 0 has no mass.
inline double estimator_cdf(double x, double R, const SensingCoefficients& c,
                            SecondMomentForm form = kDefaultSecondMoment) {
  if (x < 0.0) return 0.0;
  const double s = power_noise_std(R, c, form);
  const double z = c.Rp * c.AA1 *
                   (std::exp(c.A2 * x * x) - std::exp(c.A2 * R * R)) / s;
  return q_function(z);
}

// Density of the range estimate given the true offset R (continuous part).
inline double estimator_pdf(double r_hat, double R,
                            const SensingCoefficients& c,
                            SecondMomentForm form = kDefaultSecondMoment) {
  if (r_hat < 0.0) return 0.0;
  const double s = power_noise_std(R, c, form);
  const double mean_term = std::exp(c.A2 * r_hat * r_hat);
  const double diff = c.Rp * c.AA1 * (mean_term - std::exp(c.A2 * R * R));
  return 2.0 * c.Rp * std::fabs(c.A2) * c.AA1 * r_hat * mean_term /
         std::sqrt(2.0 * kPi * s * s) * std::exp(-diff * diff / (2.0 * s * s));
}

// ----- sensing probability and time -----------------------------------------

inline bool detection_decision(double r_hat, double R_th) {
  return r_hat < R_th;
}

// P(|R - Rhat| < R_e and Rhat < R_th | R), via the estimator CDF. The event
// interval is (R - R_e, min(R_th, R + R_e)); a lower edge below zero folds the
// clamp atom in automatically.
inline double sensing_prob_conditional(double R, const SensingCoefficients& c,
                                       double R_th, double R_e,
                                       SecondMomentForm form = kDefaultSecondMoment) {
  const double lo = R - R_e;
  const double hi = std::min(R_th, R + R_e);
  if (hi <= std::max(lo, 0.0)) return 0.0;
  double p = estimator_cdf(hi, R, c, form);
  if (lo > 0.0) p -= estimator_cdf(lo, R, c, form);
  return std::clamp(p, 0.0, 1.0);
}

// The same probability written as the explicit three-case expression
// (unit-step bookkeeping); kept as a cross-check of the interval form.
inline double sensing_prob_conditional_cases(double R,
                                             const SensingCoefficients& c,
                                             double R_th, double R_e,
                                             SecondMomentForm form = kDefaultSecondMoment) {
  auto F = [&](double x) { return estimator_cdf(x, R, c, form); };
  const bool near_th = std::fabs(R - R_th) < R_e;
  const bool mid = (R > R_e) && (R < R_th - R_e);
  const bool near_zero = R < R_e;
  double p = 0.0;
  if (near_th) p += F(R_th) - F(R - R_e);
  if (mid) p += F(R + R_e) - F(R - R_e);
  if (near_zero) p += F(std::min(R + R_e, R_th));
  return std::clamp(p, 0.0, 1.0);
}

// Radial density of the commanded offset R_i: the beam-placement spread and
// the gimbal error add per axis, the FSM error does not enter (it is carried
// separately inside each coherence interval).
inline double commanded_offset_pdf(double R, const ChannelState& st) {
  const double s2 = st.sigma_ge * st.sigma_ge + st.sigma_aq * st.sigma_aq;
  return R / s2 * std::exp(-R * R / (2.0 * s2));
}

inline double per_beam_sensing_prob(const SensingCoefficients& c,
                                    const ChannelState& st, double R_th,
                                    double R_e,
                                    SecondMomentForm form = kDefaultSecondMoment) {
  auto f = [&](double R) {
    return sensing_prob_conditional(R, c, R_th, R_e, form) *
           commanded_offset_pdf(R, st);
  };
  // integrand kinks where the event interval changes shape
  std::vector<double> knots = {0.0, R_e, R_th - R_e, R_th + R_e};
  std::sort(knots.begin(), knots.end());
  double p = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = std::max(0.0, knots[i]);
    const double b = std::max(0.0, knots[i + 1]);
    // pieces carrying less than ~1e-12 probability mass are irrelevant
    if (b > a) p += integrate(f, a, b, kQuadRelTol, 1e-12);
  }
  return std::clamp(p, 0.0, 1.0);
}

inline double overall_sensing_prob(double p_beam, int N_m) {
  return 1.0 - std::pow(1.0 - p_beam, N_m);
}

struct SensingTime {
  double N_aq = 0.0;  // mean number of acquisition steps
  double T_s = 0.0;   // mean sensing time (s)
};

inline SensingTime mean_sensing_time(const Scenario& s, double P_s_on) {
  SensingTime t;
  if (P_s_on <= 0.0) {
    t.N_aq = std::numeric_limits<double>::infinity();
    t.T_s = std::numeric_limits<double>::infinity();
    return t;
  }
  t.N_aq = 1.0 / P_s_on;
  t.T_s = static_cast<double>(s.K_d) * s.K_c * s.T_bit * t.N_aq;
  return t;
}

struct BeamwidthScan {
  std::vector<double> w;
  std::vector<double> p_beam;
  std::vector<double> p_son;
  std::vector<double> n_aq;
  std::vector<double> t_s;
  double w_opt = 0.0;
  std::size_t opt_index = 0;
};

inline BeamwidthScan optimize_beamwidth_sensing(const Scenario& s,
                                                const ChannelState& st,
                                                double w_lo, double w_hi,
                                                int n_grid) {
  if (!(w_lo > 0.0) || !(w_hi > w_lo) || n_grid < 8) {
    throw std::invalid_argument(
        "beamwidth scan needs 0 < w_lo < w_hi and at least 8 grid points");
  }
  BeamwidthScan scan;
  scan.w.reserve(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    const double w = w_lo + (w_hi - w_lo) * i / (n_grid - 1);
    const SensingCoefficients c = build_coefficients(s, st, w, s.K_d);
    const double pb = per_beam_sensing_prob(c, st, s.R_th, s.R_e);
    const double ps = overall_sensing_prob(pb, s.N_m);
    const SensingTime t = mean_sensing_time(s, ps);
    scan.w.push_back(w);
    scan.p_beam.push_back(pb);
    scan.p_son.push_back(ps);
    scan.n_aq.push_back(t.N_aq);
    scan.t_s.push_back(t.T_s);
  }
  scan.opt_index = static_cast<std::size_t>(
      std::min_element(scan.n_aq.begin(), scan.n_aq.end()) -
      scan.n_aq.begin());
  scan.w_opt = scan.w[scan.opt_index];
  return scan;
}

// ----- acquisition-step simulation -------------------------------------------

struct BeamPlacement {
  double x_cmd = 0.0, y_cmd = 0.0;  // commanded center (acquisition draw)
  double x = 0.0, y = 0.0;          // realized center (one FSM draw on top)
};

inline std::vector<BeamPlacement> place_acquisition_beams(const Scenario& s,
                                                          const ChannelState& st,
                                                          RandomStream& rng) {
  std::vector<BeamPlacement> beams(static_cast<std::size_t>(s.N_m));
  for (auto& b : beams) {
    b.x_cmd = st.sigma_aq * rng.normal();
    b.y_cmd = st.sigma_aq * rng.normal();
    b.x = b.x_cmd + st.sigma_e * rng.normal();
    b.y = b.y_cmd + st.sigma_e * rng.normal();
  }
  return beams;
}

inline double offset_distance(double x1, double y1, double x2, double y2) {
  return std::hypot(x1 - x2, y1 - y2);
}

// One integrated channel gain h_si: K_d coherence intervals, FSM jitter and
// all 2M fading factors redrawn each interval.
inline double simulate_hsi(double Rx, double Ry, const SensingCoefficients& c,
                           const ArrayFadingSampler& fad, RandomStream& rng) {
  const double inv_w2 = 1.0 / (c.w * c.w);
  double acc = 0.0;
  for (int k = 0; k < c.K_d; ++k) {
    const double ex = Rx + c.sigma_e * rng.normal();
    const double ey = Ry + c.sigma_e * rng.normal();
    acc += std::exp(-2.0 * (ex * ex + ey * ey) * inv_w2) * fad.sum(rng);
  }
  return c.c2 * c.hmax * acc;
}

inline double simulate_step_power(double Rx, double Ry,
                                  const SensingCoefficients& c,
                                  const ArrayFadingSampler& fad,
                                  RandomStream& rng) {
  const double h_si = simulate_hsi(Rx, Ry, c, fad, rng);
  return c.Rp * h_si + std::sqrt(c.noise_var) * rng.normal();
}

struct StepOutcome {
  double R_i = 0.0;    // commanded offset distance (m)
  double P_rsi = 0.0;  // integrated power (0 when the beam was not simulated)
  bool simulated = false;
  std::optional<double> R_hat;
  bool detected = false;
  bool sensed_ok = false;  // detected with |R_i - Rhat| < R_e
};

struct AcquisitionStep {
  std::vector<StepOutcome> beams;
  bool sensed = false;
};

// One full acquisition step: place N_m beams, integrate each, estimate, and
// apply the detection and accuracy conditions. When `skip_impossible` is set,
// beams with R_i >= R_th + R_e are not simulated: the success event requires
// Rhat in (R_i - R_e, min(R_th, R_i + R_e)), which is empty there, so the
// shortcut is exact for the sensing event.
inline AcquisitionStep simulate_acquisition_step(const Scenario& s,
                                                 const ChannelState& st,
                                                 const SensingCoefficients& c,
                                                 const ArrayFadingSampler& fad,
                                                 RandomStream& rng,
                                                 bool skip_impossible = true) {
  AcquisitionStep step;
  const double xs = st.sigma_ge * rng.normal();
  const double ys = st.sigma_ge * rng.normal();
  step.beams.resize(static_cast<std::size_t>(s.N_m));
  for (auto& o : step.beams) {
    const double Rx = st.sigma_aq * rng.normal() - xs;
    const double Ry = st.sigma_aq * rng.normal() - ys;
    o.R_i = std::hypot(Rx, Ry);
    if (skip_impossible && o.R_i >= s.R_th + s.R_e) continue;
    o.simulated = true;
    o.P_rsi = simulate_step_power(Rx, Ry, c, fad, rng);
    o.R_hat = estimate_range_ml(o.P_rsi, c, st.sigma_ge);
    if (o.R_hat) {
      o.detected = detection_decision(*o.R_hat, s.R_th);
      o.sensed_ok = o.detected && std::fabs(o.R_i - *o.R_hat) < s.R_e;
    }
    step.sensed = step.sensed || o.sensed_ok;
  }
  return step;
}

} // namespace mrrlink
