// SPDX-License-Identifier: Apache-2.0
//
// Five-beam positioning phase: beam layout on the ambiguity circle, per-beam
// power simulation, the two range-inversion methods, the noise-free ideal
// benchmark, trilateration, and the beamwidth/MSE scan.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "mrrlink/channel.hpp"
#include "mrrlink/config.hpp"
#include "mrrlink/montecarlo.hpp"
#include "mrrlink/sensing.hpp"

namespace mrrlink {

struct PositioningLayout {
  double R_emb = 0.0;
  double w_zp = 0.0;
  // center, +x, +y, -x, -y
  std::array<std::array<double, 2>, 5> centers{};
};

inline PositioningLayout make_positioning_layout(double R_emb, double w_zp) {
  PositioningLayout l;
  l.R_emb = R_emb;
  l.w_zp = w_zp;
  l.centers = {{{0.0, 0.0},
                {R_emb, 0.0},
                {0.0, R_emb},
                {-R_emb, 0.0},
                {0.0, -R_emb}}};
  return l;
}

// Exact planar trilateration from ranges to the center beam and the two
// on-circle beams of the active quadrant.
inline std::array<double, 2> trilaterate(double R1, double R2, double R3,
                                         double R_emb) {
  return {(R1 * R1 - R2 * R2 + R_emb * R_emb) / (2.0 * R_emb),
          (R1 * R1 - R3 * R3 + R_emb * R_emb) / (2.0 * R_emb)};
}

enum class PositioningMethod { method1, method2, ideal };

struct PositionEstimate {
  double x = 0.0, y = 0.0;
  double R_ep = 0.0;  // error magnitude against the trial ground truth
  PositioningMethod method = PositioningMethod::method1;
  int skipped_samples = 0;  // method 2 only
  bool ok = false;
};

inline double positioning_error(double x_hat, double y_hat, double x_s,
                                double y_s) {
  return std::hypot(x_hat - x_s, y_hat - y_s);
}

struct BeamSamples {
  std::vector<double> power;  // K_d per-interval powers P'_rpi[k]
  double power_sum = 0.0;     // P_rpi
  double sum_r2 = 0.0;        // sum_k |R_i + e[k]|^2, for the ideal benchmark
};

struct PositioningTrial {
  double x_s = 0.0, y_s = 0.0;
  std::array<BeamSamples, 5> beams;
};

// Per-interval powers for all five beams. Fading, FSM jitter and the noise
// are redrawn every coherence interval; the same jitter draws feed the ideal
// benchmark through sum_r2.
inline PositioningTrial simulate_positioning_powers(
    const PositioningLayout& layout, double x_s, double y_s,
    const Scenario& s, const ChannelState& st, const ArrayFadingSampler& fad,
    RandomStream& rng) {
  PositioningTrial trial;
  trial.x_s = x_s;
  trial.y_s = y_s;
  const double hmax = pointing_loss_peak(s.A_MRR, layout.w_zp);
  const double c2 = s.K_c * st.h_L_rt * receiver_geometric_gain(s.d_g, layout.w_zp);
  const double scale = s.R * s.P_t * c2 * hmax;
  const double inv_w2 = 1.0 / (layout.w_zp * layout.w_zp);
  const double noise_std = std::sqrt(static_cast<double>(s.K_c) * s.N_0);
  for (int b = 0; b < 5; ++b) {
    BeamSamples& out = trial.beams[static_cast<std::size_t>(b)];
    const double Rx = layout.centers[static_cast<std::size_t>(b)][0] - x_s;
    const double Ry = layout.centers[static_cast<std::size_t>(b)][1] - y_s;
    out.power.resize(static_cast<std::size_t>(s.K_d));
    for (int k = 0; k < s.K_d; ++k) {
      const double ex = Rx + st.sigma_e * rng.normal();
      const double ey = Ry + st.sigma_e * rng.normal();
      const double r2 = ex * ex + ey * ey;
      const double p = scale * std::exp(-2.0 * r2 * inv_w2) * fad.sum(rng) +
                       noise_std * rng.normal();
      out.power[static_cast<std::size_t>(k)] = p;
      out.power_sum += p;
      out.sum_r2 += r2;
    }
  }
  return trial;
}

// Active-quadrant selection: the ground station does not know the quadrant,
// so the on-axis beam with the larger mean power is picked per axis. For a
// satellite strictly inside a quadrant the two picks are its true neighbours.
struct QuadrantSelection {
  int x_beam = 1;  // index into centers: 1 (+x) or 3 (-x)
  int y_beam = 2;  // 2 (+y) or 4 (-y)
  double sign_x = 1.0, sign_y = 1.0;
};

inline QuadrantSelection select_quadrant(const PositioningTrial& trial) {
  QuadrantSelection sel;
  if (trial.beams[3].power_sum > trial.beams[1].power_sum) {
    sel.x_beam = 3;
    sel.sign_x = -1.0;
  }
  if (trial.beams[4].power_sum > trial.beams[2].power_sum) {
    sel.y_beam = 4;
    sel.sign_y = -1.0;
  }
  return sel;
}

namespace detail {

// Jitter-free mean-model constants of the positioning phase; both estimation
// methods invert through this model (the sensing-phase averaging estimator
// rebuilt for w_zp).
struct InversionModel {
  double per_sample_peak = 0.0;  // Rp K_c hL^2 hpg M hmax gg1^2
  double aggregate_peak = 0.0;   // K_d-fold sum folded into the model
  double A2_0 = 0.0;             // -2 / w_zp^2
};

inline InversionModel inversion_model(const PositioningLayout& layout,
                                      const Scenario& s,
                                      const ChannelState& st) {
  InversionModel m;
  const double gg1 = (st.gg_model == GgModel::off) ? 1.0 : gg_mean(st.fading);
  const double c2 = s.K_c * st.h_L_rt * receiver_geometric_gain(s.d_g, layout.w_zp);
  m.per_sample_peak = s.R * s.P_t * c2 * s.M *
                      pointing_loss_peak(s.A_MRR, layout.w_zp) * gg1 * gg1;
  m.aggregate_peak = m.per_sample_peak * s.K_d;
  m.A2_0 = -2.0 / (layout.w_zp * layout.w_zp);
  return m;
}

inline PositionEstimate finish_estimate(double R1, double R2, double R3,
                                        const QuadrantSelection& sel,
                                        const PositioningLayout& layout,
                                        const PositioningTrial& trial,
                                        PositioningMethod method) {
  PositionEstimate est;
  est.method = method;
  const auto xy = trilaterate(R1, R2, R3, layout.R_emb);
  est.x = sel.sign_x * xy[0];
  est.y = sel.sign_y * xy[1];
  est.R_ep = positioning_error(est.x, est.y, trial.x_s, trial.y_s);
  est.ok = true;
  return est;
}

} // namespace detail

// Method 1: aggregate the K_d samples per beam first, then invert the summed
// power through the mean model.
inline PositionEstimate estimate_position_method1(const PositioningTrial& trial,
                                                  const PositioningLayout& layout,
                                                  const Scenario& s,
                                                  const ChannelState& st) {
  const auto model = detail::inversion_model(layout, s, st);
  const auto sel = select_quadrant(trial);
  const int idx[3] = {0, sel.x_beam, sel.y_beam};
  double R[3];
  for (int i = 0; i < 3; ++i) {
    const auto r = invert_mean_model(
        trial.beams[static_cast<std::size_t>(idx[i])].power_sum,
        model.aggregate_peak, model.A2_0);
    if (!r) {
      PositionEstimate est;
      est.method = PositioningMethod::method1;
      return est;  // non-positive aggregate power: failed trial
    }
    R[i] = *r;
  }
  return detail::finish_estimate(R[0], R[1], R[2], sel, layout, trial,
                                 PositioningMethod::method1);
}

// Method 2: invert each per-interval sample, average the valid inversions.
// Samples outside the invertible range are skipped and counted; clamping them
// would bias the average at low SNR.
inline PositionEstimate estimate_position_method2(const PositioningTrial& trial,
                                                  const PositioningLayout& layout,
                                                  const Scenario& s,
                                                  const ChannelState& st) {
  const auto model = detail::inversion_model(layout, s, st);
  const auto sel = select_quadrant(trial);
  const int idx[3] = {0, sel.x_beam, sel.y_beam};
  PositionEstimate est;
  est.method = PositioningMethod::method2;
  double R[3];
  for (int i = 0; i < 3; ++i) {
    const auto& samples = trial.beams[static_cast<std::size_t>(idx[i])].power;
    double acc = 0.0;
    int valid = 0;
    for (const double p : samples) {
      if (p > 0.0 && p <= model.per_sample_peak) {
        acc += std::sqrt(std::log(p / model.per_sample_peak) / model.A2_0);
        ++valid;
      } else {
        ++est.skipped_samples;
      }
    }
    if (valid == 0) return est;  // beam unusable: failed trial
    R[i] = acc / valid;
  }
  const int skipped = est.skipped_samples;
  est = detail::finish_estimate(R[0], R[1], R[2], sel, layout, trial,
                                PositioningMethod::method2);
  est.skipped_samples = skipped;
  return est;
}

// Ideal benchmark: noise-free, fading at its mean, fed with the same jitter
// draws as the trial. Equivalent to trilateration with Rhat_i^2 equal to the
// per-beam mean squared offset; the +2 sigma_e^2 terms cancel pairwise.
// Used only as a benchmark.
inline PositionEstimate ideal_benchmark(const PositioningTrial& trial,
                                        const PositioningLayout& layout,
                                        const Scenario& s) {
  QuadrantSelection sel;  // ground-truth quadrant
  if (trial.x_s < 0.0) {
    sel.x_beam = 3;
    sel.sign_x = -1.0;
  }
  if (trial.y_s < 0.0) {
    sel.y_beam = 4;
    sel.sign_y = -1.0;
  }
  auto mean_r2 = [&](int b) {
    return trial.beams[static_cast<std::size_t>(b)].sum_r2 / s.K_d;
  };
  const double R1 = std::sqrt(mean_r2(0));
  const double R2 = std::sqrt(mean_r2(sel.x_beam));
  const double R3 = std::sqrt(mean_r2(sel.y_beam));
  return detail::finish_estimate(R1, R2, R3, sel, layout, trial,
                                 PositioningMethod::ideal);
}

struct MsePoint {
  double w_zp = 0.0;
  double mse1 = 0.0, mse2 = 0.0, mse_ideal = 0.0;
  std::size_t trials = 0;
  std::size_t failed1 = 0, failed2 = 0;
  double skipped_samples_mean = 0.0;
};

// One positioning grid point: `trials` random in-quadrant satellites, both
// methods plus the ideal benchmark. Trial streams depend only on
// (master_seed, trial), so scanning w_zp reuses common random numbers.
inline MsePoint positioning_mse_point(const Scenario& s, const ChannelState& st,
                                      std::size_t trials, const RngSpec& spec,
                                      unsigned workers) {
  const PositioningLayout layout = make_positioning_layout(s.R_emb, s.w_zp);
  const ArrayFadingSampler fad(st, s.M);
  struct TrialOut {
    double se1, se2, sei;  // squared errors; NaN = failed
    int skipped;
  };
  const auto res = run_trials<TrialOut>(
      trials, spec, workers ? workers : default_workers(),
      [&](std::size_t, RandomStream& rng) {
        const double r = layout.R_emb * std::sqrt(rng.uniform01());
        const double th = 0.5 * kPi * rng.uniform01();
        const double xs = r * std::cos(th), ys = r * std::sin(th);
        const PositioningTrial trial =
            simulate_positioning_powers(layout, xs, ys, s, st, fad, rng);
        const PositionEstimate e1 = estimate_position_method1(trial, layout, s, st);
        const PositionEstimate e2 = estimate_position_method2(trial, layout, s, st);
        const PositionEstimate ei = ideal_benchmark(trial, layout, s);
        return TrialOut{e1.ok ? e1.R_ep * e1.R_ep : std::nan(""),
                        e2.ok ? e2.R_ep * e2.R_ep : std::nan(""),
                        ei.R_ep * ei.R_ep, e2.skipped_samples};
      });
  MsePoint out;
  out.w_zp = s.w_zp;
  out.trials = trials;
  RunningStats s1, s2, si;
  double skipped = 0.0;
  for (const auto& t : res) {
    if (std::isnan(t.se1)) ++out.failed1; else s1.add(t.se1);
    if (std::isnan(t.se2)) ++out.failed2; else s2.add(t.se2);
    si.add(t.sei);
    skipped += t.skipped;
  }
  out.mse1 = s1.mean;
  out.mse2 = s2.mean;
  out.mse_ideal = si.mean;
  out.skipped_samples_mean = skipped / static_cast<double>(trials);
  return out;
}

struct PositioningScan {
  std::vector<MsePoint> points;
  double w_opt_method1 = 0.0;
  double w_opt_method2 = 0.0;
  std::size_t opt_index1 = 0, opt_index2 = 0;
};

// Monte Carlo MSE(w_zp) per method over a beamwidth grid; returns the curves
// and each method's minimizer.
inline PositioningScan optimize_beamwidth_positioning(
    const Scenario& base, const ChannelState& st,
    const std::vector<double>& w_grid, std::size_t trials, const RngSpec& spec,
    unsigned workers) {
  if (w_grid.size() < 2) {
    throw std::invalid_argument("beamwidth scan needs at least 2 grid points");
  }
  PositioningScan scan;
  scan.points.reserve(w_grid.size());
  for (double w : w_grid) {
    Scenario s = base;
    s.w_zp = w;
    scan.points.push_back(positioning_mse_point(s, st, trials, spec, workers));
  }
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    if (scan.points[i].mse1 < scan.points[scan.opt_index1].mse1) scan.opt_index1 = i;
    if (scan.points[i].mse2 < scan.points[scan.opt_index2].mse2) scan.opt_index2 = i;
  }
  scan.w_opt_method1 = scan.points[scan.opt_index1].w_zp;
  scan.w_opt_method2 = scan.points[scan.opt_index2].w_zp;
  return scan;
}

} // namespace mrrlink
