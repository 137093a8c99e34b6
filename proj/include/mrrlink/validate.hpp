// SPDX-License-Identifier: Apache-2.0
//
// The acceptance suite: twelve named end-to-end checks with pinned
// tolerances, each printing one PASS/FAIL line with the measured values.
// Shared between the acceptance test binary and the `validate` subcommand.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mrrlink/channel.hpp"
#include "mrrlink/config.hpp"
#include "mrrlink/csv.hpp"
#include "mrrlink/montecarlo.hpp"
#include "mrrlink/positioning.hpp"
#include "mrrlink/presets.hpp"
#include "mrrlink/quadrature.hpp"
#include "mrrlink/sensing.hpp"

namespace mrrlink {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double runtime_cap = 0.0;  // seconds; 0 = uncapped
};

struct CheckContext {
  Scenario scenario;  // defaults unless the caller loaded a config
  RngSpec rng{1};
  unsigned workers = 0;  // 0 = hardware concurrency
  std::filesystem::path scratch_dir = "out/validate";
};

namespace checks {

inline std::string pct(double x) { return format_double(100.0 * x) + "%"; }

// C1: unit-mean Gamma-Gamma sampler moments at (alpha, beta) = (4, 2).
inline CheckResult gg_sampler_moments(const CheckContext& ctx) {
  CheckResult r{1, "gg-sampler-moments"};
  r.runtime_cap = 10.0;
  const TurbulenceFading f{1.0, 4.0, 2.0};
  const GgSampler sampler(f);
  const std::size_t n = 1000000;
  const auto vals = run_trials<double>(
      n, ctx.rng, ctx.workers ? ctx.workers : default_workers(),
      [&](std::size_t, RandomStream& rng) { return sampler.sample(rng); });
  RunningStats m, m2;
  for (double v : vals) {
    m.add(v);
    m2.add(v * v);
  }
  const double target2 = gg_second_moment(f);  // 1.875 for (4, 2)
  const bool mean_ok = m.mean >= 0.995 && m.mean <= 1.005;
  const bool second_ok = std::fabs(m2.mean / target2 - 1.0) < 0.02;
  r.pass = mean_ok && second_ok;
  r.detail = "mean=" + format_double(m.mean) + " (target 1 +- 0.005), E[h^2]=" +
             format_double(m2.mean) + " vs " + format_double(target2) +
             " (tol 2%)";
  return r;
}

// C2: point-aperture pointing loss vs 2-D quadrature of the exact overlap
// integral for a 1 cm square aperture in an 80 m beam.
inline CheckResult pointing_loss_approximation(const CheckContext& ctx) {
  CheckResult r{2, "pointing-loss-point-approximation"};
  r.runtime_cap = 30.0;
  const double w = 80.0, A = 1e-4;
  const double a = std::sqrt(A);  // square side
  const BeamPhaseConfig beam{w / 500e3, w, BeamPhase::sensing};
  RandomStream rng(trial_seed(ctx.rng, 2));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double rad = 2.0 * w * rng.uniform01();
    const double ang = 2.0 * kPi * rng.uniform01();
    const double x0 = rad * std::cos(ang), y0 = rad * std::sin(ang);
    const double point = mrr_pointing_loss(x0, y0, beam, A);
    const double quad = integrate2d(
        [&](double x, double y) {
          return 2.0 / (kPi * w * w) *
                 std::exp(-2.0 * (x * x + y * y) / (w * w));
        },
        x0 - 0.5 * a, x0 + 0.5 * a, y0 - 0.5 * a, y0 + 0.5 * a, 1e-9);
    worst = std::max(worst, std::fabs(point / quad - 1.0));
  }
  r.pass = worst < 1e-6;
  r.detail = "max relative deviation over 100 offsets = " + format_double(worst) +
             " (tol 1e-6)";
  return r;
}

// C3: Monte Carlo of h_si against the exact conditional moments.
inline CheckResult integrated_gain_moments(const CheckContext& ctx) {
  CheckResult r{3, "integrated-gain-moments"};
  r.runtime_cap = 300.0;
  Scenario s = ctx.scenario;
  s.w_zs = 80.0;
  s.K_d = 500;
  const ChannelState st = derive_channel(s);
  const SensingCoefficients c = sensing_coefficients(s, st);
  const ArrayFadingSampler fad(st, s.M);
  const std::size_t n = 100000;
  std::ostringstream detail;
  r.pass = true;
  for (double R : {80.0, 120.0, 150.0}) {
    const auto vals = run_trials<double>(
        n, ctx.rng, ctx.workers ? ctx.workers : default_workers(),
        [&](std::size_t, RandomStream& rng) {
          return simulate_hsi(R, 0.0, c, fad, rng);
        });
    RunningStats stats = accumulate_stats(vals);
    const HsiMoments ex = hsi_moments_exact(R, c);
    const double mean_err = std::fabs(stats.mean / ex.mean - 1.0);
    const double var_err = std::fabs(stats.variance() / ex.variance - 1.0);
    r.pass = r.pass && mean_err < 0.02 && var_err < 0.05;
    detail << "R=" << R << ": mean err " << pct(mean_err) << ", var err "
           << pct(var_err) << "; ";
  }
  r.detail = detail.str() + "(tol 2% mean, 5% var)";
  return r;
}

// C4: Gaussian-regime moments vs the exact quadrature route, and the erf-form
// fast path vs Monte Carlo.
inline CheckResult gaussian_regime_moments(const CheckContext& ctx) {
  CheckResult r{4, "gaussian-regime-moments"};
  Scenario s = ctx.scenario;
  s.w_zs = 80.0;
  s.K_d = 500;
  const ChannelState st = derive_channel(s);
  const SensingCoefficients c = sensing_coefficients(s, st);
  r.pass = true;
  std::ostringstream detail;
  double worst_mean = 0.0, worst_second = 0.0;
  for (double ratio : {5.0, 10.0, 20.0, 50.0}) {
    const double R = ratio * st.sigma_e;
    const HsiMoments ex = hsi_moments_exact(R, c);
    const HsiMoments ap = hsi_moments_approx(R, c, SecondMomentForm::erf_corrected);
    worst_mean = std::max(worst_mean, std::fabs(ap.mean / ex.mean - 1.0));
    worst_second = std::max(worst_second, std::fabs(ap.second / ex.second - 1.0));
  }
  r.pass = worst_mean < 0.01 && worst_second < 0.01;
  detail << "max approx-vs-exact err: mean " << pct(worst_mean) << ", second "
         << pct(worst_second) << " (tol 1%)";
  // fast path vs Monte Carlo at R = 20 sigma_e
  {
    const double R = 20.0 * st.sigma_e;
    const ArrayFadingSampler fad(st, s.M);
    const std::size_t n = 30000;
    const auto vals = run_trials<double>(
        n, ctx.rng, ctx.workers ? ctx.workers : default_workers(),
        [&](std::size_t, RandomStream& rng) {
          return simulate_hsi(R, 0.0, c, fad, rng);
        });
    RunningStats m2;
    for (double v : vals) m2.add(v * v);
    const double err =
        std::fabs(hsi_second_approx(R, c, SecondMomentForm::erf_corrected) /
                      m2.mean - 1.0);
    r.pass = r.pass && err < 0.05;
    detail << "; fast-path E[h^2] vs MC err " << pct(err) << " (tol 5%)";
  }
  r.detail = detail.str();
  return r;
}

// C5: analytic estimator density vs the empirical density of the full ML
// estimator (the distribution-shape reproduction).
inline CheckResult estimator_density_overlay(const CheckContext& ctx) {
  CheckResult r{5, "estimator-density-overlay"};
  r.runtime_cap = 600.0;
  Scenario s = ctx.scenario;
  s.w_zs = 80.0;
  s.K_d = 500;
  const ChannelState st = derive_channel(s);
  const EstimatorExperiment e =
      estimator_pdf_experiment(s, st, 120.0, 100000, ctx.rng, ctx.workers);
  r.pass = e.ml_vs_analytic.sup_norm_rel_peak < 0.10 && e.ml_vs_analytic.l1 < 0.10;
  r.detail = "sup-norm " + pct(e.ml_vs_analytic.sup_norm_rel_peak) +
             " of peak (tol 10%), L1 " + format_double(e.ml_vs_analytic.l1) +
             " (tol 0.1), censored " + std::to_string(e.not_estimable_ml);
  return r;
}

// C6: integration-length sweep; variance tightens and the ML estimator's bias
// never exceeds the averaging estimator's.
inline CheckResult kd_sweep_bias_variance(const CheckContext& ctx) {
  CheckResult r{6, "kd-sweep-bias-variance"};
  Scenario s = ctx.scenario;
  s.w_zs = 60.0;
  const double R = 80.0;
  r.pass = true;
  std::ostringstream detail;
  double prev_var = 0.0;
  bool first = true;
  for (int kd : {10, 50, 500}) {
    s.K_d = kd;
    const ChannelState st = derive_channel(s);
    const EstimatorExperiment e =
        estimator_pdf_experiment(s, st, R, 100000, ctx.rng, ctx.workers);
    const double bias_ml = e.mean_ml - R, bias_avg = e.mean_avg - R;
    if (!first) r.pass = r.pass && e.var_ml < prev_var;
    r.pass = r.pass && std::fabs(bias_ml) <= std::fabs(bias_avg);
    detail << "K_d=" << kd << ": var " << format_double(e.var_ml) << ", bias ml "
           << format_double(bias_ml) << " vs avg " << format_double(bias_avg)
           << "; ";
    prev_var = e.var_ml;
    first = false;
  }
  r.detail = detail.str() + "(variance strictly decreasing, |bias_ml| <= |bias_avg|)";
  return r;
}

// C7: noiseless mean-power inputs invert back to the true offset.
inline CheckResult ml_inversion_exactness(const CheckContext& ctx) {
  CheckResult r{7, "ml-inversion-exactness"};
  Scenario s = ctx.scenario;
  s.w_zs = 80.0;
  s.K_d = 500;
  const ChannelState st = derive_channel(s);
  const SensingCoefficients c = sensing_coefficients(s, st);
  double worst_fast = 0.0, worst_full = 0.0;
  for (double R : {0.0, 10.0, 50.0, 150.0, 300.0}) {
    const double P = c.Rp * hsi_mean_approx(R, c);
    const auto fast = estimate_range_fast(P, c);
    const auto full = estimate_range_ml(P, c, st.sigma_ge);
    worst_fast = std::max(worst_fast, fast ? std::fabs(*fast - R) : 1e30);
    worst_full = std::max(worst_full, full ? std::fabs(*full - R) : 1e30);
  }
  r.pass = worst_fast < 1e-9 && worst_full < 0.01;
  r.detail = "max |Rhat - R|: fast " + format_double(worst_fast) +
             " m (tol 1e-9), full metric " + format_double(worst_full) +
             " m (tol 0.01)";
  return r;
}

// C8: the analytic sensing-probability chain against the end-to-end
// acquisition Monte Carlo, plus the worked sensing-time example.
inline CheckResult sensing_probability_consistency(const CheckContext& ctx) {
  CheckResult r{8, "sensing-probability-consistency"};
  const Scenario s = ctx.scenario;
  const ChannelState st = derive_channel(s);
  const SensingCoefficients c = sensing_coefficients(s, st);
  const double p_beam = per_beam_sensing_prob(c, st, s.R_th, s.R_e);
  const double p_son = overall_sensing_prob(p_beam, s.N_m);
  const AcquisitionMc mc = acquisition_mc(s, st, 100000, ctx.rng, ctx.workers);
  const double rel = std::fabs(mc.p_son / p_son - 1.0);
  // worked example: T_bit = 1 ns, K_c = K_d = 1000, P = 0.01
  Scenario we = s;
  we.T_bit = 1e-9;
  we.K_c = 1000;
  we.K_d = 1000;
  const SensingTime t = mean_sensing_time(we, 0.01);
  const bool worked = std::fabs(t.N_aq - 100.0) < 1e-12 &&
                      std::fabs(t.T_s - 0.1) < 1e-15;
  r.pass = rel < 0.05 && worked;
  r.detail = "P_s_on analytic " + format_double(p_son) + " vs MC " +
             format_double(mc.p_son) + " (rel err " + pct(rel) +
             ", tol 5%); worked example N_aq=" + format_double(t.N_aq) +
             ", T_s=" + format_double(t.T_s) + " s";
  return r;
}

// C9: sensing-time curve shape: interior optimum, gimbal-error dominance,
// accuracy-threshold ordering of the optimum.
inline CheckResult sensing_time_trends(const CheckContext& ctx) {
  CheckResult r{9, "sensing-time-trends"};
  Scenario s = ctx.scenario;
  s.K_d = 15;
  s.R_th = 150.0;
  std::ostringstream detail;
  r.pass = true;

  auto scan_for = [&](double sge_scale, double Re) {
    Scenario sc = s;
    sc.sigma_theta_ge = 2e-3 * sge_scale;
    sc.sigma_theta_aq = 0.7 * sc.sigma_theta_ge;
    sc.R_e = Re;
    const ChannelState st = derive_channel(sc);
    return optimize_beamwidth_sensing(sc, st, 20.0, 200.0, 91);
  };

  const BeamwidthScan s5 = scan_for(1.0, 5.0);
  const BeamwidthScan s10 = scan_for(1.0, 10.0);
  const BeamwidthScan s15 = scan_for(1.0, 15.0);
  const BeamwidthScan s10_2km = scan_for(2.0, 10.0);
  for (const BeamwidthScan* sc : {&s5, &s10, &s15, &s10_2km}) {
    r.pass = r.pass && sc->opt_index > 0 && sc->opt_index + 1 < sc->w.size();
  }
  bool dominated = true;
  for (std::size_t i = 0; i < s10.n_aq.size(); ++i) {
    dominated = dominated && s10_2km.n_aq[i] > s10.n_aq[i];
  }
  r.pass = r.pass && dominated && s5.w_opt < s15.w_opt;
  detail << "w*(Re=5)=" << s5.w_opt << ", w*(Re=10)=" << s10.w_opt
         << ", w*(Re=15)=" << s15.w_opt << ", interior minima "
         << (r.pass ? "yes" : "check") << ", 2 km dominates 1 km: "
         << (dominated ? "yes" : "no") << "; N*(1km,Re10)="
         << format_double(s10.n_aq[s10.opt_index]) << ", N*(2km,Re10)="
         << format_double(s10_2km.n_aq[s10_2km.opt_index]);
  r.detail = detail.str();
  return r;
}

// C10: trilateration round trip.
inline CheckResult trilateration_roundtrip(const CheckContext& ctx) {
  CheckResult r{10, "trilateration-roundtrip"};
  RandomStream rng(trial_seed(ctx.rng, 10));
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double Remb = 20.0 + 80.0 * rng.uniform01();
    const double rad = Remb * std::sqrt(rng.uniform01());
    const double th = 0.5 * kPi * rng.uniform01();
    const double x = rad * std::cos(th), y = rad * std::sin(th);
    const double R1 = std::hypot(x, y);
    const double R2 = std::hypot(x - Remb, y);
    const double R3 = std::hypot(x, y - Remb);
    const auto xy = trilaterate(R1, R2, R3, Remb);
    worst = std::max(worst, std::hypot(xy[0] - x, xy[1] - y));
  }
  const auto w = trilaterate(std::sqrt(125.0), std::sqrt(425.0),
                             std::sqrt(725.0), 30.0);
  const double worked = std::hypot(w[0] - 10.0, w[1] - 5.0);
  r.pass = worst < 1e-9 && worked < 1e-12;
  r.detail = "max round-trip error " + format_double(worst) +
             " m over 1000 points (tol 1e-9); worked point (10,5) err " +
             format_double(worked);
  return r;
}

// C11: positioning MSE orderings across the (R_emb, sigma_e, w_zp) grid.
inline CheckResult positioning_orderings(const CheckContext& ctx) {
  CheckResult r{11, "positioning-mse-orderings"};
  r.runtime_cap = 900.0;
  Scenario base = ctx.scenario;
  base.K_d = 50;
  const double Z = slant_range(link_geometry(base));
  const std::vector<double> w_grid = {15, 20, 25, 30, 40, 50,
                                      60, 70, 85, 100, 120};
  const std::size_t trials = 10000;
  r.pass = true;
  std::ostringstream detail;

  struct CurveMin {
    double best1 = 0.0, best2 = 0.0;
    double argmin1 = 0.0, argmin2 = 0.0;
    bool ideal_ok = true;
  };
  auto scan = [&](double Remb, double sigma_e_m) {
    Scenario sc = base;
    sc.R_emb = Remb;
    sc.sigma_theta_e = sigma_e_m / Z;
    const ChannelState st = derive_channel(sc);
    const PositioningScan ps =
        optimize_beamwidth_positioning(sc, st, w_grid, trials, ctx.rng, ctx.workers);
    CurveMin out;
    for (const MsePoint& p : ps.points) {
      out.ideal_ok = out.ideal_ok &&
                     p.mse_ideal <= 1.02 * std::min(p.mse1, p.mse2) + 1e-12;
    }
    out.best1 = ps.points[ps.opt_index1].mse1;
    out.best2 = ps.points[ps.opt_index2].mse2;
    out.argmin1 = ps.w_opt_method1;
    out.argmin2 = ps.w_opt_method2;
    return out;
  };

  const CurveMin r30s5 = scan(30.0, 5.0);
  const CurveMin r55s5 = scan(55.0, 5.0);
  const CurveMin r80s5 = scan(80.0, 5.0);
  const CurveMin r30s2 = scan(30.0, 2.0);
  const CurveMin r30s8 = scan(30.0, 8.0);

  const bool ideal_all = r30s5.ideal_ok && r55s5.ideal_ok && r80s5.ideal_ok &&
                         r30s2.ideal_ok && r30s8.ideal_ok;
  const bool m2_wins_small = r30s8.best2 <= r30s8.best1;
  const bool m1_wins_large = r80s5.best1 <= r80s5.best2;
  const bool mono1 = r30s2.best1 < r30s5.best1 && r30s5.best1 < r30s8.best1;
  const bool mono2 = r30s2.best2 < r30s5.best2 && r30s5.best2 < r30s8.best2;
  const bool argmin_shift = r30s5.argmin1 < r80s5.argmin1 &&
                            r30s5.argmin2 < r80s5.argmin2 &&
                            r30s5.argmin1 <= r55s5.argmin1 &&
                            r30s5.argmin2 <= r55s5.argmin2;
  r.pass = ideal_all && m2_wins_small && m1_wins_large && mono1 && mono2 &&
           argmin_shift;
  detail << "ideal<=methods everywhere: " << (ideal_all ? "yes" : "NO")
         << "; m2<=m1 @(30,8): " << (m2_wins_small ? "yes" : "NO") << " ("
         << format_double(r30s8.best2) << " vs " << format_double(r30s8.best1)
         << "); m1<=m2 @(80,5): " << (m1_wins_large ? "yes" : "NO") << " ("
         << format_double(r80s5.best1) << " vs " << format_double(r80s5.best2)
         << "); sigma_e monotone: " << (mono1 && mono2 ? "yes" : "NO")
         << "; argmin w: m1 " << r30s5.argmin1 << "->" << r55s5.argmin1 << "->"
         << r80s5.argmin1 << ", m2 " << r30s5.argmin2 << "->" << r55s5.argmin2
         << "->" << r80s5.argmin2;
  r.detail = detail.str();
  return r;
}

// C12: preset rerun determinism across worker counts.
inline CheckResult preset_determinism(const CheckContext& ctx) {
  CheckResult r{12, "preset-determinism"};
  namespace fs = std::filesystem;
  const fs::path d1 = ctx.scratch_dir / "det_run1";
  const fs::path d2 = ctx.scratch_dir / "det_run2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  PresetOptions o1;
  o1.out_dir = d1;
  o1.rng = ctx.rng;
  o1.workers = 1;
  o1.trials_override = 400;
  PresetOptions o2 = o1;
  o2.out_dir = d2;
  o2.workers = 5;
  const PresetReport p1 = run_fig8(ctx.scenario, o1, 30.0);
  const PresetReport p2 = run_fig8(ctx.scenario, o2, 30.0);
  bool identical = p1.outputs.size() == p2.outputs.size();
  std::string mismatch;
  for (std::size_t i = 0; identical && i < p1.outputs.size(); ++i) {
    if (read_file_bytes(p1.outputs[i]) != read_file_bytes(p2.outputs[i])) {
      identical = false;
      mismatch = p1.outputs[i].filename().string();
    }
  }
  r.pass = identical;
  r.detail = identical
                 ? "1-worker and 5-worker reruns byte-identical (" +
                       std::to_string(p1.outputs.size()) + " files)"
                 : "output differs: " + mismatch;
  return r;
}

} // namespace checks

inline std::vector<std::function<CheckResult(const CheckContext&)>>
acceptance_checks() {
  return {
      checks::gg_sampler_moments,      checks::pointing_loss_approximation,
      checks::integrated_gain_moments, checks::gaussian_regime_moments,
      checks::estimator_density_overlay, checks::kd_sweep_bias_variance,
      checks::ml_inversion_exactness,  checks::sensing_probability_consistency,
      checks::sensing_time_trends,     checks::trilateration_roundtrip,
      checks::positioning_orderings,   checks::preset_determinism,
  };
}

// Runs the selected criteria (all when `ids` is empty); returns the number of
// failures and prints one line per criterion.
inline int run_acceptance(const CheckContext& ctx, const std::vector<int>& ids,
                          std::FILE* out = stdout) {
  const auto all = acceptance_checks();
  int failures = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!ids.empty() &&
        std::find(ids.begin(), ids.end(), id) == ids.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult res = all[i](ctx);
    res.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    if (res.runtime_cap > 0.0 && res.seconds > res.runtime_cap) {
      res.pass = false;
      res.detail += "; runtime " + format_double(res.seconds) +
                    " s over the " + format_double(res.runtime_cap) + " s cap";
    }
    failures += res.pass ? 0 : 1;
    std::fprintf(out, "%s C%02d %s: %s [%.1fs]\n", res.pass ? "PASS" : "FAIL",
                 res.id, res.name.c_str(), res.detail.c_str(), res.seconds);
    std::fflush(out);
  }
  return failures;
}

} // namespace mrrlink
