// SPDX-License-Identifier: Apache-2.0
//
// Named experiment presets. Each preset runs a parameter family, emits CSV
// plus a manifest holding every input (scenario, grids, seed, trial counts),
// and checks its own trend expectations. Identical manifests reproduce
// byte-identical CSV for any worker count.
#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrrlink/channel.hpp"
#include "mrrlink/config.hpp"
#include "mrrlink/csv.hpp"
#include "mrrlink/montecarlo.hpp"
#include "mrrlink/positioning.hpp"
#include "mrrlink/sensing.hpp"

namespace mrrlink {

struct PresetOptions {
  std::filesystem::path out_dir = "out";
  RngSpec rng{};
  unsigned workers = 0;  // 0 = hardware concurrency
  std::optional<std::size_t> trials_override;
};

struct PresetReport {
  std::string name;
  bool pass = true;
  std::vector<std::string> notes;
  std::vector<std::filesystem::path> outputs;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void info(const std::string& what) { notes.push_back("     " + what); }
};

inline constexpr std::size_t kPdfTrials = 100000;  // estimator-density overlays
inline constexpr std::size_t kMseTrials = 10000;   // positioning MSE points

// ----- shared experiment routines -------------------------------------------

struct EstimatorExperiment {
  double R_i = 0.0;
  int K_d = 0;
  std::size_t trials = 0;
  std::size_t not_estimable_ml = 0;
  std::size_t not_estimable_avg = 0;
  double mean_ml = 0.0, var_ml = 0.0;
  double mean_avg = 0.0, var_avg = 0.0;
  Histogram hist_ml;               // of the ML estimates
  std::vector<double> f_avg;       // averaging-estimator density on hist bins
  DensityDistance ml_vs_analytic;  // against estimator_pdf
};

// Simulates `trials` acquisition integrations at a fixed commanded offset and
// runs both estimators on each; overlays the ML histogram with the analytic
// estimator density.
inline EstimatorExperiment estimator_pdf_experiment(const Scenario& s,
                                                    const ChannelState& st,
                                                    double R_i,
                                                    std::size_t trials,
                                                    const RngSpec& spec,
                                                    unsigned workers) {
  const SensingCoefficients coeffs = sensing_coefficients(s, st);
  const ArrayFadingSampler fad(st, s.M);
  struct Pair {
    double ml, avg;
  };
  const auto res = run_trials<Pair>(
      trials, spec, workers ? workers : default_workers(),
      [&](std::size_t, RandomStream& rng) {
        const double P = simulate_step_power(R_i, 0.0, coeffs, fad, rng);
        const auto ml = estimate_range_ml(P, coeffs, st.sigma_ge);
        const auto avg = estimate_range_averaging(P, coeffs);
        return Pair{ml ? *ml : std::nan(""), avg ? *avg : std::nan("")};
      });

  EstimatorExperiment out;
  out.R_i = R_i;
  out.K_d = s.K_d;
  out.trials = trials;
  std::vector<double> ml, avg;
  ml.reserve(trials);
  avg.reserve(trials);
  for (const auto& p : res) {
    if (std::isnan(p.ml)) ++out.not_estimable_ml; else ml.push_back(p.ml);
    if (std::isnan(p.avg)) ++out.not_estimable_avg; else avg.push_back(p.avg);
  }
  const RunningStats sml = accumulate_stats(ml);
  const RunningStats savg = accumulate_stats(avg);
  out.mean_ml = sml.mean;
  out.var_ml = sml.variance();
  out.mean_avg = savg.mean;
  out.var_avg = savg.variance();
  out.hist_ml = empirical_pdf(ml);
  out.ml_vs_analytic = compare_density(
      out.hist_ml, [&](double x) { return estimator_pdf(x, R_i, coeffs); });
  // averaging-estimator density on the same bins
  out.f_avg.assign(out.hist_ml.density.size(), 0.0);
  const double lo = out.hist_ml.lo, w = out.hist_ml.width;
  for (double x : avg) {
    const double pos = (x - lo) / w;
    if (pos < 0.0) continue;
    std::size_t b = static_cast<std::size_t>(pos);
    if (b >= out.f_avg.size()) continue;
    out.f_avg[b] += 1.0;
  }
  for (double& d : out.f_avg) d /= static_cast<double>(avg.size()) * w;
  return out;
}

struct AcquisitionMc {
  std::size_t trials = 0;
  double p_beam = 0.0;  // per-beam success frequency
  double p_son = 0.0;   // per-step success frequency
};

// End-to-end acquisition Monte Carlo: place beams, integrate, estimate, apply
// the detection-and-accuracy event.
inline AcquisitionMc acquisition_mc(const Scenario& s, const ChannelState& st,
                                    std::size_t trials, const RngSpec& spec,
                                    unsigned workers) {
  const SensingCoefficients coeffs = sensing_coefficients(s, st);
  const ArrayFadingSampler fad(st, s.M);
  struct Counts {
    int beams_ok = 0;
    int sensed = 0;
  };
  const auto res = run_trials<Counts>(
      trials, spec, workers ? workers : default_workers(),
      [&](std::size_t, RandomStream& rng) {
        const AcquisitionStep step =
            simulate_acquisition_step(s, st, coeffs, fad, rng);
        Counts c;
        for (const auto& b : step.beams) c.beams_ok += b.sensed_ok ? 1 : 0;
        c.sensed = step.sensed ? 1 : 0;
        return c;
      });
  AcquisitionMc out;
  out.trials = trials;
  std::size_t beams_ok = 0, sensed = 0;
  for (const auto& c : res) {
    beams_ok += static_cast<std::size_t>(c.beams_ok);
    sensed += static_cast<std::size_t>(c.sensed);
  }
  out.p_beam = static_cast<double>(beams_ok) /
               (static_cast<double>(trials) * s.N_m);
  out.p_son = static_cast<double>(sensed) / static_cast<double>(trials);
  return out;
}

// ----- presets ---------------------------------------------------------------

namespace detail {

inline void ensure_dir(const std::filesystem::path& p) {
  std::filesystem::create_directories(p);
}

inline Manifest base_manifest(const std::string& preset, const Scenario& s,
                              const PresetOptions& opt, std::size_t trials) {
  Manifest m;
  m.set("preset", preset);
  m.set("master_seed", static_cast<std::uint64_t>(opt.rng.master_seed));
  if (trials > 0) {
    m.set("trials", static_cast<std::uint64_t>(trials));
  } else {
    m.set("trials", "analytic");
  }
  m.add_scenario(s);
  return m;
}

inline std::string join_values(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + format_double(x);
  return out;
}

} // namespace detail

// Estimator-density families (one fixed K_d, several offsets, or vice versa).
inline PresetReport run_estimator_pdf_family(
    const std::string& name, Scenario s, const std::vector<double>& R_values,
    const std::vector<int>& Kd_values, const PresetOptions& opt) {
  PresetReport rep;
  rep.name = name;
  detail::ensure_dir(opt.out_dir);
  const std::size_t trials = opt.trials_override.value_or(kPdfTrials);

  const auto csv_path = opt.out_dir / (name + ".csv");
  CsvWriter csv(csv_path, {"R_i", "K_d", "R_hat", "f_analytic", "f_ml", "f_avg"});
  Manifest man = detail::base_manifest(name, s, opt, trials);

  std::vector<EstimatorExperiment> runs;
  for (int kd : Kd_values) {
    s.K_d = kd;
    const ChannelState st = derive_channel(s);
    const SensingCoefficients coeffs = sensing_coefficients(s, st);
    for (double R : R_values) {
      EstimatorExperiment e =
          estimator_pdf_experiment(s, st, R, trials, opt.rng, opt.workers);
      for (std::size_t b = 0; b < e.hist_ml.density.size(); ++b) {
        const double x = e.hist_ml.center(b);
        csv.row({R, static_cast<double>(kd), x, estimator_pdf(x, R, coeffs),
                 e.hist_ml.density[b], e.f_avg[b]});
      }
      rep.info("R_i=" + format_double(R) + " K_d=" + std::to_string(kd) +
               ": ml bias " + format_double(e.mean_ml - R) + ", var " +
               format_double(e.var_ml) + "; avg bias " +
               format_double(e.mean_avg - R) + ", var " +
               format_double(e.var_avg) + "; supnorm " +
               format_double(e.ml_vs_analytic.sup_norm_rel_peak) + ", l1 " +
               format_double(e.ml_vs_analytic.l1));
      runs.push_back(std::move(e));
    }
  }

  if (R_values.size() > 1) {  // fixed K_d family: spread grows with offset
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
      rep.check(runs[i].var_ml < runs[i + 1].var_ml,
                "estimator variance grows with R_i");
    }
  }
  if (Kd_values.size() > 1) {  // K_d sweep: tightening + ML bias advantage
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
      rep.check(runs[i + 1].var_ml < runs[i].var_ml,
                "ML variance strictly decreases in K_d");
    }
    for (const auto& e : runs) {
      rep.check(std::fabs(e.mean_ml - e.R_i) <= std::fabs(e.mean_avg - e.R_i),
                "ML bias <= averaging bias at K_d=" + std::to_string(e.K_d));
    }
  }
  man.set("R_values", detail::join_values(R_values));
  {
    std::string kds;
    for (int kd : Kd_values) kds += (kds.empty() ? "" : " ") + std::to_string(kd);
    man.set("Kd_values", kds);
  }
  if (R_values.size() > 1) man.set("assert", "ml variance strictly grows with R_i");
  if (Kd_values.size() > 1) {
    man.set("assert", "ml variance strictly decreases with K_d; "
                      "abs(bias_ml) <= abs(bias_avg) at each K_d");
  }
  man.write(opt.out_dir / (name + ".manifest"));
  rep.outputs = {csv_path, opt.out_dir / (name + ".manifest")};
  return rep;
}

inline PresetReport run_fig4(const Scenario& base, const PresetOptions& opt) {
  Scenario s = base;
  s.w_zs = 80.0;
  s.K_d = 500;
  return run_estimator_pdf_family("fig4_estimator_pdfs", s,
                                  {80.0, 120.0, 150.0}, {500}, opt);
}

inline PresetReport run_fig5(const Scenario& base, const PresetOptions& opt) {
  Scenario s = base;
  s.w_zs = 60.0;
  return run_estimator_pdf_family("fig5_Kd_sweep", s, {80.0}, {10, 50, 500},
                                  opt);
}

// Sensing-time curves N_aq(w_zs) for R_e in {5,10,15} m and gimbal scales of
// 1 km and 2 km. Short integration (K_d = 15) so the detection edge sits
// inside the scanned beamwidth range; all values are analytic.
inline PresetReport run_fig6_7(const Scenario& base, const PresetOptions& opt) {
  PresetReport rep;
  rep.name = "fig6_7_sensing_time";
  detail::ensure_dir(opt.out_dir);
  Scenario s = base;
  s.K_d = 15;
  s.R_th = 150.0;

  const double w_lo = 20.0, w_hi = 200.0;
  const int n_grid = 91;
  const auto csv_path = opt.out_dir / (rep.name + ".csv");
  CsvWriter csv(csv_path, {"sigma_ge", "R_e", "w_zs", "P_S_on", "N_aq", "T_s"});
  Manifest man = detail::base_manifest(rep.name, s, opt, 0);
  man.set("w_lo", w_lo);
  man.set("w_hi", w_hi);
  man.set("n_grid", n_grid);
  man.set("R_e_values", "5 10 15");
  man.set("sigma_ge_values_km", "1 2");
  man.set("assert", "interior minimum per curve; sigma_ge=2km dominates "
                    "1km pointwise; w*(R_e=5) < w*(R_e=15)");

  std::vector<double> wopt_by_Re;
  std::vector<std::vector<double>> curves_Re10;
  for (double sge_km : {1.0, 2.0}) {
    Scenario sc = s;
    sc.sigma_theta_ge = 2e-3 * sge_km;
    sc.sigma_theta_aq = 0.7 * sc.sigma_theta_ge;
    const ChannelState st = derive_channel(sc);
    for (double Re : {5.0, 10.0, 15.0}) {
      sc.R_e = Re;
      const BeamwidthScan scan =
          optimize_beamwidth_sensing(sc, st, w_lo, w_hi, n_grid);
      for (std::size_t i = 0; i < scan.w.size(); ++i) {
        csv.row({st.sigma_ge, Re, scan.w[i], scan.p_son[i], scan.n_aq[i],
                 scan.t_s[i]});
      }
      const bool interior = scan.opt_index > 0 &&
                            scan.opt_index + 1 < scan.w.size();
      rep.check(interior, "interior minimum (sigma_ge=" +
                              format_double(st.sigma_ge) +
                              ", R_e=" + format_double(Re) + ")");
      rep.info("w* = " + format_double(scan.w_opt) +
               ", N_aq* = " + format_double(scan.n_aq[scan.opt_index]));
      if (sge_km == 1.0) wopt_by_Re.push_back(scan.w_opt);
      if (Re == 10.0) curves_Re10.push_back(scan.n_aq);
    }
  }
  rep.check(wopt_by_Re.size() == 3 && wopt_by_Re[0] < wopt_by_Re[2],
            "optimal w_zs smaller for R_e=5 than for R_e=15");
  bool dominated = curves_Re10.size() == 2;
  if (dominated) {
    for (std::size_t i = 0; i < curves_Re10[0].size(); ++i) {
      dominated = dominated && curves_Re10[1][i] > curves_Re10[0][i];
    }
  }
  rep.check(dominated, "sigma_ge = 2 km curve dominates 1 km pointwise");
  man.write(opt.out_dir / (rep.name + ".manifest"));
  rep.outputs = {csv_path, opt.out_dir / (rep.name + ".manifest")};
  return rep;
}

// Positioning MSE versus w_zp for three ambiguity radii, plus an FSM-error
// sweep at the smallest radius. K_d = 50 per the error-sweep figure family.
inline PresetReport run_fig8(const Scenario& base, const PresetOptions& opt,
                             std::optional<double> only_Remb = std::nullopt) {
  PresetReport rep;
  rep.name = "fig8_positioning_mse";
  detail::ensure_dir(opt.out_dir);
  Scenario s = base;
  s.K_d = 50;
  if (base.sigma_theta_e == Scenario{}.sigma_theta_e) {
    // family default sigma_e = 5 m; explicit overrides pass through
    s.sigma_theta_e = 5.0 / slant_range(link_geometry(s));
  }

  const std::vector<double> w_grid = {15, 20, 25, 30, 40, 50,
                                      60, 70, 85, 100, 120};
  const std::vector<double> Rembs =
      only_Remb ? std::vector<double>{*only_Remb}
                : std::vector<double>{30.0, 55.0, 80.0};
  const std::size_t trials = opt.trials_override.value_or(kMseTrials);
  Manifest man = detail::base_manifest(rep.name, s, opt, trials);
  man.set("w_grid", detail::join_values(w_grid));
  man.set("R_emb_values", detail::join_values(Rembs));
  man.set("assert_ideal_slack", 1.02);
  man.set("assert", "ideal <= both methods at every grid point; "
                    "argmin w_zp nondecreasing in R_emb");

  std::vector<double> argmin_w1, argmin_w2;
  for (double Remb : Rembs) {
    Scenario sc = s;
    sc.R_emb = Remb;
    const ChannelState st = derive_channel(sc);
    const auto csv_path =
        opt.out_dir / ("fig8_Remb" + std::to_string(static_cast<int>(Remb)) + ".csv");
    CsvWriter csv(csv_path, {"w_zp", "mse_method1", "mse_method2", "mse_ideal",
                             "trials", "skipped_samples_mean"});
    const PositioningScan scan = optimize_beamwidth_positioning(
        sc, st, w_grid, trials, opt.rng, opt.workers);
    for (const MsePoint& p : scan.points) {
      csv.row({p.w_zp, p.mse1, p.mse2, p.mse_ideal,
               static_cast<double>(p.trials), p.skipped_samples_mean});
      rep.check(p.mse_ideal <= 1.02 * std::min(p.mse1, p.mse2) + 1e-12,
                "ideal lower-bounds both methods (R_emb=" +
                    format_double(Remb) + ", w_zp=" + format_double(p.w_zp) + ")");
    }
    argmin_w1.push_back(scan.w_opt_method1);
    argmin_w2.push_back(scan.w_opt_method2);
    rep.info("R_emb=" + format_double(Remb) + ": best mse1=" +
             format_double(scan.points[scan.opt_index1].mse1) +
             " @w=" + format_double(scan.w_opt_method1) + ", best mse2=" +
             format_double(scan.points[scan.opt_index2].mse2) +
             " @w=" + format_double(scan.w_opt_method2));
    rep.outputs.push_back(csv_path);
  }
  if (Rembs.size() == 3) {
    rep.check(argmin_w1[0] < argmin_w1[2] && argmin_w2[0] < argmin_w2[2],
              "optimal w_zp shifts upward with R_emb");
  }
  man.write(opt.out_dir / (rep.name + ".manifest"));
  rep.outputs.push_back(opt.out_dir / (rep.name + ".manifest"));
  return rep;
}

// FSM-error sweep of the positioning phase at R_emb = 30 m (the density
// comparison family): MSE for sigma_e in {2,5,8} m over the same w grid.
inline PresetReport run_fig8_sigma_sweep(const Scenario& base,
                                         const PresetOptions& opt) {
  PresetReport rep;
  rep.name = "fig8_sigma_e_sweep";
  detail::ensure_dir(opt.out_dir);
  Scenario s = base;
  s.K_d = 50;
  s.R_emb = 30.0;

  const std::vector<double> w_grid = {15, 20, 25, 30, 40, 50,
                                      60, 70, 85, 100, 120};
  const std::size_t trials = opt.trials_override.value_or(kMseTrials);
  const auto csv_path = opt.out_dir / (rep.name + ".csv");
  CsvWriter csv(csv_path, {"sigma_e", "w_zp", "mse_method1", "mse_method2",
                           "mse_ideal", "trials", "skipped_samples_mean"});
  Manifest man = detail::base_manifest(rep.name, s, opt, trials);
  man.set("w_grid", detail::join_values(w_grid));
  man.set("sigma_e_values", "2 5 8");
  man.set("assert", "per-method best MSE monotone in sigma_e; "
                    "method 2 <= method 1 at sigma_e=8");

  std::vector<double> best1, best2;
  const double Z = slant_range(link_geometry(s));
  for (double se : {2.0, 5.0, 8.0}) {
    Scenario sc = s;
    sc.sigma_theta_e = se / Z;  // beam-plane sigma_e in metres at range Z
    const ChannelState st = derive_channel(sc);
    const PositioningScan scan = optimize_beamwidth_positioning(
        sc, st, w_grid, trials, opt.rng, opt.workers);
    for (const MsePoint& p : scan.points) {
      csv.row({st.sigma_e, p.w_zp, p.mse1, p.mse2, p.mse_ideal,
               static_cast<double>(p.trials), p.skipped_samples_mean});
    }
    best1.push_back(scan.points[scan.opt_index1].mse1);
    best2.push_back(scan.points[scan.opt_index2].mse2);
    rep.info("sigma_e=" + format_double(se) + ": best mse1=" +
             format_double(best1.back()) + ", best mse2=" +
             format_double(best2.back()));
  }
  rep.check(best1[0] < best1[1] && best1[1] < best1[2],
            "method-1 MSE monotone in sigma_e");
  rep.check(best2[0] < best2[1] && best2[1] < best2[2],
            "method-2 MSE monotone in sigma_e");
  rep.check(best2[2] <= best1[2], "method 2 outperforms method 1 at sigma_e=8");
  man.write(opt.out_dir / (rep.name + ".manifest"));
  rep.outputs = {csv_path, opt.out_dir / (rep.name + ".manifest")};
  return rep;
}

// Conditional-moment validation: exact quadrature route vs the closed forms
// vs Monte Carlo, over a ladder of offsets.
inline PresetReport run_appendix_validation(const Scenario& base,
                                            const PresetOptions& opt) {
  PresetReport rep;
  rep.name = "appendix_validation";
  detail::ensure_dir(opt.out_dir);
  Scenario s = base;
  const ChannelState st = derive_channel(s);
  const SensingCoefficients c = sensing_coefficients(s, st);
  const ArrayFadingSampler fad(st, s.M);
  const std::size_t trials = opt.trials_override.value_or(30000);

  const auto csv_path = opt.out_dir / (rep.name + ".csv");
  CsvWriter csv(csv_path,
                {"R_i", "E_hsi_exact", "E_hsi_prop1", "E2_hsi_exact",
                 "E2_hsi_erf", "E2_hsi_printed", "E_hsi_mc", "E2_hsi_mc"});
  Manifest man = detail::base_manifest(rep.name, s, opt, trials);
  man.set("R_over_sigma_e", "5 10 20 50");
  man.set("tol_mean_vs_exact", 0.01);
  man.set("tol_second_vs_exact", 0.01);
  man.set("tol_mc_mean", 0.02);

  const std::vector<double> ratios = {5.0, 10.0, 20.0, 50.0};
  for (double ratio : ratios) {
    const double R = ratio * st.sigma_e;
    const HsiMoments ex = hsi_moments_exact(R, c);
    const HsiMoments ap_erf = hsi_moments_approx(R, c, SecondMomentForm::erf_corrected);
    const HsiMoments ap_prn = hsi_moments_approx(R, c, SecondMomentForm::printed);
    RunningStats mc, mc2;
    {
      const auto vals = run_trials<double>(
          trials, opt.rng, opt.workers ? opt.workers : default_workers(),
          [&](std::size_t, RandomStream& rng) {
            return simulate_hsi(R, 0.0, c, fad, rng);
          });
      for (double v : vals) {
        mc.add(v);
        mc2.add(v * v);
      }
    }
    csv.row({R, ex.mean, ap_erf.mean, ex.second, ap_erf.second, ap_prn.second,
             mc.mean, mc2.mean});
    rep.check(std::fabs(ap_erf.mean / ex.mean - 1.0) < 0.01,
              "Gaussian-regime mean within 1% of exact at R/sigma_e=" +
                  format_double(ratio));
    rep.check(std::fabs(ap_erf.second / ex.second - 1.0) < 0.01,
              "erf-form second moment within 1% of exact at R/sigma_e=" +
                  format_double(ratio));
    rep.check(std::fabs(mc.mean / ex.mean - 1.0) < 0.02,
              "Monte Carlo mean within 2% at R/sigma_e=" + format_double(ratio));
  }
  man.write(opt.out_dir / (rep.name + ".manifest"));
  rep.outputs = {csv_path, opt.out_dir / (rep.name + ".manifest")};
  return rep;
}

// Dispatch by preset name; short figure aliases are accepted.
inline PresetReport run_preset(const std::string& name, const Scenario& s,
                               const PresetOptions& opt) {
  if (name == "fig4" || name == "fig4_estimator_pdfs") return run_fig4(s, opt);
  if (name == "fig5" || name == "fig5_Kd_sweep") return run_fig5(s, opt);
  if (name == "fig6" || name == "fig7" || name == "fig6_7" ||
      name == "fig6_7_sensing_time") {
    return run_fig6_7(s, opt);
  }
  if (name == "fig8" || name == "fig8_positioning_mse") return run_fig8(s, opt);
  if (name == "fig8_sigma" || name == "fig8_sigma_e_sweep") {
    return run_fig8_sigma_sweep(s, opt);
  }
  if (name == "appendix" || name == "appendix_validation") {
    return run_appendix_validation(s, opt);
  }
  throw ConfigError("unknown preset '" + name + "'");
}

} // namespace mrrlink
