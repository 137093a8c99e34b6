// SPDX-License-Identifier: Apache-2.0
//
// mrrlink command-line front end.
//
//   mrrlink linkbudget [--config scenario.cfg] [--set K=V ...]
//   mrrlink sense    --preset fig4|fig5|fig6_7|appendix | --Ri 120 --wzs 80 --Kd 500
//   mrrlink position --preset fig8|fig8_sigma [--Remb 30]
//   mrrlink validate [--criterion N ...]
//
// Exit codes: 0 success, 1 assertion/criterion failure, 2 usage or config error.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrrlink/channel.hpp"
#include "mrrlink/config.hpp"
#include "mrrlink/csv.hpp"
#include "mrrlink/presets.hpp"
#include "mrrlink/sensing.hpp"
#include "mrrlink/validate.hpp"
#include "mrrlink/version.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::vector<std::string> overrides;
  std::optional<std::size_t> trials;
};

mrrlink::Scenario resolve_scenario(const GlobalArgs& g) {
  mrrlink::Scenario s;
  if (!g.config_path.empty()) s = mrrlink::load_scenario(g.config_path);
  for (const std::string& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw mrrlink::ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
    }
    mrrlink::apply_config_entry(s, kv.substr(0, eq), kv.substr(eq + 1));
  }
  mrrlink::validate_scenario(s);
  return s;
}

mrrlink::PresetOptions preset_options(const GlobalArgs& g) {
  mrrlink::PresetOptions opt;
  opt.out_dir = g.out_dir;
  opt.rng.master_seed = g.seed;
  opt.workers = g.workers;
  opt.trials_override = g.trials;
  return opt;
}

void print_report(const mrrlink::PresetReport& rep) {
  std::printf("preset %s: %s\n", rep.name.c_str(), rep.pass ? "PASS" : "FAIL");
  for (const auto& n : rep.notes) std::printf("  %s\n", n.c_str());
  for (const auto& o : rep.outputs) std::printf("  wrote %s\n", o.string().c_str());
}

int cmd_linkbudget(const GlobalArgs& g) {
  using namespace mrrlink;
  const Scenario s = resolve_scenario(g);
  const ChannelState st = derive_channel(s);
  const BeamPhaseConfig sensing_beam = beam_config(s, BeamPhase::sensing, st.Z);
  const BeamPhaseConfig pos_beam = beam_config(s, BeamPhase::positioning, st.Z);
  bool far_field = false;
  const double h_pg_s = receiver_geometric_gain(s.d_g, s.w_zs, &far_field);

  std::vector<std::pair<std::string, double>> rows = {
      {"Z", st.Z},
      {"h_L", st.h_L},
      {"h_L_roundtrip", st.h_L_rt},
      {"sigma_R2", st.sigma_R2},
      {"alpha", st.fading.alpha},
      {"beta", st.fading.beta},
      {"h_pg_w_zs", h_pg_s},
      {"h_ps_zero_offset_w_zs", mrr_pointing_loss(0, 0, sensing_beam, s.A_MRR)},
      {"h_pg_w_zp", receiver_geometric_gain(s.d_g, s.w_zp)},
      {"h_ps_zero_offset_w_zp", mrr_pointing_loss(0, 0, pos_beam, s.A_MRR)},
      {"sigma_ge", st.sigma_ge},
      {"sigma_e", st.sigma_e},
      {"sigma_aq", st.sigma_aq},
  };
  for (const auto& [k, v] : rows) std::printf("%-24s %s\n", k.c_str(), format_double(v).c_str());
  if (far_field) {
    std::printf("warning: far-field approximation violated (2 d_g > w_zg)\n");
  }

  std::filesystem::create_directories(g.out_dir);
  CsvWriter csv(std::filesystem::path(g.out_dir) / "linkbudget.csv",
                {"quantity", "value"});
  for (const auto& [k, v] : rows) csv.row_mixed({k, format_double(v)});
  Manifest man;
  man.set("command", "linkbudget");
  man.set("master_seed", static_cast<std::uint64_t>(g.seed));
  man.add_scenario(s);
  man.write(std::filesystem::path(g.out_dir) / "linkbudget.manifest");
  return 0;
}

int cmd_sense(const GlobalArgs& g, const std::string& preset, double Ri,
              double wzs, int Kd) {
  using namespace mrrlink;
  Scenario s = resolve_scenario(g);
  if (!preset.empty()) {
    if (preset.rfind("fig8", 0) == 0) {
      throw ConfigError("preset '" + preset + "' belongs to the position subcommand");
    }
    const PresetReport rep = run_preset(preset, s, preset_options(g));
    print_report(rep);
    return rep.pass ? 0 : 1;
  }
  if (!(Ri >= 0.0)) {
    throw ConfigError("sense needs either --preset or --Ri/--wzs/--Kd");
  }
  if (wzs > 0.0) s.w_zs = wzs;
  if (Kd > 0) s.K_d = Kd;
  validate_scenario(s);
  const ChannelState st = derive_channel(s);
  const SensingCoefficients c = sensing_coefficients(s, st);

  std::filesystem::create_directories(g.out_dir);
  CsvWriter csv(std::filesystem::path(g.out_dir) / "estimator_pdf.csv",
                {"R_hat", "f_analytic"});
  const double hi = Ri + std::max(30.0, 0.5 * Ri);
  const int n = 2000;
  for (int i = 0; i <= n; ++i) {
    const double x = hi * i / n;
    csv.row({x, estimator_pdf(x, Ri, c)});
  }
  Manifest man;
  man.set("command", "sense-single-point");
  man.set("R_i", Ri);
  man.set("master_seed", static_cast<std::uint64_t>(g.seed));
  man.add_scenario(s);
  man.write(std::filesystem::path(g.out_dir) / "estimator_pdf.manifest");
  std::printf("wrote %s\n",
              (std::filesystem::path(g.out_dir) / "estimator_pdf.csv").string().c_str());
  return 0;
}

int cmd_position(const GlobalArgs& g, const std::string& preset,
                 double Remb) {
  using namespace mrrlink;
  const Scenario s = resolve_scenario(g);
  PresetReport rep;
  if (preset == "fig8" || preset == "fig8_positioning_mse") {
    rep = run_fig8(s, preset_options(g),
                   Remb > 0.0 ? std::optional<double>(Remb) : std::nullopt);
  } else if (preset == "fig8_sigma" || preset == "fig8_sigma_e_sweep") {
    rep = run_fig8_sigma_sweep(s, preset_options(g));
  } else {
    throw ConfigError("position supports presets fig8 and fig8_sigma, got '" +
                      preset + "'");
  }
  print_report(rep);
  return rep.pass ? 0 : 1;
}

int cmd_validate(const GlobalArgs& g, const std::vector<int>& criteria) {
  using namespace mrrlink;
  CheckContext ctx;
  ctx.scenario = resolve_scenario(g);
  ctx.rng.master_seed = g.seed;
  ctx.workers = g.workers;
  ctx.scratch_dir = std::filesystem::path(g.out_dir) / "validate";
  std::filesystem::create_directories(ctx.scratch_dir);
  Manifest man;
  man.set("command", "validate");
  man.set("master_seed", static_cast<std::uint64_t>(g.seed));
  {
    std::string sel;
    for (int id : criteria) sel += (sel.empty() ? "" : " ") + std::to_string(id);
    man.set("criteria", sel.empty() ? std::string("all") : sel);
  }
  man.add_scenario(ctx.scenario);
  man.write(ctx.scratch_dir / "validate.manifest");
  const int failures = run_acceptance(ctx, criteria);
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(mrrlink::kVersion) +
               " - retroreflector downlink sensing and positioning toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  GlobalArgs g;
  app.add_option("--config", g.config_path, "scenario config file (key = value)");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "master seed for all trial streams")
      ->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads (0 = hardware)");
  app.add_option("--set", g.overrides, "override a scenario key, KEY=VALUE")
      ->type_name("KEY=VALUE");
  std::size_t trials = 0;
  auto* trials_opt =
      app.add_option("--trials", trials, "override per-point trial count");

  auto* lb = app.add_subcommand("linkbudget",
                                "print deterministic link quantities");
  std::string sense_preset;
  double Ri = -1.0, wzs = 0.0;
  int Kd = 0;
  auto* sense = app.add_subcommand("sense", "sensing-phase experiments");
  sense->add_option("--preset", sense_preset,
                    "fig4 | fig5 | fig6_7 | appendix");
  sense->add_option("--Ri", Ri, "single-point true offset (m)");
  sense->add_option("--wzs", wzs, "sensing beamwidth override (m)");
  sense->add_option("--Kd", Kd, "coherence intervals per step override");

  std::string pos_preset = "fig8";
  double Remb = 0.0;
  auto* pos = app.add_subcommand("position", "positioning-phase experiments");
  pos->add_option("--preset", pos_preset, "fig8 | fig8_sigma")
      ->capture_default_str();
  pos->add_option("--Remb", Remb, "restrict to one ambiguity radius (m)");

  std::vector<int> criteria;
  auto* val = app.add_subcommand("validate", "run the acceptance suite");
  val->add_option("--criterion", criteria, "run only these criteria (1..12)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (trials_opt->count() > 0) g.trials = trials;

  try {
    if (lb->parsed()) return cmd_linkbudget(g);
    if (sense->parsed()) return cmd_sense(g, sense_preset, Ri, wzs, Kd);
    if (pos->parsed()) return cmd_position(g, pos_preset, Remb);
    if (val->parsed()) return cmd_validate(g, criteria);
  } catch (const mrrlink::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
