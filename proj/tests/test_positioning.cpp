// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mrrlink/montecarlo.hpp"
#include "mrrlink/positioning.hpp"

using namespace mrrlink;

namespace {

Scenario positioning_scenario(double R_emb, double w_zp, double sigma_e_m) {
  Scenario s;
  s.K_d = 50;
  s.R_emb = R_emb;
  s.w_zp = w_zp;
  s.sigma_theta_e = sigma_e_m / 500e3;
  return s;
}

} // namespace

TEST_CASE("layout centers") {
  const PositioningLayout l = make_positioning_layout(30.0, 40.0);
  REQUIRE(l.centers[0][0] == 0.0);
  REQUIRE(l.centers[0][1] == 0.0);
  REQUIRE(l.centers[1][0] == 30.0);
  REQUIRE(l.centers[2][1] == 30.0);
  REQUIRE(l.centers[3][0] == -30.0);
  REQUIRE(l.centers[4][1] == -30.0);
}

TEST_CASE("trilateration inverts the forward distance map") {
  const auto center = trilaterate(0.0, 30.0, 30.0, 30.0);
  REQUIRE(center[0] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(center[1] == Catch::Approx(0.0).margin(1e-12));

  const auto worked = trilaterate(std::sqrt(125.0), std::sqrt(425.0),
                                  std::sqrt(725.0), 30.0);
  REQUIRE(worked[0] == Catch::Approx(10.0).margin(1e-12));
  REQUIRE(worked[1] == Catch::Approx(5.0).margin(1e-12));

  RandomStream rng(17);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double Remb = 20.0 + 60.0 * rng.uniform01();
    const double r = Remb * std::sqrt(rng.uniform01());
    const double th = 0.5 * kPi * rng.uniform01();
    const double x = r * std::cos(th), y = r * std::sin(th);
    const auto xy = trilaterate(std::hypot(x, y), std::hypot(x - Remb, y),
                                std::hypot(x, y - Remb), Remb);
    worst = std::max(worst, std::hypot(xy[0] - x, xy[1] - y));
  }
  REQUIRE(worst < 1e-9);
}

TEST_CASE("positioning error") {
  REQUIRE(positioning_error(1.0, 2.0, 1.0, 2.0) == 0.0);
  REQUIRE(positioning_error(3.0, 4.0, 0.0, 0.0) == Catch::Approx(5.0).epsilon(1e-15));
  RandomStream rng(23);
  for (int i = 0; i < 30; ++i) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal(), d = rng.normal();
    REQUIRE(positioning_error(a, b, c, d) ==
            Catch::Approx(std::hypot(a - c, b - d)).epsilon(1e-14));
  }
}

TEST_CASE("all estimators coincide in the noise-free, jitter-free channel") {
  Scenario s = positioning_scenario(30.0, 40.0, 0.0);
  s.N_0 = 0.0;
  s.gg_model = GgModel::off;
  const ChannelState st = derive_channel(s);
  const PositioningLayout layout = make_positioning_layout(s.R_emb, s.w_zp);
  const ArrayFadingSampler fad(st, s.M);
  RandomStream rng(55);
  const double xs = 7.0, ys = 4.0;
  const PositioningTrial trial =
      simulate_positioning_powers(layout, xs, ys, s, st, fad, rng);
  const PositionEstimate e1 = estimate_position_method1(trial, layout, s, st);
  const PositionEstimate e2 = estimate_position_method2(trial, layout, s, st);
  const PositionEstimate ei = ideal_benchmark(trial, layout, s);
  for (const auto& e : {e1, e2, ei}) {
    REQUIRE(e.ok);
    REQUIRE(e.R_ep < 1e-9);
    REQUIRE(e.x == Catch::Approx(xs).margin(1e-9));
    REQUIRE(e.y == Catch::Approx(ys).margin(1e-9));
  }
  REQUIRE(e2.skipped_samples == 0);
}

TEST_CASE("ideal benchmark is unbiased over the jitter") {
  Scenario s = positioning_scenario(30.0, 40.0, 5.0);
  const ChannelState st = derive_channel(s);
  const PositioningLayout layout = make_positioning_layout(s.R_emb, s.w_zp);
  const ArrayFadingSampler fad(st, s.M);
  const double xs = 10.0, ys = 5.0;
  RunningStats mx, my;
  const int n = 20000;
  const auto res = run_trials<std::array<double, 2>>(
      n, RngSpec{909}, 2, [&](std::size_t, RandomStream& rng) {
        const PositioningTrial trial =
            simulate_positioning_powers(layout, xs, ys, s, st, fad, rng);
        const PositionEstimate ei = ideal_benchmark(trial, layout, s);
        return std::array<double, 2>{ei.x, ei.y};
      });
  for (const auto& xy : res) {
    mx.add(xy[0]);
    my.add(xy[1]);
  }
  const double se_x = std::sqrt(mx.variance() / n);
  const double se_y = std::sqrt(my.variance() / n);
  REQUIRE(std::fabs(mx.mean - xs) < 3.0 * se_x);
  REQUIRE(std::fabs(my.mean - ys) < 3.0 * se_y);
}

TEST_CASE("quadrant selection accuracy for interior satellites") {
  Scenario s = positioning_scenario(30.0, 40.0, 5.0);
  const ChannelState st = derive_channel(s);
  const PositioningLayout layout = make_positioning_layout(s.R_emb, s.w_zp);
  const ArrayFadingSampler fad(st, s.M);
  RandomStream rng(66);
  int correct = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const double r = (0.2 + 0.75 * rng.uniform01()) * s.R_emb;
    const double th = (5.0 + 80.0 * rng.uniform01()) * kPi / 180.0;
    const PositioningTrial trial = simulate_positioning_powers(
        layout, r * std::cos(th), r * std::sin(th), s, st, fad, rng);
    const QuadrantSelection sel = select_quadrant(trial);
    correct += (sel.x_beam == 1 && sel.y_beam == 2) ? 1 : 0;
  }
  REQUIRE(static_cast<double>(correct) / n >= 0.99);
}

TEST_CASE("reflected quadrants recover positions with the right signs") {
  Scenario s = positioning_scenario(30.0, 40.0, 0.0);
  s.N_0 = 0.0;
  s.gg_model = GgModel::off;
  const ChannelState st = derive_channel(s);
  const PositioningLayout layout = make_positioning_layout(s.R_emb, s.w_zp);
  const ArrayFadingSampler fad(st, s.M);
  RandomStream rng(77);
  for (auto [xs, ys] : std::vector<std::pair<double, double>>{
           {-8.0, 6.0}, {-7.0, -9.0}, {5.0, -11.0}}) {
    const PositioningTrial trial =
        simulate_positioning_powers(layout, xs, ys, s, st, fad, rng);
    const PositionEstimate e1 = estimate_position_method1(trial, layout, s, st);
    REQUIRE(e1.ok);
    REQUIRE(e1.x == Catch::Approx(xs).margin(1e-9));
    REQUIRE(e1.y == Catch::Approx(ys).margin(1e-9));
    const PositionEstimate ei = ideal_benchmark(trial, layout, s);
    REQUIRE(ei.x == Catch::Approx(xs).margin(1e-9));
    REQUIRE(ei.y == Catch::Approx(ys).margin(1e-9));
  }
}

TEST_CASE("ideal lower-bounds both methods on a spot configuration") {
  Scenario s = positioning_scenario(30.0, 40.0, 5.0);
  const ChannelState st = derive_channel(s);
  const PositioningLayout layout = make_positioning_layout(s.R_emb, s.w_zp);
  const ArrayFadingSampler fad(st, s.M);
  RunningStats m1, m2, mi;
  const auto res = run_trials<std::array<double, 3>>(
      4000, RngSpec{31337}, 2, [&](std::size_t, RandomStream& rng) {
        const double r = layout.R_emb * std::sqrt(rng.uniform01());
        const double th = 0.5 * kPi * rng.uniform01();
        const PositioningTrial t = simulate_positioning_powers(
            layout, r * std::cos(th), r * std::sin(th), s, st, fad, rng);
        const auto e1 = estimate_position_method1(t, layout, s, st);
        const auto e2 = estimate_position_method2(t, layout, s, st);
        const auto ei = ideal_benchmark(t, layout, s);
        return std::array<double, 3>{e1.ok ? e1.R_ep * e1.R_ep : -1.0,
                                     e2.ok ? e2.R_ep * e2.R_ep : -1.0,
                                     ei.R_ep * ei.R_ep};
      });
  for (const auto& v : res) {
    if (v[0] >= 0.0) m1.add(v[0]);
    if (v[1] >= 0.0) m2.add(v[1]);
    mi.add(v[2]);
  }
  REQUIRE(mi.mean <= m1.mean * 1.05);
  REQUIRE(mi.mean <= m2.mean * 1.05);
}

TEST_CASE("per-sample inversion skips dead samples at low SNR") {
  Scenario s = positioning_scenario(80.0, 20.0, 5.0);  // narrow beam, far beams
  const ChannelState st = derive_channel(s);
  const PositioningLayout layout = make_positioning_layout(s.R_emb, s.w_zp);
  const ArrayFadingSampler fad(st, s.M);
  RandomStream rng(88);
  double skipped = 0.0;
  for (int i = 0; i < 50; ++i) {
    const PositioningTrial t =
        simulate_positioning_powers(layout, 40.0, 40.0, s, st, fad, rng);
    const auto e2 = estimate_position_method2(t, layout, s, st);
    skipped += e2.skipped_samples;
  }
  REQUIRE(skipped > 0.0);
}

TEST_CASE("beamwidth scan returns finite curves and a per-method optimum") {
  Scenario s = positioning_scenario(30.0, 40.0, 5.0);
  const ChannelState st = derive_channel(s);
  REQUIRE_THROWS_AS(
      optimize_beamwidth_positioning(s, st, {40.0}, 100, RngSpec{1}, 2),
      std::invalid_argument);
  const PositioningScan scan = optimize_beamwidth_positioning(
      s, st, {25.0, 40.0, 60.0}, 500, RngSpec{1}, 2);
  REQUIRE(scan.points.size() == 3);
  for (const MsePoint& p : scan.points) {
    REQUIRE(p.mse1 > 0.0);
    REQUIRE(p.mse2 > 0.0);
    REQUIRE(p.mse_ideal > 0.0);
    REQUIRE(std::isfinite(p.mse1));
    REQUIRE(std::isfinite(p.mse2));
  }
  REQUIRE(scan.w_opt_method1 == scan.points[scan.opt_index1].w_zp);
  REQUIRE(scan.w_opt_method2 == scan.points[scan.opt_index2].w_zp);
}

TEST_CASE("MSE grows with the ambiguity radius at a fixed beamwidth") {
  auto mse1_at = [&](double Remb) {
    Scenario s = positioning_scenario(Remb, 40.0, 5.0);
    const ChannelState st = derive_channel(s);
    const PositioningLayout layout = make_positioning_layout(Remb, s.w_zp);
    const ArrayFadingSampler fad(st, s.M);
    RunningStats m;
    const auto res = run_trials<double>(
        3000, RngSpec{4242}, 2, [&](std::size_t, RandomStream& rng) {
          const double r = Remb * std::sqrt(rng.uniform01());
          const double th = 0.5 * kPi * rng.uniform01();
          const PositioningTrial t = simulate_positioning_powers(
              layout, r * std::cos(th), r * std::sin(th), s, st, fad, rng);
          const auto e1 = estimate_position_method1(t, layout, s, st);
          return e1.ok ? e1.R_ep * e1.R_ep : std::nan("");
        });
    for (double v : res) {
      if (!std::isnan(v)) m.add(v);
    }
    return m.mean;
  };
  REQUIRE(mse1_at(80.0) > mse1_at(30.0));
}
