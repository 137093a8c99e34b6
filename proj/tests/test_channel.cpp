// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mrrlink/channel.hpp"
#include "mrrlink/montecarlo.hpp"

using namespace mrrlink;

namespace {

// independent long-double re-implementation of the three profile terms
long double cn2_oracle(long double zh, long double V, long double c0) {
  return 0.00594L * (V / 27.0L) * (V / 27.0L) * std::pow(1e-5L * zh, 10.0L) *
             std::exp(-zh / 1000.0L) +
         2.7e-16L * std::exp(-zh / 1500.0L) + c0 * std::exp(-zh / 100.0L);
}

// fixed-order composite Gauss-Legendre (16-point) as the quadrature oracle
double gl_integral(const std::function<double(double)>& f, double a, double b,
                   int panels) {
  static const double x[8] = {0.0950125098376374, 0.2816035507792589,
                              0.4580167776572274, 0.6178762444026438,
                              0.7554044083550030, 0.8656312023878318,
                              0.9445750230732326, 0.9894009349916499};
  static const double w[8] = {0.1894506104550685, 0.1826034150449236,
                              0.1691565193950025, 0.1495959888165767,
                              0.1246289712555339, 0.0951585116824928,
                              0.0622535239386479, 0.0271524594117541};
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
      s += w[i] * (f(mid + 0.5 * h * x[i]) + f(mid - 0.5 * h * x[i]));
    }
    total += 0.5 * h * s;
  }
  return total;
}

Scenario default_scn() { return Scenario{}; }

} // namespace

TEST_CASE("slant range") {
  REQUIRE(slant_range({500e3, 0.0, kPi / 2.0, 0.1}) == Catch::Approx(500e3).epsilon(1e-15));
  REQUIRE(slant_range({500e3, 0.0, kPi / 6.0, 0.1}) == Catch::Approx(1000e3).epsilon(1e-12));
  REQUIRE(slant_range({500e3, 0.0, kPi / 4.0, 0.1}) ==
          Catch::Approx(707106.78118654752).epsilon(1e-14));
}

TEST_CASE("atmospheric attenuation") {
  AtmosphereParams atm{0.0, 1550e-9, 21.0, 1.7e-14};
  REQUIRE(atmospheric_attenuation(500e3, atm) == 1.0);
  atm.zeta = 2e-6;
  REQUIRE(atmospheric_attenuation(500e3, atm) ==
          Catch::Approx(0.36787944117144233).epsilon(1e-14));
  atm.zeta = std::log(2.0) / 500e3;
  REQUIRE(atmospheric_attenuation(500e3, atm) == Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("Hufnagel-Valley profile") {
  AtmosphereParams atm{0.0, 1550e-9, 27.0, 3e-15};
  REQUIRE(cn2_profile(0.0, atm) == Catch::Approx(2.7e-16 + 3e-15).epsilon(1e-14));
  REQUIRE(cn2_profile(2e5, atm) < 1e-30);

  atm.V = 21.0;
  atm.Cn2_0 = 1.7e-14;
  REQUIRE(cn2_profile(1000.0, atm) ==
          Catch::Approx(1.3939443416389668e-16).epsilon(1e-12));
  for (double zh : {100.0, 5000.0, 12000.0, 30000.0}) {
    const double oracle = static_cast<double>(cn2_oracle(zh, 21.0L, 1.7e-14L));
    REQUIRE(cn2_profile(zh, atm) == Catch::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("Rytov variance against a fixed-order oracle and its scaling laws") {
  const LinkGeometry g{500e3, 0.0, kPi / 2.0, 0.1};
  const AtmosphereParams atm{4.2e-7, 1550e-9, 21.0, 1.7e-14};
  const double impl = rytov_variance(g, atm);
  const double kl = atm.wavenumber();
  // graded panels: the ground term decays on a 100 m scale, the high-altitude
  // term on a 1 km scale
  auto f = [&](double zh) { return cn2_profile(zh, atm) * std::pow(zh, 5.0 / 6.0); };
  const double oracle = 2.25 * std::pow(kl, 7.0 / 6.0) *
                        (gl_integral(f, 0.0, 2000.0, 200) +
                         gl_integral(f, 2000.0, 500e3, 400));
  REQUIRE(impl == Catch::Approx(oracle).epsilon(1e-5));
  // frozen closed form: each profile term integrates to an incomplete gamma
  REQUIRE(impl == Catch::Approx(0.062811250325636189).epsilon(1e-6));

  AtmosphereParams half_lambda = atm;
  half_lambda.lambda = atm.lambda / 2.0;  // doubles the wavenumber
  REQUIRE(rytov_variance(g, half_lambda) / impl ==
          Catch::Approx(std::pow(2.0, 7.0 / 6.0)).epsilon(1e-9));

  LinkGeometry low = g;
  low.zeta_elev = kPi / 6.0;
  REQUIRE(rytov_variance(low, atm) / impl ==
          Catch::Approx(std::pow(2.0, 11.0 / 6.0)).epsilon(1e-9));
}

TEST_CASE("Gamma-Gamma shape parameters") {
  const TurbulenceFading f = gg_shape_params(0.25);
  REQUIRE(f.alpha == Catch::Approx(9.7075738241029518).epsilon(1e-9));
  REQUIRE(f.beta == Catch::Approx(8.1983079201870002).epsilon(1e-9));
  // scintillation-index identity against the closed form
  const double si = (1.0 + 1.0 / f.alpha) * (1.0 + 1.0 / f.beta) - 1.0;
  const double t = std::pow(0.25, 6.0 / 5.0);
  const double closed = std::expm1(0.49 * 0.25 / std::pow(1.0 + 1.11 * t, 7.0 / 6.0) +
                                   0.51 * 0.25 / std::pow(1.0 + 0.69 * t, 5.0 / 6.0));
  REQUIRE(si == Catch::Approx(closed).epsilon(1e-12));

  const TurbulenceFading weak = gg_shape_params(1e-6);
  REQUIRE(weak.alpha > 1e5);
  REQUIRE(weak.beta > 1e5);

  const TurbulenceFading s1 = gg_shape_params(1.0);
  const TurbulenceFading s4 = gg_shape_params(4.0);
  REQUIRE(s4.alpha < s1.alpha);
  REQUIRE(s4.beta < s1.beta);

  REQUIRE_THROWS_AS(gg_shape_params(0.0), DegenerateTurbulence);

  const TurbulenceFading sph = gg_shape_params(0.25, GgModel::spherical);
  REQUIRE(sph.alpha > 0.0);
  REQUIRE(sph.beta > 0.0);
}

TEST_CASE("Gamma-Gamma moments") {
  for (auto [a, b] : std::vector<std::pair<double, double>>{
           {4.0, 2.0}, {0.5, 3.7}, {37.4, 35.1}}) {
    const TurbulenceFading f{1.0, a, b};
    REQUIRE(gg_mean(f) == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(gg_second_moment(f) ==
            Catch::Approx((1.0 + 1.0 / a) * (1.0 + 1.0 / b)).epsilon(1e-12));
  }
  REQUIRE(gg_second_moment({1.0, 4.0, 2.0}) == Catch::Approx(1.875).epsilon(1e-12));
  REQUIRE(gg_second_moment({1.0, 1000.0, 1000.0}) == Catch::Approx(1.0).epsilon(0.01));
}

TEST_CASE("Gamma-Gamma sampler matches the Bessel-K density") {
  const TurbulenceFading f{1.0, 4.0, 2.0};
  const GgSampler sampler(f);
  RandomStream rng(2024);
  const std::size_t n = 1000000;
  std::vector<double> draws(n);
  RunningStats m, m2;
  for (auto& d : draws) {
    d = sampler.sample(rng);
    m.add(d);
    m2.add(d * d);
  }
  REQUIRE(m.mean == Catch::Approx(1.0).epsilon(0.005));
  REQUIRE(m2.mean == Catch::Approx(1.875).epsilon(0.02));

  // Bessel-K marginal density
  auto pdf = [&](double h) {
    if (h <= 0.0) return 0.0;
    const double a = f.alpha, b = f.beta;
    const double lg = std::lgamma(a) + std::lgamma(b);
    const double nu = std::fabs(a - b);
    const double arg = 2.0 * std::sqrt(a * b * h);
    return std::exp(0.5 * (a + b) * std::log(a * b) - lg +
                    (0.5 * (a + b) - 1.0) * std::log(h)) *
           2.0 * std::cyl_bessel_k(nu, arg);
  };
  const Histogram h = empirical_pdf(draws);
  const DensityDistance d = compare_density(h, pdf);
  REQUIRE(d.sup_norm_rel_peak < 0.03);
}

TEST_CASE("receiver geometric gain") {
  bool violated = false;
  REQUIRE(receiver_geometric_gain(0.1, 0.2, &violated) == Catch::Approx(1.0));
  REQUIRE_FALSE(violated);
  REQUIRE(receiver_geometric_gain(0.1, 80.0) == Catch::Approx(6.25e-6).epsilon(1e-14));
  REQUIRE(receiver_geometric_gain(0.1, 160.0) ==
          Catch::Approx(6.25e-6 / 4.0).epsilon(1e-14));
  REQUIRE(receiver_geometric_gain(0.1, 0.1, &violated) == 1.0);  // capped
  REQUIRE(violated);
}

TEST_CASE("pointing loss: values, symmetry, monotonicity") {
  const BeamPhaseConfig beam{80.0 / 500e3, 80.0, BeamPhase::sensing};
  REQUIRE(mrr_pointing_loss(0.0, 0.0, beam, 1e-4) ==
          Catch::Approx(9.9471839432434585e-9).epsilon(1e-12));
  const double peak = pointing_loss_peak(1e-4, 80.0);
  const double r2 = 80.0 * 80.0 / 2.0;
  REQUIRE(mrr_pointing_loss(std::sqrt(r2), 0.0, beam, 1e-4) ==
          Catch::Approx(peak * std::exp(-1.0)).epsilon(1e-12));

  RandomStream rng(5);
  for (int i = 0; i < 20; ++i) {
    const double r = 200.0 * rng.uniform01();
    const double th = 2.0 * kPi * rng.uniform01();
    REQUIRE(mrr_pointing_loss(r * std::cos(th), r * std::sin(th), beam, 1e-4) ==
            Catch::Approx(mrr_pointing_loss(r, 0.0, beam, 1e-4)).epsilon(1e-12));
  }
  double prev = peak;
  for (double r : {10.0, 40.0, 90.0, 200.0}) {
    const double v = mrr_pointing_loss(r, 0.0, beam, 1e-4);
    REQUIRE(v < prev);
    prev = v;
  }
}

TEST_CASE("point-aperture approximation against the overlap integral") {
  const double w = 80.0, A = 1e-4, a = std::sqrt(A);
  const BeamPhaseConfig beam{w / 500e3, w, BeamPhase::sensing};
  for (auto [x0, y0] : std::vector<std::pair<double, double>>{
           {0.0, 0.0}, {35.0, -20.0}, {120.0, 60.0}}) {
    const double exact = integrate2d(
        [&](double x, double y) {
          return 2.0 / (kPi * w * w) * std::exp(-2.0 * (x * x + y * y) / (w * w));
        },
        x0 - 0.5 * a, x0 + 0.5 * a, y0 - 0.5 * a, y0 + 0.5 * a, 1e-9);
    REQUIRE(mrr_pointing_loss(x0, y0, beam, A) ==
            Catch::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("channel coefficient sample") {
  Scenario s = default_scn();
  s.gg_model = GgModel::off;
  s.M = 1;
  const ChannelState st = derive_channel(s);
  const BeamPhaseConfig beam = beam_config(s, BeamPhase::sensing, st.Z);
  const ArrayFadingSampler fad(st, s.M);
  RandomStream rng(3);
  const double h = channel_coefficient_sample(s, st, beam, 30.0, -10.0, fad, rng);
  const double expect = st.h_L_rt * receiver_geometric_gain(s.d_g, s.w_zs) *
                        mrr_pointing_loss(30.0, -10.0, beam, s.A_MRR);
  REQUIRE(h == Catch::Approx(expect).epsilon(1e-14));

  // with fading on: unit-mean product keeps the average at M x losses, and
  // the array averaging shrinks the relative spread roughly like 1/M
  auto rel_var = [&](int M) {
    Scenario sm = default_scn();
    sm.M = M;
    const ChannelState stm = derive_channel(sm);
    const ArrayFadingSampler fm(stm, M);
    RandomStream r(77);
    RunningStats stats;
    for (int i = 0; i < 30000; ++i) {
      stats.add(channel_coefficient_sample(sm, stm, beam, 30.0, -10.0, fm, r));
    }
    const double base = stm.h_L_rt * receiver_geometric_gain(sm.d_g, sm.w_zs) *
                        mrr_pointing_loss(30.0, -10.0, beam, sm.A_MRR) * M;
    REQUIRE(stats.mean == Catch::Approx(base).epsilon(0.03));
    REQUIRE(stats.mean > 0.0);
    return stats.variance() / (stats.mean * stats.mean);
  };
  const double v1 = rel_var(1);
  const double v16 = rel_var(16);
  REQUIRE(v1 / v16 == Catch::Approx(16.0).epsilon(0.5));
}

TEST_CASE("derived channel state") {
  const Scenario s = default_scn();
  const ChannelState st = derive_channel(s);
  REQUIRE(st.Z == Catch::Approx(500e3));
  REQUIRE(st.sigma_ge == Catch::Approx(1000.0));
  REQUIRE(st.sigma_e == Catch::Approx(3.0));
  REQUIRE(st.sigma_aq == Catch::Approx(700.0));
  REQUIRE(st.fading.alpha > 30.0);
  REQUIRE(st.fading.beta > 30.0);
  REQUIRE(st.h_L_rt == Catch::Approx(st.h_L * st.h_L));
}
