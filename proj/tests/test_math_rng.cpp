// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <set>

#include "mrrlink/math_util.hpp"
#include "mrrlink/montecarlo.hpp"
#include "mrrlink/rng.hpp"

using namespace mrrlink;

TEST_CASE("log_bessel_i0 matches reference over both branches") {
  for (double x : {0.0, 0.3, 1.0, 5.0, 14.9, 15.1, 29.0, 31.0, 80.0, 300.0, 600.0}) {
    const double ref = std::log(boost::math::cyl_bessel_i(0, x));
    REQUIRE(log_bessel_i0(x) == Catch::Approx(ref).epsilon(1e-12));
  }
  // far beyond double overflow of I0 itself
  const double big = log_bessel_i0(5000.0);
  const double asym = 5000.0 - 0.5 * std::log(2.0 * kPi * 5000.0);
  REQUIRE(big == Catch::Approx(asym).epsilon(1e-4));
}

TEST_CASE("q_function basic values") {
  REQUIRE(q_function(0.0) == Catch::Approx(0.5).epsilon(1e-15));
  REQUIRE(q_function(3.0) == Catch::Approx(0.0013498980316300945).epsilon(1e-12));
  REQUIRE(q_function(-3.0) + q_function(3.0) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("golden section finds quadratic minimum") {
  const double x = golden_section_min([](double t) { return (t - 3.25) * (t - 3.25); },
                                      0.0, 10.0, 1e-9);
  REQUIRE(x == Catch::Approx(3.25).margin(1e-8));
}

TEST_CASE("streams are deterministic and seed-separated") {
  RandomStream a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  REQUIRE(all_equal);
  REQUIRE(any_diff);

  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_stream_seed(1, i));
  REQUIRE(seeds.size() == 1000);
}

TEST_CASE("uniform01 stays inside the open interval") {
  RandomStream rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal sampler moments") {
  RandomStream rng(11);
  RunningStats s;
  for (int i = 0; i < 200000; ++i) s.add(rng.normal());
  REQUIRE(s.mean == Catch::Approx(0.0).margin(0.01));
  REQUIRE(s.variance() == Catch::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma sampler moments for plain and boosted shapes") {
  for (double shape : {0.5, 1.0, 2.0, 4.0, 37.4}) {
    RandomStream rng(static_cast<std::uint64_t>(shape * 1000) + 3);
    GammaSampler g(shape);
    RunningStats s;
    for (int i = 0; i < 200000; ++i) s.add(g.sample(rng));
    REQUIRE(s.mean == Catch::Approx(shape).epsilon(0.02));
    REQUIRE(s.variance() == Catch::Approx(shape).epsilon(0.05));
    RandomStream rng2(99);
    RunningStats u;
    for (int i = 0; i < 50000; ++i) u.add(g.sample_unit_mean(rng2));
    REQUIRE(u.mean == Catch::Approx(1.0).epsilon(0.03));
  }
}
