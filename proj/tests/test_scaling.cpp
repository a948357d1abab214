#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "perfplan/scaling.hpp"
#include "perfplan/synthetic.hpp"

using perfplan::ScalingParams;
using perfplan::SpeedupModel;
using perfplan::SplitMix64;

namespace {

// Parameters recovered from the canonical three-point fit; the exact solve is
// rechecked independently in test_fitting.cpp and the acceptance suite.
ScalingParams<double> cpmd_params() {
  ScalingParams<double> params;
  params.serial_fraction = 0.01070360456;
  params.comm_idle_fraction = 0.002441617774;
  params.cores_per_node = 32;
  params.baseline_time_hours = 89.29318688;
  return params;
}

}  // namespace

TEST_CASE("classical Amdahl speedup") {
  CHECK(perfplan::amdahl_speedup(0.0, 64) == doctest::Approx(64.0).epsilon(1e-12));
  CHECK(perfplan::amdahl_speedup(1.0, 128) == doctest::Approx(1.0).epsilon(1e-12));
  // 1/(0.01 + 0.99/128): the knee of a 1%-serial code near 128 units
  CHECK(std::abs(perfplan::amdahl_speedup(0.01, 128) - 56.39) < 0.01);
  CHECK(perfplan::amdahl_speedup(0.01, 128) == doctest::Approx(56.387665).epsilon(1e-6));

  CHECK_THROWS_AS(perfplan::amdahl_speedup(-0.1, 4), std::domain_error);
  CHECK_THROWS_AS(perfplan::amdahl_speedup(1.1, 4), std::domain_error);
  CHECK_THROWS_AS(perfplan::amdahl_speedup(0.5, 0), std::domain_error);
  CHECK_THROWS_AS(perfplan::amdahl_speedup(std::nan(""), 4), std::domain_error);
}

TEST_CASE("extended speedup reduces to Amdahl at C=0") {
  ScalingParams<double> params;
  params.serial_fraction = 0.3;
  params.comm_idle_fraction = 0.0;
  params.cores_per_node = 32;
  CHECK(perfplan::extended_speedup(params, 16) ==
        doctest::Approx(perfplan::amdahl_speedup(0.3, 16)).epsilon(1e-15));
}

TEST_CASE("extended speedup matches the measured CPMD ratios") {
  const auto params = cpmd_params();
  // 89.3 h -> 4.8 h at 24 nodes and 2.53 h at 96 nodes
  CHECK(std::abs(perfplan::extended_speedup(params, 24) - 18.60) < 0.05);
  CHECK(std::abs(perfplan::extended_speedup(params, 96) - 35.30) < 0.05);
  CHECK(perfplan::extended_speedup(params, 24) == doctest::Approx(18.602747).epsilon(1e-6));
  CHECK(perfplan::extended_speedup(params, 96) == doctest::Approx(35.293750).epsilon(1e-6));
}

TEST_CASE("extended speedup is unnormalized at N=1 and the normalized variant is not") {
  ScalingParams<double> params;
  params.serial_fraction = 0.1;
  params.comm_idle_fraction = 0.05;
  params.cores_per_node = 8;
  CHECK(perfplan::extended_speedup(params, 1) ==
        doctest::Approx(1.0 / (1.0 + 0.05 / 8.0)).epsilon(1e-15));
  CHECK(perfplan::extended_speedup(params, 1) < 1.0);
  CHECK(perfplan::extended_speedup_normalized(params, 1) == 1.0);
}

TEST_CASE("asymptotic speedup") {
  CHECK(perfplan::asymptotic_speedup(0.01) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(perfplan::asymptotic_speedup(0.5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::isinf(perfplan::asymptotic_speedup(0.0)));
  CHECK_THROWS_AS(perfplan::asymptotic_speedup(-0.01), std::domain_error);
}

TEST_CASE("optimal node count") {
  const auto params = cpmd_params();
  const auto n_star = perfplan::optimal_node_count(params);
  REQUIRE(n_star.has_value());
  CHECK(std::abs(*n_star - 113.9) < 0.5);

  // cross-check against grid maximization over N in [1, 1024]
  std::int64_t best_n = 1;
  double best = 0;
  for (std::int64_t n = 1; n <= 1024; ++n) {
    const double s = perfplan::extended_speedup(params, n);
    if (s > best) {
      best = s;
      best_n = n;
    }
  }
  CHECK(std::abs(static_cast<double>(best_n) - *n_star) <= 1.0);

  ScalingParams<double> no_comm;
  no_comm.serial_fraction = 0.5;
  no_comm.cores_per_node = 32;
  CHECK_FALSE(perfplan::optimal_node_count(no_comm).has_value());

  ScalingParams<double> boundary;
  boundary.serial_fraction = 0.0;
  boundary.comm_idle_fraction = 16.0;
  boundary.cores_per_node = 16;
  CHECK(*perfplan::optimal_node_count(boundary) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sample_curve") {
  SUBCASE("classical curve is monotone and approaches the asymptote") {
    ScalingParams<double> params;
    params.serial_fraction = 0.01;
    std::vector<std::int64_t> ns;
    for (std::int64_t n = 1; n <= 1024; n <<= 1) ns.push_back(n);
    const auto curve = perfplan::sample_curve(params, ns, SpeedupModel::kClassical);
    REQUIRE(curve.size() == ns.size());
    for (std::size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve[i].speedup >= curve[i - 1].speedup);
      CHECK(curve[i].speedup <= 100.0);
    }
    CHECK(curve.back().speedup > 90.0);
    CHECK_FALSE(curve.front().predicted_time_hours.has_value());
  }

  SUBCASE("fitted parameters reproduce the measured wall times") {
    const std::vector<std::int64_t> ns{1, 24, 96, 128};
    const auto curve = perfplan::sample_curve(cpmd_params(), ns, SpeedupModel::kExtended);
    const double expected[] = {89.3, 4.8, 2.53, 2.52};
    for (std::size_t i = 0; i < ns.size(); ++i) {
      REQUIRE(curve[i].predicted_time_hours.has_value());
      CHECK(*curve[i].predicted_time_hours ==
            doctest::Approx(expected[i]).epsilon(0.02));
    }
  }

  SUBCASE("single point and validation") {
    ScalingParams<double> params;
    params.serial_fraction = 0.2;
    const std::vector<std::int64_t> one{1};
    CHECK(perfplan::sample_curve(params, one).size() == 1);
    const std::vector<std::int64_t> empty;
    CHECK_THROWS_AS(perfplan::sample_curve(params, empty), std::domain_error);
    const std::vector<std::int64_t> bad{4, 0};
    CHECK_THROWS_AS(perfplan::sample_curve(params, bad), std::domain_error);
  }
}

TEST_CASE("array expressions agree with the scalar forms") {
  Eigen::ArrayXd n(5);
  n << 1, 3, 17, 120, 1024;
  const auto params = cpmd_params();

  const Eigen::ArrayXd classical = perfplan::amdahl_speedup(0.07, n);
  const Eigen::ArrayXd extended = perfplan::extended_speedup(params, n);
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    const auto ni = static_cast<std::int64_t>(n[i]);
    CHECK(classical[i] == doctest::Approx(perfplan::amdahl_speedup(0.07, ni)).epsilon(1e-15));
    CHECK(extended[i] ==
          doctest::Approx(perfplan::extended_speedup(params, ni)).epsilon(1e-15));
  }
}

TEST_CASE("property: classical speedup is nondecreasing and bounded") {
  SplitMix64 rng(0x5ca11a6);
  for (int trial = 0; trial < 2000; ++trial) {
    const double s = rng.next_unit();
    const auto n = static_cast<std::int64_t>(1 + rng.next() % 4096);
    const double here = perfplan::amdahl_speedup(s, n);
    const double next = perfplan::amdahl_speedup(s, n + 1);
    CHECK(here >= 1.0);
    CHECK(here <= next * (1.0 + 1e-12));
    CHECK(here <= perfplan::asymptotic_speedup(s));
  }
}

TEST_CASE("property: C=0 collapses the extended model to Amdahl") {
  SplitMix64 rng(0xc0ffee);
  for (int trial = 0; trial < 10000; ++trial) {
    ScalingParams<double> params;
    params.serial_fraction = rng.next_unit();
    params.comm_idle_fraction = 0.0;
    params.cores_per_node = static_cast<std::int64_t>(1 + rng.next() % 128);
    const auto n = static_cast<std::int64_t>(1 + rng.next() % 8192);
    const double extended = perfplan::extended_speedup(params, n);
    const double classical = perfplan::amdahl_speedup(params.serial_fraction, n);
    CHECK(std::abs(extended - classical) <= 1e-12 * classical);
  }
}

namespace {

// Draws params with a target optimum in [1.5, 300] so brute-force ranges stay
// small: C = (1-S) * Nc / N*^2 inverts the closed form.
perfplan::ScalingParams<double> random_extended_params(SplitMix64& rng) {
  ScalingParams<double> params;
  params.serial_fraction = rng.next_unit() * 0.5;
  params.cores_per_node = static_cast<std::int64_t>(1 + rng.next() % 64);
  const double target = 1.5 + rng.next_unit() * 298.5;
  params.comm_idle_fraction = (1.0 - params.serial_fraction) *
                              static_cast<double>(params.cores_per_node) / (target * target);
  return params;
}

}  // namespace

TEST_CASE("property: extended speedup is unimodal around the closed-form optimum") {
  SplitMix64 rng(0xdecade);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto params = random_extended_params(rng);
    const auto n_star = perfplan::optimal_node_count(params);
    REQUIRE(n_star.has_value());

    const auto floor_n = static_cast<std::int64_t>(std::floor(*n_star));
    const auto ceil_n = static_cast<std::int64_t>(std::ceil(*n_star));
    const double at_floor = perfplan::extended_speedup(params, std::max<std::int64_t>(floor_n, 1));
    const double at_ceil = perfplan::extended_speedup(params, std::max<std::int64_t>(ceil_n, 1));
    for (std::int64_t k = 1; k <= 16; ++k) {
      const std::int64_t below = std::max<std::int64_t>(floor_n - k, 1);
      CHECK(at_floor >= perfplan::extended_speedup(params, below) * (1.0 - 1e-12));
      CHECK(at_ceil >= perfplan::extended_speedup(params, ceil_n + k) * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("property: closed-form optimum agrees with brute-force argmax within 1") {
  SplitMix64 rng(0xa55e55);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto params = random_extended_params(rng);
    const auto n_star = perfplan::optimal_node_count(params);
    REQUIRE(n_star.has_value());

    const auto limit = static_cast<std::int64_t>(std::ceil(4.0 * *n_star));
    std::int64_t best_n = 1;
    double best = 0;
    for (std::int64_t n = 1; n <= limit; ++n) {
      const double s = perfplan::extended_speedup(params, n);
      if (s > best) {
        best = s;
        best_n = n;
      }
    }
    CHECK(std::abs(static_cast<double>(best_n) - *n_star) <= 1.0);
  }
}

TEST_CASE("property: baseline rescaling scales predicted times and nothing else") {
  SplitMix64 rng(0xbea7);
  std::vector<std::int64_t> ns{1, 2, 7, 24, 96, 512};
  for (int trial = 0; trial < 200; ++trial) {
    auto params = random_extended_params(rng);
    params.baseline_time_hours = 0.1 + rng.next_unit() * 100.0;
    const double lambda = 0.01 + rng.next_unit() * 50.0;

    auto scaled = params;
    *scaled.baseline_time_hours *= lambda;

    const auto base = perfplan::sample_curve(params, ns);
    const auto rescaled = perfplan::sample_curve(scaled, ns);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      CHECK(base[i].speedup == rescaled[i].speedup);  // exact: baseline never enters
      CHECK(*rescaled[i].predicted_time_hours ==
            doctest::Approx(*base[i].predicted_time_hours * lambda).epsilon(1e-12));
    }
  }
}

TEST_CASE("halving C moves the optimum by sqrt(2); halving S barely moves it") {
  const auto base = cpmd_params();
  auto less_comm = base;
  less_comm.comm_idle_fraction /= 2.0;
  auto less_serial = base;
  less_serial.serial_fraction /= 2.0;

  const double n_base = *perfplan::optimal_node_count(base);
  const double n_less_comm = *perfplan::optimal_node_count(less_comm);
  const double n_less_serial = *perfplan::optimal_node_count(less_serial);

  CHECK(n_less_comm == doctest::Approx(n_base * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(n_less_serial == doctest::Approx(n_base).epsilon(0.01));

  // the sampled curves peak where the closed form says they should
  std::vector<std::int64_t> ns;
  for (std::int64_t n = 1; n <= 512; ++n) ns.push_back(n);
  const auto peak_at = [&](const perfplan::ScalingParams<double>& params) {
    const auto curve = perfplan::sample_curve(params, ns);
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
      if (curve[i].speedup > curve[best].speedup) best = i;
    }
    return static_cast<double>(curve[best].n_units);
  };
  CHECK(std::abs(peak_at(base) - n_base) <= 1.0);
  CHECK(std::abs(peak_at(less_comm) - n_less_comm) <= 1.0);
}

TEST_CASE("scalar-templated instantiation") {
  ScalingParams<float> params;
  params.serial_fraction = 0.25F;
  params.comm_idle_fraction = 0.0F;
  params.cores_per_node = 4;
  CHECK(perfplan::extended_speedup(params, 4) == doctest::Approx(2.2857143F).epsilon(1e-6));
}

TEST_CASE("parameter validation") {
  ScalingParams<double> params;
  params.serial_fraction = 0.5;
  params.comm_idle_fraction = -0.1;
  CHECK_THROWS_AS(params.validate(), std::domain_error);
  params.comm_idle_fraction = 0.1;
  params.cores_per_node = 0;
  CHECK_THROWS_AS(params.validate(), std::domain_error);
  params.cores_per_node = 8;
  params.baseline_time_hours = 0.0;
  CHECK_THROWS_AS(params.validate(), std::domain_error);
  params.baseline_time_hours = 10.0;
  CHECK_NOTHROW(params.validate());
}
