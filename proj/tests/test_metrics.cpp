#include <doctest.h>

#include <cmath>

#include "wncs/errors.hpp"
#include "wncs/metrics.hpp"
#include "test_util.hpp"

using namespace wncs;

namespace {

// Stationary synthesis of the golden loop with a perfect sensor: the cost
// weight is one and the posterior covariance collapses, so CoIL counts
// accumulated process noise directly.
LoopSynthesis perfect_sensor_golden() {
  LoopSynthesis syn;
  syn.Pi_inf = Mat::Constant(1, 1, testutil::kGoldenPi);
  syn.L_inf = Mat::Constant(1, 1, -1.0 / testutil::kGoldenPi);
  syn.Gamma_inf = Mat::Identity(1, 1);
  syn.P_bar = Mat::Zero(1, 1);
  syn.K_gain = Mat::Identity(1, 1);
  return syn;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("coil counts accumulated process noise") {
  const LoopSpec loop = testutil::scalar_loop(1, 1, 1, 1, 0, 1, 1);
  const LoopSynthesis syn = perfect_sensor_golden();
  CHECK(coil(syn, 0, loop) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(coil(syn, 1, loop) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(coil(syn, -1, loop), DomainError);
}

TEST_CASE("zero cost weight kills coil") {
  const LoopSpec loop = testutil::scalar_loop(0.5, 0, 1, 1, 1, 1, 1);
  LoopSynthesis syn = synthesize_loop(loop);
  CHECK(syn.Gamma_inf(0, 0) == 0.0);  // L_inf = 0 when B = 0
  for (long t = 0; t <= 5; ++t) CHECK(coil(syn, t, loop) == 0.0);
}

TEST_CASE("coil is nonnegative and monotone on random loops") {
  Rng rng(608);
  for (int trial = 0; trial < 50; ++trial) {
    const LoopSpec loop = testutil::random_loop(rng, 3);
    const LoopSynthesis syn = synthesize_loop(loop);
    double prev = 0.0;
    for (long t = 0; t <= 20; ++t) {
      const double value = coil(syn, t, loop);
      CHECK(value >= -1e-9);
      CHECK(value >= prev - 1e-9 * (1.0 + std::abs(value)));
      prev = value;
    }
  }
}

TEST_CASE("voi is the quadratic form of the accumulator") {
  LoopSynthesis syn;
  syn.Gamma_inf = Mat::Constant(1, 1, 2.0);
  CHECK(voi(syn, Vec::Zero(1)) == 0.0);
  CHECK(voi(syn, Vec::Constant(1, 3.0)) == 18.0);

  LoopSynthesis diag;
  diag.Gamma_inf = Mat::Zero(2, 2);
  diag.Gamma_inf(0, 0) = 1.0;
  Vec e(2);
  e << 0.0, 7.0;
  CHECK(voi(diag, e) == 0.0);  // error in the cost-null direction
}

TEST_CASE("voi is nonnegative under random psd weights") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(4));
    LoopSynthesis syn;
    syn.Gamma_inf = testutil::random_psd(rng, n);
    const Vec e = testutil::random_matrix(rng, n, 1, 2.0);
    CHECK(voi(syn, e) >= -1e-12);
  }
}

TEST_CASE("aoi update follows the sawtooth") {
  AoiTracker tracker;
  tracker.age = 5;
  aoi_update(tracker, true);
  CHECK(tracker.age == 0);
  CHECK(tracker.peaks == std::vector<long>{5});
  aoi_update(tracker, false);
  CHECK(tracker.age == 1);

  AoiTracker cold;
  for (int k = 0; k < 8; ++k) aoi_update(cold, k % 4 == 0);
  CHECK(cold.ages_trace == std::vector<long>{0, 1, 2, 3, 0, 1, 2, 3});
}

TEST_CASE("aoi summary on canonical patterns") {
  AoiTracker period4;
  for (int k = 0; k < 4000; ++k) aoi_update(period4, k % 4 == 3);
  const AoiStats stats = aoi_summary(period4);
  CHECK(stats.aaoi == 1.5);
  REQUIRE(stats.paoi.has_value());
  CHECK(*stats.paoi == 3.0);

  AoiTracker always;
  for (int k = 0; k < 10; ++k) aoi_update(always, true);
  const AoiStats astats = aoi_summary(always);
  CHECK(astats.aaoi == 0.0);
  CHECK(*astats.paoi == 0.0);

  AoiTracker never;
  for (int k = 0; k < 4; ++k) aoi_update(never, false);
  const AoiStats nstats = aoi_summary(never);
  CHECK(nstats.aaoi == 2.5);
  CHECK(!nstats.paoi.has_value());

  CHECK_THROWS_AS(aoi_summary(AoiTracker{}), EmptyTrace);
}

TEST_CASE("aaoi equals the sawtooth area decomposition") {
  // Oracle: reconstruct each slot's age from reception times alone,
  // age(k) = k - last_reception (cold start acts like a reception at slot
  // -1), and accumulate in integers. No shared code with the tracker.
  for (const double p : {0.1, 0.3, 0.7}) {
    Rng rng(static_cast<std::uint64_t>(p * 1000));
    AoiTracker tracker;
    long last_rx = -1;
    long long area = 0;
    const long slots = 10000;
    for (long k = 0; k < slots; ++k) {
      const bool rx = rng.bernoulli(p);
      aoi_update(tracker, rx);
      if (rx) last_rx = k;
      area += k - last_rx;
    }
    const AoiStats stats = aoi_summary(tracker);
    const double oracle =
        static_cast<double>(area) / static_cast<double>(slots);
    CHECK(std::abs(stats.aaoi - oracle) <= 1e-12);
  }
}

TEST_CASE("priority matrix scales metrics by link quality") {
  Vec metric(2);
  metric << 1.0, 2.0;
  Mat q(2, 2);
  q << 1.0, 0.5, 0.2, 1.0;
  const Mat m = priority_matrix(metric, q);
  Mat expected(2, 2);
  expected << 1.0, 0.5, 0.4, 2.0;
  CHECK((m - expected).norm() == 0.0);

  const Mat ones = priority_matrix(metric, Mat::Ones(2, 3));
  CHECK(ones.col(0) == ones.col(1));
  CHECK(ones.col(1) == ones.col(2));

  CHECK(priority_matrix(Vec::Zero(2), q).isZero(0.0));
  CHECK_THROWS_AS(priority_matrix(Vec::Zero(3), q), DimensionError);
}

}  // TEST_SUITE
