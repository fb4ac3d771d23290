#include <doctest.h>

#include <vector>

#include "wncs/errors.hpp"
#include "wncs/scheduling.hpp"
#include "test_util.hpp"

using namespace wncs;

namespace {

Mat from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = static_cast<Eigen::Index>(rows.begin()->size());
  Mat m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (const double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Weight matrix with entries drawn from a small value set about half the
// time, which makes exact ties common.
Mat random_weights(Rng& rng, Eigen::Index n, Eigen::Index m) {
  Mat w(n, m);
  const bool discrete = rng.bernoulli(0.5);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (discrete) {
        constexpr double levels[] = {0.0, 0.25, 0.5, 1.0};
        w(i, j) = levels[rng.below(4)];
      } else {
        w(i, j) = rng.uniform();
      }
    }
  }
  return w;
}

}  // namespace

TEST_SUITE("scheduling") {

TEST_CASE("feasibility checks row and column sums") {
  Eigen::MatrixXi ok(2, 2);
  ok << 1, 0, 0, 1;
  CHECK(is_feasible(ok));

  Eigen::MatrixXi collision(2, 2);
  collision << 1, 0, 1, 0;
  CHECK(!is_feasible(collision));

  CHECK(is_feasible(Eigen::MatrixXi::Zero(3, 2)));

  Eigen::MatrixXi doubled(1, 2);
  doubled << 1, 1;
  CHECK(!is_feasible(doubled));
}

TEST_CASE("max weight picks the better matching") {
  const ScheduleDecision d = assign_max_weight(from_rows({{5, 1}, {4, 2}}));
  CHECK(d.channel_of_loop == std::vector<int>{0, 1});
  CHECK(decision_value(d, from_rows({{5, 1}, {4, 2}})) == 7.0);
}

TEST_CASE("single channel goes to the largest metric") {
  const ScheduleDecision d = assign_max_weight(from_rows({{3}, {7}, {2}}));
  CHECK(d.channel_of_loop == std::vector<int>{-1, 0, -1});
}

TEST_CASE("ties resolve to the lexicographically smallest matching") {
  const ScheduleDecision square = assign_max_weight(Mat::Ones(3, 3));
  CHECK(square.channel_of_loop == std::vector<int>{0, 1, 2});

  const ScheduleDecision wide = assign_max_weight(Mat::Ones(2, 3));
  CHECK(wide.channel_of_loop == std::vector<int>{0, 1});

  const ScheduleDecision tall = assign_max_weight(Mat::Ones(3, 2));
  CHECK(tall.channel_of_loop == std::vector<int>{0, 1, -1});
}

TEST_CASE("zero weights still fill the matching") {
  const ScheduleDecision d = assign_max_weight(Mat::Zero(2, 2));
  CHECK(d.channel_of_loop == std::vector<int>{0, 1});
}

TEST_CASE("brute force agrees on the worked examples") {
  const Mat m = from_rows({{5, 1}, {4, 2}});
  const ScheduleDecision d = brute_force_schedule(m);
  CHECK(d.channel_of_loop == std::vector<int>{0, 1});

  const ScheduleDecision lone = brute_force_schedule(from_rows({{0.3}}));
  CHECK(lone.channel_of_loop == std::vector<int>{0});

  const ScheduleDecision dom =
      brute_force_schedule(from_rows({{0.1, 9.0}, {0.2, 0.3}}));
  CHECK(dom.channel_of_loop == std::vector<int>{1, 0});

  CHECK_THROWS_AS(brute_force_schedule(Mat::Ones(5, 2)), TooLarge);
  CHECK_THROWS_AS(brute_force_schedule(Mat::Ones(2, 5)), TooLarge);
}

TEST_CASE("solver matches exhaustive search on 500 random instances") {
  Rng rng(5150);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(4));
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.below(4));
    const Mat w = random_weights(rng, n, m);
    const ScheduleDecision fast = assign_max_weight(w);
    const ScheduleDecision slow = brute_force_schedule(w);
    CHECK(decision_value(fast, w) == decision_value(slow, w));
    CHECK(fast.channel_of_loop == slow.channel_of_loop);
    CHECK(is_feasible(fast.delta()));
  }
}

TEST_CASE("argmax is invariant to positive scaling") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(4));
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.below(4));
    const Mat w = random_weights(rng, n, m);
    const ScheduleDecision base = assign_max_weight(w);
    for (const double c : {0.5, 3.7}) {
      const ScheduleDecision scaled = assign_max_weight(c * w);
      CHECK(scaled.channel_of_loop == base.channel_of_loop);
    }
  }
}

TEST_CASE("round robin cycles through the loops") {
  Rng rng(0);
  std::vector<int> first_served;
  for (long k = 0; k < 4; ++k) {
    const ScheduleDecision d = assign_baseline(Policy::kRoundRobin, k, 3, 1, rng);
    for (int i = 0; i < 3; ++i) {
      if (d.channel_of_loop[static_cast<std::size_t>(i)] == 0) {
        first_served.push_back(i);
      }
    }
  }
  CHECK(first_served == std::vector<int>{0, 1, 2, 0});
}

TEST_CASE("round robin skips duplicate loops within a slot") {
  Rng rng(0);
  // N = 2, M = 3 at k = 0: channel 2 would revisit loop 0, so it stays idle.
  const ScheduleDecision d = assign_baseline(Policy::kRoundRobin, 0, 2, 3, rng);
  CHECK(d.channel_of_loop == std::vector<int>{0, 1});
  CHECK(is_feasible(d.delta()));
}

TEST_CASE("always maps loop i to channel i or refuses") {
  Rng rng(0);
  const ScheduleDecision d = assign_baseline(Policy::kAlways, 5, 2, 2, rng);
  CHECK(d.channel_of_loop == std::vector<int>{0, 1});
  CHECK_THROWS_AS(assign_baseline(Policy::kAlways, 0, 3, 1, rng),
                  InfeasibleAlways);
}

TEST_CASE("random policy is feasible, full, and seed-deterministic") {
  Rng a(33), b(33);
  for (long k = 0; k < 50; ++k) {
    const ScheduleDecision da = assign_baseline(Policy::kRandom, k, 3, 2, a);
    const ScheduleDecision db = assign_baseline(Policy::kRandom, k, 3, 2, b);
    CHECK(da.channel_of_loop == db.channel_of_loop);
    CHECK(is_feasible(da.delta()));
    int scheduled = 0;
    for (const int c : da.channel_of_loop) scheduled += c >= 0 ? 1 : 0;
    CHECK(scheduled == 2);  // min(N, M) picks, transmissions are free
  }
}

TEST_CASE("random policy consumes two draws per pick") {
  Rng used(97), reference(97);
  assign_baseline(Policy::kRandom, 0, 3, 2, used);  // min(N, M) = 2 picks
  for (int i = 0; i < 4; ++i) reference.next_u64();
  CHECK(used.next_u64() == reference.next_u64());
}

TEST_CASE("random policy serves loops roughly uniformly") {
  Rng rng(2718);
  std::vector<long> hits(3, 0);
  const long slots = 30000;
  for (long k = 0; k < slots; ++k) {
    const ScheduleDecision d = assign_baseline(Policy::kRandom, k, 3, 1, rng);
    for (int i = 0; i < 3; ++i) {
      if (d.channel_of_loop[static_cast<std::size_t>(i)] >= 0) {
        hits[static_cast<std::size_t>(i)] += 1;
      }
    }
  }
  for (const long h : hits) {
    const double freq = static_cast<double>(h) / static_cast<double>(slots);
    CHECK(std::abs(freq - 1.0 / 3.0) <= 0.02);
  }
}

TEST_CASE("metric policies are rejected as baselines") {
  Rng rng(0);
  CHECK_THROWS_AS(assign_baseline(Policy::kCoil, 0, 2, 2, rng), DomainError);
}

}  // TEST_SUITE
