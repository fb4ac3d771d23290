#include "wncs/scheduling.hpp"

#include <algorithm>
#include <limits>

namespace wncs {
namespace {

// Absolute/relative slack when classifying two matchings' totals as tied.
constexpr double kTieTol = 1e-12;

constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * Square assignment by shortest augmenting paths with dual potentials
 * (Jonker-Volgenant). Minimizes, so callers negate for max weight.
 * cost is s x s; returns col_of_row.
 */
std::vector<int> solve_square_min(const Mat& cost) {
  const int s = static_cast<int>(cost.rows());
  std::vector<double> u(s + 1, 0.0), v(s + 1, 0.0);
  std::vector<int> row_of_col(s + 1, 0);  // 1-based; 0 = unassigned marker
  std::vector<int> way(s + 1, 0);
  for (int i = 1; i <= s; ++i) {
    row_of_col[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(s + 1, kInf);
    std::vector<bool> used(s + 1, false);
    do {
      used[j0] = true;
      const int i0 = row_of_col[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= s; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= s; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const int j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_of_row(s, -1);
  for (int j = 1; j <= s; ++j) col_of_row[row_of_col[j] - 1] = j - 1;
  return col_of_row;
}

/**
 * Best achievable total over real cells when the rows/cols in `taken` are
 * already spoken for. Pads the free block to a square with zeros; pad
 * assignments contribute nothing and are dropped.
 */
double best_completion(const Mat& weights, const std::vector<bool>& row_taken,
                       const std::vector<bool>& col_taken) {
  const int n = static_cast<int>(weights.rows());
  const int m = static_cast<int>(weights.cols());
  std::vector<int> rows, cols;
  for (int i = 0; i < n; ++i)
    if (!row_taken[i]) rows.push_back(i);
  for (int j = 0; j < m; ++j)
    if (!col_taken[j]) cols.push_back(j);
  if (rows.empty() || cols.empty()) return 0.0;
  const int s = static_cast<int>(std::max(rows.size(), cols.size()));
  Mat cost = Mat::Zero(s, s);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          -weights(rows[r], cols[c]);
  const std::vector<int> col_of_row = solve_square_min(cost);
  double total = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int c = col_of_row[r];
    if (c >= 0 && c < static_cast<int>(cols.size())) {
      total += weights(rows[r], cols[c]);
    }
  }
  return total;
}

void check_weights(const Mat& weights) {
  if (weights.rows() < 1 || weights.cols() < 1) {
    throw DimensionError("scheduling: weight matrix must be non-empty");
  }
  if (!weights.allFinite()) {
    throw DomainError("scheduling: weights must be finite");
  }
}

// Lexicographic order used for ties: scanning rows, prefer the matching
// whose assignment in the first differing row uses the smaller channel
// (none counts as largest).
bool lex_before(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    const unsigned ja = a[i] < 0 ? std::numeric_limits<unsigned>::max()
                                 : static_cast<unsigned>(a[i]);
    const unsigned jb = b[i] < 0 ? std::numeric_limits<unsigned>::max()
                                 : static_cast<unsigned>(b[i]);
    return ja < jb;
  }
  return false;
}

}  // namespace

Eigen::MatrixXi ScheduleDecision::delta() const {
  Eigen::MatrixXi d = Eigen::MatrixXi::Zero(
      static_cast<Eigen::Index>(channel_of_loop.size()), num_channels);
  for (std::size_t i = 0; i < channel_of_loop.size(); ++i) {
    if (channel_of_loop[i] >= 0) {
      d(static_cast<Eigen::Index>(i), channel_of_loop[i]) = 1;
    }
  }
  return d;
}

bool is_feasible(const Eigen::MatrixXi& delta) {
  for (Eigen::Index i = 0; i < delta.rows(); ++i) {
    for (Eigen::Index j = 0; j < delta.cols(); ++j) {
      if (delta(i, j) != 0 && delta(i, j) != 1) return false;
    }
  }
  for (Eigen::Index i = 0; i < delta.rows(); ++i) {
    if (delta.row(i).sum() > 1) return false;
  }
  for (Eigen::Index j = 0; j < delta.cols(); ++j) {
    if (delta.col(j).sum() > 1) return false;
  }
  return true;
}

double decision_value(const ScheduleDecision& decision, const Mat& weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < decision.channel_of_loop.size(); ++i) {
    const int j = decision.channel_of_loop[i];
    if (j >= 0) total += weights(static_cast<Eigen::Index>(i), j);
  }
  return total;
}

ScheduleDecision assign_max_weight(const Mat& weights) {
  check_weights(weights);
  const int n = static_cast<int>(weights.rows());
  const int m = static_cast<int>(weights.cols());

  std::vector<bool> row_taken(n, false), col_taken(m, false);
  const double opt = best_completion(weights, row_taken, col_taken);
  const double slack = kTieTol * std::max(1.0, std::abs(opt));

  // Fix cells one at a time, earliest (row-major) first, keeping each only
  // if the optimum stays reachable. This pins the tie-break exactly instead
  // of leaving it to the solver's internal traversal order.
  ScheduleDecision decision;
  decision.channel_of_loop.assign(n, -1);
  decision.num_channels = m;
  double committed = 0.0;
  for (int i = 0; i < n; ++i) {
    if (row_taken[i]) continue;
    for (int j = 0; j < m; ++j) {
      if (col_taken[j]) continue;
      row_taken[i] = true;
      col_taken[j] = true;
      const double with_cell = committed + weights(i, j) +
                               best_completion(weights, row_taken, col_taken);
      if (with_cell >= opt - slack) {
        decision.channel_of_loop[i] = j;
        committed += weights(i, j);
        break;
      }
      row_taken[i] = false;
      col_taken[j] = false;
    }
  }
  return decision;
}

ScheduleDecision brute_force_schedule(const Mat& weights) {
  check_weights(weights);
  const int n = static_cast<int>(weights.rows());
  const int m = static_cast<int>(weights.cols());
  if (n > 4 || m > 4) {
    throw TooLarge("brute_force_schedule: supports at most 4x4");
  }

  std::vector<int> current(n, -1), best(n, -1);
  std::vector<bool> col_taken(m, false);
  double best_value = -kInf;
  bool have_best = false;

  // Depth-first over rows; each row takes a free column or stays silent.
  auto recurse = [&](auto&& self, int row) -> void {
    if (row == n) {
      double value = 0.0;
      for (int i = 0; i < n; ++i) {
        if (current[i] >= 0) value += weights(i, current[i]);
      }
      const double slack = kTieTol * std::max(1.0, std::abs(best_value));
      if (!have_best || value > best_value + slack) {
        best = current;
        best_value = value;
        have_best = true;
      } else if (value >= best_value - slack && lex_before(current, best)) {
        best = current;
        best_value = std::max(best_value, value);
      }
      return;
    }
    for (int j = 0; j < m; ++j) {
      if (col_taken[j]) continue;
      col_taken[j] = true;
      current[row] = j;
      self(self, row + 1);
      current[row] = -1;
      col_taken[j] = false;
    }
    self(self, row + 1);
  };
  recurse(recurse, 0);

  ScheduleDecision decision;
  decision.channel_of_loop = best;
  decision.num_channels = m;
  return decision;
}

ScheduleDecision assign_baseline(Policy policy, long k, int num_loops,
                                 int num_channels, Rng& rng) {
  if (num_loops < 1 || num_channels < 1) {
    throw DimensionError("assign_baseline: needs loops and channels");
  }
  ScheduleDecision decision;
  decision.channel_of_loop.assign(static_cast<std::size_t>(num_loops), -1);
  decision.num_channels = num_channels;

  switch (policy) {
    case Policy::kRoundRobin: {
      for (int j = 0; j < num_channels; ++j) {
        const int i = static_cast<int>(
            (k * num_channels + j) % num_loops);
        if (decision.channel_of_loop[i] < 0) {
          decision.channel_of_loop[i] = j;
        }
      }
      return decision;
    }
    case Policy::kRandom: {
      const int picks = std::min(num_loops, num_channels);
      std::vector<int> loops(num_loops), channels(num_channels);
      for (int i = 0; i < num_loops; ++i) loops[i] = i;
      for (int j = 0; j < num_channels; ++j) channels[j] = j;
      for (int t = 0; t < picks; ++t) {
        const int pick_l =
            t + static_cast<int>(rng.below(static_cast<std::uint64_t>(
                    num_loops - t)));
        std::swap(loops[t], loops[pick_l]);
        const int pick_c =
            t + static_cast<int>(rng.below(static_cast<std::uint64_t>(
                    num_channels - t)));
        std::swap(channels[t], channels[pick_c]);
        decision.channel_of_loop[loops[t]] = channels[t];
      }
      return decision;
    }
    case Policy::kAlways: {
      if (num_channels < num_loops) {
        throw InfeasibleAlways(
            "always policy needs at least as many channels as loops");
      }
      for (int i = 0; i < num_loops; ++i) decision.channel_of_loop[i] = i;
      return decision;
    }
    default:
      throw DomainError("assign_baseline: not a baseline policy");
  }
}

}  // namespace wncs
