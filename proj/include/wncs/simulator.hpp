#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wncs/estimation.hpp"
#include "wncs/metrics.hpp"
#include "wncs/scenario.hpp"
#include "wncs/synthesis.hpp"

namespace wncs {

struct TraceRow {
  long k;
  int loop;
  long t_since;       // slots since last delivery, after this slot's outcome
  double metric;      // scheduler metric (0 for the non-metric baselines)
  int channel;        // assigned channel, -1 if not scheduled
  bool received;
  double stage_cost;  // x'Qx + u'Ru at this slot
};

struct Trace {
  long horizon = 0;
  int num_loops = 0;
  std::vector<TraceRow> rows;
};

struct LoopEpisodeStats {
  double aaoi = 0.0;
  std::optional<double> paoi;
  long receptions = 0;
  double avg_stage_cost = 0.0;
};

struct EpisodeSummary {
  double avg_cost = 0.0;  // mean over slots of summed per-loop stage costs
  bool diverged = false;
  long diverged_at = -1;
  std::vector<LoopEpisodeStats> per_loop;
};

struct EpisodeResult {
  Trace trace;
  EpisodeSummary summary;
};

// State norm beyond which a run is declared diverged and cut short.
inline constexpr double kDivergenceNorm = 1e12;

/**
 * Simulate one episode under scenario.policy. Slot order: measurements,
 * filter updates, scheduling, channel draws, controller update, control and
 * cost, then plant/filter time updates. run_index selects the noise
 * substreams, so run r sees the same disturbances under every policy.
 */
EpisodeResult run_episode(const Scenario& scenario,
                          const std::vector<LoopSynthesis>& synths,
                          long run_index = 0);

// Mean of stage costs per slot (summed across loops). Throws EmptyTrace.
double empirical_cost(const Trace& trace);

struct PolicyStats {
  Policy policy = Policy::kCoil;
  double mean_cost = 0.0;
  double std_cost = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  int diverged_runs = 0;
  int used_runs = 0;
  std::vector<double> aaoi;                 // per loop, mean over used runs
  std::vector<std::optional<double>> paoi;  // per loop; empty if never any
};

struct ComparisonReport {
  int runs = 0;
  std::vector<PolicyStats> policies;
};

/**
 * Same scenario under several policies, `runs` independent replications
 * with common random numbers. Diverged runs are dropped from the statistics
 * and counted. CI is the normal-approximation 95% interval of the mean.
 */
ComparisonReport monte_carlo_compare(const Scenario& scenario,
                                     const std::vector<Policy>& policies,
                                     int runs);

// Serialization of the artifacts. Writers go through a temp file + rename.
std::string trace_to_csv(const Trace& trace);
nlohmann::json summary_to_json(Policy policy, const EpisodeResult& result);
nlohmann::json comparison_to_json(const ComparisonReport& report);
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace wncs
