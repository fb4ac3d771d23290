#include "wncs/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "wncs/channel.hpp"
#include "wncs/rng.hpp"
#include "wncs/scheduling.hpp"

namespace wncs {
namespace {

constexpr double kCi95 = 1.959963984540054;  // standard normal 97.5% quantile

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct LoopRuntime {
  Vec x;
  SensorFilterState sensor;
  ControllerState ctrl;
  AoiTracker aoi;
  Mat stale_cov;  // h^(t_since + 1)(P_bar), kept in step with t_since
  Mat w_factor, v_factor;
  Rng proc_rng{0}, meas_rng{0};
  long receptions = 0;
  double cost_sum = 0.0;
};

}  // namespace

EpisodeResult run_episode(const Scenario& scenario,
                          const std::vector<LoopSynthesis>& synths,
                          long run_index) {
  const int n_loops = scenario.num_loops();
  if (static_cast<int>(synths.size()) != n_loops) {
    throw DimensionError("run_episode: one synthesis per loop required");
  }
  const int n_channels = scenario.num_channels;
  const Mat& q_bar = scenario.success_prob;
  const Policy policy = scenario.policy;

  std::vector<LoopRuntime> loops(static_cast<std::size_t>(n_loops));
  for (int i = 0; i < n_loops; ++i) {
    const LoopSpec& spec = scenario.loops[static_cast<std::size_t>(i)];
    LoopRuntime& rt = loops[static_cast<std::size_t>(i)];
    rt.proc_rng = Rng(derive_seed(scenario.seed,
                                  static_cast<std::uint64_t>(run_index),
                                  static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(
                                      StreamKind::kProcessNoise)));
    rt.meas_rng = Rng(derive_seed(scenario.seed,
                                  static_cast<std::uint64_t>(run_index),
                                  static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(
                                      StreamKind::kMeasurementNoise)));
    rt.w_factor = psd_sqrt(spec.W);
    rt.v_factor = psd_sqrt(spec.V);
    const Mat x0_factor = psd_sqrt(spec.x0_cov);
    rt.x = spec.x0_mean + x0_factor * rt.proc_rng.gaussian_vector(spec.state_dim());
    rt.sensor = make_sensor_state(spec);
    rt.ctrl = make_controller_state(spec);
    rt.stale_cov = cov_predict(synths[static_cast<std::size_t>(i)].P_bar,
                               spec.A, spec.W);
  }
  Rng chan_rng(derive_seed(scenario.seed,
                           static_cast<std::uint64_t>(run_index), 0,
                           static_cast<std::uint64_t>(StreamKind::kChannel)));
  Rng policy_rng(derive_seed(scenario.seed,
                             static_cast<std::uint64_t>(run_index), 0,
                             static_cast<std::uint64_t>(StreamKind::kPolicy)));

  EpisodeResult result;
  result.trace.horizon = scenario.horizon;
  result.trace.num_loops = n_loops;
  result.trace.rows.reserve(
      static_cast<std::size_t>(scenario.horizon * n_loops));

  Vec metric = Vec::Zero(n_loops);
  long slots_done = 0;
  for (long k = 0; k < scenario.horizon; ++k) {
    // Measurements and filter updates.
    for (int i = 0; i < n_loops; ++i) {
      const LoopSpec& spec = scenario.loops[static_cast<std::size_t>(i)];
      LoopRuntime& rt = loops[static_cast<std::size_t>(i)];
      const Vec y = spec.C * rt.x +
                    rt.v_factor * rt.meas_rng.gaussian_vector(spec.output_dim());
      sensor_measurement_update(rt.sensor, y,
                                spec, synths[static_cast<std::size_t>(i)]);
    }

    // Scheduling metric and decision.
    ScheduleDecision decision;
    switch (policy) {
      case Policy::kCoil:
      case Policy::kVoi:
      case Policy::kAoi: {
        for (int i = 0; i < n_loops; ++i) {
          const LoopRuntime& rt = loops[static_cast<std::size_t>(i)];
          const LoopSynthesis& syn = synths[static_cast<std::size_t>(i)];
          if (policy == Policy::kCoil) {
            metric(i) = (syn.Gamma_inf * (rt.stale_cov - syn.P_bar)).trace();
          } else if (policy == Policy::kVoi) {
            metric(i) = voi(syn, rt.sensor.e_check);
          } else {
            metric(i) = static_cast<double>(rt.ctrl.t_since + 1);
          }
        }
        const bool weight_by_q =
            policy != Policy::kVoi || scenario.voi_use_qbar;
        const Mat weights =
            weight_by_q
                ? priority_matrix(metric, q_bar)
                : priority_matrix(metric, Mat::Ones(n_loops, n_channels));
        decision = assign_max_weight(weights);
        break;
      }
      default:
        metric.setZero();
        decision =
            assign_baseline(policy, k, n_loops, n_channels, policy_rng);
        break;
    }
    if (!is_feasible(decision.delta())) {
      throw NumericalError("run_episode: scheduler produced infeasible slot");
    }

    // Channel draws.
    const ChannelOutcome outcome = realize(decision, q_bar, chan_rng);

    // Controller updates, control, cost, then time updates.
    bool blew_up = false;
    for (int i = 0; i < n_loops; ++i) {
      const LoopSpec& spec = scenario.loops[static_cast<std::size_t>(i)];
      const LoopSynthesis& syn = synths[static_cast<std::size_t>(i)];
      LoopRuntime& rt = loops[static_cast<std::size_t>(i)];
      const bool got = outcome.delivered[static_cast<std::size_t>(i)];
      if (got) {
        controller_on_receive(rt.ctrl, rt.sensor.x_post);
        reset_innovation(rt.sensor);
        rt.stale_cov = cov_predict(syn.P_bar, spec.A, spec.W);
        rt.receptions += 1;
      } else {
        controller_miss(rt.ctrl, spec, syn);
        rt.stale_cov = cov_predict(rt.stale_cov, spec.A, spec.W);
      }
      aoi_update(rt.aoi, got);

      const Vec u = syn.L_inf * rt.ctrl.x_hat;
      const double stage =
          rt.x.dot(spec.Q * rt.x) + u.dot(spec.R * u);
      rt.cost_sum += stage;
      result.trace.rows.push_back(
          {k, i, rt.ctrl.t_since, metric(i),
           decision.channel_of_loop[static_cast<std::size_t>(i)], got, stage});

      rt.x = spec.A * rt.x + spec.B * u +
             rt.w_factor * rt.proc_rng.gaussian_vector(spec.state_dim());
      sensor_time_update(rt.sensor, u, spec);
      if (rt.x.norm() > kDivergenceNorm) blew_up = true;
    }
    slots_done = k + 1;
    if (blew_up) {
      result.summary.diverged = true;
      result.summary.diverged_at = k;
      break;
    }
  }

  double total_cost = 0.0;
  result.summary.per_loop.resize(static_cast<std::size_t>(n_loops));
  for (int i = 0; i < n_loops; ++i) {
    LoopRuntime& rt = loops[static_cast<std::size_t>(i)];
    LoopEpisodeStats& stats = result.summary.per_loop[static_cast<std::size_t>(i)];
    const AoiStats aoi = aoi_summary(rt.aoi);
    stats.aaoi = aoi.aaoi;
    stats.paoi = aoi.paoi;
    stats.receptions = rt.receptions;
    stats.avg_stage_cost = rt.cost_sum / static_cast<double>(slots_done);
    total_cost += rt.cost_sum;
  }
  result.summary.avg_cost = total_cost / static_cast<double>(slots_done);
  return result;
}

double empirical_cost(const Trace& trace) {
  if (trace.rows.empty()) {
    throw EmptyTrace("empirical_cost: trace has no rows");
  }
  double total = 0.0;
  for (const TraceRow& row : trace.rows) total += row.stage_cost;
  const double slots = static_cast<double>(trace.rows.size()) /
                       static_cast<double>(trace.num_loops);
  return total / slots;
}

ComparisonReport monte_carlo_compare(const Scenario& scenario,
                                     const std::vector<Policy>& policies,
                                     int runs) {
  if (runs < 1) {
    throw DomainError("monte_carlo_compare: runs must be positive");
  }
  if (policies.empty()) {
    throw DomainError("monte_carlo_compare: needs at least one policy");
  }
  std::vector<LoopSynthesis> synths;
  synths.reserve(scenario.loops.size());
  for (const LoopSpec& loop : scenario.loops) {
    synths.push_back(synthesize_loop(loop));
  }

  ComparisonReport report;
  report.runs = runs;
  const int n_loops = scenario.num_loops();
  for (const Policy policy : policies) {
    Scenario variant = scenario;
    variant.policy = policy;

    PolicyStats stats;
    stats.policy = policy;
    std::vector<double> costs;
    std::vector<double> aaoi_sum(static_cast<std::size_t>(n_loops), 0.0);
    std::vector<double> paoi_sum(static_cast<std::size_t>(n_loops), 0.0);
    std::vector<long> paoi_count(static_cast<std::size_t>(n_loops), 0);
    for (int r = 0; r < runs; ++r) {
      const EpisodeResult result = run_episode(variant, synths, r);
      if (result.summary.diverged) {
        stats.diverged_runs += 1;
        continue;
      }
      costs.push_back(result.summary.avg_cost);
      for (int i = 0; i < n_loops; ++i) {
        const LoopEpisodeStats& ls =
            result.summary.per_loop[static_cast<std::size_t>(i)];
        aaoi_sum[static_cast<std::size_t>(i)] += ls.aaoi;
        if (ls.paoi) {
          paoi_sum[static_cast<std::size_t>(i)] += *ls.paoi;
          paoi_count[static_cast<std::size_t>(i)] += 1;
        }
      }
    }

    stats.used_runs = static_cast<int>(costs.size());
    if (!costs.empty()) {
      const double n = static_cast<double>(costs.size());
      double mean = 0.0;
      for (const double c : costs) mean += c;
      mean /= n;
      double var = 0.0;
      for (const double c : costs) var += (c - mean) * (c - mean);
      const double sd = costs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      const double half = kCi95 * sd / std::sqrt(n);
      stats.mean_cost = mean;
      stats.std_cost = sd;
      stats.ci95_lo = mean - half;
      stats.ci95_hi = mean + half;
      for (int i = 0; i < n_loops; ++i) {
        stats.aaoi.push_back(aaoi_sum[static_cast<std::size_t>(i)] / n);
        if (paoi_count[static_cast<std::size_t>(i)] > 0) {
          stats.paoi.push_back(paoi_sum[static_cast<std::size_t>(i)] /
                               static_cast<double>(
                                   paoi_count[static_cast<std::size_t>(i)]));
        } else {
          stats.paoi.push_back(std::nullopt);
        }
      }
    } else {
      stats.mean_cost = std::nan("");
      stats.std_cost = std::nan("");
      stats.ci95_lo = std::nan("");
      stats.ci95_hi = std::nan("");
      stats.aaoi.assign(static_cast<std::size_t>(n_loops), std::nan(""));
      stats.paoi.assign(static_cast<std::size_t>(n_loops), std::nullopt);
    }
    report.policies.push_back(std::move(stats));
  }
  return report;
}

std::string trace_to_csv(const Trace& trace) {
  std::string out = "k,loop,t_since,metric,channel,received,stage_cost\n";
  for (const TraceRow& row : trace.rows) {
    out += std::to_string(row.k);
    out += ',';
    out += std::to_string(row.loop);
    out += ',';
    out += std::to_string(row.t_since);
    out += ',';
    out += format_double(row.metric);
    out += ',';
    out += std::to_string(row.channel);
    out += ',';
    out += row.received ? '1' : '0';
    out += ',';
    out += format_double(row.stage_cost);
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json optional_array(const std::vector<std::optional<double>>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& x : v) {
    if (x) {
      arr.push_back(*x);
    } else {
      arr.push_back(nullptr);
    }
  }
  return arr;
}

}  // namespace

nlohmann::json summary_to_json(Policy policy, const EpisodeResult& result) {
  nlohmann::json j;
  j["policy"] = to_string(policy);
  j["mean_cost"] = result.summary.avg_cost;
  j["std_cost"] = 0.0;
  j["ci95"] = {result.summary.avg_cost, result.summary.avg_cost};
  j["diverged_runs"] = result.summary.diverged ? 1 : 0;
  nlohmann::json aaoi = nlohmann::json::array();
  std::vector<std::optional<double>> paoi;
  for (const LoopEpisodeStats& ls : result.summary.per_loop) {
    aaoi.push_back(ls.aaoi);
    paoi.push_back(ls.paoi);
  }
  j["aaoi"] = std::move(aaoi);
  j["paoi"] = optional_array(paoi);
  return j;
}

nlohmann::json comparison_to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["runs"] = report.runs;
  nlohmann::json entries = nlohmann::json::array();
  for (const PolicyStats& stats : report.policies) {
    nlohmann::json e;
    e["policy"] = to_string(stats.policy);
    e["mean_cost"] = stats.mean_cost;
    e["std_cost"] = stats.std_cost;
    e["ci95"] = {stats.ci95_lo, stats.ci95_hi};
    e["diverged_runs"] = stats.diverged_runs;
    e["aaoi"] = stats.aaoi;
    e["paoi"] = optional_array(stats.paoi);
    entries.push_back(std::move(e));
  }
  j["policies"] = std::move(entries);
  return j;
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open for writing: " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("rename failed: " + path.string() + ": " + ec.message());
  }
}

}  // namespace wncs
