#include "wncs/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wncs/infotheory.hpp"
#include "wncs/simulator.hpp"

namespace wncs {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const IoError*>(&e) != nullptr) return kExitIo;
  return kExitConfig;
}

int report(const Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  return exit_code_for(e);
}

Scenario load_with_overrides(const std::filesystem::path& path,
                             const RunOverrides& overrides) {
  Scenario scenario = load_scenario(path);
  if (overrides.policy) scenario.policy = *overrides.policy;
  if (overrides.horizon) scenario.horizon = *overrides.horizon;
  if (overrides.seed) scenario.seed = *overrides.seed;
  validate_scenario(scenario);
  for (const std::string& w : scenario_warnings(scenario)) {
    std::cerr << "warning: " << w << "\n";
  }
  return scenario;
}

void ensure_out_dir(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory: " + out_dir.string());
  }
}

std::vector<LoopSynthesis> synthesize_all(const Scenario& scenario) {
  std::vector<LoopSynthesis> synths;
  synths.reserve(scenario.loops.size());
  for (const LoopSpec& loop : scenario.loops) {
    synths.push_back(synthesize_loop(loop));
  }
  return synths;
}

nlohmann::json load_json_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("input not found: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("input " + path.string() + ": invalid JSON: " + e.what());
  }
}

Vec json_to_vector(const nlohmann::json& node, const std::string& where) {
  if (!node.is_array() || node.empty()) {
    throw ParseError(where + " must be a non-empty array");
  }
  Vec out(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) {
      throw ParseError(where + " has a non-numeric entry");
    }
    out(static_cast<Eigen::Index>(i)) = node[i].get<double>();
  }
  return out;
}

Mat json_to_matrix(const nlohmann::json& node, const std::string& where) {
  if (!node.is_array() || node.empty()) {
    throw ParseError(where + " must be a non-empty array of rows");
  }
  const std::size_t rows = node.size();
  std::size_t cols = 0;
  Mat out;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!node[r].is_array() || node[r].empty()) {
      throw ParseError(where + " rows must be non-empty arrays");
    }
    if (r == 0) {
      cols = node[r].size();
      out.resize(static_cast<Eigen::Index>(rows),
                 static_cast<Eigen::Index>(cols));
    } else if (node[r].size() != cols) {
      throw ParseError(where + " is not rectangular");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!node[r][c].is_number()) {
        throw ParseError(where + " has a non-numeric entry");
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          node[r][c].get<double>();
    }
  }
  return out;
}

}  // namespace

std::vector<double> parse_beta_grid(const std::string& text) {
  if (text.empty()) {
    throw DomainError("beta grid must not be empty");
  }
  std::vector<double> betas;
  const auto parse_one = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw DomainError("beta grid: cannot parse '" + s + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) {
      throw DomainError("beta grid must be start:stop:step");
    }
    const double start = parse_one(parts[0]);
    const double stop = parse_one(parts[1]);
    const double step = parse_one(parts[2]);
    if (!(step > 0.0)) {
      throw DomainError("beta grid step must be positive");
    }
    if (stop < start) {
      throw DomainError("beta grid stop must be >= start");
    }
    for (long i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > stop + step * 1e-9) break;
      betas.push_back(v);
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      betas.push_back(parse_one(item));
    }
  }
  if (betas.empty()) {
    throw DomainError("beta grid produced no values");
  }
  return betas;
}

std::vector<Policy> parse_policy_list(const std::string& text) {
  std::vector<Policy> policies;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    policies.push_back(policy_from_string(item));
  }
  if (policies.empty()) {
    throw DomainError("policy list must not be empty");
  }
  return policies;
}

int cmd_run(const std::filesystem::path& scenario_path,
            const RunOverrides& overrides,
            const std::filesystem::path& out_dir) {
  try {
    const Scenario scenario = load_with_overrides(scenario_path, overrides);
    const std::vector<LoopSynthesis> synths = synthesize_all(scenario);
    const EpisodeResult result = run_episode(scenario, synths, 0);
    ensure_out_dir(out_dir);
    const nlohmann::json summary = summary_to_json(scenario.policy, result);
    write_text_atomic(out_dir / "trace.csv", trace_to_csv(result.trace));
    write_text_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    if (result.summary.diverged) {
      std::cerr << "error: run diverged at slot "
                << result.summary.diverged_at << "\n";
      return kExitDiverged;
    }
    return kExitOk;
  } catch (const Error& e) {
    return report(e);
  }
}

int cmd_compare(const std::filesystem::path& scenario_path,
                const RunOverrides& overrides,
                const std::vector<Policy>& policies, int runs,
                const std::filesystem::path& out_dir) {
  try {
    if (runs < 2) {
      throw DomainError("compare needs at least 2 runs");
    }
    if (policies.empty()) {
      throw DomainError("compare needs at least one policy");
    }
    const Scenario scenario = load_with_overrides(scenario_path, overrides);
    const ComparisonReport report_data =
        monte_carlo_compare(scenario, policies, runs);
    ensure_out_dir(out_dir);
    write_text_atomic(out_dir / "comparison.json",
                      comparison_to_json(report_data).dump(2) + "\n");

    std::vector<const PolicyStats*> ranked;
    for (const PolicyStats& stats : report_data.policies) {
      ranked.push_back(&stats);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const PolicyStats* a, const PolicyStats* b) {
                       if (a->used_runs == 0) return false;
                       if (b->used_runs == 0) return true;
                       return a->mean_cost < b->mean_cost;
                     });
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %14s %14s %14s %9s\n", "policy",
                  "mean_cost", "ci95_lo", "ci95_hi", "diverged");
    std::cout << line;
    for (const PolicyStats* stats : ranked) {
      std::snprintf(line, sizeof(line), "%-12s %14.6g %14.6g %14.6g %9d\n",
                    to_string(stats->policy).c_str(), stats->mean_cost,
                    stats->ci95_lo, stats->ci95_hi, stats->diverged_runs);
      std::cout << line;
    }

    bool any_usable = false;
    for (const PolicyStats& stats : report_data.policies) {
      if (stats.used_runs > 0) any_usable = true;
    }
    if (!any_usable) {
      std::cerr << "error: all runs diverged under every policy\n";
      return kExitDiverged;
    }
    return kExitOk;
  } catch (const Error& e) {
    return report(e);
  }
}

int cmd_curves(const CurveRequest& request) {
  try {
    if (request.betas.empty()) {
      throw DomainError("curves needs a non-empty beta grid");
    }
    const nlohmann::json input = load_json_input(request.input);
    if (!input.is_object()) {
      throw ParseError("curves input must be a JSON object");
    }

    std::string csv = "beta,rate,relevance_or_distortion\n";
    if (request.kind == CurveKind::kRateDistortion) {
      if (!input.contains("p") || !input.contains("d")) {
        throw ParseError("rate-distortion input needs keys 'p' and 'd'");
      }
      const Vec p = json_to_vector(input["p"], "'p'");
      const Mat d = json_to_matrix(input["d"], "'d'");
      for (const double beta : request.betas) {
        const info::RdPoint point = info::blahut_arimoto(p, d, beta);
        csv += format_double(beta);
        csv += ',';
        csv += format_double(point.rate);
        csv += ',';
        csv += format_double(point.distortion);
        csv += '\n';
      }
    } else {
      if (!input.contains("joint")) {
        throw ParseError("bottleneck input needs key 'joint'");
      }
      const Mat joint = json_to_matrix(input["joint"], "'joint'");
      for (const double beta : request.betas) {
        // Fresh generator per point: every beta sees the same restart
        // initializations, which keeps sweeps comparable.
        Rng rng(request.seed);
        const info::IbResult point =
            info::ib_solve(joint, request.t_size, beta, rng, 1e-10, 10000,
                           request.restarts);
        csv += format_double(beta);
        csv += ',';
        csv += format_double(point.i_xt);
        csv += ',';
        csv += format_double(point.i_ty);
        csv += '\n';
      }
    }
    write_text_atomic(request.out, csv);
    return kExitOk;
  } catch (const Error& e) {
    return report(e);
  }
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"control-loop scheduling testbed and information solvers"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string policy_name;
  long horizon = 0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string policies_text;
  int runs = 0;

  CLI::App* run = app.add_subcommand("run", "simulate one episode");
  run->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  run->add_option("--policy", policy_name, "override scenario policy");
  run->add_option("--horizon", horizon, "override horizon")
      ->check(CLI::PositiveNumber);
  auto* run_seed = run->add_option("--seed", seed, "override base seed");
  run->add_option("--out", out_dir, "output directory (default .)");

  CLI::App* compare = app.add_subcommand("compare", "Monte-Carlo comparison");
  compare->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  compare->add_option("--policies", policies_text, "comma list of policies")
      ->required();
  compare->add_option("--runs", runs, "number of replications")->required();
  compare->add_option("--horizon", horizon, "override horizon")
      ->check(CLI::PositiveNumber);
  auto* cmp_seed = compare->add_option("--seed", seed, "override base seed");
  compare->add_option("--out", out_dir, "output directory (default .)");

  std::string kind;
  CurveRequest request;
  std::string input_path;
  std::string betas_text;
  std::string curve_out = "curve.csv";
  CLI::App* curves = app.add_subcommand("curves", "solver sweeps over beta");
  curves->add_option("kind", kind, "rd or ib")->required();
  curves->add_option("--input", input_path, "distribution JSON file")
      ->required();
  curves->add_option("--betas", betas_text, "start:stop:step or comma list")
      ->required();
  curves->add_option("--t-size", request.t_size, "bottleneck alphabet size")
      ->check(CLI::PositiveNumber);
  curves->add_option("--restarts", request.restarts, "bottleneck restarts")
      ->check(CLI::PositiveNumber);
  curves->add_option("--seed", request.seed, "bottleneck restart seed");
  curves->add_option("--out", curve_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    RunOverrides overrides;
    if (!policy_name.empty()) overrides.policy = policy_from_string(policy_name);
    if (horizon > 0) overrides.horizon = horizon;

    if (run->parsed()) {
      if (run_seed->count() > 0) overrides.seed = seed;
      return cmd_run(scenario_path, overrides, out_dir);
    }
    if (compare->parsed()) {
      if (cmp_seed->count() > 0) overrides.seed = seed;
      return cmd_compare(scenario_path, overrides,
                         parse_policy_list(policies_text), runs, out_dir);
    }
    if (kind == "rd") {
      request.kind = CurveKind::kRateDistortion;
    } else if (kind == "ib") {
      request.kind = CurveKind::kBottleneck;
    } else {
      throw DomainError("curve kind must be rd or ib");
    }
    request.input = input_path;
    request.betas = parse_beta_grid(betas_text);
    request.out = curve_out;
    return cmd_curves(request);
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace wncs
