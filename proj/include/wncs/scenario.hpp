#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wncs/mat_util.hpp"

namespace wncs {

enum class Policy { kCoil, kVoi, kAoi, kRoundRobin, kRandom, kAlways };

std::string to_string(Policy policy);
Policy policy_from_string(const std::string& name);  // DomainError on unknown

/**
 * One control loop: plant x+ = A x + B u + w, sensor y = C x + v,
 * stage cost x'Qx + u'Ru, initial state ~ N(x0_mean, x0_cov).
 */
struct LoopSpec {
  Mat A, B, C, W, V, Q, R;
  Vec x0_mean;
  Mat x0_cov;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
  Eigen::Index output_dim() const { return C.rows(); }
};

struct Scenario {
  std::vector<LoopSpec> loops;
  int num_channels = 0;
  Mat success_prob;  // q_bar, loops x channels
  long horizon = 0;
  std::uint64_t seed = 0;
  Policy policy = Policy::kCoil;
  bool voi_use_qbar = true;  // weight VoI by q_bar in the priority matrix

  int num_loops() const { return static_cast<int>(loops.size()); }
};

bool operator==(const LoopSpec& a, const LoopSpec& b);
bool operator==(const Scenario& a, const Scenario& b);

/**
 * Parse scenario JSON and validate it. Throws ParseError for malformed
 * input, DimensionError for inconsistent sizes, DomainError for values
 * outside their range (probabilities, definiteness, horizon).
 */
Scenario parse_scenario(const std::string& text);

Scenario load_scenario(const std::filesystem::path& path);

// Re-checks an already-built Scenario; parse_scenario calls this itself.
// Useful after CLI overrides mutate a loaded scenario.
void validate_scenario(const Scenario& scenario);

// Advisory messages (e.g. a plant that is not open-loop unstable). Never
// errors; deterministic in the scenario contents.
std::vector<std::string> scenario_warnings(const Scenario& scenario);

// Inverse of parse_scenario up to structural equality.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace wncs
