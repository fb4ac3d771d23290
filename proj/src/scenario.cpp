#include "wncs/scenario.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wncs {
namespace {

using nlohmann::json;

Mat parse_matrix(const json& node, const std::string& where) {
  if (!node.is_array() || node.empty()) {
    throw ParseError("scenario: " + where + " must be a non-empty array of rows");
  }
  const std::size_t rows = node.size();
  std::size_t cols = 0;
  Mat out;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = node[r];
    if (!row.is_array() || row.empty()) {
      throw ParseError("scenario: " + where + " row " + std::to_string(r) +
                       " must be a non-empty array");
    }
    if (r == 0) {
      cols = row.size();
      out.resize(static_cast<Eigen::Index>(rows),
                 static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      throw DimensionError("scenario: " + where + " is not rectangular");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        throw ParseError("scenario: " + where + " has a non-numeric entry");
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          row[c].get<double>();
    }
  }
  return out;
}

Vec parse_vector(const json& node, const std::string& where) {
  if (!node.is_array() || node.empty()) {
    throw ParseError("scenario: " + where + " must be a non-empty array");
  }
  Vec out(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) {
      throw ParseError("scenario: " + where + " has a non-numeric entry");
    }
    out(static_cast<Eigen::Index>(i)) = node[i].get<double>();
  }
  return out;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError("scenario: missing key '" + std::string(key) + "' in " +
                     where);
  }
  return *it;
}

void require_square(const Mat& m, Eigen::Index n, const std::string& where) {
  if (m.rows() != n || m.cols() != n) {
    throw DimensionError("scenario: " + where + " must be " +
                         std::to_string(n) + "x" + std::to_string(n));
  }
}

void require_psd(const Mat& m, const std::string& where) {
  if (!is_psd(m)) {
    throw DomainError("scenario: " + where + " is not positive semidefinite");
  }
}

LoopSpec parse_loop(const json& node, int index) {
  const std::string where = "loops[" + std::to_string(index) + "]";
  if (!node.is_object()) {
    throw ParseError("scenario: " + where + " must be an object");
  }
  LoopSpec loop;
  loop.A = parse_matrix(require(node, "A", where), where + ".A");
  loop.B = parse_matrix(require(node, "B", where), where + ".B");
  loop.C = parse_matrix(require(node, "C", where), where + ".C");
  loop.W = parse_matrix(require(node, "W", where), where + ".W");
  loop.V = parse_matrix(require(node, "V", where), where + ".V");
  loop.Q = parse_matrix(require(node, "Q", where), where + ".Q");
  loop.R = parse_matrix(require(node, "R", where), where + ".R");
  const Eigen::Index n = loop.A.rows();
  if (node.contains("x0_mean")) {
    loop.x0_mean = parse_vector(node["x0_mean"], where + ".x0_mean");
  } else {
    loop.x0_mean = Vec::Zero(n);
  }
  if (node.contains("x0_cov")) {
    loop.x0_cov = parse_matrix(node["x0_cov"], where + ".x0_cov");
  } else {
    loop.x0_cov = Mat::Identity(n, n);
  }
  return loop;
}

void validate_loop(const LoopSpec& loop, int index) {
  const std::string where = "loops[" + std::to_string(index) + "]";
  const Eigen::Index n = loop.A.rows();
  if (loop.A.cols() != n) {
    throw DimensionError("scenario: " + where + ".A must be square");
  }
  if (loop.B.rows() != n) {
    throw DimensionError("scenario: " + where + ".B must have " +
                         std::to_string(n) + " rows");
  }
  if (loop.C.cols() != n) {
    throw DimensionError("scenario: " + where + ".C must have " +
                         std::to_string(n) + " columns");
  }
  require_square(loop.W, n, where + ".W");
  require_square(loop.Q, n, where + ".Q");
  require_square(loop.V, loop.C.rows(), where + ".V");
  require_square(loop.R, loop.B.cols(), where + ".R");
  require_square(loop.x0_cov, n, where + ".x0_cov");
  if (loop.x0_mean.size() != n) {
    throw DimensionError("scenario: " + where + ".x0_mean must have length " +
                         std::to_string(n));
  }
  require_psd(loop.W, where + ".W");
  require_psd(loop.V, where + ".V");
  require_psd(loop.Q, where + ".Q");
  require_psd(loop.x0_cov, where + ".x0_cov");
  if (min_eigenvalue(loop.R) <= 0.0) {
    throw DomainError("scenario: " + where + ".R must be positive definite");
  }
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

std::string to_string(Policy policy) {
  switch (policy) {
    case Policy::kCoil: return "coil";
    case Policy::kVoi: return "voi";
    case Policy::kAoi: return "aoi";
    case Policy::kRoundRobin: return "round_robin";
    case Policy::kRandom: return "random";
    case Policy::kAlways: return "always";
  }
  throw DomainError("unknown policy enum value");
}

Policy policy_from_string(const std::string& name) {
  if (name == "coil") return Policy::kCoil;
  if (name == "voi") return Policy::kVoi;
  if (name == "aoi") return Policy::kAoi;
  if (name == "round_robin") return Policy::kRoundRobin;
  if (name == "random") return Policy::kRandom;
  if (name == "always") return Policy::kAlways;
  throw DomainError("unknown policy '" + name + "'");
}

bool operator==(const LoopSpec& a, const LoopSpec& b) {
  return a.A == b.A && a.B == b.B && a.C == b.C && a.W == b.W && a.V == b.V &&
         a.Q == b.Q && a.R == b.R && a.x0_mean == b.x0_mean &&
         a.x0_cov == b.x0_cov;
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.loops == b.loops && a.num_channels == b.num_channels &&
         a.success_prob == b.success_prob && a.horizon == b.horizon &&
         a.seed == b.seed && a.policy == b.policy &&
         a.voi_use_qbar == b.voi_use_qbar;
}

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw ParseError("scenario: top level must be an object");
  }

  Scenario scenario;
  const json& loops = require(root, "loops", "top level");
  if (!loops.is_array() || loops.empty()) {
    throw ParseError("scenario: 'loops' must be a non-empty array");
  }
  for (std::size_t i = 0; i < loops.size(); ++i) {
    scenario.loops.push_back(parse_loop(loops[i], static_cast<int>(i)));
  }

  const json& channels = require(root, "channels", "top level");
  if (!channels.is_number_integer()) {
    throw ParseError("scenario: 'channels' must be an integer");
  }
  scenario.num_channels = channels.get<int>();

  scenario.success_prob = parse_matrix(require(root, "q_bar", "top level"), "q_bar");

  const json& horizon = require(root, "horizon", "top level");
  if (!horizon.is_number_integer()) {
    throw ParseError("scenario: 'horizon' must be an integer");
  }
  scenario.horizon = horizon.get<long>();

  const json& seed = require(root, "seed", "top level");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ParseError("scenario: 'seed' must be an integer");
  }
  if (seed.is_number_integer() && seed.get<long long>() < 0) {
    throw ParseError("scenario: 'seed' must be nonnegative");
  }
  scenario.seed = seed.get<std::uint64_t>();

  const json& policy = require(root, "policy", "top level");
  if (!policy.is_string()) {
    throw ParseError("scenario: 'policy' must be a string");
  }
  scenario.policy = policy_from_string(policy.get<std::string>());

  if (root.contains("voi_use_qbar")) {
    if (!root["voi_use_qbar"].is_boolean()) {
      throw ParseError("scenario: 'voi_use_qbar' must be a boolean");
    }
    scenario.voi_use_qbar = root["voi_use_qbar"].get<bool>();
  }

  validate_scenario(scenario);
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    // A missing input is a configuration mistake, not an I/O failure; I/O
    // exit status is reserved for output-side trouble.
    throw ParseError("scenario not found: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void validate_scenario(const Scenario& scenario) {
  if (scenario.loops.empty()) {
    throw DomainError("scenario: needs at least one loop");
  }
  for (std::size_t i = 0; i < scenario.loops.size(); ++i) {
    validate_loop(scenario.loops[i], static_cast<int>(i));
  }
  if (scenario.num_channels < 1) {
    throw DomainError("scenario: needs at least one channel");
  }
  const Eigen::Index n_loops = static_cast<Eigen::Index>(scenario.loops.size());
  if (scenario.success_prob.rows() != n_loops ||
      scenario.success_prob.cols() != scenario.num_channels) {
    throw DimensionError("scenario: q_bar must be loops x channels (" +
                         std::to_string(n_loops) + "x" +
                         std::to_string(scenario.num_channels) + ")");
  }
  for (Eigen::Index r = 0; r < scenario.success_prob.rows(); ++r) {
    for (Eigen::Index c = 0; c < scenario.success_prob.cols(); ++c) {
      const double q = scenario.success_prob(r, c);
      if (!(q >= 0.0 && q <= 1.0)) {
        throw DomainError("scenario: q_bar entries must lie in [0, 1]");
      }
    }
  }
  if (scenario.horizon < 1) {
    throw DomainError("scenario: horizon must be at least 1");
  }
}

std::vector<std::string> scenario_warnings(const Scenario& scenario) {
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < scenario.loops.size(); ++i) {
    const double sigma = max_singular_value(scenario.loops[i].A);
    if (sigma <= 1.0) {
      warnings.push_back("loop " + std::to_string(i) +
                         ": max singular value of A is " +
                         std::to_string(sigma) +
                         " <= 1; contention results may be uninformative");
    }
  }
  return warnings;
}

std::string serialize_scenario(const Scenario& scenario) {
  json root;
  json loops = json::array();
  for (const LoopSpec& loop : scenario.loops) {
    json node;
    node["A"] = matrix_to_json(loop.A);
    node["B"] = matrix_to_json(loop.B);
    node["C"] = matrix_to_json(loop.C);
    node["W"] = matrix_to_json(loop.W);
    node["V"] = matrix_to_json(loop.V);
    node["Q"] = matrix_to_json(loop.Q);
    node["R"] = matrix_to_json(loop.R);
    node["x0_mean"] = vector_to_json(loop.x0_mean);
    node["x0_cov"] = matrix_to_json(loop.x0_cov);
    loops.push_back(std::move(node));
  }
  root["loops"] = std::move(loops);
  root["channels"] = scenario.num_channels;
  root["q_bar"] = matrix_to_json(scenario.success_prob);
  root["horizon"] = scenario.horizon;
  root["seed"] = scenario.seed;
  root["policy"] = to_string(scenario.policy);
  root["voi_use_qbar"] = scenario.voi_use_qbar;
  return root.dump(2) + "\n";
}

}  // namespace wncs
