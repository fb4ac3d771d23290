#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wncs/cli.hpp"
#include "wncs/errors.hpp"
#include "wncs/scenario.hpp"
#include "test_util.hpp"

using namespace wncs;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() /
           ("wncs_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
};

// Drives the real entry point in-process with stdout/stderr captured so
// doctest output stays readable and messages stay assertable.
int run_cli(const std::vector<std::string>& args,
            std::string* err_text = nullptr) {
  std::vector<const char*> argv;
  argv.push_back("wncs");
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::stringstream captured_out, captured_err;
  std::streambuf* old_out = std::cout.rdbuf(captured_out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(captured_err.rdbuf());
  const int rc = cli_main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  if (err_text) *err_text = captured_err.str();
  return rc;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

fs::path write_scenario(const TempDir& tmp, const Scenario& scenario,
                        const std::string& name = "scenario.json") {
  const fs::path p = tmp.path() / name;
  write_file(p, serialize_scenario(scenario));
  return p;
}

Scenario golden_scenario(long horizon) {
  return testutil::uniform_scenario(
      testutil::scalar_loop(1, 1, 1, 1, 1, 1, 1), 1, 1, 1.0, horizon, 7,
      Policy::kAlways);
}

Scenario contention_scenario(long horizon) {
  return testutil::uniform_scenario(
      testutil::scalar_loop(1.2, 1, 1, 1, 1, 1, 1), 2, 1, 1.0, horizon, 11,
      Policy::kCoil);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run writes artifacts and succeeds") {
  TempDir tmp;
  const fs::path sc = write_scenario(tmp, golden_scenario(50));
  const fs::path out = tmp.path() / "out";
  CHECK(run_cli({"run", "--scenario", sc.string(), "--out", out.string()}) ==
        kExitOk);
  REQUIRE(fs::exists(out / "trace.csv"));
  REQUIRE(fs::exists(out / "summary.json"));

  const auto summary = nlohmann::json::parse(read_file(out / "summary.json"));
  CHECK(summary.at("policy") == "always");
  CHECK(summary.at("mean_cost").is_number());
  CHECK(summary.contains("std_cost"));
  CHECK(summary.contains("ci95"));
  CHECK(summary.at("diverged_runs") == 0);
  REQUIRE(summary.at("aaoi").is_array());  // one entry per loop
  CHECK(summary.at("aaoi")[0] == 0.0);     // perfect dedicated channel

  const auto trace_lines = lines_of(read_file(out / "trace.csv"));
  REQUIRE(trace_lines.size() == 51);
  CHECK(trace_lines[0] == "k,loop,t_since,metric,channel,received,stage_cost");
}

TEST_CASE("missing scenario file is a configuration error") {
  TempDir tmp;
  std::string err;
  const fs::path missing = tmp.path() / "nope.json";
  const int rc = run_cli({"run", "--scenario", missing.string(), "--out",
                          (tmp.path() / "out").string()},
                         &err);
  CHECK(rc == kExitConfig);
  CHECK(err.find("error: scenario not found") != std::string::npos);
}

TEST_CASE("policy override is applied and validated") {
  TempDir tmp;
  const fs::path sc = write_scenario(tmp, contention_scenario(20));
  const fs::path out = tmp.path() / "out";

  // Two loops cannot all hold a dedicated slot on one channel.
  std::string err;
  const int rc = run_cli({"run", "--scenario", sc.string(), "--policy",
                          "always", "--out", out.string()},
                         &err);
  CHECK(rc == kExitConfig);
  CHECK(err.find("error:") == 0);

  CHECK(run_cli({"run", "--scenario", sc.string(), "--policy", "aoi", "--out",
                 out.string()}) == kExitOk);
  const auto summary = nlohmann::json::parse(read_file(out / "summary.json"));
  CHECK(summary.at("policy") == "aoi");
}

TEST_CASE("comparison needs at least two runs") {
  TempDir tmp;
  const fs::path sc = write_scenario(tmp, contention_scenario(20));
  std::string err;
  const int rc = run_cli({"compare", "--scenario", sc.string(), "--policies",
                          "coil,random", "--runs", "1", "--out",
                          (tmp.path() / "out").string()},
                         &err);
  CHECK(rc == kExitConfig);
  CHECK(err.find("error:") == 0);
}

TEST_CASE("starved unstable plant exits with the divergence code") {
  TempDir tmp;
  Scenario s = testutil::uniform_scenario(
      testutil::scalar_loop(2, 1, 1, 1, 1, 1, 1), 1, 1, 0.0, 300, 3,
      Policy::kCoil);
  const fs::path sc = write_scenario(tmp, s);
  const fs::path out = tmp.path() / "out";
  std::string err;
  const int rc =
      run_cli({"run", "--scenario", sc.string(), "--out", out.string()}, &err);
  CHECK(rc == kExitDiverged);
  CHECK(err.find("diverged") != std::string::npos);

  // Artifacts are still written so the blow-up can be inspected.
  CHECK(fs::exists(out / "trace.csv"));
  const auto summary = nlohmann::json::parse(read_file(out / "summary.json"));
  CHECK(summary.at("diverged_runs") == 1);
}

TEST_CASE("repeated invocations are byte-identical") {
  TempDir tmp;
  const fs::path sc = write_scenario(tmp, contention_scenario(200));

  const fs::path a = tmp.path() / "a";
  const fs::path b = tmp.path() / "b";
  REQUIRE(run_cli({"run", "--scenario", sc.string(), "--out", a.string()}) ==
          kExitOk);
  REQUIRE(run_cli({"run", "--scenario", sc.string(), "--out", b.string()}) ==
          kExitOk);
  CHECK(read_file(a / "trace.csv") == read_file(b / "trace.csv"));
  CHECK(read_file(a / "summary.json") == read_file(b / "summary.json"));

  const fs::path c = tmp.path() / "c";
  const fs::path d = tmp.path() / "d";
  const std::vector<std::string> cmp = {"compare",    "--scenario",
                                        sc.string(),  "--policies",
                                        "coil,random", "--runs",
                                        "3"};
  auto with_out = [&](const fs::path& out) {
    std::vector<std::string> args = cmp;
    args.push_back("--out");
    args.push_back(out.string());
    return args;
  };
  REQUIRE(run_cli(with_out(c)) == kExitOk);
  REQUIRE(run_cli(with_out(d)) == kExitOk);
  CHECK(read_file(c / "comparison.json") == read_file(d / "comparison.json"));

  const auto comparison =
      nlohmann::json::parse(read_file(c / "comparison.json"));
  CHECK(comparison.at("runs") == 3);
  CHECK(comparison.at("policies").size() == 2);
}

TEST_CASE("rate-distortion sweep writes the requested grid") {
  TempDir tmp;
  const fs::path input = tmp.path() / "rd.json";
  write_file(input, R"({"p": [0.5, 0.5], "d": [[0.0, 1.0], [1.0, 0.0]]})");
  const fs::path out = tmp.path() / "curve.csv";
  CHECK(run_cli({"curves", "rd", "--input", input.string(), "--betas",
                 "0:10:0.5", "--out", out.string()}) == kExitOk);

  const auto lines = lines_of(read_file(out));
  REQUIRE(lines.size() == 22);  // header + 21 grid points
  CHECK(lines[0] == "beta,rate,relevance_or_distortion");
  CHECK(lines[1] == "0,0,0.5");  // zero pressure: zero rate, blind guessing
}

TEST_CASE("bottleneck sweep relevance rises with pressure") {
  TempDir tmp;
  const fs::path input = tmp.path() / "ib.json";
  write_file(input, R"({"joint": [[0.4, 0.1], [0.1, 0.4]]})");
  const fs::path out = tmp.path() / "curve.csv";
  CHECK(run_cli({"curves", "ib", "--input", input.string(), "--betas",
                 "0,1,10", "--out", out.string()}) == kExitOk);

  const auto lines = lines_of(read_file(out));
  REQUIRE(lines.size() == 4);
  std::vector<double> beta, rate, relevance;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string field;
    std::getline(ss, field, ',');
    beta.push_back(std::stod(field));
    std::getline(ss, field, ',');
    rate.push_back(std::stod(field));
    std::getline(ss, field, ',');
    relevance.push_back(std::stod(field));
  }
  CHECK(beta == std::vector<double>{0.0, 1.0, 10.0});
  CHECK(relevance[0] <= 1e-9);
  CHECK(relevance[1] <= relevance[2] + 1e-9);
  // At high pressure the compressed variable keeps most of I(X;Y) = 0.278.
  CHECK(relevance[2] > 0.2);
  for (double r : rate) CHECK(r >= -1e-12);
}

TEST_CASE("negative joint entries are rejected") {
  TempDir tmp;
  const fs::path input = tmp.path() / "bad.json";
  write_file(input, R"({"joint": [[0.6, -0.1], [0.4, 0.1]]})");
  std::string err;
  const int rc = run_cli({"curves", "ib", "--input", input.string(), "--betas",
                          "1", "--out", (tmp.path() / "c.csv").string()},
                         &err);
  CHECK(rc == kExitConfig);
  CHECK(err.find("error:") == 0);
}

TEST_CASE("beta grid parsing") {
  const std::vector<double> grid = parse_beta_grid("0:10:0.5");
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(10.0).epsilon(1e-12));

  CHECK(parse_beta_grid("0,1,10") == std::vector<double>{0.0, 1.0, 10.0});
  CHECK(parse_beta_grid("2.5") == std::vector<double>{2.5});

  CHECK_THROWS_AS(parse_beta_grid(""), DomainError);
  CHECK_THROWS_AS(parse_beta_grid("abc"), DomainError);
  CHECK_THROWS_AS(parse_beta_grid("10:0:1"), DomainError);
  CHECK_THROWS_AS(parse_beta_grid("0:1:0"), DomainError);
  CHECK_THROWS_AS(parse_beta_grid("0:1:-0.5"), DomainError);
  CHECK_THROWS_AS(parse_beta_grid("0:1"), DomainError);
}

TEST_CASE("policy list parsing") {
  const std::vector<Policy> p = parse_policy_list("coil,voi");
  REQUIRE(p.size() == 2);
  CHECK(p[0] == Policy::kCoil);
  CHECK(p[1] == Policy::kVoi);
  CHECK_THROWS_AS(parse_policy_list("bogus"), DomainError);
  CHECK_THROWS_AS(parse_policy_list(""), DomainError);
}

TEST_CASE("usage errors exit with the configuration code") {
  CHECK(run_cli({}) == kExitConfig);
  CHECK(run_cli({"frobnicate"}) == kExitConfig);
  CHECK(run_cli({"run"}) == kExitConfig);  // --scenario is required

  TempDir tmp;
  const fs::path input = tmp.path() / "rd.json";
  write_file(input, R"({"p": [1.0], "d": [[0.0]]})");
  CHECK(run_cli({"curves", "xyz", "--input", input.string(), "--betas", "1",
                 "--out", (tmp.path() / "c.csv").string()}) == kExitConfig);
}

TEST_CASE("process-level exit codes and messages") {
  const std::string bin = WNCS_BIN_PATH;
  int status = std::system((bin + " --help > /dev/null 2>&1").c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == 0);

  TempDir tmp;
  const fs::path errfile = tmp.path() / "err.txt";
  const fs::path missing = tmp.path() / "absent.json";
  status = std::system((bin + " run --scenario " + missing.string() +
                        " --out " + (tmp.path() / "o").string() + " 2> " +
                        errfile.string() + " > /dev/null")
                           .c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == kExitConfig);
  CHECK(read_file(errfile).find("error: scenario not found") !=
        std::string::npos);
}

}  // TEST_SUITE
