#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gdgap/experiment.hpp"

using namespace gdgap;
using namespace gdgap::exp;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.d = 32;
  c.m = 2;
  c.T = 300;
  c.trials = 12;
  c.code_size = 8;
  c.seed = 5;
  return c;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("mode names") {
  CHECK(std::string(to_string(Mode::oracle_direct)) == "oracle-direct");
  CHECK(mode_from_string("full-reduction") == Mode::full_reduction);
  CHECK_THROWS_AS(mode_from_string("fast"), ConfigError);
}

TEST_CASE("config validation and JSON") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.resolved_eta() == doctest::Approx(1.0 / std::sqrt(1000.0)));
  c.suffix = c.T;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.trials = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.mode = Mode::full_reduction;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // d = 128 is not a perfect square
  c.d = 16;
  c.T = 2000;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // too large for exact arithmetic

  ExperimentConfig a = small_config();
  a.eta = 0.125;
  a.epsilon = 0.2;
  a.suffix = 7;
  a.mode = Mode::full_reduction;
  const auto b = config_from_json(to_json(a));
  CHECK(b.d == a.d);
  CHECK(b.T == a.T);
  CHECK(b.eta == a.eta);
  CHECK(b.epsilon == a.epsilon);
  CHECK(b.suffix == 7);
  CHECK(b.mode == Mode::full_reduction);
  CHECK(b.seed == a.seed);
  CHECK_THROWS(config_from_json("{\"d\": \"x\"}"));
}

TEST_CASE("small gap run passes conditionally") {
  const auto rep = run_gap_trials(small_config());
  CHECK(rep.trials.size() == 12);
  CHECK(rep.found > 0);
  CHECK(rep.passed == rep.found);
  CHECK(rep.conditional_success_frequency == 1.0);
  for (const auto& t : rep.trials) {
    if (!t.vstar_found) continue;
    CHECK(t.gap >= t.bound);
    CHECK(t.no_projection);
    CHECK(t.inactivity_margin >= 0.0);
  }
}

TEST_CASE("forced epsilon = 1 is degenerate") {
  auto c = small_config();
  c.epsilon = 1.0;
  const auto rep = run_gap_trials(c);
  CHECK(rep.found == 0);
  CHECK(rep.degenerate);
  CHECK(rep.success_frequency == 0.0);
  CHECK_FALSE(rep.all_pass);
}

TEST_CASE("v* frequency matches the coverage probability") {
  auto c = small_config();
  c.trials = 300;
  c.code_size = 16;
  c.m = 8;
  c.epsilon = 0.25;
  c.T = 60;
  const auto rep = run_gap_trials(c);
  const double p = code::coverage_probability(16, 8, 0.25);
  CHECK(rep.coverage_probability == doctest::Approx(p));
  const double freq = static_cast<double>(rep.found) / 300.0;
  CHECK(std::abs(freq - p) <= 3.0 * std::sqrt(p * (1 - p) / 300.0));
}

TEST_CASE("results do not depend on the thread count") {
  auto c = small_config();
  ::setenv("GDGAP_THREADS", "1", 1);
  const auto one = report_csv(run_gap_trials(c));
  ::setenv("GDGAP_THREADS", "3", 1);
  const auto three = report_csv(run_gap_trials(c));
  ::unsetenv("GDGAP_THREADS");
  CHECK(one == three);
}

TEST_CASE("report export") {
  GapReport empty;
  const auto header = report_csv(empty);
  CHECK(header == "trial,seed,vstar_found,vstar,gap,bound,bound_alt,pass\n");

  auto c = small_config();
  c.trials = 100;
  c.T = 60;
  const auto rep = run_gap_trials(c);
  CHECK(count_lines(report_csv(rep)) == 101);

  const auto dir = std::filesystem::temp_directory_path() / "gdgap_export_test";
  std::filesystem::create_directories(dir);
  const std::string base = (dir / "report").string();
  export_report(rep, base);
  const auto first = slurp(base + ".csv");
  const auto first_json = slurp(base + ".json");
  export_report(rep, base);
  CHECK(slurp(base + ".csv") == first);
  CHECK(slurp(base + ".json") == first_json);
  CHECK(first == report_csv(rep));
  const auto doc = nlohmann::json::parse(first_json);
  CHECK(doc.contains("trials"));
  std::filesystem::remove_all(dir);
  CHECK_THROWS(export_report(rep, "/nonexistent-dir/x/report"));
}

TEST_CASE("grid case in both modes") {
  const auto g = make_grid_case(32, 2, false);
  CHECK(g.T == 17 * g.terminal);
  const auto r = run_grid_case(g);
  CHECK(r.lattice_matches);
  CHECK(r.terminal_constant);
  CHECK(r.norm_bound_exact);
  CHECK(r.inactivity_scaled_exact);
  CHECK(r.monotone_b1);
  CHECK(r.monotone_b5);
  CHECK(r.float_ran);
  CHECK(r.float_max_error <= 1e-10);
  CHECK(r.no_projection);
  CHECK(default_grid().size() == 18);
}

TEST_CASE("invariant suite") {
  const auto checks = run_invariant_suite();
  for (const auto& c : checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.pass);
  }
  const auto faulty = run_invariant_suite({true, 1});
  bool found = false;
  for (const auto& c : faulty) {
    if (c.name == "closed_form_trajectory") {
      found = true;
      CHECK_FALSE(c.pass);
      CHECK(c.detail.find("first mismatch at t=") != std::string::npos);
    }
  }
  CHECK(found);
}

TEST_CASE("oplow sweep") {
  const auto sweep = oplow_sweep(100, 25);
  bool first = false, second = false;
  for (const auto& r : sweep) {
    CHECK(r.pass);
    first = first || r.first_case;
    second = second || !r.first_case;
  }
  CHECK(first);
  CHECK(second);
}

TEST_CASE("full reduction agrees with the direct oracle on a tiny instance") {
  ExperimentConfig c;
  c.d = 16;
  c.m = 2;
  c.T = 20;
  c.trials = 2;
  c.code_size = 4;
  c.mode = Mode::full_reduction;
  c.policy = instance::BlockWidthPolicy::explicit_k;
  c.k = 4;
  c.suffix = 19;
  const auto rep = run_gap_trials(c);
  for (const auto& t : rep.trials) {
    if (!t.vstar_found) continue;
    CHECK(t.reduction_run);
    CHECK(t.modes_agree);
  }
}
