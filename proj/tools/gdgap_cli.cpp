// Command-line driver for the gap experiments and invariant checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gdgap/experiment.hpp"
#include "gdgap/feldman_code.hpp"
#include "gdgap/gd_engine.hpp"

using namespace gdgap;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct GapFlags {
  std::string config;
  std::optional<int> d, m, trials;
  std::optional<long> T, suffix;
  std::optional<double> eta, epsilon;
  std::string eta_preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> code_size;
  std::string mode;
  std::optional<int> k;
  std::string out;
};

void add_gap_flags(CLI::App* cmd, GapFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its fields");
  cmd->add_option("--d", f.d, "dimension (multiple of 16)");
  cmd->add_option("--m", f.m, "sample size");
  cmd->add_option("--T", f.T, "iterations");
  auto* eta = cmd->add_option("--eta", f.eta, "step size");
  cmd->add_option("--eta-preset", f.eta_preset, "step-size preset")->check(CLI::IsMember({"sqrtT"}))->excludes(eta);
  cmd->add_option("--trials", f.trials, "number of trials");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--code-size", f.code_size, "number of code vectors");
  cmd->add_option("--mode", f.mode, "oracle-direct or full-reduction")
      ->check(CLI::IsMember({"oracle-direct", "full-reduction"}));
  cmd->add_option("--suffix", f.suffix, "average the iterates after step s");
  cmd->add_option("--epsilon", f.epsilon, "inclusion probability override");
  cmd->add_option("--k", f.k, "explicit block width");
  cmd->add_option("--out", f.out, "report path (writes .csv and .json)");
}

exp::ExperimentConfig resolve(const GapFlags& f) {
  exp::ExperimentConfig c = f.config.empty() ? exp::ExperimentConfig{} : exp::config_from_json(read_file(f.config));
  if (f.d) c.d = *f.d;
  if (f.m) c.m = *f.m;
  if (f.T) c.T = *f.T;
  if (f.eta) c.eta = *f.eta;
  if (!f.eta_preset.empty()) c.eta.reset();
  if (f.trials) c.trials = *f.trials;
  if (f.seed) c.seed = *f.seed;
  if (f.code_size) c.code_size = *f.code_size;
  if (!f.mode.empty()) c.mode = exp::mode_from_string(f.mode);
  if (f.suffix) c.suffix = *f.suffix;
  if (f.epsilon) c.epsilon = *f.epsilon;
  if (f.k) {
    c.k = *f.k;
    c.policy = instance::BlockWidthPolicy::explicit_k;
  }
  if (!f.out.empty()) c.out = f.out;
  return c;
}

int run_gap(const GapFlags& flags) {
  const exp::ExperimentConfig config = resolve(flags);
  const exp::GapReport report = exp::run_gap_trials(config);
  if (!config.out.empty()) exp::export_report(report, config.out);
  const auto& p = report.params;
  std::printf("d=%d m=%d T=%ld eta=%.6g k=%d alpha=%.6g tau=%.6g eps=%.6g mode=%s\n", p.d, p.m, p.T, p.eta, p.k,
              p.alpha, p.tau, p.epsilon, exp::to_string(config.mode));
  std::printf("trials=%zu found=%zu passed=%zu conditional=%.4f unconditional=%.4f median_gap=%.6g coverage=%.4f%s\n",
              report.trials.size(), report.found, report.passed, report.conditional_success_frequency,
              report.success_frequency, report.median_gap, report.coverage_probability,
              report.degenerate ? " DEGENERATE" : "");
  std::printf("%s\n", report.all_pass ? "PASS" : "FAIL");
  return report.all_pass ? 0 : 1;
}

int run_invariants(bool fault, std::uint64_t seed) {
  const auto checks = exp::run_invariant_suite({fault, seed});
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%-24s %s%s%s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.detail.empty() ? "" : "  ",
                c.detail.c_str());
    ok = ok && c.pass;
  }
  return ok ? 0 : 1;
}

int run_oplow(long T, int points) {
  bool ok = true;
  std::printf("%-14s %-6s %-22s %-22s %-22s %s\n", "eta", "case", "abs_gap", "linear_gap", "claimed", "pass");
  for (const auto& r : exp::oplow_sweep(T, points)) {
    std::printf("%-14s %-6d %-22.15g %-22.15g %-22.15g %s%s\n", to_string(r.eta).c_str(), r.first_case ? 1 : 2,
                to_double(r.abs_gap), r.linear_valid ? to_double(r.linear_gap) : 0.0, to_double(r.claimed),
                r.pass ? "PASS" : "FAIL", r.claim_holds ? "" : " (combined claim fails)");
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

int run_build_code(int d, std::size_t size, std::uint64_t seed, const std::string& out) {
  const auto code = code::build_code(d, size, seed);
  const auto cert = code::verify_code(code);
  const std::string json = code::to_json(code, seed);
  if (out.empty()) {
    std::cout << json << '\n';
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << json << '\n';
  }
  std::fprintf(stderr, "vectors=%zu max_pair=%d (<= %d) min_weight=%d (>= %d) %s\n", code.size(), cert.max_pair_dot,
               code.pair_bound(), cert.min_self_dot, code.self_bound(), cert.pass ? "certified" : "NOT CERTIFIED");
  return cert.pass ? 0 : 1;
}

int run_dump(const GapFlags& flags, std::size_t trial) {
  const exp::ExperimentConfig config = resolve(flags);
  config.validate();
  const int k = config.policy == instance::BlockWidthPolicy::explicit_k ? config.k : 0;
  const auto params = instance::make_params(config.d, config.m, config.T, config.resolved_eta(), config.policy, k,
                                            config.epsilon);
  const auto code = code::build_code(config.d, config.code_size, config.seed);
  const auto sample = code::draw_sample(code, config.m, params.epsilon, mix_seed(config.seed, trial));
  const auto vstar = code::find_uncovered(code, sample);
  if (!vstar) {
    std::fprintf(stderr, "every code vector is covered by this sample\n");
    return 1;
  }
  const auto inst = instance::build_instance(params, code, *vstar);
  const instance::SampleOracle oracle(inst, sample);
  const auto traj = gd::run_gd_sample_dependent(gd::hard_instance_oracle(oracle),
                                                gd::full_batch_sequence(sample.size(), config.T),
                                                static_cast<std::size_t>(params.d),
                                                gd::GDConfig::uniform(params.eta, config.T));
  if (config.out.empty()) {
    gd::write_trajectory_jsonl(std::cout, traj);
  } else {
    std::ofstream f(config.out);
    if (!f) throw std::runtime_error("cannot write " + config.out);
    gd::write_trajectory_jsonl(f, traj);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalization-gap lower-bound experiments for full-batch gradient descent"};
  app.require_subcommand(1);

  GapFlags gap_flags;
  auto* gap = app.add_subcommand("gap", "run gap trials and report against the bound");
  add_gap_flags(gap, gap_flags);

  bool fault = false;
  std::uint64_t inv_seed = 1;
  auto* inv = app.add_subcommand("invariants", "run the invariant suite");
  inv->add_flag("--inject-fault", fault, "test the raise rule before the swap rule");
  inv->add_option("--seed", inv_seed, "seed");

  long oplow_T = 100;
  int oplow_points = 25;
  auto* oplow = app.add_subcommand("oplow", "one-dimensional optimization-gap sweep");
  oplow->add_option("--T", oplow_T, "iterations")->check(CLI::Range(2L, 1000000L));
  oplow->add_option("--points", oplow_points, "grid points")->check(CLI::Range(2, 10000));

  int code_d = 128;
  std::size_t code_size = 16;
  std::uint64_t code_seed = 1;
  std::string code_out;
  auto* build = app.add_subcommand("build-code", "build and certify a code");
  build->add_option("--d", code_d, "dimension");
  build->add_option("--code-size", code_size, "number of vectors");
  build->add_option("--seed", code_seed, "seed");
  build->add_option("--out", code_out, "output JSON path");

  GapFlags dump_flags;
  std::size_t dump_trial = 0;
  auto* dump = app.add_subcommand("dump-trajectory", "write one trial's trajectory as JSON lines");
  add_gap_flags(dump, dump_flags);
  dump->add_option("--trial", dump_trial, "trial index");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gap) return run_gap(gap_flags);
    if (*inv) return run_invariants(fault, inv_seed);
    if (*oplow) return run_oplow(oplow_T, oplow_points);
    if (*build) return run_build_code(code_d, code_size, code_seed, code_out);
    if (*dump) return run_dump(dump_flags, dump_trial);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
