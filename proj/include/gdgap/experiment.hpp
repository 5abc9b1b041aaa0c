#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdgap/gd_engine.hpp"
#include "gdgap/hard_instance.hpp"

namespace gdgap::exp {

enum class Mode { oracle_direct, full_reduction };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& text);

struct ExperimentConfig {
  int d = 128;
  int m = 8;
  long T = 1000;
  std::optional<double> eta;  // unset: 1/sqrt(T)
  int trials = 100;
  std::uint64_t seed = 1;
  std::size_t code_size = 16;
  Mode mode = Mode::oracle_direct;
  long suffix = 0;  // output averages w_{s+1} .. w_T
  std::optional<double> epsilon;
  instance::BlockWidthPolicy policy = instance::BlockWidthPolicy::staircase_fit;
  int k = 0;  // explicit block width
  std::string out;

  double resolved_eta() const;
  /// Throws ConfigError.
  void validate() const;
};

ExperimentConfig config_from_json(const std::string& text);
std::string to_json(const ExperimentConfig& config);

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool vstar_found = false;
  int vstar = -1;
  double gap = 0.0;        // F(output) - F(0)
  double probe_gap = 0.0;  // F(output) - min over {0, iterates}
  double bound = 0.0;      // eps min{eta sqrt T, 1} / (2 * 6 * 16^2)
  double bound_alt = 0.0;  // eps min{eta sqrt T, 1} / (sqrt 2 * 272 * 16^2)
  bool pass = false;       // gap >= min(bound, bound_alt)
  bool no_projection = false;
  double inactivity_margin = 0.0;  // min_t tau - max_{v != v*} w_t·v
  // Full-reduction mode only.
  bool reduction_run = false;
  double reduction_gap = 0.0;
  bool modes_agree = false;
};

struct GapReport {
  ExperimentConfig config;
  instance::InstanceParams params;
  std::vector<TrialResult> trials;
  std::size_t found = 0;
  std::size_t passed = 0;
  double success_frequency = 0.0;              // passed / trials
  double conditional_success_frequency = 0.0;  // passed / found (0 if none found)
  double median_gap = 0.0;                     // over trials with v* found
  double coverage_probability = 0.0;           // analytic P[some v uncovered]
  bool degenerate = false;                     // no trial found v*
  bool coverage_asserted = false;              // analytic coverage >= 1/2
  bool all_pass = false;                       // every asserted check passed
};

/// Runs the configured trials. Threads come from GDGAP_THREADS (default 1);
/// results are order-stable regardless of the thread count.
GapReport run_gap_trials(const ExperimentConfig& config);

/// One trial; exposed for tests.
TrialResult run_trial(const ExperimentConfig& config, const instance::InstanceParams& params,
                      const code::BinaryCode& code, std::size_t trial);

/// CSV with one row per trial and a header; byte-stable.
std::string report_csv(const GapReport& report);
std::string report_json(const GapReport& report);
/// Writes <path>.csv and <path>.json. Throws std::runtime_error on I/O errors.
void export_report(const GapReport& report, const std::string& path);

// Staircase grid shared by the invariant suite and the acceptance checks.

struct GridCase {
  int d = 16;
  int k = 1;
  bool eta_sqrt = false;  // eta = 1/sqrt(T) instead of 0.3
  long T = 0;             // 17 * terminal step
  int n = 0;
  long terminal = 0;
  double eta = 0.0;
};

/// d in {16, 32, 64}, k in {1, 2, 4}, eta in {0.3, 1/sqrt T}.
std::vector<GridCase> default_grid();
GridCase make_grid_case(int d, int k, bool eta_sqrt);

struct GridResult {
  GridCase grid;
  instance::InstanceParams params;
  int vstar = -1;
  // Lattice mode (exact integer arithmetic).
  bool lattice_matches = false;
  long lattice_first_mismatch = -1;
  bool terminal_constant = false;
  bool norm_bound_exact = false;      // sum b_j^2 <= 2t for all t
  long norm_first_failure = -1;
  bool inactivity_scaled_exact = false;  // max_{v != v*} w·v <= tau sqrt d
  bool inactivity_strict_exact = false;  // max_{v != v*} w·v <= tau
  bool monotone_b1 = false;
  bool monotone_b5 = false;
  // Float mode (the GD engine driven by the sample oracle).
  bool float_ran = false;
  std::string float_error;
  double float_max_error = 0.0;  // max |w_t - closed form| per coordinate, t <= terminal
  bool no_projection = false;    // check_no_projection on the float trajectory
  long no_projection_first_failure = -1;
  bool float_monotone_b1 = false;
  bool float_monotone_b5 = false;
  double seconds = 0.0;
};

struct GridOptions {
  instance::OracleOptions oracle;  // fault injection
  std::size_t code_size = 16;
  int m = 4;
  std::uint64_t seed = 1;
  bool run_float = true;
};

GridResult run_grid_case(const GridCase& grid, const GridOptions& options = {});

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteOptions {
  bool inject_fault = false;  // test the raise rule before the swap rule
  std::uint64_t seed = 1;
};

/// Runs every module invariant at small sizes; one entry per check.
std::vector<Check> run_invariant_suite(const SuiteOptions& options = {});

/// Optimization-gap sweep over eta in [1/T, 1] (rational grid).
std::vector<gd::OplowResult> oplow_sweep(long T, int points);

}  // namespace gdgap::exp
