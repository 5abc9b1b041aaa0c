#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gdgap/hard_instance.hpp"
#include "gdgap/rational.hpp"
#include "gdgap/types.hpp"

namespace gdgap::gd {

struct GDConfig {
  double eta = 0.0;
  long T = 0;
  double radius = 1.0;
  /// Output weights: q[t-1] multiplies w_t. Entries bounded by 1 in magnitude.
  Vec q;

  static GDConfig uniform(double eta, long T);
  /// q(t) = 1/(T - s) for t > s, else 0.
  static GDConfig suffix(double eta, long T, long s);
  /// Throws ConfigError on eta <= 0, T < 1, |q| != T or |q(t)| > 1.
  void validate() const;
};

struct Trajectory {
  std::vector<Vec> iterates;             // w_0 .. w_T
  std::vector<Subgradient> subgradients;  // subgradients[t-1] produced w_t
  std::vector<bool> projection_applied;   // projection_applied[t-1] for step t
  Vec weighted_output;

  long steps() const { return static_cast<long>(subgradients.size()); }
};

/// Standard first-order oracle: one subgradient of f(., z) at w.
using PointOracle = std::function<Vec(std::span<const double> w, std::size_t z)>;

/// Time-indexed sample-dependent oracle O^t(S_{1:t-1}, w, z). `prefix` holds
/// the batches S_1 .. S_{t-1}; each batch is a multiset of point indices.
using Batch = std::vector<std::size_t>;
using SequenceOracle = std::function<Subgradient(int t, std::span<const Batch> prefix,
                                                 std::span<const double> w, std::size_t z)>;

/// Full-batch projected GD: w_t = P[w_{t-1} - eta/|S| sum_z O_z(w_{t-1})].
Trajectory run_gd(const PointOracle& oracle, std::size_t sample_size, std::size_t dim,
                  const GDConfig& config);

/// GD driven by a sample-dependent oracle over the batch sequence (one batch per
/// step; sequence.size() must equal T).
Trajectory run_gd_sample_dependent(const SequenceOracle& oracle, const std::vector<Batch>& sequence,
                                   std::size_t dim, const GDConfig& config);

/// The full-batch sequence {0..m-1} repeated T times.
std::vector<Batch> full_batch_sequence(std::size_t m, long T);

/// Wraps the hard-instance oracle as a sequence oracle.
SequenceOracle hard_instance_oracle(const instance::SampleOracle& oracle);

/// Block state (in units of eta alpha) at step t of the staircase over n blocks.
/// Throws OutOfPhase if t exceeds terminal_time(n).
std::vector<long> closed_form_blocks(int n, long t);

/// Coordinate-space iterate predicted by closed_form_blocks: each coordinate
/// of block j carries eta alpha b_j / sqrt(k).
Vec closed_form_state(const instance::InstanceParams& params,
                      const instance::BlockStructure& blocks, long t);

/// Lattice simulation of the oracle over n blocks: states for t = 0 .. steps.
std::vector<std::vector<long>> simulate_lattice(int n, long steps,
                                                instance::OracleOptions options = {});

struct StepCheck {
  bool pass = true;
  long first_failure = -1;  // step index of the first violation
};

/// No projection fired and |w_t|^2 <= 2 eta^2 alpha^2 t for every t >= 1.
StepCheck check_no_projection(const Trajectory& traj, const instance::InstanceParams& params);

/// X_t = largest sum of B coordinates of w_t over the block coordinates is
/// non-decreasing in t. B is clamped to the number of block coordinates.
StepCheck partial_sum_monotone(const Trajectory& traj, const instance::BlockStructure& blocks,
                               int B);
StepCheck partial_sum_monotone(const std::vector<Vec>& iterates, const std::vector<int>& coords,
                               int B);

/// Optimization lower bound in one dimension, in exact arithmetic.
struct OplowResult {
  Rational eta;
  long T = 0;
  bool first_case = false;  // eta^2 T >= 1
  // |x - gamma| construction.
  Rational gamma;
  Rational abs_output;
  Rational abs_gap;    // f(x_out) - min f over [-1, 1]
  Rational abs_bound;  // eta/4 + 1/(2 eta T)
  bool abs_holds = false;
  // a x construction with a = 1/((T+1) eta); valid iff a <= 1.
  bool linear_valid = false;
  Rational linear_output;
  Rational linear_gap;    // f(x_out) - f(-1)
  Rational linear_bound;  // 1/(3 T eta)
  bool linear_holds = false;
  // Combined claim eta/2 + 1/(6 eta T) against the better construction.
  Rational claimed;
  Rational best_gap;
  bool claim_holds = false;
  bool pass = false;
};

OplowResult oplow_bound_check(const Rational& eta, long T);

/// One JSON object per step: step, sparse iterate, case tag, squared norm,
/// projection flag.
void write_trajectory_jsonl(std::ostream& out, const Trajectory& traj);

}  // namespace gdgap::gd
