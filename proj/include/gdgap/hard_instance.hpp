#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gdgap/feldman_code.hpp"
#include "gdgap/rational.hpp"
#include "gdgap/types.hpp"

namespace gdgap::instance {

/// How the block width k is picked when building instance parameters.
enum class BlockWidthPolicy {
  /// Smallest power of two k whose staircase finishes within horizon/17 steps
  /// (falls back to finishing within the horizon). Default.
  staircase_fit,
  /// Smallest power of two with d <= k (T/17)^{1/3}.
  paper_bracket,
  /// Caller supplies k.
  explicit_k,
};

struct InstanceParams {
  int d = 0;
  int m = 0;
  long T = 0;        // requested iteration budget
  long horizon = 0;  // iteration count the instance is tuned for (T, or the cap)
  bool capped = false;
  double eta = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
  int k = 1;
};

/// min{1 / (eta sqrt(2T)), 1}
double nemirovski_scale(double eta, long T);

/// 45 eta alpha d^2 / (2 * 16^2 * k^1.5)
double threshold(double eta, double alpha, int d, int k);

struct BlockWidthChoice {
  int k = 1;
  bool capped = false;
  long horizon = 0;
};

/// Smallest power of two k with d <= k (T/17)^{1/3}, clamped to [1, d]. When
/// T > 34 d^3 the horizon is capped at 34 d^3 and k is computed
/// for the capped horizon.
BlockWidthChoice block_width(int d, long T);

/// Number of blocks floor((7d/16) / k).
int staircase_blocks(int d, int k);

/// Step index at which the staircase over n blocks is complete:
/// 1 + sum_{j<=n} j(j+1)/2.
long terminal_time(long n);

/// Smallest power of two k dividing d with n = staircase_blocks(d, k) >= 1 and
/// 17 * terminal_time(n) <= horizon. If no k satisfies the 1/17 margin, the
/// smallest k whose staircase still completes within the horizon; d if none.
int staircase_block_width(int d, long horizon);

InstanceParams make_params(int d, int m, long T, double eta,
                           BlockWidthPolicy policy = BlockWidthPolicy::staircase_fit,
                           int k_explicit = 0, std::optional<double> epsilon = std::nullopt);

/// Ordered, pairwise disjoint coordinate blocks I_1 < I_2 < ... of equal width.
struct BlockStructure {
  int dimension = 0;
  int vstar = -1;  // code index the blocks were carved from; -1 if none
  int k = 1;
  int dprime = 0;  // total number of coordinates covered
  std::vector<std::vector<int>> blocks;

  std::size_t count() const { return blocks.size(); }
  /// Union of all blocks, ascending.
  std::vector<int> coordinates() const;
};

/// Blocks of width k over the first (7d/16 rounded down to a multiple of k)
/// support coordinates of code vector vstar.
BlockStructure build_blocks(const code::BinaryCode& code, int vstar, int k);

/// Every coordinate its own block, in index order (the unblocked function).
BlockStructure all_coordinates(int d);

/// w(I) = (1/sqrt|I|) sum_{i in I} w(i)
double block_value(std::span<const double> w, const std::vector<int>& block);
std::vector<double> block_values(std::span<const double> w, const BlockStructure& blocks);

/// One affine piece of the Nemirovski function: the constant 0, -w(I_a), or
/// w(I_b) - w(I_a) for a < b.
struct AffineTerm {
  enum class Kind { constant, negate, difference };
  Kind kind = Kind::constant;
  int a = -1;
  int b = -1;

  double value(std::span<const double> block_vals) const;
  /// Gradient in coordinate space (length = blocks.dimension).
  Vec gradient(const BlockStructure& blocks) const;
};

/// All affine terms in lexicographic order: constant, negate(0..n-1), then
/// difference(a, b) for a < b.
std::vector<AffineTerm> nemirovski_terms(std::size_t block_count);

/// max{0, max_j -w(I_j), max_{a<b} w(I_b) - w(I_a)}
double nemirovski_value(std::span<const double> w, const BlockStructure& blocks);

/// A complete hard instance: parameters, code, and the blocks for v*.
struct HardInstance {
  InstanceParams params;
  code::BinaryCode code;
  BlockStructure blocks;

  double g_value(std::span<const double> w, const code::DataPoint& point) const;
  /// g + alpha N
  double f_value(std::span<const double> w, const code::DataPoint& point) const;
  /// E_V[f(w, V)] computed exactly.
  double population_f(std::span<const double> w) const;
};

HardInstance build_instance(const InstanceParams& params, code::BinaryCode code, int vstar);

struct OracleOptions {
  /// Fault injection: test for a zero block before looking for equal pairs.
  bool raise_before_swap = false;
};

/// Which rule fires at a given block state.
struct OracleDecision {
  CaseTag tag = CaseTag::zero;
  int j = -1;  // block index (the lower block for a swap)
};

/// Oracle decision on integer block states, where block j holds
/// w(I_j) = eta alpha * state[j]. Exact.
OracleDecision lattice_decision(int t, const std::vector<long>& state, OracleOptions options = {});

/// Applies one oracle step to an integer block state in place.
OracleDecision lattice_step(int t, std::vector<long>& state, OracleOptions options = {});

/// Adversarial subgradient of alpha N at w for iteration t.
///
/// At t = 1 and w = 0 returns 0. Otherwise, when 0 is in dN(w) (N(w) = 0):
/// swap for the least j with w(I_j) = w(I_{j+1}) >= eta alpha, else raise the
/// least zero block, else 0. Off the trajectory (N(w) > 0) the gradient of the
/// lexicographically first maximizing affine term is returned with tag
/// `outside`. Comparisons use absolute tolerance eta alpha 1e-9.
///
/// Throws NotASubgradient if the result is not alpha times the gradient of an
/// active affine term.
Subgradient oracle_step(int t, std::span<const double> w, const BlockStructure& blocks,
                        const InstanceParams& params, OracleOptions options = {});

/// Largest w·v over code vectors other than v*.
double max_competitor_dot(std::span<const double> w, const BlockStructure& blocks,
                          const code::BinaryCode& code);

/// tau - max_{v != v*} w·v. Nonnegative means the threshold branch of g is
/// active for every data point that excludes v*, so 0 is in dg(w, V).
double g_inactivity_margin(std::span<const double> w, const BlockStructure& blocks,
                           const code::BinaryCode& code, const InstanceParams& params);

/// Subgradient of g(., V) at w: v/sqrt(d) for the first maximizing v when some
/// w·v exceeds tau, otherwise 0.
Vec g_subgradient(std::span<const double> w, const code::DataPoint& point,
                  const code::BinaryCode& code, double tau);

/// A valid element of df(w, V) everywhere: oracle_step plus g_subgradient.
Subgradient f_subgradient(int t, std::span<const double> w, const code::DataPoint& point,
                          const HardInstance& inst);

/// The sample-dependent oracle used by gradient descent: the alpha N oracle,
/// checked against every data point of the sample. Throws NotASubgradient if
/// the threshold branch of g is not active at some sample point (the caller
/// left the nominal trajectory).
class SampleOracle {
 public:
  SampleOracle(const HardInstance& inst, const code::Sample& sample, OracleOptions options = {});
  Subgradient operator()(int t, std::span<const double> w, std::size_t z) const;

 private:
  const HardInstance* inst_;
  const code::Sample* sample_;
  OracleOptions options_;
};

/// Subgradient inequality f(w') >= f(w) + g·(w' - w) at every probe, with
/// relative tolerance 1e-9. Returns the most negative normalized slack.
double subgradient_inequality_slack(const HardInstance& inst, const code::DataPoint& point,
                                    std::span<const double> w, std::span<const double> g,
                                    const std::vector<Vec>& probes);

/// Largest |f(w1) - f(w2)| / |w1 - w2| over random pairs in the unit ball.
double lipschitz_probe(const HardInstance& inst, const code::DataPoint& point, int pairs,
                       std::uint64_t seed);

/// Random point uniformly distributed in the unit ball.
Vec random_ball_point(std::size_t dim, std::mt19937_64& rng);

std::string to_json(const InstanceParams& params);
InstanceParams params_from_json(const std::string& text);

/// Exact-arithmetic mirror of a hard instance. All constants are the exact
/// rational values of the double parameters; requires d and k to be perfect
/// squares so that 1/sqrt(d) and 1/sqrt(k) are rational.
class ExactInstance {
 public:
  explicit ExactInstance(const HardInstance& inst);

  std::size_t dimension() const { return static_cast<std::size_t>(d_); }
  const HardInstance& source() const { return *inst_; }

  Rational block_value(const RVec& w, std::size_t j) const;
  Rational nemirovski_value(const RVec& w) const;
  Rational g_value(const RVec& w, const code::DataPoint& point) const;
  Rational f_value(const RVec& w, const code::DataPoint& point) const;
  /// The adversarial alpha N oracle in exact arithmetic (same rules as
  /// oracle_step with exact comparisons).
  RVec alpha_n_oracle(int t, const RVec& w) const;
  /// Valid element of df(w, V): alpha N oracle plus the g subgradient.
  RVec f_subgradient(int t, const RVec& w, const code::DataPoint& point) const;

  const Rational& eta() const { return eta_; }
  const Rational& alpha() const { return alpha_; }

 private:
  const HardInstance* inst_;
  int d_;
  Rational eta_, alpha_, tau_, inv_sqrt_d_, inv_sqrt_k_;
};

}  // namespace gdgap::instance
