#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gdgap/hard_instance.hpp"
#include "gdgap/interpolation.hpp"
#include "gdgap/rational.hpp"
#include "gdgap/sample_encoder.hpp"

namespace gdgap::red {

using enc::Batch;
using enc::SampleSequence;

/// Exact description of a loss f(w, z) over Z = {0, ..., domain-1} together
/// with its sample-dependent oracle O^t(S_{1:t-1}, w, z).
struct ExactProblem {
  std::size_t dim = 0;
  std::size_t domain = 0;
  Rational lipschitz = 1;
  std::function<Rational(const RVec& w, std::size_t z)> value;
  std::function<RVec(int t, std::span<const Batch> prefix, const RVec& w, std::size_t z)> oracle;
  /// Any element of df(w, z); used at the weighted-output points.
  std::function<RVec(const RVec& w, std::size_t z)> subgradient;
};

/// Encoding coordinate parameters: gamma, eta and one alpha per point.
struct Encoder {
  Rational gamma;
  Rational eta;
  RVec alpha;
};

/// 1/2 gamma (x^2 - 2 alpha(z) x)
Rational h_value(const Rational& x, std::size_t z, const Rational& gamma, const RVec& alpha);
/// gamma (x - alpha(z))
Rational h_grad(const Rational& x, std::size_t z, const Rational& gamma, const RVec& alpha);
double h_value(double x, std::size_t z, double gamma, const Vec& alpha);
double h_grad(double x, std::size_t z, double gamma, const Vec& alpha);

/// Rational alpha(z): the exact binary value of frac(sqrt(p_z)).
RVec rational_alpha(std::size_t domain);

struct Scope {
  enum class Mode { exhaustive, realized };
  Mode mode = Mode::exhaustive;
  std::size_t budget = 4096;         // maximal number of sequences
  int m = 1;                         // batch size (exhaustive)
  bool multisets = false;            // exhaustive batches are subsets unless set
  std::vector<SampleSequence> sequences;  // realized mode
};

/// Every sequence the scope covers. Throws BudgetExceeded.
std::vector<SampleSequence> scope_sequences(const Scope& scope, std::size_t domain, int T);

/// gamma from the encoder polynomials of every prefix and output in the
/// sequences, with gamma <= eps / (eta T).
Encoder make_encoder(const std::vector<SampleSequence>& sequences, std::size_t domain,
                     const std::vector<Rational>& q, const Rational& eps, const Rational& eta);

/// Nominal exact GD on f with the encoder: w_0 = 0, x_0 = 0 and, for s < T,
/// w_{s+1} = w_s - eta avg_{z in S_{s+1}} O^{s+1}(S_{1:s}, w_s, z),
/// x_{s+1} = (1 - gamma eta) x_s + gamma eta alpha(S_{s+1}).
struct ExactTrajectory {
  SampleSequence sequence;
  std::vector<RVec> w;              // w_0 .. w_T
  std::vector<Rational> x;          // x_0 .. x_T
  RVec wq;
  Rational xq;
};

ExactTrajectory nominal_trajectory(const ExactProblem& problem, const Encoder& encoder,
                                   const SampleSequence& sequence, const std::vector<Rational>& q);

/// Where a triplet came from: a prefix state at step s, or a weighted output.
struct TripletOrigin {
  bool output = false;
  int step = 0;  // s for states, T + 1 for outputs
  SampleSequence prefix;
};

struct TripletSetG {
  int T = 0;
  Rational gamma;
  std::vector<std::vector<interp::Triplet<Rational>>> triplets;  // per z, dimension d + 1
  std::vector<std::vector<TripletOrigin>> origins;               // parallel to triplets
  std::vector<ExactTrajectory> trajectories;

  std::size_t size(std::size_t z) const { return triplets[z].size(); }
};

/// Triplets for every prefix state (s = 0..T, deduplicated by prefix) and one
/// weighted-output triplet per sequence, for every z in Z.
TripletSetG build_G(const ExactProblem& problem, const Encoder& encoder,
                    const std::vector<SampleSequence>& sequences, const std::vector<Rational>& q);

struct Strictness {
  Rational margin;          // min slack over pairs with distinct gradients and a state first
  bool found = false;       // false when no such pair exists
  bool positive = false;
  bool half_gamma_bound = false;  // every pair's slack >= gamma/2 (x1 - x2)^2
  std::size_t first = 0;
  std::size_t second = 0;
};

Strictness strictness_margin(const TripletSetG& G, std::size_t z);

/// Certified max-of-affine models, one per z. Throws NotInterpolable.
std::vector<interp::Model<Rational>> build_bar_f(const TripletSetG& G, const Rational& lipschitz);

struct DiffReport {
  bool before_last = true;  // every state with s <= T - 1 is in the diff set
  bool at_last = true;      // states with s = T (reported only)
};

DiffReport differentiability(const TripletSetG& G,
                             const std::vector<interp::Model<Rational>>& models);

/// GD on the extensions where each query returns a random convex combination
/// of the active gradients. Throws TrajectoryDiverged(t) when u_t leaves the
/// nominal (w_t, x_t).
struct ReplayResult {
  std::vector<RVec> u;  // u_0 .. u_T in dimension d + 1
  RVec uq;
  bool output_matches = false;  // u_q = (w_q, x_q) exactly
  double max_output_error = 0.0;
};

ReplayResult adversarial_replay(const std::vector<interp::Model<Rational>>& models,
                                const ExactTrajectory& nominal, const Rational& eta,
                                const std::vector<Rational>& q, std::uint64_t seed);

/// Largest |h_z(x_q)| over sequences and z: the gap between the extension and
/// f at the weighted outputs.
Rational output_value_gap(const TripletSetG& G, const Encoder& encoder, std::size_t domain);

/// f(w, z) = a max{0, max_i -w(i)} in dimension 2T + 2 with an oracle that
/// raises coordinate 2(t-1) + [S_{t-1} = {marked}] (coordinate 0 at t = 1), for
/// t <= T + 1.
ExactProblem prefix_toy(int T, const Rational& a, std::size_t domain, std::size_t marked);

/// Exact problem for a hard instance with Z = the sample's data points.
/// Requires perfect-square d and k.
ExactProblem hard_instance_problem(const instance::ExactInstance& exact, const code::Sample& sample);

std::string model_to_json(const interp::Model<Rational>& model);

}  // namespace gdgap::red
