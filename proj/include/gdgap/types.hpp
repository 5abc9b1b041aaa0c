#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gdgap {

using Vec = std::vector<double>;

// Error taxonomy shared by all modules. Each carries a message; a few carry
// the structured payload callers need to report the failure.

class ConstructionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                              ", got " + std::to_string(got)),
        expected_(expected),
        got_(got) {}
  std::size_t expected() const { return expected_; }
  std::size_t got() const { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

class NotASubgradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfPhase : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Exhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TrajectoryDiverged : public std::runtime_error {
 public:
  explicit TrajectoryDiverged(int step)
      : std::runtime_error("replayed trajectory diverged at step " + std::to_string(step)),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class NotInterpolable : public std::runtime_error {
 public:
  NotInterpolable(std::size_t i, std::size_t j, double slack)
      : std::runtime_error("triplets not interpolable: pair (" + std::to_string(i) + ", " +
                           std::to_string(j) + ") has slack " + std::to_string(slack)),
        i_(i),
        j_(j),
        slack_(slack) {}
  std::size_t i() const { return i_; }
  std::size_t j() const { return j_; }
  double slack() const { return slack_; }

 private:
  std::size_t i_;
  std::size_t j_;
  double slack_;
};

/// Which branch of the adversarial oracle produced a subgradient.
enum class CaseTag { none, swap, raise, zero, outside };

const char* to_string(CaseTag tag);

struct Subgradient {
  Vec vector;
  CaseTag tag = CaseTag::none;

  /// Nonzero entries as (index, value) pairs, for debug dumps.
  std::vector<std::pair<std::size_t, double>> sparse() const;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

// splitmix64 finalizer; used to derive per-trial seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw. Used instead
// of std::uniform_real_distribution so streams are identical across stdlibs.
template <class Engine>
double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace gdgap
