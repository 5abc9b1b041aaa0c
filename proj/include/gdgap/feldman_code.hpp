#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdgap/types.hpp"

namespace gdgap::code {

/// A family of 0/1 vectors in dimension d with bounded pairwise overlap
/// (v1·v2 <= 5d/16 for distinct members) and large weight (v·v >= 7d/16).
/// Rows are packed little-endian into 64-bit words.
class BinaryCode {
 public:
  BinaryCode() = default;
  explicit BinaryCode(int dimension);
  BinaryCode(int dimension, std::vector<std::vector<std::uint64_t>> rows);

  int dimension() const { return dimension_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  bool bit(std::size_t row, int i) const;
  void set_bit(std::size_t row, int i, bool value);
  void push_back(std::vector<std::uint64_t> row);
  const std::vector<std::uint64_t>& row(std::size_t r) const { return rows_[r]; }

  int dot(std::size_t a, std::size_t b) const;
  int weight(std::size_t a) const { return dot(a, a); }

  /// Indices i with v(i) = 1, ascending.
  std::vector<int> support(std::size_t row) const;

  /// w·v for the given row.
  double dot(std::size_t row, std::span<const double> w) const;

  std::size_t words() const { return static_cast<std::size_t>((dimension_ + 63) / 64); }

  /// Bounds of the certificate at this dimension: 5d/16 and 7d/16.
  int pair_bound() const { return 5 * dimension_ / 16; }
  int self_bound() const { return 7 * dimension_ / 16; }

 private:
  int dimension_ = 0;
  std::vector<std::vector<std::uint64_t>> rows_;
};

struct CertReport {
  bool pass = true;
  bool pairs_ok = true;
  bool weights_ok = true;
  /// Largest v1·v2 over distinct index pairs (-1 when fewer than two rows).
  int max_pair_dot = -1;
  /// Smallest v·v (-1 for an empty code).
  int min_self_dot = -1;
  std::size_t worst_pair_a = 0;
  std::size_t worst_pair_b = 0;
  std::size_t worst_self = 0;
};

/// Subset of code indices included in one random data point. May be empty.
struct DataPoint {
  std::vector<int> included;  // ascending
  bool contains(int v) const;
  friend bool operator==(const DataPoint&, const DataPoint&) = default;
  friend auto operator<=>(const DataPoint&, const DataPoint&) = default;
};

struct Sample {
  std::vector<DataPoint> points;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t size() const { return points.size(); }
};

/// Random code built by resample-and-reject. Each round resamples every row
/// that is too light or that collides with an earlier row; the result is a
/// deterministic function of the seed.
BinaryCode build_code(int d, std::size_t target_size, std::uint64_t seed, int max_rounds = 10000);

/// Exhaustive O(|V|^2 d) certificate check.
CertReport verify_code(const BinaryCode& code);

/// min{d / (520 m), 1/4}
double choose_epsilon(int d, int m);

/// m independent data points, each code index included with probability epsilon.
Sample draw_sample(const BinaryCode& code, int m, double epsilon, std::uint64_t seed);

/// Least code index not included in any data point of the sample.
std::optional<int> find_uncovered(const BinaryCode& code, const Sample& sample);

/// (1/sqrt d) max{tau, max_{v in V} w·v}; tau/sqrt(d) for an empty V.
double g_value(std::span<const double> w, const DataPoint& point, const BinaryCode& code,
               double tau);

/// Exact E_V[g(w, V)] under independent epsilon-inclusion.
///
/// The values c_v = w·v are sorted in decreasing order (ties by ascending
/// index); the maximum equals the first included c_v above tau, so each such
/// c_v contributes c_v * eps * (1-eps)^rank and the threshold contributes
/// tau * (1-eps)^{#c_v > tau}.
double population_g(std::span<const double> w, const BinaryCode& code, double epsilon,
                    double tau);

/// Probability that at least one code vector is left uncovered by m points:
/// 1 - (1 - (1-eps)^m)^|V|.
double coverage_probability(std::size_t code_size, int m, double epsilon);

// Versioned JSON documents. Rows are hex strings read left to right: character
// j holds bits 4j..4j+3 with bit 4j as the most significant bit of the nibble.
std::string to_json(const BinaryCode& code, std::uint64_t seed);
BinaryCode code_from_json(const std::string& text);
std::string to_json(const Sample& sample, std::size_t code_size);
Sample sample_from_json(const std::string& text);

std::string bits_to_hex(const std::vector<bool>& bits);
std::vector<bool> hex_to_bits(const std::string& hex, std::size_t nbits);

}  // namespace gdgap::code
