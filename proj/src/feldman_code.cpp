#include "gdgap/feldman_code.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

namespace gdgap::code {

using nlohmann::json;

BinaryCode::BinaryCode(int dimension) : dimension_(dimension) {
  if (dimension <= 0) throw std::invalid_argument("BinaryCode: dimension must be positive");
}

BinaryCode::BinaryCode(int dimension, std::vector<std::vector<std::uint64_t>> rows)
    : BinaryCode(dimension) {
  for (auto& r : rows) push_back(std::move(r));
}

bool BinaryCode::bit(std::size_t row, int i) const {
  return (rows_[row][static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1ULL;
}

void BinaryCode::set_bit(std::size_t row, int i, bool value) {
  auto& word = rows_[row][static_cast<std::size_t>(i) / 64];
  const std::uint64_t mask = 1ULL << (i % 64);
  word = value ? (word | mask) : (word & ~mask);
}

void BinaryCode::push_back(std::vector<std::uint64_t> row) {
  if (row.size() != words()) throw DimensionMismatch(words(), row.size());
  if (dimension_ % 64 != 0 && !row.empty()) {
    row.back() &= (1ULL << (dimension_ % 64)) - 1;
  }
  rows_.push_back(std::move(row));
}

int BinaryCode::dot(std::size_t a, std::size_t b) const {
  int s = 0;
  const auto& ra = rows_[a];
  const auto& rb = rows_[b];
  for (std::size_t k = 0; k < ra.size(); ++k) s += std::popcount(ra[k] & rb[k]);
  return s;
}

std::vector<int> BinaryCode::support(std::size_t row) const {
  std::vector<int> out;
  for (int i = 0; i < dimension_; ++i) {
    if (bit(row, i)) out.push_back(i);
  }
  return out;
}

double BinaryCode::dot(std::size_t row, std::span<const double> w) const {
  if (w.size() != static_cast<std::size_t>(dimension_)) {
    throw DimensionMismatch(static_cast<std::size_t>(dimension_), w.size());
  }
  double s = 0.0;
  const auto& r = rows_[row];
  for (std::size_t k = 0; k < r.size(); ++k) {
    std::uint64_t word = r[k];
    while (word != 0) {
      const int b = std::countr_zero(word);
      s += w[k * 64 + static_cast<std::size_t>(b)];
      word &= word - 1;
    }
  }
  return s;
}

bool DataPoint::contains(int v) const {
  return std::binary_search(included.begin(), included.end(), v);
}

namespace {

std::vector<std::uint64_t> random_row(std::mt19937_64& rng, std::size_t words) {
  std::vector<std::uint64_t> row(words);
  for (auto& w : row) w = rng();
  return row;
}

}  // namespace

BinaryCode build_code(int d, std::size_t target_size, std::uint64_t seed, int max_rounds) {
  if (d < 16 || d % 16 != 0) {
    throw std::invalid_argument("build_code: d must be a positive multiple of 16");
  }
  if (target_size == 0) throw std::invalid_argument("build_code: target_size must be >= 1");
  if (d < 63 && target_size > (1ULL << d)) {
    throw ConstructionFailed("build_code: more vectors requested than exist in {0,1}^" +
                             std::to_string(d));
  }

  std::mt19937_64 rng(seed);
  BinaryCode code(d);
  for (std::size_t i = 0; i < target_size; ++i) code.push_back(random_row(rng, code.words()));

  std::vector<char> offending(target_size, 0);
  for (int round = 0; round < max_rounds; ++round) {
    std::fill(offending.begin(), offending.end(), 0);
    bool any = false;
    for (std::size_t a = 0; a < target_size; ++a) {
      if (code.weight(a) < code.self_bound()) {
        offending[a] = 1;
        any = true;
      }
    }
    // Later row of each violating pair is resampled; the earlier one is kept.
    for (std::size_t b = 1; b < target_size; ++b) {
      if (offending[b]) continue;
      for (std::size_t a = 0; a < b; ++a) {
        if (offending[a]) continue;
        if (code.dot(a, b) > code.pair_bound()) {
          offending[b] = 1;
          any = true;
          break;
        }
      }
    }
    if (!any) return code;

    BinaryCode next(d);
    for (std::size_t a = 0; a < target_size; ++a) {
      next.push_back(offending[a] ? random_row(rng, code.words()) : code.row(a));
    }
    code = std::move(next);
  }
  throw ConstructionFailed("build_code: no valid code of size " + std::to_string(target_size) +
                           " at d=" + std::to_string(d) + " after " +
                           std::to_string(max_rounds) + " rounds");
}

CertReport verify_code(const BinaryCode& code) {
  CertReport report;
  const std::size_t n = code.size();
  for (std::size_t a = 0; a < n; ++a) {
    const int self = code.weight(a);
    if (report.min_self_dot < 0 || self < report.min_self_dot) {
      report.min_self_dot = self;
      report.worst_self = a;
    }
    for (std::size_t b = a + 1; b < n; ++b) {
      const int pd = code.dot(a, b);
      if (pd > report.max_pair_dot) {
        report.max_pair_dot = pd;
        report.worst_pair_a = a;
        report.worst_pair_b = b;
      }
    }
  }
  report.pairs_ok = n < 2 || report.max_pair_dot <= code.pair_bound();
  report.weights_ok = n == 0 || report.min_self_dot >= code.self_bound();
  report.pass = report.pairs_ok && report.weights_ok;
  return report;
}

double choose_epsilon(int d, int m) {
  if (d < 1 || m < 1) throw std::invalid_argument("choose_epsilon: d and m must be >= 1");
  return std::min(static_cast<double>(d) / (520.0 * m), 0.25);
}

Sample draw_sample(const BinaryCode& code, int m, double epsilon, std::uint64_t seed) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("draw_sample: epsilon must lie in (0, 1]");
  }
  if (m < 1) throw std::invalid_argument("draw_sample: m must be >= 1");
  std::mt19937_64 rng(seed);
  Sample sample;
  sample.epsilon = epsilon;
  sample.seed = seed;
  sample.points.resize(static_cast<std::size_t>(m));
  for (auto& point : sample.points) {
    for (std::size_t v = 0; v < code.size(); ++v) {
      if (uniform01(rng) < epsilon) point.included.push_back(static_cast<int>(v));
    }
  }
  return sample;
}

std::optional<int> find_uncovered(const BinaryCode& code, const Sample& sample) {
  std::vector<char> covered(code.size(), 0);
  for (const auto& p : sample.points) {
    for (int v : p.included) covered[static_cast<std::size_t>(v)] = 1;
  }
  for (std::size_t v = 0; v < covered.size(); ++v) {
    if (!covered[v]) return static_cast<int>(v);
  }
  return std::nullopt;
}

double g_value(std::span<const double> w, const DataPoint& point, const BinaryCode& code,
               double tau) {
  if (w.size() != static_cast<std::size_t>(code.dimension())) {
    throw DimensionMismatch(static_cast<std::size_t>(code.dimension()), w.size());
  }
  double best = tau;
  for (int v : point.included) best = std::max(best, code.dot(static_cast<std::size_t>(v), w));
  return best / std::sqrt(static_cast<double>(code.dimension()));
}

double population_g(std::span<const double> w, const BinaryCode& code, double epsilon,
                    double tau) {
  if (w.size() != static_cast<std::size_t>(code.dimension())) {
    throw DimensionMismatch(static_cast<std::size_t>(code.dimension()), w.size());
  }
  std::vector<std::pair<double, std::size_t>> values;
  values.reserve(code.size());
  for (std::size_t v = 0; v < code.size(); ++v) values.emplace_back(code.dot(v, w), v);
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  double expectation = 0.0;
  double none_before = 1.0;  // (1 - eps)^rank
  for (const auto& [c, v] : values) {
    if (c <= tau) break;
    expectation += c * epsilon * none_before;
    none_before *= 1.0 - epsilon;
  }
  expectation += tau * none_before;
  return expectation / std::sqrt(static_cast<double>(code.dimension()));
}

double coverage_probability(std::size_t code_size, int m, double epsilon) {
  const double uncovered_one = std::pow(1.0 - epsilon, m);
  return 1.0 - std::pow(1.0 - uncovered_one, static_cast<double>(code_size));
}

std::string bits_to_hex(const std::vector<bool>& bits) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out((bits.size() + 3) / 4, '0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    const std::size_t nib = i / 4;
    const int shift = 3 - static_cast<int>(i % 4);
    const int val = (std::string_view(digits).find(out[nib])) | (1 << shift);
    out[nib] = digits[val];
  }
  return out;
}

std::vector<bool> hex_to_bits(const std::string& hex, std::size_t nbits) {
  if (hex.size() != (nbits + 3) / 4) {
    throw std::invalid_argument("hex_to_bits: expected " + std::to_string((nbits + 3) / 4) +
                                " hex digits, got " + std::to_string(hex.size()));
  }
  std::vector<bool> bits(nbits, false);
  for (std::size_t nib = 0; nib < hex.size(); ++nib) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(hex[nib])));
    int val = 0;
    if (c >= '0' && c <= '9') {
      val = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      val = c - 'a' + 10;
    } else {
      throw std::invalid_argument("hex_to_bits: invalid digit");
    }
    for (int b = 0; b < 4; ++b) {
      const std::size_t i = nib * 4 + static_cast<std::size_t>(b);
      if ((val >> (3 - b)) & 1) {
        if (i >= nbits) throw std::invalid_argument("hex_to_bits: padding bits set");
        bits[i] = true;
      }
    }
  }
  return bits;
}

std::string to_json(const BinaryCode& code, std::uint64_t seed) {
  json rows = json::array();
  for (std::size_t r = 0; r < code.size(); ++r) {
    std::vector<bool> bits(static_cast<std::size_t>(code.dimension()));
    for (int i = 0; i < code.dimension(); ++i) bits[static_cast<std::size_t>(i)] = code.bit(r, i);
    rows.push_back(bits_to_hex(bits));
  }
  json doc = {{"format", "gdgap.code"}, {"version", 1},  {"dimension", code.dimension()},
              {"seed", seed},           {"rows", rows}};
  return doc.dump(2);
}

BinaryCode code_from_json(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.at("format") != "gdgap.code" || doc.at("version") != 1) {
    throw std::invalid_argument("code_from_json: unsupported document");
  }
  const int d = doc.at("dimension").get<int>();
  BinaryCode code(d);
  for (const auto& row : doc.at("rows")) {
    const auto bits = hex_to_bits(row.get<std::string>(), static_cast<std::size_t>(d));
    code.push_back(std::vector<std::uint64_t>(code.words(), 0));
    for (int i = 0; i < d; ++i) code.set_bit(code.size() - 1, i, bits[static_cast<std::size_t>(i)]);
  }
  return code;
}

std::string to_json(const Sample& sample, std::size_t code_size) {
  json rows = json::array();
  for (const auto& p : sample.points) {
    std::vector<bool> bits(code_size, false);
    for (int v : p.included) bits.at(static_cast<std::size_t>(v)) = true;
    rows.push_back(bits_to_hex(bits));
  }
  json doc = {{"format", "gdgap.sample"}, {"version", 1},        {"code_size", code_size},
              {"epsilon", sample.epsilon}, {"seed", sample.seed}, {"points", rows}};
  return doc.dump(2);
}

Sample sample_from_json(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.at("format") != "gdgap.sample" || doc.at("version") != 1) {
    throw std::invalid_argument("sample_from_json: unsupported document");
  }
  Sample sample;
  sample.epsilon = doc.at("epsilon").get<double>();
  sample.seed = doc.at("seed").get<std::uint64_t>();
  const auto n = doc.at("code_size").get<std::size_t>();
  for (const auto& row : doc.at("points")) {
    const auto bits = hex_to_bits(row.get<std::string>(), n);
    DataPoint p;
    for (std::size_t v = 0; v < n; ++v) {
      if (bits[v]) p.included.push_back(static_cast<int>(v));
    }
    sample.points.push_back(std::move(p));
  }
  return sample;
}

}  // namespace gdgap::code
