#include "gdgap/hard_instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace gdgap::instance {

namespace {

bool is_power_of_two(long x) { return x > 0 && (x & (x - 1)) == 0; }

long isqrt_exact(long x) {
  auto r = static_cast<long>(std::llround(std::sqrt(static_cast<double>(x))));
  return r * r == x ? r : -1;
}

// Shared rule ordering for the double, exact and lattice oracles.
template <class Values, class Eq, class AtLeastUnit, class IsZero>
OracleDecision decide(const Values& vals, Eq eq, AtLeastUnit at_least_unit, IsZero is_zero,
                      OracleOptions options) {
  const auto n = static_cast<int>(vals.size());
  auto find_swap = [&]() -> int {
    for (int j = 0; j + 1 < n; ++j) {
      if (eq(vals[j], vals[j + 1]) && at_least_unit(vals[j])) return j;
    }
    return -1;
  };
  auto find_raise = [&]() -> int {
    for (int j = 0; j < n; ++j) {
      if (is_zero(vals[j])) return j;
    }
    return -1;
  };
  if (options.raise_before_swap) {
    if (int j = find_raise(); j >= 0) return {CaseTag::raise, j};
    if (int j = find_swap(); j >= 0) return {CaseTag::swap, j};
  } else {
    if (int j = find_swap(); j >= 0) return {CaseTag::swap, j};
    if (int j = find_raise(); j >= 0) return {CaseTag::raise, j};
  }
  return {CaseTag::zero, -1};
}

}  // namespace

double nemirovski_scale(double eta, long T) {
  if (!(eta > 0.0) || T < 1) throw ConfigError("nemirovski_scale: need eta > 0 and T >= 1");
  return std::min(1.0 / (eta * std::sqrt(2.0 * static_cast<double>(T))), 1.0);
}

double threshold(double eta, double alpha, int d, int k) {
  const double dd = static_cast<double>(d);
  return 45.0 * eta * alpha * dd * dd / (2.0 * 256.0 * std::pow(static_cast<double>(k), 1.5));
}

BlockWidthChoice block_width(int d, long T) {
  if (d < 1 || T < 1) throw ConfigError("block_width: need d >= 1 and T >= 1");
  BlockWidthChoice choice;
  const long double d3 = static_cast<long double>(d) * d * d;
  const auto cap = static_cast<long>(34.0L * d3);
  choice.capped = T > cap;
  choice.horizon = choice.capped ? cap : T;
  // d <= k (T/17)^{1/3}  <=>  17 d^3 <= k^3 T, compared in long double.
  long k = 1;
  while (k < d && 17.0L * d3 > static_cast<long double>(k) * k * k * choice.horizon) k *= 2;
  choice.k = static_cast<int>(std::min<long>(k, d));
  return choice;
}

int staircase_blocks(int d, int k) { return (7 * d / 16) / k; }

long terminal_time(long n) { return 1 + n * (n + 1) * (n + 2) / 6; }

int staircase_block_width(int d, long horizon) {
  for (int k = 1; k <= d; k *= 2) {
    const int n = staircase_blocks(d, k);
    if (d % k == 0 && n >= 1 && 17 * terminal_time(n) <= horizon) return k;
  }
  for (int k = 1; k <= d; k *= 2) {
    const int n = staircase_blocks(d, k);
    if (d % k == 0 && n >= 1 && terminal_time(n) <= horizon) return k;
  }
  return d;
}

InstanceParams make_params(int d, int m, long T, double eta, BlockWidthPolicy policy,
                           int k_explicit, std::optional<double> epsilon) {
  if (d < 16 || d % 16 != 0) throw ConfigError("make_params: d must be a positive multiple of 16");
  if (m < 1) throw ConfigError("make_params: m must be >= 1");
  if (T < 1) throw ConfigError("make_params: T must be >= 1");
  if (!(eta > 0.0)) throw ConfigError("make_params: eta must be positive");

  InstanceParams p;
  p.d = d;
  p.m = m;
  p.T = T;
  p.eta = eta;
  if (policy == BlockWidthPolicy::explicit_k) {
    if (!is_power_of_two(k_explicit) || d % k_explicit != 0) {
      throw ConfigError("make_params: k must be a power of two dividing d");
    }
    p.k = k_explicit;
    p.horizon = T;
    p.capped = false;
  } else {
    const BlockWidthChoice bracket = block_width(d, T);
    p.horizon = bracket.horizon;
    p.capped = bracket.capped;
    p.k = policy == BlockWidthPolicy::paper_bracket ? bracket.k
                                                     : staircase_block_width(d, p.horizon);
  }
  p.epsilon = epsilon.value_or(code::choose_epsilon(d, m));
  if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) throw ConfigError("make_params: epsilon must lie in (0, 1]");
  p.alpha = nemirovski_scale(eta, p.horizon);
  p.tau = threshold(eta, p.alpha, d, p.k);
  return p;
}

std::vector<int> BlockStructure::coordinates() const {
  std::vector<int> out;
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

BlockStructure build_blocks(const code::BinaryCode& code, int vstar, int k) {
  if (vstar < 0 || static_cast<std::size_t>(vstar) >= code.size()) {
    throw std::out_of_range("build_blocks: vstar is not a code index");
  }
  if (k < 1) throw ConfigError("build_blocks: k must be >= 1");
  BlockStructure bs;
  bs.dimension = code.dimension();
  bs.vstar = vstar;
  bs.k = k;
  const auto support = code.support(static_cast<std::size_t>(vstar));
  const int wanted = std::min<int>(7 * code.dimension() / 16, static_cast<int>(support.size()));
  const int n = wanted / k;
  bs.dprime = n * k;
  for (int j = 0; j < n; ++j) {
    bs.blocks.emplace_back(support.begin() + j * k, support.begin() + (j + 1) * k);
  }
  return bs;
}

BlockStructure all_coordinates(int d) {
  BlockStructure bs;
  bs.dimension = d;
  bs.k = 1;
  bs.dprime = d;
  for (int i = 0; i < d; ++i) bs.blocks.push_back({i});
  return bs;
}

double block_value(std::span<const double> w, const std::vector<int>& block) {
  double s = 0.0;
  for (int i : block) s += w[static_cast<std::size_t>(i)];
  return s / std::sqrt(static_cast<double>(block.size()));
}

std::vector<double> block_values(std::span<const double> w, const BlockStructure& blocks) {
  if (w.size() != static_cast<std::size_t>(blocks.dimension)) {
    throw DimensionMismatch(static_cast<std::size_t>(blocks.dimension), w.size());
  }
  std::vector<double> out;
  out.reserve(blocks.count());
  for (const auto& b : blocks.blocks) out.push_back(block_value(w, b));
  return out;
}

double AffineTerm::value(std::span<const double> vals) const {
  switch (kind) {
    case Kind::constant: return 0.0;
    case Kind::negate: return -vals[static_cast<std::size_t>(a)];
    case Kind::difference:
      return vals[static_cast<std::size_t>(b)] - vals[static_cast<std::size_t>(a)];
  }
  return 0.0;
}

Vec AffineTerm::gradient(const BlockStructure& blocks) const {
  Vec g(static_cast<std::size_t>(blocks.dimension), 0.0);
  auto add_block = [&](int j, double sign) {
    const auto& block = blocks.blocks[static_cast<std::size_t>(j)];
    const double c = sign / std::sqrt(static_cast<double>(block.size()));
    for (int i : block) g[static_cast<std::size_t>(i)] += c;
  };
  if (kind == Kind::negate) add_block(a, -1.0);
  if (kind == Kind::difference) {
    add_block(b, 1.0);
    add_block(a, -1.0);
  }
  return g;
}

std::vector<AffineTerm> nemirovski_terms(std::size_t n) {
  std::vector<AffineTerm> terms;
  terms.push_back({AffineTerm::Kind::constant, -1, -1});
  for (std::size_t j = 0; j < n; ++j) {
    terms.push_back({AffineTerm::Kind::negate, static_cast<int>(j), -1});
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      terms.push_back({AffineTerm::Kind::difference, static_cast<int>(a), static_cast<int>(b)});
    }
  }
  return terms;
}

namespace {

// max over all terms in O(n) using a running minimum for the difference terms.
template <class S>
S nemirovski_from_blocks(const std::vector<S>& vals) {
  S best = 0;
  S running_min = 0;
  for (std::size_t j = 0; j < vals.size(); ++j) {
    if (-vals[j] > best) best = -vals[j];
    if (j > 0 && vals[j] - running_min > best) best = vals[j] - running_min;
    if (j == 0 || vals[j] < running_min) running_min = vals[j];
  }
  return best;
}

}  // namespace

double nemirovski_value(std::span<const double> w, const BlockStructure& blocks) {
  return nemirovski_from_blocks(block_values(w, blocks));
}

double HardInstance::g_value(std::span<const double> w, const code::DataPoint& point) const {
  return code::g_value(w, point, code, params.tau);
}

double HardInstance::f_value(std::span<const double> w, const code::DataPoint& point) const {
  return g_value(w, point) + params.alpha * nemirovski_value(w, blocks);
}

double HardInstance::population_f(std::span<const double> w) const {
  return code::population_g(w, code, params.epsilon, params.tau) +
         params.alpha * nemirovski_value(w, blocks);
}

HardInstance build_instance(const InstanceParams& params, code::BinaryCode code, int vstar) {
  if (code.dimension() != params.d) {
    throw DimensionMismatch(static_cast<std::size_t>(params.d),
                            static_cast<std::size_t>(code.dimension()));
  }
  HardInstance inst;
  inst.params = params;
  inst.blocks = build_blocks(code, vstar, params.k);
  inst.code = std::move(code);
  return inst;
}

OracleDecision lattice_decision(int t, const std::vector<long>& state, OracleOptions options) {
  const bool origin = std::all_of(state.begin(), state.end(), [](long b) { return b == 0; });
  if (t == 1 && origin) return {CaseTag::zero, -1};
  if (nemirovski_from_blocks(state) > 0) return {CaseTag::outside, -1};
  return decide(
      state, [](long a, long b) { return a == b; }, [](long a) { return a >= 1; },
      [](long a) { return a == 0; }, options);
}

OracleDecision lattice_step(int t, std::vector<long>& state, OracleOptions options) {
  const OracleDecision dec = lattice_decision(t, state, options);
  if (dec.tag == CaseTag::swap) {
    state[static_cast<std::size_t>(dec.j)] += 1;
    state[static_cast<std::size_t>(dec.j) + 1] -= 1;
  } else if (dec.tag == CaseTag::raise) {
    state[static_cast<std::size_t>(dec.j)] += 1;
  } else if (dec.tag == CaseTag::outside) {
    throw NotASubgradient("lattice_step: state left the minimizers of N");
  }
  return dec;
}

Subgradient oracle_step(int t, std::span<const double> w, const BlockStructure& blocks,
                        const InstanceParams& params, OracleOptions options) {
  if (t < 1) throw std::invalid_argument("oracle_step: t must be >= 1");
  const double unit = params.eta * params.alpha;
  const double tol = unit * 1e-9;
  const auto vals = block_values(w, blocks);
  const double n_value = nemirovski_from_blocks(vals);
  const bool origin = std::all_of(w.begin(), w.end(), [&](double x) { return std::abs(x) <= tol; });

  AffineTerm term;
  Subgradient out;
  if (t == 1 && origin) {
    out.tag = CaseTag::zero;
  } else if (n_value > tol) {
    out.tag = CaseTag::outside;
    for (const auto& candidate : nemirovski_terms(vals.size())) {
      if (candidate.value(vals) >= n_value - tol) {
        term = candidate;
        break;
      }
    }
  } else {
    const OracleDecision dec = decide(
        vals, [&](double a, double b) { return std::abs(a - b) <= tol; },
        [&](double a) { return a >= unit - tol; }, [&](double a) { return std::abs(a) <= tol; },
        options);
    out.tag = dec.tag;
    if (dec.tag == CaseTag::swap) term = {AffineTerm::Kind::difference, dec.j, dec.j + 1};
    if (dec.tag == CaseTag::raise) term = {AffineTerm::Kind::negate, dec.j, -1};
  }

  if (term.value(vals) < n_value - tol) {
    throw NotASubgradient(std::string("oracle_step: ") + to_string(out.tag) +
                          " direction is not an active piece of N");
  }
  out.vector = term.gradient(blocks);
  for (auto& x : out.vector) x *= params.alpha;
  return out;
}

double max_competitor_dot(std::span<const double> w, const BlockStructure& blocks,
                          const code::BinaryCode& code) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < code.size(); ++v) {
    if (static_cast<int>(v) == blocks.vstar) continue;
    best = std::max(best, code.dot(v, w));
  }
  return best;
}

double g_inactivity_margin(std::span<const double> w, const BlockStructure& blocks,
                           const code::BinaryCode& code, const InstanceParams& params) {
  return params.tau - max_competitor_dot(w, blocks, code);
}

Vec g_subgradient(std::span<const double> w, const code::DataPoint& point,
                  const code::BinaryCode& code, double tau) {
  Vec g(w.size(), 0.0);
  double best = tau;
  int arg = -1;
  for (int v : point.included) {
    const double c = code.dot(static_cast<std::size_t>(v), w);
    if (c > best) {
      best = c;
      arg = v;
    }
  }
  if (arg >= 0) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(code.dimension()));
    for (int i : code.support(static_cast<std::size_t>(arg))) g[static_cast<std::size_t>(i)] = scale;
  }
  return g;
}

Subgradient f_subgradient(int t, std::span<const double> w, const code::DataPoint& point,
                          const HardInstance& inst) {
  Subgradient s = oracle_step(t, w, inst.blocks, inst.params);
  const Vec gg = g_subgradient(w, point, inst.code, inst.params.tau);
  for (std::size_t i = 0; i < gg.size(); ++i) s.vector[i] += gg[i];
  return s;
}

SampleOracle::SampleOracle(const HardInstance& inst, const code::Sample& sample,
                           OracleOptions options)
    : inst_(&inst), sample_(&sample), options_(options) {}

Subgradient SampleOracle::operator()(int t, std::span<const double> w, std::size_t z) const {
  Subgradient s = oracle_step(t, w, inst_->blocks, inst_->params, options_);
  const auto& point = sample_->points.at(z);
  const double tol = 1e-9 * std::max(1.0, std::abs(inst_->params.tau));
  for (int v : point.included) {
    if (inst_->code.dot(static_cast<std::size_t>(v), w) > inst_->params.tau + tol) {
      throw NotASubgradient("SampleOracle: g is above its threshold at sample point " +
                            std::to_string(z) + " (code vector " + std::to_string(v) + ")");
    }
  }
  return s;
}

double subgradient_inequality_slack(const HardInstance& inst, const code::DataPoint& point,
                                    std::span<const double> w, std::span<const double> g,
                                    const std::vector<Vec>& probes) {
  const double fw = inst.f_value(w, point);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : probes) {
    const double fp = inst.f_value(p, point);
    double lin = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) lin += g[i] * (p[i] - w[i]);
    const double slack = (fp - fw - lin) / (1.0 + std::abs(fp) + std::abs(fw));
    worst = std::min(worst, slack);
  }
  return worst;
}

Vec random_ball_point(std::size_t dim, std::mt19937_64& rng) {
  Vec x(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    // Box-Muller on the portable uniform stream.
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    x[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  const double norm = std::sqrt(squared_norm(x));
  const double radius = std::pow(uniform01(rng), 1.0 / static_cast<double>(dim));
  for (auto& xi : x) xi *= radius / norm;
  return x;
}

double lipschitz_probe(const HardInstance& inst, const code::DataPoint& point, int pairs,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto d = static_cast<std::size_t>(inst.params.d);
  double worst = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const Vec a = random_ball_point(d, rng);
    const Vec b = random_ball_point(d, rng);
    double dist2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) dist2 += (a[i] - b[i]) * (a[i] - b[i]);
    if (dist2 == 0.0) continue;
    worst = std::max(worst, std::abs(inst.f_value(a, point) - inst.f_value(b, point)) /
                                std::sqrt(dist2));
  }
  return worst;
}

std::string to_json(const InstanceParams& p) {
  nlohmann::json doc = {{"d", p.d},           {"m", p.m},       {"T", p.T},
                        {"horizon", p.horizon}, {"capped", p.capped}, {"eta", p.eta},
                        {"alpha", p.alpha},   {"tau", p.tau},   {"epsilon", p.epsilon},
                        {"k", p.k}};
  return doc.dump();
}

InstanceParams params_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  InstanceParams p;
  p.d = doc.at("d");
  p.m = doc.at("m");
  p.T = doc.at("T");
  p.horizon = doc.at("horizon");
  p.capped = doc.at("capped");
  p.eta = doc.at("eta");
  p.alpha = doc.at("alpha");
  p.tau = doc.at("tau");
  p.epsilon = doc.at("epsilon");
  p.k = doc.at("k");
  return p;
}

ExactInstance::ExactInstance(const HardInstance& inst) : inst_(&inst), d_(inst.params.d) {
  const long sd = isqrt_exact(inst.params.d);
  const long sk = isqrt_exact(inst.params.k);
  if (sd < 0 || sk < 0) {
    throw ConfigError("ExactInstance: d and k must be perfect squares (got d=" +
                      std::to_string(inst.params.d) + ", k=" + std::to_string(inst.params.k) + ")");
  }
  eta_ = exact_rational(inst.params.eta);
  alpha_ = exact_rational(inst.params.alpha);
  tau_ = exact_rational(inst.params.tau);
  inv_sqrt_d_ = Rational(1, sd);
  inv_sqrt_k_ = Rational(1, sk);
}

Rational ExactInstance::block_value(const RVec& w, std::size_t j) const {
  Rational s = 0;
  for (int i : inst_->blocks.blocks[j]) s += w[static_cast<std::size_t>(i)];
  return s * inv_sqrt_k_;
}

Rational ExactInstance::nemirovski_value(const RVec& w) const {
  std::vector<Rational> vals;
  for (std::size_t j = 0; j < inst_->blocks.count(); ++j) vals.push_back(block_value(w, j));
  return nemirovski_from_blocks(vals);
}

Rational ExactInstance::g_value(const RVec& w, const code::DataPoint& point) const {
  Rational best = tau_;
  for (int v : point.included) {
    Rational c = 0;
    for (int i : inst_->code.support(static_cast<std::size_t>(v))) c += w[static_cast<std::size_t>(i)];
    if (c > best) best = c;
  }
  return best * inv_sqrt_d_;
}

Rational ExactInstance::f_value(const RVec& w, const code::DataPoint& point) const {
  return g_value(w, point) + alpha_ * nemirovski_value(w);
}

RVec ExactInstance::alpha_n_oracle(int t, const RVec& w) const {
  if (w.size() != dimension()) throw DimensionMismatch(dimension(), w.size());
  std::vector<Rational> vals;
  for (std::size_t j = 0; j < inst_->blocks.count(); ++j) vals.push_back(block_value(w, j));
  const Rational n_value = nemirovski_from_blocks(vals);
  const Rational unit = eta_ * alpha_;
  const bool origin = std::all_of(w.begin(), w.end(), [](const Rational& x) { return x == 0; });

  RVec g(dimension(), Rational(0));
  auto add_block = [&](int j, const Rational& c) {
    for (int i : inst_->blocks.blocks[static_cast<std::size_t>(j)]) g[static_cast<std::size_t>(i)] += c;
  };
  const Rational step = alpha_ * inv_sqrt_k_;
  if (t == 1 && origin) return g;
  if (n_value > 0) {
    // First maximizing term in lexicographic order.
    if (n_value == 0) return g;
    for (std::size_t j = 0; j < vals.size(); ++j) {
      if (-vals[j] == n_value) {
        add_block(static_cast<int>(j), -step);
        return g;
      }
    }
    for (std::size_t a = 0; a < vals.size(); ++a) {
      for (std::size_t b = a + 1; b < vals.size(); ++b) {
        if (vals[b] - vals[a] == n_value) {
          add_block(static_cast<int>(b), step);
          add_block(static_cast<int>(a), -step);
          return g;
        }
      }
    }
    throw NotASubgradient("ExactInstance: no active piece attains N");
  }
  const OracleDecision dec = decide(
      vals, [](const Rational& a, const Rational& b) { return a == b; },
      [&](const Rational& a) { return a >= unit; }, [](const Rational& a) { return a == 0; },
      OracleOptions{});
  if (dec.tag == CaseTag::swap) {
    add_block(dec.j + 1, step);
    add_block(dec.j, -step);
  } else if (dec.tag == CaseTag::raise) {
    add_block(dec.j, -step);
  }
  return g;
}

RVec ExactInstance::f_subgradient(int t, const RVec& w, const code::DataPoint& point) const {
  RVec g = alpha_n_oracle(t, w);
  Rational best = tau_;
  int arg = -1;
  for (int v : point.included) {
    Rational c = 0;
    for (int i : inst_->code.support(static_cast<std::size_t>(v))) c += w[static_cast<std::size_t>(i)];
    if (c > best) {
      best = c;
      arg = v;
    }
  }
  if (arg >= 0) {
    for (int i : inst_->code.support(static_cast<std::size_t>(arg))) {
      g[static_cast<std::size_t>(i)] += inv_sqrt_d_;
    }
  }
  return g;
}

}  // namespace gdgap::instance
