#include "gdgap/sample_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

namespace gdgap::enc {

namespace {

std::vector<std::size_t> first_primes(std::size_t count) {
  std::vector<std::size_t> primes;
  for (std::size_t p = 2; primes.size() < count; ++p) {
    bool prime = true;
    for (std::size_t q : primes) {
      if (q * q > p) break;
      if (p % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(p);
  }
  return primes;
}

std::vector<Rational> batch_weights(const Batch& batch, std::size_t domain_size) {
  if (batch.empty()) throw ConfigError("empty batch");
  std::vector<Rational> c(domain_size, Rational(0));
  const Rational w(1, static_cast<long>(batch.size()));
  for (std::size_t z : batch) {
    if (z >= domain_size) throw std::out_of_range("batch index outside the domain");
    c[z] += w;
  }
  return c;
}

using Tuple = std::vector<RationalPoly>;
using Values = std::vector<Rational>;

Values evaluate_tuple(const Tuple& tuple, const Rational& x) {
  Values out;
  out.reserve(tuple.size());
  for (const auto& p : tuple) out.push_back(p.evaluate(x));
  return out;
}

template <class Accept>
Rational scan_candidates(const Rational& eps, int max_halvings, Accept accept) {
  if (eps <= 0) throw ConfigError("choose_r: bound must be positive");
  Rational r = eps / 2;
  for (int i = 0; i < max_halvings; ++i, r /= 2) {
    if (accept(Rational(1) - r)) return r;
  }
  throw Exhausted("choose_r: no admissible candidate among " + std::to_string(max_halvings));
}

}  // namespace

AlphaMap assign_alpha(std::size_t domain_size, bool symbolic) {
  AlphaMap map;
  map.symbolic = symbolic;
  map.count = domain_size;
  if (symbolic) return map;
  for (std::size_t p : first_primes(domain_size)) {
    const double root = std::sqrt(static_cast<double>(p));
    map.values.push_back(root - std::floor(root));
  }
  return map;
}

double batch_alpha(const Batch& batch, const AlphaMap& alpha) {
  if (batch.empty()) throw ConfigError("batch_alpha: empty batch");
  if (alpha.symbolic) throw ConfigError("batch_alpha: symbolic alpha has no numeric value");
  double s = 0.0;
  for (std::size_t z : batch) s += alpha.values.at(z);
  return s / static_cast<double>(batch.size());
}

EncodedState initial_state(std::size_t domain_size) {
  EncodedState s;
  s.symbolic.assign(domain_size, RationalPoly{});
  return s;
}

EncodedState step(const EncodedState& state, const Batch& batch, double gamma, double eta,
                  const AlphaMap& alpha) {
  const double ge = gamma * eta;
  if (!(ge > 0.0 && ge < 1.0)) throw ConfigError("step: gamma eta must lie in (0, 1)");
  const auto c = batch_weights(batch, state.symbolic.size());
  EncodedState next;
  next.t = state.t + 1;
  next.symbolic.reserve(c.size());
  for (std::size_t z = 0; z < c.size(); ++z) next.symbolic.push_back(state.symbolic[z].shift_add(c[z]));
  next.numeric = alpha.symbolic ? 0.0 : (1.0 - ge) * state.numeric + ge * batch_alpha(batch, alpha);
  return next;
}

RationalPoly polynomial_of(const SampleSequence& sequence, int t, std::size_t z) {
  if (t < 0 || static_cast<std::size_t>(t) > sequence.size()) {
    throw std::out_of_range("polynomial_of: t exceeds the sequence length");
  }
  std::vector<Rational> coeffs(static_cast<std::size_t>(t), Rational(0));
  for (int n = 0; n < t; ++n) {
    const Batch& batch = sequence[static_cast<std::size_t>(t - 1 - n)];
    const auto count = std::count(batch.begin(), batch.end(), z);
    coeffs[static_cast<std::size_t>(n)] = Rational(count, static_cast<long>(batch.size()));
  }
  return RationalPoly(std::move(coeffs));
}

double closed_form_x(const std::vector<RationalPoly>& symbolic, double gamma, double eta,
                     const AlphaMap& alpha) {
  const double ge = gamma * eta;
  double s = 0.0;
  for (std::size_t z = 0; z < symbolic.size(); ++z) s += alpha.values.at(z) * symbolic[z].evaluate(1.0 - ge);
  return ge * s;
}

Rational choose_r(const std::vector<RationalPoly>& differences, const Rational& eps, int max_halvings) {
  return scan_candidates(eps, max_halvings, [&](const Rational& x) {
    return std::none_of(differences.begin(), differences.end(),
                        [&](const RationalPoly& p) { return !p.is_zero() && p.evaluate(x) == 0; });
  });
}

Rational choose_r_separating(const std::vector<std::vector<RationalPoly>>& groups, const Rational& eps,
                             int max_halvings) {
  std::vector<std::vector<RationalPoly>> distinct;
  for (const auto& g : groups) {
    std::set<RationalPoly> s(g.begin(), g.end());
    distinct.emplace_back(s.begin(), s.end());
  }
  return scan_candidates(eps, max_halvings, [&](const Rational& x) {
    for (const auto& g : distinct) {
      std::set<Rational> values;
      for (const auto& p : g) {
        if (!values.insert(p.evaluate(x)).second) return false;
      }
    }
    return true;
  });
}

Rational choose_gamma(const std::vector<std::vector<RationalPoly>>& groups, const Rational& eps,
                      const Rational& eta, long T) {
  if (eta <= 0 || T < 1) throw ConfigError("choose_gamma: need eta > 0 and T >= 1");
  return choose_r_separating(groups, eps / T) / eta;
}

std::vector<Batch> enumerate_batches(std::size_t domain_size, int m, bool multisets) {
  if (m < 1) throw ConfigError("enumerate_batches: m must be >= 1");
  if (!multisets && static_cast<std::size_t>(m) > domain_size) {
    throw ConfigError("enumerate_batches: m exceeds |Z| for subsets");
  }
  std::vector<Batch> out;
  Batch current;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (current.size() == static_cast<std::size_t>(m)) {
      out.push_back(current);
      return;
    }
    for (std::size_t z = start; z < domain_size; ++z) {
      current.push_back(z);
      self(self, multisets ? z : z + 1);
      current.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

InjectivityReport check_injectivity(int m, int T, std::size_t domain_size, const std::vector<Rational>& q,
                                    const InjectivityOptions& options) {
  if (T < 1) throw ConfigError("check_injectivity: T must be >= 1");
  if (q.size() != static_cast<std::size_t>(T)) throw ConfigError("check_injectivity: q must have length T");
  InjectivityReport rep;
  rep.domain_size = domain_size;
  rep.m = m;
  rep.T = T;
  const auto batches = enumerate_batches(domain_size, m, options.multisets);
  rep.batches = batches.size();

  // Budget check before enumerating: sum_{t=1}^T B^t.
  double total = 0.0, layer = 1.0;
  for (int t = 1; t <= T; ++t) {
    layer *= static_cast<double>(batches.size());
    total += layer;
  }
  if (total > static_cast<double>(options.budget)) {
    throw BudgetExceeded("check_injectivity: " + std::to_string(static_cast<long long>(total)) +
                         " prefix states exceed the budget of " + std::to_string(options.budget));
  }
  for (int t = T; t >= 1; --t) {
    if (q[static_cast<std::size_t>(t - 1)] != 0) {
      rep.last_weighted_step = t;
      break;
    }
  }

  struct Node {
    int t;
    long parent;
    std::size_t batch;
    Tuple tuple;
  };
  std::vector<Node> nodes;
  std::vector<Tuple> outputs;
  const EncodedState origin = initial_state(domain_size);
  // Breadth-first by length keeps parents ahead of children.
  std::vector<long> frontier{-1};
  for (int t = 1; t <= T; ++t) {
    std::vector<long> next;
    for (long parent : frontier) {
      const Tuple& base = parent < 0 ? origin.symbolic : nodes[static_cast<std::size_t>(parent)].tuple;
      for (std::size_t b = 0; b < batches.size(); ++b) {
        const auto c = batch_weights(batches[b], domain_size);
        Tuple tuple;
        for (std::size_t z = 0; z < domain_size; ++z) tuple.push_back(base[z].shift_add(c[z]));
        nodes.push_back({t, parent, b, std::move(tuple)});
        next.push_back(static_cast<long>(nodes.size()) - 1);
      }
    }
    frontier = std::move(next);
  }
  rep.states = nodes.size();

  auto prefix_of = [&](long idx) {
    SampleSequence seq;
    for (long i = idx; i >= 0; i = nodes[static_cast<std::size_t>(i)].parent) {
      seq.push_back(batches[nodes[static_cast<std::size_t>(i)].batch]);
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  };

  for (long leaf : frontier) {
    Tuple out(domain_size);
    for (long i = leaf; i >= 0; i = nodes[static_cast<std::size_t>(i)].parent) {
      const auto& node = nodes[static_cast<std::size_t>(i)];
      const Rational& w = q[static_cast<std::size_t>(node.t - 1)];
      for (std::size_t z = 0; z < domain_size; ++z) out[z] = out[z] + node.tuple[z].scaled(w);
    }
    outputs.push_back(std::move(out));
  }
  rep.outputs = outputs.size();

  rep.prefix_sound = true;
  for (std::size_t i = 0; i < nodes.size() && rep.prefix_sound; ++i) {
    const auto seq = prefix_of(static_cast<long>(i));
    for (std::size_t z = 0; z < domain_size; ++z) {
      if (!(polynomial_of(seq, nodes[i].t, z) == nodes[i].tuple[z])) {
        rep.prefix_sound = false;
        break;
      }
    }
  }

  std::set<Tuple> state_set;
  std::set<Tuple> early_set;
  for (const auto& n : nodes) {
    state_set.insert(n.tuple);
    if (n.t < rep.last_weighted_step) early_set.insert(n.tuple);
  }
  rep.item1_symbolic = state_set.size() == nodes.size();
  rep.item2_symbolic = std::none_of(outputs.begin(), outputs.end(),
                                    [&](const Tuple& o) { return early_set.count(o) > 0; });

  std::vector<std::vector<RationalPoly>> groups(domain_size);
  for (const auto& n : nodes) {
    for (std::size_t z = 0; z < domain_size; ++z) groups[z].push_back(n.tuple[z]);
  }
  for (const auto& o : outputs) {
    for (std::size_t z = 0; z < domain_size; ++z) groups[z].push_back(o[z]);
  }
  rep.gamma = choose_gamma(groups, options.eps, options.eta, T);
  rep.r = rep.gamma * options.eta;
  const Rational x = Rational(1) - rep.r;

  std::set<Values> evaluated;
  std::set<Values> early_evaluated;
  for (const auto& n : nodes) {
    auto v = evaluate_tuple(n.tuple, x);
    if (n.t < rep.last_weighted_step) early_evaluated.insert(v);
    evaluated.insert(std::move(v));
  }
  rep.item1_evaluated = evaluated.size() == nodes.size();
  rep.item2_evaluated = std::none_of(outputs.begin(), outputs.end(), [&](const Tuple& o) {
    return early_evaluated.count(evaluate_tuple(o, x)) > 0;
  });

  // Numeric recursion against the closed form.
  const AlphaMap alpha = assign_alpha(domain_size);
  const double gamma = to_double(rep.gamma);
  const double eta = to_double(options.eta);
  std::vector<double> numeric(nodes.size());
  rep.closed_form_ok = true;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double prev = nodes[i].parent < 0 ? 0.0 : numeric[static_cast<std::size_t>(nodes[i].parent)];
    const double ge = gamma * eta;
    numeric[i] = (1.0 - ge) * prev + ge * batch_alpha(batches[nodes[i].batch], alpha);
    const double closed = closed_form_x(nodes[i].tuple, gamma, eta, alpha);
    const double err = std::abs(numeric[i] - closed) / std::max(std::abs(closed), 1e-300);
    rep.max_closed_form_error = std::max(rep.max_closed_form_error, err);
  }
  rep.closed_form_ok = rep.max_closed_form_error <= 1e-12;
  std::vector<double> sorted = numeric;
  std::sort(sorted.begin(), sorted.end());
  rep.min_numeric_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    rep.min_numeric_gap = std::min(rep.min_numeric_gap, sorted[i] - sorted[i - 1]);
  }
  return rep;
}

std::string to_json(const InjectivityReport& r) {
  nlohmann::json doc = {{"format", "gdgap.injectivity"},
                        {"domain_size", r.domain_size},
                        {"m", r.m},
                        {"T", r.T},
                        {"batches", r.batches},
                        {"states", r.states},
                        {"outputs", r.outputs},
                        {"last_weighted_step", r.last_weighted_step},
                        {"item1_symbolic", r.item1_symbolic},
                        {"item1_evaluated", r.item1_evaluated},
                        {"item2_symbolic", r.item2_symbolic},
                        {"item2_evaluated", r.item2_evaluated},
                        {"prefix_sound", r.prefix_sound},
                        {"closed_form_ok", r.closed_form_ok},
                        {"max_closed_form_error", r.max_closed_form_error},
                        {"min_numeric_gap", r.min_numeric_gap},
                        {"r", to_string(r.r)},
                        {"gamma", to_string(r.gamma)},
                        {"pass", r.pass()}};
  return doc.dump();
}

}  // namespace gdgap::enc
