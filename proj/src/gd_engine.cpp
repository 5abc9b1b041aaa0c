#include "gdgap/gd_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include <json.hpp>

namespace gdgap::gd {

GDConfig GDConfig::uniform(double eta, long T) {
  if (T < 1) throw ConfigError("GDConfig: T must be >= 1");
  GDConfig c;
  c.eta = eta;
  c.T = T;
  c.q.assign(static_cast<std::size_t>(T), 1.0 / static_cast<double>(T));
  return c;
}

GDConfig GDConfig::suffix(double eta, long T, long s) {
  if (T < 1) throw ConfigError("GDConfig: T must be >= 1");
  if (s < 0 || s >= T) throw ConfigError("GDConfig: suffix start must lie in [0, T-1]");
  GDConfig c;
  c.eta = eta;
  c.T = T;
  c.q.assign(static_cast<std::size_t>(T), 0.0);
  for (long t = s + 1; t <= T; ++t) c.q[static_cast<std::size_t>(t - 1)] = 1.0 / static_cast<double>(T - s);
  return c;
}

void GDConfig::validate() const {
  if (!(eta > 0.0)) throw ConfigError("GDConfig: eta must be positive");
  if (T < 1) throw ConfigError("GDConfig: T must be >= 1");
  if (!(radius > 0.0)) throw ConfigError("GDConfig: radius must be positive");
  if (q.size() != static_cast<std::size_t>(T)) throw ConfigError("GDConfig: q must have length T");
  for (double x : q) {
    if (!(std::abs(x) <= 1.0)) throw ConfigError("GDConfig: weights must satisfy |q(t)| <= 1");
  }
}

namespace {

template <class StepFn>
Trajectory run_loop(std::size_t dim, const GDConfig& config, StepFn&& gradient_at) {
  config.validate();
  Trajectory traj;
  traj.iterates.reserve(static_cast<std::size_t>(config.T) + 1);
  traj.iterates.emplace_back(dim, 0.0);
  Vec next(dim);
  for (long t = 1; t <= config.T; ++t) {
    const Vec& w = traj.iterates.back();
    Subgradient g = gradient_at(static_cast<int>(t), w);
    if (g.vector.size() != dim) throw DimensionMismatch(dim, g.vector.size());
    for (std::size_t i = 0; i < dim; ++i) next[i] = w[i] - config.eta * g.vector[i];
    const double norm = std::sqrt(squared_norm(next));
    const bool project = norm > config.radius;
    if (project) {
      for (auto& x : next) x *= config.radius / norm;
    }
    traj.projection_applied.push_back(project);
    traj.subgradients.push_back(std::move(g));
    traj.iterates.push_back(next);
  }
  traj.weighted_output.assign(dim, 0.0);
  for (long t = 1; t <= config.T; ++t) {
    const double qt = config.q[static_cast<std::size_t>(t - 1)];
    if (qt == 0.0) continue;
    const Vec& w = traj.iterates[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < dim; ++i) traj.weighted_output[i] += qt * w[i];
  }
  return traj;
}

}  // namespace

Trajectory run_gd(const PointOracle& oracle, std::size_t sample_size, std::size_t dim,
                  const GDConfig& config) {
  if (sample_size == 0) throw ConfigError("run_gd: empty sample");
  return run_loop(dim, config, [&](int, const Vec& w) {
    Subgradient g{Vec(dim, 0.0), CaseTag::none};
    for (std::size_t z = 0; z < sample_size; ++z) {
      Vec gz;
      try {
        gz = oracle(w, z);
      } catch (const OracleFailure&) {
        throw;
      } catch (const std::exception& e) {
        throw OracleFailure(std::string("run_gd: oracle failed: ") + e.what());
      }
      if (gz.size() != dim) throw DimensionMismatch(dim, gz.size());
      for (std::size_t i = 0; i < dim; ++i) g.vector[i] += gz[i];
    }
    for (auto& x : g.vector) x /= static_cast<double>(sample_size);
    return g;
  });
}

Trajectory run_gd_sample_dependent(const SequenceOracle& oracle, const std::vector<Batch>& sequence,
                                   std::size_t dim, const GDConfig& config) {
  if (sequence.size() != static_cast<std::size_t>(config.T)) {
    throw ConfigError("run_gd_sample_dependent: need one batch per step");
  }
  return run_loop(dim, config, [&](int t, const Vec& w) {
    const auto& batch = sequence[static_cast<std::size_t>(t - 1)];
    if (batch.empty()) throw ConfigError("run_gd_sample_dependent: empty batch");
    const std::span<const Batch> prefix(sequence.data(), static_cast<std::size_t>(t - 1));
    Subgradient g{Vec(dim, 0.0), CaseTag::none};
    for (std::size_t z : batch) {
      Subgradient gz = oracle(t, prefix, w, z);
      if (gz.vector.size() != dim) throw DimensionMismatch(dim, gz.vector.size());
      for (std::size_t i = 0; i < dim; ++i) g.vector[i] += gz.vector[i];
      if (g.tag == CaseTag::none) g.tag = gz.tag;
    }
    for (auto& x : g.vector) x /= static_cast<double>(batch.size());
    return g;
  });
}

std::vector<Batch> full_batch_sequence(std::size_t m, long T) {
  Batch all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;
  return std::vector<Batch>(static_cast<std::size_t>(T), all);
}

SequenceOracle hard_instance_oracle(const instance::SampleOracle& oracle) {
  return [&oracle](int t, std::span<const Batch>, std::span<const double> w, std::size_t z) {
    return oracle(t, w, z);
  };
}

std::vector<long> closed_form_blocks(int n, long t) {
  if (n < 0) throw std::invalid_argument("closed_form_blocks: negative block count");
  if (t < 0) throw std::invalid_argument("closed_form_blocks: negative step");
  const long terminal = instance::terminal_time(n);
  if (t > terminal) {
    throw OutOfPhase("closed_form_blocks: step " + std::to_string(t) + " is past the terminal step " +
                     std::to_string(terminal));
  }
  std::vector<long> b(static_cast<std::size_t>(n), 0);
  if (t <= 1) return b;

  long d0 = 0;
  while (d0 < n && instance::terminal_time(d0 + 1) <= t) ++d0;
  const long base = instance::terminal_time(d0);
  if (d0 == n || t == base) {
    for (long j = 1; j <= d0; ++j) b[static_cast<std::size_t>(j - 1)] = d0 + 1 - j;
    return b;
  }
  // Phase inside [T_{d0}, T_{d0+1}): locate d1, then the offset d2.
  long d1 = 0;
  long at = base;
  while (at + (d0 + 1 - d1) <= t) {
    at += d0 + 1 - d1;
    ++d1;
  }
  const long d2 = t - at;
  for (long j = 1; j <= n; ++j) {
    long v = 0;
    if (j <= d1) {
      v = d0 + 2 - j;
    } else if (d2 >= 1 && j == d0 + 2 - d2) {
      v = d0 + 2 - j;
    } else if (j <= d0) {
      v = d0 + 1 - j;
    }
    b[static_cast<std::size_t>(j - 1)] = v;
  }
  return b;
}

Vec closed_form_state(const instance::InstanceParams& params, const instance::BlockStructure& blocks,
                      long t) {
  const auto b = closed_form_blocks(static_cast<int>(blocks.count()), t);
  Vec w(static_cast<std::size_t>(blocks.dimension), 0.0);
  for (std::size_t j = 0; j < blocks.count(); ++j) {
    const auto& block = blocks.blocks[j];
    const double per = params.eta * params.alpha * static_cast<double>(b[j]) /
                       std::sqrt(static_cast<double>(block.size()));
    for (int i : block) w[static_cast<std::size_t>(i)] = per;
  }
  return w;
}

std::vector<std::vector<long>> simulate_lattice(int n, long steps, instance::OracleOptions options) {
  std::vector<std::vector<long>> states;
  states.reserve(static_cast<std::size_t>(steps) + 1);
  std::vector<long> state(static_cast<std::size_t>(n), 0);
  states.push_back(state);
  for (long t = 1; t <= steps; ++t) {
    instance::lattice_step(static_cast<int>(t), state, options);
    states.push_back(state);
  }
  return states;
}

StepCheck check_no_projection(const Trajectory& traj, const instance::InstanceParams& params) {
  const double unit2 = 2.0 * params.eta * params.eta * params.alpha * params.alpha;
  for (std::size_t t = 1; t < traj.iterates.size(); ++t) {
    const double bound = unit2 * static_cast<double>(t);
    const double n2 = squared_norm(traj.iterates[t]);
    if (traj.projection_applied[t - 1] || n2 > bound * (1.0 + 1e-12)) {
      return {false, static_cast<long>(t)};
    }
  }
  return {};
}

StepCheck partial_sum_monotone(const std::vector<Vec>& iterates, const std::vector<int>& coords,
                               int B) {
  const auto take = static_cast<std::size_t>(std::clamp<int>(B, 0, static_cast<int>(coords.size())));
  std::vector<double> vals(coords.size());
  double prev = 0.0;
  for (std::size_t t = 0; t < iterates.size(); ++t) {
    for (std::size_t i = 0; i < coords.size(); ++i) vals[i] = iterates[t][static_cast<std::size_t>(coords[i])];
    std::partial_sort(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(take), vals.end(),
                      std::greater<>());
    double x = 0.0;
    for (std::size_t i = 0; i < take; ++i) x += vals[i];
    if (t > 0 && x < prev - 1e-12 * (1.0 + std::abs(prev))) return {false, static_cast<long>(t)};
    prev = x;
  }
  return {};
}

StepCheck partial_sum_monotone(const Trajectory& traj, const instance::BlockStructure& blocks, int B) {
  return partial_sum_monotone(traj.iterates, blocks.coordinates(), B);
}

namespace {

// 1-D projected GD on [-1, 1] with uniform averaging, in exact arithmetic.
template <class Grad>
Rational gd_1d(const Rational& eta, long T, Grad grad) {
  Rational x = 0;
  Rational sum = 0;
  for (long t = 1; t <= T; ++t) {
    x -= eta * grad(x);
    if (x > 1) x = 1;
    if (x < -1) x = -1;
    sum += x;
  }
  return sum / T;
}

}  // namespace

OplowResult oplow_bound_check(const Rational& eta, long T) {
  if (eta <= 0) throw ConfigError("oplow_bound_check: eta must be positive");
  if (T < 2) throw ConfigError("oplow_bound_check: T must be >= 2");
  OplowResult r;
  r.eta = eta;
  r.T = T;
  r.first_case = eta * eta * T >= 1;

  r.abs_bound = eta / 4 + Rational(1) / (2 * eta * T);
  const Rational slack = eta / 4 - Rational(1) / (2 * eta * T);
  r.gamma = eta / (8 * T);
  if (slack > 0 && slack / 2 < r.gamma) r.gamma = slack / 2;
  const Rational gamma = r.gamma;
  r.abs_output = gd_1d(eta, T, [&](const Rational& x) { return Rational(x > gamma ? 1 : -1); });
  const Rational diff = r.abs_output - gamma;
  r.abs_gap = diff < 0 ? Rational(-diff) : diff;
  r.abs_holds = r.abs_gap >= r.abs_bound;

  const Rational a = Rational(1) / ((T + 1) * eta);
  r.linear_valid = a <= 1;
  r.linear_bound = Rational(1) / (3 * T * eta);
  r.linear_output = gd_1d(eta, T, [&](const Rational&) { return a; });
  r.linear_gap = a * (r.linear_output + 1);
  r.linear_holds = r.linear_valid && r.linear_gap >= r.linear_bound;

  r.claimed = eta / 2 + Rational(1) / (6 * eta * T);
  r.best_gap = r.abs_gap;
  if (r.linear_valid && r.linear_gap > r.best_gap) r.best_gap = r.linear_gap;
  r.claim_holds = r.best_gap >= r.claimed;
  r.pass = (r.first_case && r.abs_holds) || r.linear_holds;
  return r;
}

void write_trajectory_jsonl(std::ostream& out, const Trajectory& traj) {
  for (std::size_t t = 0; t < traj.iterates.size(); ++t) {
    nlohmann::json line;
    line["step"] = t;
    nlohmann::json sparse = nlohmann::json::array();
    const auto& w = traj.iterates[t];
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != 0.0) sparse.push_back({i, w[i]});
    }
    line["iterate"] = std::move(sparse);
    line["case"] = t == 0 ? "none" : to_string(traj.subgradients[t - 1].tag);
    line["norm2"] = squared_norm(w);
    line["projected"] = t == 0 ? false : static_cast<bool>(traj.projection_applied[t - 1]);
    out << line.dump() << '\n';
  }
}

}  // namespace gdgap::gd
