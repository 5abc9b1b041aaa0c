#include "gdgap/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace gdgap::red {

Rational h_value(const Rational& x, std::size_t z, const Rational& gamma, const RVec& alpha) {
  return gamma * (x * x - 2 * alpha.at(z) * x) / 2;
}

Rational h_grad(const Rational& x, std::size_t z, const Rational& gamma, const RVec& alpha) {
  return gamma * (x - alpha.at(z));
}

double h_value(double x, std::size_t z, double gamma, const Vec& alpha) {
  return 0.5 * gamma * (x * x - 2.0 * alpha.at(z) * x);
}

double h_grad(double x, std::size_t z, double gamma, const Vec& alpha) {
  return gamma * (x - alpha.at(z));
}

RVec rational_alpha(std::size_t domain) {
  RVec out;
  for (double a : enc::assign_alpha(domain).values) out.push_back(exact_rational(a));
  return out;
}

std::vector<SampleSequence> scope_sequences(const Scope& scope, std::size_t domain, int T) {
  if (T < 1) throw ConfigError("scope_sequences: T must be >= 1");
  if (scope.mode == Scope::Mode::realized) {
    if (scope.sequences.size() > scope.budget) {
      throw BudgetExceeded("scope_sequences: realized pool exceeds the budget");
    }
    for (const auto& s : scope.sequences) {
      if (s.size() != static_cast<std::size_t>(T)) throw ConfigError("scope_sequences: sequence length != T");
    }
    return scope.sequences;
  }
  const auto batches = enc::enumerate_batches(domain, scope.m, scope.multisets);
  const double count = std::pow(static_cast<double>(batches.size()), T);
  if (count > static_cast<double>(scope.budget)) {
    throw BudgetExceeded("scope_sequences: " + std::to_string(static_cast<long long>(count)) +
                         " sequences exceed the budget of " + std::to_string(scope.budget));
  }
  std::vector<SampleSequence> out;
  std::vector<std::size_t> digits(static_cast<std::size_t>(T), 0);
  while (true) {
    SampleSequence seq;
    for (std::size_t d : digits) seq.push_back(batches[d]);
    out.push_back(std::move(seq));
    int pos = T - 1;
    while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == batches.size()) {
      digits[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

Encoder make_encoder(const std::vector<SampleSequence>& sequences, std::size_t domain,
                     const std::vector<Rational>& q, const Rational& eps, const Rational& eta) {
  if (sequences.empty()) throw ConfigError("make_encoder: no sequences");
  const auto T = static_cast<long>(sequences.front().size());
  std::vector<std::vector<RationalPoly>> groups(domain);
  for (const auto& seq : sequences) {
    std::vector<RationalPoly> out(domain);
    for (int t = 1; t <= T; ++t) {
      for (std::size_t z = 0; z < domain; ++z) {
        auto p = enc::polynomial_of(seq, t, z);
        out[z] = out[z] + p.scaled(q[static_cast<std::size_t>(t - 1)]);
        groups[z].push_back(std::move(p));
      }
    }
    for (std::size_t z = 0; z < domain; ++z) groups[z].push_back(out[z]);
  }
  Encoder e;
  e.eta = eta;
  e.gamma = enc::choose_gamma(groups, eps, eta, T);
  e.alpha = rational_alpha(domain);
  return e;
}

ExactTrajectory nominal_trajectory(const ExactProblem& problem, const Encoder& encoder,
                                   const SampleSequence& sequence, const std::vector<Rational>& q) {
  const auto T = sequence.size();
  if (q.size() != T) throw ConfigError("nominal_trajectory: q must have length T");
  ExactTrajectory traj;
  traj.sequence = sequence;
  traj.w.emplace_back(problem.dim, Rational(0));
  traj.x.emplace_back(0);
  const Rational ge = encoder.gamma * encoder.eta;
  for (std::size_t s = 0; s < T; ++s) {
    const Batch& batch = sequence[s];
    if (batch.empty()) throw ConfigError("nominal_trajectory: empty batch");
    const std::span<const Batch> prefix(sequence.data(), s);
    RVec g(problem.dim, Rational(0));
    Rational alpha_s = 0;
    for (std::size_t z : batch) {
      const RVec gz = problem.oracle(static_cast<int>(s + 1), prefix, traj.w.back(), z);
      if (gz.size() != problem.dim) throw DimensionMismatch(problem.dim, gz.size());
      for (std::size_t i = 0; i < problem.dim; ++i) g[i] += gz[i];
      alpha_s += encoder.alpha.at(z);
    }
    const Rational inv(1, static_cast<long>(batch.size()));
    RVec next = traj.w.back();
    for (std::size_t i = 0; i < problem.dim; ++i) next[i] -= encoder.eta * g[i] * inv;
    const Rational xn = (1 - ge) * traj.x.back() + ge * alpha_s * inv;
    if (dot(next, next) + xn * xn > 1) {
      throw ConfigError("nominal_trajectory: iterate leaves the unit ball at step " + std::to_string(s + 1));
    }
    traj.w.push_back(std::move(next));
    traj.x.push_back(xn);
  }
  traj.wq.assign(problem.dim, Rational(0));
  traj.xq = 0;
  for (std::size_t t = 1; t <= T; ++t) {
    const Rational& qt = q[t - 1];
    if (qt == 0) continue;
    for (std::size_t i = 0; i < problem.dim; ++i) traj.wq[i] += qt * traj.w[t][i];
    traj.xq += qt * traj.x[t];
  }
  return traj;
}

namespace {

interp::Triplet<Rational> make_triplet(const Rational& f, RVec g, const Rational& hg, const RVec& w,
                                       const Rational& x, const Rational& h) {
  interp::Triplet<Rational> t;
  t.value = f + h;
  t.gradient = std::move(g);
  t.gradient.push_back(hg);
  t.point = w;
  t.point.push_back(x);
  return t;
}

}  // namespace

TripletSetG build_G(const ExactProblem& problem, const Encoder& encoder,
                    const std::vector<SampleSequence>& sequences, const std::vector<Rational>& q) {
  if (sequences.empty()) throw ConfigError("build_G: empty scope");
  TripletSetG G;
  G.T = static_cast<int>(sequences.front().size());
  G.gamma = encoder.gamma;
  G.triplets.resize(problem.domain);
  G.origins.resize(problem.domain);
  std::set<SampleSequence> seen_prefixes;
  std::set<SampleSequence> seen_sequences;
  for (const auto& seq : sequences) {
    if (!seen_sequences.insert(seq).second) continue;
    ExactTrajectory traj = nominal_trajectory(problem, encoder, seq, q);
    for (int s = 0; s <= G.T; ++s) {
      SampleSequence prefix(seq.begin(), seq.begin() + s);
      if (!seen_prefixes.insert(prefix).second) continue;
      const auto& w = traj.w[static_cast<std::size_t>(s)];
      const auto& x = traj.x[static_cast<std::size_t>(s)];
      for (std::size_t z = 0; z < problem.domain; ++z) {
        RVec g = problem.oracle(s + 1, std::span<const Batch>(seq.data(), static_cast<std::size_t>(s)), w, z);
        G.triplets[z].push_back(make_triplet(problem.value(w, z), std::move(g),
                                             h_grad(x, z, encoder.gamma, encoder.alpha), w, x,
                                             h_value(x, z, encoder.gamma, encoder.alpha)));
        G.origins[z].push_back({false, s, prefix});
      }
    }
    for (std::size_t z = 0; z < problem.domain; ++z) {
      G.triplets[z].push_back(make_triplet(problem.value(traj.wq, z), problem.subgradient(traj.wq, z),
                                           h_grad(traj.xq, z, encoder.gamma, encoder.alpha), traj.wq,
                                           traj.xq, h_value(traj.xq, z, encoder.gamma, encoder.alpha)));
      G.origins[z].push_back({true, G.T + 1, seq});
    }
    G.trajectories.push_back(std::move(traj));
  }
  return G;
}

Strictness strictness_margin(const TripletSetG& G, std::size_t z) {
  Strictness out;
  out.half_gamma_bound = true;
  const auto& ts = G.triplets.at(z);
  const auto& origins = G.origins.at(z);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (origins[i].output) continue;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (i == j || ts[i].gradient == ts[j].gradient) continue;
      Rational slack = ts[i].value - ts[j].value;
      for (std::size_t k = 0; k < ts[i].point.size(); ++k) {
        slack -= ts[j].gradient[k] * (ts[i].point[k] - ts[j].point[k]);
      }
      const Rational dx = ts[i].point.back() - ts[j].point.back();
      if (slack < G.gamma * dx * dx / 2) out.half_gamma_bound = false;
      if (!out.found || slack < out.margin) {
        out.found = true;
        out.margin = slack;
        out.first = i;
        out.second = j;
      }
    }
  }
  out.positive = !out.found || out.margin > 0;
  return out;
}

std::vector<interp::Model<Rational>> build_bar_f(const TripletSetG& G, const Rational& lipschitz) {
  std::vector<interp::Model<Rational>> models;
  for (const auto& ts : G.triplets) models.push_back(interp::certify(ts, lipschitz));
  return models;
}

DiffReport differentiability(const TripletSetG& G, const std::vector<interp::Model<Rational>>& models) {
  DiffReport rep;
  for (std::size_t z = 0; z < models.size(); ++z) {
    const auto& origins = G.origins[z];
    for (std::size_t i = 0; i < origins.size(); ++i) {
      if (origins[i].output) continue;
      const bool diff = models[z].differentiable_at(i);
      if (origins[i].step <= G.T - 1) rep.before_last = rep.before_last && diff;
      else rep.at_last = rep.at_last && diff;
    }
  }
  return rep;
}

ReplayResult adversarial_replay(const std::vector<interp::Model<Rational>>& models,
                                const ExactTrajectory& nominal, const Rational& eta,
                                const std::vector<Rational>& q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t dim = nominal.w.front().size() + 1;
  const auto T = nominal.sequence.size();
  ReplayResult out;
  out.u.emplace_back(dim, Rational(0));
  for (std::size_t t = 1; t <= T; ++t) {
    const Batch& batch = nominal.sequence[t - 1];
    const RVec& u = out.u.back();
    RVec g(dim, Rational(0));
    for (std::size_t z : batch) {
      const auto& model = models.at(z);
      const auto ev = interp::evaluate(model, u);
      // Random positive weights over the active pieces, normalized exactly.
      std::vector<long> weights;
      long total = 0;
      for (std::size_t k = 0; k < ev.active.size(); ++k) {
        weights.push_back(1 + static_cast<long>(rng() % 1000));
        total += weights.back();
      }
      for (std::size_t k = 0; k < ev.active.size(); ++k) {
        const Rational lambda(weights[k], total);
        const auto& gk = model.triplets[ev.active[k]].gradient;
        for (std::size_t i = 0; i < dim; ++i) g[i] += lambda * gk[i];
      }
    }
    const Rational inv(1, static_cast<long>(batch.size()));
    RVec next = u;
    for (std::size_t i = 0; i < dim; ++i) next[i] -= eta * g[i] * inv;
    RVec expected = nominal.w[t];
    expected.push_back(nominal.x[t]);
    if (next != expected) throw TrajectoryDiverged(static_cast<int>(t));
    out.u.push_back(std::move(next));
  }
  out.uq.assign(dim, Rational(0));
  for (std::size_t t = 1; t <= T; ++t) {
    if (q[t - 1] == 0) continue;
    for (std::size_t i = 0; i < dim; ++i) out.uq[i] += q[t - 1] * out.u[t][i];
  }
  RVec expected = nominal.wq;
  expected.push_back(nominal.xq);
  out.output_matches = out.uq == expected;
  for (std::size_t i = 0; i < dim; ++i) {
    out.max_output_error = std::max(out.max_output_error, std::abs(to_double(out.uq[i] - expected[i])));
  }
  return out;
}

Rational output_value_gap(const TripletSetG& G, const Encoder& encoder, std::size_t domain) {
  Rational worst = 0;
  for (const auto& traj : G.trajectories) {
    for (std::size_t z = 0; z < domain; ++z) {
      Rational h = h_value(traj.xq, z, encoder.gamma, encoder.alpha);
      if (h < 0) h = -h;
      if (h > worst) worst = h;
    }
  }
  return worst;
}

ExactProblem prefix_toy(int T, const Rational& a, std::size_t domain, std::size_t marked) {
  if (T < 1) throw ConfigError("prefix_toy: T must be >= 1");
  ExactProblem p;
  p.dim = static_cast<std::size_t>(2 * T + 2);
  p.domain = domain;
  p.lipschitz = a;
  p.value = [a](const RVec& w, std::size_t) {
    Rational best = 0;
    for (const auto& x : w) {
      if (-x > best) best = -x;
    }
    return a * best;
  };
  p.subgradient = [a](const RVec& w, std::size_t) {
    RVec g(w.size(), Rational(0));
    Rational best = 0;
    std::size_t arg = w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (-w[i] > best) {
        best = -w[i];
        arg = i;
      }
    }
    if (arg < w.size()) g[arg] = -a;
    return g;
  };
  p.oracle = [a, marked](int t, std::span<const Batch> prefix, const RVec& w, std::size_t) {
    std::size_t c = 0;
    if (t >= 2) {
      const Batch& last = prefix[static_cast<std::size_t>(t - 2)];
      c = static_cast<std::size_t>(2 * (t - 1)) + (last == Batch{marked} ? 1 : 0);
    }
    for (const auto& x : w) {
      if (x < 0) throw NotASubgradient("prefix_toy: off the nonnegative orthant");
    }
    if (w[c] != 0) throw NotASubgradient("prefix_toy: raised coordinate is not at zero");
    RVec g(w.size(), Rational(0));
    g[c] = -a;
    return g;
  };
  return p;
}

ExactProblem hard_instance_problem(const instance::ExactInstance& exact, const code::Sample& sample) {
  ExactProblem p;
  p.dim = exact.dimension();
  p.domain = sample.size();
  p.lipschitz = 3;
  const auto* ex = &exact;
  const auto* points = &sample.points;
  p.value = [ex, points](const RVec& w, std::size_t z) { return ex->f_value(w, points->at(z)); };
  p.oracle = [ex, points](int t, std::span<const Batch>, const RVec& w, std::size_t z) {
    return ex->f_subgradient(t, w, points->at(z));
  };
  p.subgradient = [ex, points](const RVec& w, std::size_t z) {
    return ex->f_subgradient(2, w, points->at(z));
  };
  return p;
}

std::string model_to_json(const interp::Model<Rational>& model) { return interp::model_to_json(model); }

}  // namespace gdgap::red
