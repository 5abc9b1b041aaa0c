#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gdgap/hard_instance.hpp"

using namespace gdgap;
using namespace gdgap::instance;

namespace {

// Brute-force N over an explicit list of affine terms, written independently of
// the running-minimum evaluation.
double brute_nemirovski(const std::vector<double>& vals) {
  double best = 0.0;
  for (std::size_t a = 0; a < vals.size(); ++a) {
    best = std::max(best, -vals[a]);
    for (std::size_t b = a + 1; b < vals.size(); ++b) best = std::max(best, vals[b] - vals[a]);
  }
  return best;
}

HardInstance small_instance(int d, int k, double eta, long T, std::uint64_t seed = 1) {
  const auto params = make_params(d, 4, T, eta, BlockWidthPolicy::explicit_k, k);
  return build_instance(params, code::build_code(d, 8, seed), 0);
}

Vec with_block_values(const HardInstance& inst, const std::vector<double>& vals) {
  Vec w(static_cast<std::size_t>(inst.params.d), 0.0);
  const double s = std::sqrt(static_cast<double>(inst.blocks.k));
  for (std::size_t j = 0; j < vals.size(); ++j) {
    for (int i : inst.blocks.blocks[j]) w[static_cast<std::size_t>(i)] = vals[j] / s;
  }
  return w;
}

}  // namespace

TEST_CASE("block_width bracket rule") {
  auto c = block_width(8, 17L * 512);
  CHECK(c.k == 1);
  CHECK_FALSE(c.capped);
  c = block_width(64, 17L * 8);
  CHECK(c.k == 32);
  c = block_width(16, 1000000000L);
  CHECK(c.capped);
  CHECK(c.horizon == 34L * 16 * 16 * 16);
  CHECK(c.k == 1);
}

TEST_CASE("staircase_fit picks the smallest width with a full staircase") {
  const auto p = make_params(128, 8, 1000, 1.0 / std::sqrt(1000.0));
  CHECK(p.k == 16);
  CHECK(staircase_blocks(128, 16) == 3);
  CHECK(terminal_time(3) == 11);
  CHECK(17 * terminal_time(3) <= p.horizon);
  CHECK(p.epsilon == doctest::Approx(128.0 / (520.0 * 8)));
  CHECK(p.alpha == doctest::Approx(std::min(1.0, 1.0 / (p.eta * std::sqrt(2000.0)))));
  CHECK(p.tau == doctest::Approx(45 * p.eta * p.alpha * 128.0 * 128.0 / (2 * 256 * std::pow(16.0, 1.5))));
  CHECK_THROWS_AS(make_params(20, 1, 10, 0.1), ConfigError);
  CHECK_THROWS_AS(make_params(16, 1, 10, 0.1, BlockWidthPolicy::explicit_k, 3), ConfigError);
  CHECK_THROWS_AS(make_params(16, 1, 10, -1.0), ConfigError);
}

TEST_CASE("terminal_time") {
  CHECK(terminal_time(0) == 1);
  CHECK(terminal_time(1) == 2);
  CHECK(terminal_time(3) == 11);
}

TEST_CASE("nemirovski_value") {
  const auto all = all_coordinates(3);
  const std::vector<double> zero(3, 0.0);
  CHECK(nemirovski_value(zero, all) == 0.0);
  const std::vector<double> w{-0.5, 0.2, 0.1};
  CHECK(nemirovski_value(w, all) == doctest::Approx(0.7));
  const std::vector<double> flat(3, 0.4);
  CHECK(nemirovski_value(flat, all) == 0.0);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(9);
    for (auto& x : v) x = uniform01(rng) - 0.5;
    CHECK(nemirovski_value(v, all_coordinates(9)) == doctest::Approx(brute_nemirovski(v)));
  }
  CHECK(nemirovski_terms(3).size() == 1 + 3 + 3);
}

TEST_CASE("blocks come from the support of v*") {
  const auto inst = small_instance(32, 2, 0.3, 1000);
  const auto sup = inst.code.support(0);
  CHECK(inst.blocks.count() == 7);
  CHECK(inst.blocks.dprime == 14);
  for (std::size_t j = 0; j < inst.blocks.count(); ++j) {
    CHECK(inst.blocks.blocks[j][0] == sup[2 * j]);
    CHECK(inst.blocks.blocks[j][1] == sup[2 * j + 1]);
  }
  CHECK_THROWS(build_blocks(inst.code, 99, 2));
}

TEST_CASE("g and f values") {
  const auto inst = small_instance(16, 1, 0.3, 1000);
  const double tau = inst.params.tau;
  const std::vector<double> zero(16, 0.0);
  code::DataPoint none;
  CHECK(inst.g_value(zero, none) == doctest::Approx(tau / 4.0));
  CHECK(inst.f_value(zero, none) == doctest::Approx(tau / 4.0));

  auto flat = inst;
  flat.params.alpha = 0.0;
  std::mt19937_64 rng(5);
  const Vec w = random_ball_point(16, rng);
  CHECK(flat.f_value(w, none) == doctest::Approx(flat.g_value(w, none)));
}

TEST_CASE("oracle cases") {
  const auto inst = small_instance(16, 1, 0.3, 10000);
  const double u = inst.params.eta * inst.params.alpha;
  const int i1 = inst.blocks.blocks[0][0];
  const int i2 = inst.blocks.blocks[1][0];

  const std::vector<double> zero(16, 0.0);
  auto s = oracle_step(1, zero, inst.blocks, inst.params);
  CHECK(s.tag == CaseTag::zero);
  CHECK(squared_norm(s.vector) == 0.0);

  s = oracle_step(2, zero, inst.blocks, inst.params);
  CHECK(s.tag == CaseTag::raise);
  CHECK(s.vector[static_cast<std::size_t>(i1)] == doctest::Approx(-inst.params.alpha));
  CHECK(squared_norm(s.vector) == doctest::Approx(inst.params.alpha * inst.params.alpha));

  const Vec pair = with_block_values(inst, {2 * u, 2 * u});
  s = oracle_step(5, pair, inst.blocks, inst.params);
  CHECK(s.tag == CaseTag::swap);
  CHECK(s.vector[static_cast<std::size_t>(i1)] == doctest::Approx(-inst.params.alpha));
  CHECK(s.vector[static_cast<std::size_t>(i2)] == doctest::Approx(inst.params.alpha));

  const int n = static_cast<int>(inst.blocks.count());
  std::vector<double> stair;
  for (int j = 1; j <= n; ++j) stair.push_back(u * (n + 1 - j));
  s = oracle_step(50, with_block_values(inst, stair), inst.blocks, inst.params);
  CHECK(s.tag == CaseTag::zero);
  CHECK(squared_norm(s.vector) == 0.0);

  s = oracle_step(3, with_block_values(inst, {-u}), inst.blocks, inst.params);
  CHECK(s.tag == CaseTag::outside);
}

TEST_CASE("lattice decisions follow swap, raise, zero") {
  std::vector<long> st{0, 0, 0};
  CHECK(lattice_decision(1, st).tag == CaseTag::zero);
  CHECK(lattice_decision(2, st).tag == CaseTag::raise);
  st = {1, 1, 0};
  auto dec = lattice_decision(4, st);
  CHECK(dec.tag == CaseTag::swap);
  CHECK(dec.j == 0);
  dec = lattice_decision(4, st, {true});
  CHECK(dec.tag == CaseTag::raise);
  CHECK(dec.j == 2);
  st = {3, 2, 1};
  CHECK(lattice_decision(11, st).tag == CaseTag::zero);
  st = {0, 1, 0};
  CHECK(lattice_decision(3, st).tag == CaseTag::outside);
  CHECK_THROWS_AS(lattice_step(3, st), NotASubgradient);
}

TEST_CASE("oracle output is a subgradient of alpha N") {
  const auto inst = small_instance(32, 2, 0.3, 10000);
  std::mt19937_64 rng(17);
  std::vector<long> st(inst.blocks.count(), 0);
  const double u = inst.params.eta * inst.params.alpha;
  for (int t = 1; t <= 40; ++t) {
    std::vector<double> vals(st.begin(), st.end());
    for (auto& v : vals) v *= u;
    const Vec w = with_block_values(inst, vals);
    const auto s = oracle_step(t, w, inst.blocks, inst.params);
    const double nw = inst.params.alpha * nemirovski_value(w, inst.blocks);
    for (int p = 0; p < 50; ++p) {
      const Vec q = random_ball_point(32, rng);
      double lin = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) lin += s.vector[i] * (q[i] - w[i]);
      CHECK(inst.params.alpha * nemirovski_value(q, inst.blocks) >= nw + lin - 1e-12);
    }
    lattice_step(t, st);
  }
}

TEST_CASE("g-inactivity margin") {
  const auto inst = small_instance(16, 1, 0.3, 1000);
  const std::vector<double> zero(16, 0.0);
  CHECK(g_inactivity_margin(zero, inst.blocks, inst.code, inst.params) ==
        doctest::Approx(inst.params.tau));

  // Push hard along a competitor: the margin goes negative.
  Vec w(16, 0.0);
  for (int i : inst.code.support(1)) w[static_cast<std::size_t>(i)] = 10.0;
  CHECK(g_inactivity_margin(w, inst.blocks, inst.code, inst.params) < 0.0);
}

TEST_CASE("f subgradients and Lipschitz constant") {
  const auto inst = small_instance(16, 1, 0.3, 100);
  std::mt19937_64 rng(2);
  code::DataPoint point{{1, 2, 3}};
  std::vector<Vec> probes;
  for (int i = 0; i < 200; ++i) probes.push_back(random_ball_point(16, rng));
  for (int i = 0; i < 20; ++i) {
    const Vec w = random_ball_point(16, rng);
    const auto s = f_subgradient(3, w, point, inst);
    CHECK(subgradient_inequality_slack(inst, point, w, s.vector, probes) >= -1e-9);
  }
  CHECK(lipschitz_probe(inst, point, 10000, 4) <= 3.0);
}

TEST_CASE("random_ball_point stays in the ball") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(squared_norm(random_ball_point(7, rng)) <= 1.0);
}

TEST_CASE("sample oracle rejects an active g") {
  const auto inst = small_instance(16, 1, 0.3, 1000);
  code::Sample sample;
  sample.points = {code::DataPoint{{1}}};
  const SampleOracle oracle(inst, sample);
  const std::vector<double> zero(16, 0.0);
  CHECK(oracle(2, zero, 0).tag == CaseTag::raise);
  Vec w(16, 0.0);
  for (int i : inst.code.support(1)) w[static_cast<std::size_t>(i)] = 1.0;
  CHECK_THROWS_AS(oracle(2, w, 0), NotASubgradient);
}

TEST_CASE("params JSON round trip") {
  const auto p = make_params(64, 3, 500, 0.05);
  const auto q = params_from_json(to_json(p));
  CHECK(q.d == p.d);
  CHECK(q.k == p.k);
  CHECK(q.horizon == p.horizon);
  CHECK(q.alpha == p.alpha);
  CHECK(q.tau == p.tau);
  CHECK(q.epsilon == p.epsilon);
}

TEST_CASE("exact instance mirrors the double instance") {
  const auto inst = small_instance(16, 4, 0.25, 1000);
  const ExactInstance ex(inst);
  std::mt19937_64 rng(8);
  code::DataPoint point{{0, 2}};
  for (int i = 0; i < 20; ++i) {
    const Vec w = random_ball_point(16, rng);
    RVec rw;
    for (double x : w) rw.push_back(exact_rational(x));
    CHECK(to_double(ex.f_value(rw, point)) == doctest::Approx(inst.f_value(w, point)).epsilon(1e-12));
  }
  RVec zero(16, Rational(0));
  const RVec g = ex.alpha_n_oracle(2, zero);
  const auto s = oracle_step(2, std::vector<double>(16, 0.0), inst.blocks, inst.params);
  for (std::size_t i = 0; i < 16; ++i) CHECK(to_double(g[i]) == doctest::Approx(s.vector[i]));
  const auto bad = small_instance(32, 2, 0.25, 1000);
  CHECK_THROWS(ExactInstance(bad));
}
