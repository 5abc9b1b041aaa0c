#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "gdgap/feldman_code.hpp"

using namespace gdgap;
using namespace gdgap::code;

namespace {

// Brute-force dot over explicit bits.
int naive_dot(const BinaryCode& c, std::size_t a, std::size_t b) {
  int s = 0;
  for (int i = 0; i < c.dimension(); ++i) s += c.bit(a, i) && c.bit(b, i);
  return s;
}

BinaryCode from_bits(int d, const std::vector<std::vector<int>>& supports) {
  BinaryCode c(d);
  for (const auto& sup : supports) {
    c.push_back(std::vector<std::uint64_t>(c.words(), 0));
    for (int i : sup) c.set_bit(c.size() - 1, i, true);
  }
  return c;
}

}  // namespace

TEST_CASE("single vector code") {
  const auto c = build_code(16, 1, 99);
  REQUIRE(c.size() == 1);
  CHECK(c.weight(0) >= 7);
  const auto rep = verify_code(c);
  CHECK(rep.pass);
  CHECK(rep.max_pair_dot == -1);
}

TEST_CASE("d=256 code certificate against brute force") {
  const auto c = build_code(256, 8, 1);
  REQUIRE(c.size() == 8);
  const auto rep = verify_code(c);
  int max_pair = -1, min_self = 1 << 30;
  for (std::size_t a = 0; a < c.size(); ++a) {
    min_self = std::min(min_self, naive_dot(c, a, a));
    for (std::size_t b = a + 1; b < c.size(); ++b) max_pair = std::max(max_pair, naive_dot(c, a, b));
  }
  CHECK(rep.pass);
  CHECK(rep.max_pair_dot == max_pair);
  CHECK(rep.min_self_dot == min_self);
  CHECK(max_pair <= 80);
  CHECK(min_self >= 112);
}

TEST_CASE("build_code failure modes") {
  CHECK_THROWS_AS(build_code(16, 1000000, 1), ConstructionFailed);
  CHECK_THROWS(build_code(20, 4, 1));
  CHECK_THROWS(build_code(16, 0, 1));
}

TEST_CASE("verify_code edge cases") {
  const BinaryCode empty(16);
  CHECK(verify_code(empty).pass);
  std::vector<int> sup{0, 1, 2, 3, 4, 5, 6, 7};
  const auto dup = from_bits(16, {sup, sup});
  const auto rep = verify_code(dup);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.pairs_ok);
  CHECK(rep.max_pair_dot == 8);
  const auto light = from_bits(16, {{0, 1, 2}});
  CHECK_FALSE(verify_code(light).weights_ok);
}

TEST_CASE("build_code is deterministic and certified at several sizes") {
  for (int d : {16, 32, 64, 128}) {
    const auto a = build_code(d, 8, 3);
    const auto b = build_code(d, 8, 3);
    CHECK(verify_code(a).pass);
    for (std::size_t r = 0; r < a.size(); ++r) CHECK(a.row(r) == b.row(r));
  }
}

TEST_CASE("choose_epsilon") {
  CHECK(choose_epsilon(520, 4) == doctest::Approx(0.25));
  CHECK(choose_epsilon(52, 100) == doctest::Approx(0.001));
  CHECK(choose_epsilon(1000000, 1) == 0.25);
}

TEST_CASE("draw_sample") {
  const auto c = build_code(32, 8, 2);
  const auto all = draw_sample(c, 5, 1.0, 4);
  for (const auto& p : all.points) CHECK(p.included.size() == 8);
  CHECK_FALSE(find_uncovered(c, all).has_value());

  const auto s1 = draw_sample(c, 1000, 0.5, 11);
  const auto s2 = draw_sample(c, 1000, 0.5, 11);
  CHECK(s1.points == s2.points);
  double mean = 0.0;
  for (const auto& p : s1.points) mean += static_cast<double>(p.included.size());
  mean /= 1000.0;
  // Binomial(8, 1/2): standard error of the mean is sqrt(2 / 1000).
  CHECK(std::abs(mean - 4.0) <= 3.0 * std::sqrt(2.0 / 1000.0));
  CHECK_THROWS(draw_sample(c, 3, 0.0, 1));
}

TEST_CASE("find_uncovered agrees with set union") {
  const auto c = build_code(64, 16, 5);
  Sample empty;
  empty.points.resize(4);
  CHECK(find_uncovered(c, empty) == 0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = draw_sample(c, 6, 0.3, seed);
    std::set<int> covered;
    for (const auto& p : s.points) covered.insert(p.included.begin(), p.included.end());
    std::optional<int> expect;
    for (int v = 0; v < static_cast<int>(c.size()); ++v) {
      if (!covered.count(v)) {
        expect = v;
        break;
      }
    }
    CHECK(find_uncovered(c, s) == expect);
  }
}

TEST_CASE("population_g") {
  const auto c = build_code(32, 6, 8);
  const double tau = 0.7;
  const std::vector<double> zero(32, 0.0);
  CHECK(population_g(zero, c, 0.3, tau) == doctest::Approx(tau / std::sqrt(32.0)));

  std::mt19937_64 rng(21);
  std::vector<double> w(32);
  for (auto& x : w) x = uniform01(rng) - 0.3;

  double best = tau;
  for (std::size_t v = 0; v < c.size(); ++v) best = std::max(best, c.dot(v, w));
  CHECK(population_g(w, c, 1.0, tau) == doctest::Approx(best / std::sqrt(32.0)));

  const double eps = 0.3;
  const double exact = population_g(w, c, eps, tau);
  const int draws = 1000000;
  std::mt19937_64 mc(1234);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    double m = tau;
    for (std::size_t v = 0; v < c.size(); ++v) {
      if (uniform01(mc) < eps) m = std::max(m, c.dot(v, w));
    }
    const double g = m / std::sqrt(32.0);
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - exact) <= 3.0 * se);
}

TEST_CASE("g_value conventions") {
  const auto c = build_code(32, 4, 9);
  const double tau = 0.5;
  const std::vector<double> zero(32, 0.0);
  DataPoint none;
  CHECK(g_value(zero, none, c, tau) == doctest::Approx(tau / std::sqrt(32.0)));
  DataPoint one{{0}};
  std::vector<double> w(32, 0.0);
  const double norm = std::sqrt(static_cast<double>(c.weight(0)));
  for (int i : c.support(0)) w[static_cast<std::size_t>(i)] = 1.0 / norm;
  CHECK(g_value(w, one, c, tau) == doctest::Approx(norm / std::sqrt(32.0)));
  CHECK(g_value(w, none, c, tau) == doctest::Approx(tau / std::sqrt(32.0)));
}

TEST_CASE("coverage probability formula") {
  CHECK(coverage_probability(16, 8, 1.0) == doctest::Approx(0.0));
  const double eps = 0.03, p = std::pow(1 - eps, 8);
  CHECK(coverage_probability(16, 8, eps) == doctest::Approx(1 - std::pow(1 - p, 16)));
}

TEST_CASE("JSON round trips") {
  const auto c = build_code(48, 5, 17);
  const auto back = code_from_json(to_json(c, 17));
  REQUIRE(back.size() == c.size());
  CHECK(back.dimension() == 48);
  for (std::size_t r = 0; r < c.size(); ++r) CHECK(back.row(r) == c.row(r));

  const auto s = draw_sample(c, 7, 0.4, 3);
  const auto t = sample_from_json(to_json(s, c.size()));
  CHECK(t.points == s.points);
  CHECK(t.epsilon == s.epsilon);
  CHECK(t.seed == s.seed);
  CHECK_THROWS(code_from_json("{\"format\":\"other\"}"));

  std::vector<bool> bits{true, false, false, false, false, true, false, false, true};
  CHECK(bits_to_hex(bits) == "848");
  CHECK(hex_to_bits("848", 9) == bits);
  CHECK_THROWS(hex_to_bits("84f", 9));
}
