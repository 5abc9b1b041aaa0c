#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gdgap/gd_engine.hpp"

using namespace gdgap;
using namespace gdgap::gd;

namespace {

// Hand-rolled phase sequence for three blocks, t = 1..11.
const std::vector<std::vector<long>> kThreeBlocks = {
    {0, 0, 0}, {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {2, 0, 0}, {2, 1, 0},
    {2, 1, 1}, {2, 2, 0}, {3, 1, 0}, {3, 1, 1}, {3, 2, 0}, {3, 2, 1},
};

}  // namespace

TEST_CASE("GDConfig presets and validation") {
  const auto u = GDConfig::uniform(0.1, 4);
  CHECK(u.q == Vec(4, 0.25));
  const auto s = GDConfig::suffix(0.1, 4, 2);
  CHECK(s.q == Vec{0.0, 0.0, 0.5, 0.5});
  GDConfig bad = u;
  bad.q[0] = 2.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(GDConfig::uniform(0.0, 4).validate(), ConfigError);
  CHECK_THROWS_AS(GDConfig::suffix(0.1, 4, 4).validate(), ConfigError);
}

TEST_CASE("zero oracle is a fixed point") {
  const auto traj = run_gd([](std::span<const double> w, std::size_t) { return Vec(w.size(), 0.0); }, 3, 5,
                           GDConfig::uniform(0.5, 10));
  for (const auto& w : traj.iterates) CHECK(squared_norm(w) == 0.0);
  CHECK(squared_norm(traj.weighted_output) == 0.0);

  const auto seq = run_gd_sample_dependent(
      [](int, std::span<const Batch>, std::span<const double> w, std::size_t) {
        return Subgradient{Vec(w.size(), 0.0), CaseTag::zero};
      },
      full_batch_sequence(2, 6), 4, GDConfig::uniform(0.5, 6));
  for (const auto& w : seq.iterates) CHECK(squared_norm(w) == 0.0);
}

TEST_CASE("absolute value with a small offset alternates") {
  const long T = 20;
  const double eta = 0.3, gamma = 1e-3;
  const auto traj = run_gd(
      [&](std::span<const double> w, std::size_t) { return Vec{w[0] > gamma ? 1.0 : -1.0}; }, 1, 1,
      GDConfig::uniform(eta, T));
  for (long t = 1; t <= T; ++t) {
    CHECK(traj.iterates[static_cast<std::size_t>(t)][0] == doctest::Approx(t % 2 ? eta : 0.0));
  }
  CHECK(traj.weighted_output[0] == doctest::Approx(eta / 2));
}

TEST_CASE("linear function gives the arithmetic average") {
  const long T = 30;
  const double eta = 0.2;
  const double beta = 1.0 / ((T + 1) * eta);
  const auto traj = run_gd([&](std::span<const double>, std::size_t) { return Vec{beta}; }, 1, 1,
                           GDConfig::uniform(eta, T));
  CHECK(traj.weighted_output[0] == doctest::Approx(-(T + 1) * eta * beta / 2));
  for (bool p : traj.projection_applied) CHECK_FALSE(p);
}

TEST_CASE("projection onto the ball") {
  const auto traj = run_gd([](std::span<const double>, std::size_t) { return Vec{-1.0, 0.0}; }, 1, 2,
                           GDConfig::uniform(10.0, 3));
  CHECK(traj.projection_applied[0]);
  CHECK(squared_norm(traj.iterates[1]) == doctest::Approx(1.0));
  instance::InstanceParams p;
  p.eta = 10.0;
  p.alpha = 1.0;
  const auto chk = check_no_projection(traj, p);
  CHECK_FALSE(chk.pass);
  CHECK(chk.first_failure == 1);
}

TEST_CASE("closed form staircase for three blocks") {
  for (long t = 1; t <= 11; ++t) CHECK(closed_form_blocks(3, t) == kThreeBlocks[static_cast<std::size_t>(t)]);
  CHECK(closed_form_blocks(3, 11) == std::vector<long>{3, 2, 1});
  CHECK_THROWS_AS(closed_form_blocks(3, 12), OutOfPhase);
}

TEST_CASE("closed form equals lattice simulation") {
  for (int n = 1; n <= 8; ++n) {
    const long Tp = instance::terminal_time(n);
    const auto sim = simulate_lattice(n, Tp);
    for (long t = 1; t <= Tp; ++t) CHECK(closed_form_blocks(n, t) == sim[static_cast<std::size_t>(t)]);
  }
}

TEST_CASE("fault injection breaks the staircase") {
  const auto sim = simulate_lattice(3, 4, {true});
  CHECK(sim[4] != kThreeBlocks[4]);
}

TEST_CASE("hard-instance GD reaches the terminal staircase") {
  const long T = 17 * 11;
  const double eta = 0.3;
  const auto params = instance::make_params(16, 2, T, eta, instance::BlockWidthPolicy::explicit_k, 2);
  const auto inst = instance::build_instance(params, code::build_code(16, 4, 3), 0);
  REQUIRE(inst.blocks.count() == 3);
  code::Sample sample;
  sample.points = {code::DataPoint{{1}}, code::DataPoint{{2, 3}}};
  const instance::SampleOracle oracle(inst, sample);
  const auto traj = run_gd_sample_dependent(hard_instance_oracle(oracle), full_batch_sequence(2, T), 16,
                                            GDConfig::uniform(eta, T));
  const double unit = params.eta * params.alpha;
  for (long t = 1; t <= T; ++t) {
    const Vec expect = closed_form_state(params, inst.blocks, std::min<long>(t, 11));
    const Vec& got = traj.iterates[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < 16; ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
  const auto vals = instance::block_values(traj.iterates[11], inst.blocks);
  CHECK(vals[0] == doctest::Approx(3 * unit));
  CHECK(vals[1] == doctest::Approx(2 * unit));
  CHECK(vals[2] == doctest::Approx(unit));
  CHECK(squared_norm(closed_form_state(params, inst.blocks, 1)) == 0.0);
  CHECK(check_no_projection(traj, params).pass);
  CHECK(partial_sum_monotone(traj, inst.blocks, 1).pass);
  CHECK(partial_sum_monotone(traj, inst.blocks, 5).pass);
}

TEST_CASE("partial sums") {
  const std::vector<Vec> zero(5, Vec(4, 0.0));
  CHECK(partial_sum_monotone(zero, {0, 1, 2, 3}, 2).pass);
  const std::vector<Vec> down{{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.0}};
  const auto r = partial_sum_monotone(down, {0, 1}, 1);
  CHECK_FALSE(r.pass);
  CHECK(r.first_failure == 2);
  // B larger than the coordinate set is clamped.
  CHECK(partial_sum_monotone(zero, {0, 1}, 100).pass);
}

TEST_CASE("one-dimensional lower bound, first case") {
  const auto r = oplow_bound_check(Rational(1, 2), 100);
  CHECK(r.first_case);
  CHECK(r.abs_output == Rational(1, 4));
  CHECK(r.abs_gap == Rational(1, 4) - r.gamma);
  CHECK(r.abs_bound == Rational(1, 8) + Rational(1, 100));
  CHECK(r.abs_holds);
  CHECK(r.pass);
  CHECK_FALSE(r.claim_holds);
}

TEST_CASE("one-dimensional lower bound, second case") {
  // eta^2 T < 1 but (T + 1) eta >= 1: the linear construction is valid.
  const auto r = oplow_bound_check(Rational(1, 50), 100);
  CHECK_FALSE(r.first_case);
  CHECK(r.linear_valid);
  CHECK(r.linear_gap >= r.linear_bound);
  CHECK(r.pass);
  // Below eta = 1/T no 1-Lipschitz linear function reaches 1/(3 T eta).
  const auto tiny = oplow_bound_check(Rational(1, 1000), 100);
  CHECK_FALSE(tiny.linear_valid);
  CHECK(tiny.linear_bound > 2);
  CHECK_FALSE(tiny.pass);
}

TEST_CASE("one-dimensional lower bound at eta = 1/sqrt(T) evaluates both branches") {
  const auto r = oplow_bound_check(Rational(1, 10), 100);
  CHECK(r.first_case);
  CHECK(r.linear_valid);
  CHECK(r.best_gap == (r.abs_gap > r.linear_gap ? r.abs_gap : r.linear_gap));
  CHECK(r.pass);
}

TEST_CASE("trajectory JSON lines") {
  const auto traj = run_gd([](std::span<const double>, std::size_t) { return Vec{1.0, 0.0}; }, 1, 2,
                           GDConfig::uniform(0.1, 3));
  std::ostringstream out;
  write_trajectory_jsonl(out, traj);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 4);
  CHECK(out.str().find("\"step\":3") != std::string::npos);
}
