#include "gdgap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gdgap/interpolation.hpp"
#include "gdgap/reduction.hpp"
#include "gdgap/sample_encoder.hpp"

namespace gdgap::exp {

const char* to_string(Mode mode) {
  return mode == Mode::oracle_direct ? "oracle-direct" : "full-reduction";
}

Mode mode_from_string(const std::string& text) {
  if (text == "oracle-direct") return Mode::oracle_direct;
  if (text == "full-reduction") return Mode::full_reduction;
  throw ConfigError("unknown mode '" + text + "' (expected oracle-direct or full-reduction)");
}

double ExperimentConfig::resolved_eta() const {
  return eta.value_or(1.0 / std::sqrt(static_cast<double>(T)));
}

namespace {

bool perfect_square(long x) {
  const auto r = static_cast<long>(std::llround(std::sqrt(static_cast<double>(x))));
  return r * r == x;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* policy_name(instance::BlockWidthPolicy p) {
  switch (p) {
    case instance::BlockWidthPolicy::staircase_fit: return "staircase-fit";
    case instance::BlockWidthPolicy::paper_bracket: return "bracket";
    case instance::BlockWidthPolicy::explicit_k: return "explicit";
  }
  return "staircase-fit";
}

instance::BlockWidthPolicy policy_from_name(const std::string& s) {
  if (s == "staircase-fit") return instance::BlockWidthPolicy::staircase_fit;
  if (s == "bracket") return instance::BlockWidthPolicy::paper_bracket;
  if (s == "explicit") return instance::BlockWidthPolicy::explicit_k;
  throw ConfigError("unknown block policy '" + s + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (d < 16 || d % 16 != 0) throw ConfigError("d must be a positive multiple of 16");
  if (m < 1) throw ConfigError("m must be >= 1");
  if (T < 1) throw ConfigError("T must be >= 1");
  if (!(resolved_eta() > 0.0)) throw ConfigError("eta must be positive");
  if (trials < 0) throw ConfigError("trials must be >= 0");
  if (code_size < 1) throw ConfigError("code size must be >= 1");
  if (suffix < 0 || suffix >= T) throw ConfigError("suffix must lie in [0, T-1]");
  if (epsilon && !(*epsilon > 0.0 && *epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
  if (policy == instance::BlockWidthPolicy::explicit_k && k < 1) {
    throw ConfigError("explicit block width needs k >= 1");
  }
  if (mode == Mode::full_reduction) {
    if (!perfect_square(d)) throw ConfigError("full-reduction mode needs a perfect-square d");
    const double n = static_cast<double>(T + 2);
    const double work = n * n * n * (d + 1) * m;
    if (work > 6e7) throw ConfigError("full-reduction mode is limited to tiny instances");
  }
}

ExperimentConfig config_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  ExperimentConfig c;
  if (doc.contains("d")) c.d = doc["d"];
  if (doc.contains("m")) c.m = doc["m"];
  if (doc.contains("T")) c.T = doc["T"];
  if (doc.contains("eta") && !doc["eta"].is_null()) {
    if (doc["eta"].is_string()) {
      if (doc["eta"] != "sqrtT") throw ConfigError("eta preset must be 'sqrtT'");
    } else {
      c.eta = doc["eta"].get<double>();
    }
  }
  if (doc.contains("trials")) c.trials = doc["trials"];
  if (doc.contains("seed")) c.seed = doc["seed"];
  if (doc.contains("code_size")) c.code_size = doc["code_size"];
  if (doc.contains("mode")) c.mode = mode_from_string(doc["mode"]);
  if (doc.contains("suffix")) c.suffix = doc["suffix"];
  if (doc.contains("epsilon") && !doc["epsilon"].is_null()) c.epsilon = doc["epsilon"].get<double>();
  if (doc.contains("block_policy")) c.policy = policy_from_name(doc["block_policy"]);
  if (doc.contains("k")) c.k = doc["k"];
  if (doc.contains("out")) c.out = doc["out"];
  return c;
}

std::string to_json(const ExperimentConfig& c) {
  nlohmann::json doc = {{"d", c.d},
                        {"m", c.m},
                        {"T", c.T},
                        {"trials", c.trials},
                        {"seed", c.seed},
                        {"code_size", c.code_size},
                        {"mode", to_string(c.mode)},
                        {"suffix", c.suffix},
                        {"block_policy", policy_name(c.policy)},
                        {"k", c.k},
                        {"out", c.out}};
  doc["eta"] = c.eta ? nlohmann::json(*c.eta) : nlohmann::json("sqrtT");
  doc["epsilon"] = c.epsilon ? nlohmann::json(*c.epsilon) : nlohmann::json(nullptr);
  return doc.dump();
}

TrialResult run_trial(const ExperimentConfig& config, const instance::InstanceParams& params,
                      const code::BinaryCode& code, std::size_t trial) {
  TrialResult r;
  r.trial = trial;
  r.seed = mix_seed(config.seed, trial);
  const double eta = params.eta;
  const double scale = std::min(eta * std::sqrt(static_cast<double>(config.T)), 1.0);
  r.bound = params.epsilon * scale / (2.0 * 6.0 * 256.0);
  r.bound_alt = params.epsilon * scale / (std::sqrt(2.0) * 272.0 * 256.0);

  const code::Sample sample = code::draw_sample(code, config.m, params.epsilon, r.seed);
  const auto vstar = code::find_uncovered(code, sample);
  if (!vstar) return r;
  r.vstar_found = true;
  r.vstar = *vstar;

  const instance::HardInstance inst = instance::build_instance(params, code, *vstar);
  const instance::SampleOracle oracle(inst, sample);
  const gd::GDConfig gdc = config.suffix == 0 ? gd::GDConfig::uniform(eta, config.T)
                                              : gd::GDConfig::suffix(eta, config.T, config.suffix);
  const auto traj = gd::run_gd_sample_dependent(gd::hard_instance_oracle(oracle),
                                                gd::full_batch_sequence(sample.size(), config.T),
                                                static_cast<std::size_t>(params.d), gdc);
  const Vec zero(static_cast<std::size_t>(params.d), 0.0);
  const double f0 = inst.population_f(zero);
  r.gap = inst.population_f(traj.weighted_output) - f0;
  double best = f0;
  for (std::size_t t = 1; t < traj.iterates.size(); ++t) {
    if (traj.iterates[t] == traj.iterates[t - 1]) continue;
    best = std::min(best, inst.population_f(traj.iterates[t]));
  }
  r.probe_gap = inst.population_f(traj.weighted_output) - best;
  r.pass = r.gap >= std::min(r.bound, r.bound_alt);
  r.no_projection = gd::check_no_projection(traj, params).pass;
  r.inactivity_margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < traj.iterates.size(); ++t) {
    if (t > 0 && traj.iterates[t] == traj.iterates[t - 1]) continue;
    r.inactivity_margin =
        std::min(r.inactivity_margin, instance::g_inactivity_margin(traj.iterates[t], inst.blocks, code, params));
  }

  if (config.mode == Mode::full_reduction) {
    const instance::ExactInstance exact(inst);
    const red::ExactProblem problem = red::hard_instance_problem(exact, sample);
    std::vector<Rational> q(static_cast<std::size_t>(config.T), Rational(0));
    for (long t = config.suffix + 1; t <= config.T; ++t) {
      q[static_cast<std::size_t>(t - 1)] = Rational(1, config.T - config.suffix);
    }
    enc::Batch all;
    for (std::size_t z = 0; z < sample.size(); ++z) all.push_back(z);
    const enc::SampleSequence seq(static_cast<std::size_t>(config.T), all);
    const red::Encoder encoder = red::make_encoder({seq}, sample.size(), q, Rational(1, 1000), exact.eta());
    const red::TripletSetG G = red::build_G(problem, encoder, {seq}, q);
    const auto models = red::build_bar_f(G, problem.lipschitz + 1);
    const auto replay = red::adversarial_replay(models, G.trajectories.front(), exact.eta(), q, r.seed);
    Vec u(static_cast<std::size_t>(params.d));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = to_double(replay.uq[i]);
    r.reduction_run = true;
    r.reduction_gap = inst.population_f(u) - f0;
    r.modes_agree = std::abs(r.reduction_gap - r.gap) <= 1e-12 * std::max(std::abs(r.gap), 1e-300);
  }
  return r;
}

GapReport run_gap_trials(const ExperimentConfig& config) {
  config.validate();
  GapReport rep;
  rep.config = config;
  const int k = config.policy == instance::BlockWidthPolicy::explicit_k ? config.k : 0;
  rep.params = instance::make_params(config.d, config.m, config.T, config.resolved_eta(), config.policy, k,
                                     config.epsilon);
  const code::BinaryCode code = code::build_code(config.d, config.code_size, config.seed);
  rep.trials.resize(static_cast<std::size_t>(config.trials));

  unsigned threads = 1;
  if (const char* env = std::getenv("GDGAP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) threads = static_cast<unsigned>(v);
  }
  threads = std::min<unsigned>(threads, std::max(1, config.trials));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < rep.trials.size(); i = next++) {
      try {
        rep.trials[i] = run_trial(config, rep.params, code, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> gaps;
  bool modes_ok = true;
  for (const auto& t : rep.trials) {
    if (!t.vstar_found) continue;
    ++rep.found;
    gaps.push_back(t.gap);
    if (t.pass) ++rep.passed;
    if (t.reduction_run && !t.modes_agree) modes_ok = false;
  }
  const auto n = static_cast<double>(rep.trials.size());
  rep.success_frequency = n > 0 ? static_cast<double>(rep.passed) / n : 0.0;
  rep.conditional_success_frequency = rep.found > 0 ? static_cast<double>(rep.passed) / static_cast<double>(rep.found) : 0.0;
  if (!gaps.empty()) {
    std::sort(gaps.begin(), gaps.end());
    const std::size_t mid = gaps.size() / 2;
    rep.median_gap = gaps.size() % 2 ? gaps[mid] : 0.5 * (gaps[mid - 1] + gaps[mid]);
  }
  rep.coverage_probability = code::coverage_probability(code.size(), config.m, rep.params.epsilon);
  rep.degenerate = rep.found == 0;
  rep.coverage_asserted = rep.coverage_probability >= 0.5;
  rep.all_pass = !rep.degenerate && rep.passed == rep.found && modes_ok &&
                 (!rep.coverage_asserted || rep.success_frequency >= 0.5);
  return rep;
}

std::string report_csv(const GapReport& report) {
  std::string out = "trial,seed,vstar_found,vstar,gap,bound,bound_alt,pass\n";
  for (const auto& t : report.trials) {
    out += std::to_string(t.trial) + "," + std::to_string(t.seed) + "," + (t.vstar_found ? "1" : "0") + "," +
           std::to_string(t.vstar) + "," + fmt(t.gap) + "," + fmt(t.bound) + "," + fmt(t.bound_alt) + "," +
           (t.pass ? "1" : "0") + "\n";
  }
  return out;
}

std::string report_json(const GapReport& r) {
  nlohmann::ordered_json doc;
  doc["format"] = "gdgap.gap_report";
  doc["version"] = 1;
  doc["config"] = nlohmann::json::parse(to_json(r.config));
  doc["params"] = nlohmann::json::parse(instance::to_json(r.params));
  doc["trials"] = r.trials.size();
  doc["found"] = r.found;
  doc["passed"] = r.passed;
  doc["success_frequency"] = r.success_frequency;
  doc["conditional_success_frequency"] = r.conditional_success_frequency;
  doc["median_gap"] = r.median_gap;
  doc["coverage_probability"] = r.coverage_probability;
  doc["coverage_asserted"] = r.coverage_asserted;
  doc["degenerate"] = r.degenerate;
  double min_margin = std::numeric_limits<double>::infinity();
  bool no_projection = true;
  std::size_t reduction_runs = 0, agreements = 0;
  for (const auto& t : r.trials) {
    if (!t.vstar_found) continue;
    min_margin = std::min(min_margin, t.inactivity_margin);
    no_projection = no_projection && t.no_projection;
    if (t.reduction_run) {
      ++reduction_runs;
      if (t.modes_agree) ++agreements;
    }
  }
  doc["min_inactivity_margin"] = r.found > 0 ? nlohmann::ordered_json(min_margin) : nlohmann::ordered_json(nullptr);
  doc["no_projection"] = no_projection;
  doc["reduction_runs"] = reduction_runs;
  doc["mode_agreements"] = reduction_runs > 0 ? nlohmann::ordered_json(agreements) : nlohmann::ordered_json(nullptr);
  doc["all_pass"] = r.all_pass;
  return doc.dump(2) + "\n";
}

void export_report(const GapReport& report, const std::string& path) {
  std::string base = path;
  for (const char* ext : {".csv", ".json"}) {
    const std::string e(ext);
    if (base.size() > e.size() && base.compare(base.size() - e.size(), e.size(), e) == 0) {
      base.resize(base.size() - e.size());
    }
  }
  auto write = [](const std::string& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + file + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + file);
  };
  write(base + ".csv", report_csv(report));
  write(base + ".json", report_json(report));
}

GridCase make_grid_case(int d, int k, bool eta_sqrt) {
  GridCase g;
  g.d = d;
  g.k = k;
  g.eta_sqrt = eta_sqrt;
  g.n = instance::staircase_blocks(d, k);
  g.terminal = instance::terminal_time(g.n);
  g.T = 17 * g.terminal;
  g.eta = eta_sqrt ? 1.0 / std::sqrt(static_cast<double>(g.T)) : 0.3;
  return g;
}

std::vector<GridCase> default_grid() {
  std::vector<GridCase> out;
  for (int d : {16, 32, 64}) {
    for (int k : {1, 2, 4}) {
      for (bool s : {false, true}) out.push_back(make_grid_case(d, k, s));
    }
  }
  return out;
}

namespace {

long top_sum(std::vector<long> vals, int B) {
  const auto take = static_cast<std::size_t>(std::clamp<int>(B, 0, static_cast<int>(vals.size())));
  std::partial_sort(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(take), vals.end(), std::greater<>());
  long s = 0;
  for (std::size_t i = 0; i < take; ++i) s += vals[i];
  return s;
}

}  // namespace

GridResult run_grid_case(const GridCase& grid, const GridOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  GridResult res;
  res.grid = grid;
  res.params = instance::make_params(grid.d, options.m, grid.T, grid.eta, instance::BlockWidthPolicy::explicit_k,
                                     grid.k);
  const code::BinaryCode code = code::build_code(grid.d, options.code_size, options.seed);
  code::Sample sample;
  for (std::uint64_t attempt = 0;; ++attempt) {
    sample = code::draw_sample(code, options.m, res.params.epsilon, mix_seed(options.seed, attempt));
    if (auto v = code::find_uncovered(code, sample)) {
      res.vstar = *v;
      break;
    }
    if (attempt > 1000) throw ConstructionFailed("run_grid_case: every sample covers the code");
  }
  const instance::HardInstance inst = instance::build_instance(res.params, code, res.vstar);
  const auto& blocks = inst.blocks;
  const int n = static_cast<int>(blocks.count());

  // Lattice mode.
  std::vector<std::vector<long>> states{std::vector<long>(static_cast<std::size_t>(n), 0)};
  long failed_step = -1;
  for (long t = 1; t <= grid.terminal + 2; ++t) {
    auto next = states.back();
    try {
      instance::lattice_step(static_cast<int>(t), next, options.oracle);
    } catch (const NotASubgradient&) {
      failed_step = t;
      break;
    }
    states.push_back(std::move(next));
  }
  res.lattice_matches = true;
  for (long t = 0; t < static_cast<long>(states.size()) && t <= grid.terminal; ++t) {
    if (states[static_cast<std::size_t>(t)] != gd::closed_form_blocks(n, t)) {
      res.lattice_matches = false;
      res.lattice_first_mismatch = t;
      break;
    }
  }
  if (failed_step >= 0 && res.lattice_matches) {
    res.lattice_matches = false;
    res.lattice_first_mismatch = failed_step;
  }
  res.terminal_constant = failed_step < 0 &&
                          states[static_cast<std::size_t>(grid.terminal + 1)] == states[static_cast<std::size_t>(grid.terminal)] &&
                          states[static_cast<std::size_t>(grid.terminal + 2)] == states[static_cast<std::size_t>(grid.terminal)];

  res.norm_bound_exact = true;
  for (long t = 1; t <= grid.T; ++t) {
    const auto& b = states[static_cast<std::size_t>(std::min<long>(t, static_cast<long>(states.size()) - 1))];
    long s2 = 0;
    for (long x : b) s2 += x * x;
    if (s2 > 2 * t) {
      res.norm_bound_exact = false;
      res.norm_first_failure = t;
      break;
    }
  }

  // w·v = (eta alpha / sqrt k) sum_j b_j |v cap I_j| and tau = 45 eta alpha d^2 / (512 k^1.5).
  std::vector<std::vector<long>> overlap;
  for (std::size_t v = 0; v < code.size(); ++v) {
    if (static_cast<int>(v) == res.vstar) continue;
    std::vector<long> o;
    for (const auto& block : blocks.blocks) {
      long c = 0;
      for (int i : block) c += code.bit(v, i) ? 1 : 0;
      o.push_back(c);
    }
    overlap.push_back(std::move(o));
  }
  const long double d = grid.d;
  const long double scaled_rhs = 2025.0L * d * d * d * d * d;
  const long strict_rhs = 45L * grid.d * grid.d;
  res.inactivity_scaled_exact = true;
  res.inactivity_strict_exact = true;
  for (const auto& b : states) {
    for (const auto& o : overlap) {
      long s = 0;
      for (int j = 0; j < n; ++j) s += b[static_cast<std::size_t>(j)] * o[static_cast<std::size_t>(j)];
      const long lhs = 512L * grid.k * s;
      if (static_cast<long double>(lhs) * lhs > scaled_rhs) res.inactivity_scaled_exact = false;
      if (lhs > strict_rhs) res.inactivity_strict_exact = false;
    }
  }

  const int b5 = 5 * grid.d / 16;
  res.monotone_b1 = true;
  res.monotone_b5 = true;
  long prev1 = 0, prev5 = 0;
  for (const auto& b : states) {
    std::vector<long> coords;
    for (long x : b) coords.insert(coords.end(), static_cast<std::size_t>(grid.k), x);
    const long x1 = top_sum(coords, 1);
    const long x5 = top_sum(coords, b5);
    if (x1 < prev1) res.monotone_b1 = false;
    if (x5 < prev5) res.monotone_b5 = false;
    prev1 = x1;
    prev5 = x5;
  }

  if (options.run_float) {
    try {
      const instance::SampleOracle oracle(inst, sample, options.oracle);
      const auto traj = gd::run_gd_sample_dependent(gd::hard_instance_oracle(oracle),
                                                    gd::full_batch_sequence(sample.size(), grid.T),
                                                    static_cast<std::size_t>(grid.d), gd::GDConfig::uniform(grid.eta, grid.T));
      res.float_ran = true;
      for (long t = 0; t <= grid.terminal; ++t) {
        const Vec expected = gd::closed_form_state(res.params, blocks, t);
        const Vec& w = traj.iterates[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < w.size(); ++i) {
          res.float_max_error = std::max(res.float_max_error, std::abs(w[i] - expected[i]));
        }
      }
      const auto np = gd::check_no_projection(traj, res.params);
      res.no_projection = np.pass;
      res.no_projection_first_failure = np.first_failure;
      res.float_monotone_b1 = gd::partial_sum_monotone(traj, blocks, 1).pass;
      res.float_monotone_b5 = gd::partial_sum_monotone(traj, blocks, b5).pass;
    } catch (const std::exception& e) {
      res.float_error = e.what();
    }
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<gd::OplowResult> oplow_sweep(long T, int points) {
  if (points < 2) throw ConfigError("oplow_sweep: need at least two grid points");
  std::vector<long> numerators;
  for (int i = 0; i < points; ++i) {
    const double e = static_cast<double>(i) / (points - 1);
    numerators.push_back(std::max<long>(1, std::lround(std::pow(static_cast<double>(T), e))));
  }
  std::sort(numerators.begin(), numerators.end());
  numerators.erase(std::unique(numerators.begin(), numerators.end()), numerators.end());
  std::vector<gd::OplowResult> out;
  for (long j : numerators) out.push_back(gd::oplow_bound_check(Rational(j, T), T));
  return out;
}

std::vector<Check> run_invariant_suite(const SuiteOptions& options) {
  std::vector<Check> checks;
  GridOptions go;
  go.oracle.raise_before_swap = options.inject_fault;
  go.seed = options.seed;

  Check closed{"closed_form_trajectory", true, ""};
  Check projection{"no_projection", true, ""};
  Check inactivity{"g_inactivity", true, ""};
  Check monotone{"partial_sum_monotone", true, ""};
  for (const auto& g : default_grid()) {
    go.run_float = g.d <= 32;
    const GridResult r = run_grid_case(g, go);
    const std::string tag = "d=" + std::to_string(g.d) + " k=" + std::to_string(g.k) +
                            (g.eta_sqrt ? " eta=1/sqrtT" : " eta=0.3");
    const bool float_ok = !go.run_float || (r.float_ran && r.float_max_error <= 1e-10);
    if (!r.lattice_matches || !r.terminal_constant || !float_ok) {
      if (closed.pass) {
        closed.detail = tag + (r.lattice_matches ? "" : ": first mismatch at t=" + std::to_string(r.lattice_first_mismatch)) +
                        (r.float_error.empty() ? "" : " (" + r.float_error + ")");
      }
      closed.pass = false;
    }
    if (!r.norm_bound_exact || (go.run_float && !r.no_projection)) {
      if (projection.pass) projection.detail = tag + ": first failure at t=" + std::to_string(r.norm_first_failure);
      projection.pass = false;
    }
    if (!r.inactivity_scaled_exact) {
      if (inactivity.pass) inactivity.detail = tag;
      inactivity.pass = false;
    }
    if (!r.monotone_b1 || !r.monotone_b5) {
      if (monotone.pass) monotone.detail = tag;
      monotone.pass = false;
    }
  }
  checks.push_back(closed);
  checks.push_back(projection);
  checks.push_back(inactivity);
  checks.push_back(monotone);

  {
    Check c{"interpolation", true, ""};
    std::mt19937_64 rng(options.seed);
    for (int rep = 0; rep < 5 && c.pass; ++rep) {
      std::vector<interp::Triplet<double>> ts;
      for (int j = 0; j < 5; ++j) {
        Vec w = instance::random_ball_point(3, rng);
        ts.push_back({0.5 * squared_norm(w), w, w});
      }
      const auto model = interp::certify(ts, 1.0);
      for (std::size_t j = 0; j < ts.size(); ++j) {
        const auto g = interp::gradient_at(model, ts[j].point);
        if (interp::evaluate(model, ts[j].point).value != ts[j].value || !g || *g != ts[j].gradient) {
          c.pass = false;
          c.detail = "stored point " + std::to_string(j) + " not reproduced";
        }
      }
    }
    checks.push_back(c);
  }
  {
    const int T = 3;
    const auto rep = enc::check_injectivity(1, T, 2, std::vector<Rational>(T, Rational(1, T)));
    checks.push_back({"encoder_injectivity", rep.pass(),
                      "states=" + std::to_string(rep.states) + " outputs=" + std::to_string(rep.outputs)});
  }
  {
    Check c{"oplow", true, ""};
    for (long T : {10L, 100L, 1000L}) {
      for (const auto& r : oplow_sweep(T, 25)) {
        if (!r.pass && c.pass) {
          c.pass = false;
          c.detail = "T=" + std::to_string(T) + " eta=" + gdgap::to_string(r.eta);
        }
      }
    }
    checks.push_back(c);
  }
  {
    Check c{"reduction_replay", true, ""};
    const int T = 2;
    const auto problem = red::prefix_toy(T, Rational(1, 2), 2, 0);
    const std::vector<Rational> q(T, Rational(1, T));
    red::Scope scope;
    const auto seqs = red::scope_sequences(scope, 2, T);
    const auto encoder = red::make_encoder(seqs, 2, q, Rational(1, 100), Rational(1, 2));
    const auto G = red::build_G(problem, encoder, seqs, q);
    const auto models = red::build_bar_f(G, problem.lipschitz + 1);
    try {
      for (const auto& traj : G.trajectories) {
        for (std::uint64_t s = 0; s < 10; ++s) {
          if (!red::adversarial_replay(models, traj, encoder.eta, q, mix_seed(options.seed, s)).output_matches) {
            c.pass = false;
          }
        }
      }
    } catch (const TrajectoryDiverged& e) {
      c.pass = false;
      c.detail = e.what();
    }
    checks.push_back(c);
  }
  return checks;
}

}  // namespace gdgap::exp
