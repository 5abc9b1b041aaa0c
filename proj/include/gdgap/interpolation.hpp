#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "gdgap/rational.hpp"
#include "gdgap/types.hpp"

namespace gdgap::interp {

template <class S>
struct Triplet {
  S value{};
  std::vector<S> gradient;
  std::vector<S> point;
};

/// Certified max-of-affine extension f(w) = max_j {f_j + g_j·(w - w_j)}.
template <class S>
struct Model {
  std::vector<Triplet<S>> triplets;
  S lipschitz{};
  std::vector<std::size_t> diff_set;  // ascending
  // Smallest normalized slack of f_i - f_j - g_j·(w_i - w_j) over i != j.
  double min_slack = 0.0;
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;

  std::size_t dimension() const { return triplets.empty() ? 0 : triplets.front().point.size(); }
  bool differentiable_at(std::size_t i) const {
    return std::binary_search(diff_set.begin(), diff_set.end(), i);
  }
};

template <class S>
struct Evaluation {
  S value{};
  std::vector<std::size_t> active;
};

namespace detail {

// Comparison policy: relative tolerance for doubles, exact for rationals.
inline double tolerance(double a, double b) { return 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }
inline bool close(double a, double b) { return std::abs(a - b) <= tolerance(a, b); }
inline bool at_least(double a, double b) { return a >= b - tolerance(a, b); }
inline double normalized(double slack, double a, double b) {
  return slack / (1.0 + std::abs(a) + std::abs(b));
}

inline bool close(const Rational& a, const Rational& b) { return a == b; }
inline bool at_least(const Rational& a, const Rational& b) { return a >= b; }
inline double normalized(const Rational& slack, const Rational& a, const Rational& b) {
  return to_double(slack) / (1.0 + std::abs(to_double(a)) + std::abs(to_double(b)));
}

// Products are summed before the value is added so that, with exact
// rationals, large entries enter the normalization as late as possible.
template <class S>
S affine(const Triplet<S>& t, const std::vector<S>& w) {
  S acc{};
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (t.gradient[i] != 0 && w[i] != t.point[i]) acc += t.gradient[i] * (w[i] - t.point[i]);
  }
  return acc + t.value;
}

template <class S>
bool same_vector(const std::vector<S>& a, const std::vector<S>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!close(a[i], b[i])) return false;
  }
  return true;
}

template <class S>
S squared(const std::vector<S>& v) {
  S acc{};
  for (const auto& x : v) acc += x * x;
  return acc;
}

}  // namespace detail

/// Checks f_i >= f_j + g_j·(w_i - w_j) for every pair and |g_j| <= L, and
/// computes the differentiability set. Throws NotInterpolable with the most
/// violated pair, or ConfigError on malformed input.
template <class S>
Model<S> certify(std::vector<Triplet<S>> triplets, const S& L) {
  if (triplets.empty()) throw ConfigError("certify: empty triplet list");
  const std::size_t d = triplets.front().point.size();
  for (const auto& t : triplets) {
    if (t.point.size() != d) throw DimensionMismatch(d, t.point.size());
    if (t.gradient.size() != d) throw DimensionMismatch(d, t.gradient.size());
    if (!detail::at_least(L * L, detail::squared(t.gradient))) {
      throw ConfigError("certify: gradient norm exceeds the Lipschitz constant");
    }
  }
  Model<S> model;
  model.lipschitz = L;
  const std::size_t n = triplets.size();
  double worst = std::numeric_limits<double>::infinity();
  S worst_exact{};
  bool have_worst = false;
  std::size_t wi = 0, wj = 0;
  bool failed = false;
  std::vector<bool> differentiable(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const S lower = detail::affine(triplets[j], triplets[i].point);
      const S& fi = triplets[i].value;
      if constexpr (std::is_same_v<S, double>) {
        const double slack = detail::normalized(fi - lower, fi, triplets[j].value);
        if (slack < worst) {
          worst = slack;
          wi = i;
          wj = j;
        }
      } else {
        const S slack = fi - lower;
        if (!have_worst || slack < worst_exact) {
          have_worst = true;
          worst_exact = slack;
          wi = i;
          wj = j;
        }
      }
      if (!detail::at_least(fi, lower)) failed = true;
      if (detail::close(fi, lower) && !detail::same_vector(triplets[j].gradient, triplets[i].gradient)) {
        differentiable[i] = false;
      }
    }
  }
  if constexpr (!std::is_same_v<S, double>) {
    if (have_worst) worst = detail::normalized(worst_exact, triplets[wi].value, triplets[wj].value);
  }
  if (failed) throw NotInterpolable(wi, wj, worst);
  model.min_slack = n > 1 ? worst : 0.0;
  model.worst_i = wi;
  model.worst_j = wj;
  for (std::size_t i = 0; i < n; ++i) {
    if (differentiable[i]) model.diff_set.push_back(i);
  }
  model.triplets = std::move(triplets);
  return model;
}

/// Value of the extension and every affine piece attaining it. At a stored
/// point the value is the stored f_j.
template <class S>
Evaluation<S> evaluate(const Model<S>& model, const std::vector<S>& w) {
  if (w.size() != model.dimension()) throw DimensionMismatch(model.dimension(), w.size());
  const std::size_t n = model.triplets.size();
  std::vector<S> vals(n);
  Evaluation<S> out;
  std::optional<std::size_t> stored;
  for (std::size_t j = 0; j < n; ++j) {
    vals[j] = detail::affine(model.triplets[j], w);
    if (j == 0 || vals[j] > out.value) out.value = vals[j];
    if (!stored && model.triplets[j].point == w) stored = j;
  }
  if (stored) out.value = model.triplets[*stored].value;
  for (std::size_t j = 0; j < n; ++j) {
    if (detail::close(vals[j], out.value)) out.active.push_back(j);
  }
  return out;
}

/// The unique gradient when all active pieces agree, otherwise nothing.
template <class S>
std::optional<std::vector<S>> gradient_at(const Model<S>& model, const std::vector<S>& w) {
  const auto ev = evaluate(model, w);
  const auto& first = model.triplets[ev.active.front()].gradient;
  for (std::size_t j : ev.active) {
    if (!detail::same_vector(model.triplets[j].gradient, first)) return std::nullopt;
  }
  return first;
}

/// Rounds every entry of an exact model to double (diff set and report kept).
Model<double> to_double(const Model<Rational>& model);

/// Largest |f(w1) - f(w2)| / |w1 - w2| over random pairs in the unit ball.
double lipschitz_probe(const Model<double>& model, int pairs, std::uint64_t seed);

/// Slope of the extension far out along the steepest stored gradient; tends to
/// max_j |g_j|.
double directional_probe(const Model<double>& model, double reach = 1e6);

/// Central finite-difference gradient of the extension at w.
Vec finite_difference_gradient(const Model<double>& model, const Vec& w, double step = 1e-7);

// JSON: an array of {"value", "gradient", "point"} objects; models add
// lipschitz, diff_set and the slack report.
std::string triplets_to_json(const std::vector<Triplet<double>>& triplets);
std::vector<Triplet<double>> triplets_from_json(const std::string& text);
std::string model_to_json(const Model<double>& model);
std::string model_to_json(const Model<Rational>& model);

}  // namespace gdgap::interp
