#include "gdgap/interpolation.hpp"

#include <random>

#include <json.hpp>

#include "gdgap/hard_instance.hpp"

namespace gdgap::interp {

namespace {

Vec to_double(const RVec& v) {
  Vec out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(gdgap::to_double(x));
  return out;
}

nlohmann::json triplet_array(const std::vector<Triplet<double>>& triplets) {
  auto arr = nlohmann::json::array();
  for (const auto& t : triplets) {
    arr.push_back({{"value", t.value}, {"gradient", t.gradient}, {"point", t.point}});
  }
  return arr;
}

}  // namespace

Model<double> to_double(const Model<Rational>& model) {
  Model<double> out;
  for (const auto& t : model.triplets) {
    out.triplets.push_back({gdgap::to_double(t.value), to_double(t.gradient), to_double(t.point)});
  }
  out.lipschitz = gdgap::to_double(model.lipschitz);
  out.diff_set = model.diff_set;
  out.min_slack = model.min_slack;
  out.worst_i = model.worst_i;
  out.worst_j = model.worst_j;
  return out;
}

double lipschitz_probe(const Model<double>& model, int pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t d = model.dimension();
  double worst = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const Vec a = instance::random_ball_point(d, rng);
    const Vec b = instance::random_ball_point(d, rng);
    double dist2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) dist2 += (a[i] - b[i]) * (a[i] - b[i]);
    if (dist2 == 0.0) continue;
    const double diff = evaluate(model, a).value - evaluate(model, b).value;
    worst = std::max(worst, std::abs(diff) / std::sqrt(dist2));
  }
  return worst;
}

double directional_probe(const Model<double>& model, double reach) {
  std::size_t best = 0;
  double best_norm = -1.0;
  for (std::size_t j = 0; j < model.triplets.size(); ++j) {
    const double n = squared_norm(model.triplets[j].gradient);
    if (n > best_norm) {
      best_norm = n;
      best = j;
    }
  }
  if (best_norm <= 0.0) return 0.0;
  const Vec& g = model.triplets[best].gradient;
  const double norm = std::sqrt(best_norm);
  Vec a(g.size()), b(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    a[i] = reach * g[i] / norm;
    b[i] = 2.0 * reach * g[i] / norm;
  }
  return (evaluate(model, b).value - evaluate(model, a).value) / reach;
}

Vec finite_difference_gradient(const Model<double>& model, const Vec& w, double step) {
  Vec g(w.size());
  Vec probe = w;
  for (std::size_t i = 0; i < w.size(); ++i) {
    probe[i] = w[i] + step;
    const double up = evaluate(model, probe).value;
    probe[i] = w[i] - step;
    const double down = evaluate(model, probe).value;
    probe[i] = w[i];
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

std::string triplets_to_json(const std::vector<Triplet<double>>& triplets) {
  return triplet_array(triplets).dump();
}

std::vector<Triplet<double>> triplets_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  if (!doc.is_array()) throw ConfigError("triplets_from_json: expected an array");
  std::vector<Triplet<double>> out;
  for (const auto& item : doc) {
    out.push_back({item.at("value").get<double>(), item.at("gradient").get<Vec>(),
                   item.at("point").get<Vec>()});
  }
  return out;
}

std::string model_to_json(const Model<double>& model) {
  nlohmann::json doc;
  doc["triplets"] = triplet_array(model.triplets);
  doc["lipschitz"] = model.lipschitz;
  doc["diff_set"] = model.diff_set;
  doc["report"] = {{"min_slack", model.min_slack},
                   {"worst_pair", {model.worst_i, model.worst_j}}};
  return doc.dump();
}

std::string model_to_json(const Model<Rational>& model) {
  nlohmann::json doc;
  auto arr = nlohmann::json::array();
  for (const auto& t : model.triplets) {
    std::vector<std::string> g, p;
    for (const auto& x : t.gradient) g.push_back(to_string(x));
    for (const auto& x : t.point) p.push_back(to_string(x));
    arr.push_back({{"value", to_string(t.value)}, {"gradient", g}, {"point", p}});
  }
  doc["triplets"] = std::move(arr);
  doc["lipschitz"] = to_string(model.lipschitz);
  doc["diff_set"] = model.diff_set;
  doc["exact"] = true;
  doc["report"] = {{"min_slack", model.min_slack},
                   {"worst_pair", {model.worst_i, model.worst_j}}};
  return doc.dump();
}

}  // namespace gdgap::interp
