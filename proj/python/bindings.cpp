// Python bindings for the core operations: preference math, clustering,
// fairness planning, constrained ranking, and the evaluation metrics.
// Containers cross the boundary as plain dicts/lists so callers need no
// wrapper classes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairexpo/clustering.hpp"
#include "fairexpo/exposure.hpp"
#include "fairexpo/metrics.hpp"
#include "fairexpo/prefs.hpp"
#include "fairexpo/ranker.hpp"
#include "fairexpo/recommend.hpp"

namespace py = pybind11;
using namespace fairexpo;

namespace {

// A preference vector crosses as {(source, topic): (score, heard)}.
using PyPrefs = std::map<std::pair<std::string, std::string>, std::pair<double, bool>>;

PreferenceVector prefs_from_py(const PyPrefs& mapping) {
  PreferenceVector vector;
  for (const auto& [key, value] : mapping) {
    Source source;
    if (!try_parse_source(key.first, &source))
      throw std::invalid_argument("unknown source '" + key.first + "'");
    vector.entries[PrefKey{source, key.second}] = PrefEntry{value.first, value.second};
  }
  return vector;
}

PyPrefs prefs_to_py(const PreferenceVector& vector) {
  PyPrefs mapping;
  for (const auto& [key, entry] : vector.entries)
    mapping[{to_string(key.source), key.topic}] = {entry.score, entry.heard};
  return mapping;
}

AspectRule parse_aspect_rule(const std::string& name) {
  if (name == "user_pref") return AspectRule::kUserPreference;
  if (name == "min_guarantee") return AspectRule::kMinGuarantee;
  if (name == "equal") return AspectRule::kEqualExposure;
  throw std::invalid_argument("unknown aspect rule '" + name +
                              "' (expected user_pref, min_guarantee, or equal)");
}

ItemRule parse_item_rule(const std::string& name) {
  if (name == "equal") return ItemRule::kEqualWithinAspect;
  if (name == "rating") return ItemRule::kProportionalToRating;
  throw std::invalid_argument("unknown item rule '" + name + "' (expected equal or rating)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exposure-fair ranking core";

  m.def("preference_score", &preference_score, py::arg("n_positive"), py::arg("n_negative"),
        py::arg("n_heard"),
        "Signed engagement score (n_positive - n_negative) / n_heard.");

  m.def(
      "kl_divergence",
      [](const PyPrefs& p, const PyPrefs& q) {
        return kl_divergence(prefs_from_py(p), prefs_from_py(q));
      },
      py::arg("p"), py::arg("q"),
      "KL divergence between two preference vectors given as\n"
      "{(source, topic): (score, heard)} dicts.");

  m.def(
      "default_gamma",
      [](const std::vector<PyPrefs>& vectors) {
        std::vector<PreferenceVector> converted;
        converted.reserve(vectors.size());
        for (const PyPrefs& v : vectors) converted.push_back(prefs_from_py(v));
        return default_gamma(converted);
      },
      py::arg("vectors"), "Default numeric/categorical balance for k_prototypes.");

  m.def(
      "k_prototypes",
      [](const std::vector<PyPrefs>& vectors, int k, std::optional<double> gamma,
         std::uint64_t seed) {
        std::vector<PreferenceVector> converted;
        converted.reserve(vectors.size());
        for (const PyPrefs& v : vectors) converted.push_back(prefs_from_py(v));
        const double g = gamma ? *gamma : default_gamma(converted);
        const ClusterAssignment result = k_prototypes(converted, k, g, seed);
        py::dict out;
        out["assignment"] = result.assignment;
        std::vector<PyPrefs> centroids;
        for (const PreferenceVector& c : result.centroids) centroids.push_back(prefs_to_py(c));
        out["centroids"] = centroids;
        out["cost"] = result.cost;
        out["iterations"] = result.iterations;
        out["gamma"] = g;
        return out;
      },
      py::arg("vectors"), py::arg("k"), py::arg("gamma") = std::nullopt, py::arg("seed") = 0,
      "Cluster preference vectors; returns assignment, centroids, cost, iterations.");

  m.def(
      "aspect_shares",
      [](const std::string& rule, const std::map<std::string, double>& beta,
         double min_share) {
        FairnessPolicy policy;
        policy.aspect_rule = parse_aspect_rule(rule);
        policy.min_share = min_share;
        return aspect_shares(policy, beta);
      },
      py::arg("rule"), py::arg("beta"), py::arg("min_share") = 0.05,
      "Aspect exposure shares under a fairness rule applied to beta.");

  m.def(
      "item_targets",
      [](const std::map<std::string, double>& shares,
         const std::map<std::string, std::vector<std::string>>& items_by_aspect,
         const std::string& item_rule, double inventory,
         const std::map<std::string, int>& ratings) {
        RecommendedPool pool;
        for (const auto& [aspect, items] : items_by_aspect) {
          pool.items_by_aspect[aspect].insert(items.begin(), items.end());
          for (const std::string& item : items) pool.scores.emplace(item, 0.0);
        }
        const ExposurePlan plan =
            item_targets(shares, pool, parse_item_rule(item_rule), inventory, ratings);
        return plan.targets;
      },
      py::arg("shares"), py::arg("items_by_aspect"), py::arg("item_rule"),
      py::arg("inventory"), py::arg("ratings") = std::map<std::string, int>{},
      "Per-item exposure budgets from aspect shares and an inventory.");

  m.def(
      "total_inventory",
      [](const std::vector<double>& users_per_hour, const std::vector<double>& rank_reach_prob,
         int horizon_hours, int list_length, int regen_interval_hours) {
        if (users_per_hour.size() != 24)
          throw std::invalid_argument("users_per_hour must have 24 entries");
        TrafficProfile traffic;
        for (int h = 0; h < 24; ++h) traffic.users_per_hour[h] = users_per_hour[h];
        traffic.rank_reach_prob = rank_reach_prob;
        SlotSchedule schedule;
        schedule.horizon_hours = horizon_hours;
        schedule.list_length = list_length;
        schedule.regen_interval_hours = regen_interval_hours;
        return total_inventory(traffic, schedule);
      },
      py::arg("users_per_hour"), py::arg("rank_reach_prob"), py::arg("horizon_hours"),
      py::arg("list_length"), py::arg("regen_interval_hours") = 1,
      "Expected listens over the schedule from an hourly traffic profile.");

  m.def(
      "rank_list",
      [](const std::vector<std::tuple<std::string, std::vector<std::string>, double, double>>&
             pool,
         const std::map<std::string, double>& shares, int n) {
        std::vector<PoolEntry> entries;
        entries.reserve(pool.size());
        for (const auto& [id, aspects, utility, target] : pool)
          entries.push_back(PoolEntry{id, aspects, utility, target});
        sort_by_utility(entries);
        const RankedList list = short_term_diversity(entries, derive_constraints(shares, n));
        py::dict out;
        out["positions"] = list.positions;
        out["utilities"] = list.utilities;
        out["fallback_positions"] = list.fallback_positions;
        return out;
      },
      py::arg("pool"), py::arg("shares"), py::arg("n"),
      "Diversity-constrained ranking of (item, aspects, utility, target)\n"
      "tuples under prefix share bounds.");

  m.def("gini", &gini, py::arg("values"), "Gini coefficient of non-negative values.");

  m.def("lorenz_points", &lorenz_points, py::arg("values"),
        "Cumulative-share curve points from (0,0) to (1,1).");

  m.def(
      "hhi",
      [](const std::vector<std::vector<std::string>>& aspects_per_position) {
        RankedList list;
        std::map<std::string, std::vector<std::string>> aspect_map;
        for (std::size_t i = 0; i < aspects_per_position.size(); ++i) {
          const std::string id = "p" + std::to_string(i);
          list.positions.push_back(id);
          aspect_map[id] = aspects_per_position[i];
        }
        return hhi(list, aspect_map);
      },
      py::arg("aspects_per_position"),
      "Concentration of a list given each position's aspect labels.");

  m.def("normalized_rmse", &normalized_rmse, py::arg("exposure"), py::arg("reference"),
        "RMSE between exposure maps over their key union, divided by the\n"
        "reference mean.");
}
