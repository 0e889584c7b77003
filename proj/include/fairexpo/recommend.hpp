#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fairexpo/forest.hpp"
#include "fairexpo/prefs.hpp"

namespace fairexpo {

struct Item {
  std::string item_id;
  std::string topic;
  std::vector<std::string> aspects;  // at least one
  int rating = 1;                    // 1..5
  std::string contributor_id;
  std::int64_t created_at = 0;

  bool operator==(const Item&) const = default;
};

std::string serialize_items(const std::vector<Item>& items);
std::vector<Item> parse_items(const std::string& text);

// Cosine similarity between a contributor's vector and a cluster centroid,
// with heard indicators concatenated as 0/1 dimensions. A zero-norm side
// yields 0.
double shared_context(const PreferenceVector& contributor, const PreferenceVector& centroid);

struct ItemClusterLabel {
  double score = 0.0;  // in [-1, 1]
  bool label = false;  // score > 0
};

// Per-user interactions by one cluster's members with one item. A user with
// any positive event counts positive; otherwise any negative event counts
// negative; users with only neutral events count in the denominator alone.
// No interacting users means the item is excluded (nullopt).
std::optional<ItemClusterLabel> label_item_for_cluster(
    const std::vector<std::pair<std::string, Interaction>>& user_interactions);

// Feature vector over the topic's sorted aspect list.
FeatureVector build_feature_vector(const Item& item,
                                   const std::vector<std::string>& topic_aspects,
                                   double shared_ctx);

struct RecommendedPool {
  std::string topic;
  int cluster = 0;
  std::map<std::string, std::set<std::string>> items_by_aspect;  // B per aspect
  std::map<std::string, double> beta;                            // normalized over aspects
  std::map<std::string, double> scores;  // liked items -> model probability

  std::set<std::string> all_items() const;
};

// Runs the model over every covered item of one topic and keeps the
// positively predicted ones, per aspect. A multi-aspect item joins every
// pool it belongs to; beta normalizes pool sizes across aspects. Missing
// contributor vectors contribute a zero vector (shared context 0).
RecommendedPool recommended_pool(const Model& model, const std::vector<Item>& items,
                                 int cluster, const PreferenceVector& centroid,
                                 const std::map<std::string, PreferenceVector>& contributor_vectors);

// One row per (item, aspect) pair with the model's verdict; parse_pool
// rebuilds the pool from the liked rows and renormalizes beta.
std::string serialize_pool(const std::vector<Item>& items,
                           const std::map<std::string, Prediction>& predictions);
RecommendedPool parse_pool(const std::string& text, const std::string& topic, int cluster);

}  // namespace fairexpo
