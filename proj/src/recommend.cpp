#include "fairexpo/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairexpo/textio.hpp"

namespace fairexpo {

std::string serialize_items(const std::vector<Item>& items) {
  std::string out = "item_id,topic,aspects,rating,contributor_id,created_at\n";
  for (const Item& item : items) {
    out += item.item_id + ',' + item.topic + ',' + join(item.aspects, '|') + ',' +
           std::to_string(item.rating) + ',' + item.contributor_id + ',' +
           format_timestamp(item.created_at) + '\n';
  }
  return out;
}

std::vector<Item> parse_items(const std::string& text) {
  std::vector<Item> items;
  bool header = true;
  std::size_t row = 0;
  for (std::string_view line_view : split(text, '\n')) {
    ++row;
    std::string_view line = trim(line_view);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 6)
      throw std::runtime_error("items file row " + std::to_string(row) + ": expected 6 columns");
    Item item;
    item.item_id = trim(cells[0]);
    item.topic = trim(cells[1]);
    for (const std::string& aspect : split(cells[2], '|'))
      if (!trim(aspect).empty()) item.aspects.emplace_back(trim(aspect));
    if (item.item_id.empty())
      throw std::runtime_error("items file row " + std::to_string(row) + ": empty item_id");
    if (item.aspects.empty())
      throw std::runtime_error("items file row " + std::to_string(row) +
                               ": item needs at least one aspect");
    long long rating = parse_int(trim(cells[3]));
    if (rating < 1 || rating > 5)
      throw std::runtime_error("items file row " + std::to_string(row) + ": rating outside 1..5");
    item.rating = static_cast<int>(rating);
    item.contributor_id = trim(cells[4]);
    item.created_at = parse_timestamp(cells[5]);
    items.push_back(std::move(item));
  }
  return items;
}

double shared_context(const PreferenceVector& contributor, const PreferenceVector& centroid) {
  if (contributor.entries.size() != centroid.entries.size())
    throw std::runtime_error("shared_context: vectors must share one index set");
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  auto ita = contributor.entries.begin();
  auto itb = centroid.entries.begin();
  for (; ita != contributor.entries.end(); ++ita, ++itb) {
    if (ita->first != itb->first)
      throw std::runtime_error("shared_context: vectors must share one index set");
    const double a_score = ita->second.score, b_score = itb->second.score;
    const double a_heard = ita->second.heard ? 1.0 : 0.0;
    const double b_heard = itb->second.heard ? 1.0 : 0.0;
    dot += a_score * b_score + a_heard * b_heard;
    norm_a += a_score * a_score + a_heard * a_heard;
    norm_b += b_score * b_score + b_heard * b_heard;
  }
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  double cosine = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
  return std::clamp(cosine, -1.0, 1.0);
}

std::optional<ItemClusterLabel> label_item_for_cluster(
    const std::vector<std::pair<std::string, Interaction>>& user_interactions) {
  // Collapse each user's events to one stance: positive beats negative,
  // negative beats neutral.
  std::map<std::string, Interaction> stance;
  for (const auto& [user, label] : user_interactions) {
    auto [it, inserted] = stance.emplace(user, label);
    if (inserted) continue;
    if (label == Interaction::kPositive)
      it->second = Interaction::kPositive;
    else if (label == Interaction::kNegative && it->second == Interaction::kNeutral)
      it->second = Interaction::kNegative;
  }
  if (stance.empty()) return std::nullopt;
  int positive = 0, negative = 0;
  for (const auto& [user, label] : stance) {
    if (label == Interaction::kPositive) ++positive;
    else if (label == Interaction::kNegative) ++negative;
  }
  ItemClusterLabel result;
  result.score = static_cast<double>(positive - negative) / static_cast<double>(stance.size());
  result.label = result.score > 0.0;
  return result;
}

FeatureVector build_feature_vector(const Item& item,
                                   const std::vector<std::string>& topic_aspects,
                                   double shared_ctx) {
  FeatureVector feature;
  feature.aspect_indicators.assign(topic_aspects.size(), 0);
  for (const std::string& aspect : item.aspects) {
    auto it = std::lower_bound(topic_aspects.begin(), topic_aspects.end(), aspect);
    if (it == topic_aspects.end() || *it != aspect)
      throw std::runtime_error("build_feature_vector: aspect '" + aspect +
                               "' not in the topic aspect set");
    feature.aspect_indicators[it - topic_aspects.begin()] = 1;
  }
  feature.rating = item.rating;
  feature.shared_context = shared_ctx;
  return feature;
}

std::set<std::string> RecommendedPool::all_items() const {
  std::set<std::string> items;
  for (const auto& [aspect, pool] : items_by_aspect)
    items.insert(pool.begin(), pool.end());
  return items;
}

RecommendedPool recommended_pool(
    const Model& model, const std::vector<Item>& items, int cluster,
    const PreferenceVector& centroid,
    const std::map<std::string, PreferenceVector>& contributor_vectors) {
  if (items.empty()) throw std::runtime_error("recommended_pool: no items");
  RecommendedPool pool;
  pool.topic = items[0].topic;
  pool.cluster = cluster;

  std::vector<std::string> topic_aspects;
  for (const Item& item : items) {
    if (item.topic != pool.topic)
      throw std::runtime_error("recommended_pool: items span multiple topics");
    for (const std::string& aspect : item.aspects) topic_aspects.push_back(aspect);
  }
  std::sort(topic_aspects.begin(), topic_aspects.end());
  topic_aspects.erase(std::unique(topic_aspects.begin(), topic_aspects.end()),
                      topic_aspects.end());

  PreferenceVector zero_vector;
  for (const auto& [key, entry] : centroid.entries) zero_vector.entries[key] = {0.0, false};

  for (const Item& item : items) {
    if (!model.covers_item(item.item_id)) continue;
    auto contributor = contributor_vectors.find(item.contributor_id);
    const double ctx = shared_context(
        contributor == contributor_vectors.end() ? zero_vector : contributor->second, centroid);
    FeatureVector feature = build_feature_vector(item, topic_aspects, ctx);
    Prediction prediction = model.predict_item(item.item_id, feature);
    if (!prediction.label) continue;
    pool.scores[item.item_id] = prediction.probability;
    for (const std::string& aspect : item.aspects)
      pool.items_by_aspect[aspect].insert(item.item_id);
  }
  if (pool.scores.empty())
    throw std::runtime_error("recommended_pool: every item was predicted negative");

  double total = 0.0;
  for (const auto& [aspect, members] : pool.items_by_aspect)
    total += static_cast<double>(members.size());
  for (const auto& [aspect, members] : pool.items_by_aspect)
    pool.beta[aspect] = static_cast<double>(members.size()) / total;
  return pool;
}

std::string serialize_pool(const std::vector<Item>& items,
                           const std::map<std::string, Prediction>& predictions) {
  std::string out = "item_id,aspect,liked,score\n";
  for (const Item& item : items) {
    auto it = predictions.find(item.item_id);
    if (it == predictions.end()) continue;  // not covered by the model
    for (const std::string& aspect : item.aspects)
      out += item.item_id + ',' + aspect + ',' + (it->second.label ? '1' : '0') + ',' +
             format_double(it->second.probability) + '\n';
  }
  return out;
}

RecommendedPool parse_pool(const std::string& text, const std::string& topic, int cluster) {
  RecommendedPool pool;
  pool.topic = topic;
  pool.cluster = cluster;
  bool header = true;
  std::size_t row = 0;
  for (std::string_view line_view : split(text, '\n')) {
    ++row;
    std::string_view line = trim(line_view);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 4)
      throw std::runtime_error("pool file row " + std::to_string(row) + ": expected 4 columns");
    const std::string item = std::string(trim(cells[0]));
    const std::string aspect = std::string(trim(cells[1]));
    const bool liked = trim(cells[2]) == "1";
    const double score = parse_double(trim(cells[3]));
    if (!liked) continue;
    pool.items_by_aspect[aspect].insert(item);
    pool.scores[item] = score;
  }
  double total = 0.0;
  for (const auto& [aspect, members] : pool.items_by_aspect)
    total += static_cast<double>(members.size());
  for (const auto& [aspect, members] : pool.items_by_aspect)
    pool.beta[aspect] = static_cast<double>(members.size()) / total;
  return pool;
}

}  // namespace fairexpo
