#include "fairexpo/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fairexpo/rng.hpp"
#include "fairexpo/textio.hpp"

namespace fairexpo {

std::vector<double> FeatureVector::flatten() const {
  std::vector<double> flat;
  flat.reserve(aspect_indicators.size() + 2);
  for (std::uint8_t indicator : aspect_indicators)
    flat.push_back(static_cast<double>(indicator));
  flat.push_back(static_cast<double>(rating));
  flat.push_back(shared_context);
  return flat;
}

Prediction Model::predict_item(const std::string&, const FeatureVector& feature) const {
  return predict(feature);
}

bool Model::covers_item(const std::string&) const { return true; }

namespace {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double p_positive = 0.0;
};

using Tree = std::vector<TreeNode>;

struct Dataset {
  std::vector<std::vector<double>> rows;
  std::vector<bool> labels;
};

double leaf_probability(const Dataset& data, const std::vector<int>& indices) {
  int positive = 0;
  for (int i : indices) positive += data.labels[i] ? 1 : 0;
  return static_cast<double>(positive) / static_cast<double>(indices.size());
}

// Gini impurity of a two-class sample given counts.
double impurity(int positive, int total) {
  if (total == 0) return 0.0;
  double p = static_cast<double>(positive) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

int grow_tree(Tree& tree, const Dataset& data, std::vector<int> indices, int depth,
              int max_depth, int features_per_node, SplitRng& rng) {
  const int node_index = static_cast<int>(tree.size());
  tree.emplace_back();
  tree[node_index].p_positive = leaf_probability(data, indices);

  int positive = 0;
  for (int i : indices) positive += data.labels[i] ? 1 : 0;
  if (depth >= max_depth || indices.size() < 2 || positive == 0 ||
      positive == static_cast<int>(indices.size()))
    return node_index;

  const int dims = static_cast<int>(data.rows[0].size());
  std::vector<int> candidates(dims);
  for (int d = 0; d < dims; ++d) candidates[d] = d;
  for (int i = 0; i < features_per_node && i < dims; ++i) {
    int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(dims - i)));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(std::min(features_per_node, dims));
  std::sort(candidates.begin(), candidates.end());

  const double parent_impurity = impurity(positive, static_cast<int>(indices.size()));
  double best_gain = 1e-12;
  int best_feature = -1;
  double best_threshold = 0.0;

  std::vector<std::pair<double, bool>> column(indices.size());
  for (int feature : candidates) {
    for (std::size_t i = 0; i < indices.size(); ++i)
      column[i] = {data.rows[indices[i]][feature], data.labels[indices[i]]};
    std::sort(column.begin(), column.end());
    int left_positive = 0, left_total = 0;
    const int total = static_cast<int>(column.size());
    for (int i = 0; i + 1 < total; ++i) {
      left_positive += column[i].second ? 1 : 0;
      ++left_total;
      if (column[i].first == column[i + 1].first) continue;
      const double threshold = 0.5 * (column[i].first + column[i + 1].first);
      const double left_weight = static_cast<double>(left_total) / total;
      const double gain = parent_impurity -
                          left_weight * impurity(left_positive, left_total) -
                          (1.0 - left_weight) * impurity(positive - left_positive,
                                                         total - left_total);
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = feature;
        best_threshold = threshold;
      }
    }
  }
  if (best_feature < 0) return node_index;

  std::vector<int> left_indices, right_indices;
  for (int i : indices)
    (data.rows[i][best_feature] <= best_threshold ? left_indices : right_indices).push_back(i);
  indices.clear();
  indices.shrink_to_fit();

  tree[node_index].feature = best_feature;
  tree[node_index].threshold = best_threshold;
  tree[node_index].left = grow_tree(tree, data, std::move(left_indices), depth + 1, max_depth,
                                    features_per_node, rng);
  tree[node_index].right = grow_tree(tree, data, std::move(right_indices), depth + 1, max_depth,
                                     features_per_node, rng);
  return node_index;
}

double tree_probability(const Tree& tree, const std::vector<double>& row) {
  int node = 0;
  while (tree[node].feature >= 0)
    node = row[tree[node].feature] <= tree[node].threshold ? tree[node].left : tree[node].right;
  return tree[node].p_positive;
}

}  // namespace

class TreeEnsembleModel : public Model {
 public:
  TreeEnsembleModel(std::vector<Tree> trees, std::size_t feature_count,
                    EnsembleConfig config, std::uint64_t seed)
      : trees_(std::move(trees)), feature_count_(feature_count), config_(config), seed_(seed) {}

  Prediction predict(const FeatureVector& feature) const override {
    std::vector<double> row = feature.flatten();
    if (row.size() != feature_count_)
      throw std::runtime_error("predict: feature dimension mismatch (got " +
                               std::to_string(row.size()) + ", trained on " +
                               std::to_string(feature_count_) + ")");
    double sum = 0.0;
    for (const Tree& tree : trees_) sum += tree_probability(tree, row);
    Prediction prediction;
    prediction.probability = sum / static_cast<double>(trees_.size());
    prediction.label = prediction.probability >= 0.5;
    return prediction;
  }

  std::string serialize() const override {
    std::string out = "type ensemble\n";
    out += "feature_count " + std::to_string(feature_count_) + '\n';
    out += "num_trees " + std::to_string(config_.num_trees) + '\n';
    out += "max_depth " + std::to_string(config_.max_depth) + '\n';
    out += "validation_fraction " + format_double(config_.validation_fraction) + '\n';
    out += "seed " + std::to_string(seed_) + '\n';
    for (const Tree& tree : trees_) {
      out += "tree " + std::to_string(tree.size()) + '\n';
      for (const TreeNode& node : tree) {
        if (node.feature < 0)
          out += "leaf " + format_double(node.p_positive) + '\n';
        else
          out += "split " + std::to_string(node.feature) + ' ' + format_double(node.threshold) +
                 ' ' + std::to_string(node.left) + ' ' + std::to_string(node.right) + '\n';
      }
    }
    return out;
  }

 private:
  std::vector<Tree> trees_;
  std::size_t feature_count_;
  EnsembleConfig config_;
  std::uint64_t seed_;
};

TrainResult train(const std::vector<FeatureVector>& features, const std::vector<bool>& labels,
                  const EnsembleConfig& config, std::uint64_t seed) {
  if (features.size() != labels.size())
    throw std::runtime_error("train: features and labels differ in length");
  if (features.empty()) throw std::runtime_error("train: empty training set");
  if (config.num_trees < 1 || config.max_depth < 1)
    throw std::runtime_error("train: invalid ensemble configuration");
  if (config.validation_fraction < 0 || config.validation_fraction >= 1)
    throw std::runtime_error("train: validation_fraction must be in [0, 1)");

  Dataset all;
  all.rows.reserve(features.size());
  for (const FeatureVector& f : features) {
    all.rows.push_back(f.flatten());
    if (all.rows.back().size() != all.rows[0].size())
      throw std::runtime_error("train: inconsistent feature dimensions");
  }
  all.labels = labels;

  // Canonical order plus a seeded shuffle makes training independent of the
  // caller's example order.
  std::vector<int> order(all.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (all.rows[a] != all.rows[b]) return all.rows[a] < all.rows[b];
    return all.labels[a] < all.labels[b];
  });
  SplitRng shuffle_rng = SplitRng(seed).split(1);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    std::size_t j = i + shuffle_rng.next_below(order.size() - i);
    std::swap(order[i], order[j]);
  }

  std::vector<int> positives, negatives;
  for (int i : order) (all.labels[i] ? positives : negatives).push_back(i);
  if (positives.empty() || negatives.empty())
    throw std::runtime_error("train: training data has a single class");

  // Seeded stratified split; every class keeps at least one training example.
  auto validation_count = [&](std::size_t class_size) {
    auto count = static_cast<std::size_t>(config.validation_fraction *
                                          static_cast<double>(class_size));
    return std::min(count, class_size - 1);
  };
  const std::size_t val_pos = validation_count(positives.size());
  const std::size_t val_neg = validation_count(negatives.size());
  std::vector<int> validation(positives.end() - static_cast<long>(val_pos), positives.end());
  validation.insert(validation.end(), negatives.end() - static_cast<long>(val_neg),
                    negatives.end());
  positives.resize(positives.size() - val_pos);
  negatives.resize(negatives.size() - val_neg);

  // Minority oversampling with replacement to class parity.
  SplitRng balance_rng = SplitRng(seed).split(2);
  std::vector<int>& minority = positives.size() < negatives.size() ? positives : negatives;
  const std::size_t majority_size = std::max(positives.size(), negatives.size());
  const std::size_t minority_size = minority.size();
  while (minority.size() < majority_size)
    minority.push_back(minority[balance_rng.next_below(minority_size)]);

  std::vector<int> training = positives;
  training.insert(training.end(), negatives.begin(), negatives.end());

  const int dims = static_cast<int>(all.rows[0].size());
  const int features_per_node =
      static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dims))));

  std::vector<Tree> trees;
  trees.reserve(config.num_trees);
  SplitRng forest_rng = SplitRng(seed).split(3);
  for (int t = 0; t < config.num_trees; ++t) {
    SplitRng tree_rng = forest_rng.split(static_cast<std::uint64_t>(t));
    std::vector<int> bootstrap(training.size());
    for (std::size_t i = 0; i < training.size(); ++i)
      bootstrap[i] = training[tree_rng.next_below(training.size())];
    Tree tree;
    grow_tree(tree, all, std::move(bootstrap), 0, config.max_depth, features_per_node, tree_rng);
    trees.push_back(std::move(tree));
  }

  TrainResult result;
  result.model = std::make_unique<TreeEnsembleModel>(std::move(trees), all.rows[0].size(),
                                                     config, seed);
  result.n_train = static_cast<int>(training.size());
  result.n_validation = static_cast<int>(validation.size());
  if (!validation.empty()) {
    int correct = 0;
    for (int i : validation)
      if (result.model->predict(features[i]).label == labels[i]) ++correct;
    result.validation_accuracy =
        static_cast<double>(correct) / static_cast<double>(validation.size());
  }
  return result;
}

Prediction OracleModel::predict(const FeatureVector&) const {
  throw std::runtime_error("OracleModel answers by item id; use predict_item");
}

Prediction OracleModel::predict_item(const std::string& item_id, const FeatureVector&) const {
  auto it = by_item_.find(item_id);
  if (it == by_item_.end())
    throw std::runtime_error("OracleModel: no stored label for item '" + item_id + "'");
  return it->second;
}

bool OracleModel::covers_item(const std::string& item_id) const {
  return by_item_.count(item_id) > 0;
}

std::string OracleModel::serialize() const {
  std::string out = "type oracle\n";
  for (const auto& [item, prediction] : by_item_)
    out += "item " + item + ' ' + format_double(prediction.probability) + ' ' +
           (prediction.label ? '1' : '0') + '\n';
  return out;
}

std::unique_ptr<Model> load_model(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  if (!(in >> word) || word != "type")
    throw std::runtime_error("model file: missing type header");
  std::string type;
  in >> type;
  if (type == "oracle") {
    std::map<std::string, Prediction> by_item;
    std::string item;
    while (in >> word) {
      if (word != "item") throw std::runtime_error("model file: expected item record");
      double probability;
      int label;
      if (!(in >> item >> probability >> label))
        throw std::runtime_error("model file: truncated item record");
      by_item[item] = {probability, label != 0};
    }
    return std::make_unique<OracleModel>(std::move(by_item));
  }
  if (type != "ensemble") throw std::runtime_error("model file: unknown type '" + type + "'");

  std::size_t feature_count = 0;
  EnsembleConfig config;
  std::uint64_t seed = 0;
  std::vector<Tree> trees;
  while (in >> word) {
    if (word == "feature_count") in >> feature_count;
    else if (word == "num_trees") in >> config.num_trees;
    else if (word == "max_depth") in >> config.max_depth;
    else if (word == "validation_fraction") in >> config.validation_fraction;
    else if (word == "seed") in >> seed;
    else if (word == "tree") {
      std::size_t node_count = 0;
      in >> node_count;
      Tree tree;
      tree.reserve(node_count);
      for (std::size_t i = 0; i < node_count; ++i) {
        std::string kind;
        if (!(in >> kind)) throw std::runtime_error("model file: truncated tree");
        TreeNode node;
        if (kind == "leaf") {
          in >> node.p_positive;
        } else if (kind == "split") {
          in >> node.feature >> node.threshold >> node.left >> node.right;
        } else {
          throw std::runtime_error("model file: unknown node kind '" + kind + "'");
        }
        tree.push_back(node);
      }
      trees.push_back(std::move(tree));
    } else {
      throw std::runtime_error("model file: unknown record '" + word + "'");
    }
  }
  if (trees.empty()) throw std::runtime_error("model file: ensemble has no trees");
  return std::make_unique<TreeEnsembleModel>(std::move(trees), feature_count, config, seed);
}

}  // namespace fairexpo
