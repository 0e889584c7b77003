#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fairexpo {

// Per-item features: aspect membership indicators over the topic's aspect
// set, the editorial rating, and the contributor/cluster shared context.
struct FeatureVector {
  std::vector<std::uint8_t> aspect_indicators;
  int rating = 1;               // 1..5
  double shared_context = 0.0;  // in [-1, 1]

  std::vector<double> flatten() const;
  bool operator==(const FeatureVector&) const = default;
};

struct Prediction {
  double probability = 0.0;  // in [0, 1]
  bool label = false;        // probability >= 0.5 for trained models
};

class Model {
 public:
  virtual ~Model() = default;
  virtual Prediction predict(const FeatureVector& feature) const = 0;
  // Item-aware entry point; the default ignores the id. Models that can
  // only answer for known items also override covers_item.
  virtual Prediction predict_item(const std::string& item_id,
                                  const FeatureVector& feature) const;
  virtual bool covers_item(const std::string& item_id) const;
  virtual std::string serialize() const = 0;
};

struct EnsembleConfig {
  int num_trees = 50;
  int max_depth = 6;
  double validation_fraction = 0.2;
};

struct TrainResult {
  std::unique_ptr<Model> model;
  std::optional<double> validation_accuracy;  // absent when the split is empty
  int n_train = 0;
  int n_validation = 0;
};

// Bagged decision trees: per-tree bootstrap, feature subsampling of
// ceil(sqrt(d)) per node, minority class oversampled with replacement to
// parity before training. The split and all draws are seeded, and training
// is invariant to example order (examples are canonically sorted, then
// shuffled with the seed).
TrainResult train(const std::vector<FeatureVector>& features, const std::vector<bool>& labels,
                  const EnsembleConfig& config, std::uint64_t seed);

// Answers from stored per-item labels; predict by feature alone is an
// error, and unknown items are not covered.
class OracleModel : public Model {
 public:
  explicit OracleModel(std::map<std::string, Prediction> by_item)
      : by_item_(std::move(by_item)) {}
  Prediction predict(const FeatureVector& feature) const override;
  Prediction predict_item(const std::string& item_id,
                          const FeatureVector& feature) const override;
  bool covers_item(const std::string& item_id) const override;
  std::string serialize() const override;

 private:
  std::map<std::string, Prediction> by_item_;
};

// Inverse of Model::serialize for both shipped implementations.
std::unique_ptr<Model> load_model(const std::string& text);

}  // namespace fairexpo
