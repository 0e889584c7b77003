#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairexpo/exposure.hpp"
#include "fairexpo/ranker.hpp"

namespace fairexpo {

enum class ModelVariant {
  kRandomBaseline = 0,
  kManualModeration = 1,
  kUserPreference = 2,
  kPolicy3a = 3,
  kPolicy3b = 4,
  kPolicy3c = 5,
  kPolicy3d = 6,
};

std::string to_string(ModelVariant variant);
bool try_parse_variant(std::string_view text, ModelVariant* out);

// The fairness policy behind each policy variant; min_share applies to the
// MinGuarantee variants.
FairnessPolicy policy_for(ModelVariant variant, double min_share);
bool is_policy_variant(ModelVariant variant);

// A call reduced to what replay needs: who, when, how deep, and (for the
// manual variant) what was actually heard.
struct SimSession {
  std::string caller_id;
  std::int64_t timestamp = 0;
  int depth = 0;
  std::vector<std::string> heard_items;
};

std::vector<SimSession> to_sim_sessions(const std::vector<Session>& sessions);

enum class DepthMode { kReplay, kSample };

struct SimOptions {
  DepthMode depth_mode = DepthMode::kReplay;
  double min_share = 0.05;
  // When positive, the ledger is checkpointed to checkpoint_path every
  // this many slots (policy variants only).
  int checkpoint_interval = 0;
  std::string checkpoint_path;
};

struct ExposureOutcome {
  ModelVariant variant = ModelVariant::kRandomBaseline;
  int cluster = 0;
  std::uint64_t seed = 0;
  std::map<std::string, long long> exposure_by_item;
  std::map<std::string, long long> exposure_by_aspect;
  std::vector<RankedList> lists;
  long long total_listens = 0;
  ExposurePlan plan;  // filled for policy variants
  std::vector<std::string> diagnostics;
};

// Deterministic replay of one variant over one cluster's sessions. Sessions
// map to list generations by the hour of their timestamp, anchored at the
// midnight preceding the earliest session; sessions outside the schedule
// or horizon are skipped with a diagnostic. Items enter lists only once
// created_at is reached.
ExposureOutcome replay(const std::vector<SimSession>& sessions, ModelVariant variant,
                       const RecommendedPool& pool, const std::map<std::string, Item>& catalog,
                       const TrafficProfile& traffic, const SlotSchedule& schedule,
                       const SimOptions& options, std::uint64_t seed);

struct AspectSpec {
  std::string name;
  int catalog_items = 0;  // initial items carrying this aspect
  int liked_items = 0;    // of those, how many the cluster likes
  std::array<double, 5> rating_weights{1, 1, 1, 1, 1};  // for ratings 1..5
  double score_mu = 0.7;      // mean like-probability of liked items
  double score_spread = 0.1;  // uniform half-width around score_mu
};

struct SyntheticWorkloadSpec {
  std::string topic = "topic";
  int num_users = 100;
  std::vector<AspectSpec> aspects;
  double calls_per_user_mean = 10.0;
  std::vector<double> rank_reach_prob{1.0};  // front must be 1.0
  int hours = 100;
  double item_arrival_rate = 0.4;  // items per hour
};

struct SyntheticWorkload {
  std::vector<Item> items;
  std::map<std::string, bool> liked;
  std::map<std::string, double> scores;  // like-probability of liked items
  std::vector<SimSession> sessions;
  TrafficProfile traffic;
};

SyntheticWorkload generate_synthetic(const SyntheticWorkloadSpec& spec, std::uint64_t seed);

// Ground-truth pool over the workload's liked items, for simulator runs
// that bypass the trained classifier.
RecommendedPool pool_from_workload(const SyntheticWorkload& workload, int cluster);

// Per cluster and variant, replay with an independent ledger, the cluster's
// identical session stream, and a sub-seed derived from (master, cluster,
// variant); adding a variant never changes another variant's draws.
std::map<std::pair<int, ModelVariant>, ExposureOutcome> run_comparison(
    const std::map<int, std::vector<SimSession>>& sessions_per_cluster,
    const std::map<int, RecommendedPool>& pools_per_cluster,
    const std::map<std::string, Item>& catalog, const TrafficProfile& traffic,
    const SlotSchedule& schedule, const std::vector<ModelVariant>& variants,
    const SimOptions& options, std::uint64_t master_seed);

std::string serialize_outcome(const ExposureOutcome& outcome,
                              const std::map<std::string, Item>& catalog);
std::string serialize_lists(const ExposureOutcome& outcome,
                            const std::map<std::string, Item>& catalog);
ExposureOutcome parse_outcome(const std::string& text);
std::vector<RankedList> parse_lists(const std::string& text);

}  // namespace fairexpo
