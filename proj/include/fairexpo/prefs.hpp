#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fairexpo/calllog.hpp"

namespace fairexpo {

// One (source, topic) dimension of a preference vector.
struct PrefKey {
  Source source = Source::kUser;
  std::string topic;
  auto operator<=>(const PrefKey&) const = default;
};

struct PrefEntry {
  double score = 0.0;  // in [-1, 1]; 0 when heard is false
  bool heard = false;
  bool operator==(const PrefEntry&) const = default;
};

// Signed per-user preferences over (source, topic) pairs, with an indicator
// distinguishing "heard but indifferent" from "never heard".
struct PreferenceVector {
  std::map<PrefKey, PrefEntry> entries;
  bool operator==(const PreferenceVector&) const = default;
};

// (n_positive - n_negative) / n_heard; n_heard must be positive.
double preference_score(int n_positive, int n_negative, int n_heard);

// Builds one user's vector over the given index; pairs without events get
// score 0 with heard false. An empty index derives the index from the
// events themselves.
PreferenceVector build_preference_vector(const std::vector<ListenEvent>& events,
                                         const std::vector<Interaction>& labels,
                                         const std::set<PrefKey>& index);

struct UserStats {
  int call_count = 0;
  long long keys_pressed = 0;
  double total_call_seconds = 0.0;
  PreferenceVector prefs;
};

struct FilterThresholds {
  int min_calls = 8;                         // keep callers with count >= this
  double min_keys_per_second = 1.0 / 240.0;  // about one key every four minutes
  double divergence_keep_fraction = 0.60;
};

// Three-stage cascade: call count, key rate, then the top fraction by KL
// divergence from the global vector. Raises with the stage name when a
// stage empties the survivor set.
std::vector<std::string> filter_engaged_users(const std::map<std::string, UserStats>& users,
                                              const FilterThresholds& thresholds,
                                              const PreferenceVector& global_vector);

// Both vectors are smoothed into probability distributions first: scores
// shifted from [-1,1] to [0,2], an epsilon of 1e-6 added elementwise, then
// normalized to sum 1.
double kl_divergence(const PreferenceVector& p, const PreferenceVector& q);

// Aggregation helpers shared by the pipeline: per-user stats and the global
// vector, built from session-labeled events over a common index.
std::set<PrefKey> preference_index(const std::vector<ListenEvent>& events);
std::map<std::string, UserStats> build_user_stats(const std::vector<Session>& sessions,
                                                  double heard_threshold,
                                                  const std::set<PrefKey>& index);
PreferenceVector global_preference_vector(const std::vector<Session>& sessions,
                                          double heard_threshold,
                                          const std::set<PrefKey>& index);

}  // namespace fairexpo
