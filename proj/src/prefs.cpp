#include "fairexpo/prefs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairexpo {

double preference_score(int n_positive, int n_negative, int n_heard) {
  if (n_heard <= 0) throw std::runtime_error("preference_score: n_heard must be > 0");
  if (n_positive < 0 || n_negative < 0 || n_positive + n_negative > n_heard)
    throw std::runtime_error("preference_score: counts are inconsistent");
  return static_cast<double>(n_positive - n_negative) / static_cast<double>(n_heard);
}

PreferenceVector build_preference_vector(const std::vector<ListenEvent>& events,
                                         const std::vector<Interaction>& labels,
                                         const std::set<PrefKey>& index) {
  if (events.size() != labels.size())
    throw std::runtime_error("build_preference_vector: events and labels differ in length");

  struct Counts {
    int positive = 0, negative = 0, heard = 0;
  };
  std::map<PrefKey, Counts> counts;
  for (std::size_t i = 0; i < events.size(); ++i) {
    Counts& c = counts[{events[i].source, events[i].topic}];
    ++c.heard;
    if (labels[i] == Interaction::kPositive) ++c.positive;
    else if (labels[i] == Interaction::kNegative) ++c.negative;
  }

  PreferenceVector vector;
  if (index.empty()) {
    for (const auto& [key, c] : counts)
      vector.entries[key] = {preference_score(c.positive, c.negative, c.heard), true};
  } else {
    for (const PrefKey& key : index) {
      auto it = counts.find(key);
      if (it == counts.end())
        vector.entries[key] = {0.0, false};
      else
        vector.entries[key] = {
            preference_score(it->second.positive, it->second.negative, it->second.heard), true};
    }
  }
  return vector;
}

namespace {

std::vector<double> smoothed_distribution(const PreferenceVector& v) {
  constexpr double kEpsilon = 1e-6;
  std::vector<double> dist;
  dist.reserve(v.entries.size());
  double total = 0.0;
  for (const auto& [key, entry] : v.entries) {
    double mass = (entry.score + 1.0) + kEpsilon;
    dist.push_back(mass);
    total += mass;
  }
  for (double& d : dist) d /= total;
  return dist;
}

}  // namespace

double kl_divergence(const PreferenceVector& p, const PreferenceVector& q) {
  if (p.entries.size() != q.entries.size() ||
      !std::equal(p.entries.begin(), p.entries.end(), q.entries.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; }))
    throw std::runtime_error("kl_divergence: vectors must share one index set");
  std::vector<double> pd = smoothed_distribution(p);
  std::vector<double> qd = smoothed_distribution(q);
  double divergence = 0.0;
  for (std::size_t i = 0; i < pd.size(); ++i)
    divergence += pd[i] * std::log(pd[i] / qd[i]);
  return std::max(divergence, 0.0);
}

std::vector<std::string> filter_engaged_users(const std::map<std::string, UserStats>& users,
                                              const FilterThresholds& thresholds,
                                              const PreferenceVector& global_vector) {
  std::vector<std::string> survivors;
  for (const auto& [user, stats] : users)
    if (stats.call_count >= thresholds.min_calls) survivors.push_back(user);
  if (survivors.empty())
    throw std::runtime_error("user filter: call-count stage left no users");

  std::vector<std::string> keyed;
  for (const std::string& user : survivors) {
    const UserStats& stats = users.at(user);
    if (stats.total_call_seconds > 0 &&
        static_cast<double>(stats.keys_pressed) / stats.total_call_seconds >=
            thresholds.min_keys_per_second)
      keyed.push_back(user);
  }
  if (keyed.empty())
    throw std::runtime_error("user filter: key-rate stage left no users");

  std::vector<std::pair<double, std::string>> ranked;
  ranked.reserve(keyed.size());
  for (const std::string& user : keyed)
    ranked.emplace_back(kl_divergence(users.at(user).prefs, global_vector), user);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::size_t keep = static_cast<std::size_t>(
      std::llround(thresholds.divergence_keep_fraction * static_cast<double>(ranked.size())));
  keep = std::min(keep, ranked.size());
  if (keep == 0)
    throw std::runtime_error("user filter: divergence stage left no users");

  std::vector<std::string> result;
  result.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) result.push_back(ranked[i].second);
  std::sort(result.begin(), result.end());
  return result;
}

std::set<PrefKey> preference_index(const std::vector<ListenEvent>& events) {
  std::set<PrefKey> index;
  for (const ListenEvent& ev : events) index.insert({ev.source, ev.topic});
  return index;
}

std::map<std::string, UserStats> build_user_stats(const std::vector<Session>& sessions,
                                                  double heard_threshold,
                                                  const std::set<PrefKey>& index) {
  struct Gather {
    std::vector<ListenEvent> events;
    std::vector<Interaction> labels;
    int call_count = 0;
    long long keys_pressed = 0;
    double total_call_seconds = 0.0;
  };
  std::map<std::string, Gather> gathered;
  for (const Session& session : sessions) {
    std::vector<Interaction> labels = label_session(session, heard_threshold);
    Gather& g = gathered[session.caller_id];
    ++g.call_count;
    for (std::size_t i = 0; i < session.events.size(); ++i) {
      const ListenEvent& ev = session.events[i];
      g.events.push_back(ev);
      g.labels.push_back(labels[i]);
      if (ev.key != Key::kNone) ++g.keys_pressed;
      g.total_call_seconds += ev.duration_heard;
    }
  }
  std::map<std::string, UserStats> stats;
  for (auto& [user, g] : gathered) {
    UserStats s;
    s.call_count = g.call_count;
    s.keys_pressed = g.keys_pressed;
    s.total_call_seconds = g.total_call_seconds;
    s.prefs = build_preference_vector(g.events, g.labels, index);
    stats.emplace(user, std::move(s));
  }
  return stats;
}

PreferenceVector global_preference_vector(const std::vector<Session>& sessions,
                                          double heard_threshold,
                                          const std::set<PrefKey>& index) {
  std::vector<ListenEvent> events;
  std::vector<Interaction> labels;
  for (const Session& session : sessions) {
    std::vector<Interaction> session_labels = label_session(session, heard_threshold);
    for (std::size_t i = 0; i < session.events.size(); ++i) {
      events.push_back(session.events[i]);
      labels.push_back(session_labels[i]);
    }
  }
  return build_preference_vector(events, labels, index);
}

}  // namespace fairexpo
