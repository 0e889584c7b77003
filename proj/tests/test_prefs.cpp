#include <cmath>
#include <stdexcept>
#include <tuple>

#include "doctest.h"
#include "fairexpo/prefs.hpp"

using namespace fairexpo;

namespace {

ListenEvent topic_event(const std::string& caller, Source source, const std::string& topic,
                        Key key, double heard = 10) {
  ListenEvent event;
  event.call_id = "c_" + caller;
  event.caller_id = caller;
  event.item_id = "i1";
  event.contributor_id = "k1";
  event.item_duration = 100;
  event.duration_heard = heard;
  event.source = source;
  event.topic = topic;
  event.aspect = "a";
  event.rating = 3;
  event.key = key;
  return event;
}

PreferenceVector vector_of(std::vector<std::tuple<Source, std::string, double, bool>> entries) {
  PreferenceVector v;
  for (const auto& [source, topic, score, heard] : entries)
    v.entries[PrefKey{source, topic}] = PrefEntry{score, heard};
  return v;
}

}  // namespace

TEST_CASE("preference score is the signed engagement fraction") {
  CHECK(preference_score(3, 1, 5) == doctest::Approx(0.4));
  CHECK(preference_score(0, 0, 7) == 0.0);
  CHECK(preference_score(0, 4, 4) == doctest::Approx(-1.0));
  CHECK(preference_score(5, 0, 5) == doctest::Approx(1.0));
  CHECK_THROWS(preference_score(0, 0, 0));
  CHECK_THROWS(preference_score(3, 3, 5));
  CHECK_THROWS(preference_score(-1, 0, 5));
}

TEST_CASE("preference vectors cover the index with heard indicators") {
  std::vector<ListenEvent> events;
  events.push_back(topic_event("u1", Source::kUser, "health", Key::kLike));
  events.push_back(topic_event("u1", Source::kUser, "health", Key::kSkip));
  events.push_back(topic_event("u1", Source::kUser, "health", Key::kLike));
  events.push_back(topic_event("u1", Source::kStudio, "crops", Key::kNone, 5));
  std::vector<Interaction> labels = {Interaction::kPositive, Interaction::kNegative,
                                     Interaction::kPositive, Interaction::kNeutral};

  std::set<PrefKey> index = {{Source::kUser, "health"},
                             {Source::kStudio, "crops"},
                             {Source::kReporter, "prices"}};
  PreferenceVector v = build_preference_vector(events, labels, index);
  REQUIRE(v.entries.size() == 3);
  CHECK(v.entries.at({Source::kUser, "health"}).score == doctest::Approx(1.0 / 3.0));
  CHECK(v.entries.at({Source::kUser, "health"}).heard);
  CHECK(v.entries.at({Source::kStudio, "crops"}).score == 0.0);
  CHECK(v.entries.at({Source::kStudio, "crops"}).heard);
  CHECK(v.entries.at({Source::kReporter, "prices"}).score == 0.0);
  CHECK_FALSE(v.entries.at({Source::kReporter, "prices"}).heard);

  // An empty index derives the dimensions from the events.
  PreferenceVector derived = build_preference_vector(events, labels, {});
  CHECK(derived.entries.size() == 2);
}

TEST_CASE("kl divergence is zero on identical vectors and asymmetric otherwise") {
  PreferenceVector p = vector_of({{Source::kUser, "a", 0.8, true}, {Source::kUser, "b", -0.5, true}});
  PreferenceVector q = vector_of({{Source::kUser, "a", -0.2, true}, {Source::kUser, "b", 0.6, true}});
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(kl_divergence(p, q) > 0.0);
  CHECK(kl_divergence(p, q) != doctest::Approx(kl_divergence(q, p)));

  PreferenceVector mismatched = vector_of({{Source::kUser, "a", 0.8, true}});
  CHECK_THROWS(kl_divergence(p, mismatched));

  // Extreme scores stay finite thanks to smoothing.
  PreferenceVector all_neg = vector_of({{Source::kUser, "a", -1.0, true}, {Source::kUser, "b", -1.0, true}});
  PreferenceVector all_pos = vector_of({{Source::kUser, "a", 1.0, true}, {Source::kUser, "b", 1.0, true}});
  CHECK(std::isfinite(kl_divergence(all_neg, all_pos)));
}

TEST_CASE("user stats count sessions, key presses, and listening seconds") {
  std::vector<ListenEvent> events;
  auto e1 = topic_event("u1", Source::kUser, "health", Key::kLike, 30);
  auto e2 = topic_event("u1", Source::kUser, "health", Key::kNone, 50);
  e2.call_id = "c2";
  e2.timestamp = 4000;
  auto e3 = topic_event("u2", Source::kUser, "health", Key::kSkip, 5);
  events = {e1, e2, e3};

  std::set<PrefKey> index = preference_index(events);
  std::map<std::string, UserStats> stats =
      build_user_stats(assemble_sessions(events), 0.45, index);
  REQUIRE(stats.count("u1"));
  CHECK(stats["u1"].call_count == 2);
  CHECK(stats["u1"].keys_pressed == 1);
  CHECK(stats["u1"].total_call_seconds == doctest::Approx(80.0));
  CHECK(stats["u2"].call_count == 1);
  CHECK(stats["u2"].keys_pressed == 1);
}

TEST_CASE("engagement filter applies the three stages in order") {
  // Users u1..u5: u1 fails the call-count stage, u2 fails the key-rate
  // stage, the rest pass both and are ranked by divergence.
  std::map<std::string, UserStats> users;
  auto fill = [&](const std::string& id, int calls, long long keys, double seconds,
                  double score_t, double score_s) {
    UserStats stats;
    stats.call_count = calls;
    stats.keys_pressed = keys;
    stats.total_call_seconds = seconds;
    stats.prefs = vector_of({{Source::kUser, "t", score_t, true},
                             {Source::kUser, "s", score_s, true}});
    users[id] = stats;
  };
  fill("u1", 7, 100, 100, 0.9, -0.9);   // call count 7 < 8
  fill("u2", 10, 1, 1000, 0.9, -0.9);   // rate 0.001 < 1/240
  fill("u3", 10, 100, 100, 0.9, -0.9);
  fill("u4", 10, 100, 100, -0.9, 0.9);
  fill("u5", 10, 100, 100, 0.1, 0.1);   // matches the global vector

  PreferenceVector global =
      vector_of({{Source::kUser, "t", 0.1, true}, {Source::kUser, "s", 0.1, true}});

  FilterThresholds thresholds;
  thresholds.divergence_keep_fraction = 1.0;
  std::vector<std::string> all = filter_engaged_users(users, thresholds, global);
  CHECK(all == std::vector<std::string>{"u3", "u4", "u5"});

  // Keep two thirds: llround(0.66 * 3) = 2, by divergence from the global
  // vector; u5 has zero divergence and drops first.
  thresholds.divergence_keep_fraction = 0.66;
  std::vector<std::string> top = filter_engaged_users(users, thresholds, global);
  CHECK(top == std::vector<std::string>{"u3", "u4"});

  // Emptying a stage names it.
  FilterThresholds harsh;
  harsh.min_calls = 100;
  CHECK_THROWS_WITH_AS(filter_engaged_users(users, harsh, global),
                       doctest::Contains("call-count stage"), std::runtime_error);
  harsh.min_calls = 8;
  harsh.min_keys_per_second = 1e9;
  CHECK_THROWS_WITH_AS(filter_engaged_users(users, harsh, global),
                       doctest::Contains("key-rate stage"), std::runtime_error);
}

TEST_CASE("global vector pools all events") {
  std::vector<ListenEvent> events;
  events.push_back(topic_event("u1", Source::kUser, "health", Key::kLike));
  events.push_back(topic_event("u2", Source::kUser, "health", Key::kSkip));
  std::set<PrefKey> index = preference_index(events);
  PreferenceVector global =
      global_preference_vector(assemble_sessions(events), 0.45, index);
  REQUIRE(global.entries.count({Source::kUser, "health"}));
  CHECK(global.entries.at({Source::kUser, "health"}).score == doctest::Approx(0.0));
}
