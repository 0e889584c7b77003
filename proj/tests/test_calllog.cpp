#include <sstream>

#include "doctest.h"
#include "fairexpo/calllog.hpp"
#include "fairexpo/textio.hpp"

using namespace fairexpo;

namespace {

ListenEvent make_event(const std::string& call, const std::string& caller,
                       const std::string& item, double heard, Key key,
                       std::int64_t ts) {
  ListenEvent event;
  event.call_id = call;
  event.caller_id = caller;
  event.item_id = item;
  event.contributor_id = "k1";
  event.item_duration = 120;
  event.duration_heard = heard;
  event.source = Source::kUser;
  event.topic = "agriculture";
  event.aspect = "pests";
  event.rating = 4;
  event.key = key;
  event.timestamp = ts;
  return event;
}

}  // namespace

TEST_CASE("events serialize and parse back unchanged") {
  std::vector<ListenEvent> events;
  events.push_back(make_event("c1", "u1", "i1", 30.5, Key::kLike, 1684045800));
  events.push_back(make_event("c1", "u1", "i2", 0, Key::kSkip, 1684045900));
  events.back().rank_position = 3;
  events.back().source = Source::kReporter;
  events.back().aspect = "storage";

  ParseResult parsed = parse_events(serialize_events(events));
  REQUIRE(parsed.rejected.empty());
  CHECK(parsed.events == events);
}

TEST_CASE("column mapping resolves renamed headers") {
  std::istringstream in(
      "CALL,USER,ITEM,AUTHOR,LEN,HEARD,SRC,TOPIC,ASPECT,STARS,KEY,WHEN\n"
      "c1,u1,i1,k1,100,50,User,t,a,5,None,2020-01-01T00:00:00\n");
  ColumnMap columns;
  columns.names = {{"call_id", "CALL"},       {"caller_id", "USER"},
                   {"item_id", "ITEM"},       {"contributor_id", "AUTHOR"},
                   {"item_duration", "LEN"},  {"duration_heard", "HEARD"},
                   {"source", "SRC"},         {"topic", "TOPIC"},
                   {"aspect", "ASPECT"},      {"rating", "STARS"},
                   {"key_pressed", "KEY"},    {"timestamp", "WHEN"}};
  ParseResult parsed = parse_call_logs(in, ',', columns);
  REQUIRE(parsed.rejected.empty());
  REQUIRE(parsed.events.size() == 1);
  CHECK(parsed.events[0].caller_id == "u1");
  CHECK(parsed.events[0].rating == 5);
  CHECK_FALSE(parsed.events[0].rank_position.has_value());
}

TEST_CASE("a missing required column is fatal") {
  std::istringstream in("caller_id,item_id\nu1,i1\n");
  CHECK_THROWS(parse_call_logs(in, ',', ColumnMap{}));
}

TEST_CASE("invalid rows are rejected with diagnostics, not fatally") {
  std::vector<ListenEvent> good;
  good.push_back(make_event("c1", "u1", "i1", 30, Key::kNone, 1000));
  std::string text = serialize_events(good);
  // Row 3: negative duration_heard. Row 4: heard beyond duration. Row 5:
  // rating out of range. Row 6: unknown source. Row 7: bad timestamp.
  // Row 8: wrong column count.
  text += "c2,u2,i2,k1,100,-5,User,t,a,3,None,1970-01-01T00:10:00,\n";
  text += "c3,u3,i3,k1,100,200,User,t,a,3,None,1970-01-01T00:10:00,\n";
  text += "c4,u4,i4,k1,100,10,User,t,a,9,None,1970-01-01T00:10:00,\n";
  text += "c5,u5,i5,k1,100,10,Alien,t,a,3,None,1970-01-01T00:10:00,\n";
  text += "c6,u6,i6,k1,100,10,User,t,a,3,None,whenever,\n";
  text += "c7,u7\n";

  ParseResult parsed = parse_events(text);
  CHECK(parsed.events.size() == 1);
  REQUIRE(parsed.rejected.size() == 6);
  CHECK(parsed.rejected[0].row == 3);
  CHECK(parsed.rejected[0].field == "duration_heard");
  CHECK(parsed.rejected[1].field == "duration_heard");
  CHECK(parsed.rejected[2].field == "rating");
  CHECK(parsed.rejected[3].field == "source");
  CHECK(parsed.rejected[4].field == "timestamp");
  CHECK(parsed.rejected[5].field == "*");
  CHECK(to_string(parsed.rejected[0]).find("row=3") != std::string::npos);
}

TEST_CASE("interaction labeling follows keys first, then the heard fraction") {
  ListenEvent event = make_event("c", "u", "i", 10, Key::kLike, 0);
  CHECK(label_interaction(event, 0.45) == Interaction::kPositive);
  event.key = Key::kForward;
  CHECK(label_interaction(event, 0.45) == Interaction::kPositive);
  event.key = Key::kComment;
  CHECK(label_interaction(event, 0.45) == Interaction::kPositive);

  event.key = Key::kSkip;
  CHECK(label_interaction(event, 0.45) == Interaction::kNegative);
  // A long listen outranks the skip key only through the fraction rule,
  // which is checked before Skip.
  event.duration_heard = 100;
  CHECK(label_interaction(event, 0.45) == Interaction::kPositive);

  event.key = Key::kRecord;  // not a positive key on its own
  event.duration_heard = 10;
  CHECK(label_interaction(event, 0.45) == Interaction::kNeutral);
  event.duration_heard = 100;
  CHECK(label_interaction(event, 0.45) == Interaction::kPositive);

  // The threshold is strict: exactly at it is not positive.
  event.key = Key::kNone;
  event.item_duration = 100;
  event.duration_heard = 45;
  CHECK(label_interaction(event, 0.45) == Interaction::kNeutral);
  event.duration_heard = 45.0001;
  CHECK(label_interaction(event, 0.45) == Interaction::kPositive);

  CHECK_THROWS(label_interaction(event, 0.0));
  CHECK_THROWS(label_interaction(event, 1.0));
}

TEST_CASE("sessions group by call id and order by timestamp") {
  std::vector<ListenEvent> events;
  events.push_back(make_event("c2", "u1", "i3", 10, Key::kNone, 2000));
  events.push_back(make_event("c1", "u1", "i2", 10, Key::kNone, 1500));
  events.push_back(make_event("c1", "u1", "i1", 10, Key::kNone, 1000));

  std::vector<Session> sessions = assemble_sessions(events);
  REQUIRE(sessions.size() == 2);
  CHECK(sessions[0].call_id == "c1");
  CHECK(sessions[0].start_ts == 1000);
  REQUIRE(sessions[0].events.size() == 2);
  CHECK(sessions[0].events[0].item_id == "i1");
  CHECK(sessions[0].events[1].item_id == "i2");
  CHECK(sessions[1].call_id == "c2");
}

TEST_CASE("a session ending in a neutral listen is a hangup") {
  Session session;
  session.call_id = "c1";
  session.caller_id = "u1";
  session.events.push_back(make_event("c1", "u1", "i1", 5, Key::kNone, 1000));   // neutral
  session.events.push_back(make_event("c1", "u1", "i2", 90, Key::kNone, 1100));  // positive
  session.events.push_back(make_event("c1", "u1", "i3", 5, Key::kNone, 1200));   // neutral, final

  std::vector<Interaction> labels = label_session(session, 0.45);
  REQUIRE(labels.size() == 3);
  CHECK(labels[0] == Interaction::kNeutral);
  CHECK(labels[1] == Interaction::kPositive);
  CHECK(labels[2] == Interaction::kNegative);

  // A positive final listen stays positive.
  session.events.back().key = Key::kLike;
  labels = label_session(session, 0.45);
  CHECK(labels[2] == Interaction::kPositive);
}

TEST_CASE("traffic estimation averages distinct callers and rank reach") {
  std::vector<SessionStub> stubs;
  // Two observed days; hour 6 sees two callers on day one, one on day two.
  stubs.push_back({"u1", 6 * 3600, 1});
  stubs.push_back({"u2", 6 * 3600 + 120, 3});
  stubs.push_back({"u1", 86400 + 6 * 3600, 3});
  stubs.push_back({"u3", 86400 + 9 * 3600, 1});

  TrafficProfile traffic = estimate_traffic_from_stubs(stubs);
  CHECK(traffic.users_per_hour[6] == doctest::Approx(1.5));
  CHECK(traffic.users_per_hour[9] == doctest::Approx(0.5));
  CHECK(traffic.users_per_hour[0] == 0.0);

  // Depths 1,3,3,1: every session reaches rank 1, half reach ranks 2 and 3.
  REQUIRE(traffic.rank_reach_prob.size() == 3);
  CHECK(traffic.rank_reach_prob[0] == doctest::Approx(1.0));
  CHECK(traffic.rank_reach_prob[1] == doctest::Approx(0.5));
  CHECK(traffic.rank_reach_prob[2] == doctest::Approx(0.5));

  CHECK(traffic.reach_sum(3) == doctest::Approx(2.0));
  CHECK(traffic.reach_sum(2) == doctest::Approx(1.5));
  CHECK(traffic.reach_sum(10) == doctest::Approx(2.0));  // beyond observed depth

  TrafficProfile reparsed = parse_traffic(serialize_traffic(traffic));
  CHECK(reparsed.users_per_hour == traffic.users_per_hour);
  CHECK(reparsed.rank_reach_prob == traffic.rank_reach_prob);
}

TEST_CASE("traffic from full sessions matches the stub path") {
  std::vector<ListenEvent> events;
  events.push_back(make_event("c1", "u1", "i1", 10, Key::kNone, 6 * 3600));
  events.push_back(make_event("c1", "u1", "i2", 10, Key::kNone, 6 * 3600 + 60));
  events.push_back(make_event("c2", "u2", "i1", 10, Key::kNone, 9 * 3600));
  TrafficProfile traffic = estimate_traffic_profile(assemble_sessions(events));
  CHECK(traffic.users_per_hour[6] == doctest::Approx(1.0));
  REQUIRE(traffic.rank_reach_prob.size() == 2);
  CHECK(traffic.rank_reach_prob[1] == doctest::Approx(0.5));
}
