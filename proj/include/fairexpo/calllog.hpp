#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fairexpo {

enum class Source { kUser, kStudio, kReporter };
enum class Key { kNone, kSkip, kLike, kForward, kComment, kRecord, kOther };
enum class Interaction { kPositive, kNegative, kNeutral };

std::string to_string(Source source);
std::string to_string(Key key);
std::string to_string(Interaction label);
bool try_parse_source(std::string_view text, Source* out);
bool try_parse_key(std::string_view text, Key* out);

// One row of the call log: who heard which item, for how long, and with
// which key press.
struct ListenEvent {
  std::string call_id;
  std::string caller_id;
  std::string item_id;
  std::string contributor_id;
  double item_duration = 0;  // seconds, > 0
  double duration_heard = 0; // seconds, in [0, item_duration]
  Source source = Source::kUser;
  std::string topic;
  std::string aspect;
  int rating = 0;  // 1..5
  Key key = Key::kNone;
  std::int64_t timestamp = 0;  // epoch seconds
  std::optional<int> rank_position;  // >= 1 when known

  bool operator==(const ListenEvent&) const = default;
};

struct RowDiagnostic {
  std::size_t row;  // 1-based line number in the input, counting the header
  std::string field;
  std::string reason;
};
std::string to_string(const RowDiagnostic& diagnostic);

struct ParseResult {
  std::vector<ListenEvent> events;
  std::vector<RowDiagnostic> rejected;
};

// Maps canonical field names to the header names used by a particular log
// export. Fields absent from the map use their canonical names. The
// canonical names are: call_id, caller_id, item_id, contributor_id,
// item_duration, duration_heard, source, topic, aspect, rating,
// key_pressed, timestamp, rank_position.
struct ColumnMap {
  std::map<std::string, std::string> names;
  std::string resolve(const std::string& canonical) const;
};

// Parses a delimited log with a header row. Invalid rows are reported, not
// fatal; a header missing a required column is fatal. rank_position may be
// absent from the header entirely (it is optional per event).
ParseResult parse_call_logs(std::istream& rows, char delimiter, const ColumnMap& columns);

// Canonical serialization; parse_call_logs with default columns inverts it.
std::string serialize_events(const std::vector<ListenEvent>& events);
ParseResult parse_events(const std::string& text);

// Per-event signal: positive keys and the heard-fraction rule. The
// session-level hangup rule lives in label_session.
Interaction label_interaction(const ListenEvent& event, double heard_threshold);

struct Session {
  std::string call_id;
  std::string caller_id;
  std::int64_t start_ts = 0;
  std::vector<ListenEvent> events;  // ordered by timestamp
};

std::vector<Session> assemble_sessions(const std::vector<ListenEvent>& events);

// Labels every event of a session; a final event that would be Neutral is
// a hangup and labels Negative.
std::vector<Interaction> label_session(const Session& session, double heard_threshold);

struct TrafficProfile {
  std::array<double, 24> users_per_hour{};
  std::vector<double> rank_reach_prob;  // index 0 = first rank

  // Expected listens per caller down a list of n ranks; ranks beyond the
  // observed maximum depth contribute zero.
  double reach_sum(int n) const;
};

TrafficProfile estimate_traffic_profile(const std::vector<Session>& sessions);

// Shared core for workloads that carry only (caller, timestamp, depth).
struct SessionStub {
  std::string caller_id;
  std::int64_t timestamp = 0;
  int depth = 0;
};
TrafficProfile estimate_traffic_from_stubs(const std::vector<SessionStub>& stubs);

std::string serialize_traffic(const TrafficProfile& profile);
TrafficProfile parse_traffic(const std::string& text);

}  // namespace fairexpo
