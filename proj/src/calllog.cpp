#include "fairexpo/calllog.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fairexpo/textio.hpp"

namespace fairexpo {

std::string to_string(Source source) {
  switch (source) {
    case Source::kUser: return "User";
    case Source::kStudio: return "Studio";
    case Source::kReporter: return "Reporter";
  }
  return "User";
}

std::string to_string(Key key) {
  switch (key) {
    case Key::kNone: return "None";
    case Key::kSkip: return "Skip";
    case Key::kLike: return "Like";
    case Key::kForward: return "Forward";
    case Key::kComment: return "Comment";
    case Key::kRecord: return "Record";
    case Key::kOther: return "Other";
  }
  return "None";
}

std::string to_string(Interaction label) {
  switch (label) {
    case Interaction::kPositive: return "Positive";
    case Interaction::kNegative: return "Negative";
    case Interaction::kNeutral: return "Neutral";
  }
  return "Neutral";
}

bool try_parse_source(std::string_view text, Source* out) {
  if (text == "User") *out = Source::kUser;
  else if (text == "Studio") *out = Source::kStudio;
  else if (text == "Reporter") *out = Source::kReporter;
  else return false;
  return true;
}

bool try_parse_key(std::string_view text, Key* out) {
  if (text == "None") *out = Key::kNone;
  else if (text == "Skip") *out = Key::kSkip;
  else if (text == "Like") *out = Key::kLike;
  else if (text == "Forward") *out = Key::kForward;
  else if (text == "Comment") *out = Key::kComment;
  else if (text == "Record") *out = Key::kRecord;
  else if (text == "Other") *out = Key::kOther;
  else return false;
  return true;
}

std::string to_string(const RowDiagnostic& diagnostic) {
  return "row=" + std::to_string(diagnostic.row) + " field=" + diagnostic.field +
         " reason=" + diagnostic.reason;
}

std::string ColumnMap::resolve(const std::string& canonical) const {
  auto it = names.find(canonical);
  return it == names.end() ? canonical : it->second;
}

namespace {

const char* const kCanonicalFields[] = {
    "call_id",     "caller_id", "item_id", "contributor_id", "item_duration",
    "duration_heard", "source", "topic",   "aspect",         "rating",
    "key_pressed", "timestamp", "rank_position"};

}  // namespace

ParseResult parse_call_logs(std::istream& rows, char delimiter, const ColumnMap& columns) {
  std::string header_line;
  if (!std::getline(rows, header_line))
    throw std::runtime_error("call log is empty (no header row)");
  if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();

  std::vector<std::string> header = split(header_line, delimiter);
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i)
    position.emplace(std::string(trim(header[i])), i);

  std::map<std::string, std::size_t> field_index;  // canonical -> column
  for (const char* field : kCanonicalFields) {
    auto it = position.find(columns.resolve(field));
    if (it == position.end()) {
      if (std::string_view(field) == "rank_position") continue;  // optional column
      throw std::runtime_error(std::string("call log header lacks column '") +
                               columns.resolve(field) + "' for field '" + field + "'");
    }
    field_index.emplace(field, it->second);
  }

  ParseResult result;
  std::string line;
  std::size_t row = 1;  // header occupied line 1
  while (std::getline(rows, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, delimiter);
    if (cells.size() != header.size()) {
      result.rejected.push_back({row, "*", "expected " + std::to_string(header.size()) +
                                              " columns, got " + std::to_string(cells.size())});
      continue;
    }

    auto cell = [&](const char* field) -> std::string_view {
      return trim(cells[field_index.at(field)]);
    };

    ListenEvent ev;
    std::string bad_field, bad_reason;
    auto fail = [&](const char* field, std::string reason) {
      bad_field = field;
      bad_reason = std::move(reason);
    };

    ev.call_id = cell("call_id");
    ev.caller_id = cell("caller_id");
    ev.item_id = cell("item_id");
    ev.contributor_id = cell("contributor_id");
    if (ev.call_id.empty()) fail("call_id", "empty identifier");
    else if (ev.caller_id.empty()) fail("caller_id", "empty identifier");
    else if (ev.item_id.empty()) fail("item_id", "empty identifier");
    else if (!try_parse_double(cell("item_duration"), &ev.item_duration))
      fail("item_duration", "not a number");
    else if (ev.item_duration <= 0) fail("item_duration", "must be > 0");
    else if (!try_parse_double(cell("duration_heard"), &ev.duration_heard))
      fail("duration_heard", "not a number");
    else if (ev.duration_heard < 0) fail("duration_heard", "must be >= 0");
    else if (ev.duration_heard > ev.item_duration)
      fail("duration_heard", "exceeds item_duration");
    else if (!try_parse_source(cell("source"), &ev.source))
      fail("source", "unknown source code");
    else if (!try_parse_key(cell("key_pressed"), &ev.key))
      fail("key_pressed", "unknown key code");
    else if (!try_parse_timestamp(cell("timestamp"), &ev.timestamp))
      fail("timestamp", "not a timestamp");
    else {
      long long rating = 0;
      if (!try_parse_int(cell("rating"), &rating)) fail("rating", "not an integer");
      else if (rating < 1 || rating > 5) fail("rating", "outside 1..5");
      else ev.rating = static_cast<int>(rating);
    }
    if (bad_field.empty()) {
      ev.topic = cell("topic");
      ev.aspect = cell("aspect");
      auto rank_it = field_index.find("rank_position");
      if (rank_it != field_index.end()) {
        std::string_view raw = trim(cells[rank_it->second]);
        if (!raw.empty()) {
          long long rank = 0;
          if (!try_parse_int(raw, &rank)) fail("rank_position", "not an integer");
          else if (rank < 1) fail("rank_position", "must be >= 1");
          else ev.rank_position = static_cast<int>(rank);
        }
      }
    }

    if (!bad_field.empty())
      result.rejected.push_back({row, bad_field, bad_reason});
    else
      result.events.push_back(std::move(ev));
  }
  return result;
}

std::string serialize_events(const std::vector<ListenEvent>& events) {
  std::string out =
      "call_id,caller_id,item_id,contributor_id,item_duration,duration_heard,"
      "source,topic,aspect,rating,key_pressed,timestamp,rank_position\n";
  for (const ListenEvent& ev : events) {
    out += ev.call_id + ',' + ev.caller_id + ',' + ev.item_id + ',' + ev.contributor_id +
           ',' + format_double(ev.item_duration) + ',' + format_double(ev.duration_heard) +
           ',' + to_string(ev.source) + ',' + ev.topic + ',' + ev.aspect + ',' +
           std::to_string(ev.rating) + ',' + to_string(ev.key) + ',' +
           format_timestamp(ev.timestamp) + ',' +
           (ev.rank_position ? std::to_string(*ev.rank_position) : std::string()) + '\n';
  }
  return out;
}

ParseResult parse_events(const std::string& text) {
  std::istringstream in(text);
  return parse_call_logs(in, ',', ColumnMap{});
}

Interaction label_interaction(const ListenEvent& event, double heard_threshold) {
  if (heard_threshold <= 0 || heard_threshold >= 1)
    throw std::runtime_error("heard_threshold must be in (0, 1)");
  if (event.item_duration <= 0)
    throw std::runtime_error("label_interaction: item_duration must be > 0");
  if (event.key == Key::kLike || event.key == Key::kForward || event.key == Key::kComment)
    return Interaction::kPositive;
  if (event.duration_heard / event.item_duration > heard_threshold)
    return Interaction::kPositive;
  if (event.key == Key::kSkip) return Interaction::kNegative;
  return Interaction::kNeutral;
}

std::vector<Session> assemble_sessions(const std::vector<ListenEvent>& events) {
  std::map<std::string, Session> by_call;
  for (const ListenEvent& ev : events) {
    Session& s = by_call[ev.call_id];
    if (s.events.empty()) {
      s.call_id = ev.call_id;
      s.caller_id = ev.caller_id;
    }
    s.events.push_back(ev);
  }
  std::vector<Session> sessions;
  sessions.reserve(by_call.size());
  for (auto& [call_id, session] : by_call) {
    std::stable_sort(session.events.begin(), session.events.end(),
                     [](const ListenEvent& a, const ListenEvent& b) {
                       return a.timestamp < b.timestamp;
                     });
    session.start_ts = session.events.front().timestamp;
    sessions.push_back(std::move(session));
  }
  std::stable_sort(sessions.begin(), sessions.end(), [](const Session& a, const Session& b) {
    if (a.start_ts != b.start_ts) return a.start_ts < b.start_ts;
    return a.call_id < b.call_id;
  });
  return sessions;
}

std::vector<Interaction> label_session(const Session& session, double heard_threshold) {
  std::vector<Interaction> labels;
  labels.reserve(session.events.size());
  for (const ListenEvent& ev : session.events)
    labels.push_back(label_interaction(ev, heard_threshold));
  // A session whose final item carried no signal ended in a hangup.
  if (!labels.empty() && labels.back() == Interaction::kNeutral)
    labels.back() = Interaction::kNegative;
  return labels;
}

double TrafficProfile::reach_sum(int n) const {
  double sum = 0;
  for (int r = 0; r < n && r < static_cast<int>(rank_reach_prob.size()); ++r)
    sum += rank_reach_prob[r];
  return sum;
}

TrafficProfile estimate_traffic_from_stubs(const std::vector<SessionStub>& stubs) {
  if (stubs.empty()) throw std::runtime_error("traffic profile needs at least one session");

  TrafficProfile profile;
  std::set<std::int64_t> observed_days;
  std::map<std::pair<std::int64_t, int>, std::set<std::string>> callers_by_day_hour;
  int max_depth = 0;
  for (const SessionStub& stub : stubs) {
    std::int64_t day = stub.timestamp / 86400;
    if (stub.timestamp < 0 && stub.timestamp % 86400 != 0) --day;
    int hour = static_cast<int>((stub.timestamp - day * 86400) / 3600);
    observed_days.insert(day);
    callers_by_day_hour[{day, hour}].insert(stub.caller_id);
    max_depth = std::max(max_depth, stub.depth);
  }
  const double days = static_cast<double>(observed_days.size());
  for (const auto& [day_hour, callers] : callers_by_day_hour)
    profile.users_per_hour[day_hour.second] += static_cast<double>(callers.size()) / days;

  profile.rank_reach_prob.assign(max_depth, 0.0);
  for (const SessionStub& stub : stubs)
    for (int r = 0; r < stub.depth; ++r) profile.rank_reach_prob[r] += 1.0;
  for (double& p : profile.rank_reach_prob) p /= static_cast<double>(stubs.size());
  return profile;
}

TrafficProfile estimate_traffic_profile(const std::vector<Session>& sessions) {
  std::vector<SessionStub> stubs;
  stubs.reserve(sessions.size());
  for (const Session& s : sessions)
    stubs.push_back({s.caller_id, s.start_ts, static_cast<int>(s.events.size())});
  return estimate_traffic_from_stubs(stubs);
}

std::string serialize_traffic(const TrafficProfile& profile) {
  std::string out = "kind,index,value\n";
  for (int h = 0; h < 24; ++h)
    out += "hour," + std::to_string(h) + ',' + format_double(profile.users_per_hour[h]) + '\n';
  for (std::size_t r = 0; r < profile.rank_reach_prob.size(); ++r)
    out += "reach," + std::to_string(r + 1) + ',' + format_double(profile.rank_reach_prob[r]) + '\n';
  return out;
}

TrafficProfile parse_traffic(const std::string& text) {
  TrafficProfile profile;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("traffic file is empty");
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 3) throw std::runtime_error("traffic file: bad row '" + line + "'");
    long long index = parse_int(cells[1]);
    double value = parse_double(cells[2]);
    if (cells[0] == "hour") {
      if (index < 0 || index > 23) throw std::runtime_error("traffic file: hour out of range");
      profile.users_per_hour[index] = value;
    } else if (cells[0] == "reach") {
      if (index < 1) throw std::runtime_error("traffic file: rank out of range");
      if (profile.rank_reach_prob.size() < static_cast<std::size_t>(index))
        profile.rank_reach_prob.resize(index, 0.0);
      profile.rank_reach_prob[index - 1] = value;
    } else {
      throw std::runtime_error("traffic file: unknown kind '" + cells[0] + "'");
    }
  }
  return profile;
}

}  // namespace fairexpo
