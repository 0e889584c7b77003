#include "fairexpo/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <stdexcept>

#include "fairexpo/textio.hpp"

namespace fairexpo {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig config;
  std::string section;
  std::size_t line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw std::runtime_error("config line " + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
    config.values_[section.empty() ? key : section + "." + key] = value;
  }
  return config;
}

RunConfig RunConfig::parse_file(const std::string& path) { return parse(read_file(path)); }

void RunConfig::set(const std::string& flat_key, const std::string& value) {
  const std::string key(trim(flat_key));
  if (key.empty()) throw std::runtime_error("config override: empty key");
  values_[key] = std::string(trim(value));
}

bool RunConfig::has(const std::string& flat_key) const { return values_.count(flat_key) > 0; }

std::string RunConfig::str(const std::string& flat_key, const std::string& fallback) const {
  auto it = values_.find(flat_key);
  return it == values_.end() ? fallback : it->second;
}

std::string RunConfig::require(const std::string& flat_key) const {
  auto it = values_.find(flat_key);
  if (it == values_.end() || it->second.empty())
    throw std::runtime_error("config: missing required key '" + flat_key + "'");
  return it->second;
}

double RunConfig::num(const std::string& flat_key, double fallback) const {
  auto it = values_.find(flat_key);
  if (it == values_.end()) return fallback;
  double out = 0;
  if (!try_parse_double(it->second, &out))
    throw std::runtime_error("config: key '" + flat_key + "' is not a number: " + it->second);
  return out;
}

long long RunConfig::integer(const std::string& flat_key, long long fallback) const {
  auto it = values_.find(flat_key);
  if (it == values_.end()) return fallback;
  long long out = 0;
  if (!try_parse_int(it->second, &out))
    throw std::runtime_error("config: key '" + flat_key + "' is not an integer: " + it->second);
  return out;
}

bool RunConfig::flag(const std::string& flat_key, bool fallback) const {
  auto it = values_.find(flat_key);
  if (it == values_.end()) return fallback;
  const std::string value = lower(it->second);
  if (value == "true" || value == "yes" || value == "on" || value == "1") return true;
  if (value == "false" || value == "no" || value == "off" || value == "0") return false;
  throw std::runtime_error("config: key '" + flat_key + "' is not a boolean: " + it->second);
}

std::uint64_t RunConfig::content_hash() const {
  std::string canon;
  for (const auto& [key, value] : values_) {
    canon += key;
    canon += '=';
    canon += value;
    canon += '\n';
  }
  return fnv1a(canon);
}

std::string RunConfig::run_id() const { return str("run.id", "run"); }

std::string RunConfig::output_dir() const {
  if (const char* env = std::getenv("FAIREXPO_OUTPUT_DIR"); env && *env) return env;
  return require("paths.output_dir");
}

char RunConfig::ingest_delimiter() const {
  const std::string name = lower(str("ingest.delimiter", "comma"));
  if (name == "comma") return ',';
  if (name == "tab") return '\t';
  if (name == "semicolon") return ';';
  throw std::runtime_error("config: unknown ingest.delimiter '" + name + "'");
}

ColumnMap RunConfig::column_map() const {
  ColumnMap columns;
  const std::string prefix = "ingest.column.";
  for (const auto& [key, value] : values_)
    if (key.rfind(prefix, 0) == 0) columns.names[key.substr(prefix.size())] = value;
  return columns;
}

double RunConfig::heard_threshold() const {
  const double threshold = num("ingest.heard_threshold", 0.45);
  if (threshold <= 0 || threshold >= 1)
    throw std::runtime_error("config: ingest.heard_threshold must lie in (0, 1)");
  return threshold;
}

FilterThresholds RunConfig::filter_thresholds() const {
  FilterThresholds thresholds;
  thresholds.min_calls = static_cast<int>(integer("filter.min_calls", thresholds.min_calls));
  thresholds.min_keys_per_second =
      num("filter.min_keys_per_second", thresholds.min_keys_per_second);
  thresholds.divergence_keep_fraction =
      num("filter.divergence_keep_fraction", thresholds.divergence_keep_fraction);
  if (thresholds.min_calls < 0 || thresholds.min_keys_per_second < 0 ||
      thresholds.divergence_keep_fraction <= 0 || thresholds.divergence_keep_fraction > 1)
    throw std::runtime_error("config: invalid [filter] thresholds");
  return thresholds;
}

FairnessPolicy RunConfig::policy() const {
  FairnessPolicy policy;
  const std::string aspect = lower(str("policy.aspect_rule", "min_guarantee"));
  if (aspect == "user_pref")
    policy.aspect_rule = AspectRule::kUserPreference;
  else if (aspect == "min_guarantee")
    policy.aspect_rule = AspectRule::kMinGuarantee;
  else if (aspect == "equal")
    policy.aspect_rule = AspectRule::kEqualExposure;
  else
    throw std::runtime_error("config: unknown policy.aspect_rule '" + aspect + "'");
  const std::string item = lower(str("policy.item_rule", "equal"));
  if (item == "equal")
    policy.item_rule = ItemRule::kEqualWithinAspect;
  else if (item == "rating")
    policy.item_rule = ItemRule::kProportionalToRating;
  else
    throw std::runtime_error("config: unknown policy.item_rule '" + item + "'");
  policy.min_share = num("policy.min_share", 0.05);
  if (policy.min_share < 0 || policy.min_share > 1)
    throw std::runtime_error("config: policy.min_share must lie in [0, 1]");
  return policy;
}

SlotSchedule RunConfig::schedule() const {
  SlotSchedule schedule;
  schedule.horizon_hours = static_cast<int>(integer("schedule.horizon_hours", 100));
  schedule.regen_interval_hours = static_cast<int>(integer("schedule.regen_interval", 1));
  schedule.list_length = static_cast<int>(integer("schedule.list_length", 10));
  const std::string slots = str("schedule.slots", "");
  if (!slots.empty()) {
    schedule.slots.clear();
    for (const std::string& token : split(slots, ';')) {
      if (trim(token).empty()) continue;
      const std::vector<std::string> parts = split(std::string(trim(token)), ':');
      if (parts.size() != 3)
        throw std::runtime_error("config: schedule.slots entry '" + token +
                                 "' is not day:start:end");
      SlotWindow window;
      const std::string day = lower(std::string(trim(parts[0])));
      if (day == "daily") {
        window.day_of_week = -1;
      } else {
        window.day_of_week = static_cast<int>(parse_int(trim(parts[0])));
        if (window.day_of_week < 0 || window.day_of_week > 6)
          throw std::runtime_error("config: schedule.slots day must be daily or 0..6");
      }
      window.start_hour = static_cast<int>(parse_int(trim(parts[1])));
      window.end_hour = static_cast<int>(parse_int(trim(parts[2])));
      if (window.start_hour < 0 || window.end_hour > 24 || window.start_hour >= window.end_hour)
        throw std::runtime_error("config: schedule.slots hours must satisfy 0 <= start < end <= 24");
      schedule.slots.push_back(window);
    }
    if (schedule.slots.empty()) throw std::runtime_error("config: schedule.slots is empty");
  }
  return schedule;
}

EnsembleConfig RunConfig::ensemble() const {
  EnsembleConfig config;
  config.num_trees = static_cast<int>(integer("classifier.num_trees", config.num_trees));
  config.max_depth = static_cast<int>(integer("classifier.max_depth", config.max_depth));
  config.validation_fraction =
      num("classifier.validation_fraction", config.validation_fraction);
  if (config.num_trees <= 0 || config.max_depth <= 0 || config.validation_fraction < 0 ||
      config.validation_fraction >= 1)
    throw std::runtime_error("config: invalid [classifier] parameters");
  return config;
}

std::vector<ModelVariant> RunConfig::variants() const {
  const std::string listed =
      str("simulation.variants", "random,manual,userpref,3a,3b,3c,3d");
  std::vector<ModelVariant> out;
  for (const std::string& token : split(listed, ',')) {
    const std::string name = lower(std::string(trim(token)));
    if (name.empty()) continue;
    ModelVariant variant;
    if (!try_parse_variant(name, &variant))
      throw std::runtime_error("config: unknown simulation variant '" + name + "'");
    if (std::find(out.begin(), out.end(), variant) == out.end()) out.push_back(variant);
  }
  if (out.empty()) throw std::runtime_error("config: simulation.variants is empty");
  return out;
}

SimOptions RunConfig::sim_options() const {
  SimOptions options;
  const std::string mode = lower(str("simulation.depth_mode", "replay"));
  if (mode == "replay")
    options.depth_mode = DepthMode::kReplay;
  else if (mode == "sample")
    options.depth_mode = DepthMode::kSample;
  else
    throw std::runtime_error("config: unknown simulation.depth_mode '" + mode + "'");
  options.min_share = num("policy.min_share", 0.05);
  options.checkpoint_interval =
      static_cast<int>(integer("simulation.checkpoint_interval", 0));
  if (options.checkpoint_interval < 0)
    throw std::runtime_error("config: simulation.checkpoint_interval must be >= 0");
  return options;
}

}  // namespace fairexpo
