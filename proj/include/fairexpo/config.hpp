#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairexpo/calllog.hpp"
#include "fairexpo/exposure.hpp"
#include "fairexpo/forest.hpp"
#include "fairexpo/prefs.hpp"
#include "fairexpo/simulate.hpp"

namespace fairexpo {

// Flat view of an INI-style file: `[section]` headers, `key = value` lines,
// `#` comments. Keys are addressed as "section.key". Values never depend on
// the wall clock; every seed is explicit.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text);
  static RunConfig parse_file(const std::string& path);

  // Command-line override, e.g. set("simulation.master_seed", "7").
  void set(const std::string& flat_key, const std::string& value);

  bool has(const std::string& flat_key) const;
  std::string str(const std::string& flat_key, const std::string& fallback) const;
  std::string require(const std::string& flat_key) const;
  double num(const std::string& flat_key, double fallback) const;
  long long integer(const std::string& flat_key, long long fallback) const;
  bool flag(const std::string& flat_key, bool fallback) const;

  // FNV-1a over the canonical sorted key=value dump.
  std::uint64_t content_hash() const;

  // Typed views of the well-known sections.
  std::string run_id() const;
  std::string output_dir() const;  // FAIREXPO_OUTPUT_DIR overrides the config
  char ingest_delimiter() const;
  ColumnMap column_map() const;
  double heard_threshold() const;
  FilterThresholds filter_thresholds() const;
  FairnessPolicy policy() const;
  SlotSchedule schedule() const;
  EnsembleConfig ensemble() const;
  std::vector<ModelVariant> variants() const;
  SimOptions sim_options() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace fairexpo
