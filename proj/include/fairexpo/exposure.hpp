#pragma once

#include <map>
#include <string>
#include <vector>

#include "fairexpo/calllog.hpp"
#include "fairexpo/recommend.hpp"

namespace fairexpo {

enum class AspectRule { kUserPreference, kMinGuarantee, kEqualExposure };
enum class ItemRule { kEqualWithinAspect, kProportionalToRating };

std::string to_string(AspectRule rule);
std::string to_string(ItemRule rule);

struct FairnessPolicy {
  AspectRule aspect_rule = AspectRule::kUserPreference;
  double min_share = 0.05;  // only read under MinGuarantee
  ItemRule item_rule = ItemRule::kEqualWithinAspect;
};

// One serving window: hour range [start_hour, end_hour) on a given day of
// week, or every day when day_of_week is -1.
struct SlotWindow {
  int day_of_week = -1;  // 0..6, or -1 for daily
  int start_hour = 0;
  int end_hour = 24;
};

struct SlotSchedule {
  std::vector<SlotWindow> slots{SlotWindow{}};
  int horizon_hours = 100;
  int regen_interval_hours = 1;
  int list_length = 10;

  // Absolute hour offsets within [0, horizon_hours) covered by a window;
  // day of week counts from the horizon's first day.
  std::vector<int> scheduled_hours() const;
  // Number of list generations over the horizon.
  int num_generations() const;
};

struct ExposurePlan {
  std::map<std::string, double> targets;       // item -> desired exposure D
  std::map<std::string, double> aspect_shares; // adjusted shares, sum 1
  double inventory = 0.0;
};

// Expected listens over all scheduled hours in the horizon: the sum of
// users_per_hour times the expected list depth from rank-reach.
double total_inventory(const TrafficProfile& traffic, const SlotSchedule& schedule);

// UserPreference passes beta through; EqualExposure levels all aspects;
// MinGuarantee lifts every aspect below min_share to exactly min_share and
// scales the rest proportionally, iterating until no aspect is below.
std::map<std::string, double> aspect_shares(const FairnessPolicy& policy,
                                            const std::map<std::string, double>& beta);

// Splits each aspect's budget (share x inventory) over its pool items,
// equally or in proportion to ratings; multi-aspect items accumulate a
// target from every aspect they carry.
ExposurePlan item_targets(const std::map<std::string, double>& shares,
                          const RecommendedPool& pool, ItemRule item_rule, double inventory,
                          const std::map<std::string, int>& ratings);

class ExposureLedger {
 public:
  ExposureLedger() = default;
  explicit ExposureLedger(const std::set<std::string>& items);

  void record_listen(const std::string& item);
  long long achieved(const std::string& item) const;
  const std::map<std::string, long long>& all_achieved() const { return achieved_; }
  long long total() const;

  std::string serialize() const;
  static ExposureLedger parse(const std::string& text);

 private:
  std::map<std::string, long long> achieved_;
};

// D - E; negative when over-served.
double remaining_exposure(const ExposurePlan& plan, const ExposureLedger& ledger,
                          const std::string& item);

std::string serialize_plan(const ExposurePlan& plan);
ExposurePlan parse_plan(const std::string& text);

}  // namespace fairexpo
