#include "fairexpo/exposure.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fairexpo/textio.hpp"

namespace fairexpo {

std::string to_string(AspectRule rule) {
  switch (rule) {
    case AspectRule::kUserPreference: return "user_pref";
    case AspectRule::kMinGuarantee: return "min_guarantee";
    case AspectRule::kEqualExposure: return "equal";
  }
  return "user_pref";
}

std::string to_string(ItemRule rule) {
  return rule == ItemRule::kEqualWithinAspect ? "equal" : "rating";
}

std::vector<int> SlotSchedule::scheduled_hours() const {
  if (horizon_hours <= 0 || regen_interval_hours <= 0 || list_length < 1)
    throw std::runtime_error("schedule: horizon, regen interval, and length must be positive");
  std::vector<int> hours;
  for (int h = 0; h < horizon_hours; ++h) {
    const int hour_of_day = h % 24;
    const int day_of_week = (h / 24) % 7;
    for (const SlotWindow& window : slots) {
      if (window.day_of_week >= 0 && window.day_of_week != day_of_week) continue;
      if (hour_of_day >= window.start_hour && hour_of_day < window.end_hour) {
        hours.push_back(h);
        break;
      }
    }
  }
  return hours;
}

int SlotSchedule::num_generations() const {
  const int scheduled = static_cast<int>(scheduled_hours().size());
  return (scheduled + regen_interval_hours - 1) / regen_interval_hours;
}

double total_inventory(const TrafficProfile& traffic, const SlotSchedule& schedule) {
  std::vector<int> hours = schedule.scheduled_hours();
  if (hours.empty()) throw std::runtime_error("total_inventory: schedule covers no hours");
  const double depth = traffic.reach_sum(schedule.list_length);
  double inventory = 0.0;
  for (int h : hours) inventory += traffic.users_per_hour[h % 24] * depth;
  if (inventory <= 0)
    throw std::runtime_error("total_inventory: schedule and traffic expect no listens");
  return inventory;
}

std::map<std::string, double> aspect_shares(const FairnessPolicy& policy,
                                            const std::map<std::string, double>& beta) {
  if (beta.empty()) throw std::runtime_error("aspect_shares: no aspects");
  double beta_sum = 0.0;
  for (const auto& [aspect, share] : beta) beta_sum += share;
  if (std::abs(beta_sum - 1.0) > 1e-9)
    throw std::runtime_error("aspect_shares: beta must sum to 1");

  std::map<std::string, double> shares = beta;
  if (policy.aspect_rule == AspectRule::kUserPreference) return shares;
  if (policy.aspect_rule == AspectRule::kEqualExposure) {
    const double equal = 1.0 / static_cast<double>(beta.size());
    for (auto& [aspect, share] : shares) share = equal;
    return shares;
  }

  const double m = policy.min_share;
  if (m <= 0 || m * static_cast<double>(beta.size()) > 1.0 + 1e-12)
    throw std::runtime_error("aspect_shares: minimum share is infeasible for this aspect count");

  // Iterative proportional redistribution: pinning one aspect at m can push
  // another below m, so repeat until the floor holds everywhere.
  std::set<std::string> pinned;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [aspect, share] : shares) {
      if (!pinned.count(aspect) && share < m - 1e-15) {
        pinned.insert(aspect);
        changed = true;
      }
    }
    if (!changed) break;
    double pinned_mass = m * static_cast<double>(pinned.size());
    double free_beta = 0.0;
    for (const auto& [aspect, share] : beta)
      if (!pinned.count(aspect)) free_beta += share;
    if (free_beta <= 0.0) {
      // Feasibility implies this happens only when m exactly equals 1/n.
      for (auto& [aspect, share] : shares) share = m;
      break;
    }
    for (auto& [aspect, share] : shares) {
      if (pinned.count(aspect))
        share = m;
      else
        share = beta.at(aspect) * (1.0 - pinned_mass) / free_beta;
    }
  }
  return shares;
}

ExposurePlan item_targets(const std::map<std::string, double>& shares,
                          const RecommendedPool& pool, ItemRule item_rule, double inventory,
                          const std::map<std::string, int>& ratings) {
  ExposurePlan plan;
  plan.aspect_shares = shares;
  plan.inventory = inventory;
  for (const auto& [aspect, share] : shares) {
    if (share <= 0) continue;
    auto members_it = pool.items_by_aspect.find(aspect);
    if (members_it == pool.items_by_aspect.end() || members_it->second.empty())
      throw std::runtime_error("item_targets: aspect '" + aspect +
                               "' has positive share but an empty pool");
    const std::set<std::string>& members = members_it->second;
    const double budget = share * inventory;
    if (item_rule == ItemRule::kEqualWithinAspect) {
      const double each = budget / static_cast<double>(members.size());
      for (const std::string& item : members) plan.targets[item] += each;
    } else {
      double rating_sum = 0.0;
      for (const std::string& item : members) {
        auto rating_it = ratings.find(item);
        if (rating_it == ratings.end())
          throw std::runtime_error("item_targets: no rating for item '" + item + "'");
        rating_sum += static_cast<double>(rating_it->second);
      }
      for (const std::string& item : members)
        plan.targets[item] += budget * static_cast<double>(ratings.at(item)) / rating_sum;
    }
  }
  return plan;
}

ExposureLedger::ExposureLedger(const std::set<std::string>& items) {
  for (const std::string& item : items) achieved_[item] = 0;
}

void ExposureLedger::record_listen(const std::string& item) {
  auto it = achieved_.find(item);
  if (it == achieved_.end())
    throw std::runtime_error("record_listen: item '" + item + "' is not in the plan");
  ++it->second;
}

long long ExposureLedger::achieved(const std::string& item) const {
  auto it = achieved_.find(item);
  if (it == achieved_.end())
    throw std::runtime_error("ledger: item '" + item + "' is not tracked");
  return it->second;
}

long long ExposureLedger::total() const {
  long long total = 0;
  for (const auto& [item, count] : achieved_) total += count;
  return total;
}

std::string ExposureLedger::serialize() const {
  std::string out = "item_id,achieved_exposure\n";
  for (const auto& [item, count] : achieved_)
    out += item + ',' + std::to_string(count) + '\n';
  return out;
}

ExposureLedger ExposureLedger::parse(const std::string& text) {
  ExposureLedger ledger;
  bool header = true;
  for (std::string_view line_view : split(text, '\n')) {
    std::string_view line = trim(line_view);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 2) throw std::runtime_error("ledger checkpoint: bad row");
    ledger.achieved_[std::string(trim(cells[0]))] = parse_int(trim(cells[1]));
  }
  return ledger;
}

double remaining_exposure(const ExposurePlan& plan, const ExposureLedger& ledger,
                          const std::string& item) {
  auto it = plan.targets.find(item);
  if (it == plan.targets.end())
    throw std::runtime_error("remaining_exposure: item '" + item + "' is not in the plan");
  return it->second - static_cast<double>(ledger.achieved(item));
}

std::string serialize_plan(const ExposurePlan& plan) {
  std::string out = "kind,key,value\n";
  out += "inventory,total," + format_double(plan.inventory) + '\n';
  for (const auto& [aspect, share] : plan.aspect_shares)
    out += "share," + aspect + ',' + format_double(share) + '\n';
  for (const auto& [item, target] : plan.targets)
    out += "target," + item + ',' + format_double(target) + '\n';
  return out;
}

ExposurePlan parse_plan(const std::string& text) {
  ExposurePlan plan;
  bool header = true;
  for (std::string_view line_view : split(text, '\n')) {
    std::string_view line = trim(line_view);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 3) throw std::runtime_error("plan file: bad row");
    const std::string key = std::string(trim(cells[1]));
    const double value = parse_double(trim(cells[2]));
    if (cells[0] == "inventory") plan.inventory = value;
    else if (cells[0] == "share") plan.aspect_shares[key] = value;
    else if (cells[0] == "target") plan.targets[key] = value;
    else throw std::runtime_error("plan file: unknown kind '" + cells[0] + "'");
  }
  return plan;
}

}  // namespace fairexpo
