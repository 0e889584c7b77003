#include "fairexpo/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairexpo {

int DiversityConstraints::upper_bound(const std::string& aspect, int prefix) const {
  auto it = shares.find(aspect);
  if (it == shares.end()) return prefix;  // unconstrained aspect
  // The epsilon keeps products like 0.2 x 5 from ceiling to 2 when the
  // exact value is an integer.
  return static_cast<int>(std::ceil(static_cast<double>(prefix) * it->second - 1e-9));
}

DiversityConstraints derive_constraints(const std::map<std::string, double>& shares, int n) {
  double total = 0.0;
  for (const auto& [aspect, share] : shares) {
    if (share < 0) throw std::runtime_error("derive_constraints: negative share");
    total += share;
  }
  if (!shares.empty() && std::abs(total - 1.0) > 1e-9)
    throw std::runtime_error("derive_constraints: shares must sum to 1");
  if (n < 1) throw std::runtime_error("derive_constraints: list length must be >= 1");
  return DiversityConstraints{shares, n};
}

void sort_by_utility(std::vector<PoolEntry>& pool) {
  std::stable_sort(pool.begin(), pool.end(), [](const PoolEntry& a, const PoolEntry& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    if (a.target != b.target) return a.target > b.target;
    return a.item_id < b.item_id;
  });
}

RankedList short_term_diversity(const std::vector<PoolEntry>& sorted_pool,
                                const DiversityConstraints& constraints) {
  if (sorted_pool.empty()) throw std::runtime_error("short_term_diversity: empty pool");
  const int m = static_cast<int>(sorted_pool.size());
  const int n = std::min(constraints.n, m);

  RankedList list;
  std::vector<bool> picked(sorted_pool.size(), false);
  std::map<std::string, int> counts;  // aspect -> count among chosen items

  for (int j = 1; j <= n; ++j) {
    int chosen = -1;
    for (int i = 0; i < m; ++i) {
      if (picked[i]) continue;
      // Placing at rank j adds the item to every prefix p >= j; since the
      // bound is non-decreasing in p, checking p = j suffices.
      bool feasible = true;
      for (const std::string& aspect : sorted_pool[i].aspects) {
        if (counts[aspect] + 1 > constraints.upper_bound(aspect, j)) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        chosen = i;
        break;
      }
    }
    if (chosen < 0) {
      // Fallback: the first unpicked item regardless of bounds.
      for (int i = 0; i < m; ++i) {
        if (!picked[i]) {
          chosen = i;
          break;
        }
      }
      list.fallback_positions.push_back(j);
    }
    picked[chosen] = true;
    for (const std::string& aspect : sorted_pool[chosen].aspects) ++counts[aspect];
    list.positions.push_back(sorted_pool[chosen].item_id);
    list.utilities.push_back(sorted_pool[chosen].utility);
  }
  return list;
}

ConstraintReport check_constraints(
    const RankedList& list, const DiversityConstraints& constraints,
    const std::map<std::string, std::vector<std::string>>& aspect_map) {
  ConstraintReport report;
  std::map<std::string, int> counts;
  for (int p = 1; p <= static_cast<int>(list.positions.size()); ++p) {
    const std::string& item = list.positions[p - 1];
    auto aspects_it = aspect_map.find(item);
    if (aspects_it == aspect_map.end())
      throw std::runtime_error("check_constraints: unknown item '" + item + "'");
    const bool fallback =
        std::find(list.fallback_positions.begin(), list.fallback_positions.end(), p) !=
        list.fallback_positions.end();
    for (const std::string& aspect : aspects_it->second) {
      const int count = ++counts[aspect];
      const int bound = constraints.upper_bound(aspect, p);
      if (count > bound) {
        ConstraintViolation violation{p, aspect, count, bound};
        (fallback ? report.fallback_excused : report.violations).push_back(violation);
      }
    }
  }
  return report;
}

std::vector<RankedList> long_term_fairness(const RecommendedPool& pool,
                                           const ExposurePlan& plan, ExposureLedger& ledger,
                                           const DiversityConstraints& constraints,
                                           int num_slots, const SlotFeedback& feedback) {
  return long_term_fairness(pool, plan, ledger, constraints, num_slots, feedback, nullptr);
}

std::vector<RankedList> long_term_fairness(
    const RecommendedPool& pool, const ExposurePlan& plan, ExposureLedger& ledger,
    const DiversityConstraints& constraints, int num_slots, const SlotFeedback& feedback,
    const std::function<bool(const std::string&, int)>& available) {
  if (num_slots < 1) throw std::runtime_error("long_term_fairness: need at least one slot");

  struct ItemState {
    std::vector<std::string> aspects;
    double target = 0.0;
  };
  std::map<std::string, ItemState> items;
  for (const auto& [aspect, members] : pool.items_by_aspect)
    for (const std::string& item : members) {
      auto target_it = plan.targets.find(item);
      if (target_it == plan.targets.end())
        throw std::runtime_error("long_term_fairness: plan lacks pool item '" + item + "'");
      ItemState& state = items[item];
      state.aspects.push_back(aspect);
      state.target = target_it->second;
    }

  std::vector<RankedList> lists;
  lists.reserve(num_slots);
  for (int slot = 1; slot <= num_slots; ++slot) {
    std::vector<PoolEntry> entries;
    entries.reserve(items.size());
    for (const auto& [item, state] : items) {
      if (available && !available(item, slot)) continue;
      entries.push_back({item, state.aspects,
                         state.target - static_cast<double>(ledger.achieved(item)),
                         state.target});
    }
    if (entries.empty())
      throw std::runtime_error("long_term_fairness: no items available in slot " +
                               std::to_string(slot));
    sort_by_utility(entries);
    RankedList list = short_term_diversity(entries, constraints);
    list.generated_at = slot;
    lists.push_back(list);

    if (!feedback) continue;
    std::vector<std::string> listens = feedback(slot, lists.back());
    for (const std::string& item : listens)
      if (!items.count(item))
        throw std::runtime_error("long_term_fairness: feedback reported unknown item '" +
                                 item + "'");
    // The final slot's listens belong to the caller; recording them here
    // would mutate the ledger after the last list it can influence.
    if (slot == num_slots) break;
    for (const std::string& item : listens) ledger.record_listen(item);
  }
  return lists;
}

}  // namespace fairexpo
