#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fairexpo/exposure.hpp"

namespace fairexpo {

// Prefix bounds U(aspect, p) = ceil(p x share): at most that many items of
// an aspect may appear in the top p ranks. Ceiling keeps every aspect
// admissible at rank 1 and the bound non-decreasing in p. Aspects without a
// share are unconstrained.
struct DiversityConstraints {
  std::map<std::string, double> shares;
  int n = 0;  // output list length

  int upper_bound(const std::string& aspect, int prefix) const;
};

DiversityConstraints derive_constraints(const std::map<std::string, double>& shares, int n);

struct PoolEntry {
  std::string item_id;
  std::vector<std::string> aspects;
  double utility = 0.0;  // remaining exposure D - E
  double target = 0.0;   // D, the tie-break after utility
};

// Utility descending, then target descending, then item id ascending; the
// total order Alg-style greedy selection scans.
void sort_by_utility(std::vector<PoolEntry>& pool);

struct RankedList {
  std::vector<std::string> positions;   // distinct item ids, best first
  std::vector<double> utilities;        // utility of each item when selected
  int generated_at = 0;                 // slot index
  std::vector<int> fallback_positions;  // 1-based ranks filled by the fallback rule
};

// Greedy selection over a utility-sorted pool: each rank takes the first
// unpicked item whose aspects stay within every prefix bound; when no item
// qualifies the first unpicked item is taken regardless (fallback).
RankedList short_term_diversity(const std::vector<PoolEntry>& sorted_pool,
                                const DiversityConstraints& constraints);

struct ConstraintViolation {
  int position = 0;  // 1-based prefix where the bound is exceeded
  std::string aspect;
  int count = 0;
  int bound = 0;
};

struct ConstraintReport {
  std::vector<ConstraintViolation> violations;        // genuine breaches
  std::vector<ConstraintViolation> fallback_excused;  // breaches at fallback ranks
  bool clean() const { return violations.empty(); }
};

ConstraintReport check_constraints(
    const RankedList& list, const DiversityConstraints& constraints,
    const std::map<std::string, std::vector<std::string>>& aspect_map);

// Reports the items listened to during a slot (ids may repeat, one per
// listen). Invoked for every slot; listens after the final slot stay with
// the caller.
using SlotFeedback = std::function<std::vector<std::string>(int slot, const RankedList& list)>;

// Regenerates the list each slot with utility = remaining exposure D - E.
// With a fresh ledger, slot 1 ranks purely by D. Feedback listens are
// validated against the plan, folded into the ledger, and utilities are
// recomputed before the next slot.
std::vector<RankedList> long_term_fairness(const RecommendedPool& pool,
                                           const ExposurePlan& plan, ExposureLedger& ledger,
                                           const DiversityConstraints& constraints,
                                           int num_slots, const SlotFeedback& feedback);

// Availability-aware variant: entries for which available(item, slot) is
// false sit out that slot's list (items not yet published, for example).
std::vector<RankedList> long_term_fairness(
    const RecommendedPool& pool, const ExposurePlan& plan, ExposureLedger& ledger,
    const DiversityConstraints& constraints, int num_slots, const SlotFeedback& feedback,
    const std::function<bool(const std::string&, int)>& available);

}  // namespace fairexpo
