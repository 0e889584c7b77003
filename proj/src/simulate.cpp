#include "fairexpo/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairexpo/rng.hpp"
#include "fairexpo/textio.hpp"

namespace fairexpo {

std::string to_string(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::kRandomBaseline: return "random";
    case ModelVariant::kManualModeration: return "manual";
    case ModelVariant::kUserPreference: return "userpref";
    case ModelVariant::kPolicy3a: return "3a";
    case ModelVariant::kPolicy3b: return "3b";
    case ModelVariant::kPolicy3c: return "3c";
    case ModelVariant::kPolicy3d: return "3d";
  }
  return "random";
}

bool try_parse_variant(std::string_view text, ModelVariant* out) {
  if (text == "random") *out = ModelVariant::kRandomBaseline;
  else if (text == "manual") *out = ModelVariant::kManualModeration;
  else if (text == "userpref") *out = ModelVariant::kUserPreference;
  else if (text == "3a") *out = ModelVariant::kPolicy3a;
  else if (text == "3b") *out = ModelVariant::kPolicy3b;
  else if (text == "3c") *out = ModelVariant::kPolicy3c;
  else if (text == "3d") *out = ModelVariant::kPolicy3d;
  else return false;
  return true;
}

bool is_policy_variant(ModelVariant variant) {
  return variant == ModelVariant::kPolicy3a || variant == ModelVariant::kPolicy3b ||
         variant == ModelVariant::kPolicy3c || variant == ModelVariant::kPolicy3d;
}

FairnessPolicy policy_for(ModelVariant variant, double min_share) {
  FairnessPolicy policy;
  policy.min_share = min_share;
  switch (variant) {
    case ModelVariant::kPolicy3a:
      policy.aspect_rule = AspectRule::kMinGuarantee;
      policy.item_rule = ItemRule::kEqualWithinAspect;
      break;
    case ModelVariant::kPolicy3b:
      policy.aspect_rule = AspectRule::kMinGuarantee;
      policy.item_rule = ItemRule::kProportionalToRating;
      break;
    case ModelVariant::kPolicy3c:
      policy.aspect_rule = AspectRule::kEqualExposure;
      policy.item_rule = ItemRule::kEqualWithinAspect;
      break;
    case ModelVariant::kPolicy3d:
      policy.aspect_rule = AspectRule::kEqualExposure;
      policy.item_rule = ItemRule::kProportionalToRating;
      break;
    default:
      throw std::runtime_error("policy_for: '" + to_string(variant) +
                               "' is not a policy variant");
  }
  return policy;
}

std::vector<SimSession> to_sim_sessions(const std::vector<Session>& sessions) {
  std::vector<SimSession> sims;
  sims.reserve(sessions.size());
  for (const Session& session : sessions) {
    SimSession sim;
    sim.caller_id = session.caller_id;
    sim.timestamp = session.start_ts;
    sim.depth = static_cast<int>(session.events.size());
    for (const ListenEvent& ev : session.events) sim.heard_items.push_back(ev.item_id);
    sims.push_back(std::move(sim));
  }
  return sims;
}

namespace {

std::int64_t floor_day(std::int64_t epoch) {
  std::int64_t day = epoch / 86400;
  if (epoch < 0 && epoch % 86400 != 0) --day;
  return day * 86400;
}

int sample_depth(const std::vector<double>& reach, SplitRng& rng) {
  const double u = rng.next_double();
  int depth = 0;
  for (double p : reach) {
    if (p > u) ++depth;
    else break;  // reach is non-increasing
  }
  return depth;
}

struct ServingContext {
  const std::map<std::string, Item>& catalog;
  ExposureOutcome& outcome;
  std::set<std::string> unknown_reported;

  void credit(const std::string& item) {
    ++outcome.exposure_by_item[item];
    ++outcome.total_listens;
    auto it = catalog.find(item);
    if (it == catalog.end()) {
      if (unknown_reported.insert(item).second)
        outcome.diagnostics.push_back("item=" + item +
                                      " reason=not in the item store; no aspect credited");
      return;
    }
    for (const std::string& aspect : it->second.aspects) ++outcome.exposure_by_aspect[aspect];
  }
};

}  // namespace

ExposureOutcome replay(const std::vector<SimSession>& sessions, ModelVariant variant,
                       const RecommendedPool& pool, const std::map<std::string, Item>& catalog,
                       const TrafficProfile& traffic, const SlotSchedule& schedule,
                       const SimOptions& options, std::uint64_t seed) {
  ExposureOutcome outcome;
  outcome.variant = variant;
  outcome.cluster = pool.cluster;
  outcome.seed = seed;

  if (variant != ModelVariant::kManualModeration) {
    if (pool.scores.empty()) throw std::runtime_error("replay: empty recommended pool");
    for (const std::string& item : pool.all_items()) {
      if (!catalog.count(item))
        throw std::runtime_error("replay: pool item '" + item + "' is not in the item store");
      // Zero-exposure pool items stay visible in the outcome.
      outcome.exposure_by_item[item] = 0;
      for (const std::string& aspect : catalog.at(item).aspects)
        outcome.exposure_by_aspect[aspect] = 0;
    }
  }

  // Sessions attach to list generations by the hour of their timestamp,
  // anchored at the midnight before the earliest session.
  const std::vector<int> hours = schedule.scheduled_hours();
  if (hours.empty()) throw std::runtime_error("replay: schedule covers no hours");
  std::map<int, int> generation_of_hour;
  for (std::size_t i = 0; i < hours.size(); ++i)
    generation_of_hour[hours[i]] =
        static_cast<int>(i) / schedule.regen_interval_hours;
  const int num_generations = schedule.num_generations();

  std::int64_t anchor = 0;
  if (!sessions.empty()) {
    std::int64_t min_ts = sessions[0].timestamp;
    for (const SimSession& s : sessions) min_ts = std::min(min_ts, s.timestamp);
    anchor = floor_day(min_ts);
  }

  std::vector<std::vector<int>> sessions_by_generation(num_generations);
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const SimSession& session = sessions[i];
    const std::int64_t offset = session.timestamp - anchor;
    const int abs_hour = static_cast<int>(offset / 3600);
    auto it = offset < 0 ? generation_of_hour.end() : generation_of_hour.find(abs_hour);
    if (it == generation_of_hour.end()) {
      outcome.diagnostics.push_back("session caller=" + session.caller_id +
                                    " ts=" + format_timestamp(session.timestamp) +
                                    " reason=outside the schedule; skipped");
      continue;
    }
    sessions_by_generation[it->second].push_back(static_cast<int>(i));
  }
  for (auto& generation : sessions_by_generation)
    std::stable_sort(generation.begin(), generation.end(), [&](int a, int b) {
      if (sessions[a].timestamp != sessions[b].timestamp)
        return sessions[a].timestamp < sessions[b].timestamp;
      if (sessions[a].caller_id != sessions[b].caller_id)
        return sessions[a].caller_id < sessions[b].caller_id;
      return a < b;
    });

  auto generation_start_epoch = [&](int generation) {
    return anchor +
           static_cast<std::int64_t>(hours[static_cast<std::size_t>(generation) *
                                           schedule.regen_interval_hours]) *
               3600;
  };

  ServingContext serving{catalog, outcome, {}};
  SplitRng variant_rng(seed);

  // Serves one session against a list; returns the listened prefix.
  auto serve = [&](const SimSession& session, const RankedList& list,
                   SplitRng& slot_rng) {
    int depth = session.depth;
    if (options.depth_mode == DepthMode::kSample)
      depth = sample_depth(traffic.rank_reach_prob, slot_rng);
    depth = std::min(depth, static_cast<int>(list.positions.size()));
    std::vector<std::string> listens;
    listens.reserve(depth);
    for (int r = 0; r < depth; ++r) {
      listens.push_back(list.positions[r]);
      serving.credit(list.positions[r]);
    }
    return listens;
  };

  if (variant == ModelVariant::kManualModeration) {
    // Logged listens pass through untouched; each session's heard set
    // stands in for a list so diversity can still be measured.
    for (int g = 0; g < num_generations; ++g) {
      for (int i : sessions_by_generation[g]) {
        const SimSession& session = sessions[i];
        if (session.heard_items.empty()) continue;
        RankedList list;
        list.generated_at = g + 1;
        for (const std::string& item : session.heard_items) {
          list.positions.push_back(item);
          list.utilities.push_back(0.0);
          serving.credit(item);
        }
        outcome.lists.push_back(std::move(list));
      }
    }
    return outcome;
  }

  if (variant == ModelVariant::kRandomBaseline) {
    // The baseline ignores recommendations entirely: each generation's list
    // is drawn uniformly without replacement from the published catalog.
    std::vector<const Item*> universe;
    universe.reserve(catalog.size());
    for (const auto& [id, item] : catalog) universe.push_back(&item);
    for (int g = 0; g < num_generations; ++g) {
      SplitRng slot_rng = variant_rng.split(1000 + static_cast<std::uint64_t>(g));
      const std::int64_t now = generation_start_epoch(g);
      std::vector<int> available;
      for (std::size_t i = 0; i < universe.size(); ++i)
        if (universe[i]->created_at <= now) available.push_back(static_cast<int>(i));
      if (available.empty()) throw std::runtime_error("replay: no items published yet");
      const int n = std::min(schedule.list_length, static_cast<int>(available.size()));
      RankedList list;
      list.generated_at = g + 1;
      for (int r = 0; r < n; ++r) {
        const int j =
            r + static_cast<int>(slot_rng.next_below(available.size() - static_cast<std::size_t>(r)));
        std::swap(available[r], available[j]);
        list.positions.push_back(universe[available[r]]->item_id);
        list.utilities.push_back(0.0);
      }
      for (int i : sessions_by_generation[g]) serve(sessions[i], list, slot_rng);
      outcome.lists.push_back(std::move(list));
    }
    return outcome;
  }

  if (variant == ModelVariant::kUserPreference) {
    // Static preference order; the list only changes as new items publish.
    std::vector<std::pair<std::string, double>> order(pool.scores.begin(), pool.scores.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    for (int g = 0; g < num_generations; ++g) {
      SplitRng slot_rng = variant_rng.split(1000 + static_cast<std::uint64_t>(g));
      const std::int64_t now = generation_start_epoch(g);
      RankedList list;
      list.generated_at = g + 1;
      for (const auto& [item, score] : order) {
        if (static_cast<int>(list.positions.size()) >= schedule.list_length) break;
        if (catalog.at(item).created_at > now) continue;
        list.positions.push_back(item);
        list.utilities.push_back(score);
      }
      if (list.positions.empty()) throw std::runtime_error("replay: no items published yet");
      for (int i : sessions_by_generation[g]) serve(sessions[i], list, slot_rng);
      outcome.lists.push_back(std::move(list));
    }
    return outcome;
  }

  // Policy variants: derive the plan for this policy, then run the fairness
  // loop with the session stream as its feedback.
  const FairnessPolicy policy = policy_for(variant, options.min_share);
  std::map<std::string, double> shares = aspect_shares(policy, pool.beta);
  std::map<std::string, int> ratings;
  for (const std::string& item : pool.all_items()) ratings[item] = catalog.at(item).rating;
  const double inventory = total_inventory(traffic, schedule);
  outcome.plan = item_targets(shares, pool, policy.item_rule, inventory, ratings);
  DiversityConstraints constraints = derive_constraints(shares, schedule.list_length);

  ExposureLedger ledger(pool.all_items());
  auto available = [&](const std::string& item, int slot) {
    return catalog.at(item).created_at <= generation_start_epoch(slot - 1);
  };
  auto feedback = [&](int slot, const RankedList& list) {
    SplitRng slot_rng = variant_rng.split(1000 + static_cast<std::uint64_t>(slot - 1));
    std::vector<std::string> listens;
    for (int i : sessions_by_generation[slot - 1])
      for (std::string& item : serve(sessions[i], list, slot_rng))
        listens.push_back(std::move(item));
    if (options.checkpoint_interval > 0 && !options.checkpoint_path.empty() &&
        slot % options.checkpoint_interval == 0)
      write_file(options.checkpoint_path, ledger.serialize());
    return listens;
  };
  outcome.lists = long_term_fairness(pool, outcome.plan, ledger, constraints, num_generations,
                                     feedback, available);
  return outcome;
}

SyntheticWorkload generate_synthetic(const SyntheticWorkloadSpec& spec, std::uint64_t seed) {
  if (spec.aspects.empty()) throw std::runtime_error("generate_synthetic: no aspects");
  if (spec.num_users < 1) throw std::runtime_error("generate_synthetic: need users");
  if (spec.hours < 0) throw std::runtime_error("generate_synthetic: negative hours");
  if (spec.rank_reach_prob.empty() || spec.rank_reach_prob.front() != 1.0)
    throw std::runtime_error("generate_synthetic: rank_reach_prob must start at 1.0");
  for (std::size_t r = 1; r < spec.rank_reach_prob.size(); ++r)
    if (spec.rank_reach_prob[r] > spec.rank_reach_prob[r - 1])
      throw std::runtime_error("generate_synthetic: rank_reach_prob must be non-increasing");

  SyntheticWorkload workload;
  SplitRng master(seed);

  auto sample_rating = [](const std::array<double, 5>& weights, SplitRng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = rng.next_double() * total;
    for (int r = 0; r < 5; ++r) {
      u -= weights[r];
      if (u < 0) return r + 1;
    }
    return 5;
  };
  auto sample_score = [](const AspectSpec& aspect, SplitRng& rng) {
    const double score = aspect.score_mu + aspect.score_spread * (2.0 * rng.next_double() - 1.0);
    return std::clamp(score, 0.01, 0.99);
  };

  // Initial catalog at the start of the horizon.
  for (std::size_t ai = 0; ai < spec.aspects.size(); ++ai) {
    const AspectSpec& aspect = spec.aspects[ai];
    if (aspect.liked_items > aspect.catalog_items)
      throw std::runtime_error("generate_synthetic: more liked than catalog items");
    SplitRng aspect_rng = master.split(100 + ai);
    std::vector<int> liked_order(aspect.catalog_items);
    for (int i = 0; i < aspect.catalog_items; ++i) liked_order[i] = i;
    for (int i = 0; i + 1 < aspect.catalog_items; ++i) {
      int j = i + static_cast<int>(aspect_rng.next_below(
                      static_cast<std::uint64_t>(aspect.catalog_items - i)));
      std::swap(liked_order[i], liked_order[j]);
    }
    std::set<int> liked_set(liked_order.begin(), liked_order.begin() + aspect.liked_items);
    for (int i = 0; i < aspect.catalog_items; ++i) {
      Item item;
      char id[64];
      std::snprintf(id, sizeof(id), "it_a%zu_%04d", ai, i);
      item.item_id = id;
      item.topic = spec.topic;
      item.aspects = {aspect.name};
      item.rating = sample_rating(aspect.rating_weights, aspect_rng);
      item.contributor_id = "k_a" + std::to_string(ai);
      item.created_at = 0;
      const bool liked = liked_set.count(i) > 0;
      workload.liked[item.item_id] = liked;
      if (liked) workload.scores[item.item_id] = sample_score(aspect, aspect_rng);
      workload.items.push_back(std::move(item));
    }
  }

  // Fresh items arrive mid-horizon and publish at the next regeneration.
  SplitRng arrival_rng = master.split(2);
  double catalog_total = 0.0;
  for (const AspectSpec& aspect : spec.aspects) catalog_total += aspect.catalog_items;
  int arrival_seq = 0;
  for (int h = 0; h < spec.hours; ++h) {
    const int arrivals = arrival_rng.poisson(spec.item_arrival_rate);
    for (int a = 0; a < arrivals; ++a) {
      double u = arrival_rng.next_double() * catalog_total;
      std::size_t ai = 0;
      for (; ai + 1 < spec.aspects.size(); ++ai) {
        u -= spec.aspects[ai].catalog_items;
        if (u < 0) break;
      }
      const AspectSpec& aspect = spec.aspects[ai];
      Item item;
      char id[64];
      std::snprintf(id, sizeof(id), "it_n_%05d", arrival_seq++);
      item.item_id = id;
      item.topic = spec.topic;
      item.aspects = {aspect.name};
      item.rating = sample_rating(aspect.rating_weights, arrival_rng);
      item.contributor_id = "k_a" + std::to_string(ai);
      item.created_at = static_cast<std::int64_t>(h) * 3600 + 1800;
      const bool liked =
          aspect.catalog_items > 0 &&
          arrival_rng.next_double() <
              static_cast<double>(aspect.liked_items) / aspect.catalog_items;
      workload.liked[item.item_id] = liked;
      if (liked) workload.scores[item.item_id] = sample_score(aspect, arrival_rng);
      workload.items.push_back(std::move(item));
    }
  }

  // Calls: each user dials a Poisson number of times at uniform hours.
  std::vector<std::pair<std::int64_t, Item const*>> published;
  published.reserve(workload.items.size());
  for (const Item& item : workload.items) published.emplace_back(item.created_at, &item);
  std::sort(published.begin(), published.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  for (int u = 0; u < spec.num_users; ++u) {
    SplitRng user_rng = master.split(4000 + static_cast<std::uint64_t>(u));
    const int calls = user_rng.poisson(spec.calls_per_user_mean);
    for (int c = 0; c < calls; ++c) {
      if (spec.hours == 0) break;
      SimSession session;
      session.caller_id = "u" + std::to_string(u);
      const int hour = static_cast<int>(user_rng.next_below(spec.hours));
      session.timestamp = static_cast<std::int64_t>(hour) * 3600 +
                          static_cast<std::int64_t>(user_rng.next_below(3600));
      session.depth = sample_depth(spec.rank_reach_prob, user_rng);
      if (session.depth == 0) continue;

      std::size_t available = 0;
      while (available < published.size() &&
             published[available].first <= session.timestamp)
        ++available;
      std::vector<int> indices(available);
      for (std::size_t i = 0; i < available; ++i) indices[i] = static_cast<int>(i);
      const int heard = std::min(session.depth, static_cast<int>(available));
      for (int i = 0; i < heard; ++i) {
        int j = i + static_cast<int>(user_rng.next_below(available - static_cast<std::size_t>(i)));
        std::swap(indices[i], indices[j]);
        session.heard_items.push_back(published[indices[i]].second->item_id);
      }
      workload.sessions.push_back(std::move(session));
    }
  }
  std::stable_sort(workload.sessions.begin(), workload.sessions.end(),
                   [](const SimSession& a, const SimSession& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.caller_id < b.caller_id;
                   });

  if (!workload.sessions.empty()) {
    std::vector<SessionStub> stubs;
    stubs.reserve(workload.sessions.size());
    for (const SimSession& session : workload.sessions)
      stubs.push_back({session.caller_id, session.timestamp, session.depth});
    workload.traffic = estimate_traffic_from_stubs(stubs);
  }
  return workload;
}

RecommendedPool pool_from_workload(const SyntheticWorkload& workload, int cluster) {
  RecommendedPool pool;
  pool.cluster = cluster;
  if (!workload.items.empty()) pool.topic = workload.items[0].topic;
  for (const Item& item : workload.items) {
    auto liked = workload.liked.find(item.item_id);
    if (liked == workload.liked.end() || !liked->second) continue;
    pool.scores[item.item_id] = workload.scores.at(item.item_id);
    for (const std::string& aspect : item.aspects)
      pool.items_by_aspect[aspect].insert(item.item_id);
  }
  if (pool.scores.empty())
    throw std::runtime_error("pool_from_workload: the workload likes no items");
  double total = 0.0;
  for (const auto& [aspect, members] : pool.items_by_aspect)
    total += static_cast<double>(members.size());
  for (const auto& [aspect, members] : pool.items_by_aspect)
    pool.beta[aspect] = static_cast<double>(members.size()) / total;
  return pool;
}

std::map<std::pair<int, ModelVariant>, ExposureOutcome> run_comparison(
    const std::map<int, std::vector<SimSession>>& sessions_per_cluster,
    const std::map<int, RecommendedPool>& pools_per_cluster,
    const std::map<std::string, Item>& catalog, const TrafficProfile& traffic,
    const SlotSchedule& schedule, const std::vector<ModelVariant>& variants,
    const SimOptions& options, std::uint64_t master_seed) {
  if (variants.empty()) throw std::runtime_error("run_comparison: no variants");
  std::map<std::pair<int, ModelVariant>, ExposureOutcome> outcomes;
  for (const auto& [cluster, pool] : pools_per_cluster) {
    auto sessions_it = sessions_per_cluster.find(cluster);
    static const std::vector<SimSession> kNoSessions;
    const std::vector<SimSession>& sessions =
        sessions_it == sessions_per_cluster.end() ? kNoSessions : sessions_it->second;
    const std::uint64_t cluster_seed =
        derive_seed(master_seed, 7000 + static_cast<std::uint64_t>(cluster));
    for (ModelVariant variant : variants) {
      const std::uint64_t run_seed =
          derive_seed(cluster_seed, 100 + static_cast<std::uint64_t>(variant));
      SimOptions run_options = options;
      if (!options.checkpoint_path.empty())
        run_options.checkpoint_path = options.checkpoint_path + "." + to_string(variant) +
                                      "." + std::to_string(cluster) + ".csv";
      outcomes[{cluster, variant}] =
          replay(sessions, variant, pool, catalog, traffic, schedule, run_options, run_seed);
    }
  }
  return outcomes;
}

std::string serialize_outcome(const ExposureOutcome& outcome,
                              const std::map<std::string, Item>& catalog) {
  std::string out = "variant,cluster,item_id,aspect,exposure\n";
  const std::string variant = to_string(outcome.variant);
  const std::string cluster = std::to_string(outcome.cluster);
  for (const auto& [item, exposure] : outcome.exposure_by_item) {
    auto it = catalog.find(item);
    std::string aspects;
    if (it != catalog.end()) aspects = join(it->second.aspects, '|');
    out += variant + ',' + cluster + ',' + item + ',' + aspects + ',' +
           std::to_string(exposure) + '\n';
  }
  return out;
}

ExposureOutcome parse_outcome(const std::string& text) {
  ExposureOutcome outcome;
  bool header = true, first = true;
  for (std::string_view line_view : split(text, '\n')) {
    std::string_view line = trim(line_view);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 5) throw std::runtime_error("outcome file: bad row");
    if (first) {
      first = false;
      if (!try_parse_variant(trim(cells[0]), &outcome.variant))
        throw std::runtime_error("outcome file: unknown variant '" + cells[0] + "'");
      outcome.cluster = static_cast<int>(parse_int(trim(cells[1])));
    }
    const std::string item = std::string(trim(cells[0 + 2]));
    const long long exposure = parse_int(trim(cells[4]));
    outcome.exposure_by_item[item] = exposure;
    outcome.total_listens += exposure;
    for (const std::string& aspect : split(cells[3], '|'))
      if (!trim(aspect).empty())
        outcome.exposure_by_aspect[std::string(trim(aspect))] += exposure;
  }
  return outcome;
}

std::string serialize_lists(const ExposureOutcome& outcome,
                            const std::map<std::string, Item>& catalog) {
  std::string out = "slot,rank,item_id,aspect_list,utility_at_selection\n";
  for (const RankedList& list : outcome.lists) {
    for (std::size_t r = 0; r < list.positions.size(); ++r) {
      auto it = catalog.find(list.positions[r]);
      std::string aspects;
      if (it != catalog.end()) aspects = join(it->second.aspects, '|');
      out += std::to_string(list.generated_at) + ',' + std::to_string(r + 1) + ',' +
             list.positions[r] + ',' + aspects + ',' +
             format_double(r < list.utilities.size() ? list.utilities[r] : 0.0) + '\n';
    }
  }
  return out;
}

std::vector<RankedList> parse_lists(const std::string& text) {
  std::vector<RankedList> lists;
  bool header = true;
  std::size_t row = 0;
  for (std::string_view line_view : split(text, '\n')) {
    ++row;
    std::string_view line = trim(line_view);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 5)
      throw std::runtime_error("lists file row " + std::to_string(row) + ": expected 5 columns");
    const int slot = static_cast<int>(parse_int(trim(cells[0])));
    const int rank = static_cast<int>(parse_int(trim(cells[1])));
    // Several lists can share a slot (the manual variant records one per
    // session), so rank 1 starts a new list.
    if (rank == 1 || lists.empty()) {
      lists.emplace_back();
      lists.back().generated_at = slot;
    }
    lists.back().positions.emplace_back(trim(cells[2]));
    lists.back().utilities.push_back(parse_double(trim(cells[4])));
  }
  return lists;
}

}  // namespace fairexpo
