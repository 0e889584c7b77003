#include "fairexpo/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "fairexpo/calllog.hpp"
#include "fairexpo/clustering.hpp"
#include "fairexpo/exposure.hpp"
#include "fairexpo/forest.hpp"
#include "fairexpo/metrics.hpp"
#include "fairexpo/prefs.hpp"
#include "fairexpo/recommend.hpp"
#include "fairexpo/simulate.hpp"
#include "fairexpo/textio.hpp"

namespace fairexpo {

namespace {

std::string artifact(const RunConfig& config, const std::string& name) {
  return config.output_dir() + "/" + name;
}

void ensure_output_dir(const RunConfig& config) {
  std::filesystem::create_directories(config.output_dir());
}

std::string require_artifact(const RunConfig& config, const std::string& name, int exit_code) {
  const std::string path = artifact(config, name);
  if (!file_exists(path))
    throw PipelineError(exit_code, "missing upstream artifact: " + path);
  return path;
}

std::vector<ListenEvent> load_events(const RunConfig& config, int exit_code) {
  const std::string path = require_artifact(config, "events.csv", exit_code);
  ParseResult parsed = parse_events(read_file(path));
  if (!parsed.rejected.empty())
    throw PipelineError(exit_code, path + ": " + to_string(parsed.rejected.front()));
  if (parsed.events.empty()) throw PipelineError(exit_code, path + ": no events");
  return std::move(parsed.events);
}

// user -> cluster from clusters.csv.
std::map<std::string, int> load_assignments(const std::string& path) {
  std::map<std::string, int> assignments;
  bool header = true;
  for (const std::string& raw : split(read_file(path), '\n')) {
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 2) throw std::runtime_error(path + ": expected user_id,cluster");
    assignments[std::string(trim(cells[0]))] = static_cast<int>(parse_int(trim(cells[1])));
  }
  return assignments;
}

std::map<int, PreferenceVector> load_centroids(const std::string& path) {
  std::map<int, PreferenceVector> centroids;
  bool header = true;
  for (const std::string& raw : split(read_file(path), '\n')) {
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 5)
      throw std::runtime_error(path + ": expected cluster,source,topic,score,heard");
    const int cluster = static_cast<int>(parse_int(trim(cells[0])));
    Source source;
    if (!try_parse_source(trim(cells[1]), &source))
      throw std::runtime_error(path + ": unknown source '" + cells[1] + "'");
    PrefKey key{source, std::string(trim(cells[2]))};
    PrefEntry entry{parse_double(trim(cells[3])), parse_int(trim(cells[4])) != 0};
    centroids[cluster].entries[key] = entry;
  }
  return centroids;
}

int cluster_count(const std::map<std::string, int>& assignments) {
  int k = 0;
  for (const auto& [user, cluster] : assignments) k = std::max(k, cluster + 1);
  return k;
}

// Flattened session-labeled events: (event, label) in session order.
struct LabeledEvents {
  std::vector<ListenEvent> events;
  std::vector<Interaction> labels;
};

LabeledEvents label_all(const std::vector<Session>& sessions, double threshold) {
  LabeledEvents out;
  for (const Session& session : sessions) {
    std::vector<Interaction> labels = label_session(session, threshold);
    for (std::size_t i = 0; i < session.events.size(); ++i) {
      out.events.push_back(session.events[i]);
      out.labels.push_back(labels[i]);
    }
  }
  return out;
}

std::vector<Item> load_items(const RunConfig& config, int exit_code) {
  const std::string path = config.require("paths.items");
  if (!file_exists(path)) throw PipelineError(exit_code, "missing item store: " + path);
  return parse_items(read_file(path));
}

}  // namespace

void cmd_ingest(const RunConfig& config) {
  const std::string logs_path = config.require("paths.logs");
  std::ifstream input(logs_path);
  if (!input) throw PipelineError(2, "cannot read call log: " + logs_path);

  ParseResult parsed;
  try {
    parsed = parse_call_logs(input, config.ingest_delimiter(), config.column_map());
  } catch (const std::exception& error) {
    throw PipelineError(2, logs_path + ": " + error.what());
  }
  for (const RowDiagnostic& diagnostic : parsed.rejected)
    std::cerr << "ingest: " << to_string(diagnostic) << '\n';
  if (parsed.events.empty())
    throw PipelineError(2, logs_path + ": no valid rows (" +
                               std::to_string(parsed.rejected.size()) + " rejected)");

  std::vector<Session> sessions = assemble_sessions(parsed.events);
  TrafficProfile traffic = estimate_traffic_profile(sessions);

  ensure_output_dir(config);
  write_file(artifact(config, "events.csv"), serialize_events(parsed.events));

  std::string session_rows = "call_id,caller_id,start_ts,depth\n";
  std::set<std::string> callers;
  for (const Session& session : sessions) {
    callers.insert(session.caller_id);
    session_rows += session.call_id + ',' + session.caller_id + ',' +
                    format_timestamp(session.start_ts) + ',' +
                    std::to_string(session.events.size()) + '\n';
  }
  write_file(artifact(config, "sessions.csv"), session_rows);
  write_file(artifact(config, "traffic.csv"), serialize_traffic(traffic));

  std::string summary;
  summary += "events_accepted = " + std::to_string(parsed.events.size()) + '\n';
  summary += "rows_rejected = " + std::to_string(parsed.rejected.size()) + '\n';
  summary += "sessions = " + std::to_string(sessions.size()) + '\n';
  summary += "callers = " + std::to_string(callers.size()) + '\n';
  write_file(artifact(config, "ingest_summary.txt"), summary);

  std::cout << "ingest: " << parsed.events.size() << " events, " << sessions.size()
            << " sessions, " << callers.size() << " callers ("
            << parsed.rejected.size() << " rows rejected)\n";
}

void cmd_cluster(const RunConfig& config) {
  std::vector<ListenEvent> events = load_events(config, 3);
  std::vector<Session> sessions = assemble_sessions(events);
  const double threshold = config.heard_threshold();

  const std::set<PrefKey> index = preference_index(events);
  std::map<std::string, UserStats> stats = build_user_stats(sessions, threshold, index);
  PreferenceVector global = global_preference_vector(sessions, threshold, index);

  std::vector<std::string> engaged;
  try {
    engaged = filter_engaged_users(stats, config.filter_thresholds(), global);
  } catch (const std::exception& error) {
    throw PipelineError(3, std::string("cluster: ") + error.what());
  }

  std::vector<PreferenceVector> vectors;
  vectors.reserve(engaged.size());
  for (const std::string& user : engaged) vectors.push_back(stats.at(user).prefs);

  const std::uint64_t seed = static_cast<std::uint64_t>(config.integer("clustering.seed", 1));
  double gamma;
  const std::string gamma_text = config.str("clustering.gamma", "auto");
  try {
    gamma = gamma_text == "auto" ? default_gamma(vectors) : parse_double(gamma_text);

    int k;
    std::string chosen_by;
    std::vector<std::pair<int, double>> curve;
    const std::string k_text = config.str("clustering.k", "5");
    if (k_text == "auto") {
      const int k_min = static_cast<int>(config.integer("clustering.k_min", 2));
      const int k_max = static_cast<int>(config.integer("clustering.k_max", 8));
      ElbowResult elbow = elbow_select_k(vectors, k_min, k_max, gamma, seed);
      k = elbow.chosen_k;
      curve = elbow.curve;
      chosen_by = "elbow";
    } else {
      k = static_cast<int>(parse_int(k_text));
      chosen_by = "explicit";
    }

    ClusterAssignment assignment = k_prototypes(vectors, k, gamma, seed);

    ensure_output_dir(config);
    std::string cluster_rows = "user_id,cluster\n";
    for (std::size_t i = 0; i < engaged.size(); ++i)
      cluster_rows += engaged[i] + ',' + std::to_string(assignment.assignment[i]) + '\n';
    write_file(artifact(config, "clusters.csv"), cluster_rows);

    std::string centroid_rows = "cluster,source,topic,score,heard\n";
    for (int c = 0; c < assignment.k; ++c)
      for (const auto& [key, entry] : assignment.centroids[c].entries)
        centroid_rows += std::to_string(c) + ',' + to_string(key.source) + ',' + key.topic +
                         ',' + format_double(entry.score) + ',' + (entry.heard ? "1" : "0") +
                         '\n';
    write_file(artifact(config, "centroids.csv"), centroid_rows);

    std::string meta;
    meta += "k = " + std::to_string(assignment.k) + '\n';
    meta += "chosen_by = " + chosen_by + '\n';
    meta += "gamma = " + format_double(gamma) + '\n';
    meta += "seed = " + std::to_string(seed) + '\n';
    meta += "cost = " + format_double(assignment.cost) + '\n';
    meta += "iterations = " + std::to_string(assignment.iterations) + '\n';
    meta += "engaged_users = " + std::to_string(engaged.size()) + '\n';
    for (const auto& [candidate, cost] : curve)
      meta += "curve." + std::to_string(candidate) + " = " + format_double(cost) + '\n';
    write_file(artifact(config, "cluster_meta.txt"), meta);

    std::cout << "cluster: " << engaged.size() << " engaged users into k=" << assignment.k
              << " (" << chosen_by << ", gamma=" << format_double(gamma) << ")\n";
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& error) {
    throw PipelineError(3, std::string("cluster: ") + error.what());
  }
}

void cmd_train(const RunConfig& config) {
  try {
    std::vector<ListenEvent> events = load_events(config, 1);
    const std::string clusters_path = require_artifact(config, "clusters.csv", 1);
    const std::string centroids_path = require_artifact(config, "centroids.csv", 1);
    std::map<std::string, int> assignments = load_assignments(clusters_path);
    std::map<int, PreferenceVector> centroids = load_centroids(centroids_path);
    const int k = cluster_count(assignments);

    const std::string topic = config.require("run.topic");
    std::vector<Item> all_items = load_items(config, 1);
    std::vector<Item> topic_items;
    for (const Item& item : all_items)
      if (item.topic == topic) topic_items.push_back(item);
    if (topic_items.empty())
      throw PipelineError(1, "train: no items for topic '" + topic + "'");
    std::sort(topic_items.begin(), topic_items.end(),
              [](const Item& a, const Item& b) { return a.item_id < b.item_id; });
    std::set<std::string> topic_ids;
    std::vector<std::string> topic_aspects;
    for (const Item& item : topic_items) {
      topic_ids.insert(item.item_id);
      for (const std::string& aspect : item.aspects) topic_aspects.push_back(aspect);
    }
    std::sort(topic_aspects.begin(), topic_aspects.end());
    topic_aspects.erase(std::unique(topic_aspects.begin(), topic_aspects.end()),
                        topic_aspects.end());

    const double threshold = config.heard_threshold();
    LabeledEvents labeled = label_all(assemble_sessions(events), threshold);

    // Per item, every (caller, interaction) on the topic's items; filtered
    // by cluster membership when labeling for one cluster.
    std::map<std::string, std::vector<std::pair<std::string, Interaction>>> interactions;
    std::map<std::string, std::vector<std::size_t>> by_caller;
    for (std::size_t i = 0; i < labeled.events.size(); ++i) {
      const ListenEvent& event = labeled.events[i];
      if (topic_ids.count(event.item_id))
        interactions[event.item_id].emplace_back(event.caller_id, labeled.labels[i]);
      by_caller[event.caller_id].push_back(i);
    }

    // Contributor listening vectors over the same index as the centroids.
    std::set<PrefKey> index;
    if (!centroids.empty())
      for (const auto& [key, entry] : centroids.begin()->second.entries) index.insert(key);
    std::map<std::string, PreferenceVector> contributor_vectors;
    for (const Item& item : topic_items) {
      if (contributor_vectors.count(item.contributor_id)) continue;
      auto it = by_caller.find(item.contributor_id);
      if (it == by_caller.end()) continue;
      std::vector<ListenEvent> own_events;
      std::vector<Interaction> own_labels;
      for (std::size_t i : it->second) {
        own_events.push_back(labeled.events[i]);
        own_labels.push_back(labeled.labels[i]);
      }
      contributor_vectors[item.contributor_id] =
          build_preference_vector(own_events, own_labels, index);
    }

    const std::string mode = config.str("classifier.mode", "ensemble");
    const std::uint64_t seed = static_cast<std::uint64_t>(config.integer("classifier.seed", 1));
    ensure_output_dir(config);

    for (int c = 0; c < k; ++c) {
      auto centroid_it = centroids.find(c);
      if (centroid_it == centroids.end())
        throw PipelineError(1, "train: no centroid for cluster " + std::to_string(c));
      const PreferenceVector& centroid = centroid_it->second;

      // Item labels from this cluster's members.
      std::map<std::string, ItemClusterLabel> item_labels;
      int excluded = 0;
      for (const Item& item : topic_items) {
        std::vector<std::pair<std::string, Interaction>> member_interactions;
        auto it = interactions.find(item.item_id);
        if (it != interactions.end())
          for (const auto& [user, interaction] : it->second) {
            auto assignment = assignments.find(user);
            if (assignment != assignments.end() && assignment->second == c)
              member_interactions.emplace_back(user, interaction);
          }
        std::optional<ItemClusterLabel> label = label_item_for_cluster(member_interactions);
        if (label.has_value())
          item_labels[item.item_id] = *label;
        else
          ++excluded;
      }
      if (item_labels.empty())
        throw PipelineError(1, "train: cluster " + std::to_string(c) +
                                   " has no labeled items for topic '" + topic + "'");

      auto features_of = [&](const Item& item) {
        auto vec = contributor_vectors.find(item.contributor_id);
        const double ctx = vec == contributor_vectors.end()
                               ? 0.0
                               : shared_context(vec->second, centroid);
        return build_feature_vector(item, topic_aspects, ctx);
      };

      std::unique_ptr<Model> model;
      std::string meta;
      if (mode == "oracle") {
        std::map<std::string, Prediction> by_item;
        for (const auto& [item_id, label] : item_labels)
          by_item[item_id] = Prediction{(label.score + 1.0) / 2.0, label.label};
        model = std::make_unique<OracleModel>(std::move(by_item));
        meta += "mode = oracle\n";
      } else if (mode == "ensemble") {
        std::vector<FeatureVector> features;
        std::vector<bool> labels;
        for (const Item& item : topic_items) {
          auto label = item_labels.find(item.item_id);
          if (label == item_labels.end()) continue;
          features.push_back(features_of(item));
          labels.push_back(label->second.label);
        }
        TrainResult result = train(features, labels, config.ensemble(), seed);
        meta += "mode = ensemble\n";
        meta += "n_train = " + std::to_string(result.n_train) + '\n';
        meta += "n_validation = " + std::to_string(result.n_validation) + '\n';
        if (result.validation_accuracy.has_value())
          meta += "validation_accuracy = " + format_double(*result.validation_accuracy) + '\n';
        model = std::move(result.model);
      } else {
        throw PipelineError(1, "train: unknown classifier.mode '" + mode + "'");
      }
      meta += "labeled_items = " + std::to_string(item_labels.size()) + '\n';
      meta += "excluded_items = " + std::to_string(excluded) + '\n';
      meta += "seed = " + std::to_string(seed) + '\n';

      RecommendedPool pool =
          recommended_pool(*model, topic_items, c, centroid, contributor_vectors);

      std::map<std::string, Prediction> predictions;
      for (const Item& item : topic_items) {
        if (!model->covers_item(item.item_id)) continue;
        predictions[item.item_id] = model->predict_item(item.item_id, features_of(item));
      }

      const std::string suffix = std::to_string(c);
      write_file(artifact(config, "model." + suffix + ".txt"), model->serialize());
      write_file(artifact(config, "pool." + suffix + ".csv"),
                 serialize_pool(topic_items, predictions));
      std::string beta_rows = "aspect,beta\n";
      for (const auto& [aspect, beta] : pool.beta)
        beta_rows += aspect + ',' + format_double(beta) + '\n';
      write_file(artifact(config, "beta." + suffix + ".csv"), beta_rows);
      write_file(artifact(config, "train_meta." + suffix + ".txt"), meta);

      std::cout << "train: cluster " << c << ": " << pool.all_items().size()
                << " pool items over " << pool.beta.size() << " aspects\n";
    }
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& error) {
    throw PipelineError(1, std::string("train: ") + error.what());
  }
}

void cmd_plan(const RunConfig& config) {
  try {
    const std::string traffic_path = require_artifact(config, "traffic.csv", 1);
    const std::string clusters_path = require_artifact(config, "clusters.csv", 1);
    TrafficProfile traffic = parse_traffic(read_file(traffic_path));
    const int k = cluster_count(load_assignments(clusters_path));
    const std::string topic = config.require("run.topic");

    std::map<std::string, int> ratings;
    for (const Item& item : load_items(config, 1)) ratings[item.item_id] = item.rating;

    const FairnessPolicy policy = config.policy();
    const SlotSchedule schedule = config.schedule();
    const double inventory = total_inventory(traffic, schedule);

    ensure_output_dir(config);
    for (int c = 0; c < k; ++c) {
      const std::string suffix = std::to_string(c);
      const std::string pool_path = require_artifact(config, "pool." + suffix + ".csv", 1);
      RecommendedPool pool = parse_pool(read_file(pool_path), topic, c);
      std::map<std::string, double> shares = aspect_shares(policy, pool.beta);
      ExposurePlan plan = item_targets(shares, pool, policy.item_rule, inventory, ratings);
      write_file(artifact(config, "plan." + suffix + ".txt"), serialize_plan(plan));
      std::cout << "plan: cluster " << c << ": inventory " << format_double(plan.inventory)
                << " over " << plan.targets.size() << " items\n";
    }
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& error) {
    throw PipelineError(1, std::string("plan: ") + error.what());
  }
}

void cmd_simulate(const RunConfig& config) {
  std::vector<ListenEvent> events = load_events(config, 4);
  const std::string clusters_path = require_artifact(config, "clusters.csv", 4);
  const std::string traffic_path = require_artifact(config, "traffic.csv", 4);
  try {
    std::map<std::string, int> assignments = load_assignments(clusters_path);
    TrafficProfile traffic = parse_traffic(read_file(traffic_path));
    const int k = cluster_count(assignments);
    const std::string topic = config.require("run.topic");

    std::map<std::string, Item> catalog;
    for (const Item& item : load_items(config, 4)) catalog[item.item_id] = item;

    std::map<int, RecommendedPool> pools;
    for (int c = 0; c < k; ++c) {
      const std::string suffix = std::to_string(c);
      const std::string pool_path = require_artifact(config, "pool." + suffix + ".csv", 4);
      require_artifact(config, "model." + suffix + ".txt", 4);
      require_artifact(config, "plan." + suffix + ".txt", 4);
      pools[c] = parse_pool(read_file(pool_path), topic, c);
    }

    std::map<int, std::vector<SimSession>> sessions_per_cluster;
    for (const Session& session : assemble_sessions(events)) {
      auto it = assignments.find(session.caller_id);
      if (it == assignments.end()) continue;  // not an engaged user
      SimSession sim;
      sim.caller_id = session.caller_id;
      sim.timestamp = session.start_ts;
      sim.depth = static_cast<int>(session.events.size());
      for (const ListenEvent& event : session.events) sim.heard_items.push_back(event.item_id);
      sessions_per_cluster[it->second].push_back(std::move(sim));
    }

    const std::vector<ModelVariant> variants = config.variants();
    SimOptions options = config.sim_options();
    if (options.checkpoint_interval > 0)
      options.checkpoint_path = artifact(config, "checkpoint");
    const std::uint64_t master_seed =
        static_cast<std::uint64_t>(config.integer("simulation.master_seed", 1));
    const SlotSchedule schedule = config.schedule();

    std::map<std::pair<int, ModelVariant>, ExposureOutcome> outcomes = run_comparison(
        sessions_per_cluster, pools, catalog, traffic, schedule, variants, options, master_seed);

    ensure_output_dir(config);
    std::string manifest;
    manifest += "run_id = " + config.run_id() + '\n';
    manifest += "config_hash = " + std::to_string(config.content_hash()) + '\n';
    manifest += "master_seed = " + std::to_string(master_seed) + '\n';
    manifest += std::string("depth_mode = ") +
                (options.depth_mode == DepthMode::kReplay ? "replay" : "sample") + '\n';
    std::vector<std::string> variant_names;
    for (ModelVariant variant : variants) variant_names.push_back(to_string(variant));
    manifest += "variants = " + join(variant_names, ',') + '\n';
    manifest += "clusters = " + std::to_string(k) + '\n';

    for (const auto& [key, outcome] : outcomes) {
      const std::string suffix = to_string(key.second) + "." + std::to_string(key.first);
      write_file(artifact(config, "outcome." + suffix + ".csv"),
                 serialize_outcome(outcome, catalog));
      write_file(artifact(config, "lists." + suffix + ".csv"),
                 serialize_lists(outcome, catalog));
      manifest += "seed." + suffix + " = " + std::to_string(outcome.seed) + '\n';
      manifest += "listens." + suffix + " = " + std::to_string(outcome.total_listens) + '\n';
      manifest +=
          "diagnostics." + suffix + " = " + std::to_string(outcome.diagnostics.size()) + '\n';
      for (const std::string& diagnostic : outcome.diagnostics)
        std::cerr << "simulate[" << suffix << "]: " << diagnostic << '\n';
    }
    write_file(artifact(config, "run_manifest.txt"), manifest);
    std::cout << "simulate: " << outcomes.size() << " runs (" << variant_names.size()
              << " variants x " << k << " clusters)\n";
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& error) {
    throw PipelineError(4, std::string("simulate: ") + error.what());
  }
}

void cmd_report(const RunConfig& config) {
  const std::string directory = config.output_dir();

  // Runs are discovered from the outcome files themselves so that report
  // works on any subset of variants.
  std::vector<std::string> outcome_names;
  if (std::filesystem::is_directory(directory))
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("outcome.", 0) == 0 && name.size() > 12 &&
          name.compare(name.size() - 4, 4, ".csv") == 0)
        outcome_names.push_back(name);
    }
  std::sort(outcome_names.begin(), outcome_names.end());
  if (outcome_names.empty())
    throw PipelineError(5, "no simulation outcomes in " + directory);

  try {
    std::map<std::string, Item> catalog;
    for (const Item& item : load_items(config, 5)) catalog[item.item_id] = item;
    std::map<std::string, std::vector<std::string>> aspect_map;
    for (const auto& [id, item] : catalog) aspect_map[id] = item.aspects;

    struct Run {
      std::string variant;
      int cluster = 0;
      ExposureOutcome outcome;
      std::vector<RankedList> lists;
    };
    std::vector<Run> runs;
    for (const std::string& name : outcome_names) {
      // The file name is the authority on (variant, cluster): an outcome
      // with zero listens has no data rows to recover them from.
      const std::vector<std::string> parts = split(name.substr(8, name.size() - 12), '.');
      ModelVariant variant;
      if (parts.size() != 2 || !try_parse_variant(parts[0], &variant)) continue;
      Run run;
      run.variant = parts[0];
      run.cluster = static_cast<int>(parse_int(parts[1]));
      run.outcome = parse_outcome(read_file(directory + "/" + name));
      const std::string lists_name = "lists." + name.substr(8);
      if (file_exists(directory + "/" + lists_name))
        run.lists = parse_lists(read_file(directory + "/" + lists_name));
      runs.push_back(std::move(run));
    }
    if (runs.empty()) throw PipelineError(5, "no simulation outcomes in " + directory);

    MetricsReport report;
    const bool per_item = config.flag("report.per_item_gini", false);

    std::set<std::string> variants;
    for (const Run& run : runs) variants.insert(run.variant);
    for (const std::string& variant : variants) {
      // Exposure totals across this variant's clusters.
      std::map<std::string, long long> by_aspect, by_item;
      std::vector<double> hhi_values;
      for (const Run& run : runs) {
        if (run.variant != variant) continue;
        for (const auto& [aspect, count] : run.outcome.exposure_by_aspect)
          by_aspect[aspect] += count;
        for (const auto& [item, count] : run.outcome.exposure_by_item)
          by_item[item] += count;
        for (const RankedList& list : run.lists) {
          bool known = !list.positions.empty();
          for (const std::string& item : list.positions)
            if (!aspect_map.count(item)) known = false;
          if (known)
            hhi_values.push_back(hhi(list, aspect_map));
          else
            report.notices.push_back("variant " + variant +
                                     ": list with unknown items skipped in hhi");
        }
      }

      const std::map<std::string, long long>& basis = per_item ? by_item : by_aspect;
      std::vector<double> values;
      for (const auto& [key, count] : basis) values.push_back(static_cast<double>(count));
      if (!values.empty() && std::any_of(values.begin(), values.end(),
                                         [](double v) { return v > 0; })) {
        report.gini_by_variant[variant] = gini(values);
        report.lorenz_by_variant[variant] = lorenz_points(values);
      } else {
        report.notices.push_back("variant " + variant + ": no exposure recorded");
      }

      if (!hhi_values.empty()) {
        HhiDistribution distribution;
        distribution.values = hhi_values;
        distribution.summary = quartiles(hhi_values);
        report.hhi_by_variant[variant] = distribution;
      }

      std::map<std::string, int> ratings;
      for (const auto& [item, count] : by_item) {
        auto it = catalog.find(item);
        if (it != catalog.end()) ratings[item] = it->second.rating;
      }
      if (!ratings.empty())
        report.rating_cdf_by_variant[variant] = rating_exposure_cdf(by_item, ratings);
    }

    // NRMSE against the UserPreference reference of the same cluster.
    const std::string reference_name = to_string(ModelVariant::kUserPreference);
    std::map<int, const Run*> references;
    for (const Run& run : runs)
      if (run.variant == reference_name) references[run.cluster] = &run;
    if (references.empty()) {
      report.notices.push_back("reference outcome missing; nrmse skipped");
    } else {
      for (const Run& run : runs) {
        if (run.variant == reference_name) continue;
        auto reference = references.find(run.cluster);
        if (reference == references.end()) {
          report.notices.push_back("variant " + run.variant + " cluster " +
                                   std::to_string(run.cluster) +
                                   ": no reference outcome; nrmse skipped");
          continue;
        }
        report.nrmse_by_variant_cluster[{run.variant, run.cluster}] = normalized_rmse(
            run.outcome.exposure_by_item, reference->second->outcome.exposure_by_item);
      }
    }

    const std::string format_name = config.str("report.format", "delimited");
    ReportFormat format;
    if (format_name == "delimited")
      format = ReportFormat::kDelimited;
    else if (format_name == "structured")
      format = ReportFormat::kStructured;
    else
      throw PipelineError(1, "report: unknown report.format '" + format_name + "'");

    emit_report(report, directory, config.run_id(), format);
    for (const std::string& notice : report.notices)
      std::cerr << "report: " << notice << '\n';
    std::cout << "report: " << directory << "/" << config.run_id() << ".summary.txt\n";
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& error) {
    throw PipelineError(1, std::string("report: ") + error.what());
  }
}

void cmd_all(const RunConfig& config) {
  cmd_ingest(config);
  cmd_cluster(config);
  cmd_train(config);
  cmd_plan(config);
  cmd_simulate(config);
  cmd_report(config);
}

}  // namespace fairexpo
