#include "fairexpo/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairexpo/rng.hpp"

namespace fairexpo {

namespace {

void require_shared_index(const std::vector<PreferenceVector>& vectors) {
  for (std::size_t i = 1; i < vectors.size(); ++i) {
    if (vectors[i].entries.size() != vectors[0].entries.size() ||
        !std::equal(vectors[i].entries.begin(), vectors[i].entries.end(),
                    vectors[0].entries.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; }))
      throw std::runtime_error("clustering: vectors must share one index set");
  }
}

}  // namespace

double default_gamma(const std::vector<PreferenceVector>& vectors) {
  if (vectors.empty()) return 1.0;
  require_shared_index(vectors);
  const std::size_t dims = vectors[0].entries.size();
  if (dims == 0) return 1.0;
  double variance_sum = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    double mean = 0.0, mean_sq = 0.0;
    for (const PreferenceVector& v : vectors) {
      auto it = std::next(v.entries.begin(), static_cast<long>(d));
      mean += it->second.score;
      mean_sq += it->second.score * it->second.score;
    }
    mean /= static_cast<double>(vectors.size());
    mean_sq /= static_cast<double>(vectors.size());
    variance_sum += std::max(mean_sq - mean * mean, 0.0);
  }
  double gamma = 0.5 * variance_sum / static_cast<double>(dims);
  return gamma > 0 ? gamma : 1.0;
}

double prototype_distance(const PreferenceVector& a, const PreferenceVector& b, double gamma) {
  if (a.entries.size() != b.entries.size())
    throw std::runtime_error("prototype_distance: dimension mismatch");
  double numeric = 0.0;
  double mismatch = 0.0;
  auto ita = a.entries.begin();
  auto itb = b.entries.begin();
  for (; ita != a.entries.end(); ++ita, ++itb) {
    if (ita->first != itb->first)
      throw std::runtime_error("prototype_distance: index mismatch");
    const double diff = ita->second.score - itb->second.score;
    numeric += diff * diff;
    if (ita->second.heard != itb->second.heard) mismatch += 1.0;
  }
  return numeric + gamma * mismatch;
}

namespace {

PreferenceVector mean_mode_centroid(const std::vector<PreferenceVector>& vectors,
                                    const std::vector<int>& members) {
  PreferenceVector centroid = vectors[members[0]];
  std::size_t dims = centroid.entries.size();
  std::vector<double> score_sum(dims, 0.0);
  std::vector<int> heard_votes(dims, 0);
  for (int m : members) {
    std::size_t d = 0;
    for (const auto& [key, entry] : vectors[m].entries) {
      score_sum[d] += entry.score;
      heard_votes[d] += entry.heard ? 1 : 0;
      ++d;
    }
  }
  std::size_t d = 0;
  for (auto& [key, entry] : centroid.entries) {
    entry.score = score_sum[d] / static_cast<double>(members.size());
    // Majority vote; an exact tie counts as heard.
    entry.heard = 2 * heard_votes[d] >= static_cast<int>(members.size());
    ++d;
  }
  return centroid;
}

}  // namespace

ClusterAssignment k_prototypes(const std::vector<PreferenceVector>& vectors, int k,
                               double gamma, std::uint64_t seed) {
  const int n = static_cast<int>(vectors.size());
  if (k < 1) throw std::runtime_error("k_prototypes: k must be >= 1");
  if (k > n) throw std::runtime_error("k_prototypes: k exceeds the number of vectors");
  if (gamma < 0) throw std::runtime_error("k_prototypes: gamma must be >= 0");
  require_shared_index(vectors);

  // Seeded draw of k distinct starting points.
  SplitRng rng(seed);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = 0; i < k; ++i) {
    int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(order[i], order[j]);
  }
  std::vector<PreferenceVector> centroids;
  centroids.reserve(k);
  for (int i = 0; i < k; ++i) centroids.push_back(vectors[order[i]]);

  constexpr int kMaxIterations = 100;
  std::vector<int> assignment(n, -1);
  int iterations = 0;
  for (; iterations < kMaxIterations; ++iterations) {
    bool changed = false;
    // Assign each vector to its nearest centroid (ties to the lowest index).
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_distance = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double distance = prototype_distance(vectors[i], centroids[c], gamma);
        if (distance < best_distance) {
          best_distance = distance;
          best = c;
        }
      }
      if (assignment[i] != best) {
        assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    std::vector<std::vector<int>> members(k);
    for (int i = 0; i < n; ++i) members[assignment[i]].push_back(i);

    // Re-seed an emptied cluster from the point farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      if (!members[c].empty()) continue;
      int farthest = -1;
      double farthest_distance = -1.0;
      for (int i = 0; i < n; ++i) {
        if (members[assignment[i]].size() <= 1) continue;
        double distance = prototype_distance(vectors[i], centroids[assignment[i]], gamma);
        if (distance > farthest_distance) {
          farthest_distance = distance;
          farthest = i;
        }
      }
      if (farthest < 0) throw std::runtime_error("k_prototypes: cannot refill empty cluster");
      auto& old_members = members[assignment[farthest]];
      old_members.erase(std::find(old_members.begin(), old_members.end(), farthest));
      assignment[farthest] = c;
      members[c].push_back(farthest);
    }

    for (int c = 0; c < k; ++c) centroids[c] = mean_mode_centroid(vectors, members[c]);
  }

  ClusterAssignment result;
  result.assignment = std::move(assignment);
  result.centroids = std::move(centroids);
  result.k = k;
  result.iterations = iterations;
  for (int i = 0; i < n; ++i)
    result.cost += prototype_distance(vectors[i], result.centroids[result.assignment[i]], gamma);
  return result;
}

PreferenceVector cluster_centroid(const std::vector<PreferenceVector>& vectors,
                                  const ClusterAssignment& assignment, int cluster) {
  if (cluster < 0 || cluster >= assignment.k)
    throw std::runtime_error("cluster_centroid: cluster index out of range");
  std::vector<int> members;
  for (std::size_t i = 0; i < assignment.assignment.size(); ++i)
    if (assignment.assignment[i] == cluster) members.push_back(static_cast<int>(i));
  if (members.empty()) throw std::runtime_error("cluster_centroid: cluster is empty");
  return mean_mode_centroid(vectors, members);
}

ElbowResult elbow_select_k(const std::vector<PreferenceVector>& vectors, int k_min, int k_max,
                           double gamma, std::uint64_t seed) {
  if (k_min < 2)
    throw std::runtime_error("elbow_select_k: range must start at k >= 2 "
                             "(inter-centroid distance is undefined for k = 1)");
  k_max = std::min(k_max, static_cast<int>(vectors.size()));
  if (k_max - k_min < 2)
    throw std::runtime_error("elbow_select_k: need at least three candidate k values");

  ElbowResult result;
  for (int k = k_min; k <= k_max; ++k) {
    ClusterAssignment clusters = k_prototypes(vectors, k, gamma, seed);
    double within = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i)
      within += prototype_distance(vectors[i], clusters.centroids[clusters.assignment[i]], gamma);
    within /= static_cast<double>(vectors.size());
    double inter = 0.0;
    int pairs = 0;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) {
        inter += prototype_distance(clusters.centroids[a], clusters.centroids[b], gamma);
        ++pairs;
      }
    inter /= static_cast<double>(pairs);
    if (inter <= 0) inter = std::numeric_limits<double>::min();
    result.curve.emplace_back(k, within / inter);
  }

  double best_bend = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < result.curve.size(); ++i) {
    double bend = result.curve[i - 1].second - 2.0 * result.curve[i].second +
                  result.curve[i + 1].second;
    if (bend > best_bend) {
      best_bend = bend;
      result.chosen_k = result.curve[i].first;
    }
  }
  return result;
}

}  // namespace fairexpo
