#pragma once

#include <cstdint>
#include <vector>

#include "fairexpo/prefs.hpp"

namespace fairexpo {

struct ClusterAssignment {
  std::vector<int> assignment;  // vector index -> cluster in 0..k-1
  std::vector<PreferenceVector> centroids;
  int k = 0;
  double cost = 0.0;  // numeric + gamma * categorical objective
  int iterations = 0;
};

// Half the mean per-dimension variance of the score components; the
// standard balance between numeric and categorical terms.
double default_gamma(const std::vector<PreferenceVector>& vectors);

// Squared Euclidean distance on scores plus gamma times the indicator
// mismatch count.
double prototype_distance(const PreferenceVector& a, const PreferenceVector& b, double gamma);

// Lloyd-style alternation with mean centroids for scores and mode centroids
// for indicators (ties vote true). An emptied cluster is re-seeded from the
// point farthest from its centroid. Deterministic given seed.
ClusterAssignment k_prototypes(const std::vector<PreferenceVector>& vectors, int k,
                               double gamma, std::uint64_t seed);

PreferenceVector cluster_centroid(const std::vector<PreferenceVector>& vectors,
                                  const ClusterAssignment& assignment, int cluster);

struct ElbowResult {
  int chosen_k = 0;
  std::vector<std::pair<int, double>> curve;  // (k, cost) for each candidate
};

// Cost per k = mean within-cluster distance to centroid divided by mean
// pairwise inter-centroid distance; the elbow is the k with the maximum
// second difference of the curve. k_range must start at 2 or above and
// span at least three candidates.
ElbowResult elbow_select_k(const std::vector<PreferenceVector>& vectors, int k_min, int k_max,
                           double gamma, std::uint64_t seed);

}  // namespace fairexpo
