#include <tuple>

#include "doctest.h"
#include "fairexpo/clustering.hpp"

using namespace fairexpo;

namespace {

PreferenceVector vec2(double a, double b, bool heard_a = true, bool heard_b = true) {
  PreferenceVector v;
  v.entries[PrefKey{Source::kUser, "a"}] = PrefEntry{a, heard_a};
  v.entries[PrefKey{Source::kUser, "b"}] = PrefEntry{b, heard_b};
  return v;
}

// Three well-separated score blobs with four members each.
std::vector<PreferenceVector> three_blobs() {
  std::vector<PreferenceVector> vectors;
  for (double jitter : {-0.03, -0.01, 0.01, 0.03}) {
    vectors.push_back(vec2(0.9 + jitter, -0.9));
    vectors.push_back(vec2(-0.9, 0.9 + jitter));
    vectors.push_back(vec2(0.0 + jitter, 0.0));
  }
  return vectors;
}

}  // namespace

TEST_CASE("prototype distance mixes squared scores and indicator mismatches") {
  PreferenceVector x = vec2(1.0, 0.0, true, false);
  PreferenceVector y = vec2(0.5, 0.0, true, true);
  // Score term (1.0-0.5)^2 = 0.25, one heard mismatch.
  CHECK(prototype_distance(x, y, 2.0) == doctest::Approx(0.25 + 2.0));
  CHECK(prototype_distance(x, x, 2.0) == doctest::Approx(0.0));
  PreferenceVector z;
  z.entries[PrefKey{Source::kUser, "a"}] = PrefEntry{0, true};
  CHECK_THROWS(prototype_distance(x, z, 1.0));  // mismatched index
}

TEST_CASE("default gamma is half the mean score variance") {
  std::vector<PreferenceVector> vectors = {vec2(1.0, 0.0), vec2(-1.0, 0.0)};
  // Dimension a has variance 1 (population), dimension b has 0; mean 0.5.
  CHECK(default_gamma(vectors) == doctest::Approx(0.25));
}

TEST_CASE("k prototypes recovers separable blobs") {
  std::vector<PreferenceVector> vectors = three_blobs();
  ClusterAssignment result = k_prototypes(vectors, 3, 0.5, 7);

  REQUIRE(result.assignment.size() == vectors.size());
  REQUIRE(result.centroids.size() == 3);
  CHECK(result.iterations >= 1);

  // Members of the same blob must share a cluster; different blobs differ.
  // Blob of index i is i % 3 by construction.
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      if (i % 3 == j % 3)
        CHECK(result.assignment[i] == result.assignment[j]);
      else
        CHECK(result.assignment[i] != result.assignment[j]);
    }

  // Same seed, same result; the run is a pure function of its inputs.
  ClusterAssignment repeat = k_prototypes(vectors, 3, 0.5, 7);
  CHECK(repeat.assignment == result.assignment);
  CHECK(repeat.cost == result.cost);

  // Every cluster ends non-empty.
  std::vector<int> counts(3, 0);
  for (int c : result.assignment) ++counts[c];
  for (int count : counts) CHECK(count > 0);
}

TEST_CASE("k prototypes validates its inputs") {
  std::vector<PreferenceVector> vectors = {vec2(0, 0), vec2(1, 1)};
  CHECK_THROWS(k_prototypes(vectors, 0, 1.0, 1));
  CHECK_THROWS(k_prototypes(vectors, 3, 1.0, 1));   // k > n
  CHECK_THROWS(k_prototypes(vectors, 2, -1.0, 1));  // negative gamma
  CHECK_THROWS(k_prototypes({}, 1, 1.0, 1));
  std::vector<PreferenceVector> ragged = {vec2(0, 0), PreferenceVector{}};
  CHECK_THROWS(k_prototypes(ragged, 1, 1.0, 1));
}

TEST_CASE("cluster centroid takes score means and indicator modes") {
  std::vector<PreferenceVector> vectors = {vec2(1.0, 0.0, true, true),
                                           vec2(0.0, 0.0, true, false),
                                           vec2(0.5, 0.0, false, false)};
  ClusterAssignment assignment;
  assignment.assignment = {0, 0, 0};
  assignment.k = 1;
  PreferenceVector centroid = cluster_centroid(vectors, assignment, 0);
  CHECK(centroid.entries.at({Source::kUser, "a"}).score == doctest::Approx(0.5));
  // Two of three heard dimension a; one of three heard b.
  CHECK(centroid.entries.at({Source::kUser, "a"}).heard);
  CHECK_FALSE(centroid.entries.at({Source::kUser, "b"}).heard);

  // A tie votes heard.
  std::vector<PreferenceVector> tied = {vec2(0, 0, true, true), vec2(0, 0, false, false)};
  ClusterAssignment tied_assignment;
  tied_assignment.assignment = {0, 0};
  tied_assignment.k = 1;
  CHECK(cluster_centroid(tied, tied_assignment, 0).entries.at({Source::kUser, "a"}).heard);
}

TEST_CASE("elbow selection finds the knee of the cost curve") {
  std::vector<PreferenceVector> vectors = three_blobs();
  ElbowResult result = elbow_select_k(vectors, 2, 6, 0.5, 7);
  CHECK(result.chosen_k == 3);
  CHECK(result.curve.size() == 5);
  for (std::size_t i = 0; i < result.curve.size(); ++i)
    CHECK(result.curve[i].first == static_cast<int>(i) + 2);

  CHECK_THROWS(elbow_select_k(vectors, 1, 6, 0.5, 7));  // k_min below 2
  CHECK_THROWS(elbow_select_k(vectors, 2, 3, 0.5, 7));  // fewer than 3 candidates
}
