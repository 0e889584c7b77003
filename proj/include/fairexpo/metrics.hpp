#pragma once

#include <map>
#include <string>
#include <vector>

#include "fairexpo/ranker.hpp"

namespace fairexpo {

// Mean absolute pairwise difference over twice the mean; 0 is perfect
// equality. Input must hold at least one value and not be all zero.
double gini(const std::vector<double>& values);

// Points of the cumulative-share curve after sorting ascending, prefixed
// with (0, 0); always ends at (1, 1).
std::vector<std::pair<double, double>> lorenz_points(const std::vector<double>& values);

// Concentration of a list over aspect slots: each item contributes one
// slot per aspect it carries; HHI is the sum of squared aspect shares.
double hhi(const RankedList& list,
           const std::map<std::string, std::vector<std::string>>& aspect_map);

// Root-mean-square difference of per-item exposures over the union of both
// item universes, divided by the reference's mean per-item exposure.
double normalized_rmse(const std::map<std::string, long long>& outcome,
                       const std::map<std::string, long long>& reference);

// Per rating class: item exposures sorted ascending with the cumulative
// fraction of that class's items.
std::map<int, std::vector<std::pair<double, double>>> rating_exposure_cdf(
    const std::map<std::string, long long>& exposure, const std::map<std::string, int>& ratings);

struct QuartileSummary {
  double q1 = 0.0, median = 0.0, q3 = 0.0;
};
QuartileSummary quartiles(std::vector<double> values);

struct HhiDistribution {
  std::vector<double> values;  // one per generated list
  QuartileSummary summary;
};

struct MetricsReport {
  std::map<std::string, double> gini_by_variant;
  std::map<std::string, std::vector<std::pair<double, double>>> lorenz_by_variant;
  std::map<std::string, HhiDistribution> hhi_by_variant;
  // keyed (variant, cluster); absent entirely when the reference outcome
  // was not simulated
  std::map<std::pair<std::string, int>, double> nrmse_by_variant_cluster;
  std::map<std::string, std::map<int, std::vector<std::pair<double, double>>>> rating_cdf_by_variant;
  std::vector<std::string> notices;
};

enum class ReportFormat { kDelimited, kStructured };

// One file per metric family per variant, named
// <run_id>.<metric>.<variant>.txt, plus <run_id>.summary.txt.
void emit_report(const MetricsReport& report, const std::string& directory,
                 const std::string& run_id, ReportFormat format);

// Parsers for the emitted files (round-trip checks and downstream tools).
double parse_gini_file(const std::string& text);
std::vector<std::pair<double, double>> parse_lorenz_file(const std::string& text);
std::vector<double> parse_hhi_file(const std::string& text);
std::map<int, double> parse_nrmse_file(const std::string& text);
std::map<int, std::vector<std::pair<double, double>>> parse_rating_cdf_file(
    const std::string& text);

}  // namespace fairexpo
