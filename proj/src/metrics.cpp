#include "fairexpo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "fairexpo/textio.hpp"

namespace fairexpo {

namespace {

void require_usable(const std::vector<double>& values, const char* op) {
  if (values.empty()) throw std::runtime_error(std::string(op) + ": empty input");
  double total = 0.0;
  for (double v : values) {
    if (v < 0) throw std::runtime_error(std::string(op) + ": negative value");
    total += v;
  }
  if (total == 0.0) throw std::runtime_error(std::string(op) + ": all values are zero");
}

}  // namespace

double gini(const std::vector<double>& values) {
  require_usable(values, "gini");
  // Sorting turns the pairwise-difference sum into a weighted prefix sum.
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double total = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * sorted[i];
  }
  return weighted / (n * total);
}

std::vector<std::pair<double, double>> lorenz_points(const std::vector<double>& values) {
  require_usable(values, "lorenz_points");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double v : sorted) total += v;
  std::vector<std::pair<double, double>> points;
  points.reserve(sorted.size() + 1);
  points.emplace_back(0.0, 0.0);
  double running = 0.0;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    running += sorted[i];
    points.emplace_back(static_cast<double>(i + 1) / n, running / total);
  }
  points.back().second = 1.0;  // guard the terminal point against rounding
  return points;
}

double hhi(const RankedList& list,
           const std::map<std::string, std::vector<std::string>>& aspect_map) {
  if (list.positions.empty()) throw std::runtime_error("hhi: empty list");
  std::map<std::string, int> slots;
  int total = 0;
  for (const std::string& item : list.positions) {
    auto it = aspect_map.find(item);
    if (it == aspect_map.end())
      throw std::runtime_error("hhi: item '" + item + "' has no aspects");
    for (const std::string& aspect : it->second) {
      ++slots[aspect];
      ++total;
    }
  }
  if (total == 0) throw std::runtime_error("hhi: list has no aspect slots");
  // Integer squares with a single division keep round counts exact
  // (e.g. five aspects over ten slots is 20/100, not five rounded squares).
  long long squares = 0;
  for (const auto& [aspect, count] : slots)
    squares += static_cast<long long>(count) * count;
  return static_cast<double>(squares) /
         (static_cast<double>(total) * static_cast<double>(total));
}

double normalized_rmse(const std::map<std::string, long long>& outcome,
                       const std::map<std::string, long long>& reference) {
  std::set<std::string> universe;
  for (const auto& [item, e] : outcome) universe.insert(item);
  for (const auto& [item, e] : reference) universe.insert(item);
  if (universe.empty()) throw std::runtime_error("normalized_rmse: empty item universe");

  double reference_total = 0.0;
  for (const auto& [item, e] : reference) reference_total += static_cast<double>(e);
  const double reference_mean = reference_total / static_cast<double>(universe.size());
  if (reference_mean == 0.0)
    throw std::runtime_error("normalized_rmse: reference mean exposure is zero");

  double squared = 0.0;
  for (const std::string& item : universe) {
    auto a = outcome.find(item);
    auto b = reference.find(item);
    const double diff = static_cast<double>(a == outcome.end() ? 0 : a->second) -
                        static_cast<double>(b == reference.end() ? 0 : b->second);
    squared += diff * diff;
  }
  return std::sqrt(squared / static_cast<double>(universe.size())) / reference_mean;
}

std::map<int, std::vector<std::pair<double, double>>> rating_exposure_cdf(
    const std::map<std::string, long long>& exposure,
    const std::map<std::string, int>& ratings) {
  std::map<int, std::vector<double>> by_rating;
  for (const auto& [item, rating] : ratings) {
    auto it = exposure.find(item);
    by_rating[rating].push_back(static_cast<double>(it == exposure.end() ? 0 : it->second));
  }
  std::map<int, std::vector<std::pair<double, double>>> cdfs;
  for (auto& [rating, values] : by_rating) {
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>>& cdf = cdfs[rating];
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      cdf.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return cdfs;
}

QuartileSummary quartiles(std::vector<double> values) {
  if (values.empty()) throw std::runtime_error("quartiles: empty input");
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double h = p * (static_cast<double>(values.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

namespace {

std::string delimiter_for(ReportFormat format) {
  return format == ReportFormat::kDelimited ? "," : "=";
}

std::vector<std::vector<std::string>> parse_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  bool header = true;
  for (std::string_view line_view : split(text, '\n')) {
    std::string_view line = trim(line_view);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const char delimiter = line.find(',') != std::string_view::npos ? ',' : '=';
    std::vector<std::string> cells = split(line, delimiter);
    for (std::string& cell : cells) cell = std::string(trim(cell));
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

void emit_report(const MetricsReport& report, const std::string& directory,
                 const std::string& run_id, ReportFormat format) {
  const std::string d = delimiter_for(format);
  auto path = [&](const std::string& metric, const std::string& variant) {
    return directory + "/" + run_id + "." + metric + "." + variant + ".txt";
  };

  for (const auto& [variant, value] : report.gini_by_variant)
    write_file(path("gini", variant),
               "variant" + d + "gini\n" + variant + d + format_double(value) + '\n');

  for (const auto& [variant, points] : report.lorenz_by_variant) {
    std::string out = "population_fraction" + d + "exposure_fraction\n";
    for (const auto& [x, y] : points)
      out += format_double(x) + d + format_double(y) + '\n';
    write_file(path("lorenz", variant), out);
  }

  for (const auto& [variant, distribution] : report.hhi_by_variant) {
    std::string out = "list_index" + d + "hhi\n";
    for (std::size_t i = 0; i < distribution.values.size(); ++i)
      out += std::to_string(i + 1) + d + format_double(distribution.values[i]) + '\n';
    write_file(path("hhi", variant), out);
  }

  std::map<std::string, std::string> nrmse_files;
  for (const auto& [key, value] : report.nrmse_by_variant_cluster) {
    std::string& out = nrmse_files[key.first];
    if (out.empty()) out = "cluster" + d + "nrmse\n";
    out += std::to_string(key.second) + d + format_double(value) + '\n';
  }
  for (const auto& [variant, content] : nrmse_files)
    write_file(path("nrmse", variant), content);

  for (const auto& [variant, cdfs] : report.rating_cdf_by_variant) {
    std::string out = "rating" + d + "exposure" + d + "cumulative_fraction\n";
    for (const auto& [rating, points] : cdfs)
      for (const auto& [exposure, fraction] : points)
        out += std::to_string(rating) + d + format_double(exposure) + d +
               format_double(fraction) + '\n';
    write_file(path("ratingcdf", variant), out);
  }

  // Summary mirrors the comparison table: one row per variant.
  std::string summary = "run_id " + run_id + "\n";
  for (const std::string& notice : report.notices) summary += "notice " + notice + "\n";
  summary += "columns variant gini hhi_q1 hhi_median hhi_q3 nrmse_mean\n";
  std::set<std::string> variants;
  for (const auto& [variant, value] : report.gini_by_variant) variants.insert(variant);
  for (const auto& [variant, value] : report.hhi_by_variant) variants.insert(variant);
  for (const std::string& variant : variants) {
    summary += "row " + variant;
    auto g = report.gini_by_variant.find(variant);
    summary += ' ' + (g == report.gini_by_variant.end() ? std::string("-")
                                                        : format_double(g->second));
    auto h = report.hhi_by_variant.find(variant);
    if (h == report.hhi_by_variant.end()) {
      summary += " - - -";
    } else {
      summary += ' ' + format_double(h->second.summary.q1) + ' ' +
                 format_double(h->second.summary.median) + ' ' +
                 format_double(h->second.summary.q3);
    }
    double nrmse_sum = 0.0;
    int nrmse_count = 0;
    for (const auto& [key, value] : report.nrmse_by_variant_cluster) {
      if (key.first == variant) {
        nrmse_sum += value;
        ++nrmse_count;
      }
    }
    summary += nrmse_count == 0 ? std::string(" -")
                                : ' ' + format_double(nrmse_sum / nrmse_count);
    summary += '\n';
  }
  write_file(directory + "/" + run_id + ".summary.txt", summary);
}

double parse_gini_file(const std::string& text) {
  for (const auto& cells : parse_rows(text))
    if (cells.size() == 2) return parse_double(cells[1]);
  throw std::runtime_error("gini file: no value row");
}

std::vector<std::pair<double, double>> parse_lorenz_file(const std::string& text) {
  std::vector<std::pair<double, double>> points;
  for (const auto& cells : parse_rows(text)) {
    if (cells.size() != 2) throw std::runtime_error("lorenz file: bad row");
    points.emplace_back(parse_double(cells[0]), parse_double(cells[1]));
  }
  return points;
}

std::vector<double> parse_hhi_file(const std::string& text) {
  std::vector<double> values;
  for (const auto& cells : parse_rows(text)) {
    if (cells.size() != 2) throw std::runtime_error("hhi file: bad row");
    values.push_back(parse_double(cells[1]));
  }
  return values;
}

std::map<int, double> parse_nrmse_file(const std::string& text) {
  std::map<int, double> by_cluster;
  for (const auto& cells : parse_rows(text)) {
    if (cells.size() != 2) throw std::runtime_error("nrmse file: bad row");
    by_cluster[static_cast<int>(parse_int(cells[0]))] = parse_double(cells[1]);
  }
  return by_cluster;
}

std::map<int, std::vector<std::pair<double, double>>> parse_rating_cdf_file(
    const std::string& text) {
  std::map<int, std::vector<std::pair<double, double>>> cdfs;
  for (const auto& cells : parse_rows(text)) {
    if (cells.size() != 3) throw std::runtime_error("rating cdf file: bad row");
    cdfs[static_cast<int>(parse_int(cells[0]))].emplace_back(parse_double(cells[1]),
                                                             parse_double(cells[2]));
  }
  return cdfs;
}

}  // namespace fairexpo
