#include "recoding/metrics/creativity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recoding/error.hpp"
#include "recoding/vocab/sampler.hpp"

namespace recoding::metrics {
namespace {

double nn_distance(const Embedding& x, const std::vector<Embedding>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : set) best = std::min(best, euclidean(x, y));
  return best;
}

double percent_covered(const std::vector<bool>& covered, const std::vector<std::size_t>& picks) {
  std::size_t hits = 0;
  for (auto i : picks) hits += covered[i] ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(picks.size());
}

}  // namespace

void CoverageParams::validate() const {
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    throw Error(ErrorCode::kConfigError, "coverage percentile must lie in (0,100]");
  }
  if (iterations < 1) throw Error(ErrorCode::kConfigError, "coverage needs at least one iteration");
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kInvalidRequest, "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

std::vector<double> internal_nn_distances(const std::vector<Embedding>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i != j) best = std::min(best, euclidean(points[i], points[j]));
    }
    out.push_back(best);
  }
  return out;
}

CoverageReport coverage(const std::vector<Embedding>& from, const std::vector<Embedding>& to,
                        const CoverageParams& params, std::string from_label,
                        std::string to_label) {
  params.validate();
  if (from.empty() || to.empty()) {
    throw Error(ErrorCode::kInvalidRequest, "coverage needs non-empty sets");
  }
  CoverageReport report;
  report.from = std::move(from_label);
  report.to = std::move(to_label);
  report.seed = params.seed;
  if (to.size() < 2) {
    report.degenerate_reference = true;
    report.threshold = 0.0;
  } else {
    report.threshold = percentile(internal_nn_distances(to), params.percentile);
  }

  std::vector<bool> covered(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    covered[i] = nn_distance(from[i], to) <= report.threshold;
  }
  std::vector<std::size_t> all(from.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  report.point = percent_covered(covered, all);

  vocab::SeededSampler sampler(params.seed, "coverage/" + report.from + "->" + report.to);
  std::vector<double> samples;
  samples.reserve(params.iterations);
  std::vector<std::size_t> picks(from.size());
  for (std::size_t it = 0; it < params.iterations; ++it) {
    for (auto& p : picks) p = static_cast<std::size_t>(sampler.next_below(from.size()));
    samples.push_back(percent_covered(covered, picks));
  }
  double sum = 0.0;
  for (double s : samples) sum += s;
  report.mean = sum / static_cast<double>(samples.size());
  report.p25 = percentile(samples, 25.0);
  report.p75 = percentile(samples, 75.0);
  return report;
}

CoverageReport coverage(const ClusterSet& from, const ClusterSet& to, const CoverageParams& params,
                        std::string from_label, std::string to_label) {
  return coverage(from.centroids(), to.centroids(), params, std::move(from_label),
                  std::move(to_label));
}

std::vector<double> nearest_prior_distance(const std::vector<Embedding>& stream) {
  std::vector<double> out;
  if (stream.size() < 2) return out;
  out.reserve(stream.size() - 1);
  for (std::size_t k = 1; k < stream.size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) best = std::min(best, euclidean(stream[k], stream[j]));
    out.push_back(best);
  }
  return out;
}

}  // namespace recoding::metrics
