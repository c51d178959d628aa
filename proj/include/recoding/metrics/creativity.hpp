#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recoding/metrics/clustering.hpp"

namespace recoding::metrics {

struct CoverageParams {
  double percentile = 95.0;
  std::size_t iterations = 50;
  std::uint64_t seed = 0;

  // Throws ConfigError unless percentile is in (0,100] and iterations >= 1.
  void validate() const;
};

struct CoverageReport {
  double point = 0.0;  // percent covered on the full from-set
  double mean = 0.0;   // bootstrap mean
  double p25 = 0.0;
  double p75 = 0.0;
  double threshold = 0.0;
  std::string from;
  std::string to;
  bool degenerate_reference = false;
  std::uint64_t seed = 0;
};

// Linear interpolation between closest ranks, p in [0,100].
double percentile(std::vector<double> values, double p);

// Distance from each point to its nearest other point in the same set.
std::vector<double> internal_nn_distances(const std::vector<Embedding>& points);

// Percent of `from` points whose nearest neighbour in `to` lies within the
// adaptive threshold of `to`. A singleton `to` gets threshold 0.
CoverageReport coverage(const std::vector<Embedding>& from, const std::vector<Embedding>& to,
                        const CoverageParams& params, std::string from_label = "from",
                        std::string to_label = "to");

CoverageReport coverage(const ClusterSet& from, const ClusterSet& to, const CoverageParams& params,
                        std::string from_label = "from", std::string to_label = "to");

// Value k is the distance from centroid k to the closest of centroids
// 0..k-1. The first centroid has no value, so the result has size n-1.
std::vector<double> nearest_prior_distance(const std::vector<Embedding>& stream);

}  // namespace recoding::metrics
