#pragma once

#include <optional>
#include <string>
#include <vector>

#include "recoding/metrics/clustering.hpp"
#include "recoding/providers/judge.hpp"

namespace recoding::metrics {

struct GrowthPoint {
  std::size_t run_index = 0;  // 1-based
  std::size_t clusters = 0;
};

struct GrowthCurve {
  std::vector<GrowthPoint> points;
  std::string label;

  std::size_t final_count() const noexcept { return points.empty() ? 0 : points.back().clusters; }
};

// Point k is the cluster count over all ideas of runs 1..k, in order.
GrowthCurve growth_curve(const std::vector<std::vector<Item>>& batches, const ClusterParams& params);

struct JudgeAggregate {
  std::optional<double> relevance;
  std::optional<double> diversity;
  std::size_t relevance_samples = 0;
  std::size_t diversity_samples = 0;
};

// Points: irrelevant 0, partially relevant 1, relevant 1; almost identical 0,
// partially similar 1, mostly different 2 (then halved). A scale with no
// verdicts is left empty.
JudgeAggregate aggregate_judgments(const std::vector<providers::Verdict>& verdicts);

// Fraction of sets whose m ideas fall into m distinct greedy-cosine clusters.
// Throws InvalidRequest when a set does not hold exactly m ideas.
double distinct_count(const std::vector<std::vector<Embedding>>& sets, std::size_t m,
                      double threshold);

}  // namespace recoding::metrics
