#include "recoding/metrics/diversity.hpp"

#include "recoding/error.hpp"

namespace recoding::metrics {

GrowthCurve growth_curve(const std::vector<std::vector<Item>>& batches,
                         const ClusterParams& params) {
  params.validate();
  GrowthCurve curve;
  curve.label = params.label();
  if (params.method == ClusterMethod::kEmbeddingCosine) {
    GreedyCosineClusterer g(params.threshold);
    for (std::size_t k = 0; k < batches.size(); ++k) {
      for (const auto& item : batches[k]) g.add(item.embedding);
      curve.points.push_back({k + 1, g.cluster_count()});
    }
    return curve;
  }
  std::vector<Item> prefix;
  for (std::size_t k = 0; k < batches.size(); ++k) {
    prefix.insert(prefix.end(), batches[k].begin(), batches[k].end());
    curve.points.push_back({k + 1, prefix.empty() ? 0 : cluster(prefix, params).size()});
  }
  return curve;
}

JudgeAggregate aggregate_judgments(const std::vector<providers::Verdict>& verdicts) {
  using providers::Verdict;
  JudgeAggregate agg;
  double relevance_points = 0.0;
  double diversity_points = 0.0;
  for (auto v : verdicts) {
    switch (v) {
      case Verdict::kIrrelevant: ++agg.relevance_samples; break;
      case Verdict::kPartiallyRelevant:
      case Verdict::kRelevant:
        ++agg.relevance_samples;
        relevance_points += 1.0;
        break;
      case Verdict::kAlmostIdentical: ++agg.diversity_samples; break;
      case Verdict::kPartiallySimilar:
        ++agg.diversity_samples;
        diversity_points += 1.0;
        break;
      case Verdict::kMostlyDifferent:
        ++agg.diversity_samples;
        diversity_points += 2.0;
        break;
    }
  }
  if (agg.relevance_samples > 0) {
    agg.relevance = relevance_points / static_cast<double>(agg.relevance_samples);
  }
  if (agg.diversity_samples > 0) {
    agg.diversity = diversity_points / static_cast<double>(agg.diversity_samples) / 2.0;
  }
  return agg;
}

double distinct_count(const std::vector<std::vector<Embedding>>& sets, std::size_t m,
                      double threshold) {
  if (sets.empty()) return 0.0;
  std::size_t counted = 0;
  for (const auto& s : sets) {
    if (s.size() != m) {
      throw Error(ErrorCode::kInvalidRequest,
                  "distinct count expects " + std::to_string(m) + " ideas per set, got " +
                      std::to_string(s.size()));
    }
    if (cluster_greedy_cosine(s, threshold).size() == m) ++counted;
  }
  return static_cast<double>(counted) / static_cast<double>(sets.size());
}

}  // namespace recoding::metrics
