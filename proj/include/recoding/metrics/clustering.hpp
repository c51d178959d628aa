#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "recoding/providers/types.hpp"

namespace recoding::metrics {

using providers::Embedding;

enum class ClusterMethod {
  kEmbeddingCosine,
  kTfidfCosine,
  kHacAverage,
  kUnigramPartition,
  kPluggable,
};

std::string_view to_string(ClusterMethod m);
ClusterMethod parse_cluster_method(std::string_view name);

inline constexpr double kBrainstormThreshold = 0.73;
inline constexpr double kDatasetThreshold = 0.83;
inline constexpr double kTokenResponsivenessThreshold = 0.7;

struct ClusterParams {
  ClusterMethod method = ClusterMethod::kEmbeddingCosine;
  double threshold = kBrainstormThreshold;
  std::size_t embedding_dimension = 0;  // 0: taken from the data
  std::string plugin;                   // backend name for kPluggable

  // Throws ConfigError unless threshold lies in (0,1).
  void validate() const;
  std::string label() const;
};

struct Cluster {
  Embedding centroid;  // empty when the method had no embeddings
  std::vector<std::size_t> members;
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  ClusterParams params;
  std::size_t item_count = 0;

  std::size_t size() const noexcept { return clusters.size(); }
  std::vector<Embedding> centroids() const;
  // Cluster index per item.
  std::vector<std::size_t> assignment() const;
};

// One idea to be clustered. Methods read whichever field they need.
struct Item {
  std::string text;
  Embedding embedding;
};

// Members partition [0, item_count): disjoint and exhaustive.
bool is_partition(const ClusterSet& set);

/// Order-dependent threshold clustering. Each vector joins the first
/// cluster whose running centroid has cosine >= threshold, else opens a new
/// cluster. Supports incremental use for growth curves.
class GreedyCosineClusterer {
 public:
  explicit GreedyCosineClusterer(double threshold);

  // Returns the cluster index the vector joined.
  std::size_t add(const Embedding& v);
  std::size_t cluster_count() const noexcept { return sums_.size(); }
  ClusterSet result(const ClusterParams& params) const;

 private:
  double threshold_;
  std::vector<Embedding> sums_;
  std::vector<double> norms_;
  std::vector<std::vector<std::size_t>> members_;
  std::size_t count_ = 0;
};

ClusterSet cluster_greedy_cosine(const std::vector<Embedding>& embeddings, double threshold);

// Average-linkage agglomeration on cosine similarity, merging the most
// similar pair while its average similarity is >= threshold.
ClusterSet cluster_hac(const std::vector<Embedding>& embeddings, double threshold);

// Jaccard similarity over lower-cased word sets; two empty sets score 1.
double unigram_jaccard(std::string_view a, std::string_view b);

// Connected components of the graph joining pairs with Jaccard >= threshold.
ClusterSet cluster_unigram(const std::vector<std::string>& texts, double threshold);

/// TF-IDF with smoothed idf, ln((1+n)/(1+df)) + 1, and L2-normalized rows.
class TfidfVectorizer {
 public:
  void fit(const std::vector<std::string>& docs);
  // Sparse rows keyed by vocabulary index.
  std::vector<std::map<std::size_t, double>> transform(const std::vector<std::string>& docs) const;
  std::size_t vocabulary_size() const noexcept { return vocabulary_.size(); }

 private:
  std::map<std::string, std::size_t> vocabulary_;
  std::vector<double> idf_;
};

double sparse_cosine(const std::map<std::size_t, double>& a, const std::map<std::size_t, double>& b);

// Greedy threshold clustering over TF-IDF vectors fitted on `texts`.
ClusterSet cluster_tfidf(const std::vector<std::string>& texts, double threshold);

// Extension point for methods without a built-in implementation.
class ClusteringBackend {
 public:
  virtual ~ClusteringBackend() = default;
  virtual std::string name() const = 0;
  virtual ClusterSet cluster(const std::vector<Item>& items, const ClusterParams& params) const = 0;
};

void register_backend(std::shared_ptr<const ClusteringBackend> backend);

// Dispatches on params.method. Centroids are the renormalized means of
// member embeddings whenever the items carry embeddings.
ClusterSet cluster(const std::vector<Item>& items, const ClusterParams& params);

double dot(const Embedding& a, const Embedding& b);
double euclidean(const Embedding& a, const Embedding& b);

}  // namespace recoding::metrics
