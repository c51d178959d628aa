#include "recoding/metrics/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>

#include "recoding/error.hpp"
#include "recoding/util/text.hpp"

namespace recoding::metrics {
namespace {

std::mutex& registry_mutex() {
  static std::mutex mu;
  return mu;
}

std::map<std::string, std::shared_ptr<const ClusteringBackend>>& registry() {
  static std::map<std::string, std::shared_ptr<const ClusteringBackend>> backends;
  return backends;
}

// Orders clusters by their first member so outputs are canonical.
void canonicalize(ClusterSet& set) {
  for (auto& c : set.clusters) std::sort(c.members.begin(), c.members.end());
  std::sort(set.clusters.begin(), set.clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.members.front() < b.members.front(); });
}

Embedding mean_direction(const std::vector<Embedding>& vs, const std::vector<std::size_t>& members) {
  Embedding c(vs[members.front()].size(), 0.0);
  for (auto m : members) {
    for (std::size_t j = 0; j < c.size(); ++j) c[j] += vs[m][j];
  }
  providers::normalize(c);
  return c;
}

std::set<std::string> word_set(std::string_view s) {
  auto words = text::word_tokens(s);
  return {words.begin(), words.end()};
}

}  // namespace

std::string_view to_string(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::kEmbeddingCosine: return "embedding-cosine";
    case ClusterMethod::kTfidfCosine: return "tfidf-cosine";
    case ClusterMethod::kHacAverage: return "hac-average";
    case ClusterMethod::kUnigramPartition: return "unigram-partition";
    case ClusterMethod::kPluggable: return "pluggable";
  }
  return "";
}

ClusterMethod parse_cluster_method(std::string_view name) {
  for (auto m : {ClusterMethod::kEmbeddingCosine, ClusterMethod::kTfidfCosine,
                 ClusterMethod::kHacAverage, ClusterMethod::kUnigramPartition,
                 ClusterMethod::kPluggable}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::kConfigError, "unknown clustering method: " + std::string(name));
}

void ClusterParams::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kConfigError, "clustering threshold must lie in (0,1)");
  }
  if (method == ClusterMethod::kPluggable && plugin.empty()) {
    throw Error(ErrorCode::kConfigError, "pluggable clustering needs a backend name");
  }
}

std::string ClusterParams::label() const {
  std::ostringstream os;
  os << (method == ClusterMethod::kPluggable ? plugin : std::string(to_string(method))) << "@"
     << threshold;
  return os.str();
}

std::vector<Embedding> ClusterSet::centroids() const {
  std::vector<Embedding> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back(c.centroid);
  return out;
}

std::vector<std::size_t> ClusterSet::assignment() const {
  std::vector<std::size_t> a(item_count, 0);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (auto m : clusters[c].members) a[m] = c;
  }
  return a;
}

bool is_partition(const ClusterSet& set) {
  std::vector<int> seen(set.item_count, 0);
  for (const auto& c : set.clusters) {
    if (c.members.empty()) return false;
    for (auto m : c.members) {
      if (m >= set.item_count || seen[m]++) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

double dot(const Embedding& a, const Embedding& b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double euclidean(const Embedding& a, const Embedding& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

GreedyCosineClusterer::GreedyCosineClusterer(double threshold) : threshold_(threshold) {}

std::size_t GreedyCosineClusterer::add(const Embedding& v) {
  const std::size_t index = count_++;
  for (std::size_t c = 0; c < sums_.size(); ++c) {
    if (norms_[c] > 0.0 && dot(v, sums_[c]) / norms_[c] >= threshold_) {
      for (std::size_t j = 0; j < v.size(); ++j) sums_[c][j] += v[j];
      norms_[c] = std::sqrt(dot(sums_[c], sums_[c]));
      members_[c].push_back(index);
      return c;
    }
  }
  sums_.push_back(v);
  norms_.push_back(std::sqrt(dot(v, v)));
  members_.push_back({index});
  return sums_.size() - 1;
}

ClusterSet GreedyCosineClusterer::result(const ClusterParams& params) const {
  ClusterSet set;
  set.params = params;
  set.item_count = count_;
  for (std::size_t c = 0; c < sums_.size(); ++c) {
    Embedding centroid = sums_[c];
    providers::normalize(centroid);
    set.clusters.push_back({std::move(centroid), members_[c]});
  }
  return set;
}

ClusterSet cluster_greedy_cosine(const std::vector<Embedding>& embeddings, double threshold) {
  GreedyCosineClusterer g(threshold);
  for (const auto& e : embeddings) g.add(e);
  return g.result({ClusterMethod::kEmbeddingCosine, threshold, 0, {}});
}

ClusterSet cluster_hac(const std::vector<Embedding>& embeddings, double threshold) {
  const std::size_t n = embeddings.size();
  ClusterSet set;
  set.params = {ClusterMethod::kHacAverage, threshold, 0, {}};
  set.item_count = n;
  if (n == 0) return set;

  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sim[i][j] = sim[j][i] = dot(embeddings[i], embeddings[j]);
  }
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};

  for (;;) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && sim[i][j] > best) {
          best = sim[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n || best < threshold) break;
    // Lance-Williams update for average linkage.
    const double wi = static_cast<double>(members[bi].size());
    const double wj = static_cast<double>(members[bj].size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double s = (wi * sim[bi][k] + wj * sim[bj][k]) / (wi + wj);
      sim[bi][k] = sim[k][bi] = s;
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    active[bj] = false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) set.clusters.push_back({mean_direction(embeddings, members[i]), members[i]});
  }
  canonicalize(set);
  return set;
}

double unigram_jaccard(std::string_view a, std::string_view b) {
  const auto sa = word_set(a);
  const auto sb = word_set(b);
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

ClusterSet cluster_unigram(const std::vector<std::string>& texts, double threshold) {
  const std::size_t n = texts.size();
  ClusterSet set;
  set.params = {ClusterMethod::kUnigramPartition, threshold, 0, {}};
  set.item_count = n;
  std::vector<std::set<std::string>> words(n);
  for (std::size_t i = 0; i < n; ++i) words[i] = word_set(texts[i]);
  auto similar = [&](std::size_t i, std::size_t j) {
    const auto& a = words[i];
    const auto& b = words[j];
    if (a.empty() && b.empty()) return true;
    std::size_t inter = 0;
    for (const auto& w : a) inter += b.count(w);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter) >= threshold;
  };
  std::vector<bool> visited(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (visited[s]) continue;
    Cluster c;
    std::vector<std::size_t> frontier{s};
    visited[s] = true;
    while (!frontier.empty()) {
      const auto cur = frontier.back();
      frontier.pop_back();
      c.members.push_back(cur);
      for (std::size_t k = 0; k < n; ++k) {
        if (!visited[k] && similar(cur, k)) {
          visited[k] = true;
          frontier.push_back(k);
        }
      }
    }
    set.clusters.push_back(std::move(c));
  }
  canonicalize(set);
  return set;
}

void TfidfVectorizer::fit(const std::vector<std::string>& docs) {
  vocabulary_.clear();
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs) {
    for (const auto& w : word_set(d)) ++df[w];
  }
  idf_.clear();
  const double n = static_cast<double>(docs.size());
  for (const auto& [w, count] : df) {
    vocabulary_.emplace(w, idf_.size());
    idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
}

std::vector<std::map<std::size_t, double>> TfidfVectorizer::transform(
    const std::vector<std::string>& docs) const {
  std::vector<std::map<std::size_t, double>> rows;
  rows.reserve(docs.size());
  for (const auto& d : docs) {
    std::map<std::size_t, double> row;
    for (const auto& w : text::word_tokens(d)) {
      if (auto it = vocabulary_.find(w); it != vocabulary_.end()) row[it->second] += 1.0;
    }
    double sq = 0.0;
    for (auto& [idx, v] : row) {
      v *= idf_[idx];
      sq += v * v;
    }
    if (sq > 0.0) {
      const double inv = 1.0 / std::sqrt(sq);
      for (auto& [idx, v] : row) v *= inv;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double sparse_cosine(const std::map<std::size_t, double>& a, const std::map<std::size_t, double>& b) {
  double s = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

ClusterSet cluster_tfidf(const std::vector<std::string>& texts, double threshold) {
  TfidfVectorizer vec;
  vec.fit(texts);
  const auto rows = vec.transform(texts);
  ClusterSet set;
  set.params = {ClusterMethod::kTfidfCosine, threshold, 0, {}};
  set.item_count = texts.size();
  std::vector<std::map<std::size_t, double>> sums;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool placed = false;
    for (std::size_t c = 0; c < sums.size(); ++c) {
      double norm = 0.0;
      for (const auto& [k, v] : sums[c]) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 0.0 && sparse_cosine(rows[i], sums[c]) / norm >= threshold) {
        for (const auto& [k, v] : rows[i]) sums[c][k] += v;
        set.clusters[c].members.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) {
      sums.push_back(rows[i]);
      set.clusters.push_back({{}, {i}});
    }
  }
  return set;
}

void register_backend(std::shared_ptr<const ClusteringBackend> backend) {
  std::lock_guard lock(registry_mutex());
  registry()[backend->name()] = std::move(backend);
}

ClusterSet cluster(const std::vector<Item>& items, const ClusterParams& params) {
  params.validate();
  std::vector<Embedding> embeddings;
  std::vector<std::string> texts;
  const bool have_embeddings =
      !items.empty() && std::all_of(items.begin(), items.end(),
                                    [](const Item& i) { return !i.embedding.empty(); });
  for (const auto& i : items) {
    if (have_embeddings) embeddings.push_back(i.embedding);
    texts.push_back(i.text);
  }
  const bool needs_embeddings = params.method == ClusterMethod::kEmbeddingCosine ||
                                params.method == ClusterMethod::kHacAverage;
  if (needs_embeddings && !have_embeddings && !items.empty()) {
    throw Error(ErrorCode::kConfigError, params.label() + " needs embeddings for every item");
  }

  ClusterSet set;
  switch (params.method) {
    case ClusterMethod::kEmbeddingCosine:
      set = cluster_greedy_cosine(embeddings, params.threshold);
      break;
    case ClusterMethod::kHacAverage:
      set = cluster_hac(embeddings, params.threshold);
      break;
    case ClusterMethod::kTfidfCosine:
      set = cluster_tfidf(texts, params.threshold);
      break;
    case ClusterMethod::kUnigramPartition:
      set = cluster_unigram(texts, params.threshold);
      break;
    case ClusterMethod::kPluggable: {
      std::shared_ptr<const ClusteringBackend> backend;
      {
        std::lock_guard lock(registry_mutex());
        auto it = registry().find(params.plugin);
        if (it == registry().end()) {
          throw Error(ErrorCode::kConfigError, "no clustering backend named " + params.plugin);
        }
        backend = it->second;
      }
      set = backend->cluster(items, params);
      break;
    }
  }
  set.params = params;
  if (have_embeddings) {
    for (auto& c : set.clusters) {
      if (c.centroid.empty()) c.centroid = mean_direction(embeddings, c.members);
    }
  }
  return set;
}

}  // namespace recoding::metrics
