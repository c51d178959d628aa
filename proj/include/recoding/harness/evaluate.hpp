#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "recoding/harness/experiment.hpp"

namespace recoding::harness {

inline constexpr std::string_view kEmbeddingCacheName = "embeddings.jsonl";

/// Embeds texts through `model`, remembering vectors in a JSONL file keyed
/// by (model label, text digest). Only unseen texts are sent.
class EmbeddingCache {
 public:
  EmbeddingCache(std::filesystem::path path, std::string model_label);

  std::vector<providers::Embedding> embed(const std::vector<std::string>& texts,
                                          providers::EmbeddingModel& model);
  std::size_t size() const { return cache_.size(); }

 private:
  std::filesystem::path path_;
  std::string label_;
  std::map<std::string, providers::Embedding> cache_;
};

// Unique-idea key: lower-cased word tokens joined by single spaces.
std::string idea_key(std::string_view idea);

/// Computes every metric from the run log in `dir` and writes growth.csv,
/// coverage.csv, novelty.csv, distinct.csv, ideas.csv, judge.csv (judge
/// enabled only), report.json and SVG plots into the same directory.
/// Throws IoError naming the log when it is missing.
nlohmann::json evaluate(const std::filesystem::path& dir);
nlohmann::json evaluate(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                        const Providers& providers);

// Human-readable summary of a report.json document.
std::string render_report(const nlohmann::json& report);

}  // namespace recoding::harness
