#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "recoding/extraction/ideas.hpp"
#include "recoding/metrics/clustering.hpp"
#include "recoding/providers/mock.hpp"
#include "recoding/providers/types.hpp"

namespace recoding::harness {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kBrainstormingTokens = 150;
inline constexpr int kDatasetTokens = 300;

enum class Profile { kBrainstorming, kDataset };

std::string_view to_string(Profile p);
Profile parse_profile(std::string_view name);

struct PromptSpec {
  std::string id;
  std::string text;
  std::string formatting_prefix;

  // Prefix and text joined by a space.
  std::string full_text() const;
};

enum class Backend { kMock, kOpenAi };

std::string_view to_string(Backend b);
Backend parse_backend(std::string_view name);

struct ProviderSection {
  Backend backend = Backend::kMock;
  std::string endpoint = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string completion_model = "gpt-4o-mini";
  std::string chat_model = "gpt-4o-mini";
  std::string judge_model = "gpt-4o";
  std::string embedding_model = "text-embedding-3-small";
  int timeout_ms = 60'000;
  int retry_budget = 3;
  providers::CompletionMode rd_mode = providers::CompletionMode::kSimulatedCompletion;
  providers::CompletionMode od_mode = providers::CompletionMode::kChat;
  providers::MockWorld mock_world;
  std::size_t embedding_dimension = 256;

  providers::ProviderConfig provider_config(const std::string& model, int concurrency) const;
};

struct JudgeSettings {
  bool enabled = false;
  std::size_t relevance_samples = 20;
  std::size_t diversity_pairs = 20;
};

struct MetricSettings {
  std::vector<metrics::ClusterMethod> clustering{metrics::ClusterMethod::kEmbeddingCosine};
  std::string plugin;
  double threshold = 0.0;  // 0: profile default
  double coverage_percentile = 95.0;
  std::size_t bootstrap_iterations = 50;
  std::size_t distinct_m = 5;
};

/// Everything needed to execute and evaluate an experiment. Loaded from a
/// JSON file; every key is optional except "prompts" and "methods".
struct ExperimentConfig {
  std::vector<PromptSpec> prompts;
  std::vector<std::string> methods;
  int runs = 1;
  Profile profile = Profile::kBrainstorming;
  int max_new_tokens = 0;  // 0: profile default
  double temperature = 1.0;
  ProviderSection providers;
  std::filesystem::path vocab_manifest;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "experiment";
  int concurrency = 4;
  extraction::ExtractionMode extraction = extraction::ExtractionMode::kBulletRules;
  std::size_t max_history_chars = 0;
  JudgeSettings judge;
  MetricSettings metrics;

  int token_limit() const;
  double threshold() const;
  // Throws ConfigError.
  void validate() const;
};

std::filesystem::path default_vocab_manifest();

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace recoding::harness
