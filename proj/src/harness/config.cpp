#include "recoding/harness/config.hpp"

#include <fstream>
#include <set>

#include "recoding/engine/variants.hpp"
#include "recoding/error.hpp"

#ifndef RECODING_DATA_DIR
#define RECODING_DATA_DIR "data"
#endif

namespace recoding::harness {
namespace {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("config key '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kConfigError, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw Error(ErrorCode::kConfigError, "unknown config key '" + key + "' in " + where);
    }
  }
}

providers::MockWorld parse_world(const json& j) {
  check_keys(j, {"concepts", "distribution", "zipf_exponent", "stem_map_seed"}, "mock_world");
  providers::MockWorld w;
  read(j, "concepts", w.concept_count);
  read(j, "zipf_exponent", w.zipf_exponent);
  read(j, "stem_map_seed", w.stem_map_seed);
  if (j.contains("distribution")) {
    const auto d = j.at("distribution").get<std::string>();
    if (d == "zipf") {
      w.distribution = providers::BaseDistribution::kPeakedZipf;
    } else if (d == "uniform") {
      w.distribution = providers::BaseDistribution::kUniform;
    } else {
      throw Error(ErrorCode::kConfigError, "mock_world.distribution must be zipf or uniform");
    }
  }
  return w;
}

ProviderSection parse_providers(const json& j) {
  check_keys(j,
             {"backend", "endpoint", "api_key_env", "completion_model", "chat_model",
              "judge_model", "embedding_model", "timeout_ms", "retry_budget", "rd_mode",
              "od_mode", "mock_world", "embedding_dimension"},
             "providers");
  ProviderSection p;
  if (j.contains("backend")) p.backend = parse_backend(j.at("backend").get<std::string>());
  read(j, "endpoint", p.endpoint);
  read(j, "api_key_env", p.api_key_env);
  read(j, "completion_model", p.completion_model);
  read(j, "chat_model", p.chat_model);
  read(j, "judge_model", p.judge_model);
  read(j, "embedding_model", p.embedding_model);
  read(j, "timeout_ms", p.timeout_ms);
  read(j, "retry_budget", p.retry_budget);
  read(j, "embedding_dimension", p.embedding_dimension);
  if (j.contains("rd_mode")) p.rd_mode = providers::parse_mode(j.at("rd_mode").get<std::string>());
  if (j.contains("od_mode")) p.od_mode = providers::parse_mode(j.at("od_mode").get<std::string>());
  if (j.contains("mock_world")) p.mock_world = parse_world(j.at("mock_world"));
  return p;
}

}  // namespace

std::string_view to_string(Profile p) {
  return p == Profile::kDataset ? "dataset" : "brainstorming";
}

Profile parse_profile(std::string_view name) {
  if (name == "brainstorming") return Profile::kBrainstorming;
  if (name == "dataset") return Profile::kDataset;
  throw Error(ErrorCode::kConfigError, "profile must be brainstorming or dataset");
}

std::string_view to_string(Backend b) { return b == Backend::kOpenAi ? "openai" : "mock"; }

Backend parse_backend(std::string_view name) {
  if (name == "mock") return Backend::kMock;
  if (name == "openai") return Backend::kOpenAi;
  throw Error(ErrorCode::kConfigError, "backend must be mock or openai");
}

std::string PromptSpec::full_text() const {
  if (formatting_prefix.empty()) return text;
  return formatting_prefix + " " + text;
}

providers::ProviderConfig ProviderSection::provider_config(const std::string& model,
                                                           int concurrency) const {
  providers::ProviderConfig c;
  c.endpoint = endpoint;
  c.model = backend == Backend::kMock ? "mock" : model;
  c.api_key_env = api_key_env;
  c.timeout = std::chrono::milliseconds(timeout_ms);
  c.retry_budget = retry_budget;
  c.max_concurrency = concurrency;
  return c;
}

int ExperimentConfig::token_limit() const {
  if (max_new_tokens > 0) return max_new_tokens;
  return profile == Profile::kDataset ? kDatasetTokens : kBrainstormingTokens;
}

double ExperimentConfig::threshold() const {
  if (metrics.threshold > 0.0) return metrics.threshold;
  return profile == Profile::kDataset ? metrics::kDatasetThreshold : metrics::kBrainstormThreshold;
}

void ExperimentConfig::validate() const {
  if (prompts.empty()) throw Error(ErrorCode::kConfigError, "config lists no prompts");
  if (methods.empty()) throw Error(ErrorCode::kConfigError, "config lists no methods");
  if (runs < 1) throw Error(ErrorCode::kConfigError, "runs must be >= 1");
  if (max_new_tokens < 0) throw Error(ErrorCode::kConfigError, "max_new_tokens must be >= 1");
  if (temperature < 0.0 || temperature > 2.0) {
    throw Error(ErrorCode::kConfigError, "temperature must lie in [0,2]");
  }
  if (concurrency < 1) throw Error(ErrorCode::kConfigError, "concurrency must be >= 1");
  std::set<std::string> ids;
  for (const auto& p : prompts) {
    if (p.id.empty()) throw Error(ErrorCode::kConfigError, "prompt id must not be empty");
    if (p.id.find_first_of("/\\ ") != std::string::npos) {
      throw Error(ErrorCode::kConfigError, "prompt id '" + p.id + "' may not contain '/', '\\' or spaces");
    }
    if (!ids.insert(p.id).second) {
      throw Error(ErrorCode::kConfigError, "duplicate prompt id '" + p.id + "'");
    }
    if (p.text.empty()) throw Error(ErrorCode::kConfigError, "prompt '" + p.id + "' has no text");
  }
  std::set<std::string> seen;
  for (const auto& m : methods) {
    engine::parse_variant(m);
    if (!seen.insert(m).second) throw Error(ErrorCode::kConfigError, "duplicate method " + m);
  }
  providers.mock_world.validate();
  providers.provider_config(providers.chat_model, concurrency).validate();
  if (providers.embedding_dimension < 1) {
    throw Error(ErrorCode::kConfigError, "embedding_dimension must be >= 1");
  }
  if (metrics.clustering.empty()) {
    throw Error(ErrorCode::kConfigError, "metrics.clustering lists no methods");
  }
  for (auto m : metrics.clustering) {
    metrics::ClusterParams{m, threshold(), 0, metrics.plugin}.validate();
  }
  metrics::ClusterParams{metrics::ClusterMethod::kEmbeddingCosine, threshold(), 0, {}}.validate();
  if (!(metrics.coverage_percentile > 0.0 && metrics.coverage_percentile <= 100.0)) {
    throw Error(ErrorCode::kConfigError, "coverage_percentile must lie in (0,100]");
  }
  if (metrics.bootstrap_iterations < 1) {
    throw Error(ErrorCode::kConfigError, "bootstrap_iterations must be >= 1");
  }
  if (metrics.distinct_m < 1) throw Error(ErrorCode::kConfigError, "distinct_m must be >= 1");
}

std::filesystem::path default_vocab_manifest() {
  return std::filesystem::path(RECODING_DATA_DIR) / "vocab" / "manifest.json";
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j,
             {"schema_version", "prompts", "methods", "runs", "profile", "max_new_tokens",
              "temperature", "providers", "vocab_manifest", "seed", "output_dir", "concurrency",
              "extraction", "max_history_chars", "judge", "metrics"},
             "config");
  ExperimentConfig cfg;
  if (j.contains("prompts")) {
    const auto& ps = j.at("prompts");
    if (!ps.is_array()) throw Error(ErrorCode::kConfigError, "prompts must be a list");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      PromptSpec p;
      if (ps[i].is_string()) {
        p.id = "p" + std::to_string(i + 1);
        p.text = ps[i].get<std::string>();
      } else {
        check_keys(ps[i], {"id", "text", "formatting_prefix"}, "prompt");
        read(ps[i], "id", p.id);
        read(ps[i], "text", p.text);
        read(ps[i], "formatting_prefix", p.formatting_prefix);
      }
      cfg.prompts.push_back(std::move(p));
    }
  }
  read(j, "methods", cfg.methods);
  read(j, "runs", cfg.runs);
  if (j.contains("profile")) cfg.profile = parse_profile(j.at("profile").get<std::string>());
  read(j, "max_new_tokens", cfg.max_new_tokens);
  read(j, "temperature", cfg.temperature);
  if (j.contains("providers")) cfg.providers = parse_providers(j.at("providers"));
  std::string path;
  read(j, "vocab_manifest", path);
  cfg.vocab_manifest = path.empty() ? default_vocab_manifest() : std::filesystem::path(path);
  read(j, "seed", cfg.seed);
  path.clear();
  read(j, "output_dir", path);
  if (!path.empty()) cfg.output_dir = path;
  read(j, "concurrency", cfg.concurrency);
  if (j.contains("extraction")) {
    const auto e = j.at("extraction").get<std::string>();
    if (e == "bullets") {
      cfg.extraction = extraction::ExtractionMode::kBulletRules;
    } else if (e == "judge") {
      cfg.extraction = extraction::ExtractionMode::kJudgeAssisted;
    } else {
      throw Error(ErrorCode::kConfigError, "extraction must be bullets or judge");
    }
  }
  read(j, "max_history_chars", cfg.max_history_chars);
  if (j.contains("judge")) {
    const auto& jj = j.at("judge");
    check_keys(jj, {"enabled", "relevance_samples", "diversity_pairs"}, "judge");
    read(jj, "enabled", cfg.judge.enabled);
    read(jj, "relevance_samples", cfg.judge.relevance_samples);
    read(jj, "diversity_pairs", cfg.judge.diversity_pairs);
  }
  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    check_keys(m,
               {"clustering", "plugin", "threshold", "coverage_percentile",
                "bootstrap_iterations", "distinct_m"},
               "metrics");
    if (m.contains("clustering")) {
      cfg.metrics.clustering.clear();
      for (const auto& name : m.at("clustering")) {
        cfg.metrics.clustering.push_back(metrics::parse_cluster_method(name.get<std::string>()));
      }
    }
    read(m, "plugin", cfg.metrics.plugin);
    read(m, "threshold", cfg.metrics.threshold);
    read(m, "coverage_percentile", cfg.metrics.coverage_percentile);
    read(m, "bootstrap_iterations", cfg.metrics.bootstrap_iterations);
    read(m, "distinct_m", cfg.metrics.distinct_m);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfigError, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  auto cfg = parse_config(j);
  // Relative manifest paths resolve against the config file.
  if (j.contains("vocab_manifest") && cfg.vocab_manifest.is_relative()) {
    cfg.vocab_manifest = path.parent_path() / cfg.vocab_manifest;
  }
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json prompts = json::array();
  for (const auto& p : cfg.prompts) {
    prompts.push_back({{"id", p.id}, {"text", p.text}, {"formatting_prefix", p.formatting_prefix}});
  }
  const auto& pv = cfg.providers;
  json world = {
      {"concepts", pv.mock_world.concept_count},
      {"distribution",
       pv.mock_world.distribution == providers::BaseDistribution::kUniform ? "uniform" : "zipf"},
      {"zipf_exponent", pv.mock_world.zipf_exponent},
      {"stem_map_seed", pv.mock_world.stem_map_seed}};
  json clustering = json::array();
  for (auto m : cfg.metrics.clustering) clustering.push_back(std::string(metrics::to_string(m)));
  return {
      {"schema_version", kSchemaVersion},
      {"prompts", prompts},
      {"methods", cfg.methods},
      {"runs", cfg.runs},
      {"profile", std::string(to_string(cfg.profile))},
      {"max_new_tokens", cfg.token_limit()},
      {"temperature", cfg.temperature},
      {"providers",
       {{"backend", std::string(to_string(pv.backend))},
        {"endpoint", pv.endpoint},
        {"api_key_env", pv.api_key_env},
        {"completion_model", pv.completion_model},
        {"chat_model", pv.chat_model},
        {"judge_model", pv.judge_model},
        {"embedding_model", pv.embedding_model},
        {"timeout_ms", pv.timeout_ms},
        {"retry_budget", pv.retry_budget},
        {"rd_mode", std::string(providers::to_string(pv.rd_mode))},
        {"od_mode", std::string(providers::to_string(pv.od_mode))},
        {"mock_world", world},
        {"embedding_dimension", pv.embedding_dimension}}},
      {"vocab_manifest", cfg.vocab_manifest.string()},
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir.string()},
      {"concurrency", cfg.concurrency},
      {"extraction",
       cfg.extraction == extraction::ExtractionMode::kJudgeAssisted ? "judge" : "bullets"},
      {"max_history_chars", cfg.max_history_chars},
      {"judge",
       {{"enabled", cfg.judge.enabled},
        {"relevance_samples", cfg.judge.relevance_samples},
        {"diversity_pairs", cfg.judge.diversity_pairs}}},
      {"metrics",
       {{"clustering", clustering},
        {"plugin", cfg.metrics.plugin},
        {"threshold", cfg.threshold()},
        {"coverage_percentile", cfg.metrics.coverage_percentile},
        {"bootstrap_iterations", cfg.metrics.bootstrap_iterations},
        {"distinct_m", cfg.metrics.distinct_m}}},
  };
}

}  // namespace recoding::harness
