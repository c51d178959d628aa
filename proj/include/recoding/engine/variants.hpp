#pragma once

#include <string>
#include <vector>

#include "recoding/engine/rd_engine.hpp"
#include "recoding/vocab/manifest.hpp"

namespace recoding::engine {

enum class Variant { kOD, kODh, kODs, kODm, kOD16, kRD, kRDp, kRDd };

std::string_view to_string(Variant v);
// Accepts "OD", "OD_h", "OD_s", "OD_m", "OD_16", "RD", "RD_p", "RD_d". Throws ConfigError.
Variant parse_variant(std::string_view name);
const std::vector<Variant>& all_variants();

inline constexpr std::string_view kThinkOutsideTheBox = "Think outside the box. ";
inline constexpr std::string_view kMoreIdeasRequest = "Generate 5 more ideas";
inline constexpr double kHighTemperature = 1.6;

struct VariantContext {
  std::string prompt;
  int token_limit = 150;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  int run_index = 0;  // 0-based
  const vocab::VocabularyRegistry* vocabularies = nullptr;
  std::string priming_vocab = "english_nouns";
  std::string diverting_vocab = "english_stems";
  std::string phrase_vocab = "engineered_phrases";
  providers::CompletionMode rd_mode = providers::CompletionMode::kSimulatedCompletion;
  providers::CompletionMode od_mode = providers::CompletionMode::kChat;
  // Responses of earlier runs of the same (prompt, method) cell, oldest first.
  std::vector<std::string> prior_outputs;
  std::size_t max_history_chars = 0;
};

RdConfig variant_factory(Variant variant, const VariantContext& ctx);

}  // namespace recoding::engine
