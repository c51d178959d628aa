#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "recoding/providers/types.hpp"
#include "recoding/vocab/sampler.hpp"

namespace recoding::providers {

enum class BaseDistribution { kPeakedZipf, kUniform };

/// Offline stand-in for a completion model with a peaked concept distribution.
///
/// Each concept id owns a fixed sentence. Inputs ending in a three-letter
/// stem map to concept hash(stem) mod K; inputs carrying only a priming
/// frame map to hash(noun) mod K; anything else draws from the base
/// distribution.
struct MockWorld {
  int concept_count = 200;
  BaseDistribution distribution = BaseDistribution::kPeakedZipf;
  double zipf_exponent = 2.0;
  std::uint64_t stem_map_seed = 0;

  void validate() const;
};

// Final whitespace-delimited token of `input` when it is exactly three
// letters with nothing after it.
std::optional<std::string> trailing_stem(std::string_view input);

int concept_for_key(const MockWorld& world, std::string_view key);

// Canonical sentence for a concept: a lead word followed by five concept
// words, terminated by ".\n".
std::string concept_sentence(const MockWorld& world, int concept_id);

// Continuation emitted after stem `stem` for a concept: a two-letter word
// completion, then the concept's five words.
std::string stem_continuation(const MockWorld& world, std::string_view stem, int concept_id);

// Cumulative base distribution; draw with a uniform in [0,1).
class ConceptDistribution {
 public:
  explicit ConceptDistribution(const MockWorld& world);
  int draw(vocab::SeededSampler& sampler) const;
  double probability(int concept_id) const;

 private:
  std::vector<double> cdf_;
};

struct MockCompletion {
  std::string text;
  int concept_id = 0;
};

// One sentence for `input`.
MockCompletion mock_complete(const MockWorld& world, const ConceptDistribution& dist,
                             std::string_view input, vocab::SeededSampler& sampler);

/// Completion model backed by a MockWorld. Sentence-scoped requests return one
/// sentence; otherwise sentences are emitted until the token budget is met.
/// Emitted concept ids are recorded for test oracles.
class MockCompletionModel final : public CompletionModel {
 public:
  MockCompletionModel(MockWorld world, vocab::SeededSampler sampler);

  CompletionResponse complete(const CompletionRequest& request) override;

  std::vector<int> emitted_concepts() const;
  const MockWorld& world() const { return world_; }

 private:
  MockWorld world_;
  ConceptDistribution dist_;
  vocab::SeededSampler sampler_;
  mutable std::mutex mu_;
  std::vector<int> concepts_;
};

/// Bag-of-words hashing embedder. Each lower-cased word maps to a seeded
/// pseudo-random vector; a text embeds as the normalized sum of its words.
class MockEmbeddingModel final : public EmbeddingModel {
 public:
  explicit MockEmbeddingModel(std::size_t dimension = 256, std::uint64_t seed = 0);

  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;
  Embedding embed_one(std::string_view text) const;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

// Chat model whose replies come from a callback; records every request.
class ScriptedChatModel final : public ChatModel {
 public:
  using Script = std::function<std::string(const ChatRequest&, std::size_t call_index)>;

  explicit ScriptedChatModel(Script script, std::string backend_id = "scripted");
  ScriptedChatModel(ScriptedChatModel&& other) noexcept;

  // Always replies with `reply`.
  static ScriptedChatModel fixed(std::string reply);
  // Echoes the last user message (identity corrector).
  static ScriptedChatModel identity();

  ChatResponse chat(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;

 private:
  Script script_;
  std::string backend_id_;
  mutable std::mutex mu_;
  std::vector<ChatRequest> requests_;
};

// Completion model whose replies come from a callback; records requests.
class ScriptedCompletionModel final : public CompletionModel {
 public:
  using Script = std::function<std::string(const CompletionRequest&, std::size_t call_index)>;

  explicit ScriptedCompletionModel(Script script);

  CompletionResponse complete(const CompletionRequest& request) override;
  std::vector<CompletionRequest> requests() const;

 private:
  Script script_;
  mutable std::mutex mu_;
  std::vector<CompletionRequest> requests_;
};

}  // namespace recoding::providers
