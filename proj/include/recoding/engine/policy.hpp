#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "recoding/providers/types.hpp"
#include "recoding/vocab/sampler.hpp"
#include "recoding/vocab/vocabulary.hpp"

namespace recoding::engine {

enum class TriggerKind {
  kEverySentenceStart,
  kSentenceStartWithProbability,
  kPromptPrefixOnce,
};

struct Trigger {
  TriggerKind kind = TriggerKind::kEverySentenceStart;
  double probability = 1.0;

  static Trigger every_sentence() { return {TriggerKind::kEverySentenceStart, 1.0}; }
  static Trigger with_probability(double p) { return {TriggerKind::kSentenceStartWithProbability, p}; }
  static Trigger prompt_prefix_once() { return {TriggerKind::kPromptPrefixOnce, 1.0}; }
};

enum class ActionKind {
  kInjectStem,
  kInjectKeyword,
  kInjectPivot,
  kInjectPriming,
  kCallback,
};

std::string_view to_string(ActionKind kind);

enum class Placement {
  kPromptPrefix,      // before the user prompt
  kSentenceStart,     // start of the next sentence (the diverting position)
  kInsertedSentence,  // a whole sentence appended to the output without a model call
};

struct GenerationState {
  std::string_view prompt;
  std::string_view generated;
  int sentence_index = 0;
};

struct CallbackInjection {
  Placement placement = Placement::kSentenceStart;
  std::string text;
};

using PolicyCallback = std::function<std::optional<CallbackInjection>(const GenerationState&)>;

// Vocabulary pointers are non-owning; the vocabularies must outlive the policy.
struct Action {
  ActionKind kind = ActionKind::kInjectStem;
  const vocab::Vocabulary* vocabulary = nullptr;
  std::string keyword;
  PolicyCallback callback;

  static Action inject_stem(const vocab::Vocabulary& v) { return {ActionKind::kInjectStem, &v, {}, {}}; }
  static Action inject_keyword(std::string word) { return {ActionKind::kInjectKeyword, nullptr, std::move(word), {}}; }
  static Action inject_pivot(const vocab::Vocabulary& v) { return {ActionKind::kInjectPivot, &v, {}, {}}; }
  static Action inject_priming(const vocab::Vocabulary& v) { return {ActionKind::kInjectPriming, &v, {}, {}}; }
  static Action run_callback(PolicyCallback cb) { return {ActionKind::kCallback, nullptr, {}, std::move(cb)}; }
};

struct Rule {
  Trigger trigger;
  Action action;
};

/// Ordered (trigger, action) rules; rules fire in order at each sentence start.
struct EditPolicy {
  std::vector<Rule> rules;

  bool empty() const noexcept { return rules.empty(); }
  // Throws ConfigError on p outside [0,1] or missing vocabulary/callback.
  void validate() const;
};

struct Injection {
  int rule_index = 0;
  ActionKind action = ActionKind::kInjectStem;
  Placement placement = Placement::kSentenceStart;
  std::string value;     // sampled entry / keyword / callback text
  std::string rendered;  // text as placed into the input sequence
};

struct PolicyDecision {
  std::string prefix;
  std::string sentence_start;
  std::vector<std::string> inserted_sentences;
  std::vector<Injection> injections;  // fired this step (persistent prefixes are not repeated)
};

// Per-run random streams and memo for prompt-prefix-once rules.
class PolicyStreams {
 public:
  PolicyStreams(const EditPolicy& policy, const vocab::SeededSampler& root);

  vocab::SeededSampler& trigger_stream(std::size_t rule) { return triggers_.at(rule); }
  vocab::SeededSampler& draw_stream(std::size_t rule) { return draws_.at(rule); }

  std::string persistent_prefix;
  int steps = 0;

 private:
  std::vector<vocab::SeededSampler> triggers_;
  std::vector<vocab::SeededSampler> draws_;
};

PolicyDecision apply_policy(const EditPolicy& policy, const GenerationState& state,
                            PolicyStreams& streams);

// Priming + diverting rules, both at every sentence start.
EditPolicy recoding_policy(const vocab::Vocabulary* priming, const vocab::Vocabulary* diverting);

// Callback that asks `model` whether the text so far calls for an ad for
// `product`, and if so returns a one-sentence ad as an inserted sentence.
// Replies of "NONE" decline.
PolicyCallback llm_ad_callback(providers::ChatModel& model, std::string product);

}  // namespace recoding::engine
