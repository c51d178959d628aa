#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recoding/engine/policy.hpp"
#include "recoding/providers/types.hpp"

namespace recoding::engine {

struct RdConfig {
  std::string variant = "RD";
  std::string prompt;
  int token_limit = 150;
  EditPolicy policy;
  bool correction = false;
  std::uint64_t seed = 0;
  double temperature = 1.0;
  providers::CompletionMode mode = providers::CompletionMode::kSimulatedCompletion;
  // One request for the whole response instead of a sentence loop; used by
  // the ordinary-decoding baselines.
  bool single_shot = false;
  std::vector<providers::ChatMessage> history;
  // 0 disables the check.
  std::size_t max_history_chars = 0;

  // Throws ConfigError.
  void validate() const;
};

// Loop bound: 4 * ceil(N / 5).
int safety_cap(int token_limit);

struct SentenceRecord {
  std::string priming;          // prompt prefix used for this request
  std::string diverting_token;  // sentence-start injection d
  std::string request_input;    // X
  std::string completion;       // model text kept after sentence truncation
  std::string text;             // as appended to Y (separator + d + completion)
  std::size_t begin = 0;        // char span of `text` in Y
  std::size_t end = 0;
  std::int64_t tokens = 0;
  providers::Usage usage;
  bool inserted = false;        // policy-inserted sentence; no model call
  std::vector<Injection> injections;
};

enum class Termination {
  kBudgetReached,
  kSafetyCap,
  kStalled,
  kProviderError,
  kHistoryOverflow,
};

std::string_view to_string(Termination t);

struct GenerationTrace {
  std::vector<SentenceRecord> sentences;
  std::vector<providers::CompletionRequest> requests;
  std::string raw;
  std::optional<std::string> corrected;
  bool correction_warning = false;
  providers::Usage usage;
  providers::Usage correction_usage;
  std::int64_t token_length = 0;
  int iterations = 0;
  Termination termination = Termination::kBudgetReached;
  std::string error;

  bool ok() const noexcept {
    return termination == Termination::kBudgetReached || termination == Termination::kSafetyCap;
  }
  const std::string& final_text() const { return corrected ? *corrected : raw; }
};

inline constexpr std::string_view kGrammarCorrectorPrompt =
    "You are a strict grammar corrector, translator, and content filter. Follow these rules:\n"
    "1. If the input is already in English and grammatically correct, return it **unchanged**.\n"
    "2. If there are grammar mistakes, correct them.\n"
    "3. If the text is not in English, translate it into natural English.\n"
    "4. If the content is **nonsensical, gibberish, low-effort, or meaningless**, CORRECT them.\n"
    "\n"
    "IMPORTANT:\n"
    "- Do not explain or justify anything.\n"
    "- Do not rephrase fluent English.\n"
    "- Do not continue or expand.\n"
    "- Output only the final corrected, translated, or filtered text \xE2\x80\x94 no commentary.";

struct CorrectionResult {
  std::string text;
  bool warning = false;  // empty reply; raw text returned
  providers::Usage usage;
};

CorrectionResult correct(std::string_view raw, providers::ChatModel& corrector);

/// Runs the recoding-decoding loop.
///
/// Each iteration asks the policy for injections, builds
/// X = prefix + P + Y + d, keeps the first sentence of M(X), and appends
/// d + that sentence to Y until the token budget or the safety cap is hit.
/// Provider failures and stalls end the loop early and are reported in the
/// trace instead of thrown. `corrector` is used when cfg.correction is set.
GenerationTrace run_rd(const RdConfig& cfg, providers::CompletionModel& completer,
                       providers::ChatModel* corrector = nullptr);

}  // namespace recoding::engine
