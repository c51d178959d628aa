#include "recoding/providers/types.hpp"

#include <cmath>

#include "recoding/error.hpp"
#include "recoding/util/text.hpp"

namespace recoding::providers {

std::string_view to_string(CompletionMode mode) {
  switch (mode) {
    case CompletionMode::kRealCompletion: return "real-completion";
    case CompletionMode::kSimulatedCompletion: return "simulated-completion";
    case CompletionMode::kChat: return "chat";
  }
  return "chat";
}

CompletionMode parse_mode(std::string_view name) {
  for (auto m : {CompletionMode::kRealCompletion, CompletionMode::kSimulatedCompletion,
                 CompletionMode::kChat}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::kConfigError, "unknown completion mode: " + std::string(name));
}

Usage& Usage::operator+=(const Usage& other) {
  prompt_tokens += other.prompt_tokens;
  completion_tokens += other.completion_tokens;
  reported = reported || other.reported;
  return *this;
}

void CompletionRequest::validate() const {
  if (max_new_tokens < 1) {
    throw Error(ErrorCode::kInvalidRequest, "max_new_tokens must be >= 1");
  }
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::kInvalidRequest, "temperature must lie in [0, 2]");
  }
}

void ProviderConfig::validate() const {
  if (retry_budget < 0) throw Error(ErrorCode::kConfigError, "retry budget must be >= 0");
  if (max_concurrency < 1) throw Error(ErrorCode::kConfigError, "concurrency limit must be >= 1");
  if (timeout.count() <= 0) throw Error(ErrorCode::kConfigError, "timeout must be positive");
}

std::int64_t estimate_tokens(std::string_view s) {
  const auto words = static_cast<std::int64_t>(text::split_whitespace(s).size());
  return (words * 4 + 2) / 3;
}

void normalize(Embedding& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq <= 0.0) return;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

}  // namespace recoding::providers
