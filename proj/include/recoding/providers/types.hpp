#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace recoding::providers {

enum class CompletionMode {
  kRealCompletion,       // raw continuation endpoint
  kSimulatedCompletion,  // chat endpoint driven by a fixed system instruction
  kChat,                 // plain chat turn (ordinary decoding baselines)
};

std::string_view to_string(CompletionMode mode);
CompletionMode parse_mode(std::string_view name);

struct ChatMessage {
  std::string role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool reported = false;

  Usage& operator+=(const Usage& other);
};

struct CompletionRequest {
  std::string input_text;
  int max_new_tokens = 150;
  double temperature = 1.0;
  bool stop_at_sentence = true;
  CompletionMode mode = CompletionMode::kSimulatedCompletion;
  // Prior turns for kChat; the request's input_text is sent as the final
  // user message.
  std::vector<ChatMessage> history;

  // Throws InvalidRequest.
  void validate() const;
};

struct CompletionResponse {
  std::string text;
  Usage usage;
  std::string backend_id;
  double latency_ms = 0.0;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;
  bool json_response = false;
};

struct ChatResponse {
  std::string text;
  Usage usage;
  std::string backend_id;
  double latency_ms = 0.0;
};

using Embedding = std::vector<double>;

struct ProviderConfig {
  std::string endpoint = "https://api.openai.com/v1";
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds timeout{60'000};
  int retry_budget = 3;
  int max_concurrency = 4;
  std::chrono::milliseconds backoff_base{500};

  // Throws ConfigError.
  void validate() const;
};

class CompletionModel {
 public:
  virtual ~CompletionModel() = default;
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

class ChatModel {
 public:
  virtual ~ChatModel() = default;
  virtual ChatResponse chat(const ChatRequest& request) = 0;
};

class EmbeddingModel {
 public:
  virtual ~EmbeddingModel() = default;
  // One L2-normalized vector per text.
  virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) = 0;
};

// Tokenizer-free length estimate: ceil(words * 4 / 3).
std::int64_t estimate_tokens(std::string_view text);

// Scales `v` to unit L2 norm in place; zero vectors are left untouched.
void normalize(Embedding& v);

}  // namespace recoding::providers
