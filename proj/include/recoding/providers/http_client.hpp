#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "recoding/providers/types.hpp"

namespace recoding::providers {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using Headers = std::multimap<std::string, std::string>;

// POSTs JSON bodies. Implementations throw Error(kRetryableTransport) on
// timeouts and connection failures; HTTP status codes are returned as-is.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body,
                            const Headers& headers, std::chrono::milliseconds timeout) = 0;
};

// cpp-httplib backed transport. `base_url` may carry a path prefix
// ("https://host/v1"), which is prepended to every request path.
std::unique_ptr<Transport> make_http_transport(const std::string& base_url);

// Blocks callers beyond `limit` concurrent holders.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(int limit) : available_(limit) {}

  void acquire();
  void release();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

/// Client for OpenAI-compatible chat/completion/embedding endpoints.
///
/// Retries timeouts, HTTP 429 and 5xx up to `retry_budget` times with
/// exponential backoff. Other 4xx replies are permanent. The API key is read
/// from the environment variable named in the config at construction.
class OpenAiCompatibleClient final : public CompletionModel, public ChatModel, public EmbeddingModel {
 public:
  OpenAiCompatibleClient(ProviderConfig cfg, std::unique_ptr<Transport> transport);
  explicit OpenAiCompatibleClient(ProviderConfig cfg);

  CompletionResponse complete(const CompletionRequest& request) override;
  ChatResponse chat(const ChatRequest& request) override;
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

  const ProviderConfig& config() const { return cfg_; }

  // Test hook: replaces std::this_thread::sleep_for during backoff.
  void set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper) {
    sleeper_ = std::move(sleeper);
  }

 private:
  std::string send(std::string_view path, const std::string& body, double& latency_ms);

  ProviderConfig cfg_;
  std::unique_ptr<Transport> transport_;
  Headers headers_;
  ConcurrencyLimiter limiter_;
  std::function<void(std::chrono::milliseconds)> sleeper_;
};

}  // namespace recoding::providers
