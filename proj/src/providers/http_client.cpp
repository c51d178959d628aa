#include "recoding/providers/http_client.hpp"

#include <cstdlib>
#include <thread>

#include "recoding/error.hpp"
#include "recoding/providers/wire.hpp"

namespace recoding::providers {

using json = nlohmann::json;

namespace {

constexpr std::chrono::milliseconds kMaxBackoff{30'000};

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

class LimiterGuard {
 public:
  explicit LimiterGuard(ConcurrencyLimiter& l) : l_(l) { l_.acquire(); }
  ~LimiterGuard() { l_.release(); }
  LimiterGuard(const LimiterGuard&) = delete;
  LimiterGuard& operator=(const LimiterGuard&) = delete;

 private:
  ConcurrencyLimiter& l_;
};

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kPermanentProviderError, std::string("response is not JSON: ") + e.what());
  }
}

}  // namespace

void ConcurrencyLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return available_ > 0; });
  --available_;
}

void ConcurrencyLimiter::release() {
  {
    std::lock_guard lock(mu_);
    ++available_;
  }
  cv_.notify_one();
}

OpenAiCompatibleClient::OpenAiCompatibleClient(ProviderConfig cfg, std::unique_ptr<Transport> transport)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      limiter_(cfg_.max_concurrency),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
  cfg_.validate();
  headers_.emplace("Content-Type", "application/json");
  if (!cfg_.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key != nullptr && *key != '\0') {
      headers_.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
}

OpenAiCompatibleClient::OpenAiCompatibleClient(ProviderConfig cfg)
    : OpenAiCompatibleClient(cfg, make_http_transport(cfg.endpoint)) {}

std::string OpenAiCompatibleClient::send(std::string_view path, const std::string& body,
                                         double& latency_ms) {
  LimiterGuard guard(limiter_);
  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.retry_budget; ++attempt) {
    if (attempt > 0) {
      auto delay = cfg_.backoff_base * (1LL << std::min(attempt - 1, 16));
      sleeper_(std::min<std::chrono::milliseconds>(delay, kMaxBackoff));
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      auto resp = transport_->post(std::string(path), body, headers_, cfg_.timeout);
      latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                       .count();
      if (resp.status >= 200 && resp.status < 300) return std::move(resp.body);
      last_error = "HTTP " + std::to_string(resp.status) + ": " + resp.body.substr(0, 512);
      if (!retryable_status(resp.status)) {
        throw Error(ErrorCode::kPermanentProviderError, last_error);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRetryableTransport) throw;
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::kProviderUnavailable,
              "retries exhausted after " + std::to_string(cfg_.retry_budget + 1) +
                  " attempts: " + last_error);
}

CompletionResponse OpenAiCompatibleClient::complete(const CompletionRequest& request) {
  request.validate();
  double latency = 0.0;
  const auto body = send(wire::completion_path(request.mode),
                         wire::serialize(wire::completion_payload(request, cfg_)), latency);
  auto r = wire::parse_completion_response(parse_body(body), request.mode);
  if (r.backend_id.empty()) r.backend_id = cfg_.model;
  r.latency_ms = latency;
  return r;
}

ChatResponse OpenAiCompatibleClient::chat(const ChatRequest& request) {
  double latency = 0.0;
  const auto body =
      send(wire::kChatCompletionsPath, wire::serialize(wire::chat_payload(request, cfg_)), latency);
  auto r = wire::parse_chat_response(parse_body(body));
  if (r.backend_id.empty()) r.backend_id = cfg_.model;
  r.latency_ms = latency;
  return r;
}

std::vector<Embedding> OpenAiCompatibleClient::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::kInvalidRequest, "embed: no texts");
  double latency = 0.0;
  const auto body =
      send(wire::kEmbeddingsPath, wire::serialize(wire::embedding_payload(texts, cfg_)), latency);
  return wire::parse_embedding_response(parse_body(body), texts.size());
}

}  // namespace recoding::providers
