#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "recoding/providers/types.hpp"

namespace recoding::providers::wire {

inline constexpr std::string_view kSimulatedCompletionInstruction =
    "Simulate a completion API to complete the next sentence.";

inline constexpr std::string_view kCompletionsPath = "/completions";
inline constexpr std::string_view kChatCompletionsPath = "/chat/completions";
inline constexpr std::string_view kEmbeddingsPath = "/embeddings";

std::string_view completion_path(CompletionMode mode);

// Request bodies. Object keys serialize in sorted order, so the output of
// serialize() is byte-stable for a given (request, config).
nlohmann::json completion_payload(const CompletionRequest& req, const ProviderConfig& cfg);
nlohmann::json chat_payload(const ChatRequest& req, const ProviderConfig& cfg);
nlohmann::json embedding_payload(const std::vector<std::string>& texts, const ProviderConfig& cfg);

std::string serialize(const nlohmann::json& payload);

// Response parsing. Throw PermanentProviderError on schema mismatch.
CompletionResponse parse_completion_response(const nlohmann::json& body, CompletionMode mode);
ChatResponse parse_chat_response(const nlohmann::json& body);
std::vector<Embedding> parse_embedding_response(const nlohmann::json& body, std::size_t expected);

}  // namespace recoding::providers::wire
