#include "recoding/providers/wire.hpp"

#include "recoding/error.hpp"

namespace recoding::providers::wire {

using json = nlohmann::json;

namespace {

json message(std::string_view role, std::string_view content) {
  return json{{"role", role}, {"content", content}};
}

Usage parse_usage(const json& body) {
  Usage u;
  if (auto it = body.find("usage"); it != body.end() && it->is_object()) {
    u.prompt_tokens = it->value("prompt_tokens", 0);
    u.completion_tokens = it->value("completion_tokens", 0);
    u.reported = true;
  }
  return u;
}

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::kPermanentProviderError, "unexpected response shape: " + what);
}

}  // namespace

std::string_view completion_path(CompletionMode mode) {
  return mode == CompletionMode::kRealCompletion ? kCompletionsPath : kChatCompletionsPath;
}

json completion_payload(const CompletionRequest& req, const ProviderConfig& cfg) {
  json p;
  p["model"] = cfg.model;
  p["max_tokens"] = req.max_new_tokens;
  p["temperature"] = req.temperature;
  switch (req.mode) {
    case CompletionMode::kRealCompletion:
      p["prompt"] = req.input_text;
      break;
    case CompletionMode::kSimulatedCompletion:
      p["messages"] = json::array({message("system", kSimulatedCompletionInstruction),
                                   message("user", req.input_text)});
      break;
    case CompletionMode::kChat: {
      json msgs = json::array();
      for (const auto& m : req.history) msgs.push_back(message(m.role, m.content));
      msgs.push_back(message("user", req.input_text));
      p["messages"] = std::move(msgs);
      break;
    }
  }
  return p;
}

json chat_payload(const ChatRequest& req, const ProviderConfig& cfg) {
  json msgs = json::array();
  for (const auto& m : req.messages) msgs.push_back(message(m.role, m.content));
  json p{{"model", cfg.model},
         {"messages", std::move(msgs)},
         {"temperature", req.temperature},
         {"max_tokens", req.max_tokens}};
  if (req.json_response) p["response_format"] = json{{"type", "json_object"}};
  return p;
}

json embedding_payload(const std::vector<std::string>& texts, const ProviderConfig& cfg) {
  return json{{"model", cfg.model}, {"input", texts}};
}

std::string serialize(const json& payload) { return payload.dump(); }

CompletionResponse parse_completion_response(const json& body, CompletionMode mode) {
  CompletionResponse r;
  const auto choices = body.find("choices");
  if (choices == body.end() || !choices->is_array() || choices->empty()) schema_error("choices");
  const auto& first = choices->front();
  if (mode == CompletionMode::kRealCompletion) {
    if (!first.contains("text") || !first["text"].is_string()) schema_error("choices[0].text");
    r.text = first["text"].get<std::string>();
  } else {
    const auto& msg = first.value("message", json::object());
    const auto content = msg.find("content");
    if (content == msg.end()) schema_error("choices[0].message.content");
    r.text = content->is_string() ? content->get<std::string>() : std::string();
  }
  r.usage = parse_usage(body);
  r.backend_id = body.value("model", "");
  return r;
}

ChatResponse parse_chat_response(const json& body) {
  const auto c = parse_completion_response(body, CompletionMode::kChat);
  return ChatResponse{c.text, c.usage, c.backend_id, c.latency_ms};
}

std::vector<Embedding> parse_embedding_response(const json& body, std::size_t expected) {
  const auto data = body.find("data");
  if (data == body.end() || !data->is_array()) schema_error("data");
  std::vector<Embedding> out(data->size());
  for (std::size_t i = 0; i < data->size(); ++i) {
    const auto& item = (*data)[i];
    const std::size_t idx = item.value("index", i);
    if (idx >= out.size()) schema_error("data[].index");
    out[idx] = item.at("embedding").get<Embedding>();
    normalize(out[idx]);
  }
  if (out.size() != expected) schema_error("embedding count");
  return out;
}

}  // namespace recoding::providers::wire
