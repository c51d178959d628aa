#include "recoding/extraction/ideas.hpp"

#include <cctype>
#include <json.hpp>
#include <optional>

#include "recoding/error.hpp"
#include "recoding/util/text.hpp"

namespace recoding::extraction {
namespace {

using json = nlohmann::json;

constexpr std::string_view kBulletGlyph = "\xE2\x80\xA2";  // U+2022

constexpr std::string_view kExtractionInstruction =
    "Extract every distinct idea from the text the user provides, in the order they appear. "
    "Copy each idea as a short phrase without list markers. Return JSON of the form "
    "{\"ideas\": [\"...\", \"...\"]} and nothing else.";

// Length of a list marker at the start of `s` (including trailing spaces), or 0.
std::size_t marker_length(std::string_view s) {
  std::size_t n = 0;
  if (s.starts_with(kBulletGlyph)) {
    n = kBulletGlyph.size();
  } else if (!s.empty() && (s[0] == '-' || s[0] == '*' || s[0] == '+')) {
    n = 1;
  } else {
    while (n < s.size() && std::isdigit(static_cast<unsigned char>(s[n]))) ++n;
    if (n == 0 || n >= s.size() || (s[n] != '.' && s[n] != ')')) return 0;
    ++n;
  }
  if (n < s.size() && s[n] != ' ' && s[n] != '\t') return 0;
  while (n < s.size() && (s[n] == ' ' || s[n] == '\t')) ++n;
  return n;
}

std::string strip_markers(std::string_view line) {
  line = text::trim(line);
  while (auto n = marker_length(line)) line = text::trim(line.substr(n));
  if (line == "-" || line == "*" || line == kBulletGlyph) return {};
  return std::string(line);
}

std::optional<std::vector<std::string>> parse_idea_json(const std::string& reply) {
  auto body = text::trim(reply);
  // Tolerate fenced code blocks.
  if (body.starts_with("```")) {
    const auto nl = body.find('\n');
    const auto fence = body.rfind("```");
    if (nl != std::string_view::npos && fence > nl) body = text::trim(body.substr(nl + 1, fence - nl - 1));
  }
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) return std::nullopt;
  const json* list = nullptr;
  if (doc.is_array()) {
    list = &doc;
  } else if (doc.is_object() && doc.contains("ideas") && doc["ideas"].is_array()) {
    list = &doc["ideas"];
  }
  if (list == nullptr) return std::nullopt;
  std::vector<std::string> out;
  for (const auto& item : *list) {
    if (!item.is_string()) return std::nullopt;
    auto t = strip_markers(item.get<std::string>());
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::string_view to_string(ExtractionMode mode) {
  return mode == ExtractionMode::kBulletRules ? "bullet-rules" : "judge-assisted";
}

std::vector<std::string> IdeaSet::texts() const {
  std::vector<std::string> out;
  out.reserve(ideas.size());
  for (const auto& i : ideas) out.push_back(i.text);
  return out;
}

IdeaSet extract_bullets(std::string_view input) {
  IdeaSet set;
  std::size_t pos = 0;
  while (pos <= input.size()) {
    auto nl = input.find('\n', pos);
    if (nl == std::string_view::npos) nl = input.size();
    const auto line = input.substr(pos, nl - pos);
    pos = nl + 1;
    if (text::trim(line).empty()) continue;
    const bool indented = line[0] == ' ' || line[0] == '\t';
    auto content = strip_markers(line);
    if (content.empty()) continue;
    if (indented && !set.ideas.empty()) {
      set.ideas.back().text += ' ';
      set.ideas.back().text += content;
      continue;
    }
    set.ideas.push_back({std::move(content), static_cast<int>(set.ideas.size())});
  }
  if (set.ideas.empty()) throw Error(ErrorCode::kEmptyExtraction, "no ideas found");
  return set;
}

IdeaSet extract_judged(std::string_view input, providers::ChatModel& judge) {
  if (text::trim(input).empty()) throw Error(ErrorCode::kEmptyExtraction, "no ideas found");
  providers::ChatRequest req;
  req.temperature = 0.0;
  req.json_response = true;
  req.messages.push_back({"system", std::string(kExtractionInstruction)});
  req.messages.push_back({"user", std::string(input)});
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto reply = judge.chat(req);
    if (auto ideas = parse_idea_json(reply.text); ideas && !ideas->empty()) {
      IdeaSet set;
      set.mode = ExtractionMode::kJudgeAssisted;
      for (auto& t : *ideas) set.ideas.push_back({std::move(t), static_cast<int>(set.ideas.size())});
      return set;
    }
    req.messages.push_back({"assistant", reply.text});
    req.messages.push_back({"user", "Return only the JSON object {\"ideas\": [...]}."});
  }
  try {
    return extract_bullets(input);
  } catch (const Error&) {
    throw Error(ErrorCode::kJudgeParseError, "idea extraction reply unparseable after re-ask");
  }
}

}  // namespace recoding::extraction
