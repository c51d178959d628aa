#include "recoding/engine/sentence.hpp"

#include <cctype>

#include "recoding/util/text.hpp"

namespace recoding::engine {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

void append_part(std::string& out, std::string_view part) {
  if (part.empty()) return;
  if (!out.empty() && !text::ends_with_space(out)) out += ' ';
  out += part;
}

// True when text[line_start, dot) is an optional indent followed by digits.
bool is_list_marker(std::string_view text, std::size_t line_start, std::size_t dot) {
  std::size_t i = line_start;
  while (i < dot && (text[i] == ' ' || text[i] == '\t')) ++i;
  if (i == dot) return false;
  for (; i < dot; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  return true;
}

}  // namespace

std::string construct_input(std::string_view priming, std::string_view prompt,
                            std::string_view generated, std::string_view diverting) {
  std::string out;
  out.reserve(priming.size() + prompt.size() + generated.size() + diverting.size() + 2);
  out += priming;
  out += prompt;
  append_part(out, generated);
  append_part(out, diverting);
  return out;
}

SentenceSplit split_sentence(std::string_view text) {
  std::size_t line_start = 0;
  bool line_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      if (line_has_content) {
        return {std::string(text.substr(0, i + 1)), std::string(text.substr(i + 1))};
      }
      line_start = i + 1;
      continue;
    }
    if (!is_space(c)) line_has_content = true;
    if (c != '.' && c != '!' && c != '?') continue;
    if (c == '.' && is_list_marker(text, line_start, i)) continue;
    std::size_t end = i + 1;
    while (end < text.size() && (text[end] == '.' || text[end] == '!' || text[end] == '?')) ++end;
    while (end < text.size() && is_closer(text[end])) ++end;
    if (end < text.size() && !is_space(text[end])) {
      i = end - 1;
      continue;
    }
    if (end < text.size() && text[end] == '\n') ++end;
    return {std::string(text.substr(0, end)), std::string(text.substr(end))};
  }
  return {std::string(text), std::string()};
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string rest(text);
  while (!rest.empty()) {
    auto s = split_sentence(rest);
    out.push_back(std::move(s.sentence));
    rest = std::move(s.rest);
  }
  return out;
}

}  // namespace recoding::engine
