#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "recoding/providers/types.hpp"

namespace recoding::extraction {

enum class ExtractionMode { kBulletRules, kJudgeAssisted };

std::string_view to_string(ExtractionMode mode);

struct Idea {
  std::string text;
  int index = 0;

  bool operator==(const Idea&) const = default;
};

struct IdeaSet {
  std::string run_id;
  std::vector<Idea> ideas;
  ExtractionMode mode = ExtractionMode::kBulletRules;

  std::vector<std::string> texts() const;
};

inline constexpr std::string_view kBulletFormattingPrefix =
    "Respond in bullet points. Do NOT include sub-bullets. Limit each point to 10 words.";

// One idea per top-level line, list markers ("-", "*", "•", "1.", "1)")
// stripped. Indented lines fold into the preceding idea. Throws
// EmptyExtraction when nothing remains.
IdeaSet extract_bullets(std::string_view text);

// Asks `judge` for a JSON list of ideas; one re-ask on unparseable output,
// then falls back to bullet rules. Throws EmptyExtraction on blank input and
// JudgeParseError when neither route yields ideas.
IdeaSet extract_judged(std::string_view text, providers::ChatModel& judge);

}  // namespace recoding::extraction
