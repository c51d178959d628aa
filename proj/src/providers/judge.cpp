#include "recoding/providers/judge.hpp"

#include <algorithm>
#include <cctype>

#include "recoding/error.hpp"
#include "recoding/util/text.hpp"

namespace recoding::providers {
namespace {

constexpr std::array<Verdict, 3> kRelevanceLabels{Verdict::kIrrelevant, Verdict::kPartiallyRelevant,
                                                  Verdict::kRelevant};
constexpr std::array<Verdict, 3> kDiversityLabels{
    Verdict::kAlmostIdentical, Verdict::kPartiallySimilar, Verdict::kMostlyDifferent};

const std::array<Verdict, 3>& labels_for(JudgeScale scale) {
  return scale == JudgeScale::kRelevance ? kRelevanceLabels : kDiversityLabels;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::string_view label(Verdict v) {
  switch (v) {
    case Verdict::kIrrelevant: return "Irrelevant";
    case Verdict::kPartiallyRelevant: return "Partially Relevant";
    case Verdict::kRelevant: return "Relevant";
    case Verdict::kAlmostIdentical: return "Almost Identical";
    case Verdict::kPartiallySimilar: return "Partially Similar";
    case Verdict::kMostlyDifferent: return "Mostly Different";
  }
  return "";
}

JudgeScale scale_of(Verdict v) {
  switch (v) {
    case Verdict::kIrrelevant:
    case Verdict::kPartiallyRelevant:
    case Verdict::kRelevant:
      return JudgeScale::kRelevance;
    default:
      return JudgeScale::kDiversity;
  }
}

Verdict parse_verdict_label(std::string_view name) {
  const auto lower = text::ascii_lower(name);
  for (auto scale : {JudgeScale::kRelevance, JudgeScale::kDiversity}) {
    for (auto v : labels_for(scale)) {
      if (text::ascii_lower(label(v)) == lower) return v;
    }
  }
  throw Error(ErrorCode::kJudgeParseError, "unknown verdict label: " + std::string(name));
}

const JudgeTemplate& relevance_template() {
  static const JudgeTemplate t{
      JudgeScale::kRelevance,
      "You are an AI assistant tasked with evaluating the relevance of a provided passage to a "
      "given user prompt.\n"
      "\n"
      "Provide your reasoning and classify the passage as \"{scale[0]}\", \"{scale[1]}\", or "
      "\"{scale[2]}\".\n"
      "\n"
      "User prompt: {user prompt}\n"
      "\n"
      "Passage to evaluate: {response}"};
  return t;
}

const JudgeTemplate& diversity_template() {
  static const JudgeTemplate t{
      JudgeScale::kDiversity,
      "You are an AI assistant. Your task is to evaluate the similarity between two passages "
      "based on the user prompt provided. Carefully consider and compare the following aspects: "
      "1) Concepts presented, 2) Writing style, 3) Tone of voice, 4) Perspectives, and 5) "
      "Opinions.\n"
      "\n"
      "- For creative writing, pay close attention to the story line. If they are different, "
      "then classify as \"Mostly Different\".\n"
      "\n"
      "- For argumentative essay, pay close attention to the arguments, logic and examples used. "
      "If these elements are different, then classify as \"Mostly Different\".\n"
      "\n"
      "- For history and science questions, pay close attention to the concepts, perspectives, "
      "opinions, and the tone used. \n"
      "\n"
      "If these elements are different, then classify as \"Mostly Different\".\n"
      "After analyzing, provide a brief explanation of your reasoning. Then, classify the "
      "passages into one of these categories:\n"
      "\"{scale[0]}\",\n"
      "\"{scale[1]}\",\n"
      "\"{scale[2]}\",\n"
      "\n"
      "User prompt: {user prompt}\n"
      "\n"
      "Passage 1: {response0}\n"
      "\n"
      "Passage 2: {response1}"};
  return t;
}

std::string render(const JudgeTemplate& tmpl, const Slots& slots,
                   const std::array<Verdict, 3>& label_order) {
  std::string out = tmpl.text;
  for (std::size_t i = 0; i < 3; ++i) {
    replace_all(out, "{scale[" + std::to_string(i) + "]}", label(label_order[i]));
  }
  // Single pass over placeholders so slot values are never re-expanded.
  std::string result;
  std::size_t pos = 0;
  while (pos < out.size()) {
    const auto open = out.find('{', pos);
    if (open == std::string::npos) {
      result.append(out, pos, std::string::npos);
      break;
    }
    const auto close = out.find('}', open);
    result.append(out, pos, open - pos);
    if (close == std::string::npos) {
      result.append(out, open, std::string::npos);
      break;
    }
    const auto key = out.substr(open + 1, close - open - 1);
    auto it = slots.find(key);
    if (it == slots.end()) {
      throw Error(ErrorCode::kConfigError, "judge template slot '" + key + "' not provided");
    }
    result += it->second;
    pos = close + 1;
  }
  return result;
}

std::optional<Verdict> parse_verdict(JudgeScale scale, std::string_view reply) {
  const auto hay = text::ascii_lower(reply);
  std::optional<Verdict> best;
  std::size_t best_end = 0;
  std::size_t best_len = 0;
  for (auto v : labels_for(scale)) {
    const auto needle = text::ascii_lower(label(v));
    std::size_t pos = hay.find(needle);
    while (pos != std::string::npos) {
      const std::size_t end = pos + needle.size();
      const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]);
      const bool right_ok = end == hay.size() || !is_word_char(hay[end]);
      if (left_ok && right_ok &&
          (!best || end > best_end || (end == best_end && needle.size() > best_len))) {
        best = v;
        best_end = end;
        best_len = needle.size();
      }
      pos = hay.find(needle, pos + 1);
    }
  }
  return best;
}

JudgeVerdict judge(const JudgeTemplate& tmpl, const Slots& slots, ChatModel& model,
                   vocab::SeededSampler& sampler) {
  JudgeVerdict out;
  out.scale = tmpl.scale;
  out.label_order = labels_for(tmpl.scale);
  // Fisher-Yates with the seeded stream.
  for (std::size_t i = out.label_order.size() - 1; i > 0; --i) {
    std::swap(out.label_order[i], out.label_order[sampler.next_below(i + 1)]);
  }
  ChatRequest req;
  req.temperature = 0.0;
  req.max_tokens = 512;
  req.messages.push_back({"user", render(tmpl, slots, out.label_order)});
  auto reply = model.chat(req);
  if (auto v = parse_verdict(tmpl.scale, reply.text)) {
    out.verdict = *v;
    out.reply = std::move(reply.text);
    return out;
  }
  req.messages.push_back({"assistant", reply.text});
  std::string reask = "Reply with exactly one of: ";
  for (std::size_t i = 0; i < 3; ++i) {
    reask += "\"" + std::string(label(out.label_order[i])) + "\"";
    reask += i < 2 ? ", " : ".";
  }
  req.messages.push_back({"user", reask});
  reply = model.chat(req);
  out.attempts = 2;
  if (auto v = parse_verdict(tmpl.scale, reply.text)) {
    out.verdict = *v;
    out.reply = std::move(reply.text);
    return out;
  }
  throw Error(ErrorCode::kJudgeParseError,
              "judge reply names no scale label after re-ask: " + reply.text.substr(0, 200));
}

}  // namespace recoding::providers
