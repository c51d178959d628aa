#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recoding/providers/types.hpp"
#include "recoding/vocab/sampler.hpp"

namespace recoding::providers {

enum class JudgeScale { kRelevance, kDiversity };

enum class Verdict {
  kIrrelevant,
  kPartiallyRelevant,
  kRelevant,
  kAlmostIdentical,
  kPartiallySimilar,
  kMostlyDifferent,
};

std::string_view label(Verdict v);
JudgeScale scale_of(Verdict v);
Verdict parse_verdict_label(std::string_view name);

struct JudgeTemplate {
  JudgeScale scale;
  std::string text;  // placeholders: {scale[0..2]}, {user prompt}, {response}, {response0}, {response1}
};

const JudgeTemplate& relevance_template();
const JudgeTemplate& diversity_template();

struct JudgeVerdict {
  JudgeScale scale = JudgeScale::kRelevance;
  Verdict verdict = Verdict::kRelevant;
  std::array<Verdict, 3> label_order{};
  std::string reply;
  int attempts = 1;
};

using Slots = std::map<std::string, std::string>;

// Substitutes slots and the shuffled scale labels. Throws ConfigError when a
// placeholder has no slot.
std::string render(const JudgeTemplate& tmpl, const Slots& slots,
                   const std::array<Verdict, 3>& label_order);

// Latest scale label named in `reply`, if any.
std::optional<Verdict> parse_verdict(JudgeScale scale, std::string_view reply);

// Renders with a seeded label shuffle, asks `model`, parses the verdict.
// An unparseable reply gets one re-ask; a second failure throws
// JudgeParseError.
JudgeVerdict judge(const JudgeTemplate& tmpl, const Slots& slots, ChatModel& model,
                   vocab::SeededSampler& sampler);

}  // namespace recoding::providers
