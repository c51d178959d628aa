#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recoding/vocab/sampler.hpp"

namespace recoding::vocab {

enum class VocabKind {
  kPrimingNoun,
  kDivertingStem,
  kPivotPhrase,
  kKeyword,
  kEngineeredPhrase,
};

std::string_view to_string(VocabKind kind);
VocabKind parse_kind(std::string_view name);

struct Vocabulary {
  std::string name;
  VocabKind kind = VocabKind::kKeyword;
  std::vector<std::string> entries;
  std::string source;
  std::string language = "en";

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }
};

// Normalizes and validates raw lines into a vocabulary.
// Stems are lower-cased; every kind is trimmed and deduplicated keeping the
// first occurrence. Throws VocabularyEmpty, EncodingError, VocabularyInvalid.
Vocabulary make_vocabulary(std::string name, VocabKind kind, const std::vector<std::string>& lines,
                           std::string source = "inline", std::string language = "en");

Vocabulary load_vocabulary(const std::filesystem::path& path, VocabKind kind,
                           std::string language = "en");

// One entry per line, LF terminated.
std::string serialize(const Vocabulary& vocab);

// First three scalars of each word; shorter words are dropped.
Vocabulary derive_stems(const Vocabulary& words);

const std::string& sample(const Vocabulary& vocab, SeededSampler& sampler);

// "**Related to FOOD:** " for "food". Throws InvalidNoun.
std::string format_priming(std::string_view noun);

// Inverse of format_priming on its own output.
std::optional<std::string> parse_priming(std::string_view phrase);

}  // namespace recoding::vocab
