#include "recoding/vocab/vocabulary.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "recoding/error.hpp"
#include "recoding/util/text.hpp"
#include "recoding/util/utf8.hpp"

namespace recoding::vocab {
namespace {

constexpr std::string_view kPrimingOpen = "**Related to ";
constexpr std::string_view kPrimingClose = ":** ";

}  // namespace

std::string_view to_string(VocabKind kind) {
  switch (kind) {
    case VocabKind::kPrimingNoun: return "priming-noun";
    case VocabKind::kDivertingStem: return "diverting-stem";
    case VocabKind::kPivotPhrase: return "pivot-phrase";
    case VocabKind::kKeyword: return "keyword";
    case VocabKind::kEngineeredPhrase: return "engineered-phrase";
  }
  return "keyword";
}

VocabKind parse_kind(std::string_view name) {
  for (auto k : {VocabKind::kPrimingNoun, VocabKind::kDivertingStem, VocabKind::kPivotPhrase,
                 VocabKind::kKeyword, VocabKind::kEngineeredPhrase}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kConfigError, "unknown vocabulary kind: " + std::string(name));
}

Vocabulary make_vocabulary(std::string name, VocabKind kind, const std::vector<std::string>& lines,
                           std::string source, std::string language) {
  Vocabulary vocab{std::move(name), kind, {}, std::move(source), std::move(language)};
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto& raw : lines) {
    ++line_no;
    if (!utf8::is_valid(raw)) {
      throw Error(ErrorCode::kEncodingError,
                  vocab.source + ":" + std::to_string(line_no) + ": malformed UTF-8");
    }
    std::string entry(text::trim(raw));
    if (entry.empty()) continue;
    if (kind == VocabKind::kDivertingStem) {
      entry = text::ascii_lower(entry);
      if (utf8::scalar_count(entry) != 3) {
        throw Error(ErrorCode::kVocabularyInvalid, vocab.source + ":" + std::to_string(line_no) +
                                                       ": stem '" + entry +
                                                       "' is not three characters");
      }
    }
    if (kind == VocabKind::kPrimingNoun && text::has_space(entry)) {
      throw Error(ErrorCode::kVocabularyInvalid, vocab.source + ":" + std::to_string(line_no) +
                                                     ": noun '" + entry + "' is not a single word");
    }
    if (seen.insert(entry).second) vocab.entries.push_back(std::move(entry));
  }
  if (vocab.entries.empty()) {
    throw Error(ErrorCode::kVocabularyEmpty, "vocabulary '" + vocab.name + "' has no entries");
  }
  return vocab;
}

Vocabulary load_vocabulary(const std::filesystem::path& path, VocabKind kind,
                           std::string language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open vocabulary file " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return make_vocabulary(path.stem().string(), kind, lines, path.string(), std::move(language));
}

std::string serialize(const Vocabulary& vocab) {
  std::string out;
  for (const auto& e : vocab.entries) {
    out += e;
    out += '\n';
  }
  return out;
}

Vocabulary derive_stems(const Vocabulary& words) {
  if (words.kind == VocabKind::kDivertingStem) {
    throw Error(ErrorCode::kVocabularyInvalid, "derive_stems: input is already a stem vocabulary");
  }
  std::vector<std::string> stems;
  for (const auto& w : words.entries) {
    if (utf8::scalar_count(w) < 3) continue;
    stems.emplace_back(utf8::take_scalars(w, 3));
  }
  if (stems.empty()) {
    throw Error(ErrorCode::kVocabularyEmpty,
                "derive_stems: every word in '" + words.name + "' is shorter than 3 characters");
  }
  return make_vocabulary(words.name + "_stems", VocabKind::kDivertingStem, stems, words.source,
                         words.language);
}

const std::string& sample(const Vocabulary& vocab, SeededSampler& sampler) {
  if (vocab.entries.empty()) {
    throw Error(ErrorCode::kVocabularyEmpty, "cannot sample from empty vocabulary");
  }
  return vocab.entries[sampler.next_below(vocab.entries.size())];
}

std::string format_priming(std::string_view noun) {
  const auto trimmed = text::trim(noun);
  if (trimmed.empty() || trimmed.size() != noun.size() || text::has_space(noun)) {
    throw Error(ErrorCode::kInvalidNoun, "priming noun must be a single non-empty word");
  }
  std::string out(kPrimingOpen);
  out += text::ascii_upper(noun);
  out += kPrimingClose;
  return out;
}

std::optional<std::string> parse_priming(std::string_view phrase) {
  if (!phrase.starts_with(kPrimingOpen) || !phrase.ends_with(kPrimingClose)) return std::nullopt;
  phrase.remove_prefix(kPrimingOpen.size());
  phrase.remove_suffix(kPrimingClose.size());
  if (phrase.empty()) return std::nullopt;
  return std::string(phrase);
}

}  // namespace recoding::vocab
