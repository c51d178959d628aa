#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "recoding/vocab/vocabulary.hpp"

namespace recoding::vocab {

struct ManifestEntry {
  std::string name;
  VocabKind kind = VocabKind::kKeyword;
  std::string language = "en";
  std::filesystem::path path;     // empty for derived entries
  std::string derive_stems_from;  // empty for file-backed entries
  std::string provenance;
};

/// Named vocabularies resolved from a manifest file.
///
/// The manifest is JSON: {"vocabularies": {name: {path|derive_stems_from,
/// kind, language, provenance}}}. Relative paths resolve against the
/// manifest's directory. Entries are loaded eagerly and immutable afterwards.
class VocabularyRegistry {
 public:
  static VocabularyRegistry load(const std::filesystem::path& manifest_path);

  void add(Vocabulary vocab);
  bool contains(const std::string& name) const;
  const Vocabulary& get(const std::string& name) const;
  const std::map<std::string, ManifestEntry>& manifest() const { return entries_; }
  const std::map<std::string, Vocabulary>& all() const { return vocabularies_; }

 private:
  std::map<std::string, ManifestEntry> entries_;
  std::map<std::string, Vocabulary> vocabularies_;
};

}  // namespace recoding::vocab
