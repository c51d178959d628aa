#include "recoding/vocab/manifest.hpp"

#include <fstream>
#include <json.hpp>

#include "recoding/error.hpp"

namespace recoding::vocab {

using json = nlohmann::json;

VocabularyRegistry VocabularyRegistry::load(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open manifest " + manifest_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, "manifest " + manifest_path.string() + ": " + e.what());
  }
  const auto base = manifest_path.parent_path();
  VocabularyRegistry reg;
  const auto& vocabs = doc.at("vocabularies");
  for (const auto& [name, node] : vocabs.items()) {
    ManifestEntry e;
    e.name = name;
    e.kind = parse_kind(node.at("kind").get<std::string>());
    e.language = node.value("language", "en");
    e.provenance = node.value("provenance", "");
    if (node.contains("path")) e.path = base / node.at("path").get<std::string>();
    e.derive_stems_from = node.value("derive_stems_from", "");
    if (e.path.empty() == e.derive_stems_from.empty()) {
      throw Error(ErrorCode::kConfigError,
                  "manifest entry '" + name + "' needs exactly one of path / derive_stems_from");
    }
    reg.entries_.emplace(name, std::move(e));
  }
  // File-backed entries first, then derived ones.
  for (const auto& [name, e] : reg.entries_) {
    if (e.path.empty()) continue;
    auto v = load_vocabulary(e.path, e.kind, e.language);
    v.name = name;
    reg.vocabularies_.emplace(name, std::move(v));
  }
  for (const auto& [name, e] : reg.entries_) {
    if (e.derive_stems_from.empty()) continue;
    auto v = derive_stems(reg.get(e.derive_stems_from));
    v.name = name;
    v.language = e.language;
    reg.vocabularies_.emplace(name, std::move(v));
  }
  return reg;
}

void VocabularyRegistry::add(Vocabulary vocab) {
  auto name = vocab.name;
  vocabularies_.insert_or_assign(std::move(name), std::move(vocab));
}

bool VocabularyRegistry::contains(const std::string& name) const {
  return vocabularies_.count(name) > 0;
}

const Vocabulary& VocabularyRegistry::get(const std::string& name) const {
  auto it = vocabularies_.find(name);
  if (it == vocabularies_.end()) {
    throw Error(ErrorCode::kConfigError, "unknown vocabulary: " + name);
  }
  return it->second;
}

}  // namespace recoding::vocab
