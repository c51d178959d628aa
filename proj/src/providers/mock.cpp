#include "recoding/providers/mock.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "recoding/error.hpp"
#include "recoding/util/hash.hpp"
#include "recoding/util/text.hpp"

namespace recoding::providers {
namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr int kConceptWords = 5;
constexpr std::string_view kPrimingOpen = "**Related to ";

std::string pseudo_word(std::uint64_t h, int syllables) {
  std::string w;
  for (int i = 0; i < syllables; ++i) {
    w += kConsonants[h % kConsonants.size()];
    h /= kConsonants.size();
    w += kVowels[h % kVowels.size()];
    h /= kVowels.size();
  }
  return w;
}

std::string concept_body(const MockWorld& world, int concept_id) {
  std::string body;
  for (int k = 0; k < kConceptWords; ++k) {
    const auto h = hash::combine(hash::combine(world.stem_map_seed ^ 0xb0d1ULL, concept_id), k);
    body += ' ';
    body += pseudo_word(h, 3);
  }
  body += ".\n";
  return body;
}

std::optional<std::string> leading_priming_noun(std::string_view input) {
  if (!input.starts_with(kPrimingOpen)) return std::nullopt;
  input.remove_prefix(kPrimingOpen.size());
  const auto end = input.find(":**");
  if (end == std::string_view::npos || end == 0) return std::nullopt;
  return text::ascii_lower(input.substr(0, end));
}

}  // namespace

void MockWorld::validate() const {
  if (concept_count < 2) throw Error(ErrorCode::kConfigError, "mock world needs K >= 2");
  if (distribution == BaseDistribution::kPeakedZipf && !(zipf_exponent > 0.0)) {
    throw Error(ErrorCode::kConfigError, "zipf exponent must be positive");
  }
}

std::optional<std::string> trailing_stem(std::string_view input) {
  if (input.empty() || text::ends_with_space(input)) return std::nullopt;
  const auto words = text::split_whitespace(input);
  if (words.empty()) return std::nullopt;
  const auto last = words.back();
  if (last.size() != 3) return std::nullopt;
  for (char c : last) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return text::ascii_lower(last);
}

int concept_for_key(const MockWorld& world, std::string_view key) {
  return static_cast<int>(hash::combine(world.stem_map_seed, key) %
                          static_cast<std::uint64_t>(world.concept_count));
}

std::string concept_sentence(const MockWorld& world, int concept_id) {
  const auto lead = hash::combine(world.stem_map_seed ^ 0x1eadULL, concept_id);
  return text::capitalize_first(pseudo_word(lead, 3)) + concept_body(world, concept_id);
}

std::string stem_continuation(const MockWorld& world, std::string_view stem, int concept_id) {
  const auto h = hash::combine(world.stem_map_seed ^ 0xf1a9ULL, text::ascii_lower(stem));
  return pseudo_word(h, 1) + concept_body(world, concept_id);
}

ConceptDistribution::ConceptDistribution(const MockWorld& world) {
  world.validate();
  cdf_.resize(world.concept_count);
  double total = 0.0;
  for (int k = 0; k < world.concept_count; ++k) {
    const double w = world.distribution == BaseDistribution::kUniform
                         ? 1.0
                         : 1.0 / std::pow(static_cast<double>(k + 1), world.zipf_exponent);
    total += w;
    cdf_[k] = total;
  }
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

int ConceptDistribution::draw(vocab::SeededSampler& sampler) const {
  const double u = sampler.next_unit();
  return static_cast<int>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
}

double ConceptDistribution::probability(int concept_id) const {
  return cdf_[concept_id] - (concept_id == 0 ? 0.0 : cdf_[concept_id - 1]);
}

MockCompletion mock_complete(const MockWorld& world, const ConceptDistribution& dist,
                             std::string_view input, vocab::SeededSampler& sampler) {
  if (auto stem = trailing_stem(input)) {
    const int c = concept_for_key(world, *stem);
    return {stem_continuation(world, *stem, c), c};
  }
  if (auto noun = leading_priming_noun(input)) {
    const int c = concept_for_key(world, "noun:" + *noun);
    return {concept_sentence(world, c), c};
  }
  const int c = dist.draw(sampler);
  return {concept_sentence(world, c), c};
}

MockCompletionModel::MockCompletionModel(MockWorld world, vocab::SeededSampler sampler)
    : world_(world), dist_(world_), sampler_(std::move(sampler)) {}

CompletionResponse MockCompletionModel::complete(const CompletionRequest& request) {
  request.validate();
  std::lock_guard lock(mu_);
  CompletionResponse r;
  r.backend_id = "mock-world";
  if (request.stop_at_sentence) {
    auto m = mock_complete(world_, dist_, request.input_text, sampler_);
    concepts_.push_back(m.concept_id);
    r.text = std::move(m.text);
  } else {
    while (estimate_tokens(r.text) < request.max_new_tokens) {
      auto m = mock_complete(world_, dist_, request.input_text, sampler_);
      concepts_.push_back(m.concept_id);
      r.text += m.text;
    }
  }
  r.usage.prompt_tokens = estimate_tokens(request.input_text);
  r.usage.completion_tokens = estimate_tokens(r.text);
  r.usage.reported = true;
  return r;
}

std::vector<int> MockCompletionModel::emitted_concepts() const {
  std::lock_guard lock(mu_);
  return concepts_;
}

MockEmbeddingModel::MockEmbeddingModel(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {}

Embedding MockEmbeddingModel::embed_one(std::string_view s) const {
  auto words = text::word_tokens(s);
  if (words.empty()) words.emplace_back(s);
  Embedding v(dimension_, 0.0);
  for (const auto& w : words) {
    const auto key = hash::combine(seed_, w);
    for (std::size_t j = 0; j < dimension_; ++j) {
      const auto h = hash::splitmix64(key + j);
      v[j] += static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
    }
  }
  normalize(v);
  return v;
}

std::vector<Embedding> MockEmbeddingModel::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::kInvalidRequest, "embed: no texts");
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

ScriptedChatModel::ScriptedChatModel(Script script, std::string backend_id)
    : script_(std::move(script)), backend_id_(std::move(backend_id)) {}

ScriptedChatModel::ScriptedChatModel(ScriptedChatModel&& other) noexcept
    : script_(std::move(other.script_)),
      backend_id_(std::move(other.backend_id_)),
      requests_(std::move(other.requests_)) {}

ScriptedChatModel ScriptedChatModel::fixed(std::string reply) {
  return ScriptedChatModel([reply](const ChatRequest&, std::size_t) { return reply; }, "fixed");
}

ScriptedChatModel ScriptedChatModel::identity() {
  return ScriptedChatModel(
      [](const ChatRequest& req, std::size_t) {
        for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it) {
          if (it->role == "user") return it->content;
        }
        return std::string();
      },
      "identity");
}

ChatResponse ScriptedChatModel::chat(const ChatRequest& request) {
  std::size_t index = 0;
  {
    std::lock_guard lock(mu_);
    index = requests_.size();
    requests_.push_back(request);
  }
  ChatResponse r;
  r.text = script_(request, index);
  r.backend_id = backend_id_;
  r.usage.completion_tokens = estimate_tokens(r.text);
  r.usage.reported = true;
  return r;
}

std::vector<ChatRequest> ScriptedChatModel::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

ScriptedCompletionModel::ScriptedCompletionModel(Script script) : script_(std::move(script)) {}

CompletionResponse ScriptedCompletionModel::complete(const CompletionRequest& request) {
  request.validate();
  std::size_t index = 0;
  {
    std::lock_guard lock(mu_);
    index = requests_.size();
    requests_.push_back(request);
  }
  CompletionResponse r;
  r.text = script_(request, index);
  r.backend_id = "scripted";
  return r;
}

std::vector<CompletionRequest> ScriptedCompletionModel::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

}  // namespace recoding::providers
