#include "recoding/engine/policy.hpp"

#include "recoding/error.hpp"
#include "recoding/util/text.hpp"

namespace recoding::engine {
namespace {

void append_sentence_start(std::string& out, std::string_view piece) {
  if (piece.empty()) return;
  if (!out.empty() && !text::ends_with_space(out)) out += ' ';
  out += piece;
}

}  // namespace

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kInjectStem: return "inject-stem";
    case ActionKind::kInjectKeyword: return "inject-keyword";
    case ActionKind::kInjectPivot: return "inject-pivot";
    case ActionKind::kInjectPriming: return "inject-priming";
    case ActionKind::kCallback: return "callback";
  }
  return "";
}

void EditPolicy::validate() const {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    const auto where = "policy rule " + std::to_string(i);
    if (!(r.trigger.probability >= 0.0 && r.trigger.probability <= 1.0)) {
      throw Error(ErrorCode::kConfigError, where + ": probability outside [0,1]");
    }
    switch (r.action.kind) {
      case ActionKind::kInjectStem:
      case ActionKind::kInjectPivot:
      case ActionKind::kInjectPriming:
        if (r.action.vocabulary == nullptr || r.action.vocabulary->empty()) {
          throw Error(ErrorCode::kConfigError, where + ": action needs a vocabulary");
        }
        break;
      case ActionKind::kInjectKeyword:
        if (text::trim(r.action.keyword).empty()) {
          throw Error(ErrorCode::kConfigError, where + ": empty keyword");
        }
        break;
      case ActionKind::kCallback:
        if (!r.action.callback) throw Error(ErrorCode::kConfigError, where + ": missing callback");
        break;
    }
  }
}

PolicyStreams::PolicyStreams(const EditPolicy& policy, const vocab::SeededSampler& root) {
  for (std::size_t i = 0; i < policy.rules.size(); ++i) {
    const auto id = "rule" + std::to_string(i);
    triggers_.push_back(root.fork(id + "/trigger"));
    draws_.push_back(root.fork(id + "/draw"));
  }
}

PolicyDecision apply_policy(const EditPolicy& policy, const GenerationState& state,
                            PolicyStreams& streams) {
  PolicyDecision d;
  const bool first_step = streams.steps++ == 0;
  for (std::size_t i = 0; i < policy.rules.size(); ++i) {
    const auto& rule = policy.rules[i];
    bool fire = false;
    switch (rule.trigger.kind) {
      case TriggerKind::kEverySentenceStart:
        fire = true;
        break;
      case TriggerKind::kSentenceStartWithProbability:
        fire = streams.trigger_stream(i).bernoulli(rule.trigger.probability);
        break;
      case TriggerKind::kPromptPrefixOnce:
        fire = first_step;
        break;
    }
    if (!fire) continue;

    Injection inj;
    inj.rule_index = static_cast<int>(i);
    inj.action = rule.action.kind;
    auto& draw = streams.draw_stream(i);
    switch (rule.action.kind) {
      case ActionKind::kInjectPriming:
        inj.placement = Placement::kPromptPrefix;
        inj.value = vocab::sample(*rule.action.vocabulary, draw);
        inj.rendered = vocab::format_priming(inj.value);
        break;
      case ActionKind::kInjectStem:
        inj.placement = Placement::kSentenceStart;
        inj.value = vocab::sample(*rule.action.vocabulary, draw);
        inj.rendered = d.sentence_start.empty() ? text::capitalize_first(inj.value) : inj.value;
        break;
      case ActionKind::kInjectKeyword:
        inj.placement = Placement::kSentenceStart;
        inj.value = rule.action.keyword;
        inj.rendered = inj.value;
        break;
      case ActionKind::kInjectPivot:
        inj.placement = Placement::kSentenceStart;
        inj.value = vocab::sample(*rule.action.vocabulary, draw);
        inj.rendered =
            (d.sentence_start.empty() ? text::capitalize_first(inj.value) : inj.value) + ", ";
        break;
      case ActionKind::kCallback: {
        auto r = rule.action.callback(state);
        if (!r || text::trim(r->text).empty()) continue;
        inj.placement = r->placement;
        inj.value = r->text;
        inj.rendered = r->text;
        break;
      }
    }
    switch (inj.placement) {
      case Placement::kPromptPrefix:
        if (rule.trigger.kind == TriggerKind::kPromptPrefixOnce) {
          streams.persistent_prefix += inj.rendered;
        } else {
          d.prefix += inj.rendered;
        }
        break;
      case Placement::kSentenceStart:
        append_sentence_start(d.sentence_start, inj.rendered);
        break;
      case Placement::kInsertedSentence:
        d.inserted_sentences.push_back(inj.rendered);
        break;
    }
    d.injections.push_back(std::move(inj));
  }
  d.prefix = streams.persistent_prefix + d.prefix;
  return d;
}

EditPolicy recoding_policy(const vocab::Vocabulary* priming, const vocab::Vocabulary* diverting) {
  EditPolicy p;
  if (priming != nullptr) p.rules.push_back({Trigger::every_sentence(), Action::inject_priming(*priming)});
  if (diverting != nullptr) {
    p.rules.push_back({Trigger::every_sentence(), Action::inject_stem(*diverting)});
  }
  return p;
}

PolicyCallback llm_ad_callback(providers::ChatModel& model, std::string product) {
  return [&model, product = std::move(product)](
             const GenerationState& state) -> std::optional<CallbackInjection> {
    if (text::trim(state.generated).empty()) return std::nullopt;
    providers::ChatRequest req;
    req.temperature = 0.0;
    req.max_tokens = 80;
    req.messages.push_back(
        {"system",
         "You place product mentions into generated text. Read the text so far. If the most "
         "recent sentence discusses a need that " +
             product +
             " addresses, reply with one natural sentence recommending " + product +
             " that could follow it. Otherwise reply with exactly NONE."});
    req.messages.push_back({"user", std::string(state.generated)});
    auto reply = model.chat(req);
    const auto t = text::trim(reply.text);
    if (t.empty() || t == "NONE") return std::nullopt;
    return CallbackInjection{Placement::kInsertedSentence, std::string(t)};
  };
}

}  // namespace recoding::engine
