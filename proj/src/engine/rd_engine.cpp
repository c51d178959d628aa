#include "recoding/engine/rd_engine.hpp"

#include "recoding/engine/sentence.hpp"
#include "recoding/error.hpp"
#include "recoding/util/text.hpp"

namespace recoding::engine {

using providers::CompletionRequest;

namespace {

// Reported usage covers the whole reply, so it only applies when nothing was
// cut off after the first sentence.
std::int64_t sentence_tokens(const providers::Usage& usage, std::string_view text, bool truncated) {
  return usage.reported && !truncated ? usage.completion_tokens : providers::estimate_tokens(text);
}

void append_sentence(GenerationTrace& trace, SentenceRecord rec, std::string_view body) {
  const bool needs_sep = !trace.raw.empty() && !text::ends_with_space(trace.raw) &&
                         !text::starts_with_space(body);
  rec.text = needs_sep ? " " + std::string(body) : std::string(body);
  rec.begin = trace.raw.size();
  trace.raw += rec.text;
  rec.end = trace.raw.size();
  trace.token_length += rec.tokens;
  trace.sentences.push_back(std::move(rec));
}

std::size_t history_chars(const RdConfig& cfg) {
  std::size_t n = cfg.prompt.size();
  for (const auto& m : cfg.history) n += m.content.size();
  return n;
}

void run_single_shot(const RdConfig& cfg, providers::CompletionModel& completer,
                     GenerationTrace& trace) {
  CompletionRequest req;
  req.input_text = cfg.prompt;
  req.max_new_tokens = cfg.token_limit;
  req.temperature = cfg.temperature;
  req.stop_at_sentence = false;
  req.mode = cfg.mode;
  req.history = cfg.history;
  trace.requests.push_back(req);
  trace.iterations = 1;
  providers::CompletionResponse resp;
  try {
    resp = completer.complete(req);
  } catch (const Error& e) {
    trace.termination = Termination::kProviderError;
    trace.error = e.what();
    return;
  }
  trace.usage += resp.usage;
  if (text::trim(resp.text).empty()) {
    trace.termination = Termination::kStalled;
    trace.error = "empty completion";
    return;
  }
  for (auto& s : split_sentences(resp.text)) {
    SentenceRecord rec;
    rec.request_input = cfg.prompt;
    rec.completion = s;
    rec.tokens = providers::estimate_tokens(s);
    append_sentence(trace, std::move(rec), s);
  }
  if (resp.usage.reported) trace.token_length = resp.usage.completion_tokens;
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kBudgetReached: return "budget-reached";
    case Termination::kSafetyCap: return "safety-cap";
    case Termination::kStalled: return "stalled";
    case Termination::kProviderError: return "provider-error";
    case Termination::kHistoryOverflow: return "history-overflow";
  }
  return "";
}

int safety_cap(int token_limit) { return 4 * ((token_limit + 4) / 5); }

void RdConfig::validate() const {
  if (token_limit < 1) throw Error(ErrorCode::kConfigError, "token limit must be >= 1");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::kConfigError, "temperature must lie in [0, 2]");
  }
  policy.validate();
  if (single_shot && !policy.empty()) {
    throw Error(ErrorCode::kConfigError, "single-shot generation cannot carry an edit policy");
  }
}

CorrectionResult correct(std::string_view raw, providers::ChatModel& corrector) {
  providers::ChatRequest req;
  req.temperature = 0.0;
  req.max_tokens = 1024;
  req.messages.push_back({"system", std::string(kGrammarCorrectorPrompt)});
  req.messages.push_back({"user", std::string(raw)});
  auto reply = corrector.chat(req);
  CorrectionResult out;
  out.usage = reply.usage;
  if (text::trim(reply.text).empty()) {
    out.text = std::string(raw);
    out.warning = true;
  } else {
    out.text = std::move(reply.text);
  }
  return out;
}

GenerationTrace run_rd(const RdConfig& cfg, providers::CompletionModel& completer,
                       providers::ChatModel* corrector) {
  cfg.validate();
  if (cfg.correction && corrector == nullptr) {
    throw Error(ErrorCode::kConfigError, "correction enabled without a corrector");
  }
  GenerationTrace trace;
  if (cfg.max_history_chars > 0 && history_chars(cfg) > cfg.max_history_chars) {
    trace.termination = Termination::kHistoryOverflow;
    trace.error = "chat history of " + std::to_string(history_chars(cfg)) +
                  " chars exceeds limit " + std::to_string(cfg.max_history_chars);
    return trace;
  }

  if (cfg.single_shot) {
    run_single_shot(cfg, completer, trace);
  } else {
    PolicyStreams streams(cfg.policy, vocab::SeededSampler(cfg.seed, "policy"));
    const int cap = safety_cap(cfg.token_limit);
    int empty_streak = 0;
    int sentence_index = 0;
    while (trace.token_length < cfg.token_limit) {
      if (trace.iterations >= cap) {
        trace.termination = Termination::kSafetyCap;
        break;
      }
      ++trace.iterations;
      auto decision = apply_policy(
          cfg.policy, GenerationState{cfg.prompt, trace.raw, sentence_index}, streams);

      for (const auto& inserted : decision.inserted_sentences) {
        SentenceRecord rec;
        rec.inserted = true;
        rec.completion = inserted;
        rec.tokens = providers::estimate_tokens(inserted);
        for (const auto& inj : decision.injections) {
          if (inj.placement == Placement::kInsertedSentence && inj.rendered == inserted) {
            rec.injections.push_back(inj);
          }
        }
        std::string body = inserted;
        if (!text::ends_with_space(body)) body += ' ';
        append_sentence(trace, std::move(rec), body);
        ++sentence_index;
      }

      CompletionRequest req;
      req.input_text =
          construct_input(decision.prefix, cfg.prompt, trace.raw, decision.sentence_start);
      req.max_new_tokens = cfg.token_limit;
      req.temperature = cfg.temperature;
      req.stop_at_sentence = true;
      req.mode = cfg.mode;
      trace.requests.push_back(req);

      providers::CompletionResponse resp;
      try {
        resp = completer.complete(req);
      } catch (const Error& e) {
        trace.termination = Termination::kProviderError;
        trace.error = e.what();
        break;
      }
      trace.usage += resp.usage;

      auto cut = split_sentence(resp.text);
      if (text::trim(cut.sentence).empty()) {
        if (++empty_streak >= 2) {
          trace.termination = Termination::kStalled;
          trace.error = "two consecutive empty completions";
          break;
        }
        continue;
      }
      empty_streak = 0;

      SentenceRecord rec;
      rec.priming = decision.prefix;
      rec.diverting_token = decision.sentence_start;
      rec.request_input = req.input_text;
      rec.completion = cut.sentence;
      rec.usage = resp.usage;
      rec.tokens = sentence_tokens(resp.usage, decision.sentence_start + cut.sentence,
                                   !text::trim(cut.rest).empty());
      for (auto& inj : decision.injections) {
        if (inj.placement != Placement::kInsertedSentence) rec.injections.push_back(std::move(inj));
      }
      append_sentence(trace, std::move(rec), decision.sentence_start + cut.sentence);
      ++sentence_index;
    }
  }

  if (cfg.correction && !trace.raw.empty() && trace.termination != Termination::kProviderError) {
    try {
      auto c = correct(trace.raw, *corrector);
      trace.corrected = std::move(c.text);
      trace.correction_warning = c.warning;
      trace.correction_usage = c.usage;
    } catch (const Error& e) {
      trace.termination = Termination::kProviderError;
      trace.error = std::string("correction failed: ") + e.what();
    }
  }
  return trace;
}

}  // namespace recoding::engine
