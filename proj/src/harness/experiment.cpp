#include "recoding/harness/experiment.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <thread>

#include "recoding/engine/variants.hpp"
#include "recoding/error.hpp"
#include "recoding/extraction/ideas.hpp"
#include "recoding/providers/http_client.hpp"
#include "recoding/providers/mock.hpp"
#include "recoding/providers/wire.hpp"
#include "recoding/util/hash.hpp"
#include "recoding/util/text.hpp"

namespace recoding::harness {
namespace {

using nlohmann::json;

struct Group {
  const PromptSpec* prompt;
  std::string method;
  std::vector<std::size_t> slots;  // writer slot per pending run, by run index
  std::vector<int> pending;        // pending run indices, ascending
};

RunRecord run_cell(const ExperimentConfig& cfg, const Providers& providers,
                   const vocab::VocabularyRegistry& vocab, const PromptSpec& prompt,
                   const std::string& method, int run_index,
                   const std::vector<std::string>& prior_outputs) {
  RunRecord rec;
  rec.id = {prompt.id, method, run_index};
  rec.seed = cell_seed(cfg.seed, rec.id);
  rec.started_at = utc_timestamp();
  try {
    engine::VariantContext ctx;
    ctx.prompt = prompt.full_text();
    ctx.token_limit = cfg.token_limit();
    ctx.temperature = cfg.temperature;
    ctx.seed = rec.seed;
    ctx.run_index = run_index;
    ctx.vocabularies = &vocab;
    ctx.rd_mode = cfg.providers.rd_mode;
    ctx.od_mode = cfg.providers.od_mode;
    ctx.prior_outputs = prior_outputs;
    ctx.max_history_chars = cfg.max_history_chars;
    const auto rd = engine::variant_factory(engine::parse_variant(method), ctx);

    auto completer = providers.completion(rec.seed);
    const auto trace = engine::run_rd(rd, *completer, providers.corrector.get());

    const auto wire_cfg =
        cfg.providers.provider_config(cfg.providers.completion_model, cfg.concurrency);
    for (const auto& req : trace.requests) {
      rec.request_digests.push_back(
          hash::sha256_hex(providers::wire::serialize(providers::wire::completion_payload(req, wire_cfg))));
    }
    rec.trace = trace_to_json(trace, rec.request_digests);
    rec.output = trace.final_text();
    rec.prompt_tokens = trace.usage.prompt_tokens + trace.correction_usage.prompt_tokens;
    rec.completion_tokens = trace.usage.completion_tokens + trace.correction_usage.completion_tokens;
    rec.error = trace.error;

    bool extracted = false;
    if (!text::trim(rec.output).empty()) {
      try {
        extraction::IdeaSet ideas;
        if (cfg.extraction == extraction::ExtractionMode::kJudgeAssisted && providers.extractor) {
          ideas = extraction::extract_judged(rec.output, *providers.extractor);
        } else {
          ideas = extraction::extract_bullets(rec.output);
        }
        for (const auto& idea : ideas.ideas) rec.ideas.push_back(idea.text);
        extracted = !rec.ideas.empty();
      } catch (const Error& e) {
        if (rec.error.empty()) rec.error = std::string(to_string(e.code())) + ": " + e.what();
      }
    }
    if (trace.ok() && extracted) {
      rec.status = RunStatus::kComplete;
    } else if (extracted) {
      rec.status = RunStatus::kPartial;
    } else {
      rec.status = RunStatus::kFailed;
    }
  } catch (const Error& e) {
    rec.status = RunStatus::kFailed;
    rec.error = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    rec.status = RunStatus::kFailed;
    rec.error = e.what();
  }
  rec.finished_at = utc_timestamp();
  return rec;
}

}  // namespace

Providers make_providers(const ExperimentConfig& cfg) {
  Providers p;
  const auto& pv = cfg.providers;
  if (pv.backend == Backend::kMock) {
    const auto world = pv.mock_world;
    p.completion = [world](std::uint64_t seed) {
      return std::make_shared<providers::MockCompletionModel>(world,
                                                              vocab::SeededSampler(seed, "mock"));
    };
    p.corrector = std::make_shared<providers::ScriptedChatModel>(providers::ScriptedChatModel::identity());
    p.embedder = std::make_shared<providers::MockEmbeddingModel>(pv.embedding_dimension, cfg.seed);
    return p;
  }
  auto completion = std::make_shared<providers::OpenAiCompatibleClient>(
      pv.provider_config(pv.completion_model, cfg.concurrency));
  auto chat = std::make_shared<providers::OpenAiCompatibleClient>(
      pv.provider_config(pv.chat_model, cfg.concurrency));
  auto judge = std::make_shared<providers::OpenAiCompatibleClient>(
      pv.provider_config(pv.judge_model, cfg.concurrency));
  auto embedder = std::make_shared<providers::OpenAiCompatibleClient>(
      pv.provider_config(pv.embedding_model, cfg.concurrency));
  p.completion = [completion](std::uint64_t) { return completion; };
  p.corrector = chat;
  p.extractor = chat;
  p.judge = judge;
  p.embedder = embedder;
  return p;
}

std::uint64_t cell_seed(std::uint64_t seed, const RunId& id) {
  return hash::combine(hash::combine(hash::combine(seed, id.prompt_id), id.method),
                       static_cast<std::uint64_t>(id.run_index));
}

json ExperimentSummary::to_json() const {
  return {{"cells", cells},       {"executed", executed}, {"skipped", skipped},
          {"complete", complete}, {"partial", partial},   {"failed", failed},
          {"directory", directory.string()}};
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const auto threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  return run_experiment(cfg, make_providers(cfg), options);
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const Providers& providers,
                                 const RunOptions& options) {
  cfg.validate();
  const auto vocab = vocab::VocabularyRegistry::load(cfg.vocab_manifest);

  std::filesystem::create_directories(cfg.output_dir);
  const auto log_path = cfg.output_dir / kRunLogName;

  std::map<RunId, RunRecord> prior;
  if (options.resume && std::filesystem::exists(log_path)) {
    prior = latest_records(read_log(log_path));
  }
  {
    std::ofstream out(cfg.output_dir / "config.json");
    out << to_json(cfg).dump(2) << '\n';
  }

  ExperimentSummary summary;
  summary.directory = cfg.output_dir;
  std::vector<Group> groups;
  std::size_t slots = 0;
  for (const auto& prompt : cfg.prompts) {
    for (const auto& method : cfg.methods) {
      Group g{&prompt, method, {}, {}};
      for (int run = 0; run < cfg.runs; ++run) {
        ++summary.cells;
        auto it = prior.find({prompt.id, method, run});
        if (it != prior.end() && it->second.status == RunStatus::kComplete) {
          ++summary.skipped;
          continue;
        }
        g.pending.push_back(run);
        g.slots.push_back(slots++);
      }
      if (!g.pending.empty()) groups.push_back(std::move(g));
    }
  }

  OrderedLogWriter writer(log_path, slots, !options.resume);
  std::mutex stats_mu;
  parallel_for(groups.size(), cfg.concurrency, [&](std::size_t gi) {
    const auto& g = groups[gi];
    // Outputs of runs 0..k-1, needed for history-carrying variants.
    std::map<int, std::string> outputs;
    for (const auto& [id, rec] : prior) {
      if (id.prompt_id == g.prompt->id && id.method == g.method && rec.status == RunStatus::kComplete) {
        outputs[id.run_index] = rec.output;
      }
    }
    for (std::size_t k = 0; k < g.pending.size(); ++k) {
      const int run = g.pending[k];
      std::vector<std::string> history;
      for (int r = 0; r < run; ++r) {
        auto it = outputs.find(r);
        if (it == outputs.end()) break;
        history.push_back(it->second);
      }
      auto rec = run_cell(cfg, providers, vocab, *g.prompt, g.method, run, history);
      if (rec.status == RunStatus::kComplete) outputs[run] = rec.output;
      writer.submit(g.slots[k], rec);
      std::lock_guard lock(stats_mu);
      ++summary.executed;
      switch (rec.status) {
        case RunStatus::kComplete: ++summary.complete; break;
        case RunStatus::kPartial: ++summary.partial; break;
        case RunStatus::kFailed: ++summary.failed; break;
      }
    }
  });

  std::ofstream out(cfg.output_dir / "summary.json");
  out << summary.to_json().dump(2) << '\n';
  return summary;
}

}  // namespace recoding::harness
