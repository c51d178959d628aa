#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "recoding/error.hpp"
#include "recoding/harness/evaluate.hpp"
#include "recoding/harness/experiment.hpp"
#include "recoding/vocab/manifest.hpp"

namespace {

using nlohmann::json;
using recoding::Error;
using recoding::ErrorCode;

constexpr int kUsageError = 2;

int fail(std::string_view code, const std::string& message) {
  std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
  return 1;
}

struct GenerateArgs {
  std::string config;
  std::vector<std::string> methods;
  int runs = 0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> prompts;
  std::string backend;
  int max_tokens = 0;
  std::optional<double> temperature;
  std::string out;
  bool resume = false;
};

recoding::harness::ExperimentConfig build_config(const GenerateArgs& a) {
  using namespace recoding::harness;
  ExperimentConfig cfg;
  if (!a.config.empty()) {
    cfg = load_config(a.config);
  } else {
    cfg.vocab_manifest = default_vocab_manifest();
    cfg.methods = {"OD", "RD"};
  }
  if (!a.prompts.empty()) {
    cfg.prompts.clear();
    for (std::size_t i = 0; i < a.prompts.size(); ++i) {
      cfg.prompts.push_back({"p" + std::to_string(i + 1), a.prompts[i], ""});
    }
  }
  if (!a.methods.empty()) cfg.methods = a.methods;
  if (a.runs > 0) cfg.runs = a.runs;
  if (a.seed) cfg.seed = *a.seed;
  if (!a.backend.empty()) cfg.providers.backend = parse_backend(a.backend);
  if (a.max_tokens > 0) cfg.max_new_tokens = a.max_tokens;
  if (a.temperature) cfg.temperature = *a.temperature;
  if (!a.out.empty()) cfg.output_dir = a.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recoding-decoding experiment runner"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Run every (prompt, method, run) cell");
  generate->add_option("--config", gen.config, "Experiment config (JSON)");
  generate->add_option("--method", gen.methods, "Method(s) to run, overrides the config");
  generate->add_option("--runs", gen.runs, "Runs per prompt and method")->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Root seed");
  generate->add_option("--prompt", gen.prompts, "Prompt text(s), overrides the config");
  generate->add_option("--backend", gen.backend, "mock or openai")
      ->check(CLI::IsMember({"mock", "openai"}));
  generate->add_option("--max-tokens", gen.max_tokens, "Token budget per run")
      ->check(CLI::PositiveNumber);
  generate->add_option("--temperature", gen.temperature, "Sampling temperature")
      ->check(CLI::Range(0.0, 2.0));
  generate->add_option("--out", gen.out, "Experiment directory");
  generate->add_flag("--resume", gen.resume, "Skip cells already complete in the log");

  std::string eval_dir;
  auto* evaluate = app.add_subcommand("evaluate", "Compute metrics and plots from a run log");
  evaluate->add_option("--out", eval_dir, "Experiment directory")->required();
  std::string eval_config;
  evaluate->add_option("--config", eval_config, "Config overriding the directory's config.json");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Print the summary of an evaluated experiment");
  report->add_option("--out", report_dir, "Experiment directory")->required();

  auto* vocab = app.add_subcommand("vocab", "Vocabulary utilities");
  vocab->require_subcommand(1);
  std::string words_path;
  std::string language = "en";
  bool list = false;
  auto* stems = vocab->add_subcommand("stems", "Count unique three-letter stems of a word list");
  stems->add_option("words", words_path, "Word list, one word per line (default: bundled list)");
  stems->add_option("--language", language, "Language tag");
  stems->add_flag("--list", list, "Print the stems instead of the count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*generate) {
      auto cfg = build_config(gen);
      const auto summary = recoding::harness::run_experiment(cfg, {gen.resume});
      std::cout << summary.to_json().dump() << '\n';
      return summary.failed == 0 ? 0 : 1;
    }
    if (*evaluate) {
      json out;
      if (eval_config.empty()) {
        out = recoding::harness::evaluate(eval_dir);
      } else {
        auto cfg = recoding::harness::load_config(eval_config);
        cfg.output_dir = eval_dir;
        out = recoding::harness::evaluate(eval_dir, cfg, recoding::harness::make_providers(cfg));
      }
      std::cout << recoding::harness::render_report(out);
      return 0;
    }
    if (*report) {
      const auto path = std::filesystem::path(report_dir) / "report.json";
      std::ifstream in(path);
      if (!in) throw Error(ErrorCode::kIoError, "report not found: " + path.string());
      std::cout << recoding::harness::render_report(json::parse(in));
      return 0;
    }
    if (*stems) {
      recoding::vocab::Vocabulary words;
      if (words_path.empty()) {
        const auto registry =
            recoding::vocab::VocabularyRegistry::load(recoding::harness::default_vocab_manifest());
        words = registry.get("english_words");
      } else {
        words = recoding::vocab::load_vocabulary(words_path, recoding::vocab::VocabKind::kKeyword,
                                                 language);
      }
      const auto derived = recoding::vocab::derive_stems(words);
      if (list) {
        for (const auto& s : derived.entries) std::cout << s << '\n';
      } else {
        std::cout << derived.entries.size() << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    return fail(recoding::to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
