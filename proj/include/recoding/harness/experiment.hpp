#pragma once

#include <filesystem>
#include <functional>
#include <memory>

#include "recoding/harness/config.hpp"
#include "recoding/harness/run_log.hpp"
#include "recoding/vocab/manifest.hpp"

namespace recoding::harness {

/// Model endpoints used by an experiment. `completion` is called once per
/// cell so that offline backends can be seeded per cell.
struct Providers {
  std::function<std::shared_ptr<providers::CompletionModel>(std::uint64_t cell_seed)> completion;
  std::shared_ptr<providers::ChatModel> corrector;
  std::shared_ptr<providers::ChatModel> extractor;
  std::shared_ptr<providers::ChatModel> judge;  // null: offline judge
  std::shared_ptr<providers::EmbeddingModel> embedder;
};

// Mock or HTTP-backed providers according to cfg.providers.
Providers make_providers(const ExperimentConfig& cfg);

std::uint64_t cell_seed(std::uint64_t seed, const RunId& id);

struct ExperimentSummary {
  std::size_t cells = 0;
  std::size_t executed = 0;
  std::size_t skipped = 0;
  std::size_t complete = 0;
  std::size_t partial = 0;
  std::size_t failed = 0;
  std::filesystem::path directory;

  nlohmann::json to_json() const;
};

struct RunOptions {
  bool resume = false;
};

/// Executes every (prompt, method, run) cell and appends one RunRecord per
/// executed cell to <output_dir>/runs.jsonl. With `resume`, cells already
/// logged as complete are skipped; otherwise the log starts fresh. Cells
/// run in parallel across (prompt, method) groups; runs of a group are
/// sequential. Per-cell failures are recorded and do not stop the run.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const Providers& providers,
                                 const RunOptions& options = {});

// Runs `fn(i)` for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace recoding::harness
