#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "recoding/engine/rd_engine.hpp"

namespace recoding::harness {

inline constexpr std::string_view kRunLogName = "runs.jsonl";

enum class RunStatus { kComplete, kPartial, kFailed };

std::string_view to_string(RunStatus s);
RunStatus parse_status(std::string_view name);

struct RunId {
  std::string prompt_id;
  std::string method;
  int run_index = 0;  // 0-based

  std::string key() const;
  auto operator<=>(const RunId&) const = default;
};

struct RunRecord {
  RunId id;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::kFailed;
  std::vector<std::string> request_digests;
  nlohmann::json trace = nlohmann::json::object();
  std::string output;  // final (corrected) text
  std::vector<std::string> ideas;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::string error;
  std::string started_at;
  std::string finished_at;
};

nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

nlohmann::json trace_to_json(const engine::GenerationTrace& trace,
                             const std::vector<std::string>& digests);

// All records in file order. Throws IoError when the file is missing and
// ConfigError on a malformed line, naming the line number.
std::vector<RunRecord> read_log(const std::filesystem::path& path);

// Last record per run id.
std::map<RunId, RunRecord> latest_records(const std::vector<RunRecord>& records);

std::string utc_timestamp();

/// Appends records to a JSONL file in a fixed slot order regardless of the
/// order in which worker threads finish them. Each line is flushed as soon
/// as every earlier slot has been written.
class OrderedLogWriter {
 public:
  OrderedLogWriter(const std::filesystem::path& path, std::size_t slots, bool truncate);

  void submit(std::size_t slot, const RunRecord& record);
  std::size_t written() const;

 private:
  mutable std::mutex mu_;
  std::ofstream out_;
  std::vector<std::optional<std::string>> pending_;
  std::size_t next_ = 0;
};

}  // namespace recoding::harness
