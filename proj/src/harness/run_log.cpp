#include "recoding/harness/run_log.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>

#include "recoding/error.hpp"
#include "recoding/harness/config.hpp"

namespace recoding::harness {

using nlohmann::json;

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kComplete: return "complete";
    case RunStatus::kPartial: return "partial";
    case RunStatus::kFailed: return "failed";
  }
  return "failed";
}

RunStatus parse_status(std::string_view name) {
  if (name == "complete") return RunStatus::kComplete;
  if (name == "partial") return RunStatus::kPartial;
  if (name == "failed") return RunStatus::kFailed;
  throw Error(ErrorCode::kConfigError, "unknown run status " + std::string(name));
}

std::string RunId::key() const {
  return prompt_id + "/" + method + "/" + std::to_string(run_index);
}

json trace_to_json(const engine::GenerationTrace& trace, const std::vector<std::string>& digests) {
  json sentences = json::array();
  for (const auto& s : trace.sentences) {
    json injections = json::array();
    for (const auto& inj : s.injections) {
      injections.push_back({{"rule", inj.rule_index},
                            {"action", std::string(engine::to_string(inj.action))},
                            {"value", inj.value},
                            {"rendered", inj.rendered}});
    }
    sentences.push_back({{"priming", s.priming},
                         {"diverting_token", s.diverting_token},
                         {"completion", s.completion},
                         {"text", s.text},
                         {"span", {s.begin, s.end}},
                         {"tokens", s.tokens},
                         {"inserted", s.inserted},
                         {"injections", injections}});
  }
  json requests = json::array();
  for (std::size_t i = 0; i < trace.requests.size(); ++i) {
    const auto& r = trace.requests[i];
    requests.push_back({{"input", r.input_text},
                        {"mode", std::string(providers::to_string(r.mode))},
                        {"temperature", r.temperature},
                        {"max_new_tokens", r.max_new_tokens},
                        {"stop_at_sentence", r.stop_at_sentence},
                        {"history_messages", r.history.size()},
                        {"digest", i < digests.size() ? digests[i] : ""}});
  }
  json j = {{"sentences", sentences},
            {"requests", requests},
            {"raw", trace.raw},
            {"correction_warning", trace.correction_warning},
            {"token_length", trace.token_length},
            {"iterations", trace.iterations},
            {"termination", std::string(engine::to_string(trace.termination))},
            {"usage",
             {{"prompt_tokens", trace.usage.prompt_tokens},
              {"completion_tokens", trace.usage.completion_tokens},
              {"reported", trace.usage.reported}}},
            {"correction_usage",
             {{"prompt_tokens", trace.correction_usage.prompt_tokens},
              {"completion_tokens", trace.correction_usage.completion_tokens}}}};
  j["corrected"] = trace.corrected ? json(*trace.corrected) : json(nullptr);
  if (!trace.error.empty()) j["error"] = trace.error;
  return j;
}

json to_json(const RunRecord& r) {
  json j = {{"schema_version", kSchemaVersion},
            {"run_id", {{"prompt_id", r.id.prompt_id}, {"method", r.id.method}, {"run_index", r.id.run_index}}},
            {"key", r.id.key()},
            {"seed", r.seed},
            {"status", std::string(to_string(r.status))},
            {"request_digests", r.request_digests},
            {"trace", r.trace},
            {"output", r.output},
            {"ideas", r.ideas},
            {"usage", {{"prompt_tokens", r.prompt_tokens}, {"completion_tokens", r.completion_tokens}}},
            {"timestamps", {{"started", r.started_at}, {"finished", r.finished_at}}}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  const auto& id = j.at("run_id");
  r.id.prompt_id = id.at("prompt_id").get<std::string>();
  r.id.method = id.at("method").get<std::string>();
  r.id.run_index = id.at("run_index").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.status = parse_status(j.at("status").get<std::string>());
  r.request_digests = j.value("request_digests", std::vector<std::string>{});
  r.trace = j.value("trace", json::object());
  r.output = j.value("output", "");
  r.ideas = j.value("ideas", std::vector<std::string>{});
  if (j.contains("usage")) {
    r.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
    r.completion_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
  }
  r.error = j.value("error", "");
  if (j.contains("timestamps")) {
    r.started_at = j["timestamps"].value("started", "");
    r.finished_at = j["timestamps"].value("finished", "");
  }
  return r;
}

std::vector<RunRecord> read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "run log not found: " + path.string());
  std::vector<RunRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      // A torn final line from an interrupted run is dropped.
      if (in.peek() == std::ifstream::traits_type::eof()) break;
      throw Error(ErrorCode::kConfigError,
                  path.string() + ":" + std::to_string(line_no) + ": malformed record: " + e.what());
    }
  }
  return out;
}

std::map<RunId, RunRecord> latest_records(const std::vector<RunRecord>& records) {
  std::map<RunId, RunRecord> out;
  for (const auto& r : records) out[r.id] = r;
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof(out), "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

namespace {

// Drops a partial final line left by an interrupted writer.
const std::filesystem::path& trim_torn_tail(const std::filesystem::path& path, bool truncate) {
  std::error_code ec;
  if (truncate || !std::filesystem::exists(path, ec)) return path;
  std::string content;
  {
    std::ifstream in(path, std::ios::binary);
    content.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  if (content.empty() || content.back() == '\n') return path;
  const auto nl = content.rfind('\n');
  std::filesystem::resize_file(path, nl == std::string::npos ? 0 : nl + 1, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot repair run log " + path.string());
  return path;
}

}  // namespace

OrderedLogWriter::OrderedLogWriter(const std::filesystem::path& path, std::size_t slots,
                                   bool truncate)
    : out_(trim_torn_tail(path, truncate), truncate ? std::ios::trunc : std::ios::app),
      pending_(slots) {
  if (!out_) throw Error(ErrorCode::kIoError, "cannot open run log " + path.string());
}

void OrderedLogWriter::submit(std::size_t slot, const RunRecord& record) {
  std::lock_guard lock(mu_);
  pending_.at(slot) = to_json(record).dump();
  while (next_ < pending_.size() && pending_[next_]) {
    out_ << *pending_[next_] << '\n';
    out_.flush();
    pending_[next_].reset();
    ++next_;
  }
}

std::size_t OrderedLogWriter::written() const {
  std::lock_guard lock(mu_);
  return next_;
}

}  // namespace recoding::harness
