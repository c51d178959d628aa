#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "recoding/error.hpp"
#include "recoding/harness/config.hpp"
#include "recoding/harness/evaluate.hpp"
#include "recoding/harness/experiment.hpp"
#include "recoding/harness/run_log.hpp"
#include "support.hpp"

using namespace recoding;
using namespace recoding::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIoError;
}

json base_config(const fs::path& out, int runs = 3) {
  return json{{"prompts",
               json::array({{{"id", "history"},
                             {"text", "Brainstorm a world history book topic."},
                             {"formatting_prefix", std::string(extraction::kBulletFormattingPrefix)}},
                            {{"id", "battle"},
                             {"text", "Give me an idea for a battlefield."},
                             {"formatting_prefix", std::string(extraction::kBulletFormattingPrefix)}}})},
              {"methods", json::array({"OD", "RD"})},
              {"runs", runs},
              {"max_new_tokens", 40},
              {"seed", 5},
              {"concurrency", 2},
              {"output_dir", out.string()}};
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string log_without_timestamps(const fs::path& p) {
  std::string out;
  for (const auto& line : lines_of(p)) {
    auto j = json::parse(line);
    j.erase("timestamps");
    out += j.dump() + "\n";
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RECODING_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("profile token limits") {
  ExperimentConfig cfg;
  CHECK(cfg.token_limit() == 150);
  cfg.profile = Profile::kDataset;
  CHECK(cfg.token_limit() == 300);
  CHECK(cfg.threshold() == metrics::kDatasetThreshold);
  cfg.max_new_tokens = 40;
  CHECK(cfg.token_limit() == 40);
  cfg.metrics.threshold = 0.6;
  CHECK(cfg.threshold() == 0.6);
}

TEST_CASE("config parsing and validation") {
  auto cfg = parse_config(json{{"prompts", json::array({"Say hi."})}, {"methods", json::array({"RD"})}});
  CHECK(cfg.prompts[0].id == "p1");
  CHECK(cfg.prompts[0].full_text() == "Say hi.");
  CHECK(cfg.runs == 1);

  CHECK(code_of([] { parse_config(json{{"prompts", json::array({"x"})}, {"methods", json::array({"RD"})},
                                       {"bogus", 1}}); }) == ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config(json{{"prompts", json::array({"x"})}, {"methods", json::array({"RD_z"})}}).validate(); }) ==
        ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config(json{{"prompts", json::array()}, {"methods", json::array({"RD"})}}).validate(); }) ==
        ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config(json{{"prompts", json::array({"x"})}, {"methods", json::array({"RD"})},
                                       {"runs", 0}}).validate(); }) == ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config(json{{"prompts", json::array({"x"})}, {"methods", json::array({"RD"})},
                                       {"temperature", 3.0}}).validate(); }) == ErrorCode::kConfigError);

  auto dir = testing::temp_dir("cfg_roundtrip");
  auto original = parse_config(base_config(dir / "out"));
  auto again = parse_config(to_json(original));
  CHECK(to_json(again) == to_json(original));
  CHECK(again.prompts[1].full_text().rfind("Respond in bullet points.", 0) == 0);

  testing::write_text(dir / "c.json", json{{"prompts", json::array({"x"})},
                                           {"methods", json::array({"OD"})},
                                           {"vocab_manifest", "vocab/manifest.json"}}.dump());
  CHECK(load_config(dir / "c.json").vocab_manifest == dir / "vocab/manifest.json");
  CHECK(code_of([&] { load_config(dir / "missing.json"); }) == ErrorCode::kIoError);
}

TEST_CASE("every cell of the grid is logged once") {
  auto dir = testing::temp_dir("grid");
  auto cfg = parse_config(base_config(dir));
  auto summary = run_experiment(cfg);
  CHECK(summary.cells == 12);
  CHECK(summary.executed == 12);
  CHECK(summary.complete == 12);
  auto records = read_log(dir / kRunLogName);
  REQUIRE(records.size() == 12);
  std::set<std::string> keys;
  for (const auto& r : records) {
    keys.insert(r.id.key());
    CHECK(r.status == RunStatus::kComplete);
    CHECK_FALSE(r.ideas.empty());
    CHECK_FALSE(r.request_digests.empty());
  }
  CHECK(keys.size() == 12);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "summary.json"));
}

TEST_CASE("resume runs only the missing cells") {
  auto dir = testing::temp_dir("resume");
  auto cfg = parse_config(base_config(dir));
  run_experiment(cfg);
  auto lines = lines_of(dir / kRunLogName);
  {
    std::ofstream out(dir / kRunLogName, std::ios::trunc);
    for (std::size_t i = 0; i < 7; ++i) out << lines[i] << "\n";
    out << lines[7].substr(0, lines[7].size() / 2);  // torn final line
  }
  auto providers = make_providers(cfg);
  int calls = 0;
  auto inner = providers.completion;
  providers.completion = [&calls, inner](std::uint64_t seed) {
    ++calls;
    return inner(seed);
  };
  auto summary = run_experiment(cfg, providers, RunOptions{true});
  CHECK(summary.skipped == 7);
  CHECK(summary.executed == 5);
  CHECK(calls == 5);
  CHECK(latest_records(read_log(dir / kRunLogName)).size() == 12);
}

TEST_CASE("runs replay identically under a fixed seed") {
  auto a = testing::temp_dir("det_a");
  auto b = testing::temp_dir("det_b");
  auto ca = parse_config(base_config(a));
  auto cb = parse_config(base_config(b));
  cb.concurrency = 1;
  run_experiment(ca);
  run_experiment(cb);
  CHECK(log_without_timestamps(a / kRunLogName) == log_without_timestamps(b / kRunLogName));
  evaluate(a);
  evaluate(b);
  for (const char* name : {"growth.csv", "coverage.csv", "novelty.csv", "ideas.csv", "distinct.csv"}) {
    CAPTURE(name);
    CHECK(testing::read_text(a / name) == testing::read_text(b / name));
  }
}

TEST_CASE("evaluation outputs") {
  auto dir = testing::temp_dir("eval");
  auto j = base_config(dir, 10);
  j["judge"] = {{"enabled", true}, {"relevance_samples", 4}, {"diversity_pairs", 4}};
  j["metrics"] = {{"clustering", json::array({"embedding-cosine", "hac-average"})}};
  auto cfg = parse_config(j);
  run_experiment(cfg);
  auto report = evaluate(dir);
  for (const char* name : {"growth.csv", "coverage.csv", "novelty.csv", "ideas.csv", "distinct.csv",
                           "judge.csv", "report.json", "growth_history.svg", "coverage_battle.svg"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }
  CHECK(lines_of(dir / "growth.csv")[0] == "prompt_id,method,clustering,run_index,clusters");
  CHECK(lines_of(dir / "coverage.csv")[0] == "prompt_id,from,to,point,mean,p25,p75,threshold,degenerate");

  std::map<std::string, std::size_t> final_clusters;
  for (const auto& c : report.at("cells")) {
    const auto key = c.at("prompt_id").get<std::string>() + "/" + c.at("method").get<std::string>();
    final_clusters[key] = c.at("clusters").get<std::size_t>();
    CHECK(c.at("growth").contains("hac-average@0.73"));
    CHECK(c.contains("judge"));
  }
  CHECK(final_clusters["history/RD"] > final_clusters["history/OD"]);
  CHECK(final_clusters["battle/RD"] > final_clusters["battle/OD"]);
  for (const auto& c : report.at("coverage")) {
    if (c.at("from") == c.at("to")) CHECK(c.at("point").get<double>() == 100.0);
  }
  CHECK_FALSE(render_report(report).empty());
}

TEST_CASE("evaluate names the missing log") {
  auto dir = testing::temp_dir("nolog");
  try {
    evaluate(dir);
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIoError);
    CHECK(std::string(e.what()).find("runs.jsonl") != std::string::npos);
  }
}

TEST_CASE("cli exit codes") {
  auto dir = testing::temp_dir("cli");
  CHECK(run_cli("generate --no-such-flag") == 2);
  CHECK(run_cli("evaluate --out " + (dir / "absent").string()) == 1);
  testing::write_text(dir / "c.json", base_config(dir / "out", 2).dump());
  CHECK(run_cli("generate --config " + (dir / "c.json").string()) == 0);
  CHECK(run_cli("evaluate --out " + (dir / "out").string()) == 0);
  CHECK(run_cli("report --out " + (dir / "out").string()) == 0);
}

TEST_CASE("api keys never reach the run log") {
  auto dir = testing::temp_dir("secret");
  auto j = base_config(dir / "out", 1);
  j["providers"] = {{"backend", "openai"},
                    {"endpoint", "http://127.0.0.1:9/v1"},
                    {"api_key_env", "RECODING_TEST_KEY"},
                    {"timeout_ms", 500},
                    {"retry_budget", 0}};
  testing::write_text(dir / "c.json", j.dump());
  const std::string secret = "sk-test-4f1c9e0b7a";
  const std::string cmd = "RECODING_TEST_KEY=" + secret + " " + std::string(RECODING_CLI) +
                          " generate --config " + (dir / "c.json").string() + " >" +
                          (dir / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 1);
  REQUIRE(fs::exists(dir / "out" / kRunLogName));
  for (const auto& entry : fs::recursive_directory_iterator(dir / "out")) {
    if (!entry.is_regular_file()) continue;
    CAPTURE(entry.path());
    CHECK(testing::read_text(entry.path()).find(secret) == std::string::npos);
  }
  CHECK(testing::read_text(dir / "stdout.txt").find(secret) == std::string::npos);
  for (const auto& r : read_log(dir / "out" / kRunLogName)) CHECK(r.status == RunStatus::kFailed);
}
