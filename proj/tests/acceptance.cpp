#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "cluster_oracles.hpp"
#include "recoding/engine/sentence.hpp"
#include "recoding/error.hpp"
#include "recoding/harness/config.hpp"
#include "recoding/harness/evaluate.hpp"
#include "recoding/harness/experiment.hpp"
#include "recoding/harness/run_log.hpp"
#include "recoding/metrics/clustering.hpp"
#include "recoding/metrics/creativity.hpp"
#include "recoding/metrics/diversity.hpp"
#include "recoding/providers/wire.hpp"
#include "recoding/util/hash.hpp"
#include "recoding/vocab/manifest.hpp"
#include "recoding/vocab/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace recoding;

namespace {

constexpr std::size_t kOracleStemCount = 1173;
constexpr const char* kBulletPrefix =
    "Respond in bullet points. Do NOT include sub-bullets. Limit each point to 10 words.";

enum class Outcome { kPass, kFail, kSkip };

struct Result {
  Outcome outcome = Outcome::kPass;
  std::string detail;
};

Result pass(std::string d) { return {Outcome::kPass, std::move(d)}; }
Result fail(std::string d) { return {Outcome::kFail, std::move(d)}; }

// Accumulates failures so one criterion reports its first broken check.
struct Checker {
  std::string first_failure;
  int checks = 0;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && first_failure.empty()) first_failure = what;
  }
  Result result(const std::string& summary) const {
    return first_failure.empty() ? pass(summary) : fail(first_failure);
  }
};

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("recoding_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string oracle_input(const std::string& pr, const std::string& p, const std::string& y,
                         const std::string& d) {
  std::string out = pr + p;
  for (const std::string* part : {&y, &d}) {
    if (part->empty()) continue;
    const char last = out.empty() ? ' ' : out.back();
    if (last == ' ' || last == '\n' || last == '\t' || last == '\r') {
      out += *part;
    } else {
      out += " " + *part;
    }
  }
  return out;
}

Result ac1() {
  Checker c;
  const std::string prompt = "Brainstorm a world history book topic.";
  c.expect(engine::construct_input("**Related to FOOD:** ", prompt, "", "Pas") ==
               "**Related to FOOD:** Brainstorm a world history book topic. Pas",
           "FOOD example");
  c.expect(engine::construct_input("**Related to SKY:** ", prompt, "", "Tib") ==
               "**Related to SKY:** Brainstorm a world history book topic. Tib",
           "SKY example");
  vocab::SeededSampler s(2024, "acceptance/ac1");
  const std::vector<std::string> pieces{"",       "**Related to RIVER:** ", "Name a city.",
                                        "Tib",    "Pasta and the silk road.", "- a\n- b\n",
                                        "x ",     "\xC3\xA9t\xC3\xA9", "Yet, ", "End.\n"};
  for (int i = 0; i < 100; ++i) {
    const auto& a = pieces[s.next_below(pieces.size())];
    const auto& b = pieces[s.next_below(pieces.size())];
    const auto& y = pieces[s.next_below(pieces.size())];
    const auto& d = pieces[s.next_below(pieces.size())];
    c.expect(engine::construct_input(a, b, y, d) == oracle_input(a, b, y, d),
             "random quadruple " + std::to_string(i));
  }
  return c.result("2 golden + 100 random quadruples byte-exact");
}

Result ac2() {
  const auto reg = vocab::VocabularyRegistry::load(harness::default_vocab_manifest());
  const auto derived = vocab::derive_stems(reg.get("english_words"));
  const auto& listed = reg.get("english_stems");
  if (derived.size() != kOracleStemCount || listed.size() != kOracleStemCount) {
    return fail("derived " + std::to_string(derived.size()) + " stems, oracle says " +
                std::to_string(kOracleStemCount));
  }
  return pass(std::to_string(derived.size()) + " unique stems from " +
              std::to_string(reg.get("english_words").size()) + " words (matches oracle script)");
}

Result ac3() {
  Checker c;
  std::string detail;
  double worst_ratio = 1e9;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto dir = scratch("ac3_" + std::to_string(seed));
    json j{{"prompts", json::array({{{"id", "battle"},
                                     {"text", "Give me an idea for a battlefield."},
                                     {"formatting_prefix", kBulletPrefix}}})},
           {"methods", json::array({"OD", "RD"})},
           {"runs", 50},
           {"max_new_tokens", 40},
           {"seed", seed},
           {"concurrency", 2},
           {"output_dir", dir.string()}};
    auto cfg = harness::parse_config(j);
    harness::run_experiment(cfg);
    const auto report = harness::evaluate(dir);
    std::vector<std::size_t> od, rd;
    for (const auto& cell : report.at("cells")) {
      const auto curve = cell.at("growth").begin()->get<std::vector<std::size_t>>();
      (cell.at("method") == "OD" ? od : rd) = curve;
    }
    c.expect(od.size() == 50 && rd.size() == 50, "growth curves cover 50 runs");
    if (od.size() != 50 || rd.size() != 50) break;
    const double ratio = static_cast<double>(rd.back()) / static_cast<double>(od.back());
    worst_ratio = std::min(worst_ratio, ratio);
    c.expect(ratio >= 3.0, "seed " + std::to_string(seed) + ": RD/OD final clusters " +
                               std::to_string(rd.back()) + "/" + std::to_string(od.back()));
    for (std::size_t k = 4; k < 50; ++k) {
      c.expect(rd[k] > od[k], "seed " + std::to_string(seed) + ": RD not above OD at run " +
                                  std::to_string(k + 1));
    }
    if (seed == 1) detail = "seed 1 final RD " + std::to_string(rd.back()) + " vs OD " +
                            std::to_string(od.back());
    fs::remove_all(dir);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "; min ratio %.2f over 10 seeds", worst_ratio);
  return c.result(detail + buf);
}

Result ac4() {
  Checker c;
  vocab::SeededSampler s(4, "acceptance/ac4");
  const std::vector<std::string> lexicon{"silk", "road", "sky",  "burial", "pasta", "trade",
                                         "salt", "map",  "war",  "river",  "empire", "a"};
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n = 1 + s.next_below(30);
    const double tau = 0.2 + 0.7 * s.next_unit();
    const auto pts = oracles::clustered_points(1000 + static_cast<std::uint64_t>(inst), n,
                                               2 + s.next_below(8), 1 + s.next_below(6),
                                               s.next_unit());
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < n; ++i) {
      std::string t;
      const auto len = s.next_below(5);
      for (std::uint64_t w = 0; w < len; ++w) t += lexicon[s.next_below(lexicon.size())] + " ";
      texts.push_back(t);
    }
    const auto tag = "instance " + std::to_string(inst);
    const auto g = metrics::cluster_greedy_cosine(pts, tau);
    const auto h = metrics::cluster_hac(pts, tau);
    const auto u = metrics::cluster_unigram(texts, tau);
    const auto go = oracles::greedy_oracle(pts, tau);
    const auto ho = oracles::hac_oracle(pts, tau);
    const auto uo = oracles::unigram_oracle(texts, tau);
    c.expect(g.size() == go.size() && oracles::partition_of(g) == go, tag + ": greedy");
    c.expect(h.size() == ho.size() && oracles::partition_of(h) == ho, tag + ": hac");
    c.expect(u.size() == uo.size() && oracles::partition_of(u) == uo, tag + ": unigram");
  }
  return c.result("600 clusterings equal their brute-force oracle");
}

Result ac5() {
  Checker c;
  metrics::CoverageParams params;
  params.seed = 5;
  const std::vector<providers::Embedding> to{{0, 0}, {1, 0}};
  const auto inside = metrics::coverage({{0, 0.5}}, to, params);
  c.expect(inside.threshold == 1.0, "threshold of the 2-point reference is 1");
  c.expect(inside.point == 100.0, "(0,0.5) is covered");
  c.expect(metrics::coverage({{0, 2}}, to, params).point == 0.0, "(0,2) is not covered");
  c.expect(metrics::coverage({{0, 0.5}, {0, 2}, {1, 0.9}, {3, 0}}, to, params).point == 50.0,
           "mixed set covers half");
  vocab::SeededSampler s(5, "acceptance/ac5");
  for (int i = 0; i < 50; ++i) {
    const auto pts = oracles::clustered_points(500 + static_cast<std::uint64_t>(i),
                                               2 + s.next_below(40), 2 + s.next_below(6),
                                               1 + s.next_below(5), s.next_unit());
    c.expect(metrics::coverage(pts, pts, params).point == 100.0,
             "self coverage of set " + std::to_string(i));
  }
  const auto a = oracles::clustered_points(1, 25, 4, 3, 0.5);
  const auto b = oracles::clustered_points(2, 25, 4, 3, 0.5);
  const auto r1 = metrics::coverage(a, b, params, "A", "B");
  const auto r2 = metrics::coverage(a, b, params, "A", "B");
  c.expect(r1.mean == r2.mean && r1.p25 == r2.p25 && r1.p75 == r2.p75,
           "bootstrap replays under a fixed seed");
  return c.result("2-D cases exact, 50 self-coverage sets at 100, bootstrap replay identical");
}

Result ac6() {
  Checker c;
  vocab::SeededSampler s(6, "acceptance/ac6");
  double max_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + s.next_below(100);
    const std::size_t dim = 1 + s.next_below(16);
    std::vector<providers::Embedding> pts(n, providers::Embedding(dim));
    for (auto& p : pts)
      for (auto& x : p) x = s.next_unit() * 4 - 2;
    const auto got = metrics::nearest_prior_distance(pts);
    c.expect(got.size() == n - 1, "result size n-1");
    if (got.size() != n - 1) continue;
    for (std::size_t k = 1; k < n; ++k) {
      double best = INFINITY;
      for (std::size_t j = 0; j < k; ++j) {
        double d = 0;
        for (std::size_t t = 0; t < dim; ++t) d += (pts[k][t] - pts[j][t]) * (pts[k][t] - pts[j][t]);
        best = std::min(best, std::sqrt(d));
      }
      max_err = std::max(max_err, std::abs(got[k - 1] - best));
    }
  }
  c.expect(max_err <= 1e-12, "deviation above 1e-12");
  char buf[96];
  std::snprintf(buf, sizeof(buf), "200 random streams, max deviation %.1e", max_err);
  return c.result(buf);
}

Result ac7() {
  Checker c;
  std::vector<providers::Verdict> rel(5000, providers::Verdict::kRelevant);
  for (std::size_t i = 0; i < 113; ++i) rel[i] = providers::Verdict::kIrrelevant;
  const auto r = metrics::aggregate_judgments(rel);
  c.expect(r.relevance && std::abs(*r.relevance - 0.9774) < 1e-12, "relevance 0.9774");
  c.expect(r.relevance && std::round(*r.relevance * 100) / 100 == 0.98, "relevance rounds to 0.98");
  std::vector<providers::Verdict> div;
  div.insert(div.end(), 13, providers::Verdict::kAlmostIdentical);
  div.insert(div.end(), 52, providers::Verdict::kPartiallySimilar);
  div.insert(div.end(), 60, providers::Verdict::kMostlyDifferent);
  const auto d = metrics::aggregate_judgments(div);
  c.expect(d.diversity && std::abs(*d.diversity - 0.688) < 1e-12, "diversity 0.688");
  const auto lo = metrics::aggregate_judgments({providers::Verdict::kAlmostIdentical});
  const auto hi = metrics::aggregate_judgments({providers::Verdict::kMostlyDifferent});
  c.expect(lo.diversity == 0.0 && hi.diversity == 1.0, "diversity scale spans [0,1]");
  return c.result("relevance 0.9774 (0.98), diversity 0.688");
}

json message(const std::string& role, const std::string& content) {
  return json{{"role", role}, {"content", content}};
}

std::string digest(const json& payload) { return hash::sha256_hex(payload.dump()); }

Result ac8() {
  Checker c;
  const auto dir = scratch("ac8");
  const std::string text = "Give me an idea for a battlefield.";
  const std::string full = std::string(kBulletPrefix) + " " + text;
  json j{{"prompts", json::array({{{"id", "battle"}, {"text", text}, {"formatting_prefix", kBulletPrefix}}})},
         {"methods", json::array({"OD_s", "OD_h", "OD_16", "RD_p", "RD_d"})},
         {"runs", 3},
         {"max_new_tokens", 40},
         {"seed", 8},
         {"output_dir", dir.string()}};
  harness::run_experiment(harness::parse_config(j));
  auto records = harness::latest_records(harness::read_log(dir / harness::kRunLogName));
  auto find = [&](const std::string& method, int run) -> const harness::RunRecord* {
    auto it = records.find(harness::RunId{"battle", method, run});
    return it == records.end() ? nullptr : &it->second;
  };
  auto chat_payload = [](json messages, double temperature) {
    return json{{"model", "mock"}, {"max_tokens", 40}, {"temperature", temperature},
                {"messages", std::move(messages)}};
  };
  for (int run = 0; run < 3; ++run) {
    const auto tag = " run " + std::to_string(run);
    const auto* s = find("OD_s", run);
    const auto* h = find("OD_h", run);
    const auto* t = find("OD_16", run);
    c.expect(s && h && t, "OD records present" + tag);
    if (!s || !h || !t) continue;

    const auto od_s = chat_payload(json::array({message("user", full + " Think outside the box. ")}), 1.0);
    c.expect(s->request_digests == std::vector<std::string>{digest(od_s)}, "OD_s payload digest" + tag);

    json history = json::array({message("user", full)});
    for (int k = 0; k < run; ++k) {
      history.push_back(message("assistant", find("OD_h", k)->output));
      history.push_back(message("user", "Generate 5 more ideas"));
    }
    c.expect(h->request_digests == std::vector<std::string>{digest(chat_payload(history, 1.0))},
             "OD_h payload digest" + tag);
    c.expect(run == 0 || h->trace.at("requests")[0].at("history_messages") == 2 * run,
             "OD_h history length" + tag);

    const auto od_16 = chat_payload(json::array({message("user", full)}), 1.6);
    c.expect(t->request_digests == std::vector<std::string>{digest(od_16)}, "OD_16 payload digest" + tag);

    for (const char* method : {"RD_p", "RD_d"}) {
      const auto* r = find(method, run);
      c.expect(r != nullptr, std::string(method) + " record" + tag);
      if (!r) continue;
      const auto& reqs = r->trace.at("requests");
      const auto& sents = r->trace.at("sentences");
      c.expect(!reqs.empty() && reqs.size() == r->request_digests.size(),
               std::string(method) + " request count" + tag);
      for (std::size_t i = 0; i < reqs.size() && i < r->request_digests.size(); ++i) {
        const auto input = reqs[i].at("input").get<std::string>();
        const auto payload = chat_payload(
            json::array({message("system", std::string(providers::wire::kSimulatedCompletionInstruction)),
                         message("user", input)}),
            1.0);
        c.expect(digest(payload) == r->request_digests[i], std::string(method) + " payload digest" + tag);
        const bool primed = input.rfind("**Related to ", 0) == 0;
        if (std::string(method) == "RD_p") {
          c.expect(primed, "RD_p input carries a priming frame" + tag);
          c.expect(input.find(full) != std::string::npos, "RD_p input keeps the prompt" + tag);
        } else {
          c.expect(!primed, "RD_d input has no priming frame" + tag);
        }
      }
      for (const auto& sent : sents) {
        const auto token = sent.at("diverting_token").get<std::string>();
        const auto priming = sent.at("priming").get<std::string>();
        if (std::string(method) == "RD_p") {
          c.expect(token.empty(), "RD_p injects no stem" + tag);
          c.expect(!priming.empty(), "RD_p logs its priming" + tag);
        } else {
          c.expect(token.size() == 3, "RD_d injects a 3-letter stem" + tag);
          c.expect(priming.empty(), "RD_d logs no priming" + tag);
        }
      }
    }
  }
  fs::remove_all(dir);
  return c.result(std::to_string(c.checks) + " payload checks against logged digests");
}

std::string strip_timestamps(const fs::path& log) {
  std::ifstream in(log);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    auto j = json::parse(line);
    j.erase("timestamps");
    out += j.dump() + "\n";
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Result ac9() {
  Checker c;
  std::vector<fs::path> dirs{scratch("ac9_a"), scratch("ac9_b")};
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    json j{{"prompts", json::array({{{"id", "history"},
                                     {"text", "Brainstorm a world history book topic."},
                                     {"formatting_prefix", kBulletPrefix}},
                                    {{"id", "float"},
                                     {"text", "Design a parade float."},
                                     {"formatting_prefix", kBulletPrefix}}})},
           {"methods", json::array({"OD", "OD_h", "RD"})},
           {"runs", 6},
           {"max_new_tokens", 40},
           {"seed", 99},
           {"concurrency", i == 0 ? 1 : 4},
           {"output_dir", dirs[i].string()}};
    harness::run_experiment(harness::parse_config(j));
    harness::evaluate(dirs[i]);
  }
  c.expect(strip_timestamps(dirs[0] / "runs.jsonl") == strip_timestamps(dirs[1] / "runs.jsonl"),
           "run logs differ");
  for (const char* csv : {"growth.csv", "coverage.csv", "novelty.csv", "ideas.csv", "distinct.csv"}) {
    c.expect(slurp(dirs[0] / csv) == slurp(dirs[1] / csv), std::string(csv) + " differs");
  }
  for (const auto& d : dirs) fs::remove_all(d);
  return c.result("logs (minus timestamps) and 5 CSV reports identical");
}

// Replication archive replay. Each fixture directory holds runs.jsonl,
// config.json and expected.json {"cells": {"<prompt>/<method>": {"clusters"|"unique_ideas": n}}}.
Result ac10() {
  const fs::path root = fs::path(RECODING_SOURCE_DIR) / "tests" / "fixtures" / "replication";
  if (!fs::exists(root)) return {Outcome::kSkip, "no replication fixtures under tests/fixtures/replication"};
  Checker c;
  int cells = 0;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const auto expected = json::parse(slurp(entry.path() / "expected.json"));
    const auto report = harness::evaluate(entry.path());
    for (const auto& cell : report.at("cells")) {
      const auto key = cell.at("prompt_id").get<std::string>() + "/" + cell.at("method").get<std::string>();
      if (!expected.at("cells").contains(key)) continue;
      for (const auto& [field, want] : expected.at("cells").at(key).items()) {
        ++cells;
        const auto got = cell.at(field).get<long>();
        c.expect(std::abs(got - want.get<long>()) <= 1,
                 key + " " + field + " " + std::to_string(got) + " vs " + std::to_string(want.get<long>()));
      }
    }
  }
  return c.result(std::to_string(cells) + " fixture values within 1");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"AC1 construct_input byte-exact", ac1},
      {"AC2 stem vocabulary count", ac2},
      {"AC3 mock-world RD vs OD separation", ac3},
      {"AC4 clustering oracles", ac4},
      {"AC5 coverage arithmetic", ac5},
      {"AC6 nearest-prior distance", ac6},
      {"AC7 judge aggregation", ac7},
      {"AC8 variant payload audit", ac8},
      {"AC9 end-to-end determinism", ac9},
      {"AC10 replication fixture replay", ac10},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = fail(std::string("exception: ") + e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start).count();
    const char* tag = r.outcome == Outcome::kPass ? "PASS" : r.outcome == Outcome::kFail ? "FAIL" : "SKIP";
    if (r.outcome == Outcome::kFail) ++failures;
    std::cout << tag << " " << name << " (" << ms << " ms): " << r.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
