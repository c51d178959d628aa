#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <deque>
#include <set>

#include "recoding/error.hpp"
#include "recoding/providers/http_client.hpp"
#include "recoding/providers/judge.hpp"
#include "recoding/providers/mock.hpp"
#include "recoding/providers/wire.hpp"

using namespace recoding;
using namespace recoding::providers;
using nlohmann::json;

namespace {

ProviderConfig test_config() {
  ProviderConfig c;
  c.model = "gpt-4o-mini";
  c.api_key_env = "RECODING_TEST_KEY";
  c.retry_budget = 2;
  return c;
}

// Replays canned outcomes: a status/body pair, or a transport failure.
class FakeTransport final : public Transport {
 public:
  struct Step {
    int status = 200;
    std::string body;
    bool timeout = false;
  };

  explicit FakeTransport(std::deque<Step> steps) : steps_(std::move(steps)) {}

  HttpResponse post(const std::string& path, const std::string& body, const Headers& headers,
                    std::chrono::milliseconds) override {
    calls.push_back({path, body, headers});
    if (steps_.empty()) return {500, "no more steps"};
    auto s = steps_.front();
    steps_.pop_front();
    if (s.timeout) throw Error(ErrorCode::kRetryableTransport, "timed out");
    return {s.status, s.body};
  }

  struct Call {
    std::string path;
    std::string body;
    Headers headers;
  };
  std::vector<Call> calls;

 private:
  std::deque<Step> steps_;
};

const std::string kChatOk =
    R"({"choices":[{"message":{"role":"assistant","content":"ta and the silk road."}}],)"
    R"("usage":{"prompt_tokens":12,"completion_tokens":6},"model":"gpt-4o-mini"})";

std::unique_ptr<OpenAiCompatibleClient> client_with(FakeTransport*& raw,
                                                    std::deque<FakeTransport::Step> steps,
                                                    ProviderConfig cfg = test_config()) {
  auto t = std::make_unique<FakeTransport>(std::move(steps));
  raw = t.get();
  auto c = std::make_unique<OpenAiCompatibleClient>(cfg, std::move(t));
  c->set_sleeper([](std::chrono::milliseconds) {});
  return c;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIoError;
}

}  // namespace

TEST_CASE("simulated completion payload is byte-exact") {
  CompletionRequest req;
  req.input_text = "**Related to FOOD:** Brainstorm a world history topic. Pas";
  req.mode = CompletionMode::kSimulatedCompletion;
  const auto body = wire::serialize(wire::completion_payload(req, test_config()));
  CHECK(body ==
        R"({"max_tokens":150,"messages":[{"content":"Simulate a completion API to complete the next sentence.","role":"system"},)"
        R"({"content":"**Related to FOOD:** Brainstorm a world history topic. Pas","role":"user"}],)"
        R"("model":"gpt-4o-mini","temperature":1.0})");
  CHECK(wire::completion_path(req.mode) == "/chat/completions");
}

TEST_CASE("real completion and chat payloads") {
  CompletionRequest req;
  req.input_text = "Once upon";
  req.mode = CompletionMode::kRealCompletion;
  req.max_new_tokens = 20;
  req.temperature = 1.4;
  auto p = wire::completion_payload(req, test_config());
  CHECK(p["prompt"] == "Once upon");
  CHECK_FALSE(p.contains("messages"));
  CHECK(p["temperature"] == 1.4);
  CHECK(wire::completion_path(req.mode) == "/completions");

  req.mode = CompletionMode::kChat;
  req.history = {{"user", "first"}, {"assistant", "reply"}};
  p = wire::completion_payload(req, test_config());
  REQUIRE(p["messages"].size() == 3);
  CHECK(p["messages"][0]["content"] == "first");
  CHECK(p["messages"][2] == json{{"role", "user"}, {"content", "Once upon"}});
}

TEST_CASE("payload serialization is deterministic") {
  CompletionRequest req;
  req.input_text = "x";
  const auto a = wire::serialize(wire::completion_payload(req, test_config()));
  const auto b = wire::serialize(wire::completion_payload(req, test_config()));
  CHECK(a == b);
}

TEST_CASE("request validation") {
  CompletionRequest req;
  req.max_new_tokens = 0;
  CHECK(code_of([&] { req.validate(); }) == ErrorCode::kInvalidRequest);
  req.max_new_tokens = 1;
  req.temperature = 2.5;
  CHECK(code_of([&] { req.validate(); }) == ErrorCode::kInvalidRequest);
  ProviderConfig cfg;
  cfg.retry_budget = -1;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::kConfigError);
  cfg.retry_budget = 0;
  cfg.max_concurrency = 0;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::kConfigError);
}

TEST_CASE("response parsing") {
  auto r = wire::parse_completion_response(json::parse(kChatOk), CompletionMode::kSimulatedCompletion);
  CHECK(r.text == "ta and the silk road.");
  CHECK(r.usage.completion_tokens == 6);
  auto real = wire::parse_completion_response(
      json::parse(R"({"choices":[{"text":" a time"}]})"), CompletionMode::kRealCompletion);
  CHECK(real.text == " a time");
  CHECK_FALSE(real.usage.reported);
  CHECK(code_of([] { wire::parse_chat_response(json::parse(R"({"choices":[]})")); }) ==
        ErrorCode::kPermanentProviderError);
  auto emb = wire::parse_embedding_response(
      json::parse(R"({"data":[{"index":1,"embedding":[0,2]},{"index":0,"embedding":[3,4]}]})"), 2);
  CHECK(emb[0][0] == doctest::Approx(0.6));
  CHECK(emb[0][1] == doctest::Approx(0.8));
  CHECK(emb[1] == std::vector<double>{0.0, 1.0});
  CHECK(code_of([] {
          wire::parse_embedding_response(json::parse(R"({"data":[{"index":0,"embedding":[1]}]})"), 2);
        }) == ErrorCode::kPermanentProviderError);
}

TEST_CASE("two timeouts then success within a retry budget of two") {
  FakeTransport* t = nullptr;
  auto client = client_with(t, {{0, "", true}, {0, "", true}, {200, kChatOk, false}});
  std::vector<std::chrono::milliseconds> delays;
  client->set_sleeper([&](std::chrono::milliseconds d) { delays.push_back(d); });
  CompletionRequest req;
  req.input_text = "hello";
  auto r = client->complete(req);
  CHECK(r.text == "ta and the silk road.");
  CHECK(r.usage.prompt_tokens == 12);
  CHECK(r.usage.reported);
  CHECK(t->calls.size() == 3);
  CHECK(delays == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500),
                                                         std::chrono::milliseconds(1000)});
}

TEST_CASE("retry exhaustion, permanent errors and retryable statuses") {
  FakeTransport* t = nullptr;
  auto c1 = client_with(t, {{0, "", true}, {0, "", true}, {0, "", true}});
  CompletionRequest req;
  req.input_text = "hello";
  CHECK(code_of([&] { c1->complete(req); }) == ErrorCode::kProviderUnavailable);
  CHECK(t->calls.size() == 3);

  auto c2 = client_with(t, {{400, "bad request", false}, {200, kChatOk, false}});
  CHECK(code_of([&] { c2->complete(req); }) == ErrorCode::kPermanentProviderError);
  CHECK(t->calls.size() == 1);

  auto c3 = client_with(t, {{429, "slow down", false}, {503, "busy", false}, {200, kChatOk, false}});
  CHECK(c3->complete(req).text == "ta and the silk road.");

  auto c4 = client_with(t, {{200, "not json", false}});
  CHECK(code_of([&] { c4->complete(req); }) == ErrorCode::kPermanentProviderError);
}

TEST_CASE("bearer token comes from the named environment variable") {
  ::setenv("RECODING_TEST_KEY", "sk-test", 1);
  FakeTransport* t = nullptr;
  auto client = client_with(t, {{200, kChatOk, false}});
  CompletionRequest req;
  req.input_text = "hi";
  client->complete(req);
  auto it = t->calls[0].headers.find("Authorization");
  REQUIRE(it != t->calls[0].headers.end());
  CHECK(it->second == "Bearer sk-test");
  CHECK(t->calls[0].body.find("sk-test") == std::string::npos);
  ::unsetenv("RECODING_TEST_KEY");
}

TEST_CASE("embedding client normalizes vectors") {
  FakeTransport* t = nullptr;
  auto client = client_with(
      t, {{200, R"({"data":[{"index":0,"embedding":[1,1]},{"index":1,"embedding":[2,0]}]})", false}});
  auto v = client->embed({"a", "b"});
  CHECK(std::abs(v[0][0] - std::sqrt(0.5)) < 1e-12);
  CHECK(v[1] == std::vector<double>{1.0, 0.0});
  CHECK(t->calls[0].path == "/embeddings");
  CHECK(json::parse(t->calls[0].body)["input"] == json{"a", "b"});
}

TEST_CASE("mock stems map to fixed concepts") {
  MockWorld w;
  ConceptDistribution dist(w);
  vocab::SeededSampler s(1, "mock");
  auto a = mock_complete(w, dist, "Brainstorm a topic. Pas", s);
  auto b = mock_complete(w, dist, "Something else entirely. pas", s);
  CHECK(a.concept_id == concept_for_key(w, "pas"));
  CHECK(a.text == b.text);
  CHECK(a.text == stem_continuation(w, "pas", a.concept_id));
  CHECK(s.draw_index() == 0);
  std::set<std::string> fla;
  for (int i = 0; i < 5; ++i) fla.insert(mock_complete(w, dist, "Topic. Fla", s).text);
  CHECK(fla.size() == 1);
  CHECK_FALSE(trailing_stem("Topic. Pas ").has_value());
  CHECK_FALSE(trailing_stem("Topic ab1").has_value());
  CHECK(trailing_stem("Topic. Tib") == std::optional<std::string>("tib"));
}

TEST_CASE("mock sentence text is a pure function of the concept") {
  MockWorld w;
  CHECK(concept_sentence(w, 3) == concept_sentence(w, 3));
  CHECK(concept_sentence(w, 3) != concept_sentence(w, 4));
  CHECK(estimate_tokens(concept_sentence(w, 3)) == 8);
  MockWorld other = w;
  other.stem_map_seed = 99;
  CHECK(concept_sentence(w, 3) != concept_sentence(other, 3));
}

TEST_CASE("peaked Zipf draws are concentrated") {
  // Simulated band for K=200, s=2, 250 draws: [11, 33], analytic mean 20.6.
  MockWorld w;
  ConceptDistribution dist(w);
  double total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    vocab::SeededSampler s(seed, "zipf");
    std::set<int> seen;
    for (int i = 0; i < 250; ++i) seen.insert(mock_complete(w, dist, "Give me an idea.", s).concept_id);
    CAPTURE(seed);
    CHECK(seen.size() >= 11);
    CHECK(seen.size() <= 33);
    total += static_cast<double>(seen.size());
  }
  CHECK(std::abs(total / 20 - 20.6) < 3.0);
  CHECK(dist.probability(0) == doctest::Approx(0.6097759725339579).epsilon(1e-12));
}

TEST_CASE("uniform two-concept world is balanced") {
  MockWorld w;
  w.concept_count = 2;
  w.distribution = BaseDistribution::kUniform;
  ConceptDistribution dist(w);
  vocab::SeededSampler s(5, "uniform");
  int zero = 0;
  for (int i = 0; i < 1000; ++i) zero += dist.draw(s) == 0 ? 1 : 0;
  CHECK(std::abs(zero - 500) <= 3 * std::sqrt(250.0));
  w.concept_count = 1;
  CHECK(code_of([&] { w.validate(); }) == ErrorCode::kConfigError);
}

TEST_CASE("mock completion model budgets and records usage") {
  MockCompletionModel m(MockWorld{}, vocab::SeededSampler(3, "m"));
  CompletionRequest req;
  req.input_text = "Ideas please.";
  req.stop_at_sentence = false;
  req.max_new_tokens = 40;
  auto r = m.complete(req);
  CHECK(estimate_tokens(r.text) == 40);
  CHECK(m.emitted_concepts().size() == 5);
  CHECK(r.usage.reported);
  req.stop_at_sentence = true;
  m.complete(req);
  CHECK(m.emitted_concepts().size() == 6);
}

TEST_CASE("mock embedder") {
  MockEmbeddingModel e(256, 11);
  auto v = e.embed({"a", "a", "b"});
  CHECK(v[0] == v[1]);
  for (const auto& x : v) {
    double n = 0;
    for (double c : x) n += c * c;
    CHECK(std::abs(std::sqrt(n) - 1.0) < 1e-6);
  }
  std::vector<std::string> texts;
  vocab::SeededSampler s(17, "strings");
  for (int i = 0; i < 100; ++i) {
    std::string t;
    for (int k = 0; k < 8; ++k) t += static_cast<char>('a' + s.next_below(26));
    texts.push_back(t);
  }
  auto vs = e.embed(texts);
  double sum = 0;
  int pairs = 0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      double d = 0;
      for (std::size_t k = 0; k < vs[i].size(); ++k) d += vs[i][k] * vs[j][k];
      sum += d;
      ++pairs;
    }
  }
  CHECK(std::abs(sum / pairs) < 0.1);
  CHECK(code_of([&] { e.embed({}); }) == ErrorCode::kInvalidRequest);
}

TEST_CASE("judge templates carry the fixed wording") {
  const std::array<Verdict, 3> rel{Verdict::kIrrelevant, Verdict::kPartiallyRelevant, Verdict::kRelevant};
  auto text = render(relevance_template(), {{"user prompt", "Name a battlefield."}, {"response", "Verdun"}}, rel);
  CHECK(text.find("Passage to evaluate: Verdun") != std::string::npos);
  CHECK(text.find("You are an AI assistant tasked with evaluating the relevance") != std::string::npos);
  CHECK(text.find("{") == std::string::npos);
  const std::array<Verdict, 3> div{Verdict::kAlmostIdentical, Verdict::kPartiallySimilar,
                                   Verdict::kMostlyDifferent};
  auto d = render(diversity_template(),
                  {{"user prompt", "p"}, {"response0", "x"}, {"response1", "y"}}, div);
  CHECK(d.find("1) Concepts presented, 2) Writing style") != std::string::npos);
  CHECK(code_of([&] { render(diversity_template(), {{"user prompt", "p"}}, div); }) ==
        ErrorCode::kConfigError);
  // Slot values are not re-expanded.
  auto literal = render(relevance_template(), {{"user prompt", "{response}"}, {"response", "r"}}, rel);
  CHECK(literal.find("User prompt: {response}") != std::string::npos);
}

TEST_CASE("verdict parsing") {
  CHECK(parse_verdict(JudgeScale::kRelevance, "Relevant") == Verdict::kRelevant);
  CHECK(parse_verdict(JudgeScale::kRelevance, "The passage is partially relevant.") ==
        Verdict::kPartiallyRelevant);
  CHECK(parse_verdict(JudgeScale::kRelevance, "IRRELEVANT") == Verdict::kIrrelevant);
  CHECK(parse_verdict(JudgeScale::kRelevance, "Not irrelevant; final answer: Relevant") ==
        Verdict::kRelevant);
  CHECK_FALSE(parse_verdict(JudgeScale::kRelevance, "Mostly Different").has_value());
  CHECK(parse_verdict(JudgeScale::kDiversity, "Mostly Different") == Verdict::kMostlyDifferent);
}

TEST_CASE("judge with fixed mock, re-ask and parse failure") {
  vocab::SeededSampler s(1, "judge");
  auto fixed = ScriptedChatModel::fixed("Relevant");
  auto v = judge(relevance_template(), {{"user prompt", "p"}, {"response", "r"}}, fixed, s);
  CHECK(v.verdict == Verdict::kRelevant);
  CHECK(v.attempts == 1);
  CHECK(fixed.requests()[0].messages[0].content.find("Passage to evaluate:") != std::string::npos);

  ScriptedChatModel second([](const ChatRequest&, std::size_t i) {
    return i == 0 ? std::string("hmm") : std::string("Partially Similar");
  });
  auto w = judge(diversity_template(), {{"user prompt", "p"}, {"response0", "a"}, {"response1", "b"}},
                 second, s);
  CHECK(w.verdict == Verdict::kPartiallySimilar);
  CHECK(w.attempts == 2);
  CHECK(second.requests()[1].messages.back().content.rfind("Reply with exactly one of:", 0) == 0);

  auto junk = ScriptedChatModel::fixed("no idea");
  CHECK(code_of([&] { judge(relevance_template(), {{"user prompt", "p"}, {"response", "r"}}, junk, s); }) ==
        ErrorCode::kJudgeParseError);
}

TEST_CASE("judge label order is shuffled by the seeded stream") {
  auto fixed = ScriptedChatModel::fixed("Relevant");
  std::set<std::array<Verdict, 3>> orders;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    vocab::SeededSampler a(seed, "judge");
    vocab::SeededSampler b(seed, "judge");
    auto x = judge(relevance_template(), {{"user prompt", "p"}, {"response", "r"}}, fixed, a);
    auto y = judge(relevance_template(), {{"user prompt", "p"}, {"response", "r"}}, fixed, b);
    CHECK(x.label_order == y.label_order);
    orders.insert(x.label_order);
  }
  CHECK(orders.size() == 6);
}
