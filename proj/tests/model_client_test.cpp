#include <gtest/gtest.h>

// Same configuration as the library build of this header.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "triex/artifacts.hpp"
#include "triex/hash.hpp"
#include "triex/model_client.hpp"

using namespace triex;

namespace {

ModelEndpoint scripted_endpoint(int retries = 3, int cap = 4) {
  ModelEndpoint e;
  e.name = "scripted-a";
  e.backend = "scripted";
  e.max_retries = retries;
  e.max_in_flight = cap;
  return e;
}

// Fails `failures` times with a retryable error, then answers "ok".
class FlakyBackend : public ModelBackend {
 public:
  explicit FlakyBackend(int failures, bool retryable = true) : failures_(failures), retryable_(retryable) {}
  Completion attempt(const ModelEndpoint&, const ModelRequest&) override {
    ++calls;
    if (calls <= failures_) {
      if (retryable_) throw RetryableError("HTTP 503");
      throw TransportError("HTTP 401");
    }
    return Completion{"ok", {}, ""};
  }
  int calls = 0;

 private:
  int failures_;
  bool retryable_;
};

class SlowBackend : public ModelBackend {
 public:
  Completion attempt(const ModelEndpoint&, const ModelRequest&) override {
    const int now = ++active;
    for (int seen = max_seen.load(); now > seen && !max_seen.compare_exchange_weak(seen, now);) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(3));
    --active;
    return Completion{"done", {}, ""};
  }
  std::atomic<int> active{0};
  std::atomic<int> max_seen{0};
};

nlohmann::json decision_hints(double equity, HandStrength bucket, Chips to_call) {
  ReferenceFeatures f;
  f.street = Street::kFlop;
  f.pot = 100;
  f.to_call = to_call;
  f.stack = 1000;
  f.n_opponents = 2;
  f.pot_odds = to_call > 0 ? static_cast<double>(to_call) / static_cast<double>(100 + to_call) : 0.0;
  f.spr = 10;
  f.equity = equity;
  f.bucket = bucket;
  LegalActionSet legal;
  legal.call_amount = to_call;
  legal.can_fold = to_call > 0;
  legal.min_raise = to_call > 0 ? 2 * to_call : 10;
  legal.max_raise = 1000;
  legal.raise_available = true;
  return {{"features", f}, {"legal", legal}};
}

std::string prompt_with_profile(double aggressiveness) {
  DecisionContext c;
  c.player = "seat0";
  c.hole = {Card::parse("Ah"), Card::parse("Kd")};
  c.board = parse_cards("Qs Jh 2c");
  c.street = Street::kFlop;
  auto p = initial_profile("seat1");
  p.traits[Trait::kAggressiveness] = aggressiveness;
  c.profiles = {p, initial_profile("seat2")};
  return render_decision_prompt(c);
}

}  // namespace

TEST(ScriptedBackend, FixtureReturnedExactly) {
  auto backend = std::make_shared<ScriptedBackend>();
  const std::string fixture = "  exact bytes\n{\"action\": \"fold\"}\n";
  backend->add_fixture(kRoleDecision, "prompt H", fixture);
  ModelClient client(scripted_endpoint(), backend);
  const auto c = client.complete({kRoleDecision, "prompt H", 0, {}});
  EXPECT_EQ(c.text, fixture);
  EXPECT_EQ(c.prompt_hash, sha256_hex("prompt H"));
  EXPECT_EQ(client.complete({kRoleDecision, "prompt H", 99, {}}).text, fixture);
  EXPECT_THROW(client.complete({kRoleProfile, "prompt H", 0, {}}), TransportError);  // role is part of the key
}

TEST(ScriptedBackend, FixturesLoadByHash) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->load_fixtures(nlohmann::json::array(
      {{{"role", "decision"}, {"prompt_hash", sha256_hex("p")}, {"response", "r"}}}));
  ModelClient client(scripted_endpoint(), backend);
  EXPECT_EQ(client.complete({kRoleDecision, "p", 0, {}}).text, "r");
}

TEST(ModelClient, RetriesThenSucceeds) {
  auto backend = std::make_shared<FlakyBackend>(2);
  std::vector<long long> sleeps;
  ModelClient client(scripted_endpoint(3), backend,
                     [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); });
  const auto c = client.complete({kRoleDecision, "x", 0, {}});
  EXPECT_EQ(c.text, "ok");
  EXPECT_EQ(c.usage.retry_count, 2);
  EXPECT_EQ(sleeps, (std::vector<long long>{500, 1000}));
}

TEST(ModelClient, ExhaustedRetriesSurfaceTransportError) {
  auto backend = std::make_shared<FlakyBackend>(100);
  ModelClient client(scripted_endpoint(2), backend, [](std::chrono::milliseconds) {});
  EXPECT_THROW(client.complete({kRoleDecision, "x", 0, {}}), TransportError);
  EXPECT_EQ(backend->calls, 3);
}

TEST(ModelClient, NonRetryableErrorFailsFast) {
  auto backend = std::make_shared<FlakyBackend>(1, false);
  ModelClient client(scripted_endpoint(5), backend, [](std::chrono::milliseconds) {});
  EXPECT_THROW(client.complete({kRoleDecision, "x", 0, {}}), TransportError);
  EXPECT_EQ(backend->calls, 1);
}

TEST(ModelClient, PromptNeverMutated) {
  auto backend = std::make_shared<ScriptedBackend>(make_scripted_policy({}));
  ModelClient client(scripted_endpoint(), backend);
  ModelRequest req{kRoleDecision, prompt_with_profile(0.8), 5, decision_hints(0.5, HandStrength::kMedium, 20)};
  const std::string before = sha256_hex(req.prompt);
  const auto c = client.complete(req);
  EXPECT_EQ(sha256_hex(req.prompt), before);
  EXPECT_EQ(c.prompt_hash, before);
}

TEST(ModelClient, InFlightNeverExceedsCap) {
  auto backend = std::make_shared<SlowBackend>();
  ModelClient client(scripted_endpoint(0, 3), backend);
  std::vector<std::thread> threads;
  for (int t = 0; t < 12; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 4; ++i) client.complete({kRoleDecision, "x", 0, {}});
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(backend->max_seen.load(), 3);
  EXPECT_LE(client.peak_in_flight(), 3);
  EXPECT_GE(client.peak_in_flight(), 1);
}

TEST(ModelEndpoint, JsonAndValidation) {
  ModelEndpoint e;
  e.name = "m";
  e.base_url = "http://localhost:1/v1";
  e.api_key_env = "KEY";
  const nlohmann::json j = e;
  const auto back = j.get<ModelEndpoint>();
  EXPECT_EQ(back.base_url, e.base_url);
  EXPECT_DOUBLE_EQ(back.temperature, 0.2);
  EXPECT_DOUBLE_EQ(back.top_p, 1.0);
  ModelEndpoint bad = e;
  bad.base_url.clear();
  EXPECT_THROW(bad.validate(), InvalidInput);
  bad = e;
  bad.max_in_flight = 0;
  EXPECT_THROW(ModelClient(bad, std::make_shared<HttpBackend>()), InvalidInput);
}

TEST(HttpBackend, RequestShapeAndResponseParsing) {
  ModelEndpoint e;
  e.name = "model-x";
  e.temperature = 0.2;
  const auto body = HttpBackend::request_body(e, "hello");
  EXPECT_EQ(body["model"], "model-x");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.2);
  EXPECT_DOUBLE_EQ(body["top_p"].get<double>(), 1.0);
  const auto c = HttpBackend::parse_response(
      R"({"choices":[{"message":{"content":"hi"}}],"usage":{"prompt_tokens":3,"completion_tokens":1}})");
  EXPECT_EQ(c.text, "hi");
  EXPECT_EQ(c.usage.prompt_tokens, 3);
  EXPECT_THROW(HttpBackend::parse_response("{}"), TransportError);
  EXPECT_THROW(HttpBackend::parse_response("nope"), TransportError);
}

TEST(HttpBackend, LocalServerWithTransientFailures) {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth, seen_body;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (++hits <= 2) {
      res.status = 503;
      return;
    }
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    res.set_content(R"({"choices":[{"message":{"content":"served"}}],"usage":{"prompt_tokens":7}})",
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("TRIEX_TEST_KEY", "secret", 1);
  ModelEndpoint e;
  e.name = "local";
  e.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/";
  e.api_key_env = "TRIEX_TEST_KEY";
  e.timeout_ms = 5000;
  ModelClient client(e, std::make_shared<HttpBackend>(), [](std::chrono::milliseconds) {});
  const auto c = client.complete({kRoleDecision, "ping", 0, {}});
  server.stop();
  th.join();
  EXPECT_EQ(c.text, "served");
  EXPECT_EQ(c.usage.retry_count, 2);
  EXPECT_EQ(c.usage.prompt_tokens, 7);
  EXPECT_EQ(seen_auth, "Bearer secret");
  EXPECT_EQ(nlohmann::json::parse(seen_body)["messages"][0]["content"], "ping");
}

TEST(HttpBackend, UnreachableHostIsTransportError) {
  ModelEndpoint e;
  e.name = "gone";
  e.base_url = "http://127.0.0.1:1/v1";
  e.timeout_ms = 500;
  e.max_retries = 1;
  ModelClient client(e, std::make_shared<HttpBackend>(), [](std::chrono::milliseconds) {});
  EXPECT_THROW(client.complete({kRoleDecision, "ping", 0, {}}), TransportError);
}

// ---------------------------------------------------------------------------
// Scripted policies

TEST(ScriptedPolicies, ProfileLinesReadBack) {
  const auto profiles = read_profile_lines(prompt_with_profile(0.83));
  ASSERT_EQ(profiles.size(), 2u);
  EXPECT_DOUBLE_EQ(profiles.at("seat1").at("aggressiveness"), 0.83);
  EXPECT_DOUBLE_EQ(profiles.at("seat2").at("risk_tolerance"), 0.5);
}

TEST(ScriptedPolicies, ThresholdPolicyFlipsOnBelief) {
  ScriptedAgentSettings s;
  s.policy = "threshold";
  s.tau = 0.7;
  const auto policy = make_scripted_policy(s);
  const auto hints = decision_hints(0.45, HandStrength::kMedium, 20);
  const auto calm = parse_first_person(policy({kRoleDecision, prompt_with_profile(0.6), 0, hints}));
  const auto hot = parse_first_person(policy({kRoleDecision, prompt_with_profile(0.8), 0, hints}));
  EXPECT_EQ(*calm.decision, Action::call());
  EXPECT_EQ(*hot.decision, Action::fold());
  EXPECT_EQ(calm.signature.missing_count(), 0);
  EXPECT_EQ(policy({kRoleDecision, prompt_with_profile(0.8), 0, hints}),
            policy({kRoleDecision, prompt_with_profile(0.8), 12345, hints}));  // ignores the sample key
}

TEST(ScriptedPolicies, StochasticPolicyDeterministicPerKey) {
  const auto policy = make_scripted_policy({});
  const auto hints = decision_hints(0.55, HandStrength::kMedium, 20);
  std::set<std::string> outputs;
  for (std::uint64_t k = 0; k < 40; ++k) {
    const ModelRequest r{kRoleDecision, prompt_with_profile(0.5), k, hints};
    EXPECT_EQ(policy(r), policy(r));
    outputs.insert(policy(r));
  }
  EXPECT_GT(outputs.size(), 1u);
}

TEST(ScriptedPolicies, ProfilerOutputParses) {
  BehaviorStats stats;
  stats.hands_seen = 10;
  stats.vpip_hands = 7;
  stats.bets_raises = 6;
  stats.calls = 2;
  stats.faced = 8;
  stats.faced_calls = 2;
  stats.showdowns = 3;
  const auto policy = make_scripted_policy({});
  const std::string text =
      policy({kRoleProfile, "p", 0, {{"opponent_id", "seat3"}, {"stats", stats}, {"current", TraitVector{}}}});
  const auto parsed = parse_opponent_profile(text);
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].opponent_id, "seat3");
  EXPECT_NEAR(*parsed[0].raw[static_cast<std::size_t>(Trait::kAggressiveness)], 0.75, 1e-3);
  EXPECT_NEAR(*parsed[0].raw[static_cast<std::size_t>(Trait::kShowdownPropensity)], 0.3, 1e-3);
  EXPECT_FALSE(parsed[0].rationale_missing);
}

TEST(ScriptedPolicies, OraclesAnswerInSchema) {
  const auto policy = make_scripted_policy({});
  const auto hints = decision_hints(0.8, HandStrength::kStrong, 0);
  const std::string artifact = make_scripted_policy({"consistent"})({kRoleDecision, prompt_with_profile(0.5), 0, hints});
  const auto a = parse_first_person(artifact);
  const nlohmann::json oh{{"signature", a.signature},
                          {"features", hints["features"]},
                          {"action", *a.decision},
                          {"self_reasoning", a.self_reasoning}};
  const auto report = parse_oracle_first_person(policy({kRoleOracleFirst, "p", 0, oh}), a.self_reasoning);
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(report.report->hand_strength_consistency, 5);
  EXPECT_TRUE(report.report->flags.empty());

  const nlohmann::json sh{{"trait", "aggressiveness"},
                          {"profile", {{"a", 0.9}, {"b", 0.5}, {"c", 0.1}}},
                          {"objective", {{"a", 0.2}, {"b", 0.5}, {"c", 0.8}}}};
  const auto second = parse_oracle_second_person(policy({kRoleOracleSecond, "p", 1, sh}));
  ASSERT_TRUE(second.ok());
  EXPECT_EQ(second.report->direction_pred.at("aggressiveness").size(), 3u);
}

TEST(ScriptedPolicies, MakeClientFromEndpoint) {
  ModelEndpoint e = scripted_endpoint();
  e.scripted = {{"policy", "threshold"}, {"tau", 0.6}};
  auto client = make_client(e);
  const auto c = client->complete({kRoleDecision, prompt_with_profile(0.65), 0,
                                   decision_hints(0.3, HandStrength::kWeak, 20)});
  EXPECT_EQ(*parse_first_person(c.text).decision, Action::fold());
  e.scripted = {{"policy", "oracle-only"}};
  EXPECT_THROW(make_client(e), InvalidInput);
}
