#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace triex {

// Where and how to query one model. Scripted endpoints never touch the network.
struct ModelEndpoint {
  std::string name;               // model name on the wire and in traces
  std::string backend = "http";   // http | scripted
  std::string base_url;           // e.g. https://api.example.com/v1
  std::string api_key_env;        // environment variable holding the key
  double temperature = 0.2;
  double top_p = 1.0;
  int timeout_ms = 60000;
  int max_retries = 3;
  int max_in_flight = 4;
  int backoff_ms = 500;           // first retry delay; doubles each retry
  nlohmann::json scripted;        // scripted policy settings

  void validate() const;
};

void to_json(nlohmann::json& j, const ModelEndpoint& e);
void from_json(const nlohmann::json& j, ModelEndpoint& e);

// Roles a model can be asked to play.
inline constexpr const char* kRoleDecision = "decision";
inline constexpr const char* kRoleProfile = "profile";
inline constexpr const char* kRoleOracleFirst = "oracle_first_person";
inline constexpr const char* kRoleOracleSecond = "oracle_second_person";

struct ModelRequest {
  std::string role;
  std::string prompt;
  std::uint64_t sample_key = 0;  // drives scripted sampling; ignored over HTTP
  // Side information for scripted backends only (equity, bucket, stats). Never
  // sent over the wire.
  nlohmann::json hints;
};

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
  double latency_ms = 0.0;
  int retry_count = 0;
};

void to_json(nlohmann::json& j, const Usage& u);
void from_json(const nlohmann::json& j, Usage& u);

struct Completion {
  std::string text;
  Usage usage;
  std::string prompt_hash;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A failure worth retrying: timeouts, connection errors, 429 and 5xx.
class RetryableError : public TransportError {
 public:
  using TransportError::TransportError;
};

// One attempt at a completion. Throws RetryableError or TransportError.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual Completion attempt(const ModelEndpoint& endpoint, const ModelRequest& request) = 0;
  // Deterministic backends report zero latency so traces stay byte-identical.
  virtual bool deterministic() const { return false; }
};

class HttpBackend : public ModelBackend {
 public:
  Completion attempt(const ModelEndpoint& endpoint, const ModelRequest& request) override;

  static nlohmann::json request_body(const ModelEndpoint& endpoint, const std::string& prompt);
  // Text and token counts from a chat-completion response body.
  static Completion parse_response(const std::string& body);
};

using ScriptedPolicy = std::function<std::string(const ModelRequest&)>;

// Fixtures keyed by (role, prompt hash); a policy answers everything else.
class ScriptedBackend : public ModelBackend {
 public:
  ScriptedBackend() = default;
  explicit ScriptedBackend(ScriptedPolicy policy) : policy_(std::move(policy)) {}
  bool deterministic() const override { return true; }

  void add_fixture(const std::string& role, const std::string& prompt, std::string response);
  void add_fixture_by_hash(const std::string& role, const std::string& prompt_hash, std::string response);
  // [{"role": ..., "prompt_hash": ..., "response": ...}, ...]
  void load_fixtures(const nlohmann::json& list);
  void set_policy(ScriptedPolicy policy) { policy_ = std::move(policy); }

  Completion attempt(const ModelEndpoint& endpoint, const ModelRequest& request) override;

 private:
  std::mutex mu_;
  std::map<std::pair<std::string, std::string>, std::string> fixtures_;
  ScriptedPolicy policy_;
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

// Retries, backoff and the in-flight cap around a backend. Shareable across
// threads.
class ModelClient {
 public:
  ModelClient(ModelEndpoint endpoint, std::shared_ptr<ModelBackend> backend, SleepFn sleep = {});

  // Throws TransportError once retries are exhausted; no partial text is kept.
  Completion complete(const ModelRequest& request);

  const ModelEndpoint& endpoint() const { return endpoint_; }
  int peak_in_flight() const { return peak_.load(); }

 private:
  ModelEndpoint endpoint_;
  std::shared_ptr<ModelBackend> backend_;
  SleepFn sleep_;
  std::counting_semaphore<> slots_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
};

// Builds a client for an endpoint: HTTP, or scripted with the policy named in
// endpoint.scripted["policy"].
std::shared_ptr<ModelClient> make_client(const ModelEndpoint& endpoint);

// ---------------------------------------------------------------------------
// Scripted policies. They answer every role with well-formed text in the
// shapes the prompt templates ask for, and read their inputs from the hints
// and from the profile numbers printed in the prompt.

struct ScriptedAgentSettings {
  std::string policy = "stochastic";  // stochastic | threshold | consistent
  std::string trait = "aggressiveness";
  double tau = 0.7;          // threshold policy cut-off on the believed trait
  double misreport = 0.15;   // stochastic policy: chance of a wrong hand claim
  int oracle_strictness = 0;  // shifts oracle scores down by this much
  double oracle_label_noise = 0.1;
};

void to_json(nlohmann::json& j, const ScriptedAgentSettings& s);
void from_json(const nlohmann::json& j, ScriptedAgentSettings& s);

ScriptedPolicy make_scripted_policy(const ScriptedAgentSettings& settings);

// "- id: RiskTolerance=0.50, ..." lines in a decision prompt, keyed by id.
std::map<std::string, std::map<std::string, double>> read_profile_lines(const std::string& prompt);

}  // namespace triex
