#include <thread>

#include <fmt/format.h>

#include "triex/cards.hpp"
#include "triex/hash.hpp"
#include "triex/model_client.hpp"

namespace triex {

void ModelEndpoint::validate() const {
  if (name.empty()) throw InvalidInput("model endpoint needs a name");
  if (backend != "http" && backend != "scripted") {
    throw InvalidInput(fmt::format("model '{}': unknown backend '{}'", name, backend));
  }
  if (backend == "http" && base_url.empty()) throw InvalidInput(fmt::format("model '{}': base_url missing", name));
  if (!(temperature >= 0.0) || !(top_p > 0.0 && top_p <= 1.0)) {
    throw InvalidInput(fmt::format("model '{}': bad decoding settings", name));
  }
  if (timeout_ms <= 0 || max_retries < 0 || max_in_flight < 1 || backoff_ms < 0) {
    throw InvalidInput(fmt::format("model '{}': bad transport settings", name));
  }
}

void to_json(nlohmann::json& j, const ModelEndpoint& e) {
  j = nlohmann::json{{"name", e.name},
                     {"backend", e.backend},
                     {"base_url", e.base_url},
                     {"api_key_env", e.api_key_env},
                     {"temperature", e.temperature},
                     {"top_p", e.top_p},
                     {"timeout_ms", e.timeout_ms},
                     {"max_retries", e.max_retries},
                     {"max_in_flight", e.max_in_flight},
                     {"backoff_ms", e.backoff_ms}};
  if (!e.scripted.is_null()) j["scripted"] = e.scripted;
}

void from_json(const nlohmann::json& j, ModelEndpoint& e) {
  const ModelEndpoint d;
  e.name = j.at("name").get<std::string>();
  e.backend = j.value("backend", d.backend);
  e.base_url = j.value("base_url", d.base_url);
  e.api_key_env = j.value("api_key_env", d.api_key_env);
  e.temperature = j.value("temperature", d.temperature);
  e.top_p = j.value("top_p", d.top_p);
  e.timeout_ms = j.value("timeout_ms", d.timeout_ms);
  e.max_retries = j.value("max_retries", d.max_retries);
  e.max_in_flight = j.value("max_in_flight", d.max_in_flight);
  e.backoff_ms = j.value("backoff_ms", d.backoff_ms);
  e.scripted = j.value("scripted", nlohmann::json());
}

void to_json(nlohmann::json& j, const Usage& u) {
  j = nlohmann::json{{"prompt_tokens", u.prompt_tokens},
                     {"completion_tokens", u.completion_tokens},
                     {"latency_ms", u.latency_ms},
                     {"retry_count", u.retry_count}};
}

void from_json(const nlohmann::json& j, Usage& u) {
  u.prompt_tokens = j.value("prompt_tokens", 0);
  u.completion_tokens = j.value("completion_tokens", 0);
  u.latency_ms = j.value("latency_ms", 0.0);
  u.retry_count = j.value("retry_count", 0);
}

// ---------------------------------------------------------------------------

void ScriptedBackend::add_fixture(const std::string& role, const std::string& prompt, std::string response) {
  add_fixture_by_hash(role, sha256_hex(prompt), std::move(response));
}

void ScriptedBackend::add_fixture_by_hash(const std::string& role, const std::string& prompt_hash,
                                          std::string response) {
  std::lock_guard lock(mu_);
  fixtures_[{role, prompt_hash}] = std::move(response);
}

void ScriptedBackend::load_fixtures(const nlohmann::json& list) {
  for (const auto& f : list) {
    add_fixture_by_hash(f.at("role").get<std::string>(), f.at("prompt_hash").get<std::string>(),
                        f.at("response").get<std::string>());
  }
}

Completion ScriptedBackend::attempt(const ModelEndpoint&, const ModelRequest& request) {
  Completion c;
  c.prompt_hash = sha256_hex(request.prompt);
  bool found = false;
  {
    std::lock_guard lock(mu_);
    const auto it = fixtures_.find({request.role, c.prompt_hash});
    if (it != fixtures_.end()) {
      c.text = it->second;
      found = true;
    }
  }
  if (!found) {
    if (!policy_) {
      throw TransportError(fmt::format("scripted backend: no fixture for role '{}' and prompt {}", request.role,
                                       c.prompt_hash.substr(0, 12)));
    }
    c.text = policy_(request);
  }
  c.usage.prompt_tokens = static_cast<int>(request.prompt.size() / 4);
  c.usage.completion_tokens = static_cast<int>(c.text.size() / 4);
  return c;
}

// ---------------------------------------------------------------------------

namespace {

ModelEndpoint validated(ModelEndpoint e) {
  e.validate();
  return e;
}

}  // namespace

ModelClient::ModelClient(ModelEndpoint endpoint, std::shared_ptr<ModelBackend> backend, SleepFn sleep)
    : endpoint_(validated(std::move(endpoint))),
      backend_(std::move(backend)),
      sleep_(sleep ? std::move(sleep) : SleepFn([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      slots_(endpoint_.max_in_flight) {}

Completion ModelClient::complete(const ModelRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  const std::string hash = sha256_hex(request.prompt);
  std::string last_error;
  for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
    if (attempt > 0) sleep_(std::chrono::milliseconds(static_cast<long long>(endpoint_.backoff_ms) << (attempt - 1)));
    slots_.acquire();
    const int now = ++in_flight_;
    for (int seen = peak_.load(); now > seen && !peak_.compare_exchange_weak(seen, now);) {
    }
    try {
      Completion c = backend_->attempt(endpoint_, request);
      --in_flight_;
      slots_.release();
      c.prompt_hash = hash;
      c.usage.retry_count = attempt;
      c.usage.latency_ms =
          backend_->deterministic()
              ? 0.0
              : std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      return c;
    } catch (const RetryableError& e) {
      --in_flight_;
      slots_.release();
      last_error = e.what();
    } catch (...) {
      --in_flight_;
      slots_.release();
      throw;
    }
  }
  throw TransportError(fmt::format("model '{}': {} attempts failed, last error: {}", endpoint_.name,
                                   endpoint_.max_retries + 1, last_error));
}

std::shared_ptr<ModelClient> make_client(const ModelEndpoint& endpoint) {
  endpoint.validate();
  if (endpoint.backend == "scripted") {
    ScriptedAgentSettings settings;
    if (endpoint.scripted.is_object()) settings = endpoint.scripted.get<ScriptedAgentSettings>();
    auto backend = std::make_shared<ScriptedBackend>(make_scripted_policy(settings));
    if (endpoint.scripted.is_object() && endpoint.scripted.contains("fixtures")) {
      backend->load_fixtures(endpoint.scripted["fixtures"]);
    }
    return std::make_shared<ModelClient>(endpoint, backend);
  }
  return std::make_shared<ModelClient>(endpoint, std::make_shared<HttpBackend>());
}

}  // namespace triex
