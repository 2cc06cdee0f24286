#include <filesystem>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "triex/hash.hpp"
#include "triex/runner.hpp"

namespace triex {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunManifest::validate() const {
  try {
    game.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (!(features.medium_from < features.strong_from)) throw ConfigError("features: medium_from must be below strong_from");
  if (seats.size() < 2) throw ConfigError("a table needs at least two seats");
  std::set<std::string> ids, names;
  for (const auto& e : models) {
    try {
      e.validate();
    } catch (const InvalidInput& err) {
      throw ConfigError(err.what());
    }
    if (!names.insert(e.name).second) throw ConfigError(fmt::format("model '{}' declared twice", e.name));
  }
  for (const auto& s : seats) {
    if (s.id.empty()) throw ConfigError("every seat needs an id");
    if (!ids.insert(s.id).second) throw ConfigError(fmt::format("seat id '{}' used twice", s.id));
    if (s.is_llm()) {
      if (!names.count(s.model)) throw ConfigError(fmt::format("seat '{}': no endpoint for model '{}'", s.id, s.model));
    } else if (!parse_archetype(s.agent)) {
      throw ConfigError(fmt::format("seat '{}': unknown agent '{}'", s.id, s.agent));
    }
  }
  for (const auto& o : oracles) {
    if (!names.count(o)) throw ConfigError(fmt::format("oracle '{}' has no endpoint", o));
  }
  for (const auto& t : intervention.traits) {
    if (!parse_trait(t)) throw ConfigError(fmt::format("unknown intervention trait '{}'", t));
  }
  for (const auto& d : intervention.directions) {
    if (!parse_direction(d)) throw ConfigError(fmt::format("unknown intervention direction '{}'", d));
  }
  if (intervention.runs < 1) throw ConfigError("intervention runs must be positive");
  if (second_person_window < 1) throw ConfigError("second_person_window must be positive");
  if (workers < 1) throw ConfigError("workers must be positive");
  if (rule.contradiction_cap < 1 || rule.contradiction_cap > 5) throw ConfigError("rule contradiction_cap outside [1,5]");
}

const ModelEndpoint& RunManifest::endpoint(const std::string& name) const {
  for (const auto& e : models) {
    if (e.name == name) return e;
  }
  throw ConfigError(fmt::format("no endpoint named '{}'", name));
}

std::vector<std::string> RunManifest::llm_models() const {
  std::vector<std::string> out;
  for (const auto& s : seats) {
    if (s.is_llm() && std::find(out.begin(), out.end(), s.model) == out.end()) out.push_back(s.model);
  }
  return out;
}

RunManifest default_manifest() {
  RunManifest m;
  ModelEndpoint e;
  e.name = "scripted-llm";
  e.backend = "scripted";
  e.max_retries = 0;
  e.scripted = json{{"policy", "stochastic"}};
  m.models.push_back(e);
  m.seats.push_back({"P0", "llm", e.name});
  int i = 1;
  for (Archetype a : kAllArchetypes) m.seats.push_back({fmt::format("P{}", i++), std::string(archetype_name(a)), ""});
  m.oracles = {e.name};
  return m;
}

void to_json(json& j, const FeatureConfig& c) {
  j = json{{"medium_from", c.medium_from},
           {"strong_from", c.strong_from},
           {"high_risk_raise_over_pot", c.high_risk_raise_over_pot},
           {"high_risk_raise_over_stack", c.high_risk_raise_over_stack},
           {"bluff_equity", c.bluff_equity}};
}

void from_json(const json& j, FeatureConfig& c) {
  read_opt(j, "medium_from", c.medium_from);
  read_opt(j, "strong_from", c.strong_from);
  read_opt(j, "high_risk_raise_over_pot", c.high_risk_raise_over_pot);
  read_opt(j, "high_risk_raise_over_stack", c.high_risk_raise_over_stack);
  read_opt(j, "bluff_equity", c.bluff_equity);
}

void to_json(json& j, const SeatSpec& s) {
  j = json{{"id", s.id}, {"agent", s.agent}};
  if (s.is_llm()) j["model"] = s.model;
}

void from_json(const json& j, SeatSpec& s) {
  s.id = j.at("id").get<std::string>();
  s.agent = j.at("agent").get<std::string>();
  s.model = j.value("model", std::string());
}

void to_json(json& j, const InterventionPlan& p) {
  j = json{{"traits", p.traits}, {"directions", p.directions}, {"runs", p.runs}};
}

void from_json(const json& j, InterventionPlan& p) {
  read_opt(j, "traits", p.traits);
  read_opt(j, "directions", p.directions);
  read_opt(j, "runs", p.runs);
}

void to_json(json& j, const RunManifest& m) {
  j = json{{"game", m.game},
           {"features", m.features},
           {"seats", m.seats},
           {"models", m.models},
           {"oracles", m.oracles},
           {"intervention", m.intervention},
           {"rule", m.rule},
           {"second_person_window", m.second_person_window},
           {"out_dir", m.out_dir},
           {"workers", m.workers},
           {"stages",
            {{"play", m.stages.play},
             {"audit", m.stages.audit},
             {"intervene", m.stages.intervene},
             {"metrics", m.stages.metrics}}}};
}

void from_json(const json& j, RunManifest& m) {
  const RunManifest d = default_manifest();
  m = d;
  read_opt(j, "game", m.game);
  read_opt(j, "features", m.features);
  read_opt(j, "seats", m.seats);
  read_opt(j, "models", m.models);
  read_opt(j, "oracles", m.oracles);
  read_opt(j, "intervention", m.intervention);
  read_opt(j, "rule", m.rule);
  read_opt(j, "second_person_window", m.second_person_window);
  read_opt(j, "out_dir", m.out_dir);
  read_opt(j, "workers", m.workers);
  if (j.contains("stages")) {
    const auto& s = j["stages"];
    read_opt(s, "play", m.stages.play);
    read_opt(s, "audit", m.stages.audit);
    read_opt(s, "intervene", m.stages.intervene);
    read_opt(s, "metrics", m.stages.metrics);
  }
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config {}", path));
  RunManifest m;
  try {
    m = json::parse(in).get<RunManifest>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config {}: {}", path, e.what()));
  } catch (const InvalidInput& e) {
    throw ConfigError(fmt::format("config {}: {}", path, e.what()));
  }
  m.validate();
  return m;
}

std::string manifest_hash(const RunManifest& m) {
  const json j{{"game", m.game}, {"features", m.features}, {"seats", m.seats}, {"models", m.models}};
  return sha256_hex(j.dump());
}

std::string run_directory(const RunManifest& m) {
  return (fs::path(m.out_dir) / fmt::format("{}-s{}", manifest_hash(m).substr(0, 12), m.game.rng_seed)).string();
}

std::string safe_name(const std::string& name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '_';
  return out;
}

namespace layout {

std::string trace_path(const std::string& run, int battle) {
  return (fs::path(run) / "traces" / fmt::format("battle_{:03d}.trace.ndjson", battle)).string();
}

std::string hands_path(const std::string& run, int battle) {
  return (fs::path(run) / "traces" / fmt::format("battle_{:03d}.hands.ndjson", battle)).string();
}

std::string rule_audit_path(const std::string& run) { return (fs::path(run) / "audit" / "rule.ndjson").string(); }

std::string oracle_audit_path(const std::string& run, const std::string& oracle) {
  return (fs::path(run) / "audit" / fmt::format("oracle_{}.ndjson", safe_name(oracle))).string();
}

std::string second_person_path(const std::string& run, const std::string& oracle) {
  return (fs::path(run) / "audit" / fmt::format("second_person_{}.ndjson", safe_name(oracle))).string();
}

std::string intervention_path(const std::string& run, const std::string& model, Trait trait, Direction dir) {
  return (fs::path(run) / "intervene" /
          fmt::format("{}__{}__{}.json", safe_name(model), trait_key(trait), direction_name(dir)))
      .string();
}

std::string metrics_dir(const std::string& run) { return (fs::path(run) / "metrics").string(); }

std::string report_path(const std::string& run) { return (fs::path(run) / "metrics" / "report.json").string(); }

}  // namespace layout

bool stage_done(const std::string& run, const std::string& stage, const std::string& key) {
  std::ifstream in(fs::path(run) / "stages" / (stage + ".done"));
  std::string stored;
  return in && std::getline(in, stored) && stored == key;
}

void mark_stage(const std::string& run, const std::string& stage, const std::string& key) {
  fs::create_directories(fs::path(run) / "stages");
  std::ofstream out(fs::path(run) / "stages" / (stage + ".done"), std::ios::trunc);
  out << key << "\n";
}

ClientPool::ClientPool(const RunManifest& m, ClientFactory factory) {
  for (ModelEndpoint e : m.models) {
    e.temperature = m.game.temperature;
    e.top_p = m.game.top_p;
    backends_[e.name] = e.backend;
    clients_[e.name] = factory(e);
  }
}

ModelClient& ClientPool::get(const std::string& name) {
  const auto it = clients_.find(name);
  if (it == clients_.end()) throw ConfigError(fmt::format("no client for model '{}'", name));
  return *it->second;
}

bool ClientPool::offline_capable(const std::string& name) const {
  const auto it = backends_.find(name);
  return it != backends_.end() && it->second == "scripted";
}

}  // namespace triex
