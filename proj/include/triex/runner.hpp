#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triex/audit.hpp"
#include "triex/baselines.hpp"
#include "triex/beliefs.hpp"
#include "triex/features.hpp"
#include "triex/metrics.hpp"
#include "triex/model_client.hpp"
#include "triex/table.hpp"
#include "triex/trace.hpp"

namespace triex {

// Bad or inconsistent manifest.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Persisted data that cannot be used as asked, e.g. a rerun prompt that no
// longer hashes to the logged prompt.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SeatSpec {
  std::string id;
  std::string agent;  // "llm" or an archetype name
  std::string model;  // endpoint name, LLM seats only

  bool is_llm() const { return agent == "llm"; }
};

struct InterventionPlan {
  std::vector<std::string> traits{"aggressiveness", "risk_tolerance"};
  std::vector<std::string> directions{"up", "down"};
  int runs = 50;
};

struct StageFlags {
  bool play = true;
  bool audit = true;
  bool intervene = false;
  bool metrics = true;
};

struct RunManifest {
  GameConfig game;
  FeatureConfig features;
  std::vector<SeatSpec> seats;
  std::vector<ModelEndpoint> models;
  std::vector<std::string> oracles;  // endpoint names acting as oracles
  InterventionPlan intervention;
  RuleAuditConfig rule;
  int second_person_window = 5;  // hands per second-person audit window
  std::string out_dir = "runs";
  int workers = 1;
  StageFlags stages;

  // Throws ConfigError.
  void validate() const;
  const ModelEndpoint& endpoint(const std::string& name) const;
  std::vector<std::string> llm_models() const;  // distinct, in seat order
};

// One scripted LLM seat against the five archetypes, offline.
RunManifest default_manifest();

void to_json(nlohmann::json& j, const FeatureConfig& c);
void from_json(const nlohmann::json& j, FeatureConfig& c);
void to_json(nlohmann::json& j, const SeatSpec& s);
void from_json(const nlohmann::json& j, SeatSpec& s);
void to_json(nlohmann::json& j, const InterventionPlan& p);
void from_json(const nlohmann::json& j, InterventionPlan& p);
void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);  // missing keys keep defaults

// Throws ConfigError on unreadable or invalid files.
RunManifest load_manifest(const std::string& path);

// sha256 over the settings that shape the traces: game, features, seats and
// models. Output paths, worker count and stage flags are excluded.
std::string manifest_hash(const RunManifest& m);

// ---------------------------------------------------------------------------
// Run directory layout
//
//   <out>/<hash12>-s<seed>/
//     manifest.json
//     battles.json
//     traces/battle_XXX.trace.ndjson
//     traces/battle_XXX.hands.ndjson
//     audit/rule.ndjson
//     audit/oracle_<model>.ndjson
//     audit/second_person_<model>.ndjson
//     intervene/<model>__<trait>__<dir>.json
//     metrics/report.json, *.csv, *.svg
//     stages/<stage>.done

std::string run_directory(const RunManifest& m);

namespace layout {
std::string trace_path(const std::string& run, int battle);
std::string hands_path(const std::string& run, int battle);
std::string rule_audit_path(const std::string& run);
std::string oracle_audit_path(const std::string& run, const std::string& oracle);
std::string second_person_path(const std::string& run, const std::string& oracle);
std::string intervention_path(const std::string& run, const std::string& model, Trait trait, Direction dir);
std::string metrics_dir(const std::string& run);
std::string report_path(const std::string& run);
}  // namespace layout

// File-safe form of a model name.
std::string safe_name(const std::string& name);

// Content-hash stage guard. `key` covers every input of the stage.
bool stage_done(const std::string& run, const std::string& stage, const std::string& key);
void mark_stage(const std::string& run, const std::string& stage, const std::string& key);

// ---------------------------------------------------------------------------
// Clients

using ClientFactory = std::function<std::shared_ptr<ModelClient>(const ModelEndpoint&)>;

// One shared client per endpoint. Decoding settings come from the game config.
class ClientPool {
 public:
  explicit ClientPool(const RunManifest& m, ClientFactory factory = make_client);
  ModelClient& get(const std::string& name);
  bool offline_capable(const std::string& name) const;  // scripted backend

 private:
  std::map<std::string, std::shared_ptr<ModelClient>> clients_;
  std::map<std::string, std::string> backends_;
};

// ---------------------------------------------------------------------------
// Play

struct BattleResult {
  int battle_id = 0;
  int hands = 0;
  std::size_t rows = 0;
  bool aborted = false;
  std::string error;
};

void to_json(nlohmann::json& j, const BattleResult& r);
void from_json(const nlohmann::json& j, BattleResult& r);

// Plays one battle and writes its trace and hand files. Exceptions during
// play abort the battle; the rows written so far stay on disk.
BattleResult play_battle(const RunManifest& m, int battle_id, ClientPool& clients, const std::string& run);

// All battles over a pool of m.workers threads. Writes manifest.json and
// battles.json.
std::vector<BattleResult> run_battles(const RunManifest& m, ClientPool& clients, const std::string& run);

struct RunData {
  std::vector<DecisionTrace> rows;  // every battle, in battle order
  std::vector<HandRecord> hands;
  std::vector<BattleResult> battles;
};

// Throws RunError when the traces are missing or were written under another
// manifest.
RunData load_run(const RunManifest& m, const std::string& run);

// ---------------------------------------------------------------------------
// Audits

struct AuditOptions {
  std::vector<std::string> oracles;  // empty: rule audit only
  bool offline = false;              // oracles without a scripted backend are skipped
};

struct AuditSummary {
  std::size_t rule_records = 0;
  std::map<std::string, std::size_t> oracle_records;
  std::map<std::string, std::size_t> oracle_missing;
  std::map<std::string, std::size_t> second_person_records;
  std::vector<std::string> skipped_oracles;
};

void to_json(nlohmann::json& j, const AuditSummary& s);

// Second-person audit inputs: one per LLM agent, trait and completed window.
std::vector<SecondPersonInput> second_person_inputs(const RunManifest& m, const RunData& data);

AuditSummary run_audits(const RunManifest& m, const RunData& data, ClientPool& clients, const std::string& run,
                        const AuditOptions& options);

// ---------------------------------------------------------------------------
// Interventions

// Executed coarse actions of one model's logged LLM rows.
AlignedActions logged_actions(const std::vector<DecisionTrace>& rows);

// Re-queries every row from its logged context. With `spec` the targeted trait
// of every opponent profile in the prompt is replaced by intervene(p, delta).
// Throws RunError when the rebuilt prompt does not hash to the logged one.
AlignedActions rerun_actions(const std::vector<DecisionTrace>& rows, ModelClient& client,
                             const std::optional<InterventionSpec>& spec, std::uint64_t stream);

struct InterventionReport {
  std::string model;
  InterventionSpec spec;
  std::vector<ChangeRateSummary> runs;
  ChangeRateAggregate aggregate;
};

void to_json(nlohmann::json& j, const InterventionReport& r);
void from_json(const nlohmann::json& j, InterventionReport& r);

InterventionReport run_intervention(const RunManifest& m, const std::vector<DecisionTrace>& rows,
                                    ModelClient& client, const InterventionSpec& spec, int runs);

}  // namespace triex
