#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triex/artifacts.hpp"
#include "triex/features.hpp"
#include "triex/model_client.hpp"
#include "triex/table.hpp"

namespace triex {

inline constexpr int kTraceSchemaVersion = 1;

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// First line of every trace file.
struct TraceHeader {
  int schema_version = kTraceSchemaVersion;
  std::string config_hash;
  std::map<std::string, std::string> template_hashes;  // template name -> sha256
  std::uint64_t seed = 0;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

// Template hashes of the shipped prompt assets.
std::map<std::string, std::string> current_template_hashes();

struct Observation {
  int seat = 0;
  int button = 0;
  HoleCards hole{};
  std::vector<Card> board;
  Chips pot = 0;
  std::vector<Chips> stacks;
  std::vector<Chips> street_committed;
  std::vector<bool> folded;
};

struct TraceArtifact {
  std::string raw;
  std::string self_reasoning;
  bool block_found = false;
  bool block_closed = false;
  ExplanationSignature signature;
};

struct TraceFlags {
  bool parse_fallback = false;     // no usable DECISION; fallback action executed
  bool model_unavailable = false;  // transport failed after retries
  bool illegal_proposal = false;   // proposal changed by normalization
};

// One decision row.
struct DecisionTrace {
  int battle_id = 0;
  int hand_id = 0;
  int decision_index = 0;  // within the hand
  Street street = Street::kPreflop;
  std::string player_id;
  std::string agent;       // "llm" or an archetype name
  std::string model_name;  // empty for archetypes
  Observation obs;
  LegalActionSet legal;
  std::optional<Action> proposed;
  std::optional<Action> action;  // normalized and executed
  Chips chips_added = 0;
  ReferenceFeatures features;  // with the action's risk attached
  std::optional<TraceArtifact> artifact;
  std::optional<DecisionContext> context;  // prompt inputs, for reruns
  std::string prompt_hash;
  std::uint64_t sample_key = 0;
  TraceFlags flags;
  Usage usage;

  bool is_llm() const { return agent == "llm"; }
};

// Decision key: battle/hand/decision/player.
std::string decision_key(const DecisionTrace& row);

// Throws TraceError naming the first violated rule.
void validate_row(const DecisionTrace& row);

void to_json(nlohmann::json& j, const TraceHeader& h);
void from_json(const nlohmann::json& j, TraceHeader& h);
void to_json(nlohmann::json& j, const DecisionTrace& r);
void from_json(const nlohmann::json& j, DecisionTrace& r);

// Per-hand summary written next to the decision rows.
struct ProfileUpdateRecord {
  std::string agent;     // player id of the profiling agent
  std::string opponent;
  bool skipped = false;  // no usable block in the reply
  TraitVector proposed;
  TraitVector applied;
  bool out_of_range = false;
  bool rationale_missing = false;
};

struct HandRecord {
  int battle_id = 0;
  int hand_id = 0;
  int button = 0;
  std::vector<Chips> stacks_before;
  std::vector<Chips> stacks_after;
  std::vector<Chips> payouts;
  bool showdown = false;
  std::vector<Card> board;
  std::map<std::string, BehaviorStats> stats;  // cumulative, by player id
  std::vector<ProfileUpdateRecord> profile_updates;
};

void to_json(nlohmann::json& j, const HandRecord& h);
void from_json(const nlohmann::json& j, HandRecord& h);

// Append-only NDJSON writer: header line, then one object per line. Rows must
// arrive in (hand_id, decision_index) order for the writer's battle.
class TraceWriter {
 public:
  TraceWriter(const std::string& path, const TraceHeader& header, int battle_id);

  void append(const DecisionTrace& row);
  void flush();  // called at hand boundaries
  std::size_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::string path_;
  int battle_id_;
  std::size_t rows_ = 0;
  int last_hand_ = -1;
  int last_decision_ = -1;
};

class HandWriter {
 public:
  HandWriter(const std::string& path, const TraceHeader& header);
  void append(const HandRecord& hand);

 private:
  std::ofstream out_;
  std::string path_;
};

struct TraceFile {
  TraceHeader header;
  std::vector<DecisionTrace> rows;
};

struct HandFile {
  TraceHeader header;
  std::vector<HandRecord> hands;
};

TraceFile read_trace(const std::string& path);
HandFile read_hands(const std::string& path);

// Row filters; unset fields match everything.
struct SliceFilter {
  std::optional<Street> street;
  std::optional<std::string> player;
  std::optional<std::string> model;
  std::optional<HandStrength> bucket;
  std::optional<ActionKind> action;
  std::optional<bool> high_risk;
  std::optional<int> hand_from;  // inclusive
  std::optional<int> hand_to;    // exclusive
  bool llm_only = false;
};

struct SliceResult {
  std::vector<DecisionTrace> rows;
  std::size_t considered = 0;  // denominator for rates over the slice
};

SliceResult slice(const std::vector<DecisionTrace>& rows, const SliceFilter& filter);

// ---------------------------------------------------------------------------
// Replay

// Deal seed and button conventions shared by the runner and the replay check.
std::uint64_t hand_deal_seed(std::uint64_t seed, int battle_id, int hand_id);
int first_button(int battle_id, int n_seats);

struct ReplayReport {
  int hands = 0;
  std::size_t rows_checked = 0;
  std::vector<std::string> mismatches;
  std::vector<Chips> final_stacks;

  bool ok() const { return mismatches.empty(); }
};

// Re-deals every hand with the logged seed, applies the logged actions and
// compares each row's observation and legal set against the engine.
ReplayReport replay_battle(const std::vector<DecisionTrace>& rows, const GameConfig& config, int n_seats,
                           std::uint64_t seed, int battle_id);

}  // namespace triex
