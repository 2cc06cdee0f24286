#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "triex/beliefs.hpp"
#include "triex/features.hpp"
#include "triex/table.hpp"
#include "triex/templates.hpp"

namespace triex {

// ---------------------------------------------------------------------------
// Prompt contexts

// Everything the first-person prompt shows at one decision point. Logged with
// each trace row so that reruns rebuild the exact prompt.
struct DecisionContext {
  std::string player;
  HoleCards hole{};
  std::vector<Card> board;
  Street street = Street::kPreflop;
  Chips pot = 0;
  Chips call_amount = 0;
  Chips min_raise = 0;
  Chips max_raise = 0;
  double pot_odds = 0.0;
  std::string position_text;
  std::vector<std::string> opponent_actions;  // one line each, this hand
  std::vector<OpponentProfile> profiles;      // agent's beliefs, one per opponent
};

std::string format_profile_line(const OpponentProfile& p);
std::string render_decision_prompt(const DecisionContext& ctx);

void to_json(nlohmann::json& j, const DecisionContext& c);
void from_json(const nlohmann::json& j, DecisionContext& c);

// Evidence the profiling prompt summarizes for one opponent.
struct ProfileContext {
  std::string opponent_id;
  BehaviorStats stats;
  TraitVector current;
  int hand_index = 0;
};

std::string profile_summary_text(const ProfileContext& ctx);
std::string render_profile_prompt(const ProfileContext& ctx);

struct OracleContext {
  std::string player;
  int round = 0;  // hand index
  Street street = Street::kPreflop;
  HoleCards hole{};
  std::vector<Card> board;
  Chips pot = 0;
  Chips call_amount = 0;
  Chips min_raise = 0;
  Chips max_raise = 0;
  std::string position_info;
  std::string opponent_actions;
  double equity = 0.0;
  HandStrength bucket = HandStrength::kWeak;
  double pot_odds = 0.0;
  ReferenceFeatures features;
  std::string self_reasoning;  // text inside the SELF-EXPLANATION block
  std::string profiles;
  std::string action;
};

std::string risk_features_text(const ReferenceFeatures& f);
std::string render_oracle_prompt(const OracleContext& ctx);

// The second-person audit template takes no placeholders; the data follow it
// as a JSON block.
std::string render_second_person_oracle_prompt(const nlohmann::json& input);

// ---------------------------------------------------------------------------
// First-person artifact

enum class ClaimStatus : std::uint8_t { kValue, kMissing, kMalformed };

std::string_view claim_status_name(ClaimStatus s);

enum class ArtifactField : std::uint8_t {
  kNarrative = 0,
  kHandStrength,
  kRiskAttitude,
  kMainGoal,
  kPerceivedOpponentRisk,
  kProfileInfluence,
  kIntendedReason,
  kIntendedActionType,
  kIntendedRiskLevel,
  kDecision,
};

inline constexpr std::size_t kArtifactFieldCount = 10;

std::string_view artifact_field_key(ArtifactField f);    // snake_case
std::string_view artifact_field_label(ArtifactField f);  // template label

struct Claim {
  ClaimStatus status = ClaimStatus::kMissing;
  std::string value;  // canonical token or text; empty unless kValue
  std::string raw;    // source token as written; kept for kMalformed
  std::size_t begin = 0;  // byte span of the raw token in the source
  std::size_t end = 0;

  // Spans are positional metadata and do not take part in equality.
  friend bool operator==(const Claim& a, const Claim& b) {
    return a.status == b.status && a.value == b.value &&
           (a.status != ClaimStatus::kMalformed || a.raw == b.raw);
  }
};

struct ExplanationSignature {
  std::array<Claim, kArtifactFieldCount> claims;

  const Claim& operator[](ArtifactField f) const { return claims[static_cast<std::size_t>(f)]; }
  Claim& operator[](ArtifactField f) { return claims[static_cast<std::size_t>(f)]; }
  int missing_count() const;
  int malformed_count() const;
  friend bool operator==(const ExplanationSignature&, const ExplanationSignature&) = default;
};

struct FirstPersonArtifact {
  std::string raw;             // full model output
  std::string self_reasoning;  // block contents, or the whole text without markers
  bool block_found = false;
  bool block_closed = false;
  ExplanationSignature signature;
  std::optional<Action> decision;  // set iff the decision claim is kValue
};

// Total: never throws. A missing or malformed decision is reported through the
// signature; callers apply the fallback policy.
FirstPersonArtifact parse_first_person(std::string_view raw);

// Canonical text for a parsed artifact; reparsing gives an equal signature.
std::string canonical_first_person_text(const FirstPersonArtifact& a);

// FOLD when facing a bet, otherwise CHECK.
Action fallback_action(const LegalActionSet& legal);

void to_json(nlohmann::json& j, const ExplanationSignature& s);
void from_json(const nlohmann::json& j, ExplanationSignature& s);

// ---------------------------------------------------------------------------
// Opponent profile blocks

struct ParsedProfile {
  std::string opponent_id;
  std::array<std::optional<double>, kTraitCount> raw{};  // as written
  std::array<bool, kTraitCount> out_of_range{};
  std::string summary;
  std::string rationale;
  bool summary_missing = true;
  bool rationale_missing = true;

  // Raw values with gaps filled from `prior`; not clamped.
  TraitVector proposal(const TraitVector& prior) const;
  // Clamped into [0,1].
  TraitVector clamped(const TraitVector& prior) const;
};

// Every [OPPONENT-PROFILE] block in the text. Empty when there is none, which
// callers treat as a skipped update.
std::vector<ParsedProfile> parse_opponent_profile(std::string_view raw);

// ---------------------------------------------------------------------------
// Oracle outputs

struct OracleReport {
  int hand_strength_consistency = 0;
  int risk_attitude_consistency = 0;
  int goal_behavior_consistency = 0;
  int use_of_opponent_profiles = 0;
  int overall_faithfulness = 0;
  std::string rationalization_likely;  // yes | no | uncertain
  std::map<std::string, std::string> evidence;  // Hand, Risk, Goal, Profile
  std::vector<std::string> key_issues;
  std::string comment;
  std::vector<std::string> flags;  // non-fatal findings, e.g. evidence_not_verbatim:Hand
  bool repaired = false;
};

enum class DirectionLabel : std::uint8_t { kOverestimate, kUnderestimate, kMatched };

std::string_view direction_label_name(DirectionLabel d);
std::optional<DirectionLabel> parse_direction_label(std::string_view s);

struct SecondPersonAuditReport {
  double align_score = 0.0;
  // trait key -> opponent id -> label
  std::map<std::string, std::map<std::string, DirectionLabel>> direction_pred;
  std::vector<std::string> evidence;
  std::vector<std::string> flags;
  bool repaired = false;
};

enum class OracleErrorKind : std::uint8_t { kInvalidJson, kSchema, kRange };

std::string_view oracle_error_name(OracleErrorKind k);

struct OracleError {
  OracleErrorKind kind = OracleErrorKind::kInvalidJson;
  std::string message;
};

template <typename T>
struct OracleParse {
  std::optional<T> report;
  std::optional<OracleError> error;
  bool ok() const { return report.has_value(); }
};

// Strict JSON first, then one repair pass (code fences and surrounding prose
// removed). Evidence quotes are checked against `audited_text`.
OracleParse<OracleReport> parse_oracle_first_person(std::string_view raw, std::string_view audited_text);

// `single_trait` names the trait when the oracle was asked about one trait and
// answers with a flat opponent -> label map.
OracleParse<SecondPersonAuditReport> parse_oracle_second_person(
    std::string_view raw, std::optional<std::string> single_trait = std::nullopt);

// Text between the first '{' and its balancing '}', honoring JSON strings.
std::optional<std::pair<std::size_t, std::size_t>> balanced_object(std::string_view text,
                                                                   std::size_t from = 0);

void to_json(nlohmann::json& j, const OracleReport& r);
void from_json(const nlohmann::json& j, OracleReport& r);
void to_json(nlohmann::json& j, const SecondPersonAuditReport& r);
void from_json(const nlohmann::json& j, SecondPersonAuditReport& r);

}  // namespace triex
