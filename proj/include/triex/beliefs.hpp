#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace triex {

enum class Trait : std::uint8_t {
  kRiskTolerance = 0,
  kAggressiveness,
  kBluffFrequency,
  kCallingStationTendency,
  kShowdownPropensity,
};

inline constexpr std::size_t kTraitCount = 5;
inline constexpr std::array<Trait, kTraitCount> kAllTraits = {
    Trait::kRiskTolerance, Trait::kAggressiveness, Trait::kBluffFrequency,
    Trait::kCallingStationTendency, Trait::kShowdownPropensity};

// snake_case key used in configs, traces and CLI flags.
std::string_view trait_key(Trait t);
// CamelCase label used in the prompt templates.
std::string_view trait_label(Trait t);
// Accepts either spelling, case-insensitively.
std::optional<Trait> parse_trait(std::string_view text);

struct TraitVector {
  std::array<double, kTraitCount> values{0.5, 0.5, 0.5, 0.5, 0.5};

  double& operator[](Trait t) { return values[static_cast<std::size_t>(t)]; }
  double operator[](Trait t) const { return values[static_cast<std::size_t>(t)]; }
  friend bool operator==(const TraitVector&, const TraitVector&) = default;
};

struct ProfileUpdate {
  int hand_index = 0;
  TraitVector proposed;  // raw proposal as parsed, before any clamping
  TraitVector applied;
  bool proposal_out_of_range = false;
};

// An agent's belief state about one opponent.
struct OpponentProfile {
  std::string opponent_id;
  TraitVector traits;
  std::string summary;
  std::string rationale;
  bool rationale_missing = false;
  int updated_at_hand = -1;  // -1 until the first update
  std::vector<ProfileUpdate> history;
};

OpponentProfile initial_profile(std::string opponent_id);

inline constexpr double kMaxTraitStep = 0.05;

// Moves every trait toward the proposal by at most kMaxTraitStep and clamps to
// [0,1]. Proposal values outside [0,1] are clamped first and flagged in the
// history entry.
OpponentProfile apply_bounded_update(OpponentProfile profile, const TraitVector& proposed,
                                     std::string summary, std::string rationale, int hand_index,
                                     bool rationale_missing = false);

enum class Direction : std::uint8_t { kUp, kDown };

std::string_view direction_name(Direction d);
std::optional<Direction> parse_direction(std::string_view text);

struct InterventionSpec {
  Trait trait = Trait::kAggressiveness;
  Direction direction = Direction::kUp;
  double delta = 2.5;
};

inline constexpr double kLogitEpsilon = 1e-6;

struct InterventionResult {
  TraitVector traits;
  bool boundary_shifted = false;  // input sat on 0 or 1 and was moved inward first
};

// p' = sigmoid(logit(p) +/- delta) on the target trait only.
InterventionResult intervene(const TraitVector& traits, const InterventionSpec& spec);

double logistic(double x);
double logit(double p);

// Rank of each value, 1 = highest, ties share the average rank.
std::vector<double> descending_ranks(const std::vector<double>& values);

// Ranks profiles on one trait with the convention above.
std::vector<double> rank_profiles(const std::vector<OpponentProfile>& profiles, Trait trait);

void to_json(nlohmann::json& j, const TraitVector& v);
void from_json(const nlohmann::json& j, TraitVector& v);
void to_json(nlohmann::json& j, const OpponentProfile& p);
void from_json(const nlohmann::json& j, OpponentProfile& p);

}  // namespace triex
