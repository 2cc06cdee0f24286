#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "triex/table.hpp"

namespace triex {

enum class HandStrength : std::uint8_t { kWeak = 0, kMedium = 1, kStrong = 2 };

std::string_view hand_strength_name(HandStrength h);
std::optional<HandStrength> parse_hand_strength(std::string_view text);

struct FeatureConfig {
  // weak < medium_from <= medium < strong_from <= strong
  double medium_from = 0.40;
  double strong_from = 0.65;
  // A raise is high risk when either ratio reaches its threshold.
  double high_risk_raise_over_pot = 0.75;
  double high_risk_raise_over_stack = 0.25;
  // A bet or raise below this equity counts as a bluff attempt.
  double bluff_equity = 0.35;
};

HandStrength bucket_for(double equity, const FeatureConfig& cfg);

// Reference quantities at one decision point. The observation fields (pot,
// to_call, stack, street_committed) are taken before the action.
struct ReferenceFeatures {
  Street street = Street::kPreflop;
  Chips pot = 0;
  Chips to_call = 0;
  Chips stack = 0;
  Chips street_committed = 0;
  int n_opponents = 1;

  double pot_odds = 0.0;
  double spr = 0.0;
  bool spr_infinite = false;  // pot was empty
  double equity = 0.0;
  HandStrength bucket = HandStrength::kWeak;

  // Set once the action is known, and only for RAISE.
  std::optional<double> raise_over_pot;
  std::optional<double> raise_over_stack;
  bool high_risk = false;
};

ReferenceFeatures decision_features(const TableState& table, const LegalActionSet& legal,
                                    double equity, const FeatureConfig& cfg);

// Fills the risk ratios for the executed action. `chips_added` is what the
// action put into the pot.
void attach_action_risk(ReferenceFeatures& f, const Action& executed, Chips chips_added,
                        const FeatureConfig& cfg);

void to_json(nlohmann::json& j, const ReferenceFeatures& f);
void from_json(const nlohmann::json& j, ReferenceFeatures& f);

// One action taken by one player, as seen by the stats tracker.
struct ObservedAction {
  Street street = Street::kPreflop;
  ActionKind kind = ActionKind::kFold;
  Chips to_call = 0;
  Chips chips_added = 0;
  double equity = 1.0;  // actor's equity at the time; drives the bluff proxy
};

// One completed hand from one player's point of view.
struct HandObservation {
  std::vector<ObservedAction> actions;
  bool showdown = false;  // reached showdown without folding
  bool won = false;       // received chips
};

// Builds per-seat observations from a finished hand. `equity` is aligned with
// `final_state.history`. Seats sitting out get std::nullopt.
std::vector<std::optional<HandObservation>> observe_hand(const TableState& final_state,
                                                         const std::vector<double>& equity);

// Raw counters. Rates derive from counter ratios so that the difference of two
// snapshots gives exact windowed rates.
struct BehaviorStats {
  std::int64_t hands_seen = 0;
  std::int64_t vpip_hands = 0;
  std::int64_t pfr_hands = 0;
  std::int64_t showdowns = 0;
  std::int64_t decisions = 0;
  std::int64_t bets_raises = 0;
  std::int64_t calls = 0;  // calls of a positive amount
  std::int64_t faced = 0;  // decisions facing a bet
  std::int64_t faced_folds = 0;
  std::int64_t faced_calls = 0;
  std::int64_t faced_raises = 0;
  std::int64_t bluff_attempts = 0;
  std::int64_t bluff_hands = 0;
  std::int64_t bluff_hands_won = 0;  // won without showdown

  friend bool operator==(const BehaviorStats&, const BehaviorStats&) = default;
};

// Derived view. A rate is empty when its denominator is zero.
struct BehaviorRates {
  std::optional<double> vpip_proxy;
  std::optional<double> pfr;
  double aggression_factor = 0.0;
  bool af_zero_calls = false;  // AF reported as (bets+raises)/1
  std::optional<double> fold_rate;
  std::optional<double> call_rate;
  std::optional<double> raise_rate;
  double call_to_fold_ratio = 0.0;
  bool ctf_zero_folds = false;  // ratio reported as calls/1
  std::optional<double> bluff_attempt_rate;
  std::optional<double> bluff_success_rate;
  std::optional<double> showdown_rate;
};

BehaviorStats update_behavior_stats(BehaviorStats stats, const HandObservation& hand,
                                    const FeatureConfig& cfg);

BehaviorRates behavior_rates(const BehaviorStats& s);

// Counter difference now - prev. Empty when the window holds no hands.
std::optional<BehaviorStats> windowed_delta(const BehaviorStats& now, const BehaviorStats& prev);

void to_json(nlohmann::json& j, const BehaviorStats& s);
void from_json(const nlohmann::json& j, BehaviorStats& s);
void to_json(nlohmann::json& j, const BehaviorRates& r);

}  // namespace triex
