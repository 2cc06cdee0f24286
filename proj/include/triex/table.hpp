#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "triex/cards.hpp"
#include "triex/equity.hpp"
#include "triex/rng.hpp"

namespace triex {

using Chips = std::int64_t;

class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

std::string_view street_name(Street s);
Street parse_street(std::string_view name);

// Game and decoding settings shared by every agent in a run.
struct GameConfig {
  int battles = 50;
  int hands_per_battle = 30;
  Chips initial_stack = 3000;
  Chips small_blind = 5;
  Chips big_blind = 10;
  std::uint64_t rng_seed = 7;
  int mc_simulations = 1000;
  double temperature = 0.2;
  double top_p = 1.0;
  double intervention_delta = 2.5;

  // Throws InvalidInput when the invariants do not hold.
  void validate() const;
};

enum class ActionKind : std::uint8_t { kFold, kCall, kCheck, kRaise };

std::string_view action_kind_name(ActionKind k);
ActionKind parse_action_kind(std::string_view name);  // case-insensitive

// `amount` is meaningful only for RAISE and is the total the actor commits on
// the current street after raising ("raise to").
struct Action {
  ActionKind kind = ActionKind::kFold;
  Chips amount = 0;

  static Action fold() { return {ActionKind::kFold, 0}; }
  static Action call() { return {ActionKind::kCall, 0}; }
  static Action check() { return {ActionKind::kCheck, 0}; }
  static Action raise_to(Chips amount) { return {ActionKind::kRaise, amount}; }

  std::string str() const;
  friend bool operator==(const Action&, const Action&) = default;
};

struct LegalActionSet {
  bool can_fold = true;
  Chips call_amount = 0;
  Chips min_raise = 0;
  Chips max_raise = 0;
  bool raise_available = false;

  friend bool operator==(const LegalActionSet&, const LegalActionSet&) = default;
};

void to_json(nlohmann::json& j, const GameConfig& c);
void from_json(const nlohmann::json& j, GameConfig& c);  // missing keys keep defaults
void to_json(nlohmann::json& j, const Action& a);
void from_json(const nlohmann::json& j, Action& a);
void to_json(nlohmann::json& j, const LegalActionSet& l);
void from_json(const nlohmann::json& j, LegalActionSet& l);

// Maps an agent proposal onto an engine-legal action. Total and idempotent.
Action normalize_action(const Action& proposed, const LegalActionSet& legal);

struct ActionRecord {
  int seat = 0;
  Action action;
  Street street = Street::kPreflop;
  Chips chips_added = 0;
  Chips to_call = 0;  // amount the actor faced before acting
};

struct Pot {
  Chips amount = 0;
  std::vector<int> eligible;
};

// Complete state of one hand. Value type: step() returns a new state.
struct TableState {
  int hand_id = 0;
  int button = 0;
  Chips small_blind = 0;
  Chips big_blind = 0;

  Street street = Street::kPreflop;
  std::vector<Card> board;
  Chips pot = 0;
  std::vector<Chips> stacks;
  std::vector<Chips> committed;         // whole hand
  std::vector<Chips> street_committed;  // current street
  Chips current_bet = 0;
  Chips last_raise_size = 0;

  std::vector<bool> folded;
  std::vector<bool> all_in;
  std::vector<bool> sitting_out;
  std::vector<bool> acted;
  std::vector<HoleCards> hole;

  std::vector<Card> deck;
  std::size_t deck_pos = 0;

  int to_act = -1;
  bool finished = false;
  bool showdown = false;
  std::vector<ActionRecord> history;
  std::vector<Chips> payouts;
  std::vector<Pot> pots;

  int num_seats() const { return static_cast<int>(stacks.size()); }
  bool in_hand(int seat) const;
  int active_opponents(int seat) const;
};

// Deals a new hand. Seats with a zero stack sit out. Throws InvalidInput when
// fewer than two seats have chips.
TableState start_hand(const std::vector<Chips>& stacks, int button, Chips small_blind,
                      Chips big_blind, int hand_id, Rng& deal_rng);

LegalActionSet legal_actions(const TableState& state);

// Applies an already normalized action for `seat`. Throws ProtocolError when
// `seat` is not to act or the action is not legal.
TableState step(TableState state, int seat, const Action& action);

// Standard side-pot layering over whole-hand commitments; layers with the same
// contenders are merged.
std::vector<Pot> build_pots(const std::vector<Chips>& committed, const std::vector<bool>& folded);

// Next seat clockwise from `from` holding chips, or -1.
int next_button(const std::vector<Chips>& stacks, int from);

}  // namespace triex
