#include "triex/table.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include <fmt/format.h>

#include "triex/hand_eval.hpp"

namespace triex {

std::string_view street_name(Street s) {
  switch (s) {
    case Street::kPreflop: return "preflop";
    case Street::kFlop: return "flop";
    case Street::kTurn: return "turn";
    case Street::kRiver: return "river";
  }
  return "preflop";
}

Street parse_street(std::string_view name) {
  if (name == "preflop") return Street::kPreflop;
  if (name == "flop") return Street::kFlop;
  if (name == "turn") return Street::kTurn;
  if (name == "river") return Street::kRiver;
  throw InvalidInput(fmt::format("unknown street '{}'", name));
}

void GameConfig::validate() const {
  if (battles < 1) throw InvalidInput("battles must be positive");
  if (hands_per_battle < 1) throw InvalidInput("hands_per_battle must be positive");
  if (!(small_blind > 0 && small_blind < big_blind && big_blind <= initial_stack)) {
    throw InvalidInput("blinds must satisfy 0 < small_blind < big_blind <= initial_stack");
  }
  if (mc_simulations < 1) throw InvalidInput("mc_simulations must be >= 1");
}

std::string_view action_kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::kFold: return "FOLD";
    case ActionKind::kCall: return "CALL";
    case ActionKind::kCheck: return "CHECK";
    case ActionKind::kRaise: return "RAISE";
  }
  return "FOLD";
}

ActionKind parse_action_kind(std::string_view name) {
  std::string up(name);
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (ActionKind k : {ActionKind::kFold, ActionKind::kCall, ActionKind::kCheck, ActionKind::kRaise}) {
    if (action_kind_name(k) == up) return k;
  }
  throw InvalidInput(fmt::format("unknown action kind '{}'", name));
}

void to_json(nlohmann::json& j, const GameConfig& c) {
  j = nlohmann::json{{"battles", c.battles},
                     {"hands_per_battle", c.hands_per_battle},
                     {"initial_stack", c.initial_stack},
                     {"small_blind", c.small_blind},
                     {"big_blind", c.big_blind},
                     {"rng_seed", c.rng_seed},
                     {"mc_simulations", c.mc_simulations},
                     {"temperature", c.temperature},
                     {"top_p", c.top_p},
                     {"intervention_delta", c.intervention_delta}};
}

void from_json(const nlohmann::json& j, GameConfig& c) {
  const GameConfig d;
  c.battles = j.value("battles", d.battles);
  c.hands_per_battle = j.value("hands_per_battle", d.hands_per_battle);
  c.initial_stack = j.value("initial_stack", d.initial_stack);
  c.small_blind = j.value("small_blind", d.small_blind);
  c.big_blind = j.value("big_blind", d.big_blind);
  c.rng_seed = j.value("rng_seed", d.rng_seed);
  c.mc_simulations = j.value("mc_simulations", d.mc_simulations);
  c.temperature = j.value("temperature", d.temperature);
  c.top_p = j.value("top_p", d.top_p);
  c.intervention_delta = j.value("intervention_delta", d.intervention_delta);
}

void to_json(nlohmann::json& j, const Action& a) {
  j = nlohmann::json{{"kind", action_kind_name(a.kind)}, {"amount", a.amount}};
}

void from_json(const nlohmann::json& j, Action& a) {
  a.kind = parse_action_kind(j.at("kind").get<std::string>());
  a.amount = j.value("amount", Chips{0});
}

void to_json(nlohmann::json& j, const LegalActionSet& l) {
  j = nlohmann::json{{"can_fold", l.can_fold},
                     {"call_amount", l.call_amount},
                     {"min_raise", l.min_raise},
                     {"max_raise", l.max_raise},
                     {"raise_available", l.raise_available}};
}

void from_json(const nlohmann::json& j, LegalActionSet& l) {
  l.can_fold = j.at("can_fold").get<bool>();
  l.call_amount = j.at("call_amount").get<Chips>();
  l.min_raise = j.at("min_raise").get<Chips>();
  l.max_raise = j.at("max_raise").get<Chips>();
  l.raise_available = j.at("raise_available").get<bool>();
}

std::string Action::str() const {
  if (kind == ActionKind::kRaise) return fmt::format("RAISE {}", amount);
  return std::string(action_kind_name(kind));
}

Action normalize_action(const Action& proposed, const LegalActionSet& legal) {
  switch (proposed.kind) {
    case ActionKind::kFold:
      return Action::fold();
    case ActionKind::kCheck:
      return legal.call_amount == 0 ? Action::call() : Action::fold();
    case ActionKind::kCall:
      return Action::call();
    case ActionKind::kRaise:
      if (!legal.raise_available) return Action::call();
      return Action::raise_to(std::clamp(proposed.amount, legal.min_raise, legal.max_raise));
  }
  return Action::fold();
}

bool TableState::in_hand(int seat) const {
  const auto s = static_cast<std::size_t>(seat);
  return !sitting_out[s] && !folded[s];
}

int TableState::active_opponents(int seat) const {
  int n = 0;
  for (int s = 0; s < num_seats(); ++s) {
    if (s != seat && in_hand(s)) ++n;
  }
  return n;
}

namespace {

std::size_t idx(int seat) { return static_cast<std::size_t>(seat); }

bool can_act(const TableState& t, int seat) { return t.in_hand(seat) && !t.all_in[idx(seat)]; }

template <typename Pred>
int next_seat(const TableState& t, int from, Pred pred) {
  const int n = t.num_seats();
  for (int k = 1; k <= n; ++k) {
    const int s = (from + k) % n;
    if (pred(s)) return s;
  }
  return -1;
}

void put_chips(TableState& t, int seat, Chips amount) {
  const auto s = idx(seat);
  amount = std::min(amount, t.stacks[s]);
  t.stacks[s] -= amount;
  t.committed[s] += amount;
  t.street_committed[s] += amount;
  t.pot += amount;
  if (t.stacks[s] == 0) t.all_in[s] = true;
}

Card draw(TableState& t) { return t.deck[t.deck_pos++]; }

void award(TableState& t) {
  std::vector<int> live;
  for (int s = 0; s < t.num_seats(); ++s) {
    if (t.in_hand(s)) live.push_back(s);
  }
  t.payouts.assign(t.stacks.size(), 0);
  if (live.size() == 1) {
    t.pots = {Pot{t.pot, live}};
    t.payouts[idx(live[0])] = t.pot;
  } else {
    t.showdown = true;
    t.pots = build_pots(t.committed, t.folded);
    std::vector<HandRank> ranks(t.stacks.size());
    for (int s : live) {
      std::array<Card, 7> cards{};
      cards[0] = t.hole[idx(s)][0];
      cards[1] = t.hole[idx(s)][1];
      std::copy(t.board.begin(), t.board.end(), cards.begin() + 2);
      ranks[idx(s)] = evaluate_unchecked(cards.data(), 7);
    }
    for (const auto& pot : t.pots) {
      HandRank best{};
      for (int s : pot.eligible) best = std::max(best, ranks[idx(s)]);
      std::vector<int> winners;
      // Odd chips go to winners in seat order starting left of the button.
      for (int k = 1; k <= t.num_seats(); ++k) {
        const int s = (t.button + k) % t.num_seats();
        if (std::find(pot.eligible.begin(), pot.eligible.end(), s) != pot.eligible.end() &&
            ranks[idx(s)] == best) {
          winners.push_back(s);
        }
      }
      const Chips share = pot.amount / static_cast<Chips>(winners.size());
      Chips odd = pot.amount % static_cast<Chips>(winners.size());
      for (int w : winners) {
        t.payouts[idx(w)] += share + (odd > 0 ? 1 : 0);
        if (odd > 0) --odd;
      }
    }
  }
  for (std::size_t s = 0; s < t.stacks.size(); ++s) t.stacks[s] += t.payouts[s];
  t.pot = 0;
  t.finished = true;
  t.to_act = -1;
}

void run_out_and_award(TableState& t) {
  while (t.board.size() < 5) t.board.push_back(draw(t));
  t.street = Street::kRiver;
  award(t);
}

bool round_closed(const TableState& t) {
  for (int s = 0; s < t.num_seats(); ++s) {
    if (!can_act(t, s)) continue;
    if (!t.acted[idx(s)] || t.street_committed[idx(s)] != t.current_bet) return false;
  }
  return true;
}

int live_count(const TableState& t) {
  int n = 0;
  for (int s = 0; s < t.num_seats(); ++s) n += t.in_hand(s) ? 1 : 0;
  return n;
}

int actor_count(const TableState& t) {
  int n = 0;
  for (int s = 0; s < t.num_seats(); ++s) n += can_act(t, s) ? 1 : 0;
  return n;
}

// Betting is over when nobody, or only one player who already matches the
// bet, can still put chips in.
bool betting_exhausted(const TableState& t) {
  const int actors = actor_count(t);
  if (actors == 0) return true;
  if (actors == 1) {
    for (int s = 0; s < t.num_seats(); ++s) {
      if (can_act(t, s)) return t.street_committed[idx(s)] >= t.current_bet;
    }
  }
  return false;
}

void start_street(TableState& t, Street street) {
  t.street = street;
  const std::size_t target = street == Street::kFlop ? 3 : street == Street::kTurn ? 4 : 5;
  while (t.board.size() < target) t.board.push_back(draw(t));
  std::fill(t.street_committed.begin(), t.street_committed.end(), 0);
  std::fill(t.acted.begin(), t.acted.end(), false);
  t.current_bet = 0;
  t.last_raise_size = t.big_blind;
  t.to_act = next_seat(t, t.button, [&](int s) { return can_act(t, s); });
}

// Moves the hand forward after an action (or after the blinds).
void advance(TableState& t, int last_actor) {
  if (live_count(t) == 1) {
    award(t);
    return;
  }
  if (betting_exhausted(t)) {
    run_out_and_award(t);
    return;
  }
  if (round_closed(t)) {
    if (t.street == Street::kRiver) {
      award(t);
      return;
    }
    start_street(t, static_cast<Street>(static_cast<int>(t.street) + 1));
    if (betting_exhausted(t)) run_out_and_award(t);
    return;
  }
  t.to_act = next_seat(t, last_actor, [&](int s) {
    return can_act(t, s) && (!t.acted[idx(s)] || t.street_committed[idx(s)] != t.current_bet);
  });
}

}  // namespace

TableState start_hand(const std::vector<Chips>& stacks, int button, Chips small_blind,
                      Chips big_blind, int hand_id, Rng& deal_rng) {
  const std::size_t n = stacks.size();
  TableState t;
  t.hand_id = hand_id;
  t.button = button;
  t.small_blind = small_blind;
  t.big_blind = big_blind;
  t.stacks = stacks;
  t.committed.assign(n, 0);
  t.street_committed.assign(n, 0);
  t.folded.assign(n, false);
  t.all_in.assign(n, false);
  t.acted.assign(n, false);
  t.sitting_out.assign(n, false);
  t.hole.assign(n, HoleCards{});
  int seated = 0;
  for (std::size_t s = 0; s < n; ++s) {
    t.sitting_out[s] = stacks[s] <= 0;
    seated += t.sitting_out[s] ? 0 : 1;
  }
  if (seated < 2) throw InvalidInput("a hand needs at least two seats with chips");
  if (t.sitting_out[idx(button)]) throw InvalidInput("button seat has no chips");

  t.deck = full_deck();
  for (std::size_t i = t.deck.size() - 1; i > 0; --i) {
    std::swap(t.deck[i], t.deck[deal_rng.uniform_index(i + 1)]);
  }
  auto seated_pred = [&](int s) { return !t.sitting_out[idx(s)]; };
  for (int round = 0; round < 2; ++round) {
    int s = button;
    for (int k = 0; k < seated; ++k) {
      s = next_seat(t, s, seated_pred);
      t.hole[idx(s)][static_cast<std::size_t>(round)] = draw(t);
    }
  }

  int sb_seat = 0;
  int bb_seat = 0;
  if (seated == 2) {
    sb_seat = button;
    bb_seat = next_seat(t, button, seated_pred);
  } else {
    sb_seat = next_seat(t, button, seated_pred);
    bb_seat = next_seat(t, sb_seat, seated_pred);
  }
  put_chips(t, sb_seat, small_blind);
  put_chips(t, bb_seat, big_blind);
  t.current_bet = *std::max_element(t.street_committed.begin(), t.street_committed.end());
  t.last_raise_size = big_blind;
  t.street = Street::kPreflop;

  if (betting_exhausted(t)) {
    run_out_and_award(t);
    return t;
  }
  t.to_act = next_seat(t, bb_seat, [&](int s) { return can_act(t, s); });
  return t;
}

LegalActionSet legal_actions(const TableState& t) {
  LegalActionSet legal;
  if (t.finished || t.to_act < 0) return legal;
  const auto s = idx(t.to_act);
  const Chips owed = std::max<Chips>(0, t.current_bet - t.street_committed[s]);
  legal.can_fold = true;
  legal.call_amount = std::min(owed, t.stacks[s]);
  const Chips all_in_to = t.street_committed[s] + t.stacks[s];
  bool others_can_act = false;
  for (int o = 0; o < t.num_seats(); ++o) {
    if (o != t.to_act && can_act(t, o)) others_can_act = true;
  }
  legal.raise_available = all_in_to > t.current_bet && others_can_act;
  if (legal.raise_available) {
    legal.max_raise = all_in_to;
    legal.min_raise = std::min(t.current_bet + std::max(t.last_raise_size, t.big_blind), all_in_to);
  }
  return legal;
}

TableState step(TableState t, int seat, const Action& action) {
  if (t.finished) throw ProtocolError("hand already finished");
  if (seat != t.to_act) {
    throw ProtocolError(fmt::format("seat {} acted out of turn (seat {} to act)", seat, t.to_act));
  }
  const LegalActionSet legal = legal_actions(t);
  const Chips before = t.committed[idx(seat)];

  switch (action.kind) {
    case ActionKind::kFold:
      t.folded[idx(seat)] = true;
      break;
    case ActionKind::kCheck:
      if (legal.call_amount != 0) throw ProtocolError("CHECK while facing a bet");
      break;
    case ActionKind::kCall:
      put_chips(t, seat, legal.call_amount);
      break;
    case ActionKind::kRaise: {
      if (!legal.raise_available || action.amount < legal.min_raise || action.amount > legal.max_raise) {
        throw ProtocolError(fmt::format("illegal raise to {} (legal [{}, {}])", action.amount,
                                        legal.min_raise, legal.max_raise));
      }
      put_chips(t, seat, action.amount - t.street_committed[idx(seat)]);
      const Chips increment = t.street_committed[idx(seat)] - t.current_bet;
      if (increment >= t.last_raise_size) t.last_raise_size = increment;
      t.current_bet = std::max(t.current_bet, t.street_committed[idx(seat)]);
      std::fill(t.acted.begin(), t.acted.end(), false);
      break;
    }
  }
  t.acted[idx(seat)] = true;
  t.history.push_back({seat, action, t.street, t.committed[idx(seat)] - before, legal.call_amount});
  advance(t, seat);
  return t;
}

std::vector<Pot> build_pots(const std::vector<Chips>& committed, const std::vector<bool>& folded) {
  std::vector<Chips> levels;
  for (Chips c : committed) {
    if (c > 0) levels.push_back(c);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<Pot> pots;
  Chips prev = 0;
  for (Chips level : levels) {
    Pot layer;
    for (std::size_t s = 0; s < committed.size(); ++s) {
      layer.amount += std::min(committed[s], level) - std::min(committed[s], prev);
      if (!folded[s] && committed[s] >= level) layer.eligible.push_back(static_cast<int>(s));
    }
    prev = level;
    if (layer.amount == 0) continue;
    if (layer.eligible.empty() && !pots.empty()) {
      pots.back().amount += layer.amount;
    } else if (!pots.empty() && pots.back().eligible == layer.eligible) {
      pots.back().amount += layer.amount;
    } else {
      pots.push_back(std::move(layer));
    }
  }
  return pots;
}

int next_button(const std::vector<Chips>& stacks, int from) {
  const int n = static_cast<int>(stacks.size());
  for (int k = 1; k <= n; ++k) {
    const int s = (from + k) % n;
    if (stacks[idx(s)] > 0) return s;
  }
  return -1;
}

}  // namespace triex
