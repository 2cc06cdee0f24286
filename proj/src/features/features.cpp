#include "triex/features.hpp"

#include <algorithm>

namespace triex {

std::string_view hand_strength_name(HandStrength h) {
  switch (h) {
    case HandStrength::kWeak: return "weak";
    case HandStrength::kMedium: return "medium";
    case HandStrength::kStrong: return "strong";
  }
  return "weak";
}

std::optional<HandStrength> parse_hand_strength(std::string_view text) {
  if (text == "weak") return HandStrength::kWeak;
  if (text == "medium") return HandStrength::kMedium;
  if (text == "strong") return HandStrength::kStrong;
  return std::nullopt;
}

HandStrength bucket_for(double equity, const FeatureConfig& cfg) {
  if (equity >= cfg.strong_from) return HandStrength::kStrong;
  if (equity >= cfg.medium_from) return HandStrength::kMedium;
  return HandStrength::kWeak;
}

ReferenceFeatures decision_features(const TableState& table, const LegalActionSet& legal,
                                    double equity, const FeatureConfig& cfg) {
  if (table.to_act < 0) throw InvalidInput("no seat to act");
  const auto seat = static_cast<std::size_t>(table.to_act);
  ReferenceFeatures f;
  f.street = table.street;
  f.pot = table.pot;
  f.to_call = legal.call_amount;
  f.stack = table.stacks[seat];
  f.street_committed = table.street_committed[seat];
  f.n_opponents = table.active_opponents(table.to_act);
  f.pot_odds = f.to_call == 0 ? 0.0
                              : static_cast<double>(f.to_call) / static_cast<double>(f.pot + f.to_call);
  if (f.pot == 0) {
    f.spr_infinite = true;
    f.spr = 0.0;
  } else {
    f.spr = static_cast<double>(f.stack) / static_cast<double>(f.pot);
  }
  f.equity = equity;
  f.bucket = bucket_for(equity, cfg);
  return f;
}

void attach_action_risk(ReferenceFeatures& f, const Action& executed, Chips chips_added,
                        const FeatureConfig& cfg) {
  f.raise_over_pot.reset();
  f.raise_over_stack.reset();
  f.high_risk = false;
  if (executed.kind != ActionKind::kRaise) return;
  const double added = static_cast<double>(chips_added);
  f.raise_over_pot = f.pot > 0 ? added / static_cast<double>(f.pot) : 0.0;
  f.raise_over_stack = f.stack > 0 ? added / static_cast<double>(f.stack) : 0.0;
  f.high_risk = *f.raise_over_pot >= cfg.high_risk_raise_over_pot ||
                *f.raise_over_stack >= cfg.high_risk_raise_over_stack;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> get_opt(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den <= 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void to_json(nlohmann::json& j, const ReferenceFeatures& f) {
  j = nlohmann::json{{"street", street_name(f.street)},
                     {"pot", f.pot},
                     {"to_call", f.to_call},
                     {"stack", f.stack},
                     {"street_committed", f.street_committed},
                     {"n_opponents", f.n_opponents},
                     {"pot_odds", f.pot_odds},
                     {"spr", f.spr_infinite ? nlohmann::json(nullptr) : nlohmann::json(f.spr)},
                     {"spr_infinite", f.spr_infinite},
                     {"equity", f.equity},
                     {"bucket", hand_strength_name(f.bucket)},
                     {"raise_over_pot", opt(f.raise_over_pot)},
                     {"raise_over_stack", opt(f.raise_over_stack)},
                     {"high_risk", f.high_risk}};
}

void from_json(const nlohmann::json& j, ReferenceFeatures& f) {
  f.street = parse_street(j.at("street").get<std::string>());
  f.pot = j.at("pot").get<Chips>();
  f.to_call = j.at("to_call").get<Chips>();
  f.stack = j.at("stack").get<Chips>();
  f.street_committed = j.value("street_committed", Chips{0});
  f.n_opponents = j.at("n_opponents").get<int>();
  f.pot_odds = j.at("pot_odds").get<double>();
  f.spr_infinite = j.value("spr_infinite", false);
  f.spr = f.spr_infinite ? 0.0 : j.at("spr").get<double>();
  f.equity = j.at("equity").get<double>();
  const auto b = parse_hand_strength(j.at("bucket").get<std::string>());
  if (!b) throw InvalidInput("bad bucket in features");
  f.bucket = *b;
  f.raise_over_pot = get_opt(j, "raise_over_pot");
  f.raise_over_stack = get_opt(j, "raise_over_stack");
  f.high_risk = j.at("high_risk").get<bool>();
}

std::vector<std::optional<HandObservation>> observe_hand(const TableState& t,
                                                         const std::vector<double>& equity) {
  if (!t.finished) throw InvalidInput("hand not finished");
  if (equity.size() != t.history.size()) throw InvalidInput("equity list does not match history");
  std::vector<std::optional<HandObservation>> out(t.stacks.size());
  for (std::size_t s = 0; s < t.stacks.size(); ++s) {
    if (t.sitting_out[s]) continue;
    HandObservation obs;
    obs.showdown = t.showdown && !t.folded[s];
    obs.won = t.payouts[s] > 0;
    out[s] = std::move(obs);
  }
  for (std::size_t i = 0; i < t.history.size(); ++i) {
    const auto& r = t.history[i];
    auto& obs = out[static_cast<std::size_t>(r.seat)];
    if (!obs) continue;
    obs->actions.push_back({r.street, r.action.kind, r.to_call, r.chips_added, equity[i]});
  }
  return out;
}

BehaviorStats update_behavior_stats(BehaviorStats s, const HandObservation& hand,
                                    const FeatureConfig& cfg) {
  ++s.hands_seen;
  bool vpip = false, pfr = false, bluffed = false;
  for (const auto& a : hand.actions) {
    ++s.decisions;
    const bool facing = a.to_call > 0;
    if (a.chips_added > 0) vpip = true;
    switch (a.kind) {
      case ActionKind::kRaise:
        ++s.bets_raises;
        if (a.street == Street::kPreflop) pfr = true;
        if (a.equity < cfg.bluff_equity) {
          ++s.bluff_attempts;
          bluffed = true;
        }
        if (facing) ++s.faced_raises;
        break;
      case ActionKind::kCall:
        if (facing) {
          ++s.calls;
          ++s.faced_calls;
        }
        break;
      case ActionKind::kFold:
        if (facing) ++s.faced_folds;
        break;
      case ActionKind::kCheck:
        break;
    }
    if (facing) ++s.faced;
  }
  if (vpip) ++s.vpip_hands;
  if (pfr) ++s.pfr_hands;
  if (hand.showdown) ++s.showdowns;
  if (bluffed) {
    ++s.bluff_hands;
    if (hand.won && !hand.showdown) ++s.bluff_hands_won;
  }
  return s;
}

BehaviorRates behavior_rates(const BehaviorStats& s) {
  BehaviorRates r;
  r.vpip_proxy = ratio(s.vpip_hands, s.hands_seen);
  r.pfr = ratio(s.pfr_hands, s.hands_seen);
  r.af_zero_calls = s.calls == 0;
  r.aggression_factor = static_cast<double>(s.bets_raises) / static_cast<double>(std::max<std::int64_t>(s.calls, 1));
  r.fold_rate = ratio(s.faced_folds, s.faced);
  r.call_rate = ratio(s.faced_calls, s.faced);
  r.raise_rate = ratio(s.faced_raises, s.faced);
  r.ctf_zero_folds = s.faced_folds == 0;
  r.call_to_fold_ratio =
      static_cast<double>(s.faced_calls) / static_cast<double>(std::max<std::int64_t>(s.faced_folds, 1));
  r.bluff_attempt_rate = ratio(s.bluff_attempts, s.bets_raises);
  r.bluff_success_rate = ratio(s.bluff_hands_won, s.bluff_hands);
  r.showdown_rate = ratio(s.showdowns, s.hands_seen);
  return r;
}

std::optional<BehaviorStats> windowed_delta(const BehaviorStats& now, const BehaviorStats& prev) {
  BehaviorStats d;
  d.hands_seen = now.hands_seen - prev.hands_seen;
  if (d.hands_seen <= 0) return std::nullopt;
  d.vpip_hands = now.vpip_hands - prev.vpip_hands;
  d.pfr_hands = now.pfr_hands - prev.pfr_hands;
  d.showdowns = now.showdowns - prev.showdowns;
  d.decisions = now.decisions - prev.decisions;
  d.bets_raises = now.bets_raises - prev.bets_raises;
  d.calls = now.calls - prev.calls;
  d.faced = now.faced - prev.faced;
  d.faced_folds = now.faced_folds - prev.faced_folds;
  d.faced_calls = now.faced_calls - prev.faced_calls;
  d.faced_raises = now.faced_raises - prev.faced_raises;
  d.bluff_attempts = now.bluff_attempts - prev.bluff_attempts;
  d.bluff_hands = now.bluff_hands - prev.bluff_hands;
  d.bluff_hands_won = now.bluff_hands_won - prev.bluff_hands_won;
  return d;
}

#define TRIEX_STATS_FIELDS(X)                                                                   \
  X(hands_seen) X(vpip_hands) X(pfr_hands) X(showdowns) X(decisions) X(bets_raises) X(calls)  \
  X(faced) X(faced_folds) X(faced_calls) X(faced_raises) X(bluff_attempts) X(bluff_hands)     \
  X(bluff_hands_won)

void to_json(nlohmann::json& j, const BehaviorStats& s) {
  j = nlohmann::json::object();
#define X(name) j[#name] = s.name;
  TRIEX_STATS_FIELDS(X)
#undef X
}

void from_json(const nlohmann::json& j, BehaviorStats& s) {
#define X(name) s.name = j.at(#name).get<std::int64_t>();
  TRIEX_STATS_FIELDS(X)
#undef X
}

void to_json(nlohmann::json& j, const BehaviorRates& r) {
  j = nlohmann::json{{"vpip_proxy", opt(r.vpip_proxy)},
                     {"pfr", opt(r.pfr)},
                     {"aggression_factor", r.aggression_factor},
                     {"af_zero_calls", r.af_zero_calls},
                     {"fold_rate", opt(r.fold_rate)},
                     {"call_rate", opt(r.call_rate)},
                     {"raise_rate", opt(r.raise_rate)},
                     {"call_to_fold_ratio", r.call_to_fold_ratio},
                     {"ctf_zero_folds", r.ctf_zero_folds},
                     {"bluff_attempt_rate", opt(r.bluff_attempt_rate)},
                     {"bluff_success_rate", opt(r.bluff_success_rate)},
                     {"showdown_rate", opt(r.showdown_rate)}};
}

}  // namespace triex
