#include <fmt/format.h>

#include "triex/artifacts.hpp"

namespace triex {
namespace {

std::string join_or_none(const std::vector<std::string>& lines) {
  if (lines.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

std::string or_none(const std::string& s) { return s.empty() ? "none" : s; }

std::string board_text(const std::vector<Card>& board) {
  return board.empty() ? "none" : cards_str(board);
}

std::string opt2(const std::optional<double>& v) {
  return v ? fmt::format("{:.2f}", *v) : std::string("n/a");
}

}  // namespace

std::string format_profile_line(const OpponentProfile& p) {
  std::string line = fmt::format("- {}:", p.opponent_id);
  for (std::size_t k = 0; k < kTraitCount; ++k) {
    line += fmt::format("{} {}={:.2f}", k ? "," : "", trait_label(kAllTraits[k]), p.traits.values[k]);
  }
  if (!p.summary.empty()) line += fmt::format(" | Summary: \"{}\"", p.summary);
  return line;
}

std::string render_decision_prompt(const DecisionContext& ctx) {
  std::vector<std::string> profiles;
  for (const auto& p : ctx.profiles) profiles.push_back(format_profile_line(p));
  return render_template(
      TemplateId::kFirstPerson,
      {{"hole_cards", cards_str(ctx.hole)},
       {"community_cards", board_text(ctx.board)},
       {"street", std::string(street_name(ctx.street))},
       {"pot_size", static_cast<long long>(ctx.pot)},
       {"call_amount", static_cast<long long>(ctx.call_amount)},
       {"min_raise", static_cast<long long>(ctx.min_raise)},
       {"max_raise", static_cast<long long>(ctx.max_raise)},
       {"pot_odds", ctx.pot_odds},
       {"position_text", or_none(ctx.position_text)},
       {"opponent_actions_text", join_or_none(ctx.opponent_actions)},
       {"opponent_profiles_text", join_or_none(profiles)}});
}

void to_json(nlohmann::json& j, const DecisionContext& c) {
  j = nlohmann::json{{"player", c.player},
                     {"hole", cards_str(c.hole)},
                     {"board", cards_str(c.board)},
                     {"street", street_name(c.street)},
                     {"pot", c.pot},
                     {"call_amount", c.call_amount},
                     {"min_raise", c.min_raise},
                     {"max_raise", c.max_raise},
                     {"pot_odds", c.pot_odds},
                     {"position_text", c.position_text},
                     {"opponent_actions", c.opponent_actions},
                     {"profiles", c.profiles}};
}

void from_json(const nlohmann::json& j, DecisionContext& c) {
  c.player = j.at("player").get<std::string>();
  const auto hole = parse_cards(j.at("hole").get<std::string>());
  if (hole.size() != 2) throw InvalidInput("context needs two hole cards");
  c.hole = {hole[0], hole[1]};
  c.board = parse_cards(j.at("board").get<std::string>());
  c.street = parse_street(j.at("street").get<std::string>());
  c.pot = j.at("pot").get<Chips>();
  c.call_amount = j.at("call_amount").get<Chips>();
  c.min_raise = j.at("min_raise").get<Chips>();
  c.max_raise = j.at("max_raise").get<Chips>();
  c.pot_odds = j.at("pot_odds").get<double>();
  c.position_text = j.at("position_text").get<std::string>();
  c.opponent_actions = j.at("opponent_actions").get<std::vector<std::string>>();
  c.profiles = j.at("profiles").get<std::vector<OpponentProfile>>();
}

std::string profile_summary_text(const ProfileContext& ctx) {
  const BehaviorRates r = behavior_rates(ctx.stats);
  const auto& s = ctx.stats;
  std::string out = fmt::format("OpponentID: {}\n", ctx.opponent_id);
  out += fmt::format("Hands observed: {} (after hand {})\n", s.hands_seen, ctx.hand_index);
  out += fmt::format("VPIP: {}, PFR: {}, AggressionFactor: {:.2f}{}\n", opt2(r.vpip_proxy), opt2(r.pfr),
                     r.aggression_factor, r.af_zero_calls ? " (no calls yet)" : "");
  out += fmt::format("Facing a bet ({} decisions): FOLD {}, CALL {}, RAISE {}\n", s.faced, opt2(r.fold_rate),
                     opt2(r.call_rate), opt2(r.raise_rate));
  out += fmt::format("Calls: {}, bets/raises: {}, call-to-fold ratio: {:.2f}\n", s.calls, s.bets_raises,
                     r.call_to_fold_ratio);
  out += fmt::format("Showdowns reached: {} of {} hands\n", s.showdowns, s.hands_seen);
  out += fmt::format("Bluff attempt rate: {}, bluff success rate: {}\n", opt2(r.bluff_attempt_rate),
                     opt2(r.bluff_success_rate));
  out += "Current tendencies:";
  for (std::size_t k = 0; k < kTraitCount; ++k) {
    out += fmt::format("{} {}={:.2f}", k ? "," : "", trait_label(kAllTraits[k]), ctx.current.values[k]);
  }
  return out;
}

std::string render_profile_prompt(const ProfileContext& ctx) {
  return render_template(TemplateId::kOpponentProfile, {{"summary_text", profile_summary_text(ctx)}});
}

std::string risk_features_text(const ReferenceFeatures& f) {
  return fmt::format("raise_over_pot: {}\nraise_over_stack: {}\nspr: {}\nhigh_risk: {}",
                     opt2(f.raise_over_pot), opt2(f.raise_over_stack),
                     f.spr_infinite ? std::string("inf") : fmt::format("{:.2f}", f.spr),
                     f.high_risk ? "true" : "false");
}

std::string render_oracle_prompt(const OracleContext& ctx) {
  return render_template(
      TemplateId::kOracleFirstPerson,
      {{"sample.get(\"player\")", ctx.player},
       {"sample.get(\"round\")", static_cast<long long>(ctx.round)},
       {"sample.get(\"street\")", std::string(street_name(ctx.street))},
       {"hole_cards_str", cards_str(ctx.hole)},
       {"board_cards_str", board_text(ctx.board)},
       {"pot_size", static_cast<long long>(ctx.pot)},
       {"call_amount", static_cast<long long>(ctx.call_amount)},
       {"min_raise", static_cast<long long>(ctx.min_raise)},
       {"max_raise", static_cast<long long>(ctx.max_raise)},
       {"position_info_str", or_none(ctx.position_info)},
       {"opp_actions_str", or_none(ctx.opponent_actions)},
       {"hs_str", fmt::format("{:.3f}", ctx.equity)},
       {"hs_bucket", std::string(hand_strength_name(ctx.bucket))},
       {"pot_odds_str", fmt::format("{:.2f}", ctx.pot_odds)},
       {"risk_str", risk_features_text(ctx.features)},
       {"self_reasoning", or_none(ctx.self_reasoning)},
       {"profiles_str", or_none(ctx.profiles)},
       {"action_str", ctx.action}});
}

std::string render_second_person_oracle_prompt(const nlohmann::json& input) {
  return render_template(TemplateId::kOracleSecondPerson, {}) + "\nINPUT:\n" + input.dump(2) + "\n";
}

}  // namespace triex
