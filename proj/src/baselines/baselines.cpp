#include "triex/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace triex {

std::string_view archetype_name(Archetype a) {
  switch (a) {
    case Archetype::kLoosePassive: return "LoosePassive";
    case Archetype::kLooseAggressive: return "LooseAggressive";
    case Archetype::kManiac: return "Maniac";
    case Archetype::kTightPassive: return "TightPassive";
    case Archetype::kTightAggressive: return "TightAggressive";
  }
  return "TightAggressive";
}

std::optional<Archetype> parse_archetype(std::string_view name) {
  for (Archetype a : kAllArchetypes) {
    if (archetype_name(a) == name) return a;
  }
  return std::nullopt;
}

// Reference tables. Tuned by simulation so that realized raise rate, VPIP and
// fold rate order the five players as the ground-truth traits require.
ArchetypeSpec default_archetype_spec(Archetype a) {
  ArchetypeSpec s;
  s.archetype = a;
  s.name = std::string(archetype_name(a));
  switch (a) {
    case Archetype::kLoosePassive:
      s.vpip_target = 0.80, s.pfr_target = 0.00, s.af_target = 0.05;
      s.continue_rel = {0.75, 0.8, 0.8, 0.8};
      s.value_rel = {0.0, 0.0, 0.0, 0.0};
      s.value_min_equity = 0.85;
      s.value_raise_prob = 0.5;
      s.calls_with_pot_odds = true;
      s.raise_pot_fraction = 0.5;
      break;
    case Archetype::kLooseAggressive:
      s.vpip_target = 0.65, s.pfr_target = 0.38, s.af_target = 1.1;
      s.continue_rel = {0.9, 1.0, 1.0, 1.0};
      s.value_rel = {1.6, 1.5, 1.5, 1.5};
      s.value_raise_prob = 0.8;
      s.middle_raise_prob = 0.35;
      s.bluff_raise_prob = 0.15;
      s.raise_pot_fraction = 0.75;
      break;
    case Archetype::kManiac:
      s.vpip_target = 0.95, s.pfr_target = 0.74, s.af_target = 5.5;
      s.continue_rel = {0.6, 0.7, 0.7, 0.7};
      s.value_rel = {1.2, 1.2, 1.2, 1.2};
      s.value_raise_prob = 0.9;
      s.middle_raise_prob = 0.7;
      s.bluff_raise_prob = 0.55;
      s.raise_pot_fraction = 1.0;
      break;
    case Archetype::kTightPassive:
      s.vpip_target = 0.15, s.pfr_target = 0.00, s.af_target = 0.1;
      s.continue_rel = {1.3, 1.3, 1.3, 1.3};
      s.value_rel = {0.0, 0.0, 0.0, 0.0};
      s.value_min_equity = 0.80;
      s.continue_min_equity = 0.25;
      s.value_raise_prob = 0.4;
      s.raise_pot_fraction = 0.5;
      break;
    case Archetype::kTightAggressive:
      s.vpip_target = 0.22, s.pfr_target = 0.09, s.af_target = 0.7;
      s.continue_rel = {1.25, 1.2, 1.2, 1.2};
      s.value_rel = {1.8, 1.6, 1.6, 1.6};
      s.value_raise_prob = 0.7;
      s.middle_raise_prob = 0.15;
      s.bluff_raise_prob = 0.05;
      s.raise_pot_fraction = 0.75;
      break;
  }
  return s;
}

void to_json(nlohmann::json& j, const ArchetypeSpec& s) {
  j = nlohmann::json{{"name", s.name},
                     {"vpip_target", s.vpip_target},
                     {"pfr_target", s.pfr_target},
                     {"af_target", s.af_target},
                     {"continue_rel", s.continue_rel},
                     {"value_rel", s.value_rel},
                     {"value_min_equity", s.value_min_equity},
                     {"continue_min_equity", s.continue_min_equity},
                     {"value_raise_prob", s.value_raise_prob},
                     {"middle_raise_prob", s.middle_raise_prob},
                     {"bluff_raise_prob", s.bluff_raise_prob},
                     {"calls_with_pot_odds", s.calls_with_pot_odds},
                     {"raise_pot_fraction", s.raise_pot_fraction}};
}

// Unspecified keys keep the reference value for the named archetype.
void from_json(const nlohmann::json& j, ArchetypeSpec& s) {
  const auto a = parse_archetype(j.at("name").get<std::string>());
  if (!a) throw InvalidInput("unknown archetype " + j.at("name").dump());
  s = default_archetype_spec(*a);
  s.vpip_target = j.value("vpip_target", s.vpip_target);
  s.pfr_target = j.value("pfr_target", s.pfr_target);
  s.af_target = j.value("af_target", s.af_target);
  s.continue_rel = j.value("continue_rel", s.continue_rel);
  s.value_rel = j.value("value_rel", s.value_rel);
  s.value_min_equity = j.value("value_min_equity", s.value_min_equity);
  s.continue_min_equity = j.value("continue_min_equity", s.continue_min_equity);
  s.value_raise_prob = j.value("value_raise_prob", s.value_raise_prob);
  s.middle_raise_prob = j.value("middle_raise_prob", s.middle_raise_prob);
  s.bluff_raise_prob = j.value("bluff_raise_prob", s.bluff_raise_prob);
  s.calls_with_pot_odds = j.value("calls_with_pot_odds", s.calls_with_pot_odds);
  s.raise_pot_fraction = j.value("raise_pot_fraction", s.raise_pot_fraction);
  for (std::size_t i = 0; i < 4; ++i) {
    if (s.value_rel[i] > 0 && s.value_rel[i] < s.continue_rel[i]) {
      throw InvalidInput(s.name + ": value threshold below continue threshold");
    }
  }
  for (double p : {s.value_raise_prob, s.middle_raise_prob, s.bluff_raise_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput(s.name + ": raise probability outside [0,1]");
  }
}

ActionMix archetype_mix(const ArchetypeSpec& spec, const ReferenceFeatures& f,
                        const LegalActionSet& legal) {
  const auto street = static_cast<std::size_t>(f.street);
  const double rel = f.equity * (f.n_opponents + 1);
  const bool value = rel >= spec.value_rel[street] && f.equity >= spec.value_min_equity;
  const bool middle = rel >= spec.continue_rel[street] && f.equity >= spec.continue_min_equity;

  double raise = value ? spec.value_raise_prob : middle ? spec.middle_raise_prob : spec.bluff_raise_prob;
  ActionMix mix;
  if (legal.call_amount == 0) {
    mix.raise = legal.raise_available ? raise : 0.0;
    mix.call = 1.0 - mix.raise;
    return mix;
  }
  const bool continues = value || middle || (spec.calls_with_pot_odds && f.equity >= f.pot_odds);
  if (!continues) {
    // Only bluff raises survive below the continue line.
    mix.raise = legal.raise_available ? raise : 0.0;
    mix.fold = 1.0 - mix.raise;
    return mix;
  }
  mix.raise = legal.raise_available ? raise : 0.0;
  mix.call = 1.0 - mix.raise;
  return mix;
}

Chips archetype_raise_to(const ArchetypeSpec& spec, const ReferenceFeatures& f,
                         const LegalActionSet& legal) {
  const double pot_after_call = static_cast<double>(f.pot + f.to_call);
  const auto extra = static_cast<Chips>(std::llround(spec.raise_pot_fraction * pot_after_call));
  const Chips target = f.street_committed + f.to_call + extra;
  return std::clamp(target, legal.min_raise, legal.max_raise);
}

Action archetype_decide(const ArchetypeSpec& spec, const ReferenceFeatures& f,
                        const LegalActionSet& legal, Rng& rng) {
  const ActionMix mix = archetype_mix(spec, f, legal);
  const double u = rng.uniform01();
  if (u < mix.raise) return Action::raise_to(archetype_raise_to(spec, f, legal));
  if (u < mix.raise + mix.call) return Action::call();
  return Action::fold();
}

std::vector<std::vector<BehaviorStats>> simulate_archetypes(const std::vector<ArchetypeSpec>& seats,
                                                            const ArchetypeSimConfig& cfg) {
  const int n = static_cast<int>(seats.size());
  if (n < 2) throw InvalidInput("need at least two seats");
  std::vector<BehaviorStats> stats(seats.size());
  std::vector<std::vector<BehaviorStats>> out;
  out.reserve(static_cast<std::size_t>(cfg.hands));
  for (int hand = 0; hand < cfg.hands; ++hand) {
    const auto h = static_cast<std::uint64_t>(hand);
    Rng deal(derive_seed(cfg.seed, {h, kDealStream}));
    Rng eq_rng(derive_seed(cfg.seed, {h, kEquityStream}));
    Rng agent_rng(derive_seed(cfg.seed, {h, kAgentStream}));
    TableState t = start_hand(std::vector<Chips>(seats.size(), cfg.stack), hand % n, cfg.small_blind,
                              cfg.big_blind, hand, deal);
    std::vector<double> equities;
    while (!t.finished) {
      const int seat = t.to_act;
      const auto legal = legal_actions(t);
      const double eq = street_equity(t.hole[static_cast<std::size_t>(seat)], t.board,
                                      t.active_opponents(seat), cfg.mc_simulations, eq_rng);
      const auto f = decision_features(t, legal, eq, cfg.features);
      const Action a = archetype_decide(seats[static_cast<std::size_t>(seat)], f, legal, agent_rng);
      t = step(std::move(t), seat, normalize_action(a, legal));
      equities.push_back(eq);
    }
    const auto obs = observe_hand(t, equities);
    for (std::size_t s = 0; s < seats.size(); ++s) {
      if (obs[s]) stats[s] = update_behavior_stats(stats[s], *obs[s], cfg.features);
    }
    out.push_back(stats);
  }
  return out;
}

}  // namespace triex
