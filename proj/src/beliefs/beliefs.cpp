#include "triex/beliefs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "triex/cards.hpp"

namespace triex {
namespace {

std::string lower_alnum(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

}  // namespace

std::string_view trait_key(Trait t) {
  switch (t) {
    case Trait::kRiskTolerance: return "risk_tolerance";
    case Trait::kAggressiveness: return "aggressiveness";
    case Trait::kBluffFrequency: return "bluff_frequency";
    case Trait::kCallingStationTendency: return "calling_station_tendency";
    case Trait::kShowdownPropensity: return "showdown_propensity";
  }
  return "risk_tolerance";
}

std::string_view trait_label(Trait t) {
  switch (t) {
    case Trait::kRiskTolerance: return "RiskTolerance";
    case Trait::kAggressiveness: return "Aggressiveness";
    case Trait::kBluffFrequency: return "BluffFrequency";
    case Trait::kCallingStationTendency: return "CallingStationTendency";
    case Trait::kShowdownPropensity: return "ShowdownPropensity";
  }
  return "RiskTolerance";
}

std::optional<Trait> parse_trait(std::string_view text) {
  const std::string key = lower_alnum(text);
  for (Trait t : kAllTraits) {
    if (lower_alnum(trait_key(t)) == key) return t;
  }
  return std::nullopt;
}

OpponentProfile initial_profile(std::string opponent_id) {
  OpponentProfile p;
  p.opponent_id = std::move(opponent_id);
  return p;
}

OpponentProfile apply_bounded_update(OpponentProfile profile, const TraitVector& proposed,
                                     std::string summary, std::string rationale, int hand_index,
                                     bool rationale_missing) {
  ProfileUpdate rec;
  rec.hand_index = hand_index;
  rec.proposed = proposed;
  for (std::size_t k = 0; k < kTraitCount; ++k) {
    double target = proposed.values[k];
    if (!(target >= 0.0 && target <= 1.0)) {
      rec.proposal_out_of_range = true;
      target = std::isnan(target) ? profile.traits.values[k] : std::clamp(target, 0.0, 1.0);
    }
    const double prior = profile.traits.values[k];
    const double step = std::clamp(target - prior, -kMaxTraitStep, kMaxTraitStep);
    profile.traits.values[k] = std::clamp(prior + step, 0.0, 1.0);
  }
  rec.applied = profile.traits;
  profile.summary = std::move(summary);
  profile.rationale = std::move(rationale);
  profile.rationale_missing = rationale_missing;
  profile.updated_at_hand = hand_index;
  profile.history.push_back(rec);
  return profile;
}

std::string_view direction_name(Direction d) { return d == Direction::kUp ? "up" : "down"; }

std::optional<Direction> parse_direction(std::string_view text) {
  const std::string key = lower_alnum(text);
  if (key == "up") return Direction::kUp;
  if (key == "down") return Direction::kDown;
  return std::nullopt;
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

InterventionResult intervene(const TraitVector& traits, const InterventionSpec& spec) {
  if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta)) {
    throw InvalidInput("intervention delta must be finite and non-negative");
  }
  InterventionResult out{traits, false};
  double p = traits[spec.trait];
  if (p < kLogitEpsilon || p > 1.0 - kLogitEpsilon) {
    out.boundary_shifted = true;
    p = std::clamp(p, kLogitEpsilon, 1.0 - kLogitEpsilon);
  }
  const double shift = spec.direction == Direction::kUp ? spec.delta : -spec.delta;
  // Keep the result strictly inside (0,1) even for very large deltas.
  out.traits[spec.trait] = std::clamp(logistic(logit(p) + shift), 1e-15, 1.0 - 1e-15);
  return out;
}

std::vector<double> descending_ranks(const std::vector<double>& values) {
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double greater = 0, equal = 0;
    for (double v : values) {
      if (v > values[i]) greater += 1;
      else if (v == values[i]) equal += 1;
    }
    ranks[i] = 1.0 + greater + (equal - 1.0) / 2.0;
  }
  return ranks;
}

std::vector<double> rank_profiles(const std::vector<OpponentProfile>& profiles, Trait trait) {
  std::vector<double> v;
  v.reserve(profiles.size());
  for (const auto& p : profiles) v.push_back(p.traits[trait]);
  return descending_ranks(v);
}

void to_json(nlohmann::json& j, const TraitVector& v) {
  j = nlohmann::json::object();
  for (Trait t : kAllTraits) j[std::string(trait_key(t))] = v[t];
}

void from_json(const nlohmann::json& j, TraitVector& v) {
  for (Trait t : kAllTraits) v[t] = j.at(std::string(trait_key(t))).get<double>();
}

// Snapshots omit the update history; it is logged once per update instead.
void to_json(nlohmann::json& j, const OpponentProfile& p) {
  j = nlohmann::json{{"opponent_id", p.opponent_id},
                     {"traits", p.traits},
                     {"summary", p.summary},
                     {"rationale", p.rationale},
                     {"rationale_missing", p.rationale_missing},
                     {"updated_at_hand", p.updated_at_hand}};
}

void from_json(const nlohmann::json& j, OpponentProfile& p) {
  p.opponent_id = j.at("opponent_id").get<std::string>();
  p.traits = j.at("traits").get<TraitVector>();
  p.summary = j.value("summary", "");
  p.rationale = j.value("rationale", "");
  p.rationale_missing = j.value("rationale_missing", false);
  p.updated_at_hand = j.value("updated_at_hand", -1);
  p.history.clear();
}

}  // namespace triex
