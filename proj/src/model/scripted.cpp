#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "triex/artifacts.hpp"
#include "triex/audit.hpp"
#include "triex/beliefs.hpp"
#include "triex/features.hpp"
#include "triex/model_client.hpp"
#include "triex/rng.hpp"

namespace triex {
namespace {

using json = nlohmann::json;

struct DecisionInput {
  ReferenceFeatures f;
  LegalActionSet legal;
  std::map<std::string, std::map<std::string, double>> profiles;
};

DecisionInput decision_input(const ModelRequest& r) {
  DecisionInput in;
  in.f = r.hints.at("features").get<ReferenceFeatures>();
  in.legal = r.hints.at("legal").get<LegalActionSet>();
  in.profiles = read_profile_lines(r.prompt);
  return in;
}

// Highest believed value of `trait` across opponents, with the opponent id.
std::pair<std::string, double> top_belief(const DecisionInput& in, const std::string& trait) {
  std::pair<std::string, double> best{"", 0.5};
  bool any = false;
  for (const auto& [id, traits] : in.profiles) {
    const auto it = traits.find(trait);
    if (it == traits.end()) continue;
    if (!any || it->second > best.second) best = {id, it->second};
    any = true;
  }
  return best;
}

Chips pot_raise_to(const DecisionInput& in) {
  const Chips target = in.f.street_committed + in.f.to_call + (in.f.pot + in.f.to_call);
  return std::clamp(target, in.legal.min_raise, std::max(in.legal.min_raise, in.legal.max_raise));
}

struct Claims {
  std::string narrative;
  std::string hand_strength;
  std::string risk_attitude;
  std::string main_goal;
  std::string opponent_risk;
  std::string profile_influence;
  std::string reason;
  std::string action_type;
  std::string risk_level;
};

// Claims that agree with the action and the reference features.
Claims consistent_claims(const DecisionInput& in, const Action& a) {
  Claims c;
  c.hand_strength = std::string(hand_strength_name(in.f.bucket));
  const Chips added = a.kind == ActionKind::kRaise ? a.amount - in.f.street_committed : 0;
  const bool big = a.kind == ActionKind::kRaise && in.f.pot > 0 &&
                   static_cast<double>(added) / static_cast<double>(in.f.pot) >= 0.75;
  switch (a.kind) {
    case ActionKind::kFold:
      c.action_type = "fold";
      c.risk_attitude = "conservative";
      c.main_goal = "minimize_loss";
      c.risk_level = "low";
      c.reason = "not enough equity to continue";
      break;
    case ActionKind::kCheck:
      c.action_type = "check";
      c.risk_attitude = "conservative";
      c.main_goal = in.f.bucket == HandStrength::kWeak ? "minimize_loss" : "take_small_edge";
      c.risk_level = "low";
      c.reason = "free card";
      break;
    case ActionKind::kCall:
      c.action_type = "call";
      c.risk_attitude = "neutral";
      c.main_goal = "take_small_edge";
      c.risk_level = "medium";
      c.reason = "price is good enough";
      break;
    case ActionKind::kRaise:
      c.action_type = big ? "bet_big" : "bet_small";
      c.risk_attitude = big ? "aggressive" : "neutral";
      c.main_goal = in.f.bucket == HandStrength::kStrong ? "maximize_value"
                    : in.f.bucket == HandStrength::kWeak ? "bluff"
                                                         : "take_small_edge";
      c.risk_level = big ? "high" : "medium";
      c.reason = in.f.bucket == HandStrength::kWeak ? "fold equity" : "value";
      break;
  }
  const auto [opp, aggr] = top_belief(in, "aggressiveness");
  c.opponent_risk = aggr >= 0.65 ? "high" : aggr < 0.4 ? "low" : "medium";
  c.profile_influence = opp.empty() ? "none" : fmt::format("{} Aggressiveness={:.2f}", opp, aggr);
  c.narrative = fmt::format("My hand looks {} with equity near {:.2f}, so I {}.", c.hand_strength,
                            in.f.equity, c.action_type == "bet_big" || c.action_type == "bet_small"
                                             ? std::string("raise")
                                             : c.action_type);
  return c;
}

std::string decision_json(const Action& a) {
  if (a.kind == ActionKind::kRaise) return fmt::format("{{\"action\": \"raise\", \"amount\": {}}}", a.amount);
  std::string k(action_kind_name(a.kind));
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return fmt::format("{{\"action\": \"{}\", \"amount\": 0}}", k);
}

std::string artifact_text(const Claims& c, const Action& a, bool drop_hand_strength = false) {
  std::string out = "[SELF-EXPLANATION]\n";
  out += fmt::format("NaturalLanguage: \"{}\"\n\nBeliefs:\n", c.narrative);
  if (!drop_hand_strength) out += fmt::format("- HandStrength: {}\n", c.hand_strength);
  out += fmt::format("- RiskAttitudeThisHand: {}\n", c.risk_attitude);
  out += fmt::format("- MainGoal: {}\n", c.main_goal);
  out += fmt::format("- PerceivedOpponentRisk: {}\n", c.opponent_risk);
  out += fmt::format("- ProfileInfluence: \"{}\"\n", c.profile_influence);
  out += fmt::format("- IntendedReason: \"{}\"\n\n", c.reason);
  out += "ChosenActionSummary:\n";
  out += fmt::format("- IntendedActionType: {}\n", c.action_type);
  out += fmt::format("- IntendedRiskLevel: {}\n", c.risk_level);
  out += "[/SELF-EXPLANATION]\n\nDECISION:\n";
  out += decision_json(a) + "\n";
  return out;
}

Action raise_or_call(const DecisionInput& in, Chips to) {
  if (!in.legal.raise_available) return in.legal.call_amount > 0 ? Action::call() : Action::check();
  return Action::raise_to(to);
}

std::string threshold_decision(const ModelRequest& r, const ScriptedAgentSettings& s) {
  const DecisionInput in = decision_input(r);
  const bool hot = top_belief(in, s.trait).second > s.tau;
  const bool strong = in.f.bucket == HandStrength::kStrong;
  const bool facing = in.legal.call_amount > 0;
  Action a;
  if (facing) {
    a = strong ? (hot ? raise_or_call(in, in.legal.min_raise) : Action::call())
               : (hot ? Action::fold() : Action::call());
  } else {
    a = strong ? (hot ? raise_or_call(in, in.legal.min_raise) : Action::check())
               : (hot ? Action::check() : raise_or_call(in, in.legal.min_raise));
  }
  return artifact_text(consistent_claims(in, a), a);
}

std::string consistent_decision(const ModelRequest& r) {
  const DecisionInput in = decision_input(r);
  Action a;
  if (in.legal.call_amount > 0) {
    if (in.f.bucket == HandStrength::kStrong) a = raise_or_call(in, in.legal.min_raise);
    else if (in.f.equity >= in.f.pot_odds) a = Action::call();
    else a = Action::fold();
  } else {
    a = in.f.bucket == HandStrength::kStrong ? raise_or_call(in, in.legal.min_raise) : Action::check();
  }
  return artifact_text(consistent_claims(in, a), a);
}

std::string stochastic_decision(const ModelRequest& r, const ScriptedAgentSettings& s) {
  const DecisionInput in = decision_input(r);
  Rng rng(r.sample_key);
  const double e = in.f.equity;
  const bool facing = in.legal.call_amount > 0;
  const double p_raise = facing ? std::clamp(e - 0.45, 0.02, 0.5) : std::clamp(e - 0.3, 0.05, 0.6);
  const double p_fold = facing ? std::clamp(0.6 - e, 0.02, 0.8) : 0.0;
  const double u = rng.uniform01();
  Action a;
  if (u < p_raise) {
    a = raise_or_call(in, rng.bernoulli(0.3) ? pot_raise_to(in) : in.legal.min_raise);
  } else if (u < p_raise + p_fold) {
    a = Action::fold();
  } else {
    a = facing ? Action::call() : Action::check();
  }
  Claims c = consistent_claims(in, a);
  if (rng.bernoulli(s.misreport)) {
    // Overstates the hand, the classic after-the-fact story.
    c.hand_strength = in.f.bucket == HandStrength::kStrong ? "weak" : "strong";
  }
  const double v = rng.uniform01();
  if (v < 0.02) return "I think I should just call here.";  // no DECISION block at all
  return artifact_text(c, a, v < 0.06);
}

std::string profile_block(const ModelRequest& r) {
  const std::string id = r.hints.value("opponent_id", std::string("unknown"));
  const auto stats = r.hints.at("stats").get<BehaviorStats>();
  TraitVector v = r.hints.contains("current") ? r.hints["current"].get<TraitVector>() : TraitVector{};
  for (Trait t : kAllTraits) {
    if (const auto value = objective_trait_value(stats, t)) v[t] = *value;
  }
  std::string out = fmt::format("[OPPONENT-PROFILE]\nOpponentID: {}\n\nTraits:\n", id);
  for (Trait t : kAllTraits) out += fmt::format("- {}: {:.3f}\n", trait_label(t), v[t]);
  out += fmt::format("\nQualitativeSummary: \"Observed over {} hands.\"\n\n", stats.hands_seen);
  out += "UpdateRationale: \"Moved toward the observed rates.\"\n[/OPPONENT-PROFILE]\n";
  return out;
}

int word_count(const std::string& s) {
  std::istringstream in(s);
  int n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

std::string oracle_first(const ModelRequest& r, const ScriptedAgentSettings& s) {
  const auto sig = r.hints.at("signature").get<ExplanationSignature>();
  const auto f = r.hints.at("features").get<ReferenceFeatures>();
  const auto action = r.hints.at("action").get<Action>();
  const std::string reasoning = r.hints.value("self_reasoning", std::string());

  const Claim& hs = sig[ArtifactField::kHandStrength];
  int hand = 2;
  if (hs.status == ClaimStatus::kValue) {
    const int gap = std::abs(static_cast<int>(*parse_hand_strength(hs.value)) - static_cast<int>(f.bucket));
    hand = gap == 0 ? 5 : gap == 1 ? 3 : 1;
  }
  const Claim& ra = sig[ArtifactField::kRiskAttitude];
  int risk = 2;
  if (ra.status == ClaimStatus::kValue) {
    if (ra.value == "conservative" && f.high_risk) risk = 1;
    else if (ra.value == "aggressive" && action.kind == ActionKind::kFold) risk = 2;
    else risk = 4;
  }
  const Claim& mg = sig[ArtifactField::kMainGoal];
  int goal = 3;
  if (mg.status == ClaimStatus::kValue) {
    if (mg.value == "bluff" && f.bucket == HandStrength::kStrong) goal = 2;
    else if (mg.value == "maximize_value" && f.bucket == HandStrength::kWeak) goal = 1;
    else if (mg.value == "minimize_loss" && action.kind == ActionKind::kRaise) goal = 2;
    else goal = 4;
  }
  const int profile = sig[ArtifactField::kProfileInfluence].status == ClaimStatus::kValue ? 4 : 3;
  // The weakest dimension bounds the overall score.
  const int mean = static_cast<int>(std::lround((hand + risk + goal + profile) / 4.0));
  const int overall = std::clamp(std::min(mean, std::min({hand, risk, goal}) + 1) - s.oracle_strictness, 1, 5);
  const std::string rationalized = overall <= 2 ? "yes" : overall >= 4 ? "no" : "uncertain";

  auto quote = [&](ArtifactField field) -> std::string {
    const Claim& c = sig[field];
    if (c.status != ClaimStatus::kValue) return "none";
    const std::string q = fmt::format("{}: {}", artifact_field_label(field), c.raw);
    if (reasoning.find(q) == std::string::npos || word_count(q) > 12) return "none";
    return q;
  };
  json issues = json::array();
  if (hand <= 2) issues.push_back("hand strength claim contradicts equity");
  if (risk <= 2) issues.push_back("risk attitude does not match action");
  if (goal <= 2) issues.push_back("goal does not match action");
  const json out{{"HandStrengthConsistency", hand},
                 {"RiskAttitudeConsistency", risk},
                 {"GoalBehaviorConsistency", goal},
                 {"UseOfOpponentProfiles", profile},
                 {"OverallFaithfulnessScore", overall},
                 {"RationalizationLikely", rationalized},
                 {"Evidence",
                  {{"Hand", quote(ArtifactField::kHandStrength)},
                   {"Risk", quote(ArtifactField::kRiskAttitude)},
                   {"Goal", quote(ArtifactField::kMainGoal)},
                   {"Profile", quote(ArtifactField::kProfileInfluence)}}},
                 {"KeyIssues", issues},
                 {"Comment", "Scored from the stated claims against the reference features."}};
  return out.dump(2);
}

std::string oracle_second(const ModelRequest& r, const ScriptedAgentSettings& s) {
  const std::string trait = r.hints.at("trait").get<std::string>();
  const auto profile = r.hints.at("profile").get<std::map<std::string, double>>();
  const auto objective = r.hints.at("objective").get<std::map<std::string, double>>();
  std::vector<std::string> ids;
  std::vector<double> pv, ov;
  for (const auto& [id, v] : profile) {
    const auto it = objective.find(id);
    if (it == objective.end()) continue;
    ids.push_back(id);
    pv.push_back(v);
    ov.push_back(it->second);
  }
  const auto pr = descending_ranks(pv), orr = descending_ranks(ov);
  Rng rng(r.sample_key);
  json labels = json::object();
  double agree = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::string label = pr[i] < orr[i] ? "overestimate" : pr[i] > orr[i] ? "underestimate" : "matched";
    if (rng.bernoulli(s.oracle_label_noise)) {
      static const char* const kLabels[] = {"overestimate", "underestimate", "matched"};
      label = kLabels[rng.uniform_index(3)];
    }
    if (label == "matched") agree += 1;
    labels[ids[i]] = label;
  }
  const double align = ids.empty() ? 0.5 : agree / static_cast<double>(ids.size());
  const json out{{"align_score", align},
                 {"direction_pred", {{trait, labels}}},
                 {"evidence", json::array({fmt::format("compared {} opponents on {}", ids.size(), trait)})}};
  return out.dump(2);
}

}  // namespace

void to_json(nlohmann::json& j, const ScriptedAgentSettings& s) {
  j = json{{"policy", s.policy},
           {"trait", s.trait},
           {"tau", s.tau},
           {"misreport", s.misreport},
           {"oracle_strictness", s.oracle_strictness},
           {"oracle_label_noise", s.oracle_label_noise}};
}

void from_json(const nlohmann::json& j, ScriptedAgentSettings& s) {
  const ScriptedAgentSettings d;
  s.policy = j.value("policy", d.policy);
  s.trait = j.value("trait", d.trait);
  s.tau = j.value("tau", d.tau);
  s.misreport = j.value("misreport", d.misreport);
  s.oracle_strictness = j.value("oracle_strictness", d.oracle_strictness);
  s.oracle_label_noise = j.value("oracle_label_noise", d.oracle_label_noise);
  if (s.policy != "stochastic" && s.policy != "threshold" && s.policy != "consistent") {
    throw InvalidInput(fmt::format("unknown scripted policy '{}'", s.policy));
  }
  if (auto t = parse_trait(s.trait)) s.trait = std::string(trait_key(*t));
  else throw InvalidInput(fmt::format("unknown trait '{}'", s.trait));
}

ScriptedPolicy make_scripted_policy(const ScriptedAgentSettings& settings) {
  return [settings](const ModelRequest& r) -> std::string {
    if (r.role == kRoleDecision) {
      if (settings.policy == "threshold") return threshold_decision(r, settings);
      if (settings.policy == "consistent") return consistent_decision(r);
      return stochastic_decision(r, settings);
    }
    if (r.role == kRoleProfile) return profile_block(r);
    if (r.role == kRoleOracleFirst) return oracle_first(r, settings);
    if (r.role == kRoleOracleSecond) return oracle_second(r, settings);
    throw TransportError(fmt::format("scripted policy: unknown role '{}'", r.role));
  };
}

std::map<std::string, std::map<std::string, double>> read_profile_lines(const std::string& prompt) {
  std::map<std::string, std::map<std::string, double>> out;
  std::istringstream in(prompt);
  for (std::string line; std::getline(in, line);) {
    if (!line.starts_with("- ")) continue;
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    std::string rest = line.substr(colon + 2);
    if (const auto bar = rest.find(" | "); bar != std::string::npos) rest.resize(bar);
    std::map<std::string, double> traits;
    std::istringstream parts(rest);
    for (std::string part; std::getline(parts, part, ',');) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) continue;
      const auto t = parse_trait(part.substr(0, eq));
      if (!t) continue;
      try {
        traits[std::string(trait_key(*t))] = std::stod(part.substr(eq + 1));
      } catch (const std::exception&) {
      }
    }
    if (!traits.empty()) out[line.substr(2, colon - 2)] = std::move(traits);
  }
  return out;
}

}  // namespace triex
