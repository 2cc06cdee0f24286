#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "triex/artifacts.hpp"

namespace triex {
namespace {

using json = nlohmann::json;

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string lower_alnum(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(lower(c));
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(c);
  return out;
}

// Case-insensitive search.
std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from = 0) {
  if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool eq = true;
    for (std::size_t k = 0; k < needle.size() && eq; ++k) eq = lower(hay[i + k]) == lower(needle[k]);
    if (eq) return i;
  }
  return std::string_view::npos;
}

// [b, e) with surrounding whitespace removed.
std::pair<std::size_t, std::size_t> trim_span(std::string_view s, std::size_t b, std::size_t e) {
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return {b, e};
}

std::string_view trim(std::string_view s) {
  auto [b, e] = trim_span(s, 0, s.size());
  return s.substr(b, e - b);
}

// Removes one layer of quotes, backticks or braces around a value.
std::string_view unwrap(std::string_view v) {
  v = trim(v);
  if (v.size() >= 2) {
    const char a = v.front(), z = v.back();
    if ((a == '"' && z == '"') || (a == '\'' && z == '\'') || (a == '`' && z == '`') ||
        (a == '{' && z == '}') || (a == '[' && z == ']')) {
      return trim(v.substr(1, v.size() - 2));
    }
  }
  return v;
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

int word_count(std::string_view s) {
  int n = 0;
  bool in = false;
  for (char c : s) {
    if (is_space(c)) in = false;
    else if (!in) in = true, ++n;
  }
  return n;
}

struct FieldSpec {
  ArtifactField field;
  std::string_view key;
  std::string_view label;
  std::vector<std::string_view> allowed;  // empty = free text
};

const std::array<FieldSpec, kArtifactFieldCount>& field_specs() {
  static const std::array<FieldSpec, kArtifactFieldCount> specs = {{
      {ArtifactField::kNarrative, "narrative", "NaturalLanguage", {}},
      {ArtifactField::kHandStrength, "hand_strength", "HandStrength", {"weak", "medium", "strong"}},
      {ArtifactField::kRiskAttitude, "risk_attitude", "RiskAttitudeThisHand",
       {"conservative", "neutral", "aggressive"}},
      {ArtifactField::kMainGoal, "main_goal", "MainGoal",
       {"minimize_loss", "take_small_edge", "maximize_value", "bluff"}},
      {ArtifactField::kPerceivedOpponentRisk, "perceived_opponent_risk", "PerceivedOpponentRisk",
       {"low", "medium", "high"}},
      {ArtifactField::kProfileInfluence, "profile_influence", "ProfileInfluence", {}},
      {ArtifactField::kIntendedReason, "intended_reason", "IntendedReason", {}},
      {ArtifactField::kIntendedActionType, "intended_action_type", "IntendedActionType",
       {"fold", "check", "call", "bet_small", "bet_big"}},
      {ArtifactField::kIntendedRiskLevel, "intended_risk_level", "IntendedRiskLevel",
       {"low", "medium", "high"}},
      {ArtifactField::kDecision, "decision", "DECISION", {}},
  }};
  return specs;
}

// Canonical enum token: lower case, spaces and hyphens as underscores.
std::string enum_token(std::string_view v) {
  std::string out;
  for (char c : v) {
    if (c == ' ' || c == '-') out.push_back('_');
    else out.push_back(lower(c));
  }
  while (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

struct Line {
  std::size_t begin, end;  // absolute offsets, end excludes the newline
};

std::vector<Line> lines_of(std::string_view text, std::size_t b, std::size_t e) {
  std::vector<Line> out;
  std::size_t i = b;
  while (i < e) {
    std::size_t nl = text.find('\n', i);
    if (nl == std::string_view::npos || nl > e) nl = e;
    out.push_back({i, nl});
    i = nl + 1;
  }
  return out;
}

// Splits "- Key: value" into key and the value span. Returns false when the
// line has no colon.
bool split_key_value(std::string_view text, const Line& ln, std::string& key, std::size_t& vb,
                     std::size_t& ve) {
  const std::string_view line = text.substr(ln.begin, ln.end - ln.begin);
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) return false;
  key = lower_alnum(line.substr(0, colon));
  std::tie(vb, ve) = trim_span(text, ln.begin + colon + 1, ln.end);
  return true;
}

std::optional<Action> decode_decision(const json& j, std::string& why) {
  if (!j.is_object() || !j.contains("action") || !j["action"].is_string()) {
    why = "no action string";
    return std::nullopt;
  }
  const std::string act = to_lower(trim(j["action"].get<std::string>()));
  if (act == "fold") return Action::fold();
  if (act == "call") return Action::call();
  if (act == "check") return Action::check();
  if (act != "raise") {
    why = "unknown action";
    return std::nullopt;
  }
  if (!j.contains("amount") || !j["amount"].is_number()) {
    why = "raise without numeric amount";
    return std::nullopt;
  }
  const double amount = j["amount"].get<double>();
  if (!std::isfinite(amount) || amount < 0 || amount > 1e15) {
    why = "raise amount out of range";
    return std::nullopt;
  }
  return Action::raise_to(static_cast<Chips>(std::llround(amount)));
}

std::string decision_value(const Action& a) {
  if (a.kind == ActionKind::kRaise) return fmt::format("raise {}", a.amount);
  return to_lower(action_kind_name(a.kind));
}

json parse_json_or_discard(std::string_view text) {
  return json::parse(text.begin(), text.end(), nullptr, false);
}

// Strict parse, then the single repair pass.
std::optional<json> load_oracle_json(std::string_view raw, bool& repaired) {
  repaired = false;
  json j = parse_json_or_discard(raw);
  if (!j.is_discarded() && j.is_object()) return j;
  std::string stripped;
  for (const Line& ln : lines_of(raw, 0, raw.size())) {
    const auto line = raw.substr(ln.begin, ln.end - ln.begin);
    if (trim(line).starts_with("```")) continue;
    stripped.append(line);
    stripped.push_back('\n');
  }
  const auto first = stripped.find('{');
  const auto last = stripped.rfind('}');
  if (first == std::string::npos || last == std::string::npos || last < first) return std::nullopt;
  j = parse_json_or_discard(std::string_view(stripped).substr(first, last - first + 1));
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  repaired = true;
  return j;
}

}  // namespace

std::string_view claim_status_name(ClaimStatus s) {
  switch (s) {
    case ClaimStatus::kValue: return "value";
    case ClaimStatus::kMissing: return "MISSING";
    case ClaimStatus::kMalformed: return "MALFORMED";
  }
  return "MISSING";
}

std::string_view artifact_field_key(ArtifactField f) {
  return field_specs()[static_cast<std::size_t>(f)].key;
}

std::string_view artifact_field_label(ArtifactField f) {
  return field_specs()[static_cast<std::size_t>(f)].label;
}

int ExplanationSignature::missing_count() const {
  return static_cast<int>(std::count_if(claims.begin(), claims.end(),
                                        [](const Claim& c) { return c.status == ClaimStatus::kMissing; }));
}

int ExplanationSignature::malformed_count() const {
  return static_cast<int>(std::count_if(claims.begin(), claims.end(),
                                        [](const Claim& c) { return c.status == ClaimStatus::kMalformed; }));
}

std::optional<std::pair<std::size_t, std::size_t>> balanced_object(std::string_view text, std::size_t from) {
  const auto start = text.find('{', from);
  if (start == std::string_view::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false, escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return std::make_pair(start, i + 1);
  }
  return std::nullopt;
}

FirstPersonArtifact parse_first_person(std::string_view raw) {
  FirstPersonArtifact a;
  a.raw = std::string(raw);

  static constexpr std::string_view kOpen = "[SELF-EXPLANATION]";
  static constexpr std::string_view kClose = "[/SELF-EXPLANATION]";
  std::size_t body_b = 0, body_e = raw.size(), after_block = 0;
  const auto open = find_ci(raw, kOpen);
  if (open != std::string_view::npos) {
    a.block_found = true;
    body_b = open + kOpen.size();
    const auto close = find_ci(raw, kClose, body_b);
    if (close != std::string_view::npos) {
      a.block_closed = true;
      body_e = close;
      after_block = close + kClose.size();
    } else {
      after_block = body_b;
    }
  }

  // The decision is searched after the block; fields stop where it starts.
  std::size_t marker = std::string_view::npos, marker_value = 0;
  for (std::size_t pos = find_ci(raw, "DECISION", after_block); pos != std::string_view::npos;
       pos = find_ci(raw, "DECISION", pos + 1)) {
    std::size_t k = pos + 8;
    while (k < raw.size() && (raw[k] == ' ' || raw[k] == '\t' || raw[k] == '*')) ++k;
    if (k == raw.size() || raw[k] == ':' || raw[k] == '\n' || raw[k] == '\r' || raw[k] == '{') {
      marker = pos;
      marker_value = k < raw.size() && raw[k] == ':' ? k + 1 : k;
      break;
    }
  }
  if (!a.block_closed && marker != std::string_view::npos) body_e = std::min(body_e, marker);
  {
    const auto [b, e] = trim_span(raw, body_b, body_e);
    a.self_reasoning = std::string(raw.substr(b, e - b));
  }

  const auto& specs = field_specs();
  for (const Line& ln : lines_of(raw, body_b, body_e)) {
    std::string key;
    std::size_t vb = 0, ve = 0;
    if (!split_key_value(raw, ln, key, vb, ve)) continue;
    for (const auto& spec : specs) {
      if (spec.field == ArtifactField::kDecision || lower_alnum(spec.label) != key) continue;
      Claim& c = a.signature[spec.field];
      if (c.status != ClaimStatus::kMissing) break;  // first occurrence wins
      c.raw = std::string(raw.substr(vb, ve - vb));
      c.begin = vb;
      c.end = ve;
      const std::string_view inner = unwrap(c.raw);
      if (spec.allowed.empty()) {
        if (inner.empty()) {
          c.status = ClaimStatus::kMalformed;
        } else {
          c.status = ClaimStatus::kValue;
          c.value = std::string(inner);
        }
      } else {
        const std::string tok = enum_token(inner);
        if (std::find(spec.allowed.begin(), spec.allowed.end(), tok) != spec.allowed.end()) {
          c.status = ClaimStatus::kValue;
          c.value = tok;
        } else {
          c.status = ClaimStatus::kMalformed;
        }
      }
      break;
    }
  }

  Claim& d = a.signature[ArtifactField::kDecision];
  // Returns true when a brace was seen from `from` on.
  auto scan = [&](std::size_t from) {
    bool saw_brace = false;
    while (from < raw.size()) {
      const auto brace = raw.find('{', from);
      if (brace == std::string_view::npos) break;
      saw_brace = true;
      const auto span = balanced_object(raw, brace);
      if (!span) {
        // Unterminated object: keep the tail as the malformed token.
        const auto [b, e] = trim_span(raw, brace, raw.size());
        d = Claim{ClaimStatus::kMalformed, "", std::string(raw.substr(b, e - b)), b, e};
        break;
      }
      const auto text = raw.substr(span->first, span->second - span->first);
      const json j = parse_json_or_discard(text);
      if (!j.is_discarded() && j.is_object() && j.contains("action")) {
        std::string why;
        const auto act = decode_decision(j, why);
        d = Claim{act ? ClaimStatus::kValue : ClaimStatus::kMalformed, act ? decision_value(*act) : "",
                  std::string(text), span->first, span->second};
        a.decision = act;
        break;
      }
      if (d.status == ClaimStatus::kMissing) {
        d = Claim{ClaimStatus::kMalformed, "", std::string(text), span->first, span->second};
      }
      from = span->second;
    }
    return saw_brace;
  };
  if (marker != std::string_view::npos) {
    if (!scan(marker)) {
      // A marker with nothing usable after it.
      const auto [b, e] = trim_span(raw, marker_value, raw.size());
      d = Claim{ClaimStatus::kMalformed, "", std::string(raw.substr(b, e - b)), b, e};
    }
  } else {
    scan(after_block);
    // No marker: accept a decision object anywhere, including inside the block.
    if (d.status != ClaimStatus::kValue && after_block > 0) {
      const Claim kept = d;
      d = Claim{};
      scan(0);
      if (d.status != ClaimStatus::kValue) d = kept;
    }
  }
  return a;
}

std::string canonical_first_person_text(const FirstPersonArtifact& a) {
  const auto& sig = a.signature;
  auto token = [&](ArtifactField f, bool quoted) -> std::string {
    const Claim& c = sig[f];
    if (c.status == ClaimStatus::kMalformed) return c.raw;
    return quoted ? fmt::format("\"{}\"", c.value) : c.value;
  };
  auto line = [&](ArtifactField f, bool quoted, bool bullet) -> std::string {
    if (sig[f].status == ClaimStatus::kMissing) return "";
    return fmt::format("{}{}: {}\n", bullet ? "- " : "", artifact_field_label(f), token(f, quoted));
  };
  std::string out = "[SELF-EXPLANATION]\n";
  out += line(ArtifactField::kNarrative, true, false);
  out += "\nBeliefs:\n";
  out += line(ArtifactField::kHandStrength, false, true);
  out += line(ArtifactField::kRiskAttitude, false, true);
  out += line(ArtifactField::kMainGoal, false, true);
  out += line(ArtifactField::kPerceivedOpponentRisk, false, true);
  out += line(ArtifactField::kProfileInfluence, true, true);
  out += line(ArtifactField::kIntendedReason, true, true);
  out += "\nChosenActionSummary:\n";
  out += line(ArtifactField::kIntendedActionType, false, true);
  out += line(ArtifactField::kIntendedRiskLevel, false, true);
  out += "[/SELF-EXPLANATION]\n";
  const Claim& d = sig[ArtifactField::kDecision];
  if (d.status == ClaimStatus::kValue && a.decision) {
    out += "\nDECISION:\n";
    const Action& act = *a.decision;
    if (act.kind == ActionKind::kRaise) {
      out += fmt::format("{{\"action\": \"raise\", \"amount\": {}}}\n", act.amount);
    } else {
      out += fmt::format("{{\"action\": \"{}\", \"amount\": 0}}\n", to_lower(action_kind_name(act.kind)));
    }
  } else if (d.status == ClaimStatus::kMalformed) {
    out += "\nDECISION:\n" + d.raw + "\n";
  }
  return out;
}

Action fallback_action(const LegalActionSet& legal) {
  return legal.call_amount > 0 ? Action::fold() : Action::check();
}

void to_json(nlohmann::json& j, const ExplanationSignature& s) {
  j = json::object();
  for (const auto& spec : field_specs()) {
    const Claim& c = s[spec.field];
    json e{{"status", claim_status_name(c.status)}};
    if (c.status == ClaimStatus::kValue) e["value"] = c.value;
    if (c.status != ClaimStatus::kMissing) {
      e["raw"] = c.raw;
      e["span"] = {c.begin, c.end};
    }
    j[std::string(spec.key)] = std::move(e);
  }
}

void from_json(const nlohmann::json& j, ExplanationSignature& s) {
  for (const auto& spec : field_specs()) {
    Claim& c = s[spec.field];
    c = Claim{};
    const auto it = j.find(std::string(spec.key));
    if (it == j.end()) continue;
    const std::string st = it->at("status").get<std::string>();
    c.status = st == "value" ? ClaimStatus::kValue : st == "MALFORMED" ? ClaimStatus::kMalformed : ClaimStatus::kMissing;
    c.value = it->value("value", "");
    c.raw = it->value("raw", "");
    if (it->contains("span")) {
      c.begin = it->at("span")[0].get<std::size_t>();
      c.end = it->at("span")[1].get<std::size_t>();
    }
  }
}

// ---------------------------------------------------------------------------

TraitVector ParsedProfile::proposal(const TraitVector& prior) const {
  TraitVector v = prior;
  for (std::size_t k = 0; k < kTraitCount; ++k) {
    if (raw[k]) v.values[k] = *raw[k];
  }
  return v;
}

TraitVector ParsedProfile::clamped(const TraitVector& prior) const {
  TraitVector v = proposal(prior);
  for (double& x : v.values) x = std::clamp(x, 0.0, 1.0);
  return v;
}

std::vector<ParsedProfile> parse_opponent_profile(std::string_view raw) {
  static constexpr std::string_view kOpen = "[OPPONENT-PROFILE]";
  static constexpr std::string_view kClose = "[/OPPONENT-PROFILE]";
  std::vector<ParsedProfile> out;
  std::size_t pos = find_ci(raw, kOpen);
  while (pos != std::string_view::npos) {
    const std::size_t b = pos + kOpen.size();
    const std::size_t next_open = find_ci(raw, kOpen, b);
    std::size_t e = find_ci(raw, kClose, b);
    if (e == std::string_view::npos || (next_open != std::string_view::npos && next_open < e)) {
      e = next_open == std::string_view::npos ? raw.size() : next_open;
    }
    ParsedProfile p;
    for (const Line& ln : lines_of(raw, b, e)) {
      std::string key;
      std::size_t vb = 0, ve = 0;
      if (!split_key_value(raw, ln, key, vb, ve)) continue;
      const std::string_view value = raw.substr(vb, ve - vb);
      if (key == "opponentid") {
        p.opponent_id = std::string(unwrap(value));
      } else if (key == "qualitativesummary") {
        p.summary = std::string(unwrap(value));
        p.summary_missing = p.summary.empty();
      } else if (key == "updaterationale") {
        p.rationale = std::string(unwrap(value));
        p.rationale_missing = p.rationale.empty();
      } else if (auto t = parse_trait(key)) {
        const std::string_view num = unwrap(value);
        double v = 0;
        const auto res = std::from_chars(num.data(), num.data() + num.size(), v);
        if (res.ec != std::errc() || !std::isfinite(v)) continue;
        const auto k = static_cast<std::size_t>(*t);
        if (p.raw[k]) continue;
        p.raw[k] = v;
        p.out_of_range[k] = v < 0.0 || v > 1.0;
      }
    }
    out.push_back(std::move(p));
    pos = next_open;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view direction_label_name(DirectionLabel d) {
  switch (d) {
    case DirectionLabel::kOverestimate: return "overestimate";
    case DirectionLabel::kUnderestimate: return "underestimate";
    case DirectionLabel::kMatched: return "matched";
  }
  return "matched";
}

std::optional<DirectionLabel> parse_direction_label(std::string_view s) {
  const std::string t = to_lower(trim(s));
  if (t == "overestimate") return DirectionLabel::kOverestimate;
  if (t == "underestimate") return DirectionLabel::kUnderestimate;
  if (t == "matched") return DirectionLabel::kMatched;
  return std::nullopt;
}

std::string_view oracle_error_name(OracleErrorKind k) {
  switch (k) {
    case OracleErrorKind::kInvalidJson: return "invalid_json";
    case OracleErrorKind::kSchema: return "schema";
    case OracleErrorKind::kRange: return "range";
  }
  return "invalid_json";
}

OracleParse<OracleReport> parse_oracle_first_person(std::string_view raw, std::string_view audited_text) {
  OracleParse<OracleReport> out;
  OracleReport r;
  const auto j = load_oracle_json(raw, r.repaired);
  if (!j) {
    out.error = OracleError{OracleErrorKind::kInvalidJson, "no JSON object after repair"};
    return out;
  }
  struct ScoreKey {
    const char* key;
    int OracleReport::*field;
  };
  static const ScoreKey scores[] = {
      {"HandStrengthConsistency", &OracleReport::hand_strength_consistency},
      {"RiskAttitudeConsistency", &OracleReport::risk_attitude_consistency},
      {"GoalBehaviorConsistency", &OracleReport::goal_behavior_consistency},
      {"UseOfOpponentProfiles", &OracleReport::use_of_opponent_profiles},
      {"OverallFaithfulnessScore", &OracleReport::overall_faithfulness},
  };
  for (const auto& s : scores) {
    if (!j->contains(s.key) || !(*j)[s.key].is_number()) {
      out.error = OracleError{OracleErrorKind::kSchema, fmt::format("{} missing or not a number", s.key)};
      return out;
    }
    const double v = (*j)[s.key].get<double>();
    if (v != std::floor(v) || v < 1 || v > 5) {
      out.error = OracleError{OracleErrorKind::kRange, fmt::format("{}={} is not an integer in [1, 5]", s.key, v)};
      return out;
    }
    r.*(s.field) = static_cast<int>(v);
  }
  const auto rl = j->find("RationalizationLikely");
  if (rl == j->end() || !rl->is_string()) {
    out.error = OracleError{OracleErrorKind::kSchema, "RationalizationLikely missing"};
    return out;
  }
  r.rationalization_likely = to_lower(trim(rl->get<std::string>()));
  if (r.rationalization_likely != "yes" && r.rationalization_likely != "no" &&
      r.rationalization_likely != "uncertain") {
    out.error = OracleError{OracleErrorKind::kSchema, "RationalizationLikely not yes/no/uncertain"};
    return out;
  }

  const std::string audited = collapse_ws(audited_text);
  const auto ev = j->find("Evidence");
  for (const char* dim : {"Hand", "Risk", "Goal", "Profile"}) {
    std::string quote = "none";
    if (ev != j->end() && ev->is_object() && ev->contains(dim) && (*ev)[dim].is_string()) {
      quote = (*ev)[dim].get<std::string>();
    } else {
      r.flags.push_back(fmt::format("evidence_missing:{}", dim));
    }
    r.evidence[dim] = quote;
    if (to_lower(trim(quote)) == "none") continue;
    if (word_count(quote) > 12) r.flags.push_back(fmt::format("evidence_too_long:{}", dim));
    const std::string needle = collapse_ws(unwrap(quote));
    if (needle.empty() || audited.find(needle) == std::string::npos) {
      r.flags.push_back(fmt::format("evidence_not_verbatim:{}", dim));
    }
  }

  if (const auto ki = j->find("KeyIssues"); ki != j->end() && ki->is_array()) {
    for (const auto& item : *ki) {
      if (!item.is_string()) continue;
      r.key_issues.push_back(item.get<std::string>());
    }
    if (r.key_issues.size() > 3) {
      r.key_issues.resize(3);
      r.flags.push_back("key_issues_truncated");
    }
    for (const auto& issue : r.key_issues) {
      if (issue.find(',') != std::string::npos) {
        r.flags.push_back("key_issue_has_comma");
        break;
      }
    }
  }
  if (const auto c = j->find("Comment"); c != j->end() && c->is_string()) r.comment = c->get<std::string>();
  out.report = std::move(r);
  return out;
}

OracleParse<SecondPersonAuditReport> parse_oracle_second_person(std::string_view raw,
                                                                std::optional<std::string> single_trait) {
  OracleParse<SecondPersonAuditReport> out;
  SecondPersonAuditReport r;
  const auto j = load_oracle_json(raw, r.repaired);
  if (!j) {
    out.error = OracleError{OracleErrorKind::kInvalidJson, "no JSON object after repair"};
    return out;
  }
  const auto as = j->find("align_score");
  if (as == j->end() || !as->is_number()) {
    out.error = OracleError{OracleErrorKind::kSchema, "align_score missing or not a number"};
    return out;
  }
  r.align_score = as->get<double>();
  if (!(r.align_score >= 0.0 && r.align_score <= 1.0)) {
    out.error = OracleError{OracleErrorKind::kRange, fmt::format("align_score={} outside [0,1]", r.align_score)};
    return out;
  }
  auto add = [&](const std::string& trait_raw, const std::string& opp, const json& label) {
    std::string trait = trait_raw;
    if (auto t = parse_trait(trait_raw)) trait = std::string(trait_key(*t));
    else r.flags.push_back(fmt::format("unknown_trait:{}", trait_raw));
    const auto l = label.is_string() ? parse_direction_label(label.get<std::string>()) : std::nullopt;
    if (!l) {
      r.flags.push_back(fmt::format("invalid_label:{}/{}", trait, opp));
      return;
    }
    r.direction_pred[trait][opp] = *l;
  };
  const auto dp = j->find("direction_pred");
  if (dp == j->end() || !dp->is_object()) {
    out.error = OracleError{OracleErrorKind::kSchema, "direction_pred missing or not an object"};
    return out;
  }
  for (const auto& [k, v] : dp->items()) {
    if (v.is_object()) {
      for (const auto& [opp, label] : v.items()) add(k, opp, label);
    } else {
      add(single_trait.value_or("unspecified"), k, v);
    }
  }
  if (const auto ev = j->find("evidence"); ev != j->end() && ev->is_array()) {
    for (const auto& e : *ev) {
      if (e.is_string()) r.evidence.push_back(e.get<std::string>());
    }
  }
  out.report = std::move(r);
  return out;
}

void to_json(nlohmann::json& j, const OracleReport& r) {
  j = json{{"HandStrengthConsistency", r.hand_strength_consistency},
           {"RiskAttitudeConsistency", r.risk_attitude_consistency},
           {"GoalBehaviorConsistency", r.goal_behavior_consistency},
           {"UseOfOpponentProfiles", r.use_of_opponent_profiles},
           {"OverallFaithfulnessScore", r.overall_faithfulness},
           {"RationalizationLikely", r.rationalization_likely},
           {"Evidence", r.evidence},
           {"KeyIssues", r.key_issues},
           {"Comment", r.comment},
           {"flags", r.flags},
           {"repaired", r.repaired}};
}

void from_json(const nlohmann::json& j, OracleReport& r) {
  r.hand_strength_consistency = j.at("HandStrengthConsistency").get<int>();
  r.risk_attitude_consistency = j.at("RiskAttitudeConsistency").get<int>();
  r.goal_behavior_consistency = j.at("GoalBehaviorConsistency").get<int>();
  r.use_of_opponent_profiles = j.at("UseOfOpponentProfiles").get<int>();
  r.overall_faithfulness = j.at("OverallFaithfulnessScore").get<int>();
  r.rationalization_likely = j.at("RationalizationLikely").get<std::string>();
  r.evidence = j.value("Evidence", std::map<std::string, std::string>{});
  r.key_issues = j.value("KeyIssues", std::vector<std::string>{});
  r.comment = j.value("Comment", "");
  r.flags = j.value("flags", std::vector<std::string>{});
  r.repaired = j.value("repaired", false);
}

void to_json(nlohmann::json& j, const SecondPersonAuditReport& r) {
  json dp = json::object();
  for (const auto& [trait, m] : r.direction_pred) {
    for (const auto& [opp, l] : m) dp[trait][opp] = direction_label_name(l);
  }
  j = json{{"align_score", r.align_score},
           {"direction_pred", dp},
           {"evidence", r.evidence},
           {"flags", r.flags},
           {"repaired", r.repaired}};
}

void from_json(const nlohmann::json& j, SecondPersonAuditReport& r) {
  r.align_score = j.at("align_score").get<double>();
  r.direction_pred.clear();
  for (const auto& [trait, m] : j.at("direction_pred").items()) {
    for (const auto& [opp, l] : m.items()) {
      if (auto d = parse_direction_label(l.get<std::string>())) r.direction_pred[trait][opp] = *d;
    }
  }
  r.evidence = j.value("evidence", std::vector<std::string>{});
  r.flags = j.value("flags", std::vector<std::string>{});
  r.repaired = j.value("repaired", false);
}

}  // namespace triex
