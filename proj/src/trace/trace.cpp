#include "triex/trace.hpp"

#include <numeric>

#include <fmt/format.h>

#include "triex/templates.hpp"

namespace triex {
namespace {

using json = nlohmann::json;

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_get(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

HoleCards hole_from(const std::string& s) {
  const auto cards = parse_cards(s);
  if (cards.size() != 2) throw TraceError("observation needs two hole cards");
  return {cards[0], cards[1]};
}

void write_line(std::ofstream& out, const json& j, const std::string& path) {
  out << j.dump() << '\n';
  if (!out) throw TraceError("write failed: " + path);
}

template <typename F>
void for_each_line(const std::string& path, F&& f) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open " + path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw TraceError(fmt::format("{}:{}: invalid JSON", path, n));
    try {
      f(j, n);
    } catch (const nlohmann::json::exception& e) {
      throw TraceError(fmt::format("{}:{}: {}", path, n, e.what()));
    }
  }
}

}  // namespace

std::map<std::string, std::string> current_template_hashes() {
  std::map<std::string, std::string> out;
  for (TemplateId id : kAllTemplates) out[std::string(template_name(id))] = template_hash(id);
  return out;
}

std::string decision_key(const DecisionTrace& r) {
  return fmt::format("{}/{}/{}/{}", r.battle_id, r.hand_id, r.decision_index, r.player_id);
}

void validate_row(const DecisionTrace& r) {
  if (r.battle_id < 0 || r.hand_id < 0 || r.decision_index < 0) throw TraceError("negative row index");
  if (r.player_id.empty()) throw TraceError("row without player_id");
  if (!r.action) throw TraceError(fmt::format("row {} has no normalized action", decision_key(r)));
  if (r.obs.stacks.empty() || r.obs.seat < 0 || r.obs.seat >= static_cast<int>(r.obs.stacks.size())) {
    throw TraceError(fmt::format("row {} has a bad observation", decision_key(r)));
  }
  if (r.is_llm() && r.model_name.empty()) throw TraceError(fmt::format("row {} lacks model_name", decision_key(r)));
  if (r.artifact && !r.context) throw TraceError(fmt::format("row {} has an artifact but no context", decision_key(r)));
}

void to_json(json& j, const TraceHeader& h) {
  j = json{{"schema_version", h.schema_version},
           {"config_hash", h.config_hash},
           {"template_hashes", h.template_hashes},
           {"seed", h.seed}};
}

void from_json(const json& j, TraceHeader& h) {
  h.schema_version = j.at("schema_version").get<int>();
  h.config_hash = j.at("config_hash").get<std::string>();
  h.template_hashes = j.at("template_hashes").get<std::map<std::string, std::string>>();
  h.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const DecisionTrace& r) {
  json obs{{"seat", r.obs.seat},
           {"button", r.obs.button},
           {"hole", cards_str(r.obs.hole)},
           {"board", cards_str(r.obs.board)},
           {"pot", r.obs.pot},
           {"stacks", r.obs.stacks},
           {"street_committed", r.obs.street_committed},
           {"folded", r.obs.folded}};
  json artifact = nullptr;
  if (r.artifact) {
    artifact = json{{"raw", r.artifact->raw},
                    {"self_reasoning", r.artifact->self_reasoning},
                    {"block_found", r.artifact->block_found},
                    {"block_closed", r.artifact->block_closed},
                    {"signature", r.artifact->signature}};
  }
  j = json{{"battle_id", r.battle_id},
           {"hand_id", r.hand_id},
           {"decision_index", r.decision_index},
           {"street", street_name(r.street)},
           {"player_id", r.player_id},
           {"agent", r.agent},
           {"model_name", r.model_name},
           {"obs", obs},
           {"legal", r.legal},
           {"proposed", opt_json(r.proposed)},
           {"action", opt_json(r.action)},
           {"chips_added", r.chips_added},
           {"features", r.features},
           {"artifact", artifact},
           {"context", opt_json(r.context)},
           {"prompt_hash", r.prompt_hash},
           {"sample_key", r.sample_key},
           {"flags",
            {{"parse_fallback", r.flags.parse_fallback},
             {"model_unavailable", r.flags.model_unavailable},
             {"illegal_proposal", r.flags.illegal_proposal}}},
           {"usage", r.usage}};
}

void from_json(const json& j, DecisionTrace& r) {
  r.battle_id = j.at("battle_id").get<int>();
  r.hand_id = j.at("hand_id").get<int>();
  r.decision_index = j.at("decision_index").get<int>();
  r.street = parse_street(j.at("street").get<std::string>());
  r.player_id = j.at("player_id").get<std::string>();
  r.agent = j.at("agent").get<std::string>();
  r.model_name = j.value("model_name", "");
  const json& o = j.at("obs");
  r.obs.seat = o.at("seat").get<int>();
  r.obs.button = o.at("button").get<int>();
  r.obs.hole = hole_from(o.at("hole").get<std::string>());
  r.obs.board = parse_cards(o.at("board").get<std::string>());
  r.obs.pot = o.at("pot").get<Chips>();
  r.obs.stacks = o.at("stacks").get<std::vector<Chips>>();
  r.obs.street_committed = o.at("street_committed").get<std::vector<Chips>>();
  r.obs.folded = o.at("folded").get<std::vector<bool>>();
  r.legal = j.at("legal").get<LegalActionSet>();
  r.proposed = opt_get<Action>(j, "proposed");
  r.action = opt_get<Action>(j, "action");
  r.chips_added = j.at("chips_added").get<Chips>();
  r.features = j.at("features").get<ReferenceFeatures>();
  r.artifact.reset();
  if (const auto it = j.find("artifact"); it != j.end() && !it->is_null()) {
    TraceArtifact a;
    a.raw = it->at("raw").get<std::string>();
    a.self_reasoning = it->at("self_reasoning").get<std::string>();
    a.block_found = it->at("block_found").get<bool>();
    a.block_closed = it->at("block_closed").get<bool>();
    a.signature = it->at("signature").get<ExplanationSignature>();
    r.artifact = std::move(a);
  }
  r.context = opt_get<DecisionContext>(j, "context");
  r.prompt_hash = j.value("prompt_hash", "");
  r.sample_key = j.value("sample_key", std::uint64_t{0});
  const json& f = j.at("flags");
  r.flags.parse_fallback = f.value("parse_fallback", false);
  r.flags.model_unavailable = f.value("model_unavailable", false);
  r.flags.illegal_proposal = f.value("illegal_proposal", false);
  r.usage = j.value("usage", json::object()).get<Usage>();
}

void to_json(json& j, const HandRecord& h) {
  json updates = json::array();
  for (const auto& u : h.profile_updates) {
    updates.push_back({{"agent", u.agent},
                       {"opponent", u.opponent},
                       {"skipped", u.skipped},
                       {"proposed", u.proposed},
                       {"applied", u.applied},
                       {"out_of_range", u.out_of_range},
                       {"rationale_missing", u.rationale_missing}});
  }
  j = json{{"battle_id", h.battle_id},
           {"hand_id", h.hand_id},
           {"button", h.button},
           {"stacks_before", h.stacks_before},
           {"stacks_after", h.stacks_after},
           {"payouts", h.payouts},
           {"showdown", h.showdown},
           {"board", cards_str(h.board)},
           {"stats", h.stats},
           {"profile_updates", updates}};
}

void from_json(const json& j, HandRecord& h) {
  h.battle_id = j.at("battle_id").get<int>();
  h.hand_id = j.at("hand_id").get<int>();
  h.button = j.at("button").get<int>();
  h.stacks_before = j.at("stacks_before").get<std::vector<Chips>>();
  h.stacks_after = j.at("stacks_after").get<std::vector<Chips>>();
  h.payouts = j.at("payouts").get<std::vector<Chips>>();
  h.showdown = j.at("showdown").get<bool>();
  h.board = parse_cards(j.at("board").get<std::string>());
  h.stats = j.at("stats").get<std::map<std::string, BehaviorStats>>();
  h.profile_updates.clear();
  for (const auto& u : j.at("profile_updates")) {
    ProfileUpdateRecord r;
    r.agent = u.at("agent").get<std::string>();
    r.opponent = u.at("opponent").get<std::string>();
    r.skipped = u.at("skipped").get<bool>();
    r.proposed = u.at("proposed").get<TraitVector>();
    r.applied = u.at("applied").get<TraitVector>();
    r.out_of_range = u.value("out_of_range", false);
    r.rationale_missing = u.value("rationale_missing", false);
    h.profile_updates.push_back(std::move(r));
  }
}

// ---------------------------------------------------------------------------

TraceWriter::TraceWriter(const std::string& path, const TraceHeader& header, int battle_id)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), battle_id_(battle_id) {
  if (!out_) throw TraceError("cannot create " + path);
  write_line(out_, json(header), path_);
}

void TraceWriter::append(const DecisionTrace& row) {
  validate_row(row);
  if (row.battle_id != battle_id_) {
    throw TraceError(fmt::format("row {} does not belong to battle {}", decision_key(row), battle_id_));
  }
  const bool ordered =
      row.hand_id > last_hand_ || (row.hand_id == last_hand_ && row.decision_index > last_decision_);
  if (!ordered) throw TraceError(fmt::format("row {} is out of order", decision_key(row)));
  write_line(out_, json(row), path_);
  last_hand_ = row.hand_id;
  last_decision_ = row.decision_index;
  ++rows_;
}

void TraceWriter::flush() {
  out_.flush();
  if (!out_) throw TraceError("flush failed: " + path_);
}

HandWriter::HandWriter(const std::string& path, const TraceHeader& header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) throw TraceError("cannot create " + path);
  write_line(out_, json(header), path_);
}

void HandWriter::append(const HandRecord& hand) {
  write_line(out_, json(hand), path_);
  out_.flush();
}

TraceFile read_trace(const std::string& path) {
  TraceFile f;
  bool have_header = false;
  for_each_line(path, [&](const json& j, int) {
    if (!have_header) {
      f.header = j.get<TraceHeader>();
      if (f.header.schema_version != kTraceSchemaVersion) {
        throw TraceError(fmt::format("{}: unsupported schema version {}", path, f.header.schema_version));
      }
      have_header = true;
      return;
    }
    f.rows.push_back(j.get<DecisionTrace>());
  });
  if (!have_header) throw TraceError(path + ": missing header");
  return f;
}

HandFile read_hands(const std::string& path) {
  HandFile f;
  bool have_header = false;
  for_each_line(path, [&](const json& j, int) {
    if (!have_header) {
      f.header = j.get<TraceHeader>();
      have_header = true;
      return;
    }
    f.hands.push_back(j.get<HandRecord>());
  });
  if (!have_header) throw TraceError(path + ": missing header");
  return f;
}

SliceResult slice(const std::vector<DecisionTrace>& rows, const SliceFilter& q) {
  SliceResult out;
  out.considered = rows.size();
  for (const auto& r : rows) {
    if (q.llm_only && !r.is_llm()) continue;
    if (q.street && r.street != *q.street) continue;
    if (q.player && r.player_id != *q.player) continue;
    if (q.model && r.model_name != *q.model) continue;
    if (q.bucket && r.features.bucket != *q.bucket) continue;
    if (q.action && (!r.action || r.action->kind != *q.action)) continue;
    if (q.high_risk && r.features.high_risk != *q.high_risk) continue;
    if (q.hand_from && r.hand_id < *q.hand_from) continue;
    if (q.hand_to && r.hand_id >= *q.hand_to) continue;
    out.rows.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t hand_deal_seed(std::uint64_t seed, int battle_id, int hand_id) {
  return derive_seed(seed, {static_cast<std::uint64_t>(battle_id), static_cast<std::uint64_t>(hand_id), kDealStream});
}

int first_button(int battle_id, int n_seats) { return battle_id % n_seats; }

ReplayReport replay_battle(const std::vector<DecisionTrace>& rows, const GameConfig& config, int n_seats,
                           std::uint64_t seed, int battle_id) {
  ReplayReport rep;
  std::vector<Chips> stacks(static_cast<std::size_t>(n_seats), config.initial_stack);
  const Chips total = config.initial_stack * n_seats;
  int button = first_button(battle_id, n_seats);
  const int last_hand = rows.empty() ? -1 : rows.back().hand_id;
  std::size_t i = 0;
  auto mismatch = [&](const std::string& what) { rep.mismatches.push_back(what); };
  for (int hand = 0; hand <= last_hand && rep.ok(); ++hand) {
    Rng deal(hand_deal_seed(seed, battle_id, hand));
    TableState t = start_hand(stacks, button, config.small_blind, config.big_blind, hand, deal);
    for (; i < rows.size() && rows[i].hand_id == hand; ++i) {
      const DecisionTrace& r = rows[i];
      const std::string key = decision_key(r);
      if (r.battle_id != battle_id) mismatch(key + ": wrong battle");
      if (t.finished || t.to_act != r.obs.seat) mismatch(key + ": seat to act differs");
      if (!rep.ok()) break;
      const auto seat = static_cast<std::size_t>(r.obs.seat);
      if (t.street != r.street) mismatch(key + ": street differs");
      if (t.pot != r.obs.pot) mismatch(key + ": pot differs");
      if (t.stacks != r.obs.stacks) mismatch(key + ": stacks differ");
      if (t.board != r.obs.board) mismatch(key + ": board differs");
      if (t.hole[seat] != r.obs.hole) mismatch(key + ": hole cards differ");
      if (legal_actions(t) != r.legal) mismatch(key + ": legal set differs");
      const Chips on_table = std::accumulate(r.obs.stacks.begin(), r.obs.stacks.end(), Chips{0}) + r.obs.pot;
      if (on_table != total) mismatch(key + ": chips not conserved");
      if (!rep.ok()) break;
      try {
        t = step(std::move(t), r.obs.seat, *r.action);
      } catch (const std::exception& e) {
        mismatch(key + ": " + e.what());
        break;
      }
      ++rep.rows_checked;
    }
    if (!rep.ok()) break;
    if (!t.finished) {
      mismatch(fmt::format("hand {}: rows end before the hand does", hand));
      break;
    }
    stacks = t.stacks;
    ++rep.hands;
    if (std::count_if(stacks.begin(), stacks.end(), [](Chips c) { return c > 0; }) < 2) break;
    button = next_button(stacks, button);
  }
  if (rep.ok() && i != rows.size()) mismatch("rows left over after the last playable hand");
  rep.final_stacks = stacks;
  return rep;
}

}  // namespace triex
