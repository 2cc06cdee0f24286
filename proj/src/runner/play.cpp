#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "triex/artifacts.hpp"
#include "triex/hash.hpp"
#include "triex/rng.hpp"
#include "triex/runner.hpp"

namespace triex {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr std::uint64_t kProfileRequestTag = 1;

std::string position_text(const TableState& t, int seat) {
  const int n = t.num_seats();
  const int offset = (seat - t.button + n) % n;
  std::string role = offset == 0 ? "button" : offset == 1 ? "small blind" : offset == 2 ? "big blind" : "middle";
  if (n == 2) role = offset == 0 ? "button / small blind" : "big blind";
  int in_hand = 0;
  for (int s = 0; s < n; ++s) in_hand += t.in_hand(s);
  return fmt::format("Seat {} ({}), {} players still in the hand", seat, role, in_hand);
}

std::vector<std::string> action_lines(const TableState& t, const std::vector<SeatSpec>& seats) {
  std::vector<std::string> out;
  for (const auto& h : t.history) {
    out.push_back(fmt::format("{} {}: {}", seats[static_cast<std::size_t>(h.seat)].id, street_name(h.street),
                              h.action.str()));
  }
  return out;
}

struct SeatState {
  std::optional<ArchetypeSpec> archetype;
  std::vector<OpponentProfile> beliefs;  // LLM seats: one per opponent, seat order
};

Action llm_decision(const RunManifest& m, ClientPool& clients, const SeatSpec& seat, const SeatState& state,
                    const TableState& t, const LegalActionSet& legal, const ReferenceFeatures& f, DecisionTrace& r) {
  DecisionContext ctx;
  ctx.player = seat.id;
  ctx.hole = t.hole[static_cast<std::size_t>(r.obs.seat)];
  ctx.board = t.board;
  ctx.street = t.street;
  ctx.pot = t.pot;
  ctx.call_amount = legal.call_amount;
  ctx.min_raise = legal.min_raise;
  ctx.max_raise = legal.max_raise;
  ctx.pot_odds = f.pot_odds;
  ctx.position_text = position_text(t, r.obs.seat);
  ctx.opponent_actions = action_lines(t, m.seats);
  for (OpponentProfile p : state.beliefs) {
    p.history.clear();  // the prompt shows only the current values
    ctx.profiles.push_back(std::move(p));
  }
  ModelRequest req;
  req.role = kRoleDecision;
  req.prompt = render_decision_prompt(ctx);
  req.sample_key = r.sample_key;
  req.hints = json{{"features", f}, {"legal", legal}};
  r.context = ctx;
  r.prompt_hash = sha256_hex(req.prompt);
  try {
    const Completion c = clients.get(seat.model).complete(req);
    r.usage = c.usage;
    const FirstPersonArtifact parsed = parse_first_person(c.text);
    TraceArtifact art;
    art.raw = parsed.raw;
    art.self_reasoning = parsed.self_reasoning;
    art.block_found = parsed.block_found;
    art.block_closed = parsed.block_closed;
    art.signature = parsed.signature;
    r.artifact = art;
    if (parsed.decision) {
      r.proposed = *parsed.decision;
      return *parsed.decision;
    }
    r.flags.parse_fallback = true;
  } catch (const TransportError&) {
    r.flags.model_unavailable = true;
  }
  return fallback_action(legal);
}

ProfileUpdateRecord profile_update(const RunManifest& m, ClientPool& clients, const SeatSpec& seat, int seat_index,
                                   OpponentProfile& profile, int opp_index, const BehaviorStats& stats, int battle,
                                   int hand) {
  ProfileUpdateRecord u;
  u.agent = seat.id;
  u.opponent = profile.opponent_id;
  u.proposed = profile.traits;
  u.applied = profile.traits;
  ProfileContext pc;
  pc.opponent_id = profile.opponent_id;
  pc.stats = stats;
  pc.current = profile.traits;
  pc.hand_index = hand;
  ModelRequest req;
  req.role = kRoleProfile;
  req.prompt = render_profile_prompt(pc);
  req.sample_key = derive_seed(m.game.rng_seed, {static_cast<std::uint64_t>(battle), static_cast<std::uint64_t>(hand),
                                                 kSampleStream, static_cast<std::uint64_t>(seat_index),
                                                 static_cast<std::uint64_t>(opp_index), kProfileRequestTag});
  req.hints = json{{"opponent_id", profile.opponent_id}, {"stats", stats}, {"current", profile.traits}};
  std::vector<ParsedProfile> blocks;
  try {
    blocks = parse_opponent_profile(clients.get(seat.model).complete(req).text);
  } catch (const TransportError&) {
    u.skipped = true;
    return u;
  }
  const auto it = std::find_if(blocks.begin(), blocks.end(),
                               [&](const ParsedProfile& p) { return p.opponent_id == profile.opponent_id; });
  if (it == blocks.end()) {
    u.skipped = true;
    return u;
  }
  u.proposed = it->proposal(profile.traits);
  u.out_of_range = std::any_of(it->out_of_range.begin(), it->out_of_range.end(), [](bool b) { return b; });
  u.rationale_missing = it->rationale_missing;
  profile = apply_bounded_update(std::move(profile), u.proposed, it->summary, it->rationale, hand, it->rationale_missing);
  u.applied = profile.traits;
  return u;
}

}  // namespace

void to_json(json& j, const BattleResult& r) {
  j = json{{"battle_id", r.battle_id}, {"hands", r.hands}, {"rows", r.rows}, {"aborted", r.aborted}, {"error", r.error}};
}

void from_json(const json& j, BattleResult& r) {
  r.battle_id = j.at("battle_id").get<int>();
  r.hands = j.at("hands").get<int>();
  r.rows = j.at("rows").get<std::size_t>();
  r.aborted = j.at("aborted").get<bool>();
  r.error = j.at("error").get<std::string>();
}

BattleResult play_battle(const RunManifest& m, int battle_id, ClientPool& clients, const std::string& run) {
  fs::create_directories(fs::path(run) / "traces");
  TraceHeader header;
  header.config_hash = manifest_hash(m);
  header.template_hashes = current_template_hashes();
  header.seed = m.game.rng_seed;
  TraceWriter traces(layout::trace_path(run, battle_id), header, battle_id);
  HandWriter hands(layout::hands_path(run, battle_id), header);

  const int n = static_cast<int>(m.seats.size());
  const auto seed = m.game.rng_seed;
  const auto b = static_cast<std::uint64_t>(battle_id);
  std::vector<SeatState> seats(m.seats.size());
  std::map<std::string, BehaviorStats> stats;
  for (int s = 0; s < n; ++s) {
    const auto& spec = m.seats[static_cast<std::size_t>(s)];
    stats[spec.id] = BehaviorStats{};
    if (!spec.is_llm()) {
      seats[static_cast<std::size_t>(s)].archetype = default_archetype_spec(*parse_archetype(spec.agent));
      continue;
    }
    for (const auto& other : m.seats) {
      if (other.id != spec.id) seats[static_cast<std::size_t>(s)].beliefs.push_back(initial_profile(other.id));
    }
  }

  BattleResult result;
  result.battle_id = battle_id;
  std::vector<Chips> stacks(m.seats.size(), m.game.initial_stack);
  int button = first_button(battle_id, n);
  try {
    for (int hand = 0; hand < m.game.hands_per_battle; ++hand) {
      if (std::count_if(stacks.begin(), stacks.end(), [](Chips c) { return c > 0; }) < 2) break;
      const auto h = static_cast<std::uint64_t>(hand);
      Rng deal(hand_deal_seed(seed, battle_id, hand));
      Rng eq_rng(derive_seed(seed, {b, h, kEquityStream}));
      Rng agent_rng(derive_seed(seed, {b, h, kAgentStream}));
      HandRecord record;
      record.battle_id = battle_id;
      record.hand_id = hand;
      record.button = button;
      record.stacks_before = stacks;
      TableState t = start_hand(stacks, button, m.game.small_blind, m.game.big_blind, hand, deal);
      std::vector<double> equities;
      int index = 0;
      while (!t.finished) {
        const int seat = t.to_act;
        const auto& spec = m.seats[static_cast<std::size_t>(seat)];
        const LegalActionSet legal = legal_actions(t);
        const double eq = street_equity(t.hole[static_cast<std::size_t>(seat)], t.board, t.active_opponents(seat),
                                        m.game.mc_simulations, eq_rng);
        ReferenceFeatures f = decision_features(t, legal, eq, m.features);

        DecisionTrace r;
        r.battle_id = battle_id;
        r.hand_id = hand;
        r.decision_index = index;
        r.street = t.street;
        r.player_id = spec.id;
        r.agent = spec.agent;
        r.model_name = spec.is_llm() ? spec.model : "";
        r.obs.seat = seat;
        r.obs.button = t.button;
        r.obs.hole = t.hole[static_cast<std::size_t>(seat)];
        r.obs.board = t.board;
        r.obs.pot = t.pot;
        r.obs.stacks = t.stacks;
        r.obs.street_committed = t.street_committed;
        r.obs.folded = t.folded;
        r.legal = legal;

        Action proposal;
        if (spec.is_llm()) {
          r.sample_key = derive_seed(seed, {b, h, kSampleStream, static_cast<std::uint64_t>(index)});
          proposal = llm_decision(m, clients, spec, seats[static_cast<std::size_t>(seat)], t, legal, f, r);
        } else {
          proposal = archetype_decide(*seats[static_cast<std::size_t>(seat)].archetype, f, legal, agent_rng);
          r.proposed = proposal;
        }
        const Action executed = normalize_action(proposal, legal);
        r.flags.illegal_proposal = r.proposed && !(*r.proposed == executed);
        t = step(std::move(t), seat, executed);
        r.chips_added = t.history.back().chips_added;
        attach_action_risk(f, executed, r.chips_added, m.features);
        r.features = f;
        r.action = executed;
        traces.append(r);
        equities.push_back(eq);
        ++index;
      }
      const auto observed = observe_hand(t, equities);
      for (int s = 0; s < n; ++s) {
        const auto& o = observed[static_cast<std::size_t>(s)];
        auto& st = stats[m.seats[static_cast<std::size_t>(s)].id];
        if (o) st = update_behavior_stats(st, *o, m.features);
      }
      stacks = t.stacks;
      record.stacks_after = stacks;
      record.payouts = t.payouts;
      record.showdown = t.showdown;
      record.board = t.board;
      for (int s = 0; s < n; ++s) {
        const auto& spec = m.seats[static_cast<std::size_t>(s)];
        if (!spec.is_llm()) continue;
        auto& beliefs = seats[static_cast<std::size_t>(s)].beliefs;
        for (std::size_t o = 0; o < beliefs.size(); ++o) {
          record.profile_updates.push_back(profile_update(m, clients, spec, s, beliefs[o], static_cast<int>(o),
                                                          stats.at(beliefs[o].opponent_id), battle_id, hand));
        }
      }
      record.stats = stats;
      hands.append(record);
      traces.flush();
      ++result.hands;
      button = next_button(stacks, button);
    }
  } catch (const std::exception& e) {
    result.aborted = true;
    result.error = e.what();
  }
  traces.flush();
  result.rows = traces.rows();
  return result;
}

std::vector<BattleResult> run_battles(const RunManifest& m, ClientPool& clients, const std::string& run) {
  m.validate();
  fs::create_directories(run);
  {
    std::ofstream out(fs::path(run) / "manifest.json", std::ios::trunc);
    out << json(m).dump(2) << "\n";
  }
  std::vector<BattleResult> results(static_cast<std::size_t>(m.game.battles));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int b = next++; b < m.game.battles; b = next++) {
      results[static_cast<std::size_t>(b)] = play_battle(m, b, clients, run);
    }
  };
  const int n_workers = std::min(m.workers, m.game.battles);
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::ofstream out(fs::path(run) / "battles.json", std::ios::trunc);
  out << json(results).dump(2) << "\n";
  return results;
}

RunData load_run(const RunManifest& m, const std::string& run) {
  RunData data;
  const auto battles_file = fs::path(run) / "battles.json";
  std::ifstream in(battles_file);
  if (!in) throw RunError(fmt::format("no battles in {}; run the play stage first", run));
  try {
    data.battles = json::parse(in).get<std::vector<BattleResult>>();
  } catch (const json::exception& e) {
    throw RunError(fmt::format("{}: {}", battles_file.string(), e.what()));
  }
  const std::string expected = manifest_hash(m);
  for (const auto& b : data.battles) {
    TraceFile tf;
    HandFile hf;
    try {
      tf = read_trace(layout::trace_path(run, b.battle_id));
      hf = read_hands(layout::hands_path(run, b.battle_id));
    } catch (const TraceError& e) {
      throw RunError(e.what());
    }
    if (tf.header.config_hash != expected) {
      throw RunError(fmt::format("battle {} was written under config {}, not {}", b.battle_id,
                                 tf.header.config_hash.substr(0, 12), expected.substr(0, 12)));
    }
    std::move(tf.rows.begin(), tf.rows.end(), std::back_inserter(data.rows));
    std::move(hf.hands.begin(), hf.hands.end(), std::back_inserter(data.hands));
  }
  return data;
}

}  // namespace triex
