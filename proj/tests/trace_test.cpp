#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "triex/trace.hpp"

using namespace triex;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("triex_trace_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

TraceHeader header() {
  TraceHeader h;
  h.config_hash = "abc123";
  h.template_hashes = current_template_hashes();
  h.seed = 7;
  return h;
}

DecisionTrace basic_row(int hand, int index, Street street = Street::kPreflop) {
  DecisionTrace r;
  r.battle_id = 0;
  r.hand_id = hand;
  r.decision_index = index;
  r.street = street;
  r.player_id = "seat1";
  r.agent = "TAG";
  r.obs.seat = 1;
  r.obs.hole = {Card::parse("As"), Card::parse("Kh")};
  r.obs.stacks = {100, 100};
  r.obs.street_committed = {0, 0};
  r.obs.folded = {false, false};
  r.action = Action::call();
  r.features.street = street;
  return r;
}

// Plays one battle with uniformly random legal actions and records every
// decision the way the runner does.
std::vector<DecisionTrace> random_battle(const GameConfig& cfg, int n_seats, std::uint64_t seed, int battle) {
  std::vector<DecisionTrace> rows;
  std::vector<Chips> stacks(static_cast<std::size_t>(n_seats), cfg.initial_stack);
  int button = first_button(battle, n_seats);
  Rng policy(seed ^ 0xABCDEFULL);
  for (int hand = 0; hand < cfg.hands_per_battle; ++hand) {
    Rng deal(hand_deal_seed(seed, battle, hand));
    TableState t = start_hand(stacks, button, cfg.small_blind, cfg.big_blind, hand, deal);
    int index = 0;
    while (!t.finished) {
      const auto legal = legal_actions(t);
      const auto u = policy.uniform_index(10);
      Action a = u < 2 ? Action::fold() : u < 7 ? Action::call() : Action::raise_to(legal.min_raise);
      a = normalize_action(a, legal);
      DecisionTrace r;
      r.battle_id = battle;
      r.hand_id = hand;
      r.decision_index = index++;
      r.street = t.street;
      r.obs.seat = t.to_act;
      r.player_id = "seat" + std::to_string(t.to_act);
      r.agent = "random";
      r.obs.button = t.button;
      r.obs.hole = t.hole[static_cast<std::size_t>(t.to_act)];
      r.obs.board = t.board;
      r.obs.pot = t.pot;
      r.obs.stacks = t.stacks;
      r.obs.street_committed = t.street_committed;
      r.obs.folded = t.folded;
      r.legal = legal;
      r.action = a;
      r.features.street = t.street;
      rows.push_back(r);
      t = step(std::move(t), t.to_act, a);
    }
    stacks = t.stacks;
    if (std::count_if(stacks.begin(), stacks.end(), [](Chips c) { return c > 0; }) < 2) break;
    button = next_button(stacks, button);
  }
  return rows;
}

}  // namespace

TEST(TraceWriter, AppendGrowsFileByOneLine) {
  const auto dir = temp_dir("append");
  const auto path = dir / "battle_000.trace.ndjson";
  TraceWriter w(path.string(), header(), 0);
  w.flush();
  EXPECT_EQ(line_count(path), 1u);
  w.append(basic_row(0, 0));
  w.flush();
  EXPECT_EQ(line_count(path), 2u);
  w.append(basic_row(0, 1));
  w.flush();
  EXPECT_EQ(line_count(path), 3u);
}

TEST(TraceWriter, HeaderHasExactlyTheDeclaredKeys) {
  const auto dir = temp_dir("header");
  const auto path = dir / "t.ndjson";
  { TraceWriter w(path.string(), header(), 0); }
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  const auto j = nlohmann::json::parse(first);
  EXPECT_EQ(j.size(), 4u);
  for (const char* k : {"schema_version", "config_hash", "template_hashes", "seed"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["template_hashes"].size(), 4u);
}

TEST(TraceWriter, RejectsInvalidRows) {
  const auto dir = temp_dir("reject");
  const auto path = dir / "t.ndjson";
  TraceWriter w(path.string(), header(), 0);
  auto missing = basic_row(0, 0);
  missing.action.reset();
  EXPECT_THROW(w.append(missing), TraceError);
  w.append(basic_row(1, 0));
  EXPECT_THROW(w.append(basic_row(1, 0)), TraceError);  // not strictly after the previous row
  EXPECT_THROW(w.append(basic_row(0, 5)), TraceError);
  auto other = basic_row(2, 0);
  other.battle_id = 3;
  EXPECT_THROW(w.append(other), TraceError);
  auto llm = basic_row(2, 0);
  llm.agent = "llm";
  EXPECT_THROW(w.append(llm), TraceError);  // no model name
  w.flush();
  EXPECT_EQ(line_count(path), 2u);
  EXPECT_EQ(w.rows(), 1u);
}

TEST(TraceFile, RoundTripPreservesRows) {
  const auto dir = temp_dir("roundtrip");
  const auto path = dir / "t.ndjson";
  auto row = basic_row(0, 0, Street::kFlop);
  row.agent = "llm";
  row.model_name = "m";
  row.proposed = Action::raise_to(55);
  row.action = Action::raise_to(40);
  row.flags.illegal_proposal = true;
  row.obs.board = parse_cards("2c 3d 4h");
  DecisionContext ctx;
  ctx.player = "seat1";
  ctx.hole = row.obs.hole;
  ctx.profiles = {initial_profile("seat0")};
  row.context = ctx;
  TraceArtifact art;
  art.raw = "DECISION: {\"action\": \"raise\", \"amount\": 55}";
  art.signature = parse_first_person(art.raw).signature;
  row.artifact = art;
  row.features.raise_over_pot = 0.8;
  row.features.high_risk = true;
  {
    TraceWriter w(path.string(), header(), 0);
    w.append(row);
  }
  const auto f = read_trace(path.string());
  EXPECT_EQ(f.header, header());
  ASSERT_EQ(f.rows.size(), 1u);
  EXPECT_EQ(nlohmann::json(f.rows[0]), nlohmann::json(row));
  EXPECT_EQ(decision_key(f.rows[0]), "0/0/0/seat1");
}

TEST(TraceFile, CorruptLineReported) {
  const auto dir = temp_dir("corrupt");
  const auto path = dir / "t.ndjson";
  {
    TraceWriter w(path.string(), header(), 0);
    w.append(basic_row(0, 0));
  }
  std::ofstream(path, std::ios::app) << "{not json\n";
  EXPECT_THROW(read_trace(path.string()), TraceError);
  EXPECT_THROW(read_trace((dir / "absent.ndjson").string()), TraceError);
}

TEST(Slice, StreetFilterCountsAndPartition) {
  std::vector<DecisionTrace> rows;
  const Street streets[] = {Street::kPreflop, Street::kPreflop, Street::kFlop,    Street::kPreflop,
                            Street::kTurn,    Street::kPreflop, Street::kRiver,   Street::kPreflop,
                            Street::kFlop,    Street::kPreflop};
  for (int i = 0; i < 10; ++i) rows.push_back(basic_row(i, 0, streets[i]));
  SliceFilter q;
  q.street = Street::kPreflop;
  const auto pre = slice(rows, q);
  EXPECT_EQ(pre.rows.size(), 6u);
  EXPECT_EQ(pre.considered, 10u);
  std::size_t total = 0;
  std::set<std::string> seen;
  for (Street s : {Street::kPreflop, Street::kFlop, Street::kTurn, Street::kRiver}) {
    q.street = s;
    for (const auto& r : slice(rows, q).rows) {
      EXPECT_TRUE(seen.insert(decision_key(r)).second);  // disjoint
      ++total;
    }
  }
  EXPECT_EQ(total, rows.size());  // union is everything
}

TEST(Slice, ConjunctionAndBucketRecount) {
  std::vector<DecisionTrace> rows;
  Rng rng(3);
  const FeatureConfig cfg;
  for (int i = 0; i < 200; ++i) {
    auto r = basic_row(i, 0);
    r.features.equity = rng.uniform01();
    r.features.bucket = bucket_for(r.features.equity, cfg);
    const bool raise = rng.bernoulli(0.4);
    r.action = raise ? Action::raise_to(30) : Action::call();
    r.features.high_risk = raise && rng.bernoulli(0.5);
    rows.push_back(r);
  }
  SliceFilter q;
  q.action = ActionKind::kRaise;
  q.high_risk = true;
  const auto both = slice(rows, q);
  for (const auto& r : both.rows) EXPECT_TRUE(r.action->kind == ActionKind::kRaise && r.features.high_risk);
  std::size_t expected = 0;
  for (const auto& r : rows) expected += r.action->kind == ActionKind::kRaise && r.features.high_risk;
  EXPECT_EQ(both.rows.size(), expected);

  // Independent recount over raw equities with the documented thresholds.
  SliceFilter strong;
  strong.bucket = HandStrength::kStrong;
  std::size_t recount = 0;
  for (const auto& r : rows) recount += r.features.equity >= 0.65;
  EXPECT_EQ(slice(rows, strong).rows.size(), recount);

  SliceFilter window;
  window.hand_from = 10;
  window.hand_to = 20;
  EXPECT_EQ(slice(rows, window).rows.size(), 10u);
}

TEST(Replay, RandomBattleReplaysExactly) {
  GameConfig cfg;
  cfg.hands_per_battle = 30;
  const auto dir = temp_dir("replay");
  const auto path = dir / "battle_002.trace.ndjson";
  const auto rows = random_battle(cfg, 4, 11, 2);
  ASSERT_GT(rows.size(), 30u);
  {
    TraceWriter w(path.string(), header(), 2);
    for (const auto& r : rows) w.append(r);
  }
  const auto file = read_trace(path.string());
  const auto rep = replay_battle(file.rows, cfg, 4, 11, 2);
  EXPECT_TRUE(rep.ok()) << (rep.mismatches.empty() ? "" : rep.mismatches[0]);
  EXPECT_EQ(rep.rows_checked, rows.size());
  Chips total = 0;
  for (Chips c : rep.final_stacks) total += c;
  EXPECT_EQ(total, 4 * cfg.initial_stack);

  // Replaying under another seed or with an altered action is detected.
  EXPECT_FALSE(replay_battle(file.rows, cfg, 4, 12, 2).ok());
  auto tampered = file.rows;
  for (auto& r : tampered) {
    if (r.hand_id == 3 && r.action->kind == ActionKind::kCall) {
      r.action = Action::fold();
      break;
    }
  }
  EXPECT_FALSE(replay_battle(tampered, cfg, 4, 11, 2).ok());
}

TEST(HandFile, RoundTrip) {
  const auto dir = temp_dir("hands");
  const auto path = dir / "h.ndjson";
  HandRecord h;
  h.hand_id = 4;
  h.stacks_before = {100, 200};
  h.stacks_after = {150, 150};
  h.payouts = {60, 0};
  h.board = parse_cards("2c 3d 4h 5s 6c");
  h.stats["seat0"].hands_seen = 5;
  ProfileUpdateRecord u;
  u.agent = "seat0";
  u.opponent = "seat1";
  u.proposed[Trait::kAggressiveness] = 0.9;
  u.applied[Trait::kAggressiveness] = 0.55;
  h.profile_updates = {u};
  {
    HandWriter w(path.string(), header());
    w.append(h);
  }
  const auto f = read_hands(path.string());
  ASSERT_EQ(f.hands.size(), 1u);
  EXPECT_EQ(nlohmann::json(f.hands[0]), nlohmann::json(h));
}
