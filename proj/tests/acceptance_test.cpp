// Acceptance suite: one PASS/FAIL line per criterion, printed after all
// criteria ran. Scripted backends only; no network.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include <fmt/format.h>

#include "oracles.hpp"
#include "run_fixtures.hpp"
#include "triex/equity.hpp"
#include "triex/pipeline.hpp"
#include "triex/report.hpp"
#include "triex/rng.hpp"

namespace {

using namespace triex;
using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and budgets.
constexpr double kInterveneTarget = 0.9241;
constexpr double kInterveneTol = 1e-4;
constexpr double kIdentityTol = 1e-12;
constexpr double kStepTol = 1e-12;
constexpr int kEquityStates = 50;
constexpr int kEquitySims = 100000;
constexpr int kEquityMinAgree = 48;
constexpr double kEquitySigmas = 3.0;
constexpr double kNullBand = 0.02;
constexpr int kNullRuns = 50;
constexpr double kClosedFormTol = 1e-12;
constexpr double kRoundTau = 0.7;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Line {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Line>& lines() {
  static std::vector<Line> all;
  return all;
}

// Records the criterion's verdict when the test body ends, including early
// returns from fatal assertions.
class Criterion {
 public:
  Criterion(int id, std::string name) : id_(id), name_(std::move(name)) {}
  ~Criterion() { lines().push_back({id_, name_, !::testing::Test::HasFailure(), detail}); }
  std::string detail;

 private:
  int id_;
  std::string name_;
};

class Printer : public ::testing::Environment {
 public:
  void TearDown() override {
    auto all = lines();
    std::sort(all.begin(), all.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
    int passed = 0;
    std::cout << "\n";
    for (const auto& l : all) {
      passed += l.pass;
      std::cout << fmt::format("ACCEPTANCE {:02d} {} {} | {}\n", l.id, l.pass ? "PASS" : "FAIL", l.name, l.detail);
    }
    std::cout << fmt::format("ACCEPTANCE {}/{} criteria passed\n", passed, all.size());
  }
};

const auto* const kPrinter = ::testing::AddGlobalTestEnvironment(new Printer);

// ---------------------------------------------------------------------------

TEST(Acceptance, C01_ConfigurationFidelity) {
  Criterion c(1, "configuration fidelity");
  const RunManifest m = default_manifest();
  const json game = m.game;
  const json expected{{"battles", 50},           {"hands_per_battle", 30}, {"initial_stack", 3000},
                      {"small_blind", 5},        {"big_blind", 10},        {"temperature", 0.2},
                      {"top_p", 1.0},            {"rng_seed", 7},          {"intervention_delta", 2.5},
                      {"mc_simulations", 1000}};
  EXPECT_EQ(game, expected) << game.dump();
  EXPECT_NO_THROW(m.validate());
  c.detail = game.dump();
}

TEST(Acceptance, C02_InterventionMath) {
  Criterion c(2, "intervention math");
  const auto t0 = Clock::now();
  TraitVector v;
  v[Trait::kAggressiveness] = 0.5;
  const double up = intervene(v, {Trait::kAggressiveness, Direction::kUp, 2.5}).traits[Trait::kAggressiveness];
  EXPECT_NEAR(up, kInterveneTarget, kInterveneTol);
  EXPECT_NEAR(up, oracle::sigmoid(2.5), 1e-15);
  double worst = 0;
  for (int k = 1; k <= 99; ++k) {
    TraitVector p;
    p[Trait::kRiskTolerance] = k / 100.0;
    const auto u = intervene(p, {Trait::kRiskTolerance, Direction::kUp, 2.5}).traits;
    const auto back = intervene(u, {Trait::kRiskTolerance, Direction::kDown, 2.5}).traits;
    worst = std::max(worst, std::abs(back[Trait::kRiskTolerance] - k / 100.0));
  }
  EXPECT_LE(worst, kIdentityTol);
  const double secs = seconds_since(t0);
  EXPECT_LT(secs, 1.0);
  c.detail = fmt::format("intervene(0.5)={:.6f}, max |down(up(p))-p|={:.1e}, {:.3f}s", up, worst, secs);
}

TEST(Acceptance, C03_BoundedUpdate) {
  Criterion c(3, "bounded update");
  const auto t0 = Clock::now();
  Rng rng(3);
  double worst_step = 0;
  bool in_range = true;
  for (int i = 0; i < 10000; ++i) {
    OpponentProfile prior = initial_profile("opp");
    TraitVector proposed;
    for (Trait t : kAllTraits) {
      prior.traits[t] = rng.uniform01();
      proposed[t] = -0.25 + 1.5 * rng.uniform01();
    }
    const auto after = apply_bounded_update(prior, proposed, "", "r", i);
    for (Trait t : kAllTraits) {
      worst_step = std::max(worst_step, std::abs(after.traits[t] - prior.traits[t]));
      in_range = in_range && after.traits[t] >= 0.0 && after.traits[t] <= 1.0;
    }
  }
  EXPECT_LE(worst_step, kMaxTraitStep + kStepTol);
  EXPECT_TRUE(in_range);
  const double secs = seconds_since(t0);
  EXPECT_LT(secs, 1.0);
  c.detail = fmt::format("max step {:.6f}, all in [0,1]: {}, {:.3f}s", worst_step, in_range, secs);
}

// Exact heads-up river share by enumerating every opponent holding.
double river_share(const HoleCards& hole, const std::vector<Card>& board) {
  std::vector<Card> deck;
  for (int i = 0; i < 52; ++i) {
    const Card x(i);
    if (x != hole[0] && x != hole[1] && std::find(board.begin(), board.end(), x) == board.end()) deck.push_back(x);
  }
  std::vector<Card> mine(board);
  mine.insert(mine.end(), hole.begin(), hole.end());
  const auto hero = oracle::best_of(mine);
  double won = 0;
  int n = 0;
  for (std::size_t i = 0; i < deck.size(); ++i) {
    for (std::size_t j = i + 1; j < deck.size(); ++j) {
      std::vector<Card> theirs(board);
      theirs.push_back(deck[i]);
      theirs.push_back(deck[j]);
      const auto villain = oracle::best_of(theirs);
      won += hero > villain ? 1.0 : hero == villain ? 0.5 : 0.0;
      ++n;
    }
  }
  return won / n;
}

TEST(Acceptance, C04_EquityCorrectness) {
  Criterion c(4, "equity correctness");
  const auto t0 = Clock::now();
  Rng deal(4);
  int agree = 0;
  double worst_z = 0;
  for (int s = 0; s < kEquityStates; ++s) {
    std::vector<int> idx(52);
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < 7; ++k) std::swap(idx[k], idx[k + deal.uniform_index(52 - k)]);
    const HoleCards hole{Card(idx[0]), Card(idx[1])};
    const std::vector<Card> board{Card(idx[2]), Card(idx[3]), Card(idx[4]), Card(idx[5]), Card(idx[6])};
    const double exact = river_share(hole, board);
    EXPECT_NEAR(exact_equity_heads_up(hole, board), exact, 1e-12);
    Rng mc(1000 + s);
    const double est = estimate_equity(hole, board, 1, kEquitySims, mc);
    const double sigma = std::sqrt(exact * (1 - exact) / kEquitySims);
    const double err = std::abs(est - exact);
    const bool ok = sigma > 0 ? err <= kEquitySigmas * sigma : err <= 1e-12;
    agree += ok;
    if (sigma > 0) worst_z = std::max(worst_z, err / sigma);
  }
  EXPECT_GE(agree, kEquityMinAgree);
  const double secs = seconds_since(t0);
  EXPECT_LT(secs, 120.0);
  c.detail = fmt::format("{}/{} within 3 sigma (worst z {:.2f}), {:.1f}s", agree, kEquityStates, worst_z, secs);
}

TEST(Acceptance, C05_DeterminismAndConservation) {
  Criterion c(5, "engine determinism and conservation");
  RunManifest a = default_manifest();
  a.out_dir = fixtures::scratch("acc5_a");
  RunManifest b = a;
  b.out_dir = fixtures::scratch("acc5_b");
  const auto t0 = Clock::now();
  ClientPool ca(a);
  run_battles(a, ca, run_directory(a));
  const double secs = seconds_since(t0);
  ClientPool cb(b);
  run_battles(b, cb, run_directory(b));

  int identical = 0;
  for (int i = 0; i < a.game.battles; ++i) {
    identical += fixtures::slurp(layout::trace_path(run_directory(a), i)) ==
                     fixtures::slurp(layout::trace_path(run_directory(b), i)) &&
                 fixtures::slurp(layout::hands_path(run_directory(a), i)) ==
                     fixtures::slurp(layout::hands_path(run_directory(b), i));
  }
  EXPECT_EQ(identical, a.game.battles);

  const RunData data = load_run(a, run_directory(a));
  const Chips total = a.game.initial_stack * static_cast<Chips>(a.seats.size());
  std::size_t violations = 0;
  for (const auto& r : data.rows) {
    violations += std::accumulate(r.obs.stacks.begin(), r.obs.stacks.end(), Chips{0}) + r.obs.pot != total;
  }
  for (const auto& h : data.hands) {
    violations += std::accumulate(h.stacks_after.begin(), h.stacks_after.end(), Chips{0}) != total;
  }
  EXPECT_EQ(violations, 0u);
  EXPECT_EQ(data.battles.size(), 50u);
  EXPECT_LT(secs, 60.0);
  c.detail = fmt::format("{}/{} battles byte-identical, {} rows, {} conservation violations, {:.1f}s per run", identical,
                         a.game.battles, data.rows.size(), violations, secs);
}

TEST(Acceptance, C06_ParserCorpus) {
  Criterion c(6, "parser totality and round-trip");
  std::ifstream in(std::string(TRIEX_TEST_DIR) + "/fixtures/parser_corpus.json");
  ASSERT_TRUE(in);
  const json corpus = json::parse(in);
  ASSERT_EQ(corpus.size(), 200u);
  int crashes = 0, checked = 0, round_trips = 0, value_mismatches = 0;
  const std::map<std::string, ArtifactField> fields{{"hand_strength", ArtifactField::kHandStrength},
                                                    {"risk_attitude", ArtifactField::kRiskAttitude},
                                                    {"main_goal", ArtifactField::kMainGoal},
                                                    {"perceived_opponent_risk", ArtifactField::kPerceivedOpponentRisk},
                                                    {"intended_action_type", ArtifactField::kIntendedActionType},
                                                    {"intended_risk_level", ArtifactField::kIntendedRiskLevel}};
  for (const auto& item : corpus) {
    const std::string text = item.at("text").get<std::string>();
    FirstPersonArtifact a;
    try {
      a = parse_first_person(text);
      for (const Claim& cl : a.signature.claims) {
        if (cl.begin > cl.end || cl.end > text.size()) throw std::runtime_error("span out of range");
      }
      parse_opponent_profile(text);
      parse_oracle_first_person(text, text);
      parse_oracle_second_person(text);
    } catch (const std::exception& e) {
      ++crashes;
      ADD_FAILURE() << item.at("id") << ": " << e.what();
      continue;
    }
    if (!item.contains("expected")) continue;
    ++checked;
    const auto& expected = item.at("expected");
    for (const auto& [key, field] : fields) {
      if (a.signature[field].status != ClaimStatus::kValue || a.signature[field].value != expected.at(key)) {
        ++value_mismatches;
        ADD_FAILURE() << item.at("id") << ": " << key;
      }
    }
    const auto& d = expected.at("decision");
    const Action want = d.at("action") == "raise" ? Action::raise_to(d.at("amount").get<Chips>())
                                                  : Action{parse_action_kind(d.at("action").get<std::string>()), 0};
    if (a.decision != want) {
      ++value_mismatches;
      ADD_FAILURE() << item.at("id") << ": decision";
    }
    const auto again = parse_first_person(canonical_first_person_text(a));
    if (again.signature == a.signature && again.decision == a.decision) ++round_trips;
  }
  EXPECT_EQ(crashes, 0);
  EXPECT_EQ(round_trips, checked);
  EXPECT_EQ(value_mismatches, 0);
  c.detail = fmt::format("200 cases, {} crashes, {}/{} well-formed round-trips, {} value mismatches", crashes,
                         round_trips, checked, value_mismatches);
}

TEST(Acceptance, C07_NullInterventionBound) {
  Criterion c(7, "null-intervention bound");
  RunManifest m = fixtures::small(fixtures::scratch("acc7"), 20, 30);
  fixtures::set_policy(m, {{"policy", "stochastic"}});
  ClientPool clients(m);
  run_battles(m, clients, run_directory(m));
  const RunData data = load_run(m, run_directory(m));
  const auto report = run_intervention(m, data.rows, clients.get("scripted-llm"),
                                       {Trait::kAggressiveness, Direction::kUp, 0.0}, kNullRuns);
  const auto& agg = report.aggregate;
  const double gap = std::abs(agg.cr_reo_rei.mean - agg.cr_log_reo.mean);
  EXPECT_EQ(agg.runs, static_cast<std::size_t>(kNullRuns));
  EXPECT_LT(gap, kNullBand);
  c.detail = fmt::format("n={} rows, CR(Log->ReO)={:.4f} (var {:.1e}), CR(ReO->ReI)={:.4f} (var {:.1e}), gap {:.4f}",
                         report.runs.front().n, agg.cr_log_reo.mean, agg.cr_log_reo.variance, agg.cr_reo_rei.mean,
                         agg.cr_reo_rei.variance, gap);
}

// Closed form of the belief-threshold policy: the coarse action it takes given
// whether the strongest believed trait value, as printed with two decimals,
// exceeds tau.
CoarseAction threshold_policy(const DecisionTrace& r, bool hot) {
  const bool facing = r.legal.call_amount > 0;
  const bool strong = r.features.bucket == HandStrength::kStrong;
  const CoarseAction raise = r.legal.raise_available ? CoarseAction::kRaise : CoarseAction::kCall;
  if (facing) return strong ? (hot ? raise : CoarseAction::kCall) : (hot ? CoarseAction::kFold : CoarseAction::kCall);
  return strong ? (hot ? raise : CoarseAction::kCall) : (hot ? CoarseAction::kCall : raise);
}

bool is_hot(const DecisionTrace& r, Trait trait, std::optional<double> shift) {
  double best = 0.5;
  bool any = false;
  for (const auto& p : r.context->profiles) {
    double v = p.traits[trait];
    if (shift) {
      const double q = std::clamp(v, 1e-6, 1.0 - 1e-6);
      v = oracle::sigmoid(oracle::logit(q) + *shift);
    }
    const double shown = std::stod(fmt::format("{:.2f}", v));
    if (!any || shown > best) best = shown;
    any = true;
  }
  return best > kRoundTau;
}

TEST(Acceptance, C08_DirectionalConsistencyOracle) {
  Criterion c(8, "directional-consistency oracle");
  RunManifest m = fixtures::small(fixtures::scratch("acc8"), 10, 30);
  fixtures::set_policy(m, {{"policy", "threshold"}, {"trait", "aggressiveness"}, {"tau", kRoundTau}});
  ClientPool clients(m);
  run_battles(m, clients, run_directory(m));
  const RunData data = load_run(m, run_directory(m));
  std::vector<const DecisionTrace*> rows;
  for (const auto& r : data.rows) {
    if (r.is_llm() && r.action) rows.push_back(&r);
  }
  ASSERT_FALSE(rows.empty());
  for (const auto* r : rows) {
    ASSERT_EQ(threshold_policy(*r, is_hot(*r, Trait::kAggressiveness, std::nullopt)), coarse_action(r->action->kind))
        << decision_key(*r);
  }
  std::vector<std::string> parts;
  for (Direction dir : {Direction::kUp, Direction::kDown}) {
    const double shift = dir == Direction::kUp ? 2.5 : -2.5;
    std::size_t flips = 0;
    for (const auto* r : rows) {
      flips += threshold_policy(*r, is_hot(*r, Trait::kAggressiveness, std::nullopt)) !=
               threshold_policy(*r, is_hot(*r, Trait::kAggressiveness, shift));
    }
    const double expected = static_cast<double>(flips) / static_cast<double>(rows.size());
    const auto report =
        run_intervention(m, data.rows, clients.get("scripted-llm"), {Trait::kAggressiveness, dir, 2.5}, 3);
    EXPECT_GT(flips, 0u);
    for (const auto& run : report.runs) {
      EXPECT_NEAR(run.cr_reo_rei, expected, kClosedFormTol);
      EXPECT_NEAR(run.cr_log_rei, expected, kClosedFormTol);
      EXPECT_EQ(run.cr_log_reo, 0.0);
      ASSERT_TRUE(run.directional_consistency.has_value());
      EXPECT_EQ(*run.directional_consistency, 1.0);
    }
    parts.push_back(fmt::format("{}: CR={:.4f} closed form {:.4f}, DC={:.2f}", direction_name(dir),
                                report.aggregate.cr_reo_rei.mean, expected,
                                report.aggregate.directional_consistency.mean));
  }
  c.detail = fmt::format("{} rows; {}; {}", rows.size(), parts[0], parts[1]);
}

TEST(Acceptance, C09_MetricsIdentities) {
  Criterion c(9, "metrics identities");
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  std::vector<double> rev(x.rbegin(), x.rend());
  std::vector<double> cubed;
  for (double v : x) cubed.push_back(v * v * v);
  EXPECT_DOUBLE_EQ(*spearman(x, cubed), 1.0);
  EXPECT_DOUBLE_EQ(*spearman(x, rev), -1.0);
  const std::vector<int> labels{1, 2, 3, 4, 5, 2, 4};
  EXPECT_DOUBLE_EQ(*cohens_kappa_quadratic(labels, labels), 1.0);
  // a uniform on 1..4 and b = a + 1: kappa = 1 - (1/16) / (3.5/16) = 5/7.
  const std::vector<int> a{1, 1, 2, 2, 3, 3, 4, 4};
  std::vector<int> b;
  for (int v : a) b.push_back(v + 1);
  const double kappa = *cohens_kappa_quadratic(a, b);
  EXPECT_NEAR(kappa, 5.0 / 7.0, kClosedFormTol);

  // Synthetic trace: 4 preflop rows scored 5/5, flop rows scored 3 with
  // oracle 2, 2, 4 and one unaudited row.
  std::vector<AuditedRow> rows;
  const auto add = [&](Street s, int rule, std::optional<double> oracle, std::optional<OutcomeLabel> out) {
    AuditedRow r;
    r.key = std::to_string(rows.size());
    r.model = "m";
    r.street = s;
    r.rule_score = rule;
    r.rule_rationalized = rule <= 2;
    r.oracle_score = oracle;
    if (oracle) r.oracle_rationalized = *oracle <= 2;
    r.outcome = out;
    rows.push_back(r);
  };
  for (int i = 0; i < 4; ++i) add(Street::kPreflop, 5, 5.0, OutcomeLabel::kFaithful);
  add(Street::kFlop, 3, 2.0, OutcomeLabel::kRationalized);
  add(Street::kFlop, 3, 2.0, OutcomeLabel::kRationalized);
  add(Street::kFlop, 3, 4.0, OutcomeLabel::kUncertain);
  add(Street::kFlop, 3, std::nullopt, std::nullopt);
  const auto table = stratified_summary(rows, Stratum::kStreet);
  ASSERT_EQ(table.size(), 4u);
  EXPECT_EQ(table[0].n, 4u);
  EXPECT_EQ(*table[0].mean_rule, 5.0);
  EXPECT_EQ(table[0].frequency, 0.5);
  EXPECT_EQ(table[1].n, 4u);
  EXPECT_EQ(*table[1].mean_oracle, 8.0 / 3.0);
  EXPECT_EQ(*table[1].rat_oracle, 2.0 / 3.0);
  EXPECT_EQ(*table[1].rat_rule, 0.0);
  EXPECT_EQ(table[1].outcome_shares.at(OutcomeLabel::kRationalized), 2.0 / 3.0);
  EXPECT_EQ(table[2].n, 0u);
  EXPECT_EQ(table[3].n, 0u);
  const auto all = stratified_summary(rows, Stratum::kAll);
  EXPECT_EQ(*all[0].mean_rule, 4.0);
  EXPECT_EQ(*all[0].mean_oracle, 4.0);
  c.detail = fmt::format("rho +1/-1, kappa identical 1, shifted kappa {:.12f} vs 5/7, street table exact", kappa);
}

double naive_rank(const std::vector<double>& v, std::size_t i) {
  double r = 1;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j != i) r += v[j] > v[i] ? 1.0 : v[j] == v[i] ? 0.5 : 0.0;
  }
  return r;
}

TEST(Acceptance, C10_ReferenceLabels) {
  Criterion c(10, "second-person reference labels");
  // The 27 assignments of three levels to three opponents (ties included),
  // each checked against all 27 objective assignments. Ranks are descending,
  // so a higher value takes the better rank.
  const std::vector<std::string> ids{"a", "b", "c"};
  const double levels[] = {0.2, 0.5, 0.8};
  const auto assignment = [&](int code) {
    std::vector<double> v;
    for (int i = 0; i < 3; ++i, code /= 3) v.push_back(levels[code % 3]);
    return v;
  };
  int agree = 0;
  for (int profile_case = 0; profile_case < 27; ++profile_case) {
    const auto pv = assignment(profile_case);
    bool ok = true;
    for (int objective_case = 0; objective_case < 27; ++objective_case) {
      const auto ov = assignment(objective_case);
      std::map<std::string, double> pm, om;
      for (std::size_t i = 0; i < 3; ++i) {
        pm[ids[i]] = pv[i];
        om[ids[i]] = ov[i];
      }
      const auto labels = reference_direction_labels(pm, om);
      for (std::size_t i = 0; i < 3; ++i) {
        const double d = naive_rank(pv, i) - naive_rank(ov, i);
        const auto want = d < 0 ? DirectionLabel::kOverestimate
                          : d > 0 ? DirectionLabel::kUnderestimate
                                  : DirectionLabel::kMatched;
        ok = ok && labels.at(ids[i]) == want;
      }
    }
    agree += ok;
  }
  EXPECT_EQ(agree, 27);
  c.detail = fmt::format("{}/27 profile orderings agree against all 27 objective orderings", agree);
}

TEST(Acceptance, C11_ConvergenceHarness) {
  Criterion c(11, "convergence harness");
  std::vector<ArchetypeSpec> specs;
  std::vector<std::string> ids;
  for (Archetype a : kAllArchetypes) {
    specs.push_back(default_archetype_spec(a));
    ids.emplace_back(archetype_name(a));
  }
  ArchetypeSimConfig cfg;
  cfg.hands = 400;
  const auto history = simulate_archetypes(specs, cfg);
  std::map<std::string, BehaviorStats> stats;
  for (std::size_t i = 0; i < ids.size(); ++i) stats[ids[i]] = history.back()[i];
  const auto reference = reference_trait_values(stats, Trait::kAggressiveness);
  ASSERT_EQ(reference.size(), 5u);

  // Scripted updater: the four lower archetypes sit still in ground-truth
  // order at 0.30..0.47 while the top one starts at 0 and climbs in bounded
  // steps of 0.05, passing the last of them between rounds 9 and 10.
  std::vector<std::pair<double, std::string>> order;
  for (const auto& [id, v] : reference) order.emplace_back(v, id);
  std::sort(order.begin(), order.end());
  ASSERT_LT(order[3].first, order[4].first);
  const double rest[] = {0.30, 0.35, 0.40, 0.47};
  std::map<std::string, double> target;
  std::map<std::string, OpponentProfile> profiles;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& id = order[k].second;
    profiles[id] = initial_profile(id);
    profiles[id].traits[Trait::kAggressiveness] = k < 4 ? rest[k] : 0.0;
    target[id] = k < 4 ? rest[k] : 0.9;
  }
  BeliefTrajectory trajectory;
  for (int round = 1; round <= 15; ++round) {
    std::map<std::string, double> beliefs;
    for (auto& [id, p] : profiles) {
      TraitVector proposed = p.traits;
      proposed[Trait::kAggressiveness] = target[id];
      p = apply_bounded_update(p, proposed, "", "scripted", round);
      beliefs[id] = p.traits[Trait::kAggressiveness];
    }
    trajectory.push_back(beliefs);
  }
  const auto curve = convergence_curve({trajectory}, reference);
  ASSERT_EQ(curve.size(), 15u);
  EXPECT_LT(*curve[8].mean_rho, 1.0);
  EXPECT_EQ(*curve[9].mean_rho, 1.0);
  for (std::size_t r = 9; r < curve.size(); ++r) EXPECT_EQ(*curve[r].mean_rho, 1.0);
  c.detail = fmt::format("rho at round 1 {:.2f}, round 9 {:.2f}, round 10 {:.2f}", *curve[0].mean_rho,
                         *curve[8].mean_rho, *curve[9].mean_rho);
}

TEST(Acceptance, C12_EndToEndOffline) {
  Criterion c(12, "end-to-end offline pipeline");
  RunManifest m = default_manifest();
  m.game.battles = 5;
  m.out_dir = fixtures::scratch("acc12");
  const auto t0 = Clock::now();
  ClientPool clients(m);
  play_stage(m, clients);
  audit_stage(m, clients, {{}, true});
  metrics_stage(m);
  const auto rendered = report_stage(m);
  const double secs = seconds_since(t0);
  EXPECT_LT(secs, 120.0);
  const fs::path dir = layout::metrics_dir(run_directory(m));
  const std::vector<std::string> expected{"table_overall.csv", "table_street.csv", "table_risk.csv",
                                          "table_model.csv",   "table_bucket.csv", "table_action.csv",
                                          "outcome_distribution.svg"};
  for (const auto& f : expected) EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto street = fixtures::slurp((dir / "table_street.csv").string());
  EXPECT_EQ(street.substr(0, street.find('\n')), "Group,N,Rule,Oracle,Rat.(Rule),Rat.(Oracle),ρ,HighRisk");
  for (const char* s : {"\nPreflop,", "\nFlop,", "\nTurn,", "\nRiver,"}) EXPECT_NE(street.find(s), std::string::npos);
  const auto risk = fixtures::slurp((dir / "table_risk.csv").string());
  EXPECT_NE(risk.find("\nLow Risk,"), std::string::npos);
  EXPECT_NE(risk.find("\nHigh Risk,"), std::string::npos);
  const auto svg = fixtures::slurp((dir / "outcome_distribution.svg").string());
  for (const char* s : {"Preflop", "Flop", "Turn", "River", "Faithful", "Rationalized", "Uncertain"}) {
    EXPECT_NE(svg.find(s), std::string::npos) << s;
  }
  c.detail = fmt::format("{} files in {}, {:.1f}s", rendered.summary.at("files").size(), dir.string(), secs);
}

}  // namespace
