#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "triex/equity.hpp"
#include "triex/hand_eval.hpp"
#include "triex/table.hpp"

using namespace triex;

namespace {

HoleCards hole(std::string_view text) {
  auto c = parse_cards(text);
  return {c.at(0), c.at(1)};
}

Chips total_chips(const TableState& t) {
  return std::accumulate(t.stacks.begin(), t.stacks.end(), Chips{0}) + t.pot;
}

}  // namespace

TEST(Cards, ParseAndPrintRoundTrip) {
  for (const Card& c : full_deck()) EXPECT_EQ(Card::parse(c.str()), c);
  EXPECT_EQ(Card::parse("As").rank(), 12);
  EXPECT_EQ(Card::parse("2c").index(), 0);
  EXPECT_LT(Card::parse("Ah"), Card::parse("As"));
  EXPECT_THROW(Card::parse("1x"), InvalidInput);
}

TEST(HandEval, StraightFlushBeatsQuads) {
  const auto sf = evaluate_hand(parse_cards("As Ks Qs Js Ts 2c 3d"));
  const auto quads = evaluate_hand(parse_cards("2c 2d 2h 2s 9c"));
  EXPECT_EQ(sf.category(), HandCategory::kStraightFlush);
  EXPECT_EQ(quads.category(), HandCategory::kQuads);
  EXPECT_GT(sf, quads);
}

TEST(HandEval, KickerDecides) {
  const auto a = evaluate_hand(parse_cards("Ah Kd Qc Js 9h 3c 2d"));
  const auto b = evaluate_hand(parse_cards("Ah Kd Qc Js 8h 3c 2d"));
  EXPECT_GT(a, b);
  EXPECT_GT(oracle::best_of(parse_cards("Ah Kd Qc Js 9h 3c 2d")),
            oracle::best_of(parse_cards("Ah Kd Qc Js 8h 3c 2d")));
}

TEST(HandEval, WheelIsLowestStraight) {
  const auto wheel = evaluate_hand(parse_cards("Ac 2d 3h 4s 5c"));
  const auto six = evaluate_hand(parse_cards("2d 3h 4s 5c 6d"));
  EXPECT_EQ(wheel.category(), HandCategory::kStraight);
  EXPECT_LT(wheel, six);
}

TEST(HandEval, RejectsDuplicatesAndBadCounts) {
  EXPECT_THROW(evaluate_hand(parse_cards("As As Kd Qc Jh")), InvalidInput);
  EXPECT_THROW(evaluate_hand(parse_cards("As Kd Qc Jh")), InvalidInput);
}

// Every pairwise order and every category agrees with exhaustive 5-of-7 search.
TEST(HandEval, MatchesBruteForceOracle) {
  Rng rng(12345);
  std::vector<Card> deck = full_deck();
  for (int trial = 0; trial < 4000; ++trial) {
    for (std::size_t i = 0; i < 9; ++i) std::swap(deck[i], deck[i + rng.uniform_index(52 - i)]);
    std::vector<Card> a{deck[0], deck[1], deck[4], deck[5], deck[6], deck[7], deck[8]};
    std::vector<Card> b{deck[2], deck[3], deck[4], deck[5], deck[6], deck[7], deck[8]};
    const auto fa = evaluate_hand(a), fb = evaluate_hand(b);
    const auto oa = oracle::best_of(a), ob = oracle::best_of(b);
    ASSERT_EQ(static_cast<int>(fa.category()), oa.first) << cards_str(a);
    ASSERT_EQ(fa <=> fb, oa <=> ob) << cards_str(a) << " vs " << cards_str(b);
  }
}

TEST(HandEval, FiveAndSixCardHandsMatchOracle) {
  Rng rng(99);
  std::vector<Card> deck = full_deck();
  for (int trial = 0; trial < 2000; ++trial) {
    for (std::size_t i = 0; i < 12; ++i) std::swap(deck[i], deck[i + rng.uniform_index(52 - i)]);
    const std::size_t n = trial % 2 == 0 ? 5 : 6;
    std::vector<Card> a(deck.begin(), deck.begin() + static_cast<long>(n));
    std::vector<Card> b(deck.begin() + 6, deck.begin() + 6 + static_cast<long>(n));
    ASSERT_EQ(evaluate_hand(a) <=> evaluate_hand(b), oracle::best_of(a) <=> oracle::best_of(b));
  }
}

TEST(Equity, PocketAcesPreflop) {
  Rng rng(derive_seed(7, {kEquityStream}));
  const double eq = estimate_equity(hole("Ah As"), {}, 1, 100000, rng);
  EXPECT_NEAR(eq, 0.852, 0.01);
}

TEST(Equity, DeterministicForSeed) {
  Rng a(5), b(5);
  const auto board = parse_cards("Kd 7h 2c");
  EXPECT_EQ(estimate_equity(hole("Qs Qc"), board, 3, 2000, a),
            estimate_equity(hole("Qs Qc"), board, 3, 2000, b));
}

// Exhaustive enumeration with the brute-force evaluator, independent of the
// library's enumerator.
double oracle_exact_turn(const HoleCards& h, const std::vector<Card>& board) {
  std::vector<Card> used{h[0], h[1]};
  used.insert(used.end(), board.begin(), board.end());
  std::vector<Card> rest;
  for (const Card& c : full_deck()) {
    if (std::find(used.begin(), used.end(), c) == used.end()) rest.push_back(c);
  }
  double credit = 0;
  double n = 0;
  for (std::size_t a = 0; a < rest.size(); ++a) {
    for (std::size_t b = a + 1; b < rest.size(); ++b) {
      for (std::size_t r = 0; r < rest.size(); ++r) {
        if (r == a || r == b) continue;
        std::vector<Card> mine{h[0], h[1]}, theirs{rest[a], rest[b]};
        for (auto* v : {&mine, &theirs}) {
          v->insert(v->end(), board.begin(), board.end());
          v->push_back(rest[r]);
        }
        const auto x = oracle::best_of(mine), y = oracle::best_of(theirs);
        credit += x > y ? 1.0 : x == y ? 0.5 : 0.0;
        n += 1;
      }
    }
  }
  return credit / n;
}

TEST(Equity, QuadsOnTurnMatchesEnumeration) {
  const auto h = hole("2c 7d");
  const auto board = parse_cards("2d 2h 2s 7c");
  const double truth = oracle_exact_turn(h, board);
  EXPECT_NEAR(exact_equity_heads_up(h, board), truth, 1e-12);

  const int n = 20000;
  Rng rng(31);
  const double mc = estimate_equity(h, board, 1, n, rng);
  const double sigma = std::sqrt(truth * (1 - truth) / n);
  EXPECT_NEAR(mc, truth, 3 * sigma + 1e-9);
}

TEST(Equity, RiverMonteCarloUnbiased) {
  const auto h = hole("Jh Td");
  const auto board = parse_cards("9s 8c 2h Kd 3s");
  const double exact = exact_equity_heads_up(h, board);
  double mean = 0;
  const int seeds = 20, n = 2000;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(static_cast<std::uint64_t>(1000 + s));
    mean += estimate_equity(h, board, 1, n, rng);
  }
  mean /= seeds;
  const double sigma = std::sqrt(exact * (1 - exact) / (seeds * n));
  EXPECT_NEAR(mean, exact, 3 * sigma);
}

TEST(Equity, SuitPermutationSymmetry) {
  Rng a(77), b(78);
  const double e1 = estimate_equity(hole("Kh Qh"), {}, 2, 40000, a);
  const double e2 = estimate_equity(hole("Ks Qs"), {}, 2, 40000, b);
  const double sigma = std::sqrt(e1 * (1 - e1) / 40000);
  EXPECT_NEAR(e1, e2, 4 * sigma * std::sqrt(2.0));
}

TEST(Equity, ImpossibleDealsRejected) {
  Rng rng(1);
  EXPECT_THROW(estimate_equity(hole("Ah As"), {}, 30, 10, rng), InvalidInput);
  EXPECT_THROW(estimate_equity(hole("Ah As"), parse_cards("Ah 2c 3d"), 1, 10, rng), InvalidInput);
  EXPECT_THROW(estimate_equity(hole("Ah As"), {}, 1, 0, rng), InvalidInput);
}

TEST(Equity, StreetBudget) {
  EXPECT_EQ(simulations_for_street(Street::kPreflop, 1000, 3), 1000);
  EXPECT_EQ(simulations_for_street(Street::kFlop, 1000, 3), 1000);
  EXPECT_EQ(simulations_for_street(Street::kTurn, 1000, 3), 500);
  EXPECT_EQ(simulations_for_street(Street::kRiver, 1000, 1), 0);
  EXPECT_EQ(simulations_for_street(Street::kRiver, 1000, 2), 500);
}

TEST(Normalize, Examples) {
  LegalActionSet free{true, 0, 20, 500, true};
  LegalActionSet facing{true, 10, 20, 500, true};
  EXPECT_EQ(normalize_action(Action::check(), free), Action::call());
  EXPECT_EQ(normalize_action(Action::check(), facing), Action::fold());
  EXPECT_EQ(normalize_action(Action::raise_to(9999), facing), Action::raise_to(500));
  EXPECT_EQ(normalize_action(Action::raise_to(3), facing), Action::raise_to(20));
  LegalActionSet no_raise{true, 10, 0, 0, false};
  EXPECT_EQ(normalize_action(Action::raise_to(100), no_raise), Action::call());
}

TEST(Normalize, Idempotent) {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    LegalActionSet legal;
    legal.call_amount = static_cast<Chips>(rng.uniform_index(3)) * 10;
    legal.raise_available = rng.bernoulli(0.7);
    if (legal.raise_available) {
      legal.min_raise = 20 + static_cast<Chips>(rng.uniform_index(100));
      legal.max_raise = legal.min_raise + static_cast<Chips>(rng.uniform_index(1000));
    }
    const Action a{static_cast<ActionKind>(rng.uniform_index(4)), static_cast<Chips>(rng.uniform_index(3000))};
    const Action once = normalize_action(a, legal);
    ASSERT_EQ(normalize_action(once, legal), once);
  }
}

TEST(Table, FoldsToBigBlind) {
  Rng rng(1);
  auto t = start_hand({1000, 1000, 1000, 1000}, 0, 5, 10, 0, rng);
  // Button 0, SB 1, BB 2, first to act 3.
  EXPECT_EQ(t.to_act, 3);
  t = step(t, 3, Action::fold());
  t = step(t, 0, Action::fold());
  t = step(t, 1, Action::fold());
  ASSERT_TRUE(t.finished);
  EXPECT_FALSE(t.showdown);
  EXPECT_EQ(t.payouts[2], 15);
  EXPECT_EQ(t.stacks[2], 1005);
  EXPECT_EQ(t.stacks[1], 995);
}

TEST(Table, HeadsUpButtonPostsSmallBlind) {
  Rng rng(2);
  auto t = start_hand({500, 500}, 1, 5, 10, 0, rng);
  EXPECT_EQ(t.committed[1], 5);
  EXPECT_EQ(t.committed[0], 10);
  EXPECT_EQ(t.to_act, 1);
}

TEST(Table, SidePotHoldsExcessOfLargerAllIn) {
  Rng rng(3);
  auto t = start_hand({100, 300, 1000}, 0, 5, 10, 0, rng);
  ASSERT_EQ(t.to_act, 0);
  t = step(t, 0, Action::raise_to(100));
  t = step(t, 1, Action::raise_to(300));
  t = step(t, 2, Action::call());
  ASSERT_TRUE(t.finished);
  ASSERT_EQ(t.pots.size(), 2u);
  EXPECT_EQ(t.pots[0].amount, 300);
  EXPECT_EQ(t.pots[0].eligible, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(t.pots[1].amount, 2 * (300 - 100));
  EXPECT_EQ(t.pots[1].eligible, (std::vector<int>{1, 2}));
  EXPECT_EQ(std::accumulate(t.payouts.begin(), t.payouts.end(), Chips{0}), 700);
  EXPECT_EQ(total_chips(t), 1400);
  EXPECT_EQ(t.board.size(), 5u);
}

TEST(Table, BuildPotsFoldedChipsStayInPot) {
  const auto pots = build_pots({50, 200, 200, 80}, {false, false, false, true});
  Chips sum = 0;
  for (const auto& p : pots) sum += p.amount;
  EXPECT_EQ(sum, 530);
  EXPECT_EQ(pots.front().amount, 200);
  EXPECT_EQ(pots.front().eligible, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(pots.back().eligible, (std::vector<int>{1, 2}));
}

TEST(Table, CheckAroundNeedsEverySeat) {
  Rng rng(4);
  auto t = start_hand({1000, 1000, 1000}, 0, 5, 10, 0, rng);
  t = step(t, 0, Action::call());
  t = step(t, 1, Action::call());
  t = step(t, 2, Action::call());  // big blind option, zero-cost
  ASSERT_EQ(t.street, Street::kFlop);
  ASSERT_EQ(t.board.size(), 3u);
  EXPECT_EQ(t.to_act, 1);
  t = step(t, 1, Action::call());
  EXPECT_EQ(t.street, Street::kFlop);
  t = step(t, 2, Action::check());
  EXPECT_EQ(t.street, Street::kFlop);
  t = step(t, 0, Action::call());
  EXPECT_EQ(t.street, Street::kTurn);
  EXPECT_EQ(t.board.size(), 4u);
}

TEST(Table, OutOfTurnAndIllegalActionsRejected) {
  Rng rng(5);
  auto t = start_hand({1000, 1000, 1000}, 0, 5, 10, 0, rng);
  EXPECT_THROW(step(t, 1, Action::call()), ProtocolError);
  EXPECT_THROW(step(t, 0, Action::check()), ProtocolError);
  EXPECT_THROW(step(t, 0, Action::raise_to(15)), ProtocolError);
}

TEST(Table, MinRaiseTracksLastIncrement) {
  Rng rng(6);
  auto t = start_hand({1000, 1000, 1000}, 0, 5, 10, 0, rng);
  EXPECT_EQ(legal_actions(t).min_raise, 20);
  t = step(t, 0, Action::raise_to(50));
  const auto legal = legal_actions(t);
  EXPECT_EQ(legal.call_amount, 45);
  EXPECT_EQ(legal.min_raise, 90);
  EXPECT_EQ(legal.max_raise, 1000);
}

TEST(Table, BustedSeatsSitOut) {
  Rng rng(7);
  auto t = start_hand({0, 500, 500}, 1, 5, 10, 0, rng);
  EXPECT_TRUE(t.sitting_out[0]);
  EXPECT_EQ(next_button({0, 500, 500}, 2), 1);
  EXPECT_THROW(start_hand({0, 0, 500}, 2, 5, 10, 0, rng), InvalidInput);
}

// Random legal play: chips are conserved, board size tracks the street, and
// stacks never go negative.
TEST(Table, RandomPlayInvariants) {
  Rng rng(2024);
  std::vector<Chips> stacks(6, 3000);
  int button = 0;
  for (int hand = 0; hand < 400; ++hand) {
    if (next_button(stacks, button) < 0) break;
    int seated = 0;
    for (Chips s : stacks) seated += s > 0 ? 1 : 0;
    if (seated < 2) break;
    Rng deal(derive_seed(9, {static_cast<std::uint64_t>(hand), kDealStream}));
    auto t = start_hand(stacks, button, 5, 10, hand, deal);
    const Chips total = total_chips(t);
    while (!t.finished) {
      const auto legal = legal_actions(t);
      const Action proposal{static_cast<ActionKind>(rng.uniform_index(4)),
                            static_cast<Chips>(rng.uniform_index(600))};
      t = step(t, t.to_act, normalize_action(proposal, legal));
      ASSERT_EQ(total_chips(t), total);
      const Chips committed = std::accumulate(t.committed.begin(), t.committed.end(), Chips{0});
      if (!t.finished) ASSERT_EQ(t.pot, committed);
      const std::size_t expected[] = {0, 3, 4, 5};
      ASSERT_EQ(t.board.size(), expected[static_cast<int>(t.street)]);
      for (Chips s : t.stacks) ASSERT_GE(s, 0);
    }
    ASSERT_EQ(total_chips(t), 6 * 3000);
    stacks = t.stacks;
    button = next_button(stacks, button);
  }
}

TEST(GameConfig, Validation) {
  GameConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.small_blind = 10;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = GameConfig{};
  cfg.mc_simulations = 0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}
