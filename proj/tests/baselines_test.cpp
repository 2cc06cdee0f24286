#include <gtest/gtest.h>

#include <cmath>

#include "triex/baselines.hpp"

using namespace triex;

namespace {

ReferenceFeatures features(double equity, int n_opp, Chips pot, Chips to_call,
                           Street street = Street::kFlop) {
  ReferenceFeatures f;
  f.street = street;
  f.equity = equity;
  f.n_opponents = n_opp;
  f.pot = pot;
  f.to_call = to_call;
  f.stack = 2000;
  f.pot_odds = to_call == 0 ? 0.0 : static_cast<double>(to_call) / static_cast<double>(pot + to_call);
  return f;
}

const LegalActionSet kFacing{true, 50, 100, 2000, true};

}  // namespace

TEST(Archetype, TightPassiveFoldsWeakHandFacingBet) {
  const auto tp = default_archetype_spec(Archetype::kTightPassive);
  for (int n = 1; n <= 6; ++n) {
    for (int st = 0; st < 4; ++st) {
      const auto mix = archetype_mix(tp, features(0.20, n, 100, 50, static_cast<Street>(st)), kFacing);
      EXPECT_DOUBLE_EQ(mix.fold, 1.0) << n << " opponents, street " << st;
      Rng rng(1);
      EXPECT_EQ(archetype_decide(tp, features(0.20, n, 100, 50, static_cast<Street>(st)), kFacing, rng),
                Action::fold());
    }
  }
}

TEST(Archetype, ManiacRaisesMediumSpotsAtLeastHalfTheTime) {
  const auto m = default_archetype_spec(Archetype::kManiac);
  for (double eq = 0.40; eq < 0.65; eq += 0.01) {
    for (int n = 1; n <= 6; ++n) {
      for (Chips call : {Chips{0}, Chips{50}}) {
        LegalActionSet legal = kFacing;
        legal.call_amount = call;
        for (int st = 0; st < 4; ++st) {
          EXPECT_GE(archetype_mix(m, features(eq, n, 100, call, static_cast<Street>(st)), legal).raise, 0.5);
        }
      }
    }
  }
}

TEST(Archetype, LoosePassiveCallsWithOdds) {
  const auto lp = default_archetype_spec(Archetype::kLoosePassive);
  for (double eq = 0.34; eq < 0.85; eq += 0.01) {
    const auto f = features(eq, 1, 100, 50);  // pot odds 1/3
    ASSERT_GE(f.equity, f.pot_odds);
    const auto mix = archetype_mix(lp, f, kFacing);
    EXPECT_DOUBLE_EQ(mix.call, 1.0) << eq;
  }
  EXPECT_GT(archetype_mix(lp, features(0.9, 1, 100, 50), kFacing).raise, 0.0);
}

TEST(Archetype, MixIsDistributionAndRaisesAreLegal) {
  Rng rng(3);
  for (auto a : kAllArchetypes) {
    const auto spec = default_archetype_spec(a);
    for (int i = 0; i < 500; ++i) {
      const Chips call = static_cast<Chips>(rng.uniform_index(3)) * 40;
      LegalActionSet legal{true, call, 80, 1500, rng.bernoulli(0.8)};
      auto f = features(rng.uniform01(), 1 + static_cast<int>(rng.uniform_index(6)), 200, call,
                        static_cast<Street>(rng.uniform_index(4)));
      const auto mix = archetype_mix(spec, f, legal);
      EXPECT_NEAR(mix.fold + mix.call + mix.raise, 1.0, 1e-12);
      EXPECT_GE(mix.fold, 0.0);
      if (call == 0) EXPECT_EQ(mix.fold, 0.0);
      if (!legal.raise_available) EXPECT_EQ(mix.raise, 0.0);
      const Action act = archetype_decide(spec, f, legal, rng);
      EXPECT_EQ(normalize_action(act, legal), act);
    }
  }
}

TEST(Archetype, DeterministicGivenSeed) {
  const auto spec = default_archetype_spec(Archetype::kLooseAggressive);
  const auto f = features(0.45, 2, 120, 40);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng a(seed), b(seed);
    EXPECT_EQ(archetype_decide(spec, f, kFacing, a), archetype_decide(spec, f, kFacing, b));
  }
}

TEST(Archetype, JsonOverridesKeepReferenceValues) {
  const auto ref = default_archetype_spec(Archetype::kManiac);
  nlohmann::json j = ref;
  EXPECT_EQ(j.get<ArchetypeSpec>().bluff_raise_prob, ref.bluff_raise_prob);
  const auto partial = nlohmann::json{{"name", "Maniac"}, {"bluff_raise_prob", 0.6}}.get<ArchetypeSpec>();
  EXPECT_EQ(partial.bluff_raise_prob, 0.6);
  EXPECT_EQ(partial.value_raise_prob, ref.value_raise_prob);
  EXPECT_THROW((nlohmann::json{{"name", "Shark"}}.get<ArchetypeSpec>()), InvalidInput);
  EXPECT_THROW((nlohmann::json{{"name", "Maniac"}, {"bluff_raise_prob", 1.5}}.get<ArchetypeSpec>()),
               InvalidInput);
}

class ArchetypeTable : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    std::vector<ArchetypeSpec> seats;
    for (auto a : kAllArchetypes) seats.push_back(default_archetype_spec(a));
    ArchetypeSimConfig cfg;
    cfg.hands = 1200;
    cfg.mc_simulations = 150;
    history_ = simulate_archetypes(seats, cfg);
  }
  static BehaviorRates rates(Archetype a) {
    return behavior_rates(history_.back()[static_cast<std::size_t>(a)]);
  }
  static inline std::vector<std::vector<BehaviorStats>> history_;
};

TEST_F(ArchetypeTable, TraitOrderingRealized) {
  const auto lp = rates(Archetype::kLoosePassive), lag = rates(Archetype::kLooseAggressive),
             m = rates(Archetype::kManiac), tp = rates(Archetype::kTightPassive),
             tag = rates(Archetype::kTightAggressive);
  EXPECT_GT(*m.raise_rate, *lag.raise_rate);
  EXPECT_GT(*lag.raise_rate, *tag.raise_rate);
  EXPECT_GT(*tag.raise_rate, std::max(*lp.raise_rate, *tp.raise_rate));
  for (const auto& loose : {lp, lag, m}) {
    for (const auto& tight : {tp, tag}) {
      EXPECT_GT(*loose.vpip_proxy, *tight.vpip_proxy);
      EXPECT_GT(*tight.fold_rate, *loose.fold_rate);
    }
  }
}

// Disjoint halves of the run agree within binomial noise.
TEST_F(ArchetypeTable, PoliciesAreStationary) {
  const std::size_t mid = history_.size() / 2;
  for (auto a : kAllArchetypes) {
    const auto s = static_cast<std::size_t>(a);
    const auto first = *windowed_delta(history_[mid][s], BehaviorStats{});
    const auto second = *windowed_delta(history_.back()[s], history_[mid][s]);
    const double p1 = *behavior_rates(first).raise_rate, p2 = *behavior_rates(second).raise_rate;
    const double p = (p1 * first.faced + p2 * second.faced) / (first.faced + second.faced);
    const double se = std::sqrt(p * (1 - p) * (1.0 / first.faced + 1.0 / second.faced));
    EXPECT_NEAR(p1, p2, 3.5 * se + 1e-9) << archetype_name(a);
  }
}
