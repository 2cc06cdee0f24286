#include "triex/equity.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include <fmt/format.h>

#include "triex/hand_eval.hpp"

namespace triex {
namespace {

void validate(const HoleCards& hole, std::span<const Card> board, int n_opponents) {
  if (board.size() > 5) throw InvalidInput("board holds more than 5 cards");
  std::vector<Card> all(hole.begin(), hole.end());
  all.insert(all.end(), board.begin(), board.end());
  for (const auto& c : all) {
    if (c.index() < 0 || c.index() >= kDeckSize) throw InvalidInput("card index out of range");
  }
  (void)card_mask(all);
  if (n_opponents < 1) throw InvalidInput("equity needs at least one opponent");
  const int needed = 2 * n_opponents + static_cast<int>(5 - board.size());
  const int left = kDeckSize - static_cast<int>(all.size());
  if (needed > left) {
    throw InvalidInput(fmt::format("impossible deal: need {} cards, {} left", needed, left));
  }
}

std::vector<Card> remaining_deck(const HoleCards& hole, std::span<const Card> board) {
  std::uint64_t used = 0;
  for (const auto& c : hole) used |= 1ULL << c.index();
  for (const auto& c : board) used |= 1ULL << c.index();
  std::vector<Card> deck;
  for (int i = 0; i < kDeckSize; ++i) {
    if (!(used & (1ULL << i))) deck.emplace_back(i);
  }
  return deck;
}

}  // namespace

double estimate_equity(const HoleCards& hole, std::span<const Card> board, int n_opponents,
                       int n_sims, Rng& rng) {
  validate(hole, board, n_opponents);
  if (n_sims < 1) throw InvalidInput("n_sims must be >= 1");

  std::vector<Card> deck = remaining_deck(hole, board);
  const int n_board = static_cast<int>(board.size());
  const int draw = 2 * n_opponents + (5 - n_board);
  const auto deck_n = static_cast<std::uint64_t>(deck.size());

  std::array<Card, 7> hero{};
  std::array<Card, 7> villain{};
  hero[0] = hole[0];
  hero[1] = hole[1];
  for (int i = 0; i < n_board; ++i) hero[static_cast<std::size_t>(2 + i)] = board[static_cast<std::size_t>(i)];

  double credit = 0.0;
  for (int sim = 0; sim < n_sims; ++sim) {
    // Partial Fisher-Yates: the first `draw` slots become the sample.
    for (int i = 0; i < draw; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng.uniform_index(deck_n - static_cast<std::uint64_t>(i));
      std::swap(deck[static_cast<std::size_t>(i)], deck[j]);
    }
    const Card* runout = deck.data() + 2 * n_opponents;
    for (int i = n_board; i < 5; ++i) hero[static_cast<std::size_t>(2 + i)] = runout[i - n_board];
    const HandRank mine = evaluate_unchecked(hero.data(), 7);

    std::copy(hero.begin() + 2, hero.end(), villain.begin() + 2);
    int tied = 1;
    bool lost = false;
    for (int o = 0; o < n_opponents && !lost; ++o) {
      villain[0] = deck[static_cast<std::size_t>(2 * o)];
      villain[1] = deck[static_cast<std::size_t>(2 * o + 1)];
      const HandRank theirs = evaluate_unchecked(villain.data(), 7);
      if (theirs > mine) lost = true;
      else if (theirs == mine) ++tied;
    }
    if (!lost) credit += 1.0 / tied;
  }
  return credit / n_sims;
}

double exact_equity_heads_up(const HoleCards& hole, std::span<const Card> board) {
  validate(hole, board, 1);
  if (board.size() < 3) throw InvalidInput("exact enumeration needs a flop");

  const std::vector<Card> deck = remaining_deck(hole, board);
  const int n = static_cast<int>(deck.size());
  const int missing = 5 - static_cast<int>(board.size());

  std::array<Card, 7> hero{};
  std::array<Card, 7> villain{};
  hero[0] = hole[0];
  hero[1] = hole[1];
  for (std::size_t i = 0; i < board.size(); ++i) hero[2 + i] = board[i];

  double credit = 0.0;
  std::uint64_t trials = 0;
  auto score = [&] {
    std::copy(hero.begin() + 2, hero.end(), villain.begin() + 2);
    const HandRank mine = evaluate_unchecked(hero.data(), 7);
    const HandRank theirs = evaluate_unchecked(villain.data(), 7);
    if (mine > theirs) credit += 1.0;
    else if (mine == theirs) credit += 0.5;
    ++trials;
  };

  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      villain[0] = deck[static_cast<std::size_t>(a)];
      villain[1] = deck[static_cast<std::size_t>(b)];
      auto free_card = [&](int k) { return k != a && k != b; };
      if (missing == 0) {
        score();
      } else if (missing == 1) {
        for (int r = 0; r < n; ++r) {
          if (!free_card(r)) continue;
          hero[6] = deck[static_cast<std::size_t>(r)];
          score();
        }
      } else {
        for (int t = 0; t < n; ++t) {
          if (!free_card(t)) continue;
          for (int r = t + 1; r < n; ++r) {
            if (!free_card(r)) continue;
            hero[5] = deck[static_cast<std::size_t>(t)];
            hero[6] = deck[static_cast<std::size_t>(r)];
            score();
          }
        }
      }
    }
  }
  return credit / static_cast<double>(trials);
}

int simulations_for_street(Street street, int n_sims, int n_opponents) {
  switch (street) {
    case Street::kPreflop:
    case Street::kFlop:
      return n_sims;
    case Street::kTurn:
      return std::max(1, n_sims / 2);
    case Street::kRiver:
      return n_opponents == 1 ? 0 : std::max(1, n_sims / 2);
  }
  return n_sims;
}

double street_equity(const HoleCards& hole, std::span<const Card> board, int n_opponents,
                     int n_sims, Rng& rng) {
  Street street = Street::kPreflop;
  if (board.size() == 3) street = Street::kFlop;
  else if (board.size() == 4) street = Street::kTurn;
  else if (board.size() == 5) street = Street::kRiver;
  const int sims = simulations_for_street(street, n_sims, n_opponents);
  if (sims == 0) return exact_equity_heads_up(hole, board);
  return estimate_equity(hole, board, n_opponents, sims, rng);
}

}  // namespace triex
