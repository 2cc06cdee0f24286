#pragma once

#include <cstdint>
#include <span>

#include "triex/cards.hpp"
#include "triex/rng.hpp"

namespace triex {

enum class Street : std::uint8_t { kPreflop = 0, kFlop = 1, kTurn = 2, kRiver = 3 };

// Monte Carlo share of the pot won by `hole` against `n_opponents` random
// hands, completing the board from the remaining deck. A k-way tie for the
// best hand credits 1/k. Deterministic for a given rng state.
double estimate_equity(const HoleCards& hole, std::span<const Card> board, int n_opponents,
                       int n_sims, Rng& rng);

// Exact pot share against one random opponent by enumerating every opponent
// holding and every board completion. Requires a board of 3-5 cards.
double exact_equity_heads_up(const HoleCards& hole, std::span<const Card> board);

// Simulation budget per street: full budget preflop and on the flop, half on
// the turn, and on the river exact enumeration heads-up (returns 0) or half
// the budget multiway.
int simulations_for_street(Street street, int n_sims, int n_opponents);

// Equity at a decision point using the per-street budget above.
double street_equity(const HoleCards& hole, std::span<const Card> board, int n_opponents,
                     int n_sims, Rng& rng);

}  // namespace triex
