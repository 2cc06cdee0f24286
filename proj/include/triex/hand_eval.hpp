#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "triex/cards.hpp"

namespace triex {

enum class HandCategory : std::uint8_t {
  kHighCard = 0,
  kPair,
  kTwoPair,
  kTrips,
  kStraight,
  kFlush,
  kFullHouse,
  kQuads,
  kStraightFlush,
};

std::string_view category_name(HandCategory c);

// Totally ordered strength of the best five-card hand. Layout: category in
// bits 20..23, then up to five tie-break ranks, four bits each, most
// significant first. Larger is stronger; equal values split the pot.
class HandRank {
 public:
  constexpr HandRank() = default;
  constexpr explicit HandRank(std::uint32_t v) : value_(v) {}

  constexpr std::uint32_t value() const { return value_; }
  constexpr HandCategory category() const { return static_cast<HandCategory>(value_ >> 20); }

  friend constexpr auto operator<=>(HandRank, HandRank) = default;

 private:
  std::uint32_t value_ = 0;
};

// Best five-card rank from 5 to 7 distinct cards. Throws InvalidInput on
// duplicates or a bad card count.
HandRank evaluate_hand(std::span<const Card> cards);

// Unchecked fast path for the equity loops: `cards` must hold 5-7 distinct cards.
HandRank evaluate_unchecked(const Card* cards, int n);

}  // namespace triex
