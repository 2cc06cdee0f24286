#include "triex/hand_eval.hpp"

#include <array>
#include <bit>

#include <fmt/format.h>

namespace triex {
namespace {

constexpr std::uint32_t kRankMaskSize = 1u << 13;

struct Tables {
  // Highest straight card (rank index) for a 13-bit rank mask, or -1.
  std::array<std::int8_t, kRankMaskSize> straight_high{};
  // The five highest ranks of a mask packed as five nibbles.
  std::array<std::uint32_t, kRankMaskSize> top5{};

  Tables() {
    for (std::uint32_t m = 0; m < kRankMaskSize; ++m) {
      std::int8_t high = -1;
      for (int h = 12; h >= 4; --h) {
        const std::uint32_t run = 0x1Fu << (h - 4);
        if ((m & run) == run) {
          high = static_cast<std::int8_t>(h);
          break;
        }
      }
      constexpr std::uint32_t kWheel = (1u << 12) | 0xFu;
      if (high < 0 && (m & kWheel) == kWheel) high = 3;
      straight_high[m] = high;

      std::uint32_t packed = 0;
      int taken = 0;
      for (int r = 12; r >= 0 && taken < 5; --r) {
        if (m & (1u << r)) {
          packed = (packed << 4) | static_cast<std::uint32_t>(r);
          ++taken;
        }
      }
      packed <<= 4 * (5 - taken);
      top5[m] = packed;
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

constexpr std::uint32_t make(HandCategory c, std::uint32_t kickers) {
  return (static_cast<std::uint32_t>(c) << 20) | kickers;
}

// Packs up to n highest ranks of `mask` into the leading nibbles after `lead`.
std::uint32_t kickers(std::uint32_t lead, int lead_count, std::uint32_t mask, int n) {
  std::uint32_t packed = lead;
  int used = lead_count;
  for (int r = 12; r >= 0 && n > 0; --r) {
    if (mask & (1u << r)) {
      packed = (packed << 4) | static_cast<std::uint32_t>(r);
      ++used;
      --n;
    }
  }
  return packed << 4 * (5 - used);
}

}  // namespace

std::string_view category_name(HandCategory c) {
  switch (c) {
    case HandCategory::kHighCard: return "high_card";
    case HandCategory::kPair: return "pair";
    case HandCategory::kTwoPair: return "two_pair";
    case HandCategory::kTrips: return "three_of_a_kind";
    case HandCategory::kStraight: return "straight";
    case HandCategory::kFlush: return "flush";
    case HandCategory::kFullHouse: return "full_house";
    case HandCategory::kQuads: return "four_of_a_kind";
    case HandCategory::kStraightFlush: return "straight_flush";
  }
  return "unknown";
}

HandRank evaluate_unchecked(const Card* cards, int n) {
  const Tables& t = tables();
  std::array<std::uint32_t, 4> suit_mask{};
  std::array<std::uint8_t, 13> count{};
  std::uint32_t ranks = 0;
  for (int i = 0; i < n; ++i) {
    const int r = cards[i].rank();
    suit_mask[static_cast<std::size_t>(cards[i].suit())] |= 1u << r;
    ++count[static_cast<std::size_t>(r)];
    ranks |= 1u << r;
  }

  for (const auto sm : suit_mask) {
    if (std::popcount(sm) >= 5) {
      const int sf = t.straight_high[sm];
      if (sf >= 0) return HandRank(make(HandCategory::kStraightFlush, static_cast<std::uint32_t>(sf) << 16));
      // Seven cards cannot hold a flush together with quads or a full house.
      return HandRank(make(HandCategory::kFlush, t.top5[sm]));
    }
  }

  std::uint32_t quads = 0, trips = 0, pairs = 0;
  for (int r = 0; r < 13; ++r) {
    const auto c = count[static_cast<std::size_t>(r)];
    if (c == 4) quads |= 1u << r;
    else if (c == 3) trips |= 1u << r;
    else if (c == 2) pairs |= 1u << r;
  }

  if (quads) {
    const auto q = static_cast<std::uint32_t>(std::bit_width(quads) - 1);
    return HandRank(make(HandCategory::kQuads, kickers(q, 1, ranks & ~(1u << q), 1)));
  }
  if (trips) {
    const auto top = static_cast<std::uint32_t>(std::bit_width(trips) - 1);
    const std::uint32_t rest = (trips & ~(1u << top)) | pairs;
    if (rest) {
      const auto pair = static_cast<std::uint32_t>(std::bit_width(rest) - 1);
      return HandRank(make(HandCategory::kFullHouse, ((top << 4) | pair) << 12));
    }
  }
  if (const int s = t.straight_high[ranks]; s >= 0) {
    return HandRank(make(HandCategory::kStraight, static_cast<std::uint32_t>(s) << 16));
  }
  if (trips) {
    const auto top = static_cast<std::uint32_t>(std::bit_width(trips) - 1);
    return HandRank(make(HandCategory::kTrips, kickers(top, 1, ranks & ~(1u << top), 2)));
  }
  if (std::popcount(pairs) >= 2) {
    const auto hi = static_cast<std::uint32_t>(std::bit_width(pairs) - 1);
    const std::uint32_t rest = pairs & ~(1u << hi);
    const auto lo = static_cast<std::uint32_t>(std::bit_width(rest) - 1);
    return HandRank(make(HandCategory::kTwoPair,
                         kickers((hi << 4) | lo, 2, ranks & ~((1u << hi) | (1u << lo)), 1)));
  }
  if (pairs) {
    const auto p = static_cast<std::uint32_t>(std::bit_width(pairs) - 1);
    return HandRank(make(HandCategory::kPair, kickers(p, 1, ranks & ~(1u << p), 3)));
  }
  return HandRank(make(HandCategory::kHighCard, t.top5[ranks]));
}

HandRank evaluate_hand(std::span<const Card> cards) {
  if (cards.size() < 5 || cards.size() > 7) {
    throw InvalidInput(fmt::format("hand evaluation needs 5-7 cards, got {}", cards.size()));
  }
  for (const auto& c : cards) {
    if (c.index() < 0 || c.index() >= kDeckSize) throw InvalidInput("card index out of range");
  }
  (void)card_mask(cards);
  return evaluate_unchecked(cards.data(), static_cast<int>(cards.size()));
}

}  // namespace triex
