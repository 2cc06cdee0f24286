#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace triex {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Suit : std::uint8_t { kClubs = 0, kDiamonds = 1, kHearts = 2, kSpades = 3 };

// Card index = rank * 4 + suit, rank 0 = deuce ... 12 = ace, suits ordered
// clubs < diamonds < hearts < spades. Comparison follows the index, i.e. rank
// first and suit as the tie-breaker.
class Card {
 public:
  constexpr Card() = default;
  constexpr explicit Card(int index) : index_(static_cast<std::uint8_t>(index)) {}
  constexpr Card(int rank, Suit suit)
      : index_(static_cast<std::uint8_t>(rank * 4 + static_cast<int>(suit))) {}

  constexpr int index() const { return index_; }
  constexpr int rank() const { return index_ / 4; }
  constexpr Suit suit() const { return static_cast<Suit>(index_ % 4); }

  std::string str() const;
  static Card parse(std::string_view text);

  friend constexpr auto operator<=>(Card, Card) = default;

 private:
  std::uint8_t index_ = 0;
};

inline constexpr int kDeckSize = 52;

using HoleCards = std::array<Card, 2>;

std::vector<Card> parse_cards(std::string_view text);
std::string cards_str(std::span<const Card> cards);

// Bit set of used cards; throws InvalidInput on duplicates.
std::uint64_t card_mask(std::span<const Card> cards);

std::vector<Card> full_deck();

}  // namespace triex
