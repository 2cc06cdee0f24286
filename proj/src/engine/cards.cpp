#include "triex/cards.hpp"

#include <cctype>

#include <fmt/format.h>

namespace triex {
namespace {

constexpr std::string_view kRanks = "23456789TJQKA";
constexpr std::string_view kSuits = "cdhs";

}  // namespace

std::string Card::str() const {
  return {kRanks[static_cast<std::size_t>(rank())], kSuits[index_ % 4]};
}

Card Card::parse(std::string_view text) {
  if (text.size() != 2) throw InvalidInput(fmt::format("bad card '{}'", text));
  const auto r = kRanks.find(static_cast<char>(std::toupper(static_cast<unsigned char>(text[0]))));
  const auto s = kSuits.find(static_cast<char>(std::tolower(static_cast<unsigned char>(text[1]))));
  if (r == std::string_view::npos || s == std::string_view::npos) {
    throw InvalidInput(fmt::format("bad card '{}'", text));
  }
  return Card(static_cast<int>(r), static_cast<Suit>(s));
}

std::vector<Card> parse_cards(std::string_view text) {
  std::vector<Card> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',') {
      ++i;
      continue;
    }
    if (i + 2 > text.size()) throw InvalidInput(fmt::format("bad card list '{}'", text));
    out.push_back(Card::parse(text.substr(i, 2)));
    i += 2;
  }
  return out;
}

std::string cards_str(std::span<const Card> cards) {
  std::string out;
  for (const auto& c : cards) {
    if (!out.empty()) out += ' ';
    out += c.str();
  }
  return out;
}

std::uint64_t card_mask(std::span<const Card> cards) {
  std::uint64_t mask = 0;
  for (const auto& c : cards) {
    const std::uint64_t bit = 1ULL << c.index();
    if (mask & bit) throw InvalidInput(fmt::format("duplicate card {}", c.str()));
    mask |= bit;
  }
  return mask;
}

std::vector<Card> full_deck() {
  std::vector<Card> deck;
  deck.reserve(kDeckSize);
  for (int i = 0; i < kDeckSize; ++i) deck.emplace_back(i);
  return deck;
}

}  // namespace triex
