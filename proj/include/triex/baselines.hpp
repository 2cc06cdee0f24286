#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "triex/features.hpp"
#include "triex/rng.hpp"
#include "triex/table.hpp"

namespace triex {

enum class Archetype : std::uint8_t {
  kLoosePassive = 0,
  kLooseAggressive,
  kManiac,
  kTightPassive,
  kTightAggressive,
};

inline constexpr std::array<Archetype, 5> kAllArchetypes = {
    Archetype::kLoosePassive, Archetype::kLooseAggressive, Archetype::kManiac,
    Archetype::kTightPassive, Archetype::kTightAggressive};

std::string_view archetype_name(Archetype a);
std::optional<Archetype> parse_archetype(std::string_view name);

// Fixed strategy table. Strength is measured as relative equity
// rel = equity * (opponents + 1), i.e. equity over the fair share, so one
// threshold works at any table size. Thresholds are indexed by street.
struct ArchetypeSpec {
  Archetype archetype = Archetype::kTightAggressive;
  std::string name;
  // Realized values at the reference five-seat table (1500 hands, seed 7).
  double vpip_target = 0.0;
  double pfr_target = 0.0;
  double af_target = 0.0;

  std::array<double, 4> continue_rel{};  // facing a bet: keep playing at or above
  std::array<double, 4> value_rel{};     // raise for value at or above
  double value_min_equity = 0.0;         // extra absolute floor for value raises
  double continue_min_equity = 0.0;      // extra absolute floor for continuing

  // Raise probabilities by strength tier: value (>= value_rel), middle
  // (>= continue_rel), and bluff (below continue_rel).
  double value_raise_prob = 0.0;
  double middle_raise_prob = 0.0;
  double bluff_raise_prob = 0.0;

  // Facing a bet below continue_rel: also continue when equity >= pot odds.
  bool calls_with_pot_odds = false;

  // Raise size as a fraction of the pot after calling.
  double raise_pot_fraction = 0.75;
};

ArchetypeSpec default_archetype_spec(Archetype a);

void to_json(nlohmann::json& j, const ArchetypeSpec& s);
void from_json(const nlohmann::json& j, ArchetypeSpec& s);

// Mixing weights over the coarse classes; sum to 1. With no bet faced the
// "call" mass is a check and fold mass is zero.
struct ActionMix {
  double fold = 0.0;
  double call = 0.0;
  double raise = 0.0;
};

ActionMix archetype_mix(const ArchetypeSpec& spec, const ReferenceFeatures& f,
                        const LegalActionSet& legal);

// Raise-to amount for this spec, clipped into the legal range.
Chips archetype_raise_to(const ArchetypeSpec& spec, const ReferenceFeatures& f,
                         const LegalActionSet& legal);

// Samples one action from the mix using exactly one uniform draw.
Action archetype_decide(const ArchetypeSpec& spec, const ReferenceFeatures& f,
                        const LegalActionSet& legal, Rng& rng);

struct ArchetypeSimConfig {
  int hands = 1000;
  Chips stack = 3000;
  Chips small_blind = 5;
  Chips big_blind = 10;
  int mc_simulations = 200;
  std::uint64_t seed = 7;
  FeatureConfig features;
};

// Plays an archetype-only table with stacks reset every hand and the button
// rotating. Returns cumulative stats per seat after every hand:
// result[hand][seat].
std::vector<std::vector<BehaviorStats>> simulate_archetypes(const std::vector<ArchetypeSpec>& seats,
                                                            const ArchetypeSimConfig& cfg);

}  // namespace triex
