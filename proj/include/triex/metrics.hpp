#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "triex/audit.hpp"
#include "triex/beliefs.hpp"
#include "triex/features.hpp"
#include "triex/trace.hpp"

namespace triex {

// Raised when two data sets that must share keys do not.
class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Ranks and correlation

// Ascending ranks starting at 1; ties share the average rank.
std::vector<double> average_ranks(const std::vector<double>& values);

// Empty when either series is constant. Throws InvalidInput when the lengths
// differ or fewer than two points are given.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);
std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y);

// Keyed pairs; a repeated key throws AlignmentError.
class PairedSeries {
 public:
  void add(const std::string& key, double x, double y);
  std::size_t size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::vector<std::string> keys_;
  std::vector<double> x_;
  std::vector<double> y_;
  std::map<std::string, bool> seen_;
};

std::optional<double> spearman(const PairedSeries& pairs);

// Two-sided permutation p-value of Spearman's rho: the share of orderings of
// y whose |rho| reaches the observed |rho|. Exact up to n = 7, otherwise
// 10000 seeded Monte Carlo draws with the add-one correction.
double spearman_p_value(const std::vector<double>& x, const std::vector<double>& y, std::uint64_t seed = 7);

inline constexpr int kExactPermutationMax = 7;
inline constexpr int kMonteCarloPermutations = 10000;

// Weighted kappa with w_ij = (i-j)^2/(k-1)^2 over the ordinal scale [lo, hi].
// Empty when the expected disagreement is zero (degenerate marginals).
std::optional<double> cohens_kappa_quadratic(const std::vector<int>& a, const std::vector<int>& b, int lo = 1,
                                             int hi = 5);
// Joins on the keys present in both maps.
std::optional<double> cohens_kappa_quadratic(const std::map<std::string, int>& a,
                                             const std::map<std::string, int>& b, int lo = 1, int hi = 5);

// ---------------------------------------------------------------------------
// Convergence

// One agent in one battle: believed trait value per opponent after each round.
using BeliefTrajectory = std::vector<std::map<std::string, double>>;

struct ConvergencePoint {
  int round = 0;
  std::optional<double> mean_rho;  // over trajectories with a defined rho
  int used = 0;
  int undefined = 0;  // constant rankings
  int skipped = 0;    // fewer than two reference opponents
};

// Per round, Spearman between believed values and the reference values over
// the opponents present in `reference`, averaged across trajectories.
std::vector<ConvergencePoint> convergence_curve(const std::vector<BeliefTrajectory>& trajectories,
                                                const std::map<std::string, double>& reference);

// Reference trait values from realized behavior counters.
std::map<std::string, double> reference_trait_values(const std::map<std::string, BehaviorStats>& stats, Trait trait);

// ---------------------------------------------------------------------------
// Change rates

enum class CoarseAction : std::uint8_t { kFold = 0, kCall = 1, kRaise = 2 };

CoarseAction coarse_action(ActionKind k);  // CHECK counts as CALL
std::string_view coarse_action_name(CoarseAction a);

using AlignedActions = std::map<std::string, CoarseAction>;  // decision key -> class

// Decision context used by the expected-direction table.
struct ContextBucket {
  bool facing_bet = false;
  bool strong = false;
};

ContextBucket context_bucket(const ReferenceFeatures& f);

// Expected sign of order(after) - order(before) on fold < call < raise when
// the focal agent's belief in `trait` moves in `direction`.
int expected_sign(Trait trait, Direction direction, ContextBucket bucket);

// Share of keys whose class differs. Throws AlignmentError on a key mismatch.
double change_rate(const AlignedActions& a, const AlignedActions& b);

struct ChangeRateSummary {
  std::size_t n = 0;
  double cr_log_reo = 0.0;
  double cr_log_rei = 0.0;
  double cr_reo_rei = 0.0;
  // Class rate under ReI minus class rate under Log.
  double delta_fold = 0.0;
  double delta_call = 0.0;
  double delta_raise = 0.0;
  std::size_t changed = 0;  // ReO -> ReI changes
  std::size_t consistent = 0;
  std::optional<double> directional_consistency;  // empty with no changes
};

// `contexts` must cover every key.
ChangeRateSummary change_rates(const AlignedActions& log, const AlignedActions& reo, const AlignedActions& rei,
                               const std::map<std::string, ContextBucket>& contexts, const InterventionSpec& spec);

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;  // sample variance; 0 for a single run
  std::size_t n = 0;
};

MeanVar mean_var(const std::vector<double>& values);

struct ChangeRateAggregate {
  std::size_t runs = 0;
  MeanVar cr_log_reo, cr_log_rei, cr_reo_rei;
  MeanVar delta_fold, delta_call, delta_raise;
  MeanVar directional_consistency;  // over runs where it is defined
};

ChangeRateAggregate aggregate_change_rates(const std::vector<ChangeRateSummary>& runs);

void to_json(nlohmann::json& j, const ChangeRateSummary& s);
void from_json(const nlohmann::json& j, ChangeRateSummary& s);
void to_json(nlohmann::json& j, const MeanVar& m);
void to_json(nlohmann::json& j, const ChangeRateAggregate& a);

// ---------------------------------------------------------------------------
// Trait-proxy alignment

inline constexpr std::array<std::string_view, 10> kProxyNames = {
    "vpip_proxy",         "pfr",      "aggression_factor", "fold_rate",     "call_rate",
    "raise_rate",         "call_to_fold_ratio", "bluff_attempt_rate", "bluff_success_rate", "showdown_rate"};

std::optional<double> proxy_value(const BehaviorStats& stats, std::string_view proxy);

struct ProxyAlignment {
  Trait trait = Trait::kAggressiveness;
  std::string proxy;
  double rho = 0.0;
  double p_value = 1.0;
  int n = 0;
  std::vector<std::string> skipped;  // undefined or constant proxies
};

// Best proxy by |rho| per trait (ties keep the earlier proxy). Throws
// InvalidInput with fewer than four opponents.
std::vector<ProxyAlignment> trait_proxy_alignment(const std::map<std::string, TraitVector>& profiles,
                                                  const std::map<std::string, BehaviorStats>& stats,
                                                  std::uint64_t seed = 7);

void to_json(nlohmann::json& j, const ProxyAlignment& a);

// ---------------------------------------------------------------------------
// First-person faithfulness tables

// One audited LLM decision joined with its audits.
struct AuditedRow {
  std::string key;
  std::string model;
  Street street = Street::kPreflop;
  bool high_risk = false;
  HandStrength bucket = HandStrength::kWeak;
  CoarseAction action = CoarseAction::kCall;
  std::optional<int> rule_score;
  std::optional<bool> rule_rationalized;
  std::optional<double> oracle_score;  // mean over the joined oracles
  std::optional<bool> oracle_rationalized;
  std::optional<OutcomeLabel> outcome;
};

// Joins rule and first-person oracle records to executed LLM rows; rows
// without any usable audit stay in with an empty outcome. `oracle` restricts
// to one oracle model; otherwise oracle judgments are pooled: mean overall
// score, majority rationalization vote. Records whose key has no row, and
// duplicate records, throw AlignmentError.
std::vector<AuditedRow> join_audits(const std::vector<DecisionTrace>& rows, const std::vector<AuditRecord>& records,
                                    const std::optional<std::string>& oracle = std::nullopt);

enum class Stratum : std::uint8_t { kAll, kStreet, kRisk, kModel, kBucket, kAction };

std::string_view stratum_name(Stratum s);
std::optional<Stratum> parse_stratum(std::string_view s);

struct StratumStats {
  std::string group;
  std::size_t n = 0;
  std::optional<double> mean_rule;
  std::optional<double> mean_oracle;
  std::optional<double> rat_rule;    // rationalized share among rule-audited rows
  std::optional<double> rat_oracle;  // oracle overall <= 2 or "yes" among oracle-audited rows
  std::optional<double> rho;         // Spearman(rule, oracle) over rows with both
  std::optional<double> high_risk_share;
  double frequency = 0.0;  // n over all rows
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;
  std::map<OutcomeLabel, double> outcome_shares;  // over labeled rows; sums to 1
};

// Street, risk, bucket and action strata list every group, empty ones with
// n = 0; model strata list the models present.
std::vector<StratumStats> stratified_summary(const std::vector<AuditedRow>& rows, Stratum stratum);

void to_json(nlohmann::json& j, const StratumStats& s);

// Outcome shares per street, normalized within each model and then averaged
// across models with equal weight.
std::map<Street, std::map<OutcomeLabel, double>> outcome_distribution(const std::vector<AuditedRow>& rows);

// ---------------------------------------------------------------------------
// Cross-oracle agreement

enum class OracleDimension : std::uint8_t { kOverall, kHand, kRisk, kGoal, kProfile };

std::string_view oracle_dimension_name(OracleDimension d);
int oracle_dimension_score(const OracleReport& r, OracleDimension d);

struct OracleMatrix {
  std::vector<std::string> oracles;
  std::vector<std::vector<std::optional<double>>> values;  // symmetric
  std::vector<std::vector<std::size_t>> support;           // shared keys
};

// Pairwise quadratic kappa, or Spearman when `use_spearman`, over the keys
// both oracles audited.
OracleMatrix oracle_agreement(const std::vector<AuditRecord>& records, OracleDimension dim, bool use_spearman);

void to_json(nlohmann::json& j, const OracleMatrix& m);

// ---------------------------------------------------------------------------
// Second-person audit summary

// Sum over opponents of |profile rank - objective rank|.
double ranking_discrepancy(const std::map<std::string, double>& profile, const std::map<std::string, double>& objective);

struct SecondPersonSummary {
  std::string oracle;
  std::string trait;  // trait key or "overall"
  std::size_t n = 0;
  std::optional<double> rho;       // Spearman(align_score, -discrepancy)
  std::optional<double> accuracy;  // mean directional accuracy
};

std::vector<SecondPersonSummary> second_person_summary(const std::vector<SecondPersonRecord>& records);

void to_json(nlohmann::json& j, const SecondPersonSummary& s);

// ---------------------------------------------------------------------------
// Radar

// Rank-percentile per dimension across models: (average rank - 1)/(n - 1),
// 0.5 for a single model or a full tie. Dimensions named in `inverted` are
// flipped (1 - p). Models lacking a dimension are ranked without it.
std::map<std::string, std::map<std::string, double>> radar_dimensions(
    const std::map<std::string, std::map<std::string, double>>& per_model, const std::vector<std::string>& inverted = {});

}  // namespace triex
