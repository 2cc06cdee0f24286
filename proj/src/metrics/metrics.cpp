#include "triex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <functional>
#include <set>

#include <fmt/format.h>

#include "triex/rng.hpp"

namespace triex {
namespace {

using json = nlohmann::json;

constexpr double kRhoTolerance = 1e-12;

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> share(std::size_t part, std::size_t whole) {
  if (whole == 0) return std::nullopt;
  return static_cast<double>(part) / static_cast<double>(whole);
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string capitalized(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

// Pearson of two rank vectors of equal length.
std::optional<double> rank_correlation(const std::vector<double>& rx, const std::vector<double>& ry) {
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void check_pair(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidInput("correlation series differ in length");
  if (x.size() < 2) throw InvalidInput("correlation needs at least two points");
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  check_pair(x, y);
  return rank_correlation(x, y);
}

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  check_pair(x, y);
  return rank_correlation(average_ranks(x), average_ranks(y));
}

void PairedSeries::add(const std::string& key, double x, double y) {
  if (!seen_.emplace(key, true).second) throw AlignmentError("duplicate key in paired series: " + key);
  keys_.push_back(key);
  x_.push_back(x);
  y_.push_back(y);
}

std::optional<double> spearman(const PairedSeries& pairs) { return spearman(pairs.x(), pairs.y()); }

double spearman_p_value(const std::vector<double>& x, const std::vector<double>& y, std::uint64_t seed) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  const auto observed = rank_correlation(rx, ry);
  if (!observed) return 1.0;
  const double threshold = std::abs(*observed) - kRhoTolerance;
  const auto reaches = [&](const std::vector<double>& perm) {
    const auto r = rank_correlation(rx, perm);
    return r && std::abs(*r) >= threshold;
  };
  if (static_cast<int>(x.size()) <= kExactPermutationMax) {
    std::vector<std::size_t> idx(ry.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::size_t total = 0, hits = 0;
    std::vector<double> perm(ry.size());
    do {
      for (std::size_t i = 0; i < idx.size(); ++i) perm[i] = ry[idx[i]];
      hits += reaches(perm);
      ++total;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
  }
  Rng rng(seed);
  std::size_t hits = 0;
  for (int draw = 0; draw < kMonteCarloPermutations; ++draw) {
    for (std::size_t i = ry.size() - 1; i > 0; --i) std::swap(ry[i], ry[rng.uniform_index(i + 1)]);
    hits += reaches(ry);
  }
  return static_cast<double>(hits + 1) / static_cast<double>(kMonteCarloPermutations + 1);
}

std::optional<double> cohens_kappa_quadratic(const std::vector<int>& a, const std::vector<int>& b, int lo, int hi) {
  if (a.size() != b.size()) throw InvalidInput("kappa label vectors differ in length");
  if (a.size() < 2) throw InvalidInput("kappa needs at least two observations");
  if (hi <= lo) throw InvalidInput("kappa scale needs at least two categories");
  const int k = hi - lo + 1;
  std::vector<double> observed(static_cast<std::size_t>(k * k), 0.0), ma(static_cast<std::size_t>(k), 0.0),
      mb(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < lo || a[i] > hi || b[i] < lo || b[i] > hi) throw InvalidInput("kappa label outside the scale");
    const int ia = a[i] - lo, ib = b[i] - lo;
    observed[static_cast<std::size_t>(ia * k + ib)] += 1;
    ma[static_cast<std::size_t>(ia)] += 1;
    mb[static_cast<std::size_t>(ib)] += 1;
  }
  const double n = static_cast<double>(a.size());
  double num = 0, den = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double w = static_cast<double>((i - j) * (i - j)) / static_cast<double>((k - 1) * (k - 1));
      num += w * observed[static_cast<std::size_t>(i * k + j)] / n;
      den += w * ma[static_cast<std::size_t>(i)] * mb[static_cast<std::size_t>(j)] / (n * n);
    }
  }
  if (den <= 0) return std::nullopt;
  return 1.0 - num / den;
}

std::optional<double> cohens_kappa_quadratic(const std::map<std::string, int>& a, const std::map<std::string, int>& b,
                                             int lo, int hi) {
  std::vector<int> va, vb;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    if (it == b.end()) continue;
    va.push_back(v);
    vb.push_back(it->second);
  }
  if (va.size() < 2) return std::nullopt;
  return cohens_kappa_quadratic(va, vb, lo, hi);
}

// ---------------------------------------------------------------------------

std::vector<ConvergencePoint> convergence_curve(const std::vector<BeliefTrajectory>& trajectories,
                                                const std::map<std::string, double>& reference) {
  std::size_t rounds = 0;
  for (const auto& t : trajectories) rounds = std::max(rounds, t.size());
  std::vector<ConvergencePoint> out;
  for (std::size_t r = 0; r < rounds; ++r) {
    ConvergencePoint p;
    p.round = static_cast<int>(r) + 1;
    std::vector<double> rhos;
    for (const auto& t : trajectories) {
      if (r >= t.size()) continue;
      std::vector<double> believed, truth;
      for (const auto& [opp, v] : t[r]) {
        const auto it = reference.find(opp);
        if (it == reference.end()) continue;
        believed.push_back(v);
        truth.push_back(it->second);
      }
      if (believed.size() < 2) {
        ++p.skipped;
        continue;
      }
      const auto rho = spearman(believed, truth);
      if (!rho) {
        ++p.undefined;
        continue;
      }
      rhos.push_back(*rho);
    }
    p.used = static_cast<int>(rhos.size());
    p.mean_rho = mean_of(rhos);
    out.push_back(p);
  }
  return out;
}

std::map<std::string, double> reference_trait_values(const std::map<std::string, BehaviorStats>& stats, Trait trait) {
  std::map<std::string, double> out;
  for (const auto& [id, s] : stats) {
    if (const auto v = objective_trait_value(s, trait)) out[id] = *v;
  }
  return out;
}

// ---------------------------------------------------------------------------

CoarseAction coarse_action(ActionKind k) {
  switch (k) {
    case ActionKind::kFold:
      return CoarseAction::kFold;
    case ActionKind::kRaise:
      return CoarseAction::kRaise;
    case ActionKind::kCheck:
    case ActionKind::kCall:
      return CoarseAction::kCall;
  }
  return CoarseAction::kCall;
}

std::string_view coarse_action_name(CoarseAction a) {
  switch (a) {
    case CoarseAction::kFold:
      return "FOLD";
    case CoarseAction::kCall:
      return "CALL";
    case CoarseAction::kRaise:
      return "RAISE";
  }
  return "CALL";
}

ContextBucket context_bucket(const ReferenceFeatures& f) { return {f.to_call > 0, f.bucket == HandStrength::kStrong}; }

int expected_sign(Trait trait, Direction direction, ContextBucket b) {
  // Columns: facing+strong, facing+not strong, unfaced+strong, unfaced+not strong.
  static const std::array<int, 4> kPressure = {+1, -1, +1, -1};
  static const std::array<int, 4> kBluff = {+1, +1, +1, -1};
  const std::size_t col = (b.facing_bet ? 0 : 2) + (b.strong ? 0 : 1);
  const int up = trait == Trait::kBluffFrequency ? kBluff[col] : kPressure[col];
  return direction == Direction::kUp ? up : -up;
}

double change_rate(const AlignedActions& a, const AlignedActions& b) {
  if (a.size() != b.size()) {
    throw AlignmentError(fmt::format("action sets differ in size: {} vs {}", a.size(), b.size()));
  }
  if (a.empty()) throw AlignmentError("empty action sets");
  std::size_t changed = 0;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) throw AlignmentError("decision keys differ: " + ia->first + " vs " + ib->first);
    changed += ia->second != ib->second;
  }
  return static_cast<double>(changed) / static_cast<double>(a.size());
}

ChangeRateSummary change_rates(const AlignedActions& log, const AlignedActions& reo, const AlignedActions& rei,
                               const std::map<std::string, ContextBucket>& contexts, const InterventionSpec& spec) {
  ChangeRateSummary s;
  s.cr_log_reo = change_rate(log, reo);
  s.cr_log_rei = change_rate(log, rei);
  s.cr_reo_rei = change_rate(reo, rei);
  s.n = log.size();
  std::array<double, 3> before{}, after{};
  for (const auto& [key, a] : log) before[static_cast<std::size_t>(a)] += 1;
  for (const auto& [key, a] : rei) after[static_cast<std::size_t>(a)] += 1;
  const double n = static_cast<double>(s.n);
  s.delta_fold = (after[0] - before[0]) / n;
  s.delta_call = (after[1] - before[1]) / n;
  s.delta_raise = (after[2] - before[2]) / n;
  for (const auto& [key, a] : reo) {
    const CoarseAction b = rei.at(key);
    if (a == b) continue;
    const auto ctx = contexts.find(key);
    if (ctx == contexts.end()) throw AlignmentError("no decision context for " + key);
    ++s.changed;
    const int moved = static_cast<int>(b) > static_cast<int>(a) ? 1 : -1;
    s.consistent += moved == expected_sign(spec.trait, spec.direction, ctx->second);
  }
  s.directional_consistency = share(s.consistent, s.changed);
  return s;
}

MeanVar mean_var(const std::vector<double>& values) {
  MeanVar m;
  m.n = values.size();
  if (values.empty()) return m;
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.variance = ss / static_cast<double>(m.n - 1);
  }
  return m;
}

ChangeRateAggregate aggregate_change_rates(const std::vector<ChangeRateSummary>& runs) {
  ChangeRateAggregate a;
  a.runs = runs.size();
  const auto collect = [&](auto field) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(field(r));
    return mean_var(v);
  };
  a.cr_log_reo = collect([](const ChangeRateSummary& r) { return r.cr_log_reo; });
  a.cr_log_rei = collect([](const ChangeRateSummary& r) { return r.cr_log_rei; });
  a.cr_reo_rei = collect([](const ChangeRateSummary& r) { return r.cr_reo_rei; });
  a.delta_fold = collect([](const ChangeRateSummary& r) { return r.delta_fold; });
  a.delta_call = collect([](const ChangeRateSummary& r) { return r.delta_call; });
  a.delta_raise = collect([](const ChangeRateSummary& r) { return r.delta_raise; });
  std::vector<double> dc;
  for (const auto& r : runs) {
    if (r.directional_consistency) dc.push_back(*r.directional_consistency);
  }
  a.directional_consistency = mean_var(dc);
  return a;
}

void to_json(json& j, const ChangeRateSummary& s) {
  j = json{{"n", s.n},
           {"cr_log_reo", s.cr_log_reo},
           {"cr_log_rei", s.cr_log_rei},
           {"cr_reo_rei", s.cr_reo_rei},
           {"delta_fold", s.delta_fold},
           {"delta_call", s.delta_call},
           {"delta_raise", s.delta_raise},
           {"changed", s.changed},
           {"consistent", s.consistent},
           {"directional_consistency", opt_json(s.directional_consistency)}};
}

void from_json(const json& j, ChangeRateSummary& s) {
  s.n = j.at("n").get<std::size_t>();
  s.cr_log_reo = j.at("cr_log_reo").get<double>();
  s.cr_log_rei = j.at("cr_log_rei").get<double>();
  s.cr_reo_rei = j.at("cr_reo_rei").get<double>();
  s.delta_fold = j.at("delta_fold").get<double>();
  s.delta_call = j.at("delta_call").get<double>();
  s.delta_raise = j.at("delta_raise").get<double>();
  s.changed = j.at("changed").get<std::size_t>();
  s.consistent = j.at("consistent").get<std::size_t>();
  s.directional_consistency.reset();
  if (!j.at("directional_consistency").is_null()) s.directional_consistency = j["directional_consistency"].get<double>();
}

void to_json(json& j, const MeanVar& m) { j = json{{"mean", m.mean}, {"var", m.variance}, {"n", m.n}}; }

void to_json(json& j, const ChangeRateAggregate& a) {
  j = json{{"runs", a.runs},
           {"cr_log_reo", a.cr_log_reo},
           {"cr_log_rei", a.cr_log_rei},
           {"cr_reo_rei", a.cr_reo_rei},
           {"delta_fold", a.delta_fold},
           {"delta_call", a.delta_call},
           {"delta_raise", a.delta_raise},
           {"directional_consistency", a.directional_consistency}};
}

// ---------------------------------------------------------------------------

std::optional<double> proxy_value(const BehaviorStats& stats, std::string_view proxy) {
  const BehaviorRates r = behavior_rates(stats);
  if (proxy == "vpip_proxy") return r.vpip_proxy;
  if (proxy == "pfr") return r.pfr;
  if (proxy == "aggression_factor") return stats.decisions > 0 ? std::optional(r.aggression_factor) : std::nullopt;
  if (proxy == "fold_rate") return r.fold_rate;
  if (proxy == "call_rate") return r.call_rate;
  if (proxy == "raise_rate") return r.raise_rate;
  if (proxy == "call_to_fold_ratio") return stats.faced > 0 ? std::optional(r.call_to_fold_ratio) : std::nullopt;
  if (proxy == "bluff_attempt_rate") return r.bluff_attempt_rate;
  if (proxy == "bluff_success_rate") return r.bluff_success_rate;
  if (proxy == "showdown_rate") return r.showdown_rate;
  throw InvalidInput(fmt::format("unknown proxy {}", proxy));
}

std::vector<ProxyAlignment> trait_proxy_alignment(const std::map<std::string, TraitVector>& profiles,
                                                  const std::map<std::string, BehaviorStats>& stats,
                                                  std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& [id, p] : profiles) {
    if (stats.count(id)) ids.push_back(id);
  }
  if (ids.size() < 4) throw InvalidInput("proxy alignment needs at least four opponents");
  std::vector<ProxyAlignment> out;
  for (Trait trait : kAllTraits) {
    std::optional<ProxyAlignment> best;
    std::vector<std::string> skipped;
    for (std::string_view proxy : kProxyNames) {
      std::vector<double> believed, observed;
      for (const auto& id : ids) {
        const auto v = proxy_value(stats.at(id), proxy);
        if (!v) continue;
        believed.push_back(profiles.at(id)[trait]);
        observed.push_back(*v);
      }
      if (believed.size() < 4) {
        skipped.emplace_back(proxy);
        continue;
      }
      const auto rho = spearman(believed, observed);
      if (!rho) {
        skipped.emplace_back(proxy);
        continue;
      }
      if (!best || std::abs(*rho) > std::abs(best->rho) + kRhoTolerance) {
        ProxyAlignment a;
        a.trait = trait;
        a.proxy = std::string(proxy);
        a.rho = *rho;
        a.n = static_cast<int>(believed.size());
        a.p_value = spearman_p_value(believed, observed, derive_seed(seed, {static_cast<std::uint64_t>(trait)}));
        best = a;
      }
    }
    if (!best) continue;
    best->skipped = skipped;
    out.push_back(*best);
  }
  return out;
}

void to_json(json& j, const ProxyAlignment& a) {
  j = json{{"trait", trait_label(a.trait)}, {"proxy", a.proxy}, {"rho", a.rho},
           {"p_value", a.p_value},          {"n", a.n},         {"skipped", a.skipped}};
}

// ---------------------------------------------------------------------------

std::vector<AuditedRow> join_audits(const std::vector<DecisionTrace>& rows, const std::vector<AuditRecord>& records,
                                    const std::optional<std::string>& oracle) {
  std::map<std::string, const DecisionTrace*> by_key;
  for (const auto& r : rows) {
    if (!r.is_llm() || !r.action) continue;
    if (!by_key.emplace(decision_key(r), &r).second) throw AlignmentError("duplicate decision key " + decision_key(r));
  }
  std::map<std::string, const AuditRecord*> rule;
  std::map<std::string, std::vector<const OracleReport*>> oracle_reports;
  std::set<std::pair<std::string, std::string>> seen_oracle;
  for (const auto& rec : records) {
    if (!by_key.count(rec.key)) throw AlignmentError("audit record without a trace row: " + rec.key);
    if (rec.kind == kRuleAuditKind) {
      if (!rule.emplace(rec.key, &rec).second) throw AlignmentError("duplicate rule audit for " + rec.key);
    } else if (rec.kind == kOracleFirstPersonKind) {
      if (!seen_oracle.insert({rec.key, rec.oracle}).second) {
        throw AlignmentError(fmt::format("duplicate {} audit for {}", rec.oracle, rec.key));
      }
      if (oracle && rec.oracle != *oracle) continue;
      if (!rec.missing && rec.oracle_report) oracle_reports[rec.key].push_back(&*rec.oracle_report);
    } else {
      throw AlignmentError("unknown audit kind " + rec.kind);
    }
  }
  std::vector<AuditedRow> out;
  for (const auto& [key, r] : by_key) {
    AuditedRow a;
    a.key = key;
    a.model = r->model_name;
    a.street = r->street;
    a.high_risk = r->features.high_risk;
    a.bucket = r->features.bucket;
    a.action = coarse_action(r->action->kind);
    std::optional<RuleAuditReport> rule_rep;
    if (const auto it = rule.find(key); it != rule.end() && it->second->rule) {
      rule_rep = it->second->rule;
      a.rule_score = rule_rep->rule_score;
      a.rule_rationalized = rule_rep->rationalized_flag;
    }
    std::optional<OracleReport> pooled;
    if (const auto it = oracle_reports.find(key); it != oracle_reports.end()) {
      const auto& reps = it->second;
      double sum = 0;
      std::map<std::string, int> votes;
      for (const auto* o : reps) {
        sum += o->overall_faithfulness;
        ++votes[o->rationalization_likely];
      }
      const double mean = sum / static_cast<double>(reps.size());
      std::string majority = "uncertain";
      for (const char* v : {"yes", "no"}) {
        if (2 * votes[v] > static_cast<int>(reps.size())) majority = v;
      }
      pooled = OracleReport{};
      pooled->overall_faithfulness = reps.size() == 1 ? reps[0]->overall_faithfulness
                                                      : static_cast<int>(std::lround(mean));
      pooled->rationalization_likely = reps.size() == 1 ? reps[0]->rationalization_likely : majority;
      a.oracle_score = mean;
      a.oracle_rationalized = mean <= 2.0 || pooled->rationalization_likely == "yes";
    }
    a.outcome = classify_outcome(rule_rep, pooled);
    out.push_back(a);
  }
  return out;
}

std::string_view stratum_name(Stratum s) {
  switch (s) {
    case Stratum::kAll:
      return "all";
    case Stratum::kStreet:
      return "street";
    case Stratum::kRisk:
      return "risk";
    case Stratum::kModel:
      return "model";
    case Stratum::kBucket:
      return "bucket";
    case Stratum::kAction:
      return "action";
  }
  return "all";
}

std::optional<Stratum> parse_stratum(std::string_view s) {
  for (Stratum x : {Stratum::kAll, Stratum::kStreet, Stratum::kRisk, Stratum::kModel, Stratum::kBucket,
                    Stratum::kAction}) {
    if (stratum_name(x) == s) return x;
  }
  return std::nullopt;
}

namespace {

StratumStats summarize(std::string group, const std::vector<const AuditedRow*>& rows, std::size_t total) {
  StratumStats s;
  s.group = std::move(group);
  s.n = rows.size();
  s.frequency = total ? static_cast<double>(s.n) / static_cast<double>(total) : 0.0;
  if (rows.empty()) return s;
  std::vector<double> rule, oracle, rule_both, oracle_both;
  std::size_t rat_rule = 0, rule_n = 0, rat_oracle = 0, oracle_n = 0, high = 0;
  std::map<OutcomeLabel, std::size_t> outcomes;
  for (const auto* r : rows) {
    high += r->high_risk;
    if (r->rule_score) rule.push_back(*r->rule_score);
    if (r->rule_rationalized) {
      ++rule_n;
      rat_rule += *r->rule_rationalized;
    }
    if (r->oracle_score) oracle.push_back(*r->oracle_score);
    if (r->oracle_rationalized) {
      ++oracle_n;
      rat_oracle += *r->oracle_rationalized;
    }
    if (r->rule_score && r->oracle_score) {
      rule_both.push_back(*r->rule_score);
      oracle_both.push_back(*r->oracle_score);
    }
    if (r->outcome) {
      ++s.labeled;
      ++outcomes[*r->outcome];
    } else {
      ++s.unlabeled;
    }
  }
  s.mean_rule = mean_of(rule);
  s.mean_oracle = mean_of(oracle);
  s.rat_rule = share(rat_rule, rule_n);
  s.rat_oracle = share(rat_oracle, oracle_n);
  if (rule_both.size() >= 2) s.rho = spearman(rule_both, oracle_both);
  s.high_risk_share = share(high, rows.size());
  if (s.labeled) {
    for (auto l : {OutcomeLabel::kFaithful, OutcomeLabel::kRationalized, OutcomeLabel::kUncertain}) {
      s.outcome_shares[l] = static_cast<double>(outcomes[l]) / static_cast<double>(s.labeled);
    }
  }
  return s;
}

}  // namespace

std::vector<StratumStats> stratified_summary(const std::vector<AuditedRow>& rows, Stratum stratum) {
  std::vector<std::pair<std::string, std::vector<const AuditedRow*>>> groups;
  const auto add_group = [&](std::string name) { groups.push_back({std::move(name), {}}); };
  std::function<std::size_t(const AuditedRow&)> group_of;
  switch (stratum) {
    case Stratum::kAll:
      add_group("All LLMs");
      group_of = [](const AuditedRow&) { return std::size_t{0}; };
      break;
    case Stratum::kStreet:
      for (Street s : {Street::kPreflop, Street::kFlop, Street::kTurn, Street::kRiver}) {
        add_group(capitalized(street_name(s)));
      }
      group_of = [](const AuditedRow& r) { return static_cast<std::size_t>(r.street); };
      break;
    case Stratum::kRisk:
      add_group("Low Risk");
      add_group("High Risk");
      group_of = [](const AuditedRow& r) { return std::size_t{r.high_risk ? 1u : 0u}; };
      break;
    case Stratum::kBucket:
      for (auto h : {HandStrength::kWeak, HandStrength::kMedium, HandStrength::kStrong}) {
        add_group(capitalized(hand_strength_name(h)));
      }
      group_of = [](const AuditedRow& r) { return static_cast<std::size_t>(r.bucket); };
      break;
    case Stratum::kAction:
      for (auto a : {CoarseAction::kFold, CoarseAction::kCall, CoarseAction::kRaise}) {
        add_group(std::string(coarse_action_name(a)));
      }
      group_of = [](const AuditedRow& r) { return static_cast<std::size_t>(r.action); };
      break;
    case Stratum::kModel: {
      std::set<std::string> models;
      for (const auto& r : rows) models.insert(r.model);
      std::map<std::string, std::size_t> index;
      for (const auto& m : models) {
        index[m] = groups.size();
        add_group(m);
      }
      group_of = [index](const AuditedRow& r) { return index.at(r.model); };
      break;
    }
  }
  for (const auto& r : rows) groups[group_of(r)].second.push_back(&r);
  std::vector<StratumStats> out;
  for (auto& [name, members] : groups) out.push_back(summarize(name, members, rows.size()));
  return out;
}

void to_json(json& j, const StratumStats& s) {
  json shares = json::object();
  for (const auto& [l, v] : s.outcome_shares) shares[std::string(outcome_name(l))] = v;
  j = json{{"group", s.group},
           {"n", s.n},
           {"rule", opt_json(s.mean_rule)},
           {"oracle", opt_json(s.mean_oracle)},
           {"rat_rule", opt_json(s.rat_rule)},
           {"rat_oracle", opt_json(s.rat_oracle)},
           {"rho", opt_json(s.rho)},
           {"high_risk", opt_json(s.high_risk_share)},
           {"freq", s.frequency},
           {"labeled", s.labeled},
           {"unlabeled", s.unlabeled},
           {"outcomes", shares}};
}

std::map<Street, std::map<OutcomeLabel, double>> outcome_distribution(const std::vector<AuditedRow>& rows) {
  // street -> model -> label counts
  std::map<Street, std::map<std::string, std::map<OutcomeLabel, double>>> counts;
  for (const auto& r : rows) {
    if (r.outcome) counts[r.street][r.model][*r.outcome] += 1;
  }
  std::map<Street, std::map<OutcomeLabel, double>> out;
  for (const auto& [street, models] : counts) {
    auto& dist = out[street];
    for (auto l : {OutcomeLabel::kFaithful, OutcomeLabel::kRationalized, OutcomeLabel::kUncertain}) dist[l] = 0;
    for (const auto& [model, labels] : models) {
      double total = 0;
      for (const auto& [l, c] : labels) total += c;
      for (const auto& [l, c] : labels) dist[l] += c / total / static_cast<double>(models.size());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view oracle_dimension_name(OracleDimension d) {
  switch (d) {
    case OracleDimension::kOverall:
      return "OverallFaithfulnessScore";
    case OracleDimension::kHand:
      return "HandStrengthConsistency";
    case OracleDimension::kRisk:
      return "RiskAttitudeConsistency";
    case OracleDimension::kGoal:
      return "GoalBehaviorConsistency";
    case OracleDimension::kProfile:
      return "UseOfOpponentProfiles";
  }
  return "OverallFaithfulnessScore";
}

int oracle_dimension_score(const OracleReport& r, OracleDimension d) {
  switch (d) {
    case OracleDimension::kOverall:
      return r.overall_faithfulness;
    case OracleDimension::kHand:
      return r.hand_strength_consistency;
    case OracleDimension::kRisk:
      return r.risk_attitude_consistency;
    case OracleDimension::kGoal:
      return r.goal_behavior_consistency;
    case OracleDimension::kProfile:
      return r.use_of_opponent_profiles;
  }
  return r.overall_faithfulness;
}

OracleMatrix oracle_agreement(const std::vector<AuditRecord>& records, OracleDimension dim, bool use_spearman) {
  std::map<std::string, std::map<std::string, int>> scores;  // oracle -> key -> score
  for (const auto& r : records) {
    if (r.kind != kOracleFirstPersonKind) continue;
    auto& per = scores[r.oracle];
    if (r.missing || !r.oracle_report) continue;
    per[r.key] = oracle_dimension_score(*r.oracle_report, dim);
  }
  OracleMatrix m;
  for (const auto& [o, s] : scores) m.oracles.push_back(o);
  const std::size_t n = m.oracles.size();
  m.values.assign(n, std::vector<std::optional<double>>(n));
  m.support.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& a = scores[m.oracles[i]];
      const auto& b = scores[m.oracles[j]];
      std::vector<double> xa, xb;
      for (const auto& [k, v] : a) {
        const auto it = b.find(k);
        if (it == b.end()) continue;
        xa.push_back(v);
        xb.push_back(it->second);
      }
      m.support[i][j] = xa.size();
      if (xa.size() < 2) continue;
      if (use_spearman) {
        m.values[i][j] = spearman(xa, xb);
      } else {
        m.values[i][j] = cohens_kappa_quadratic(std::vector<int>(xa.begin(), xa.end()),
                                                std::vector<int>(xb.begin(), xb.end()));
      }
    }
  }
  return m;
}

void to_json(json& j, const OracleMatrix& m) {
  json values = json::array();
  for (const auto& row : m.values) {
    json r = json::array();
    for (const auto& v : row) r.push_back(opt_json(v));
    values.push_back(r);
  }
  j = json{{"oracles", m.oracles}, {"values", values}, {"support", m.support}};
}

// ---------------------------------------------------------------------------

double ranking_discrepancy(const std::map<std::string, double>& profile, const std::map<std::string, double>& objective) {
  std::vector<double> pv, ov;
  for (const auto& [id, v] : profile) {
    const auto it = objective.find(id);
    if (it == objective.end()) continue;
    pv.push_back(v);
    ov.push_back(it->second);
  }
  const auto pr = descending_ranks(pv), orr = descending_ranks(ov);
  double d = 0;
  for (std::size_t i = 0; i < pr.size(); ++i) d += std::abs(pr[i] - orr[i]);
  return d;
}

std::vector<SecondPersonSummary> second_person_summary(const std::vector<SecondPersonRecord>& records) {
  struct Acc {
    std::vector<double> align, neg_discrepancy, accuracy;
  };
  std::map<std::pair<std::string, std::string>, Acc> acc;
  for (const auto& r : records) {
    if (r.missing || !r.report) continue;
    for (const std::string& t : {r.trait, std::string("overall")}) {
      auto& a = acc[{r.oracle, t}];
      a.align.push_back(r.report->align_score);
      a.neg_discrepancy.push_back(-ranking_discrepancy(r.profile, r.objective));
      if (r.directional_accuracy) a.accuracy.push_back(*r.directional_accuracy);
    }
  }
  std::vector<SecondPersonSummary> out;
  for (const auto& [k, a] : acc) {
    SecondPersonSummary s;
    s.oracle = k.first;
    s.trait = k.second;
    s.n = a.align.size();
    if (a.align.size() >= 2) s.rho = spearman(a.align, a.neg_discrepancy);
    s.accuracy = mean_of(a.accuracy);
    out.push_back(s);
  }
  return out;
}

void to_json(json& j, const SecondPersonSummary& s) {
  j = json{{"oracle", s.oracle}, {"trait", s.trait}, {"n", s.n}, {"rho", opt_json(s.rho)},
           {"acc", opt_json(s.accuracy)}};
}

// ---------------------------------------------------------------------------

std::map<std::string, std::map<std::string, double>> radar_dimensions(
    const std::map<std::string, std::map<std::string, double>>& per_model, const std::vector<std::string>& inverted) {
  std::set<std::string> dims;
  for (const auto& [m, d] : per_model) {
    for (const auto& [k, v] : d) dims.insert(k);
  }
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& dim : dims) {
    std::vector<std::string> models;
    std::vector<double> values;
    for (const auto& [m, d] : per_model) {
      const auto it = d.find(dim);
      if (it == d.end()) continue;
      models.push_back(m);
      values.push_back(it->second);
    }
    const auto ranks = average_ranks(values);
    const bool flip = std::find(inverted.begin(), inverted.end(), dim) != inverted.end();
    for (std::size_t i = 0; i < models.size(); ++i) {
      double p = models.size() < 2 ? 0.5 : (ranks[i] - 1.0) / static_cast<double>(models.size() - 1);
      if (flip) p = 1.0 - p;
      out[models[i]][dim] = p;
    }
  }
  return out;
}

}  // namespace triex
