#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "triex/artifacts.hpp"
#include "triex/hash.hpp"
#include "triex/rng.hpp"
#include "triex/runner.hpp"

namespace triex {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Runs fn(i) for i in [0, n) on `workers` threads. The first exception is
// rethrown after every worker stops.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto extra = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(n, 1)) - 1;
  for (std::size_t w = 0; w < extra; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<const DecisionTrace*> llm_rows(const std::vector<DecisionTrace>& rows) {
  std::vector<const DecisionTrace*> out;
  for (const auto& r : rows) {
    if (r.is_llm() && r.action) out.push_back(&r);
  }
  return out;
}

ReferenceFeatures decision_time_features(ReferenceFeatures f) {
  f.raise_over_pot.reset();
  f.raise_over_stack.reset();
  f.high_risk = false;
  return f;
}

}  // namespace

void to_json(json& j, const AuditSummary& s) {
  j = json{{"rule_records", s.rule_records},
           {"oracle_records", s.oracle_records},
           {"oracle_missing", s.oracle_missing},
           {"second_person_records", s.second_person_records},
           {"skipped_oracles", s.skipped_oracles}};
}

std::vector<SecondPersonInput> second_person_inputs(const RunManifest& m, const RunData& data) {
  std::map<int, std::vector<const HandRecord*>> by_battle;
  for (const auto& h : data.hands) by_battle[h.battle_id].push_back(&h);
  std::vector<SecondPersonInput> out;
  const int w = m.second_person_window;
  for (auto& [battle, hands] : by_battle) {
    std::sort(hands.begin(), hands.end(), [](auto* a, auto* b) { return a->hand_id < b->hand_id; });
    std::map<int, const HandRecord*> at;
    for (const auto* h : hands) at[h->hand_id] = h;
    for (const auto& seat : m.seats) {
      if (!seat.is_llm()) continue;
      std::map<std::string, TraitVector> beliefs;
      for (const auto& other : m.seats) {
        if (other.id != seat.id) beliefs[other.id] = TraitVector{};
      }
      for (const auto* h : hands) {
        for (const auto& u : h->profile_updates) {
          if (u.agent == seat.id && !u.skipped) beliefs[u.opponent] = u.applied;
        }
        if ((h->hand_id + 1) % w != 0) continue;
        std::map<std::string, BehaviorStats> before;
        if (h->hand_id - w >= 0) {
          const auto prev = at.find(h->hand_id - w);
          if (prev == at.end()) continue;
          before = prev->second->stats;
        }
        for (Trait t : kAllTraits) {
          if (auto in = second_person_input(seat.id, battle, h->hand_id, w, t, beliefs, h->stats, before)) {
            out.push_back(std::move(*in));
          }
        }
      }
    }
  }
  return out;
}

AuditSummary run_audits(const RunManifest& m, const RunData& data, ClientPool& clients, const std::string& run,
                        const AuditOptions& options) {
  AuditSummary summary;
  fs::create_directories(fs::path(run) / "audit");
  const auto rows = llm_rows(data.rows);

  std::vector<AuditRecord> rule(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rule[i] = rule_audit_record(*rows[i], m.rule);
  summary.rule_records = rule.size();
  write_audit_records(layout::rule_audit_path(run), std::move(rule));

  const auto sp_inputs = second_person_inputs(m, data);
  for (const auto& oracle : options.oracles) {
    if (options.offline && !clients.offline_capable(oracle)) {
      summary.skipped_oracles.push_back(oracle);
      continue;
    }
    ModelClient& client = clients.get(oracle);
    std::vector<AuditRecord> records(rows.size());
    parallel_for(rows.size(), m.workers, [&](std::size_t i) { records[i] = oracle_audit_first_person(*rows[i], client); });
    summary.oracle_records[oracle] = records.size();
    summary.oracle_missing[oracle] = static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const AuditRecord& r) { return r.missing; }));
    write_audit_records(layout::oracle_audit_path(run, oracle), std::move(records));

    std::vector<SecondPersonRecord> sp(sp_inputs.size());
    parallel_for(sp_inputs.size(), m.workers,
                 [&](std::size_t i) { sp[i] = oracle_audit_second_person(sp_inputs[i], client); });
    summary.second_person_records[oracle] = sp.size();
    write_second_person_records(layout::second_person_path(run, oracle), std::move(sp));
  }
  std::ofstream out(fs::path(run) / "audit" / "summary.json", std::ios::trunc);
  out << json(summary).dump(2) << "\n";
  return summary;
}

// ---------------------------------------------------------------------------

AlignedActions logged_actions(const std::vector<DecisionTrace>& rows) {
  AlignedActions out;
  for (const auto& r : rows) {
    if (!r.is_llm() || !r.action || !r.context) continue;
    out[decision_key(r)] = coarse_action(r.action->kind);
  }
  return out;
}

AlignedActions rerun_actions(const std::vector<DecisionTrace>& rows, ModelClient& client,
                             const std::optional<InterventionSpec>& spec, std::uint64_t stream) {
  AlignedActions out;
  for (const auto& r : rows) {
    if (!r.is_llm() || !r.action || !r.context) continue;
    DecisionContext ctx = *r.context;
    const std::string logged = render_decision_prompt(ctx);
    if (sha256_hex(logged) != r.prompt_hash) {
      throw RunError(fmt::format("row {}: rebuilt prompt does not match the logged prompt hash", decision_key(r)));
    }
    ModelRequest req;
    req.role = kRoleDecision;
    if (spec) {
      for (auto& p : ctx.profiles) p.traits = intervene(p.traits, *spec).traits;
      req.prompt = render_decision_prompt(ctx);
    } else {
      req.prompt = logged;
    }
    req.sample_key = derive_seed(r.sample_key, {stream});
    req.hints = json{{"features", decision_time_features(r.features)}, {"legal", r.legal}};
    const FirstPersonArtifact parsed = parse_first_person(client.complete(req).text);
    const Action proposal = parsed.decision ? *parsed.decision : fallback_action(r.legal);
    out[decision_key(r)] = coarse_action(normalize_action(proposal, r.legal).kind);
  }
  return out;
}

void to_json(json& j, const InterventionReport& r) {
  j = json{{"model", r.model},
           {"trait", trait_key(r.spec.trait)},
           {"direction", direction_name(r.spec.direction)},
           {"delta", r.spec.delta},
           {"runs", r.runs},
           {"aggregate", r.aggregate}};
}

void from_json(const json& j, InterventionReport& r) {
  r.model = j.at("model").get<std::string>();
  const auto trait = parse_trait(j.at("trait").get<std::string>());
  const auto dir = parse_direction(j.at("direction").get<std::string>());
  if (!trait || !dir) throw RunError("intervention report names an unknown trait or direction");
  r.spec = InterventionSpec{*trait, *dir, j.at("delta").get<double>()};
  r.runs = j.at("runs").get<std::vector<ChangeRateSummary>>();
  r.aggregate = aggregate_change_rates(r.runs);
}

InterventionReport run_intervention(const RunManifest& m, const std::vector<DecisionTrace>& rows, ModelClient& client,
                                    const InterventionSpec& spec, int runs) {
  InterventionReport report;
  report.model = client.endpoint().name;
  report.spec = spec;
  std::vector<DecisionTrace> own;
  for (const auto& r : rows) {
    if (r.is_llm() && r.model_name == report.model) own.push_back(r);
  }
  const AlignedActions log = logged_actions(own);
  if (log.empty()) throw RunError(fmt::format("no logged decisions for model '{}'", report.model));
  std::map<std::string, ContextBucket> contexts;
  for (const auto& r : own) contexts[decision_key(r)] = context_bucket(r.features);

  report.runs.resize(static_cast<std::size_t>(runs));
  const auto base = derive_seed(m.game.rng_seed, {kSampleStream, static_cast<std::uint64_t>(spec.trait),
                                                  static_cast<std::uint64_t>(spec.direction)});
  parallel_for(static_cast<std::size_t>(runs), m.workers, [&](std::size_t run) {
    const auto reo = rerun_actions(own, client, std::nullopt, derive_seed(base, {run, 0}));
    const auto rei = rerun_actions(own, client, spec, derive_seed(base, {run, 1}));
    report.runs[run] = change_rates(log, reo, rei, contexts, spec);
  });
  report.aggregate = aggregate_change_rates(report.runs);
  return report;
}

}  // namespace triex
