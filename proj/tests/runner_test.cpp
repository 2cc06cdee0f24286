#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "run_fixtures.hpp"
#include "triex/hash.hpp"
#include "triex/pipeline.hpp"
#include "triex/report.hpp"

namespace {

using namespace triex;
using nlohmann::json;
namespace fs = std::filesystem;
using fixtures::scratch;
using fixtures::slurp;

std::vector<std::string> trace_bytes(const RunManifest& m, const std::string& run) {
  std::vector<std::string> out;
  for (int b = 0; b < m.game.battles; ++b) {
    out.push_back(slurp(layout::trace_path(run, b)));
    out.push_back(slurp(layout::hands_path(run, b)));
  }
  return out;
}

TEST(Manifest, DefaultSnapshot) {
  const RunManifest m = default_manifest();
  EXPECT_EQ(m.game.battles, 50);
  EXPECT_EQ(m.game.hands_per_battle, 30);
  EXPECT_EQ(m.game.initial_stack, 3000);
  EXPECT_EQ(m.game.small_blind, 5);
  EXPECT_EQ(m.game.big_blind, 10);
  EXPECT_DOUBLE_EQ(m.game.temperature, 0.2);
  EXPECT_DOUBLE_EQ(m.game.top_p, 1.0);
  EXPECT_EQ(m.game.rng_seed, 7u);
  EXPECT_DOUBLE_EQ(m.game.intervention_delta, 2.5);
  EXPECT_EQ(m.game.mc_simulations, 1000);
  EXPECT_EQ(m.intervention.runs, 50);
  ASSERT_EQ(m.seats.size(), 6u);
  EXPECT_TRUE(m.seats[0].is_llm());
  EXPECT_NO_THROW(m.validate());
}

TEST(Manifest, JsonRoundTripAndPartialFiles) {
  const RunManifest m = default_manifest();
  const json j = m;
  EXPECT_EQ(json(j.get<RunManifest>()), j);

  const auto dir = scratch("manifest");
  const auto path = (fs::path(dir) / "m.json").string();
  std::ofstream(path) << R"({"game": {"battles": 3}, "workers": 2})";
  const RunManifest loaded = load_manifest(path);
  EXPECT_EQ(loaded.game.battles, 3);
  EXPECT_EQ(loaded.game.hands_per_battle, 30);
  EXPECT_EQ(loaded.workers, 2);
  EXPECT_EQ(loaded.seats.size(), 6u);

  std::ofstream(path) << "{not json";
  EXPECT_THROW(load_manifest(path), ConfigError);
  EXPECT_THROW(load_manifest(dir + "/missing.json"), ConfigError);
}

TEST(Manifest, ValidationErrors) {
  auto bad = [](auto edit) {
    RunManifest m = default_manifest();
    edit(m);
    EXPECT_THROW(m.validate(), ConfigError);
  };
  bad([](RunManifest& m) { m.seats.resize(1); });
  bad([](RunManifest& m) { m.seats[1].agent = "Shark"; });
  bad([](RunManifest& m) { m.seats[0].model = "nobody"; });
  bad([](RunManifest& m) { m.seats[2].id = m.seats[1].id; });
  bad([](RunManifest& m) { m.oracles.push_back("judge"); });
  bad([](RunManifest& m) { m.intervention.traits.push_back("luck"); });
  bad([](RunManifest& m) { m.game.big_blind = 4; });
  bad([](RunManifest& m) { m.workers = 0; });
}

TEST(Manifest, HashIgnoresOutputSettings) {
  RunManifest a = default_manifest();
  RunManifest b = a;
  b.out_dir = "elsewhere";
  b.workers = 8;
  b.stages.intervene = true;
  EXPECT_EQ(manifest_hash(a), manifest_hash(b));
  b.game.rng_seed = 8;
  EXPECT_NE(manifest_hash(a), manifest_hash(b));
}

TEST(Runner, SameSeedGivesIdenticalTraceBytes) {
  const RunManifest m1 = fixtures::small(scratch("det_a"), 3, 8);
  const RunManifest m2 = fixtures::small(scratch("det_b"), 3, 8);
  ClientPool c1(m1), c2(m2);
  run_battles(m1, c1, run_directory(m1));
  run_battles(m2, c2, run_directory(m2));
  EXPECT_EQ(trace_bytes(m1, run_directory(m1)), trace_bytes(m2, run_directory(m2)));
}

TEST(Runner, WorkerCountDoesNotChangeTraces) {
  RunManifest m1 = fixtures::small(scratch("workers_1"), 4, 6);
  RunManifest m8 = fixtures::small(scratch("workers_8"), 4, 6);
  m8.workers = 8;
  ClientPool c1(m1), c8(m8);
  run_battles(m1, c1, run_directory(m1));
  run_battles(m8, c8, run_directory(m8));
  EXPECT_EQ(trace_bytes(m1, run_directory(m1)), trace_bytes(m8, run_directory(m8)));
}

TEST(Runner, ChipsAreConservedOnEveryRowAndHand) {
  const RunManifest m = fixtures::small(scratch("conserve"), 3, 10);
  ClientPool clients(m);
  const auto run = run_directory(m);
  const auto battles = run_battles(m, clients, run);
  ASSERT_EQ(battles.size(), 3u);
  const RunData data = load_run(m, run);
  const Chips total = m.game.initial_stack * static_cast<Chips>(m.seats.size());
  ASSERT_FALSE(data.rows.empty());
  for (const auto& r : data.rows) {
    const Chips sum = std::accumulate(r.obs.stacks.begin(), r.obs.stacks.end(), Chips{0}) + r.obs.pot;
    ASSERT_EQ(sum, total) << decision_key(r);
  }
  for (const auto& h : data.hands) {
    EXPECT_EQ(std::accumulate(h.stacks_after.begin(), h.stacks_after.end(), Chips{0}), total);
    EXPECT_LE(h.hand_id, m.game.hands_per_battle - 1);
  }
  for (const auto& b : battles) {
    EXPECT_FALSE(b.aborted) << b.error;
    EXPECT_LE(b.hands, m.game.hands_per_battle);
    EXPECT_TRUE(fs::exists(layout::trace_path(run, b.battle_id)));
  }
}

TEST(Runner, LlmRowsCarryReplayableContexts) {
  const RunManifest m = fixtures::small(scratch("contexts"), 1, 6);
  ClientPool clients(m);
  run_battles(m, clients, run_directory(m));
  const RunData data = load_run(m, run_directory(m));
  std::size_t llm = 0;
  for (const auto& r : data.rows) {
    if (!r.is_llm()) {
      EXPECT_FALSE(r.context.has_value());
      continue;
    }
    ++llm;
    ASSERT_TRUE(r.context.has_value());
    EXPECT_EQ(sha256_hex(render_decision_prompt(*r.context)), r.prompt_hash);
    EXPECT_EQ(r.context->profiles.size(), m.seats.size() - 1);
  }
  EXPECT_GT(llm, 0u);
}

TEST(Runner, LoadRunRejectsAnotherManifest) {
  const RunManifest m = fixtures::small(scratch("mismatch"), 1, 3);
  ClientPool clients(m);
  const auto run = run_directory(m);
  run_battles(m, clients, run);
  RunManifest other = m;
  other.game.mc_simulations = 300;
  EXPECT_THROW(load_run(other, run), RunError);
  EXPECT_THROW(load_run(m, scratch("empty")), RunError);
}

TEST(Runner, TamperedContextFailsTheRerun) {
  const RunManifest m = fixtures::small(scratch("tamper"), 1, 4);
  ClientPool clients(m);
  run_battles(m, clients, run_directory(m));
  RunData data = load_run(m, run_directory(m));
  std::vector<DecisionTrace> rows;
  for (const auto& r : data.rows) {
    if (r.is_llm() && r.action) rows.push_back(r);
  }
  ASSERT_FALSE(rows.empty());
  EXPECT_NO_THROW(rerun_actions(rows, clients.get("scripted-llm"), std::nullopt, 1));
  rows.back().context->pot += 1;
  EXPECT_THROW(rerun_actions(rows, clients.get("scripted-llm"), std::nullopt, 1), RunError);
}

TEST(Runner, DeterministicAgentRerunsWithoutChange) {
  RunManifest m = fixtures::small(scratch("consistent"), 2, 6);
  fixtures::set_policy(m, {{"policy", "consistent"}});
  ClientPool clients(m);
  run_battles(m, clients, run_directory(m));
  const RunData data = load_run(m, run_directory(m));
  const auto report =
      run_intervention(m, data.rows, clients.get("scripted-llm"), {Trait::kAggressiveness, Direction::kUp, 2.5}, 3);
  ASSERT_EQ(report.runs.size(), 3u);
  for (const auto& r : report.runs) EXPECT_EQ(r.cr_log_reo, 0.0);
  EXPECT_EQ(report.aggregate.cr_log_reo.mean, 0.0);

  const json j = report;
  const auto back = j.get<InterventionReport>();
  EXPECT_EQ(json(back), j);
}

TEST(Audits, TwoOraclesGiveTwoRecordsPerRow) {
  RunManifest m = fixtures::small(scratch("two_oracles"), 2, 5);
  m.models.push_back(fixtures::scripted("judge-a", {{"policy", "consistent"}}));
  m.models.push_back(fixtures::scripted("judge-b", {{"policy", "consistent"}, {"oracle_strictness", 1}}));
  m.oracles = {"judge-a", "judge-b"};
  ClientPool clients(m);
  const auto run = run_directory(m);
  run_battles(m, clients, run);
  const RunData data = load_run(m, run);
  std::size_t n = 0;
  for (const auto& r : data.rows) n += r.is_llm() && r.action;
  const auto summary = run_audits(m, data, clients, run, {m.oracles, false});
  EXPECT_EQ(summary.rule_records, n);
  EXPECT_EQ(summary.oracle_records.at("judge-a") + summary.oracle_records.at("judge-b"), 2 * n);
  EXPECT_EQ(read_audit_records(layout::oracle_audit_path(run, "judge-a")).size(), n);
  EXPECT_EQ(read_audit_records(layout::oracle_audit_path(run, "judge-b")).size(), n);

  const auto rule_bytes = slurp(layout::rule_audit_path(run));
  run_audits(m, data, clients, run, {{}, false});
  EXPECT_EQ(slurp(layout::rule_audit_path(run)), rule_bytes);

  const json report = build_report(m, run);
  EXPECT_TRUE(report.at("oracle_agreement").contains("OverallFaithfulnessScore"));
  EXPECT_EQ(report.at("first_person").at("per_oracle").size(), 2u);
}

TEST(Audits, OfflineSkipsNetworkOracles) {
  RunManifest m = fixtures::small(scratch("offline"), 1, 4);
  ModelEndpoint remote;
  remote.name = "remote-judge";
  remote.base_url = "http://127.0.0.1:9/v1";
  m.models.push_back(remote);
  m.oracles = {"remote-judge"};
  ClientPool clients(m);
  const auto run = run_directory(m);
  run_battles(m, clients, run);
  const auto summary = run_audits(m, load_run(m, run), clients, run, {m.oracles, true});
  EXPECT_GT(summary.rule_records, 0u);
  EXPECT_EQ(summary.skipped_oracles, std::vector<std::string>{"remote-judge"});
  EXPECT_FALSE(fs::exists(layout::oracle_audit_path(run, "remote-judge")));
}

TEST(SecondPerson, WindowsFireEveryWHands) {
  RunManifest m = fixtures::small(scratch("windows"), 1, 10);
  m.second_person_window = 5;
  ClientPool clients(m);
  run_battles(m, clients, run_directory(m));
  const auto inputs = second_person_inputs(m, load_run(m, run_directory(m)));
  for (const auto& in : inputs) EXPECT_EQ((in.hand_id + 1) % 5, 0);
  EXPECT_FALSE(inputs.empty());
}

TEST(Stages, CompletedStagesAreNoOps) {
  const RunManifest m = fixtures::small(scratch("stages"), 2, 4);
  ClientPool clients(m);
  EXPECT_FALSE(play_stage(m, clients).skipped);
  const auto bytes = trace_bytes(m, run_directory(m));
  EXPECT_TRUE(play_stage(m, clients).skipped);
  EXPECT_EQ(trace_bytes(m, run_directory(m)), bytes);

  const AuditOptions opts{m.oracles, false};
  EXPECT_FALSE(audit_stage(m, clients, opts).skipped);
  EXPECT_TRUE(audit_stage(m, clients, opts).skipped);
  EXPECT_FALSE(audit_stage(m, clients, {{}, false}).skipped);

  InterventionRequest req;
  req.traits = {"aggressiveness"};
  req.directions = {"up"};
  req.runs = 2;
  EXPECT_FALSE(intervene_stage(m, clients, req).skipped);
  EXPECT_TRUE(intervene_stage(m, clients, req).skipped);
  req.directions = {"sideways"};
  EXPECT_THROW(intervene_stage(m, clients, req), ConfigError);
}

TEST(Report, RendersTablesAndPlots) {
  const RunManifest m = fixtures::small(scratch("report"), 2, 6);
  ClientPool clients(m);
  play_stage(m, clients);
  audit_stage(m, clients, {m.oracles, false});
  InterventionRequest req;
  req.traits = {"aggressiveness"};
  req.directions = {"down"};
  req.runs = 2;
  intervene_stage(m, clients, req);
  const auto result = report_stage(m);
  const auto dir = layout::metrics_dir(run_directory(m));
  for (const char* f : {"report.json", "table_overall.csv", "table_street.csv", "table_risk.csv", "table_model.csv",
                        "outcome_distribution.svg", "convergence.svg", "intervention.csv", "rerun_variability.csv",
                        "radar.svg"}) {
    EXPECT_TRUE(fs::exists(fs::path(dir) / f)) << f;
  }
  const auto street = slurp((fs::path(dir) / "table_street.csv").string());
  EXPECT_EQ(street.rfind("Group,N,Rule,Oracle,Rat.(Rule),Rat.(Oracle),ρ,HighRisk\n", 0), 0u);
  EXPECT_EQ(std::count(street.begin(), street.end(), '\n'), 5);
  const auto risk = slurp((fs::path(dir) / "table_risk.csv").string());
  EXPECT_NE(risk.find("Freq."), std::string::npos);
  EXPECT_EQ(slurp((fs::path(dir) / "outcome_distribution.svg").string()).rfind("<svg", 0), 0u);

  // The report is a pure function of the files on disk.
  EXPECT_EQ(build_report(m, run_directory(m)), build_report(m, run_directory(m)));
}

TEST(Report, CsvCellsAndMissingValues) {
  const json strata = json::array({{{"group", "Turn"},
                                    {"n", 0},
                                    {"rule", nullptr},
                                    {"oracle", nullptr},
                                    {"rat_rule", nullptr},
                                    {"rat_oracle", nullptr},
                                    {"rho", nullptr},
                                    {"high_risk", nullptr},
                                    {"freq", 0.0}}});
  EXPECT_EQ(stratified_csv(strata, false),
            "Group,N,Rule,Oracle,Rat.(Rule),Rat.(Oracle),ρ,HighRisk\nTurn,0,NA,NA,NA,NA,NA,NA\n");
  EXPECT_EQ(stratified_csv(strata, true),
            "Group,N,Rule,Oracle,Rat.(Rule),Rat.(Oracle),ρ,Freq.\nTurn,0,NA,NA,NA,NA,NA,0.000\n");
  const json matrix{{"oracles", {"a", "b"}}, {"values", {{1.0, 0.5}, {0.5, nullptr}}}, {"support", {{3, 3}, {3, 0}}}};
  EXPECT_EQ(matrix_csv(matrix), ",a,b\na,1.000,0.500\nb,0.500,NA\n");
}

int cli(const std::string& args) {
  const int status = std::system((std::string(TRIEX_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodesSeparateConfigAndDataErrors) {
  const auto dir = scratch("cli");
  EXPECT_EQ(cli("play --config " + dir + "/missing.json"), 2);
  EXPECT_EQ(cli("audit --battles 1 --out " + dir), 4);  // nothing played yet
  EXPECT_EQ(cli("play --battles 1 --out " + dir), 0);
  EXPECT_EQ(cli("audit --battles 1 --out " + dir), 0);
  EXPECT_EQ(cli("intervene --battles 1 --out " + dir + " --trait luck"), 2);
  EXPECT_EQ(cli("report --battles 1 --out " + dir), 0);
}

}  // namespace
