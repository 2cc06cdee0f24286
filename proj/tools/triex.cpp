// triex command line: play, audit, intervene, metrics and report stages over
// one run directory.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "triex/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kOther = 1, kConfig = 2, kTransport = 3, kData = 4 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> battles;
  std::string out;
  std::vector<std::string> oracles;
  std::vector<std::string> traits;
  std::vector<std::string> directions;
  std::vector<std::string> models;
  std::optional<int> runs;
  std::optional<int> workers;
  bool offline = false;
};

triex::RunManifest manifest_from(const Options& o) {
  triex::RunManifest m = o.config.empty() ? triex::default_manifest() : triex::load_manifest(o.config);
  if (o.seed) m.game.rng_seed = *o.seed;
  if (o.battles) m.game.battles = *o.battles;
  if (!o.out.empty()) m.out_dir = o.out;
  if (o.workers) m.workers = *o.workers;
  m.validate();
  return m;
}

void print(const std::string& stage, const triex::StageResult& r) {
  if (r.skipped) {
    fmt::print("{}: up to date ({})\n", stage, r.run);
    return;
  }
  fmt::print("{}: {}\n{}\n", stage, r.run, r.summary.dump(2));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"triex: faithfulness audits for LLM poker agents"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Run manifest (JSON); defaults to the built-in manifest");
    sub->add_option("--seed", o.seed, "Root seed");
    sub->add_option("--battles", o.battles, "Number of battles");
    sub->add_option("--out", o.out, "Output root directory");
    sub->add_option("--workers", o.workers, "Worker threads");
  };

  auto* play = app.add_subcommand("play", "Play the battles and write decision traces");
  common(play);
  auto* audit = app.add_subcommand("audit", "Rule audit plus first- and second-person oracle audits");
  common(audit);
  audit->add_option("--oracle", o.oracles, "Oracle model (repeatable); defaults to the manifest list");
  audit->add_flag("--offline", o.offline, "Skip oracles that need the network");
  auto* intervene = app.add_subcommand("intervene", "Log/ReO/ReI reruns with perturbed opponent profiles");
  common(intervene);
  intervene->add_option("--trait", o.traits, "Trait to perturb (repeatable)");
  intervene->add_option("--direction", o.directions, "up or down (repeatable)");
  intervene->add_option("--runs", o.runs, "Rerun repetitions");
  intervene->add_option("--model", o.models, "LLM model to rerun (repeatable)");
  auto* metrics = app.add_subcommand("metrics", "Compute report.json from the run files");
  common(metrics);
  auto* report = app.add_subcommand("report", "Render CSV tables and SVG plots");
  common(report);

  CLI11_PARSE(app, argc, argv);

  try {
    const triex::RunManifest m = manifest_from(o);
    if (play->parsed()) {
      triex::ClientPool clients(m);
      print("play", triex::play_stage(m, clients));
    } else if (audit->parsed()) {
      triex::ClientPool clients(m);
      triex::AuditOptions opts{o.oracles.empty() ? m.oracles : o.oracles, o.offline};
      for (const auto& name : opts.oracles) m.endpoint(name);
      print("audit", triex::audit_stage(m, clients, opts));
    } else if (intervene->parsed()) {
      triex::ClientPool clients(m);
      print("intervene", triex::intervene_stage(m, clients, {o.models, o.traits, o.directions, o.runs}));
    } else if (metrics->parsed()) {
      print("metrics", triex::metrics_stage(m));
    } else if (report->parsed()) {
      print("report", triex::report_stage(m));
    }
    return kOk;
  } catch (const triex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const triex::InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const triex::TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kTransport;
  } catch (const triex::TraceError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const triex::AlignmentError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const triex::AuditError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const triex::RunError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}
