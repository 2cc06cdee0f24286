#include "triex/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "triex/hash.hpp"
#include "triex/report.hpp"

namespace triex {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string stage_key(const json& inputs) { return sha256_hex(inputs.dump()); }

// Network endpoints named by the stage need their key variable set.
void require_credentials(const RunManifest& m, const std::vector<std::string>& names) {
  for (const auto& name : names) {
    const ModelEndpoint& e = m.endpoint(name);
    if (e.backend == "http" && !e.api_key_env.empty() && !std::getenv(e.api_key_env.c_str())) {
      throw ConfigError(fmt::format("model '{}': environment variable {} is not set", name, e.api_key_env));
    }
  }
}

}  // namespace

StageResult play_stage(const RunManifest& m, ClientPool& clients) {
  StageResult r{run_directory(m), false, {}};
  const auto key = manifest_hash(m);
  if (stage_done(r.run, "play", key)) {
    r.skipped = true;
    return r;
  }
  require_credentials(m, m.llm_models());
  const auto battles = run_battles(m, clients, r.run);
  std::size_t rows = 0, aborted = 0;
  for (const auto& b : battles) {
    rows += b.rows;
    aborted += b.aborted;
  }
  std::size_t unavailable = 0, fallback = 0;
  for (const auto& row : load_run(m, r.run).rows) {
    unavailable += row.flags.model_unavailable;
    fallback += row.flags.parse_fallback;
  }
  r.summary = {{"battles", battles.size()},
               {"rows", rows},
               {"aborted", aborted},
               {"model_unavailable_rows", unavailable},
               {"parse_fallback_rows", fallback}};
  mark_stage(r.run, "play", key);
  return r;
}

StageResult audit_stage(const RunManifest& m, ClientPool& clients, const AuditOptions& options) {
  StageResult r{run_directory(m), false, {}};
  const auto key = stage_key({{"manifest", manifest_hash(m)},
                              {"oracles", options.oracles},
                              {"offline", options.offline},
                              {"rule", m.rule},
                              {"window", m.second_person_window}});
  if (stage_done(r.run, "audit", key)) {
    r.skipped = true;
    return r;
  }
  std::vector<std::string> used;
  for (const auto& o : options.oracles) {
    if (!options.offline || clients.offline_capable(o)) used.push_back(o);
  }
  require_credentials(m, used);
  const RunData data = load_run(m, r.run);
  r.summary = run_audits(m, data, clients, r.run, options);
  mark_stage(r.run, "audit", key);
  return r;
}

StageResult intervene_stage(const RunManifest& m, ClientPool& clients, const InterventionRequest& request) {
  StageResult r{run_directory(m), false, json::array()};
  const auto models = request.models.empty() ? m.llm_models() : request.models;
  const auto traits = request.traits.empty() ? m.intervention.traits : request.traits;
  const auto directions = request.directions.empty() ? m.intervention.directions : request.directions;
  const int runs = request.runs.value_or(m.intervention.runs);
  if (runs < 1) throw ConfigError("--runs must be positive");
  require_credentials(m, models);

  std::optional<RunData> data;
  bool all_skipped = true;
  for (const auto& model : models) {
    for (const auto& t : traits) {
      const auto trait = parse_trait(t);
      if (!trait) throw ConfigError(fmt::format("unknown trait '{}'", t));
      for (const auto& d : directions) {
        const auto dir = parse_direction(d);
        if (!dir) throw ConfigError(fmt::format("unknown direction '{}'", d));
        const InterventionSpec spec{*trait, *dir, m.game.intervention_delta};
        const std::string stage = fmt::format("intervene__{}__{}__{}", safe_name(model), t, d);
        const auto key = stage_key({{"manifest", manifest_hash(m)}, {"runs", runs}, {"delta", spec.delta}});
        if (stage_done(r.run, stage, key)) continue;
        all_skipped = false;
        if (!data) data = load_run(m, r.run);
        const auto report = run_intervention(m, data->rows, clients.get(model), spec, runs);
        const auto path = layout::intervention_path(r.run, model, *trait, *dir);
        fs::create_directories(fs::path(path).parent_path());
        std::ofstream out(path, std::ios::trunc);
        out << json(report).dump(2) << "\n";
        r.summary.push_back({{"model", model}, {"trait", t}, {"direction", d}, {"aggregate", report.aggregate}});
        mark_stage(r.run, stage, key);
      }
    }
  }
  r.skipped = all_skipped;
  return r;
}

StageResult metrics_stage(const RunManifest& m) {
  StageResult r{run_directory(m), false, {}};
  const json report = build_report(m, r.run);
  fs::create_directories(layout::metrics_dir(r.run));
  std::ofstream out(layout::report_path(r.run), std::ios::trunc);
  out << report.dump(2) << "\n";
  r.summary = {{"report", layout::report_path(r.run)}, {"skipped", report.at("skipped")}};
  return r;
}

StageResult report_stage(const RunManifest& m) {
  StageResult r{run_directory(m), false, {}};
  if (!fs::exists(layout::report_path(r.run))) metrics_stage(m);
  std::ifstream in(layout::report_path(r.run));
  const json report = json::parse(in);
  r.summary = {{"dir", layout::metrics_dir(r.run)}, {"files", render_report(report, layout::metrics_dir(r.run))}};
  return r;
}

}  // namespace triex
