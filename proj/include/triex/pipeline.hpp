#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triex/runner.hpp"

namespace triex {

// Outcome of one CLI stage. `skipped` means the stage stamp already matched.
struct StageResult {
  std::string run;
  bool skipped = false;
  nlohmann::json summary;
};

StageResult play_stage(const RunManifest& m, ClientPool& clients);

StageResult audit_stage(const RunManifest& m, ClientPool& clients, const AuditOptions& options);

struct InterventionRequest {
  std::vector<std::string> models;      // empty: every LLM model in the manifest
  std::vector<std::string> traits;      // empty: the manifest plan
  std::vector<std::string> directions;  // empty: the manifest plan
  std::optional<int> runs;              // unset: the manifest plan
};

StageResult intervene_stage(const RunManifest& m, ClientPool& clients, const InterventionRequest& request);

// Writes metrics/report.json. Always recomputed; the output is a pure function
// of the files on disk.
StageResult metrics_stage(const RunManifest& m);

// Renders CSV and SVG files next to report.json, building it first if absent.
StageResult report_stage(const RunManifest& m);

}  // namespace triex
