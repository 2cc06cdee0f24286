#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triex/metrics.hpp"
#include "triex/runner.hpp"

namespace triex {

// Computes every metric from the run's trace, hand, audit and intervention
// files. No model access. Undefined statistics are null and listed under
// "skipped" with a reason.
nlohmann::json build_report(const RunManifest& m, const std::string& run);

// Tables as CSV. Missing values print as NA.
std::string stratified_csv(const nlohmann::json& strata, bool frequency_column);
std::string per_oracle_rho_csv(const nlohmann::json& per_oracle, const std::string& stratum);
std::string intervention_csv(const nlohmann::json& interventions);
std::string rerun_csv(const nlohmann::json& interventions);
std::string proxy_csv(const nlohmann::json& proxy);
std::string second_person_csv(const nlohmann::json& summaries);
std::string matrix_csv(const nlohmann::json& matrix);

// Plots as standalone SVG.
std::string outcome_distribution_svg(const nlohmann::json& distribution);
std::string convergence_svg(const nlohmann::json& convergence);
std::string heatmap_svg(const nlohmann::json& matrix, const std::string& title);
std::string radar_svg(const nlohmann::json& radar);

// Writes report.json plus the CSV and SVG renderings into `dir`. Returns the
// file names written.
std::vector<std::string> render_report(const nlohmann::json& report, const std::string& dir);

}  // namespace triex
