#include "triex/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <tuple>

#include <fmt/format.h>

namespace triex {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

const std::vector<Stratum> kPooledStrata = {Stratum::kAll, Stratum::kStreet, Stratum::kRisk, Stratum::kModel,
                                            Stratum::kBucket, Stratum::kAction};
const std::vector<Stratum> kOracleStrata = {Stratum::kAll, Stratum::kStreet, Stratum::kBucket, Stratum::kAction};

BehaviorStats add_stats(BehaviorStats a, const BehaviorStats& b) {
  a.hands_seen += b.hands_seen;
  a.vpip_hands += b.vpip_hands;
  a.pfr_hands += b.pfr_hands;
  a.showdowns += b.showdowns;
  a.decisions += b.decisions;
  a.bets_raises += b.bets_raises;
  a.calls += b.calls;
  a.faced += b.faced;
  a.faced_folds += b.faced_folds;
  a.faced_calls += b.faced_calls;
  a.faced_raises += b.faced_raises;
  a.bluff_attempts += b.bluff_attempts;
  a.bluff_hands += b.bluff_hands;
  a.bluff_hands_won += b.bluff_hands_won;
  return a;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json points_json(const std::vector<ConvergencePoint>& curve) {
  json out = json::array();
  for (const auto& p : curve) {
    out.push_back(
        {{"round", p.round}, {"mean_rho", opt(p.mean_rho)}, {"used", p.used}, {"undefined", p.undefined}, {"skipped", p.skipped}});
  }
  return out;
}

std::vector<AuditRecord> read_if_exists(const std::string& path) {
  if (!fs::exists(path)) return {};
  return read_audit_records(path);
}

// Per (battle, LLM seat): believed values about archetype opponents after
// each hand, tagged with the seat's model.
std::vector<std::pair<std::string, BeliefTrajectory>> trajectories(const RunManifest& m, const RunData& data,
                                                                   Trait trait) {
  std::map<int, std::vector<const HandRecord*>> by_battle;
  for (const auto& h : data.hands) by_battle[h.battle_id].push_back(&h);
  std::vector<std::pair<std::string, BeliefTrajectory>> out;
  for (auto& [battle, hands] : by_battle) {
    std::sort(hands.begin(), hands.end(), [](auto* a, auto* b) { return a->hand_id < b->hand_id; });
    for (const auto& seat : m.seats) {
      if (!seat.is_llm()) continue;
      std::map<std::string, double> current;
      for (const auto& other : m.seats) {
        if (!other.is_llm()) current[other.id] = 0.5;
      }
      BeliefTrajectory t;
      for (const auto* h : hands) {
        for (const auto& u : h->profile_updates) {
          if (u.agent == seat.id && !u.skipped && current.count(u.opponent)) current[u.opponent] = u.applied[trait];
        }
        t.push_back(current);
      }
      out.emplace_back(seat.model, std::move(t));
    }
  }
  return out;
}

// Final cumulative stats per archetype seat, summed over battles.
std::map<std::string, BehaviorStats> pooled_archetype_stats(const RunManifest& m, const RunData& data) {
  std::map<int, const HandRecord*> last;
  for (const auto& h : data.hands) {
    auto& slot = last[h.battle_id];
    if (!slot || h.hand_id > slot->hand_id) slot = &h;
  }
  std::map<std::string, BehaviorStats> out;
  for (const auto& seat : m.seats) {
    if (seat.is_llm()) continue;
    BehaviorStats total;
    for (const auto& [battle, h] : last) {
      if (const auto it = h->stats.find(seat.id); it != h->stats.end()) total = add_stats(total, it->second);
    }
    out[seat.id] = total;
  }
  return out;
}

// Final beliefs of each model about archetype opponents, averaged over
// battles and seats.
std::map<std::string, std::map<std::string, TraitVector>> final_beliefs(const RunManifest& m, const RunData& data) {
  std::map<std::string, std::map<std::string, std::pair<TraitVector, int>>> sums;
  std::map<std::pair<int, std::string>, std::map<std::string, TraitVector>> latest;  // (battle, agent) -> opp -> traits
  std::vector<const HandRecord*> hands;
  for (const auto& h : data.hands) hands.push_back(&h);
  std::sort(hands.begin(), hands.end(), [](auto* a, auto* b) {
    return std::tie(a->battle_id, a->hand_id) < std::tie(b->battle_id, b->hand_id);
  });
  for (const auto* h : hands) {
    for (const auto& u : h->profile_updates) {
      if (!u.skipped) latest[{h->battle_id, u.agent}][u.opponent] = u.applied;
    }
  }
  std::map<std::string, std::string> model_of;
  std::set<std::string> archetypes;
  for (const auto& s : m.seats) {
    if (s.is_llm()) model_of[s.id] = s.model;
    else archetypes.insert(s.id);
  }
  for (const auto& [key, opps] : latest) {
    const auto mit = model_of.find(key.second);
    if (mit == model_of.end()) continue;
    for (const auto& [opp, traits] : opps) {
      if (!archetypes.count(opp)) continue;
      auto& [sum, n] = sums[mit->second][opp];
      for (std::size_t k = 0; k < kTraitCount; ++k) sum.values[k] = (n == 0 ? 0.0 : sum.values[k]) + traits.values[k];
      ++n;
    }
  }
  std::map<std::string, std::map<std::string, TraitVector>> out;
  for (const auto& [model, opps] : sums) {
    for (const auto& [opp, sn] : opps) {
      TraitVector v = sn.first;
      for (auto& x : v.values) x /= sn.second;
      out[model][opp] = v;
    }
  }
  return out;
}

std::string fmt_cell(const json& v, int digits = 3) {
  if (v.is_null()) return "NA";
  if (v.is_number_integer() || v.is_number_unsigned()) return std::to_string(v.get<long long>());
  if (v.is_number()) return fmt::format("{:.{}f}", v.get<double>(), digits);
  return v.get<std::string>();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_escape(cells[i]);
  return out + "\n";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_open(int w, int h) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      w, h);
}

std::string svg_text(double x, double y, const std::string& s, const std::string& anchor = "middle", int size = 12) {
  return fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"{}\" font-size=\"{}\">{}</text>\n", x, y, anchor,
                     size, xml_escape(s));
}

const std::vector<std::string> kPalette = {"#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377", "#bbbbbb"};

// Blue for -1, white for 0, red for +1.
std::string diverging(double v) {
  v = std::clamp(v, -1.0, 1.0);
  const auto mix = [](int from, int to, double t) { return static_cast<int>(std::lround(from + (to - from) * t)); };
  if (v >= 0) return fmt::format("#{:02x}{:02x}{:02x}", mix(255, 202, v), mix(255, 0, v), mix(255, 32, v));
  return fmt::format("#{:02x}{:02x}{:02x}", mix(255, 5, -v), mix(255, 113, -v), mix(255, 176, -v));
}

}  // namespace

// ---------------------------------------------------------------------------

json build_report(const RunManifest& m, const std::string& run) {
  const RunData data = load_run(m, run);
  json report;
  json skipped = json::array();

  std::size_t llm = 0, aborted = 0;
  for (const auto& r : data.rows) llm += r.is_llm();
  for (const auto& b : data.battles) aborted += b.aborted;
  report["run"] = {{"config_hash", manifest_hash(m)},
                   {"seed", m.game.rng_seed},
                   {"battles", data.battles.size()},
                   {"aborted_battles", aborted},
                   {"hands", data.hands.size()},
                   {"rows", data.rows.size()},
                   {"llm_rows", llm},
                   {"rule_version", m.rule.version},
                   {"outcome_policy", kOutcomePolicyVersion}};

  // First-person tables.
  std::vector<AuditRecord> records = read_if_exists(layout::rule_audit_path(run));
  if (records.empty()) skipped.push_back("rule audit file missing; rule columns empty");
  std::vector<std::string> oracles;
  for (const auto& o : m.oracles) {
    auto rec = read_if_exists(layout::oracle_audit_path(run, o));
    if (rec.empty()) {
      skipped.push_back(fmt::format("no first-person audits from oracle {}", o));
      continue;
    }
    oracles.push_back(o);
    std::move(rec.begin(), rec.end(), std::back_inserter(records));
  }
  const auto pooled = join_audits(data.rows, records);
  json fp;
  for (Stratum s : kPooledStrata) fp["pooled"][std::string(stratum_name(s))] = stratified_summary(pooled, s);
  json dist = json::object();
  for (const auto& [street, shares] : outcome_distribution(pooled)) {
    auto& d = dist[fmt::format("{}", street_name(street))];
    for (const auto& [label, v] : shares) d[std::string(outcome_name(label))] = v;
  }
  fp["outcome_distribution"] = dist;
  fp["per_oracle"] = json::object();
  for (const auto& o : oracles) {
    const auto rows = join_audits(data.rows, records, o);
    for (Stratum s : kOracleStrata) fp["per_oracle"][o][std::string(stratum_name(s))] = stratified_summary(rows, s);
  }
  report["first_person"] = fp;

  // Cross-oracle agreement.
  json agreement = json::object();
  if (oracles.size() >= 2) {
    for (auto d : {OracleDimension::kOverall, OracleDimension::kHand, OracleDimension::kRisk, OracleDimension::kGoal,
                   OracleDimension::kProfile}) {
      agreement[std::string(oracle_dimension_name(d))] = {{"kappa", oracle_agreement(records, d, false)},
                                                          {"spearman", oracle_agreement(records, d, true)}};
    }
  } else {
    skipped.push_back("cross-oracle agreement needs two oracles");
  }
  report["oracle_agreement"] = agreement;

  // Second-person audits.
  std::vector<SecondPersonRecord> sp;
  for (const auto& o : m.oracles) {
    const auto path = layout::second_person_path(run, o);
    if (!fs::exists(path)) continue;
    auto rec = read_second_person_records(path);
    std::move(rec.begin(), rec.end(), std::back_inserter(sp));
  }
  report["second_person"] = second_person_summary(sp);

  // Belief convergence against pooled realized archetype statistics.
  const auto pooled_stats = pooled_archetype_stats(m, data);
  json convergence = json::object();
  std::map<std::string, std::vector<double>> final_rho;  // model -> last-round mean rho per trait
  for (Trait t : kAllTraits) {
    const auto reference = reference_trait_values(pooled_stats, t);
    const auto traj = trajectories(m, data, t);
    std::vector<BeliefTrajectory> all;
    std::map<std::string, std::vector<BeliefTrajectory>> by_model;
    for (const auto& [model, tr] : traj) {
      all.push_back(tr);
      by_model[model].push_back(tr);
    }
    json entry{{"reference", reference}, {"curve", points_json(convergence_curve(all, reference))}};
    for (const auto& [model, list] : by_model) {
      const auto curve = convergence_curve(list, reference);
      entry["by_model"][model] = points_json(curve);
      if (!curve.empty() && curve.back().mean_rho) final_rho[model].push_back(*curve.back().mean_rho);
    }
    convergence[std::string(trait_key(t))] = entry;
  }
  report["convergence"] = convergence;

  // Trait-proxy alignment of final beliefs.
  json proxy = json::object();
  for (const auto& [model, beliefs] : final_beliefs(m, data)) {
    try {
      proxy[model] = trait_proxy_alignment(beliefs, pooled_stats, m.game.rng_seed);
    } catch (const InvalidInput& e) {
      skipped.push_back(fmt::format("proxy alignment for {}: {}", model, e.what()));
    }
  }
  report["proxy_alignment"] = proxy;

  // Interventions.
  json interventions = json::array();
  std::map<std::string, std::vector<double>> sensitivity, stochasticity, consistency;
  const fs::path idir = fs::path(run) / "intervene";
  if (fs::exists(idir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(idir)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::ifstream in(f);
      const auto rep = json::parse(in).get<InterventionReport>();
      interventions.push_back(rep);
      sensitivity[rep.model].push_back(rep.aggregate.cr_reo_rei.mean);
      stochasticity[rep.model].push_back(rep.aggregate.cr_log_reo.mean);
      if (rep.aggregate.directional_consistency.n) {
        consistency[rep.model].push_back(rep.aggregate.directional_consistency.mean);
      }
    }
  }
  report["interventions"] = interventions;

  // Radar over models.
  const auto mean = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  std::map<std::string, std::map<std::string, double>> raw;
  for (const auto& s : stratified_summary(pooled, Stratum::kModel)) {
    auto& d = raw[s.group];
    if (s.mean_oracle) d["faithfulness"] = *s.mean_oracle;
    if (s.mean_rule) d["rule_consistency"] = *s.mean_rule;
    if (s.rho) d["judge_agreement"] = *s.rho;
  }
  for (const auto& model : m.llm_models()) {
    auto& d = raw[model];
    if (auto v = mean(final_rho[model])) d["belief_accuracy"] = *v;
    if (auto v = mean(sensitivity[model])) d["intervention_sensitivity"] = *v;
    if (auto v = mean(consistency[model])) d["directional_consistency"] = *v;
    if (auto v = mean(stochasticity[model])) d["stochasticity"] = *v;
  }
  report["radar"] = {{"raw", raw}, {"normalized", radar_dimensions(raw, {"stochasticity"})}, {"inverted", {"stochasticity"}}};
  if (raw.size() < 2) skipped.push_back("radar percentiles need two models; single-model values are 0.5");

  report["skipped"] = skipped;
  return report;
}

// ---------------------------------------------------------------------------

std::string stratified_csv(const json& strata, bool frequency_column) {
  std::string out = csv_line({"Group", "N", "Rule", "Oracle", "Rat.(Rule)", "Rat.(Oracle)", "ρ",
                              frequency_column ? "Freq." : "HighRisk"});
  for (const auto& s : strata) {
    out += csv_line({s.at("group").get<std::string>(), fmt_cell(s.at("n")), fmt_cell(s.at("rule"), 2),
                     fmt_cell(s.at("oracle"), 2), fmt_cell(s.at("rat_rule")), fmt_cell(s.at("rat_oracle")),
                     fmt_cell(s.at("rho")), fmt_cell(frequency_column ? s.at("freq") : s.at("high_risk"))});
  }
  return out;
}

std::string per_oracle_rho_csv(const json& per_oracle, const std::string& stratum) {
  std::vector<std::string> header{"Oracle", "Overall"};
  bool have_header = false;
  std::string body;
  for (const auto& [oracle, tables] : per_oracle.items()) {
    std::vector<std::string> row{oracle, fmt_cell(tables.at("all").at(0).at("rho"))};
    for (const auto& g : tables.at(stratum)) {
      if (!have_header) header.push_back(g.at("group").get<std::string>());
      row.push_back(fmt_cell(g.at("rho")));
    }
    have_header = true;
    body += csv_line(row);
  }
  return csv_line(header) + body;
}

std::string intervention_csv(const json& interventions) {
  std::string out = csv_line({"Model", "Trait", "Dir.", "ΔFold", "ΔCall", "ΔRaise", "Change Rate",
                              "Dir. Cons."});
  for (const auto& r : interventions) {
    const auto& a = r.at("aggregate");
    const auto& dc = a.at("directional_consistency");
    out += csv_line({r.at("model").get<std::string>(), r.at("trait").get<std::string>(),
                     r.at("direction").get<std::string>(), fmt_cell(a.at("delta_fold").at("mean")),
                     fmt_cell(a.at("delta_call").at("mean")), fmt_cell(a.at("delta_raise").at("mean")),
                     fmt_cell(a.at("cr_log_rei").at("mean")),
                     dc.at("n").get<std::size_t>() ? fmt_cell(dc.at("mean")) : std::string("NA")});
  }
  return out;
}

std::string rerun_csv(const json& interventions) {
  std::string out = csv_line({"Model", "Trait", "Dir.", "Runs", "CR(Log→ReI) mean", "CR(Log→ReI) var",
                              "CR(Log→ReO) mean", "CR(Log→ReO) var", "CR(ReO→ReI) mean",
                              "CR(ReO→ReI) var"});
  for (const auto& r : interventions) {
    const auto& a = r.at("aggregate");
    out += csv_line({r.at("model").get<std::string>(), r.at("trait").get<std::string>(),
                     r.at("direction").get<std::string>(), fmt_cell(a.at("runs")),
                     fmt_cell(a.at("cr_log_rei").at("mean"), 4), fmt_cell(a.at("cr_log_rei").at("var"), 6),
                     fmt_cell(a.at("cr_log_reo").at("mean"), 4), fmt_cell(a.at("cr_log_reo").at("var"), 6),
                     fmt_cell(a.at("cr_reo_rei").at("mean"), 4), fmt_cell(a.at("cr_reo_rei").at("var"), 6)});
  }
  return out;
}

std::string proxy_csv(const json& proxy) {
  std::string out = csv_line({"Model", "Trait", "Metric", "ρ", "p"});
  for (const auto& [model, rows] : proxy.items()) {
    for (const auto& r : rows) {
      out += csv_line({model, r.at("trait").get<std::string>(), r.at("proxy").get<std::string>(), fmt_cell(r.at("rho")),
                       fmt_cell(r.at("p_value"), 4)});
    }
  }
  return out;
}

std::string second_person_csv(const json& summaries) {
  const std::vector<std::pair<std::string, std::string>> cols = {
      {"overall", "Overall"}, {"aggressiveness", "Aggressiveness"}, {"risk_tolerance", "RiskTolerance"}};
  std::vector<std::string> header{"Oracle"};
  for (const auto& [key, label] : cols) {
    header.push_back(label + " ρ");
    header.push_back(label + " Acc");
  }
  std::map<std::string, std::map<std::string, json>> by_oracle;
  for (const auto& s : summaries) by_oracle[s.at("oracle").get<std::string>()][s.at("trait").get<std::string>()] = s;
  std::string out = csv_line(header);
  for (const auto& [oracle, traits] : by_oracle) {
    std::vector<std::string> row{oracle};
    for (const auto& [key, label] : cols) {
      const auto it = traits.find(key);
      row.push_back(it == traits.end() ? "NA" : fmt_cell(it->second.at("rho")));
      row.push_back(it == traits.end() ? "NA" : fmt_cell(it->second.at("acc")));
    }
    out += csv_line(row);
  }
  return out;
}

std::string matrix_csv(const json& matrix) {
  const auto names = matrix.at("oracles").get<std::vector<std::string>>();
  std::vector<std::string> header{""};
  header.insert(header.end(), names.begin(), names.end());
  std::string out = csv_line(header);
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::vector<std::string> row{names[i]};
    for (std::size_t j = 0; j < names.size(); ++j) row.push_back(fmt_cell(matrix.at("values").at(i).at(j)));
    out += csv_line(row);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string outcome_distribution_svg(const json& distribution) {
  const std::vector<std::string> streets{"preflop", "flop", "turn", "river"};
  const std::vector<std::string> labels{"Faithful", "Rationalized", "Uncertain"};
  const std::vector<std::string> colors{"#228833", "#ee6677", "#bbbbbb"};
  const int w = 520, h = 340, left = 60, top = 40, plot_h = 240, bar_w = 70, gap = 30;
  std::string out = svg_open(w, h);
  out += svg_text(w / 2.0, 22, "Outcome distribution by street", "middle", 14);
  for (int k = 0; k <= 4; ++k) {
    const double y = top + plot_h - plot_h * k / 4.0;
    out += fmt::format("<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#dddddd\"/>\n", left, y,
                       left + 4 * (bar_w + gap), y);
    out += svg_text(left - 8, y + 4, fmt::format("{:.2f}", k / 4.0), "end");
  }
  for (std::size_t i = 0; i < streets.size(); ++i) {
    const double x = left + gap / 2.0 + static_cast<double>(i) * (bar_w + gap);
    double base = top + plot_h;
    if (distribution.contains(streets[i])) {
      const auto& d = distribution.at(streets[i]);
      for (std::size_t l = 0; l < labels.size(); ++l) {
        const double v = d.value(labels[l], 0.0);
        const double bh = v * plot_h;
        base -= bh;
        out += fmt::format(
            "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{}\" height=\"{:.1f}\" fill=\"{}\"><title>{} {:.3f}</title></rect>\n",
            x, base, bar_w, bh, colors[l], labels[l], v);
      }
    }
    std::string name = streets[i];
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    out += svg_text(x + bar_w / 2.0, top + plot_h + 18, name);
  }
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const double x = left + static_cast<double>(l) * 140;
    out += fmt::format("<rect x=\"{:.1f}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", x, h - 30, colors[l]);
    out += svg_text(x + 18, h - 20, labels[l], "start");
  }
  return out + "</svg>\n";
}

std::string convergence_svg(const json& convergence) {
  const int w = 560, h = 340, left = 60, top = 40, plot_w = 340, plot_h = 240;
  int rounds = 1;
  for (const auto& [trait, entry] : convergence.items()) rounds = std::max<int>(rounds, static_cast<int>(entry.at("curve").size()));
  const auto px = [&](double round) { return left + plot_w * (rounds > 1 ? (round - 1) / (rounds - 1) : 0.5); };
  const auto py = [&](double rho) { return top + plot_h * (1.0 - (rho + 1.0) / 2.0); };
  std::string out = svg_open(w, h);
  out += svg_text(left + plot_w / 2.0, 22, "Belief ranking vs realized statistics (Spearman)", "middle", 14);
  for (double v : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    out += fmt::format("<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#dddddd\"/>\n", left, py(v),
                       left + plot_w, py(v));
    out += svg_text(left - 8, py(v) + 4, fmt::format("{:.1f}", v), "end");
  }
  out += svg_text(left + plot_w / 2.0, top + plot_h + 30, "hand");
  std::size_t color = 0;
  for (const auto& [trait, entry] : convergence.items()) {
    std::string path;
    for (const auto& p : entry.at("curve")) {
      if (p.at("mean_rho").is_null()) continue;
      path += fmt::format("{}{:.1f},{:.1f} ", path.empty() ? "M" : "L", px(p.at("round").get<double>()),
                          py(p.at("mean_rho").get<double>()));
    }
    const auto& c = kPalette[color % kPalette.size()];
    if (!path.empty()) out += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", path, c);
    const double ly = top + 14.0 * static_cast<double>(color);
    out += fmt::format("<rect x=\"{}\" y=\"{:.1f}\" width=\"12\" height=\"3\" fill=\"{}\"/>\n", left + plot_w + 15, ly, c);
    out += svg_text(left + plot_w + 32, ly + 5, trait, "start", 11);
    ++color;
  }
  return out + "</svg>\n";
}

std::string heatmap_svg(const json& matrix, const std::string& title) {
  const auto names = matrix.at("oracles").get<std::vector<std::string>>();
  const int cell = 60, left = 140, top = 50;
  const int n = static_cast<int>(names.size());
  const int w = left + n * cell + 20, h = top + n * cell + 110;
  std::string out = svg_open(w, h);
  out += svg_text(w / 2.0, 22, title, "middle", 14);
  for (int i = 0; i < n; ++i) {
    out += svg_text(left - 6, top + i * cell + cell / 2.0 + 4, names[static_cast<std::size_t>(i)], "end", 11);
    out += fmt::format("<text transform=\"translate({:.1f},{}) rotate(45)\" font-size=\"11\">{}</text>\n",
                       left + i * cell + cell / 2.0, top + n * cell + 12, xml_escape(names[static_cast<std::size_t>(i)]));
    for (int j = 0; j < n; ++j) {
      const auto& v = matrix.at("values").at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
      const std::string fill = v.is_null() ? "#eeeeee" : diverging(v.get<double>());
      out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"white\"/>\n",
                         left + j * cell, top + i * cell, cell, cell, fill);
      out += svg_text(left + j * cell + cell / 2.0, top + i * cell + cell / 2.0 + 4, fmt_cell(v, 2), "middle", 11);
    }
  }
  return out + "</svg>\n";
}

std::string radar_svg(const json& radar) {
  const auto& norm = radar.at("normalized");
  std::vector<std::string> dims;
  for (const auto& [model, d] : norm.items()) {
    for (const auto& [k, v] : d.items()) {
      if (std::find(dims.begin(), dims.end(), k) == dims.end()) dims.push_back(k);
    }
  }
  std::sort(dims.begin(), dims.end());
  const int w = 520, h = 460;
  const double cx = 230, cy = 240, r = 150;
  const double pi = std::acos(-1.0);
  const auto angle = [&](std::size_t i) { return -pi / 2 + 2 * pi * static_cast<double>(i) / static_cast<double>(dims.size()); };
  std::string out = svg_open(w, h);
  out += svg_text(w / 2.0, 22, "Model comparison (rank percentile)", "middle", 14);
  if (dims.size() < 3) return out + svg_text(w / 2.0, h / 2.0, "fewer than three dimensions") + "</svg>\n";
  for (double ring : {0.25, 0.5, 0.75, 1.0}) {
    std::string pts;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      pts += fmt::format("{:.1f},{:.1f} ", cx + r * ring * std::cos(angle(i)), cy + r * ring * std::sin(angle(i)));
    }
    out += fmt::format("<polygon points=\"{}\" fill=\"none\" stroke=\"#dddddd\"/>\n", pts);
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const double x = cx + (r + 18) * std::cos(angle(i)), y = cy + (r + 18) * std::sin(angle(i));
    out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#cccccc\"/>\n", cx, cy,
                       cx + r * std::cos(angle(i)), cy + r * std::sin(angle(i)));
    out += svg_text(x, y + 4, dims[i], std::cos(angle(i)) > 0.3 ? "start" : std::cos(angle(i)) < -0.3 ? "end" : "middle", 11);
  }
  std::size_t color = 0;
  for (const auto& [model, d] : norm.items()) {
    std::string pts;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const double v = d.value(dims[i], 0.0);
      pts += fmt::format("{:.1f},{:.1f} ", cx + r * v * std::cos(angle(i)), cy + r * v * std::sin(angle(i)));
    }
    const auto& c = kPalette[color % kPalette.size()];
    out += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"{}\" stroke-width=\"2\"/>\n", pts,
                       c, c);
    out += fmt::format("<rect x=\"400\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", 50 + 18 * color, c);
    out += svg_text(418, 60.0 + 18.0 * static_cast<double>(color), model, "start", 11);
    ++color;
  }
  return out + "</svg>\n";
}

std::vector<std::string> render_report(const json& report, const std::string& dir) {
  fs::create_directories(dir);
  std::vector<std::string> written;
  const auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(fs::path(dir) / name, std::ios::trunc);
    if (!out) throw RunError(fmt::format("cannot write {}", (fs::path(dir) / name).string()));
    out << body;
    written.push_back(name);
  };
  put("report.json", report.dump(2) + "\n");
  const auto& fp = report.at("first_person");
  const auto& pooled = fp.at("pooled");
  put("table_overall.csv", stratified_csv(pooled.at("all"), false));
  put("table_street.csv", stratified_csv(pooled.at("street"), false));
  put("table_risk.csv", stratified_csv(pooled.at("risk"), true));
  put("table_model.csv", stratified_csv(pooled.at("model"), false));
  put("table_bucket.csv", stratified_csv(pooled.at("bucket"), false));
  put("table_action.csv", stratified_csv(pooled.at("action"), false));
  if (!fp.at("per_oracle").empty()) {
    for (const char* s : {"street", "bucket", "action"}) {
      put(fmt::format("oracle_rho_{}.csv", s), per_oracle_rho_csv(fp.at("per_oracle"), s));
    }
  }
  put("outcome_distribution.svg", outcome_distribution_svg(fp.at("outcome_distribution")));
  put("convergence.svg", convergence_svg(report.at("convergence")));
  put("second_person.csv", second_person_csv(report.at("second_person")));
  put("proxy_alignment.csv", proxy_csv(report.at("proxy_alignment")));
  if (!report.at("interventions").empty()) {
    put("intervention.csv", intervention_csv(report.at("interventions")));
    put("rerun_variability.csv", rerun_csv(report.at("interventions")));
  }
  for (const auto& [dim, mats] : report.at("oracle_agreement").items()) {
    put(fmt::format("kappa_{}.csv", dim), matrix_csv(mats.at("kappa")));
    put(fmt::format("kappa_{}.svg", dim), heatmap_svg(mats.at("kappa"), fmt::format("Quadratic kappa: {}", dim)));
    put(fmt::format("spearman_{}.csv", dim), matrix_csv(mats.at("spearman")));
  }
  put("radar.svg", radar_svg(report.at("radar")));
  return written;
}

}  // namespace triex
