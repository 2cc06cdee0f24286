// Python bindings. Structured values cross the boundary as JSON text; the
// package wrapper decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "triex/artifacts.hpp"
#include "triex/equity.hpp"
#include "triex/pipeline.hpp"
#include "triex/rng.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

triex::RunManifest manifest_from(const std::string& text) {
  triex::RunManifest m = text.empty() ? triex::default_manifest() : json::parse(text).get<triex::RunManifest>();
  m.validate();
  return m;
}

triex::Direction direction(const std::string& d) {
  const auto parsed = triex::parse_direction(d);
  if (!parsed) throw triex::InvalidInput("direction must be 'up' or 'down'");
  return *parsed;
}

triex::HoleCards hole(const std::string& text) {
  const auto cards = triex::parse_cards(text);
  if (cards.size() != 2) throw triex::InvalidInput("hole needs exactly two cards");
  return {cards[0], cards[1]};
}

std::string stage_json(const triex::StageResult& r) {
  return json{{"run", r.run}, {"skipped", r.skipped}, {"summary", r.summary}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "triex native core";

  py::register_exception<triex::InvalidInput>(mod, "InvalidInput", PyExc_ValueError);
  py::register_exception<triex::ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<triex::RunError>(mod, "RunError", PyExc_RuntimeError);

  mod.def(
      "intervene",
      [](double p, double delta, const std::string& dir) {
        triex::TraitVector v;
        v[triex::Trait::kAggressiveness] = p;
        return triex::intervene(v, {triex::Trait::kAggressiveness, direction(dir), delta})
            .traits[triex::Trait::kAggressiveness];
      },
      py::arg("p"), py::arg("delta") = 2.5, py::arg("direction") = "up");

  mod.def(
      "bounded_update",
      [](const std::vector<double>& prior, const std::vector<double>& proposed) {
        if (prior.size() != triex::kTraitCount || proposed.size() != triex::kTraitCount) {
          throw triex::InvalidInput("trait vectors have five entries");
        }
        triex::OpponentProfile p = triex::initial_profile("opponent");
        triex::TraitVector target;
        for (std::size_t k = 0; k < triex::kTraitCount; ++k) {
          p.traits.values[k] = prior[k];
          target.values[k] = proposed[k];
        }
        const auto after = triex::apply_bounded_update(p, target, "", "", 0);
        return std::vector<double>(after.traits.values.begin(), after.traits.values.end());
      },
      py::arg("prior"), py::arg("proposed"));

  mod.def("spearman", py::overload_cast<const std::vector<double>&, const std::vector<double>&>(&triex::spearman),
          py::arg("x"), py::arg("y"));
  mod.def(
      "kappa_quadratic",
      [](const std::vector<int>& a, const std::vector<int>& b, int lo, int hi) {
        return triex::cohens_kappa_quadratic(a, b, lo, hi);
      },
      py::arg("a"), py::arg("b"), py::arg("lo") = 1, py::arg("hi") = 5);

  mod.def(
      "estimate_equity",
      [](const std::string& h, const std::string& board, int opponents, int sims, std::uint64_t seed) {
        triex::Rng rng(seed);
        const auto b = triex::parse_cards(board);
        return triex::estimate_equity(hole(h), b, opponents, sims, rng);
      },
      py::arg("hole"), py::arg("board") = "", py::arg("opponents") = 1, py::arg("sims") = 1000, py::arg("seed") = 7);
  mod.def(
      "exact_equity_heads_up",
      [](const std::string& h, const std::string& board) {
        return triex::exact_equity_heads_up(hole(h), triex::parse_cards(board));
      },
      py::arg("hole"), py::arg("board"));

  mod.def(
      "parse_first_person_json",
      [](const std::string& text) {
        const auto a = triex::parse_first_person(text);
        json out{{"signature", a.signature}, {"block_found", a.block_found}, {"decision", nullptr}};
        if (a.decision) out["decision"] = *a.decision;
        return out.dump();
      },
      py::arg("text"));

  mod.def("default_manifest_json", [] { return json(triex::default_manifest()).dump(); });

  // Pipeline stages; `manifest` is JSON text, empty for the default manifest.
  mod.def(
      "play_json",
      [](const std::string& manifest) {
        const auto m = manifest_from(manifest);
        py::gil_scoped_release release;
        triex::ClientPool clients(m);
        return stage_json(triex::play_stage(m, clients));
      },
      py::arg("manifest"));
  mod.def(
      "audit_json",
      [](const std::string& manifest, const std::vector<std::string>& oracles, bool offline) {
        const auto m = manifest_from(manifest);
        py::gil_scoped_release release;
        triex::ClientPool clients(m);
        return stage_json(triex::audit_stage(m, clients, {oracles, offline}));
      },
      py::arg("manifest"), py::arg("oracles"), py::arg("offline"));
  mod.def(
      "metrics_json",
      [](const std::string& manifest) {
        const auto m = manifest_from(manifest);
        py::gil_scoped_release release;
        return stage_json(triex::metrics_stage(m));
      },
      py::arg("manifest"));
  mod.def(
      "report_json",
      [](const std::string& manifest) {
        const auto m = manifest_from(manifest);
        py::gil_scoped_release release;
        return stage_json(triex::report_stage(m));
      },
      py::arg("manifest"));
}
