#include "triex/templates.hpp"

#include <fmt/format.h>

#include "triex/hash.hpp"

namespace triex {
namespace detail {
// Generated at configure time from assets/templates.
extern const char* const kTemplateSources[4];
}  // namespace detail

namespace {

struct TemplateInfo {
  std::string_view name;
  std::vector<Placeholder> placeholders;
  bool doubled_braces;  // "{{" and "}}" stand for literal braces
};

const TemplateInfo& info(TemplateId id) {
  static const std::array<TemplateInfo, 4> table = {{
      {"first_person",
       {{"hole_cards", ""},
        {"community_cards", ""},
        {"street", ""},
        {"pot_size", ""},
        {"call_amount", ""},
        {"min_raise", ""},
        {"max_raise", ""},
        {"pot_odds", ".2f"},
        {"position_text", ""},
        {"opponent_actions_text", ""},
        {"opponent_profiles_text", ""}},
       false},
      {"opponent_profile", {{"summary_text", ""}}, false},
      {"oracle_first_person",
       {{"sample.get(\"player\")", ""},
        {"sample.get(\"round\")", ""},
        {"sample.get(\"street\")", ""},
        {"hole_cards_str", ""},
        {"board_cards_str", ""},
        {"pot_size", ""},
        {"call_amount", ""},
        {"min_raise", ""},
        {"max_raise", ""},
        {"position_info_str", ""},
        {"opp_actions_str", ""},
        {"hs_str", ""},
        {"hs_bucket", ""},
        {"pot_odds_str", ""},
        {"risk_str", ""},
        {"self_reasoning", ""},
        {"profiles_str", ""},
        {"action_str", ""}},
       true},
      {"oracle_second_person", {}, false},
  }};
  return table[static_cast<std::size_t>(id)];
}

const Placeholder* match(const TemplateInfo& ti, std::string_view inner) {
  for (const auto& p : ti.placeholders) {
    if (p.spec.empty() ? inner == p.name : inner == p.name + ":" + p.spec) return &p;
  }
  return nullptr;
}

std::string format_value(const Placeholder& p, const TemplateValue& v) {
  try {
    return std::visit(
        [&](const auto& x) -> std::string {
          if (p.spec.empty()) return fmt::format("{}", x);
          return fmt::format(fmt::runtime("{:" + p.spec + "}"), x);
        },
        v);
  } catch (const fmt::format_error& e) {
    throw RenderError(fmt::format("placeholder '{}': {}", p.name, e.what()));
  }
}

}  // namespace

std::string_view template_name(TemplateId id) { return info(id).name; }

const std::string& template_text(TemplateId id) {
  static const std::array<std::string, 4> texts = {
      detail::kTemplateSources[0], detail::kTemplateSources[1], detail::kTemplateSources[2],
      detail::kTemplateSources[3]};
  return texts[static_cast<std::size_t>(id)];
}

std::string template_hash(TemplateId id) { return sha256_hex(template_text(id)); }

const std::vector<Placeholder>& template_placeholders(TemplateId id) { return info(id).placeholders; }

std::string render_template(TemplateId id, const std::map<std::string, TemplateValue>& values) {
  const TemplateInfo& ti = info(id);
  for (const auto& [key, _] : values) {
    bool declared = false;
    for (const auto& p : ti.placeholders) declared = declared || p.name == key;
    if (!declared) throw RenderError(fmt::format("{}: undeclared placeholder '{}'", ti.name, key));
  }
  const std::string& text = template_text(id);
  std::string out;
  out.reserve(text.size() + 512);
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (ti.doubled_braces && (c == '{' || c == '}') && i + 1 < text.size() && text[i + 1] == c) {
      out.push_back(c);
      i += 2;
      continue;
    }
    if (c == '{') {
      const auto close = text.find('}', i + 1);
      if (close != std::string::npos) {
        const std::string_view inner(text.data() + i + 1, close - i - 1);
        if (const Placeholder* p = match(ti, inner)) {
          const auto it = values.find(p->name);
          if (it == values.end()) {
            throw RenderError(fmt::format("{}: missing value for '{}'", ti.name, p->name));
          }
          out += format_value(*p, it->second);
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

}  // namespace triex
