#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace triex {

enum class TemplateId : std::uint8_t {
  kFirstPerson = 0,
  kOpponentProfile,
  kOracleFirstPerson,
  kOracleSecondPerson,
};

inline constexpr std::array<TemplateId, 4> kAllTemplates = {
    TemplateId::kFirstPerson, TemplateId::kOpponentProfile, TemplateId::kOracleFirstPerson,
    TemplateId::kOracleSecondPerson};

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Placeholder {
  std::string name;  // text inside the braces, without the format spec
  std::string spec;  // e.g. ".2f"; empty for plain substitution
};

std::string_view template_name(TemplateId id);

// Template bytes exactly as shipped in assets/templates.
const std::string& template_text(TemplateId id);

std::string template_hash(TemplateId id);

// Declared placeholders. Any other brace group in the template is literal text.
const std::vector<Placeholder>& template_placeholders(TemplateId id);

using TemplateValue = std::variant<std::string, double, long long>;

// Substitutes every declared placeholder. Throws RenderError when a value is
// missing, a format spec does not fit the value, or an undeclared key is
// supplied. Templates written with doubled braces have them collapsed.
std::string render_template(TemplateId id, const std::map<std::string, TemplateValue>& values);

}  // namespace triex
