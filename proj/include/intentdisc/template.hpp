#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace intentdisc {

/// Values bound to template placeholders. An absent or empty value elides any
/// `{{#name}}...{{/name}}` section guarded by it.
using TemplateValues = std::map<std::string, std::string, std::less<>>;

/// Prompt template with `{{name}}` substitution and `{{#name}}...{{/name}}` sections.
class Template {
 public:
  /// Throws ConfigError on unbalanced sections or malformed tags.
  static Template parse(std::string_view text, std::string name);

  /// Throws ConfigError if a bare placeholder has no bound value.
  std::string render(const TemplateValues& values) const;

  const std::string& name() const noexcept { return name_; }
  /// Every name used, either as a placeholder or as a section guard.
  const std::set<std::string>& names() const noexcept { return names_; }
  /// True if the name occurs as a placeholder or section guard.
  bool uses(std::string_view placeholder) const { return names_.count(std::string(placeholder)) != 0; }

 private:
  struct Literal {
    std::string text;
  };
  struct Placeholder {
    std::string name;
  };
  struct Section;
  using Node = std::variant<Literal, Placeholder, Section>;
  struct Section {
    std::string name;
    std::vector<Node> body;
  };

  static void render_nodes(const std::vector<Node>& nodes, const TemplateValues& values, const std::string& tname,
                           std::string& out);

  std::string name_;
  std::vector<Node> nodes_;
  std::set<std::string> names_;
};

}  // namespace intentdisc
