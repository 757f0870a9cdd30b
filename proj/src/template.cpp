#include "intentdisc/template.hpp"

#include <cctype>

#include "intentdisc/errors.hpp"

namespace intentdisc {

Template Template::parse(std::string_view text, std::string name) {
  Template t;
  t.name_ = std::move(name);
  // Stack of open sections; the bottom frame is the template body.
  std::vector<std::pair<std::string, std::vector<Node>>> stack;
  stack.emplace_back("", std::vector<Node>{});
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      stack.back().second.emplace_back(Literal{std::string(text.substr(pos))});
      break;
    }
    if (open > pos) stack.back().second.emplace_back(Literal{std::string(text.substr(pos, open - pos))});
    const auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) throw ConfigError("template " + t.name_ + ": unterminated '{{'");
    std::string_view tag = text.substr(open + 2, close - open - 2);
    pos = close + 2;
    if (tag.empty()) throw ConfigError("template " + t.name_ + ": empty placeholder");
    const char kind = tag.front();
    if (kind == '#' || kind == '/') tag.remove_prefix(1);
    for (char c : tag) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
        throw ConfigError("template " + t.name_ + ": bad placeholder name '" + std::string(tag) + "'");
      }
    }
    std::string tag_name(tag);
    t.names_.insert(tag_name);
    if (kind == '#') {
      stack.emplace_back(tag_name, std::vector<Node>{});
    } else if (kind == '/') {
      if (stack.size() == 1 || stack.back().first != tag_name) {
        throw ConfigError("template " + t.name_ + ": unexpected closing tag {{/" + tag_name + "}}");
      }
      Section section{std::move(stack.back().first), std::move(stack.back().second)};
      stack.pop_back();
      stack.back().second.emplace_back(std::move(section));
    } else {
      stack.back().second.emplace_back(Placeholder{std::move(tag_name)});
    }
  }
  if (stack.size() != 1) throw ConfigError("template " + t.name_ + ": unclosed section {{#" + stack.back().first + "}}");
  t.nodes_ = std::move(stack.front().second);
  return t;
}

void Template::render_nodes(const std::vector<Node>& nodes, const TemplateValues& values, const std::string& tname,
                            std::string& out) {
  for (const Node& node : nodes) {
    if (const auto* lit = std::get_if<Literal>(&node)) {
      out += lit->text;
    } else if (const auto* ph = std::get_if<Placeholder>(&node)) {
      const auto it = values.find(ph->name);
      if (it == values.end()) throw ConfigError("template " + tname + ": no value for {{" + ph->name + "}}");
      out += it->second;
    } else {
      const auto& section = std::get<Section>(node);
      const auto it = values.find(section.name);
      if (it != values.end() && !it->second.empty()) render_nodes(section.body, values, tname, out);
    }
  }
}

std::string Template::render(const TemplateValues& values) const {
  std::string out;
  render_nodes(nodes_, values, name_, out);
  return out;
}

}  // namespace intentdisc
