#include "intentdisc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>

#include "intentdisc/errors.hpp"
#include "intentdisc/text.hpp"

namespace intentdisc {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

// Markdown emphasis, code ticks, headings and bullets are dropped before matching.
std::string strip_markdown(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '*' || c == '`') continue;
    if (c == '_' && i + 1 < line.size() && line[i + 1] == '_') {
      ++i;
      continue;
    }
    out.push_back(c);
  }
  std::string t = trim(out);
  std::size_t start = 0;
  while (start < t.size() && t[start] == '#') ++start;
  if (start < t.size() && (t[start] == '-' || t[start] == '+') && start + 1 < t.size() && t[start + 1] == ' ') ++start;
  return trim(std::string_view(t).substr(start));
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  lines.push_back(current);
  return lines;
}

std::optional<int> read_int(std::string_view s, std::size_t& i) {
  if (i >= s.size() || !is_digit(s[i])) return std::nullopt;
  long long value = 0;
  while (i < s.size() && is_digit(s[i])) {
    if (value < 100000000) value = value * 10 + (s[i] - '0');
    ++i;
  }
  return static_cast<int>(std::min<long long>(value, 1000000000));
}

// Leading integer list of `s`. Stops at the first token that is neither an integer nor a separator.
std::vector<int> leading_int_list(std::string_view s) {
  std::vector<int> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == ',' || c == ';' || c == '.' || c == '&' || std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if ((c == 'a' || c == 'A') && s.size() - i >= 3 && to_lower(s.substr(i, 3)) == "and" &&
        (i + 3 == s.size() || !is_word(s[i + 3]))) {
      i += 3;
      continue;
    }
    if (auto v = read_int(s, i)) {
      if (i < s.size() && is_word(s[i])) break;  // "3rd", "5x": not a position
      out.push_back(*v);
      continue;
    }
    break;
  }
  return out;
}

struct CategoryLine {
  int index;
  std::string rest;
};

// "Category <i> <sep> <rest>", case-insensitive, tolerant of spacing.
std::optional<CategoryLine> match_category_line(const std::string& line) {
  static constexpr std::string_view kWord = "category";
  if (line.size() < kWord.size() || to_lower(std::string_view(line).substr(0, kWord.size())) != kWord) {
    return std::nullopt;
  }
  std::size_t i = kWord.size();
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  const auto index = read_int(line, i);
  if (!index) return std::nullopt;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (i < line.size()) {
    // Separators: ':' '-' ')' '.' and the UTF-8 full-width colon / en dash / em dash.
    const std::string_view rest(line.c_str() + i, line.size() - i);
    if (rest[0] == ':' || rest[0] == '-' || rest[0] == ')' || rest[0] == '.') {
      ++i;
    } else if (rest.rfind("\xEF\xBC\x9A", 0) == 0 || rest.rfind("\xE2\x80\x93", 0) == 0 ||
               rest.rfind("\xE2\x80\x94", 0) == 0) {
      i += 3;
    } else {
      return std::nullopt;
    }
  }
  return CategoryLine{*index, trim(std::string_view(line).substr(std::min(i, line.size())))};
}

}  // namespace

const Cluster* ClusterAssignment::find(int index) const {
  for (const auto& c : clusters) {
    if (c.index == index) return &c;
  }
  return nullptr;
}

ClusterAssignment parse_cluster_assignment(std::string_view response, int n) {
  ClusterAssignment result;
  result.n = n;
  result.raw = std::string(response);
  bool recognized = false;
  for (const std::string& raw_line : split_lines(response)) {
    const std::string line = strip_markdown(raw_line);
    if (line.empty()) continue;
    const auto cat = match_category_line(line);
    const std::vector<int> listed = cat ? leading_int_list(cat->rest) : std::vector<int>{};
    if (!cat || cat->index <= 0 || listed.empty()) {
      ++result.diagnostics.ignored_lines;
      continue;
    }
    recognized = true;
    auto it = std::find_if(result.clusters.begin(), result.clusters.end(),
                           [&](const Cluster& c) { return c.index == cat->index; });
    if (it == result.clusters.end()) {
      result.clusters.push_back(Cluster{cat->index, {}});
      it = std::prev(result.clusters.end());
    }
    for (int p : listed) {
      if (p < 1 || p > n) {
        result.diagnostics.foreign_positions.push_back(p);
      } else if (std::find(it->positions.begin(), it->positions.end(), p) != it->positions.end()) {
        ++result.diagnostics.duplicates_within_cluster;
      } else {
        it->positions.push_back(p);
      }
    }
  }
  if (!recognized) throw ParseError("unparseable response: no \"Category <i>: <positions>\" line found");
  return result;
}

std::string format_cluster_assignment(const ClusterAssignment& assignment) {
  std::ostringstream out;
  for (std::size_t c = 0; c < assignment.clusters.size(); ++c) {
    const Cluster& cluster = assignment.clusters[c];
    if (c) out << '\n';
    out << "Category " << cluster.index << ": ";
    for (std::size_t i = 0; i < cluster.positions.size(); ++i) {
      if (i) out << ',';
      out << cluster.positions[i];
    }
  }
  return out.str();
}

IntentDescriptions parse_intent_descriptions(std::string_view response, int k) {
  IntentDescriptions out;
  for (const std::string& raw_line : split_lines(response)) {
    const std::string line = strip_markdown(raw_line);
    if (line.empty()) continue;
    std::optional<int> index;
    std::string text;
    if (const auto cat = match_category_line(line)) {
      if (!leading_int_list(cat->rest).empty()) continue;  // an assignment line, not a summary
      index = cat->index;
      text = cat->rest;
    } else {
      std::size_t i = 0;
      const auto v = read_int(line, i);
      if (v && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        const std::string rest = trim(std::string_view(line).substr(i + 1));
        if (!rest.empty() && !is_digit(rest.front())) {
          index = v;
          text = rest;
        }
      }
    }
    if (!index || *index < 1 || *index > k || text.empty()) continue;
    out.by_cluster.emplace(*index, text);  // first mention wins
  }
  for (int i = 1; i <= k; ++i) {
    if (!out.by_cluster.count(i)) {
      out.by_cluster.emplace(i, "unlabeled cluster " + std::to_string(i));
      out.missing.push_back(i);
    }
  }
  return out;
}

const std::vector<std::string>& default_refusal_phrases() {
  static const std::vector<std::string> phrases = {"does not fit in any category", "not related to"};
  return phrases;
}

std::vector<std::string> load_refusal_phrases(const std::string& path) { return read_lines(path); }

namespace {

std::string normalize_for_match(std::string_view s) {
  std::string out = to_lower(s);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

// Integers that read as category references: standalone, not decimals, not "Set <n>".
std::vector<int> numeric_references(std::string_view text, int n_labels) {
  std::vector<int> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    const auto v = read_int(text, i);
    const bool glued_before = start > 0 && (is_word(text[start - 1]) ||
                                            (text[start - 1] == '.' && start > 1 && is_digit(text[start - 2])));
    const bool glued_after = i < text.size() && (is_word(text[i]) ||
                                                 (text[i] == '.' && i + 1 < text.size() && is_digit(text[i + 1])));
    if (glued_before || glued_after) {
      while (i < text.size() && (is_word(text[i]) || text[i] == '.')) ++i;
      continue;
    }
    std::size_t b = start;
    while (b > 0 && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
    const bool after_set = b >= 3 && to_lower(text.substr(b - 3, 3)) == "set" && (b == 3 || !is_word(text[b - 4]));
    if (!after_set && *v >= 1 && *v <= n_labels && std::find(out.begin(), out.end(), *v) == out.end()) {
      out.push_back(*v);
    }
  }
  return out;
}

std::vector<int> textual_references(std::string_view text, const std::vector<std::string>& labels) {
  const std::string hay = normalize_for_match(text);
  std::vector<std::pair<std::size_t, int>> hits;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const std::string needle = normalize_for_match(trim(labels[l]));
    if (needle.empty()) continue;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
      const bool left_ok = pos == 0 || !is_word(hay[pos - 1]);
      const std::size_t end = pos + needle.size();
      const bool right_ok = end == hay.size() || !is_word(hay[end]);
      if (left_ok && right_ok) {
        hits.emplace_back(pos, static_cast<int>(l) + 1);
        break;
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<int> out;
  for (const auto& [pos, index] : hits) out.push_back(index);
  return out;
}

}  // namespace

ClassificationAnswer parse_classification(std::string_view response, const std::vector<std::string>& joint_labels,
                                          const std::vector<std::string>& refusal_phrases) {
  ClassificationAnswer answer;
  answer.raw = std::string(response);
  std::string cleaned;
  for (const auto& line : split_lines(response)) {
    if (!cleaned.empty()) cleaned.push_back('\n');
    cleaned += strip_markdown(line);
  }
  answer.chosen = numeric_references(cleaned, static_cast<int>(joint_labels.size()));
  if (!answer.chosen.empty()) return answer;
  answer.chosen = textual_references(cleaned, joint_labels);
  if (!answer.chosen.empty()) return answer;
  const std::string lowered = to_lower(cleaned);
  for (const auto& phrase : refusal_phrases) {
    if (!phrase.empty() && lowered.find(to_lower(phrase)) != std::string::npos) {
      answer.refusal = true;
      break;
    }
  }
  return answer;
}

}  // namespace intentdisc
