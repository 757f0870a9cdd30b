#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace intentdisc {

struct Cluster {
  int index = 0;
  std::vector<int> positions;  // prompt positions in response order

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct ParseDiagnostics {
  std::vector<int> foreign_positions;   // listed positions outside 1..n, excluded from scoring
  int ignored_lines = 0;                // non-empty lines that are not category lines
  int duplicates_within_cluster = 0;    // a position listed twice under one category

  friend bool operator==(const ParseDiagnostics&, const ParseDiagnostics&) = default;
};

/// Clusters as the model listed them. Overlaps and gaps are recorded here, never repaired.
struct ClusterAssignment {
  int n = 0;                       // positions 1..n were shown to the model
  std::vector<Cluster> clusters;   // order of first appearance in the response
  std::map<int, std::string> descriptions;
  std::string raw;
  ParseDiagnostics diagnostics;

  std::size_t k() const noexcept { return clusters.size(); }
  const Cluster* find(int index) const;
};

/// Recognizes `Category <i>: <list>` lines; list separators are commas, whitespace,
/// semicolons and "and". Throws ParseError when no such line exists.
ClusterAssignment parse_cluster_assignment(std::string_view response, int n);

/// Renders `Category <i>: a,b,c` lines, one per cluster.
std::string format_cluster_assignment(const ClusterAssignment& assignment);

struct IntentDescriptions {
  std::map<int, std::string> by_cluster;  // 1..k, placeholders for gaps
  std::vector<int> missing;               // categories that got a placeholder
  int shortfall() const noexcept { return static_cast<int>(missing.size()); }
};

/// Accepts `Category <i>: <text>` and `<i>. <text>` summary lines for categories 1..k.
IntentDescriptions parse_intent_descriptions(std::string_view response, int k);

struct ClassificationAnswer {
  std::vector<int> chosen;  // 1-based intent indices in order of appearance
  bool refusal = false;
  std::string raw;

  friend bool operator==(const ClassificationAnswer&, const ClassificationAnswer&) = default;
};

const std::vector<std::string>& default_refusal_phrases();
/// Reads one phrase per line; blank lines and '#' comments are skipped.
std::vector<std::string> load_refusal_phrases(const std::string& path);

/// Numeric category references win, then intent-text mentions, then refusal phrases.
ClassificationAnswer parse_classification(std::string_view response, const std::vector<std::string>& joint_labels,
                                          const std::vector<std::string>& refusal_phrases = default_refusal_phrases());

}  // namespace intentdisc
