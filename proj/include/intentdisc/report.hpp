#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "intentdisc/metrics.hpp"
#include "intentdisc/recall.hpp"

namespace intentdisc {

struct BaselineK {
  int k_prime = 0;
  int k_pred = 0;
  std::optional<int> k_error;
  std::vector<int> cluster_sizes;
};

struct ProvenanceCounts {
  std::size_t live = 0;
  std::size_t replay = 0;
  std::size_t scripted = 0;

  friend bool operator==(const ProvenanceCounts&, const ProvenanceCounts&) = default;
};

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  std::optional<ClusteringScores> clustering;
  std::optional<GroupScores> group;
  RecallReport recall;
  std::optional<RecallReport> stage1_recall;
  std::optional<int> k_true;
  std::optional<int> k_pred;
  std::optional<int> k_error;
  std::optional<BaselineK> baseline_k;
  std::vector<std::string> pseudo_intents;
  int description_shortfall = 0;
  std::map<std::string, std::string> alignment;
  std::vector<int> foreign_positions;
  std::vector<std::int64_t> position_ids;  // utterance id per prompt position / stage-2 query
  std::vector<int> assignment;             // repaired cluster or intent index per position
  ProvenanceCounts provenance;
};

struct MeanScores {
  std::optional<ClusteringScores> clustering;
  std::optional<GroupScores> group;
  std::optional<double> k_pred;
  std::optional<double> k_error;
  std::optional<double> baseline_k_pred;
  std::optional<double> baseline_k_error;
  double missing_rate = 0.0;
  double repeated_rate = 0.0;
};

/// Run-averaged recall rates: mean of per-run rates, and rates pooled over all samples.
struct RecallSummary {
  double run_mean_missing_rate = 0.0;
  double run_mean_repeated_rate = 0.0;
  double pooled_missing_rate = 0.0;
  double pooled_repeated_rate = 0.0;
};

struct EvalReport {
  std::string task;     // discovery | gid | estimate_k
  std::string tag;      // study point label
  std::string method;   // DC, GID-FSD, ...
  std::string variant;
  nlohmann::json config;
  std::vector<RunRecord> runs;
  MeanScores mean;
  RecallSummary recall_summary;
  ProvenanceCounts provenance;
};

/// Fills mean, recall_summary and provenance from the per-run records.
void finalize(EvalReport& report);
/// Throws std::logic_error if any stored mean differs from the recomputed one.
void check_means(const EvalReport& report);

void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);

enum class ReportFormat { json, csv, markdown };
ReportFormat report_format_from_string(std::string_view s);

std::string render_report(const std::vector<EvalReport>& reports, ReportFormat format);
/// Checks means, then writes. Throws ConfigError when the path is unwritable.
void emit_report(const std::vector<EvalReport>& reports, ReportFormat format, const std::filesystem::path& path);
std::vector<EvalReport> read_reports(const std::filesystem::path& path);
std::vector<EvalReport> parse_reports(std::string_view json_text);

}  // namespace intentdisc
