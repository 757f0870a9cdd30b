#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intentdisc {

enum class Partition { train, validation, test };

std::string_view to_string(Partition p) noexcept;
Partition partition_from_string(std::string_view s);

/// One labelled query.
struct Utterance {
  std::int64_t id = 0;
  std::string text;
  std::string label;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

/// An intent corpus with per-utterance partition tags.
struct Corpus {
  std::string name;
  std::vector<Utterance> utterances;
  std::vector<Partition> partitions;    // parallel to utterances
  std::vector<std::string> label_set;   // first-appearance order

  /// Indices into `utterances` of the given label and partition, in file order.
  std::vector<std::size_t> indices_of(std::string_view label, Partition p) const;
  std::size_t count(Partition p) const;
};

enum class CorpusFormat { jsonl, tsv };

CorpusFormat corpus_format_from_string(std::string_view s);

/// Reads a corpus. JSON-lines records are {"text", "label", "partition"[, "id"]};
/// TSV rows are text<TAB>label<TAB>partition[<TAB>id] with an optional header row.
/// Ids default to the 1-based record ordinal. Throws DataError naming the line.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus parse_corpus(std::istream& in, CorpusFormat format, std::string name);

enum class RatioTag { r3_1, r3_2, r1_1, custom };

std::string_view to_string(RatioTag t) noexcept;
RatioTag ratio_tag_from_string(std::string_view s);
RatioTag ratio_tag_for(int n_ind, int m_ood) noexcept;

/// Label lists supplied verbatim instead of being sampled. The first n_ind / m_ood
/// entries are used, so one 15+15 list serves all three ratio settings.
struct FixedLabels {
  std::vector<std::string> ind;
  std::vector<std::string> ood;

  friend bool operator==(const FixedLabels&, const FixedLabels&) = default;
};

struct SplitConfig {
  int n_ind = 15;
  int m_ood = 5;
  int discovery_per_class = 5;
  int gid_per_class = 10;
  int demos_per_class = 3;
  int ood_demos_per_class = 0;
  std::optional<FixedLabels> fixed_labels;

  friend bool operator==(const SplitConfig&, const SplitConfig&) = default;
};

/// Sampled IND/OOD label sets and query pools for one ratio setting.
struct ExperimentSplit {
  std::string corpus_name;
  std::vector<std::string> ind_labels;
  std::vector<std::string> ood_labels;
  std::vector<Utterance> discovery_pool;   // OOD test queries, grouped by class
  std::vector<Utterance> gid_test_pool;    // test queries over IND then OOD classes
  std::map<std::string, std::vector<Utterance>> demo_pool;       // IND train demos
  std::map<std::string, std::vector<Utterance>> ood_demo_pool;   // OOD train demos
  std::uint64_t seed = 0;
  RatioTag ratio_tag = RatioTag::custom;
  SplitConfig config;

  bool is_ind(std::string_view label) const;
  bool is_ood(std::string_view label) const;

  friend bool operator==(const ExperimentSplit&, const ExperimentSplit&) = default;
};

/// Deterministic for a given (corpus, config, seed). Throws DataError when a class
/// lacks samples or fixed label lists overlap or name unknown labels.
ExperimentSplit make_split(const Corpus& corpus, const SplitConfig& config, std::uint64_t seed);

/// Reads the shipped 15 IND + 15 OOD Banking label fixture.
FixedLabels load_fixed_labels(const std::filesystem::path& path);

inline constexpr int kSplitSchemaVersion = 1;

void write_split(const ExperimentSplit& split, const std::filesystem::path& path);
ExperimentSplit read_split(const std::filesystem::path& path);
std::string serialize_split(const ExperimentSplit& split);
ExperimentSplit deserialize_split(std::string_view text);

}  // namespace intentdisc
