#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "intentdisc/corpus.hpp"
#include "intentdisc/gateway.hpp"
#include "intentdisc/prompt.hpp"

namespace intentdisc {

enum class DemoStrategy { none, ind, ood };
enum class IntentSetSource { pseudo, ground_truth, ground_truth_with_descriptions };
enum class StudyKind { sample_sweep, demo_strategy, intent_set_ablation, prompt_variants, estimate_k, provider_matrix };

std::string_view to_string(DemoStrategy d) noexcept;
std::string_view to_string(IntentSetSource s) noexcept;
std::string_view to_string(StudyKind s) noexcept;
DemoStrategy demo_strategy_from_string(std::string_view s);
IntentSetSource intent_set_source_from_string(std::string_view s);
StudyKind study_kind_from_string(std::string_view s);

struct StudyKnobs {
  std::vector<int> samples_per_class{1, 5, 10, 15};
  std::optional<DemoStrategy> demo_strategy;
  std::vector<DemoStrategy> demo_strategies{DemoStrategy::none, DemoStrategy::ind, DemoStrategy::ood};
  IntentSetSource intent_set_source = IntentSetSource::pseudo;
  bool include_cluster_count = true;
  std::optional<std::string> descriptions_path;
  std::vector<PromptVariant> variants{PromptVariant::Original, PromptVariant::Paraphrase, PromptVariant::Verbosity,
                                      PromptVariant::Simplification};
  std::vector<ProviderConfig> providers;
  std::optional<std::string> embeddings_path;
  std::optional<int> k_prime;
  std::optional<double> k_prime_multiplier;
  double size_threshold_ratio = 0.9;
};

/// Everything one experiment needs. Paths are resolved against the config file's directory.
struct ExperimentConfig {
  std::optional<std::string> corpus_path;
  CorpusFormat corpus_format = CorpusFormat::jsonl;
  SplitConfig split;
  std::optional<std::string> fixed_labels_path;
  std::optional<std::string> split_path;

  DiscoveryMethod method = DiscoveryMethod::DC;
  bool gid = false;
  PromptVariant variant = PromptVariant::Original;

  ProviderConfig provider;
  SessionMode session_mode = SessionMode::replay;
  std::optional<std::string> store_path;
  std::optional<std::string> fixture_path;

  int runs = 3;
  std::uint64_t seed = 0;
  std::string templates_dir;
  std::optional<std::string> refusal_phrases_path;
  StudyKnobs study;

  /// "DC", "GID-ZSD", ...
  std::string method_name() const;
  /// Throws ConfigError on inconsistent knobs.
  void validate() const;
};

/// Parses "DC", "ZSD", "FSD", "GID-DC", "GID-ZSD" or "GID-FSD".
std::pair<DiscoveryMethod, bool> parse_method_name(std::string_view name);

ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json config_echo(const ExperimentConfig& config);

/// Directory holding the shipped prompt templates.
std::string default_templates_dir();
/// Shipped Banking label fixture (15 IND + 15 OOD).
std::string default_fixed_labels_path();

}  // namespace intentdisc
