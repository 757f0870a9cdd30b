#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intentdisc/corpus.hpp"
#include "intentdisc/template.hpp"

namespace intentdisc {

/// DC clusters with no IND prior, ZSD adds the IND label set, FSD adds labelled IND demos.
enum class DiscoveryMethod { DC, ZSD, FSD };
enum class PromptVariant { Original, Paraphrase, Verbosity, Simplification };
enum class PromptStage { discovery, gid_stage1, gid_stage2 };
/// Which labelled examples an FSD-style or demo-carrying prompt embeds.
enum class DemoSource { ind, ood };

std::string_view to_string(DiscoveryMethod m) noexcept;
std::string_view to_string(PromptVariant v) noexcept;
std::string_view to_string(PromptStage s) noexcept;
DiscoveryMethod discovery_method_from_string(std::string_view s);
PromptVariant prompt_variant_from_string(std::string_view s);

struct RenderedPrompt {
  std::string text;
  /// index_map[p - 1] is the utterance id shown at prompt position p.
  std::vector<std::int64_t> index_map;
  PromptStage stage = PromptStage::discovery;
  DiscoveryMethod method = DiscoveryMethod::DC;
  PromptVariant variant = PromptVariant::Original;
  bool includes_cluster_count = false;
  std::optional<int> declared_k;
};

/// One selectable entry of the joint IND + OOD intent set, 1-based.
struct JointLabel {
  int index = 0;
  std::string text;
  std::optional<std::string> description;
};

/// IND labels followed by OOD (pseudo or gold) intents. Duplicate intent texts get
/// " (2)", " (3)", ... suffixes so every entry stays distinct.
std::vector<JointLabel> build_joint_labels(const std::vector<std::string>& ind_labels,
                                           const std::vector<std::string>& ood_intents,
                                           const std::map<std::string, std::string>& descriptions = {});

/// Loaded template directory: one `<kind>.<variant>.txt` file per prompt, where kind is
/// dc, zsd, fsd (discovery and stage 1) or classify, classify_demos (stage 2).
class TemplateSet {
 public:
  /// Throws ConfigError if a required template is missing or a template lacks a required placeholder.
  static TemplateSet load(const std::filesystem::path& dir);

  const Template& discovery(DiscoveryMethod method, PromptVariant variant) const;
  /// Falls back to the Original wording when no variant-specific stage-2 file exists.
  const Template& classification(bool with_demos, PromptVariant variant) const;

 private:
  std::map<std::string, Template, std::less<>> templates_;
};

/// Renders discovery, GID stage-1 and GID stage-2 prompts. Pure given its templates.
class PromptForge {
 public:
  explicit PromptForge(TemplateSet templates) : templates_(std::move(templates)) {}

  /// Sample order is shuffled with `seed`; k omitted drops the cluster count from the prompt.
  RenderedPrompt render_discovery(const ExperimentSplit& split, DiscoveryMethod method, PromptVariant variant,
                                  std::optional<int> k, std::uint64_t seed,
                                  DemoSource demos = DemoSource::ind) const;

  /// The discovery prompt plus the instruction to summarize each category's intent.
  RenderedPrompt render_gid_stage1(const ExperimentSplit& split, DiscoveryMethod method, PromptVariant variant,
                                   std::optional<int> k, std::uint64_t seed,
                                   DemoSource demos = DemoSource::ind) const;

  /// One classification prompt for one query. Empty `demos` selects the demo-free wording.
  RenderedPrompt render_gid_stage2(const std::vector<JointLabel>& joint_labels, const std::vector<Utterance>& demos,
                                   const Utterance& query, PromptVariant variant) const;

 private:
  RenderedPrompt render_stage_one(const ExperimentSplit& split, DiscoveryMethod method, PromptVariant variant,
                                  std::optional<int> k, std::uint64_t seed, DemoSource demos, bool summarize) const;

  TemplateSet templates_;
};

/// Demo utterances of a split in label order for the requested source.
std::vector<Utterance> collect_demos(const ExperimentSplit& split, DemoSource source);

}  // namespace intentdisc
