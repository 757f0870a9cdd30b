#include "intentdisc/prompt.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "intentdisc/errors.hpp"
#include "intentdisc/rng.hpp"
#include "intentdisc/text.hpp"

namespace intentdisc {

std::string_view to_string(DiscoveryMethod m) noexcept {
  switch (m) {
    case DiscoveryMethod::DC: return "DC";
    case DiscoveryMethod::ZSD: return "ZSD";
    case DiscoveryMethod::FSD: return "FSD";
  }
  return "DC";
}

std::string_view to_string(PromptVariant v) noexcept {
  switch (v) {
    case PromptVariant::Original: return "original";
    case PromptVariant::Paraphrase: return "paraphrase";
    case PromptVariant::Verbosity: return "verbosity";
    case PromptVariant::Simplification: return "simplification";
  }
  return "original";
}

std::string_view to_string(PromptStage s) noexcept {
  switch (s) {
    case PromptStage::discovery: return "discovery";
    case PromptStage::gid_stage1: return "gid_stage1";
    case PromptStage::gid_stage2: return "gid_stage2";
  }
  return "discovery";
}

DiscoveryMethod discovery_method_from_string(std::string_view s) {
  const std::string l = to_lower(s);
  if (l == "dc") return DiscoveryMethod::DC;
  if (l == "zsd") return DiscoveryMethod::ZSD;
  if (l == "fsd") return DiscoveryMethod::FSD;
  throw ConfigError("unknown discovery method \"" + std::string(s) + "\"");
}

PromptVariant prompt_variant_from_string(std::string_view s) {
  const std::string l = to_lower(s);
  if (l == "original") return PromptVariant::Original;
  if (l == "paraphrase") return PromptVariant::Paraphrase;
  if (l == "verbosity") return PromptVariant::Verbosity;
  if (l == "simplification") return PromptVariant::Simplification;
  throw ConfigError("unknown prompt variant \"" + std::string(s) + "\"");
}

std::vector<JointLabel> build_joint_labels(const std::vector<std::string>& ind_labels,
                                           const std::vector<std::string>& ood_intents,
                                           const std::map<std::string, std::string>& descriptions) {
  std::vector<JointLabel> out;
  std::map<std::string, int> seen;
  auto add = [&](const std::string& raw) {
    std::string text = raw;
    const int occurrence = ++seen[raw];
    if (occurrence > 1) text += " (" + std::to_string(occurrence) + ")";
    JointLabel label{static_cast<int>(out.size()) + 1, text, std::nullopt};
    if (auto it = descriptions.find(raw); it != descriptions.end()) label.description = it->second;
    out.push_back(std::move(label));
  };
  for (const auto& l : ind_labels) add(l);
  for (const auto& l : ood_intents) add(l);
  return out;
}

namespace {

struct KindSpec {
  std::string_view kind;
  std::set<std::string> required;
  std::set<std::string> allowed;
};

const std::vector<KindSpec>& kind_specs() {
  static const std::vector<KindSpec> specs = {
      {"dc", {"samples"}, {"samples", "k", "summarize"}},
      {"zsd", {"samples", "ind_labels"}, {"samples", "ind_labels", "k", "summarize"}},
      {"fsd", {"samples", "demos"}, {"samples", "demos", "k", "summarize", "disjoint"}},
      {"classify", {"intents", "query"}, {"intents", "query", "descriptions"}},
      {"classify_demos", {"intents", "demos", "query"}, {"intents", "demos", "query", "descriptions"}},
  };
  return specs;
}

std::string method_kind(DiscoveryMethod m) { return to_lower(to_string(m)); }

std::string numbered_samples(const std::vector<Utterance>& ordered) {
  std::vector<std::string> lines;
  lines.reserve(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i) lines.push_back(std::to_string(i + 1) + ". " + ordered[i].text);
  return join(lines, "\n");
}

}  // namespace

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("template directory not found: " + dir.string());
  TemplateSet set;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    const std::string stem = entry.path().stem().string();  // e.g. "dc.paraphrase"
    const auto dot = stem.find('.');
    if (dot == std::string::npos) throw ConfigError("template file name must be <kind>.<variant>.txt: " + stem);
    const std::string kind = stem.substr(0, dot);
    prompt_variant_from_string(stem.substr(dot + 1));
    const auto spec = std::find_if(kind_specs().begin(), kind_specs().end(),
                                   [&](const KindSpec& s) { return s.kind == kind; });
    if (spec == kind_specs().end()) throw ConfigError("unknown template kind in " + entry.path().string());
    std::string text = read_file(entry.path().string());
    if (!text.empty() && text.back() == '\n') text.pop_back();
    Template t = Template::parse(text, stem);
    for (const auto& name : spec->required) {
      if (!t.uses(name)) throw ConfigError("template " + stem + " is missing placeholder {{" + name + "}}");
    }
    for (const auto& name : t.names()) {
      if (!spec->allowed.count(name)) throw ConfigError("template " + stem + " uses unknown placeholder {{" + name + "}}");
    }
    set.templates_.emplace(stem, std::move(t));
  }
  for (const char* required : {"dc.original", "zsd.original", "fsd.original", "classify.original",
                               "classify_demos.original"}) {
    if (!set.templates_.count(required)) {
      throw ConfigError("template directory " + dir.string() + " lacks " + required + ".txt");
    }
  }
  return set;
}

const Template& TemplateSet::discovery(DiscoveryMethod method, PromptVariant variant) const {
  const std::string key = method_kind(method) + "." + std::string(to_string(variant));
  const auto it = templates_.find(key);
  if (it == templates_.end()) throw ConfigError("no prompt template " + key);
  return it->second;
}

const Template& TemplateSet::classification(bool with_demos, PromptVariant variant) const {
  const std::string kind = with_demos ? "classify_demos" : "classify";
  if (auto it = templates_.find(kind + "." + std::string(to_string(variant))); it != templates_.end()) {
    return it->second;
  }
  return templates_.at(kind + ".original");
}

std::vector<Utterance> collect_demos(const ExperimentSplit& split, DemoSource source) {
  const auto& labels = source == DemoSource::ind ? split.ind_labels : split.ood_labels;
  const auto& pool = source == DemoSource::ind ? split.demo_pool : split.ood_demo_pool;
  std::vector<Utterance> out;
  for (const auto& label : labels) {
    if (auto it = pool.find(label); it != pool.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

RenderedPrompt PromptForge::render_stage_one(const ExperimentSplit& split, DiscoveryMethod method,
                                             PromptVariant variant, std::optional<int> k, std::uint64_t seed,
                                             DemoSource demo_source, bool summarize) const {
  if (k && *k <= 0) throw ConfigError("cluster count k must be positive, got " + std::to_string(*k));
  if (split.discovery_pool.empty()) throw ConfigError("split has an empty discovery pool");
  const Template& tmpl = templates_.discovery(method, variant);

  std::vector<Utterance> ordered = split.discovery_pool;
  auto rng = stream_for(seed, "prompt_order");
  shuffle(std::span<Utterance>(ordered), rng);

  TemplateValues values;
  values["samples"] = numbered_samples(ordered);
  if (k) values["k"] = std::to_string(*k);
  if (summarize) values["summarize"] = "1";
  if (method == DiscoveryMethod::ZSD) {
    if (split.ind_labels.empty()) throw ConfigError("ZSD requires IND labels");
    std::vector<std::string> items;
    for (const auto& l : split.ind_labels) items.push_back(l + ";");
    values["ind_labels"] = join(items, " ");
  }
  if (method == DiscoveryMethod::FSD) {
    const std::vector<Utterance> demos = collect_demos(split, demo_source);
    if (demos.empty()) throw ConfigError("FSD requires a non-empty demo pool");
    std::vector<std::string> items;
    for (const auto& d : demos) items.push_back(d.text + "\tintention:" + d.label + ";");
    values["demos"] = join(items, "\n");
    if (demo_source == DemoSource::ind) values["disjoint"] = "1";
  }

  RenderedPrompt prompt;
  prompt.text = tmpl.render(values);
  prompt.index_map.reserve(ordered.size());
  for (const auto& u : ordered) prompt.index_map.push_back(u.id);
  prompt.stage = summarize ? PromptStage::gid_stage1 : PromptStage::discovery;
  prompt.method = method;
  prompt.variant = variant;
  prompt.includes_cluster_count = k.has_value();
  prompt.declared_k = k;
  return prompt;
}

RenderedPrompt PromptForge::render_discovery(const ExperimentSplit& split, DiscoveryMethod method,
                                             PromptVariant variant, std::optional<int> k, std::uint64_t seed,
                                             DemoSource demos) const {
  return render_stage_one(split, method, variant, k, seed, demos, false);
}

RenderedPrompt PromptForge::render_gid_stage1(const ExperimentSplit& split, DiscoveryMethod method,
                                              PromptVariant variant, std::optional<int> k, std::uint64_t seed,
                                              DemoSource demos) const {
  return render_stage_one(split, method, variant, k, seed, demos, true);
}

RenderedPrompt PromptForge::render_gid_stage2(const std::vector<JointLabel>& joint_labels,
                                              const std::vector<Utterance>& demos, const Utterance& query,
                                              PromptVariant variant) const {
  if (joint_labels.empty()) throw ConfigError("stage-2 prompt needs a non-empty intent set");
  std::set<std::string> texts;
  std::vector<std::string> items;
  std::vector<std::string> description_lines;
  for (std::size_t i = 0; i < joint_labels.size(); ++i) {
    const JointLabel& l = joint_labels[i];
    if (l.index != static_cast<int>(i) + 1) throw ConfigError("joint label indices must run 1..N+M contiguously");
    if (!texts.insert(l.text).second) {
      throw ConfigError("duplicate intent text \"" + l.text + "\" in joint label set");
    }
    items.push_back(std::to_string(l.index) + ". " + l.text + ";");
    if (l.description && !l.description->empty()) {
      description_lines.push_back(std::to_string(l.index) + ". " + l.text + ": " + *l.description);
    }
  }
  TemplateValues values;
  values["intents"] = join(items, " ");
  values["query"] = query.text;
  if (!description_lines.empty()) values["descriptions"] = join(description_lines, "\n");
  if (!demos.empty()) {
    std::vector<std::string> demo_items;
    for (const auto& d : demos) demo_items.push_back("sentence: " + d.text + "\tintention:" + d.label + ";");
    values["demos"] = join(demo_items, "\n");
  }
  RenderedPrompt prompt;
  prompt.text = templates_.classification(!demos.empty(), variant).render(values);
  prompt.index_map = {query.id};
  prompt.stage = PromptStage::gid_stage2;
  prompt.variant = variant;
  return prompt;
}

}  // namespace intentdisc
