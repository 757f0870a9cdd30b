#include "intentdisc/config.hpp"

#include "intentdisc/errors.hpp"
#include "intentdisc/serialize.hpp"
#include "intentdisc/text.hpp"

#ifndef INTENTDISC_TEMPLATE_DIR
#define INTENTDISC_TEMPLATE_DIR "templates"
#endif
#ifndef INTENTDISC_DATA_DIR
#define INTENTDISC_DATA_DIR "data"
#endif

namespace intentdisc {

using nlohmann::json;

std::string default_templates_dir() { return INTENTDISC_TEMPLATE_DIR; }
std::string default_fixed_labels_path() { return std::string(INTENTDISC_DATA_DIR) + "/banking77_fixed_labels.json"; }

std::string_view to_string(DemoStrategy d) noexcept {
  switch (d) {
    case DemoStrategy::none: return "none";
    case DemoStrategy::ind: return "ind";
    case DemoStrategy::ood: return "ood";
  }
  return "none";
}

std::string_view to_string(IntentSetSource s) noexcept {
  switch (s) {
    case IntentSetSource::pseudo: return "pseudo";
    case IntentSetSource::ground_truth: return "ground_truth";
    case IntentSetSource::ground_truth_with_descriptions: return "ground_truth_with_descriptions";
  }
  return "pseudo";
}

std::string_view to_string(StudyKind s) noexcept {
  switch (s) {
    case StudyKind::sample_sweep: return "sample_sweep";
    case StudyKind::demo_strategy: return "demo_strategy";
    case StudyKind::intent_set_ablation: return "intent_set_ablation";
    case StudyKind::prompt_variants: return "prompt_variants";
    case StudyKind::estimate_k: return "estimate_k";
    case StudyKind::provider_matrix: return "provider_matrix";
  }
  return "sample_sweep";
}

DemoStrategy demo_strategy_from_string(std::string_view s) {
  if (s == "none") return DemoStrategy::none;
  if (s == "ind") return DemoStrategy::ind;
  if (s == "ood") return DemoStrategy::ood;
  throw ConfigError("unknown demo strategy \"" + std::string(s) + "\" (expected none, ind or ood)");
}

IntentSetSource intent_set_source_from_string(std::string_view s) {
  if (s == "pseudo") return IntentSetSource::pseudo;
  if (s == "ground_truth") return IntentSetSource::ground_truth;
  if (s == "ground_truth_with_descriptions") return IntentSetSource::ground_truth_with_descriptions;
  throw ConfigError("unknown intent set source \"" + std::string(s) + "\"");
}

StudyKind study_kind_from_string(std::string_view s) {
  for (StudyKind k : {StudyKind::sample_sweep, StudyKind::demo_strategy, StudyKind::intent_set_ablation,
                      StudyKind::prompt_variants, StudyKind::estimate_k, StudyKind::provider_matrix}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown study \"" + std::string(s) + "\"");
}

std::pair<DiscoveryMethod, bool> parse_method_name(std::string_view name) {
  const std::string upper = [&] {
    std::string u(name);
    for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return u;
  }();
  if (upper.rfind("GID-", 0) == 0) return {discovery_method_from_string(upper.substr(4)), true};
  return {discovery_method_from_string(upper), false};
}

std::string ExperimentConfig::method_name() const {
  return (gid ? "GID-" : "") + std::string(to_string(method));
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (!corpus_path && !split_path) throw ConfigError("config needs a corpus path or a split file");
  provider.validate();
  if (session_mode == SessionMode::replay && !store_path) throw ConfigError("replay mode needs --replay <store>");
  if (session_mode == SessionMode::scripted && !fixture_path) throw ConfigError("scripted mode needs --scripted <fixture>");
  const bool with_desc = study.intent_set_source == IntentSetSource::ground_truth_with_descriptions;
  if (with_desc && !study.descriptions_path) {
    throw ConfigError("intent_set_source ground_truth_with_descriptions needs a descriptions file");
  }
  if (!with_desc && study.descriptions_path) {
    throw ConfigError("a descriptions file is only used with intent_set_source ground_truth_with_descriptions");
  }
  if (study.demo_strategy == DemoStrategy::ood) {
    if (gid && study.intent_set_source == IntentSetSource::pseudo) {
      throw ConfigError("OOD demos in classification require the ground-truth OOD intent set");
    }
    if (!split_path && split.ood_demos_per_class < 1) throw ConfigError("OOD demos need ood_demos_per_class >= 1");
  }
  const bool needs_ind_demos =
      study.demo_strategy ? *study.demo_strategy == DemoStrategy::ind : method == DiscoveryMethod::FSD;
  if (needs_ind_demos && !split_path && split.demos_per_class < 1) {
    throw ConfigError("IND demos need demos_per_class >= 1");
  }
  if (!(study.size_threshold_ratio > 0.0 && study.size_threshold_ratio <= 1.0)) {
    throw ConfigError("size_threshold_ratio must lie in (0, 1]");
  }
  if (study.k_prime_multiplier && *study.k_prime_multiplier < 1.0) throw ConfigError("k_prime_multiplier must be >= 1");
}

namespace {

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

std::optional<std::string> opt_path(const json& j, const char* key, const std::filesystem::path& base) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return resolve(base, j.at(key).get<std::string>());
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  c.templates_dir = default_templates_dir();
  try {
    if (doc.contains("corpus")) {
      const auto& corpus = doc.at("corpus");
      if (corpus.is_string()) {
        c.corpus_path = resolve(base_dir, corpus.get<std::string>());
      } else {
        c.corpus_path = resolve(base_dir, corpus.at("path").get<std::string>());
        if (corpus.contains("format")) c.corpus_format = corpus_format_from_string(corpus.at("format").get<std::string>());
      }
    }
    if (doc.contains("split")) {
      const auto& s = doc.at("split");
      c.split = s.get<SplitConfig>();
      if (s.contains("fixed_labels") && s.at("fixed_labels").is_string()) {
        const std::string name = s.at("fixed_labels").get<std::string>();
        c.fixed_labels_path = name == "banking77" ? default_fixed_labels_path() : resolve(base_dir, name);
        c.split.fixed_labels = load_fixed_labels(*c.fixed_labels_path);
      }
    }
    c.split_path = opt_path(doc, "split_file", base_dir);
    if (doc.contains("method")) std::tie(c.method, c.gid) = parse_method_name(doc.at("method").get<std::string>());
    if (doc.contains("variant")) c.variant = prompt_variant_from_string(doc.at("variant").get<std::string>());
    if (doc.contains("provider")) c.provider = doc.at("provider").get<ProviderConfig>();
    if (doc.contains("session")) {
      const auto& s = doc.at("session");
      if (s.contains("mode")) c.session_mode = session_mode_from_string(s.at("mode").get<std::string>());
      c.store_path = opt_path(s, "store", base_dir);
      c.fixture_path = opt_path(s, "fixture", base_dir);
    }
    if (doc.contains("runs")) c.runs = doc.at("runs").get<int>();
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (auto t = opt_path(doc, "templates", base_dir)) c.templates_dir = *t;
    c.refusal_phrases_path = opt_path(doc, "refusal_phrases", base_dir);
    if (doc.contains("study")) {
      const auto& s = doc.at("study");
      StudyKnobs& k = c.study;
      if (s.contains("samples_per_class")) k.samples_per_class = s.at("samples_per_class").get<std::vector<int>>();
      if (s.contains("demo_strategy") && !s.at("demo_strategy").is_null()) {
        k.demo_strategy = demo_strategy_from_string(s.at("demo_strategy").get<std::string>());
      }
      if (s.contains("demo_strategies")) {
        k.demo_strategies.clear();
        for (const auto& d : s.at("demo_strategies")) k.demo_strategies.push_back(demo_strategy_from_string(d.get<std::string>()));
      }
      if (s.contains("intent_set_source")) {
        k.intent_set_source = intent_set_source_from_string(s.at("intent_set_source").get<std::string>());
      }
      if (s.contains("include_cluster_count")) k.include_cluster_count = s.at("include_cluster_count").get<bool>();
      k.descriptions_path = opt_path(s, "descriptions", base_dir);
      if (s.contains("variants")) {
        k.variants.clear();
        for (const auto& v : s.at("variants")) k.variants.push_back(prompt_variant_from_string(v.get<std::string>()));
      }
      if (s.contains("providers")) {
        for (const auto& p : s.at("providers")) k.providers.push_back(p.get<ProviderConfig>());
      }
      k.embeddings_path = opt_path(s, "embeddings", base_dir);
      if (s.contains("k_prime")) k.k_prime = s.at("k_prime").get<int>();
      if (s.contains("k_prime_multiplier")) k.k_prime_multiplier = s.at("k_prime_multiplier").get<double>();
      if (s.contains("size_threshold_ratio")) k.size_threshold_ratio = s.at("size_threshold_ratio").get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path.string()));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_experiment_config(doc, path.parent_path());
}

json config_echo(const ExperimentConfig& c) {
  auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
  json study = {{"samples_per_class", c.study.samples_per_class},
                {"demo_strategy", c.study.demo_strategy ? json(std::string(to_string(*c.study.demo_strategy))) : json(nullptr)},
                {"intent_set_source", std::string(to_string(c.study.intent_set_source))},
                {"include_cluster_count", c.study.include_cluster_count},
                {"descriptions", opt(c.study.descriptions_path)},
                {"embeddings", opt(c.study.embeddings_path)},
                {"k_prime", c.study.k_prime ? json(*c.study.k_prime) : json(nullptr)},
                {"k_prime_multiplier", c.study.k_prime_multiplier ? json(*c.study.k_prime_multiplier) : json(nullptr)},
                {"size_threshold_ratio", c.study.size_threshold_ratio}};
  return json{{"corpus", opt(c.corpus_path)},
              {"corpus_format", c.corpus_format == CorpusFormat::jsonl ? "jsonl" : "tsv"},
              {"split", c.split},
              {"split_file", opt(c.split_path)},
              {"method", c.method_name()},
              {"variant", std::string(to_string(c.variant))},
              {"provider", c.provider},
              {"session", std::string(to_string(c.session_mode))},
              {"runs", c.runs},
              {"seed", c.seed},
              {"study", study}};
}

}  // namespace intentdisc
