#include "intentdisc/orchestrator.hpp"

#include <algorithm>
#include <set>

#include "intentdisc/baseline.hpp"
#include "intentdisc/errors.hpp"
#include "intentdisc/metrics.hpp"
#include "intentdisc/parser.hpp"
#include "intentdisc/prompt.hpp"
#include "intentdisc/recall.hpp"
#include "intentdisc/text.hpp"

namespace intentdisc {

ExperimentSplit resolve_split(const ExperimentConfig& config) {
  if (config.split_path) return read_split(*config.split_path);
  if (!config.corpus_path) throw ConfigError("config needs a corpus path or a split file");
  const Corpus corpus = load_corpus(*config.corpus_path, config.corpus_format);
  return make_split(corpus, config.split, config.seed);
}

Session make_session(const ExperimentConfig& config) {
  Session s;
  s.mode = config.session_mode;
  switch (config.session_mode) {
    case SessionMode::replay:
      if (!config.store_path) throw ConfigError("replay mode needs an exchange store");
      if (!std::filesystem::exists(*config.store_path)) {
        throw ConfigError("exchange store " + *config.store_path + " does not exist");
      }
      s.store = ExchangeStore::open(*config.store_path);
      break;
    case SessionMode::live_record:
      if (config.store_path) s.store = ExchangeStore::open(*config.store_path);
      break;
    case SessionMode::scripted:
      if (!config.fixture_path) throw ConfigError("scripted mode needs a fixture file");
      s.fixture = std::make_shared<ScriptedFixture>(ScriptedFixture::load(*config.fixture_path));
      break;
  }
  return s;
}

std::map<std::string, std::string> load_descriptions(const std::string& path) {
  std::map<std::string, std::string> out;
  int line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ": description line " + std::to_string(line_no) + " has no tab separator");
    }
    const std::string intent = trim(line.substr(0, tab));
    const std::string text = trim(line.substr(tab + 1));
    if (intent.empty() || text.empty()) {
      throw DataError(path + ": description line " + std::to_string(line_no) + " is incomplete");
    }
    if (!out.emplace(intent, text).second) throw DataError(path + ": duplicate description for " + intent);
  }
  return out;
}

namespace {

// Rethrows the active exception with the run index prefixed, keeping its exit-code class.
[[noreturn]] void rethrow_for_run(int run) {
  const std::string prefix = "run " + std::to_string(run) + ": ";
  try {
    throw;
  } catch (const ParseError& e) {
    throw ParseError(prefix + e.what());
  } catch (const FixtureExhausted& e) {
    throw FixtureExhausted(prefix + e.what());
  } catch (const ProviderError& e) {
    throw ProviderError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  }
}

void count(ProvenanceCounts& p, const Exchange& e) {
  switch (e.provenance) {
    case Provenance::live: ++p.live; break;
    case Provenance::replay: ++p.replay; break;
    case Provenance::scripted: ++p.scripted; break;
  }
}

std::vector<std::string> refusal_phrases(const ExperimentConfig& c) {
  return c.refusal_phrases_path ? load_refusal_phrases(*c.refusal_phrases_path) : default_refusal_phrases();
}

// Method and demo source used for the discovery / stage-1 prompt.
std::pair<DiscoveryMethod, DemoSource> stage_one_method(const ExperimentConfig& c) {
  if (!c.study.demo_strategy) return {c.method, DemoSource::ind};
  switch (*c.study.demo_strategy) {
    case DemoStrategy::none:
      return {c.method == DiscoveryMethod::FSD ? DiscoveryMethod::DC : c.method, DemoSource::ind};
    case DemoStrategy::ind: return {DiscoveryMethod::FSD, DemoSource::ind};
    case DemoStrategy::ood: return {DiscoveryMethod::FSD, DemoSource::ood};
  }
  return {c.method, DemoSource::ind};
}

std::vector<Utterance> stage_two_demos(const ExperimentConfig& c, const ExperimentSplit& split) {
  const DemoStrategy d =
      c.study.demo_strategy.value_or(c.method == DiscoveryMethod::FSD ? DemoStrategy::ind : DemoStrategy::none);
  switch (d) {
    case DemoStrategy::none: return {};
    case DemoStrategy::ind: return collect_demos(split, DemoSource::ind);
    case DemoStrategy::ood: return collect_demos(split, DemoSource::ood);
  }
  return {};
}

EvalReport new_report(const ExperimentConfig& c, std::string task) {
  EvalReport r;
  r.task = std::move(task);
  r.method = c.method_name();
  r.variant = std::string(to_string(c.variant));
  r.config = config_echo(c);
  return r;
}

std::uint64_t run_seed(const ExperimentConfig& c, int run) { return c.seed + static_cast<std::uint64_t>(run); }

// Positions 1..n of the prompt carry these gold labels.
std::vector<int> gold_classes(const RenderedPrompt& prompt, const ExperimentSplit& split) {
  std::map<std::int64_t, std::string> label_of;
  for (const auto& u : split.discovery_pool) label_of[u.id] = u.label;
  std::map<std::string, int> class_of;
  for (std::size_t i = 0; i < split.ood_labels.size(); ++i) class_of[split.ood_labels[i]] = static_cast<int>(i);
  std::vector<int> out;
  out.reserve(prompt.index_map.size());
  for (auto id : prompt.index_map) {
    const std::string& label = label_of.at(id);
    auto [it, inserted] = class_of.emplace(label, static_cast<int>(class_of.size()));
    out.push_back(it->second);
  }
  return out;
}

struct StageOne {
  RenderedPrompt prompt;
  ClusterAssignment parsed;
  ClusterAssignment repaired;
  RecallReport recall;
  int k = 0;  // clusters the repair drew from
};

StageOne cluster_once(const ExperimentConfig& c, const ExperimentSplit& split, const PromptForge& forge,
                      Gateway& gateway, std::uint64_t seed, bool gid, bool with_count, ProvenanceCounts& prov) {
  const auto [method, demos] = stage_one_method(c);
  const std::optional<int> k = with_count ? std::optional<int>(static_cast<int>(split.ood_labels.size())) : std::nullopt;
  StageOne s;
  s.prompt = gid ? forge.render_gid_stage1(split, method, c.variant, k, seed, demos)
                 : forge.render_discovery(split, method, c.variant, k, seed, demos);
  const Exchange e = gateway.complete(s.prompt);
  count(prov, e);
  const int n = static_cast<int>(s.prompt.index_map.size());
  s.parsed = parse_cluster_assignment(e.response_text, n);
  s.recall = audit(s.parsed, n);
  // Without a declared count the parsed cluster labels define K.
  s.k = k ? *k : static_cast<int>(s.parsed.k());
  if (!k) {
    for (const auto& cl : s.parsed.clusters) s.k = std::max(s.k, cl.index);
  }
  s.repaired = repair(s.parsed, s.k, seed);
  return s;
}

void fill_clustering(RunRecord& rec, const StageOne& s, const ExperimentSplit& split) {
  const std::vector<int> truth = gold_classes(s.prompt, split);
  rec.assignment = cluster_per_position(s.repaired);
  rec.clustering = clustering_scores(truth, rec.assignment);
  rec.position_ids = s.prompt.index_map;
  rec.foreign_positions = s.parsed.diagnostics.foreign_positions;
}

std::optional<EmbeddingSet> subset_embeddings(const EmbeddingSet& all, const std::vector<Utterance>& pool) {
  std::map<std::int64_t, std::size_t> row_of;
  for (std::size_t i = 0; i < all.size(); ++i) row_of[all.ids()[i]] = i;
  std::vector<std::int64_t> ids;
  std::vector<std::vector<double>> rows;
  for (const auto& u : pool) {
    auto it = row_of.find(u.id);
    if (it == row_of.end()) throw DataError("embedding file has no vector for utterance id " + std::to_string(u.id));
    ids.push_back(u.id);
    auto r = all.row(it->second);
    rows.emplace_back(r.begin(), r.end());
  }
  return EmbeddingSet(std::move(ids), std::move(rows), all.source_tag());
}

}  // namespace

EvalReport run_discovery(const ExperimentConfig& config, const ExperimentSplit& split, Gateway& gateway) {
  config.validate();
  const PromptForge forge(TemplateSet::load(config.templates_dir));
  EvalReport report = new_report(config, "discovery");
  for (int run = 0; run < config.runs; ++run) {
    try {
      RunRecord rec;
      rec.run = run;
      rec.seed = run_seed(config, run);
      const StageOne s =
          cluster_once(config, split, forge, gateway, rec.seed, false, config.study.include_cluster_count, rec.provenance);
      rec.recall = s.recall;
      fill_clustering(rec, s, split);
      rec.k_true = static_cast<int>(split.ood_labels.size());
      if (!config.study.include_cluster_count) {
        rec.k_pred = static_cast<int>(s.parsed.k());
        rec.k_error = k_error(*rec.k_pred, *rec.k_true);
      }
      report.runs.push_back(std::move(rec));
    } catch (const Error&) {
      rethrow_for_run(run);
    }
  }
  finalize(report);
  return report;
}

EvalReport run_gid(const ExperimentConfig& config, const ExperimentSplit& split, Gateway& gateway) {
  config.validate();
  const PromptForge forge(TemplateSet::load(config.templates_dir));
  const std::vector<std::string> phrases = refusal_phrases(config);
  std::map<std::string, std::string> descriptions;
  if (config.study.intent_set_source == IntentSetSource::ground_truth_with_descriptions) {
    descriptions = load_descriptions(*config.study.descriptions_path);
  }
  const std::vector<Utterance> demos = stage_two_demos(config, split);
  const bool pseudo = config.study.intent_set_source == IntentSetSource::pseudo;

  EvalReport report = new_report(config, "gid");
  for (int run = 0; run < config.runs; ++run) {
    try {
      RunRecord rec;
      rec.run = run;
      rec.seed = run_seed(config, run);

      std::vector<std::string> ood_intents = split.ood_labels;
      if (pseudo) {
        const StageOne s = cluster_once(config, split, forge, gateway, rec.seed, true,
                                        config.study.include_cluster_count, rec.provenance);
        rec.stage1_recall = s.recall;
        rec.foreign_positions = s.parsed.diagnostics.foreign_positions;
        const IntentDescriptions named = parse_intent_descriptions(s.parsed.raw, s.k);
        rec.description_shortfall = named.shortfall();
        ood_intents.clear();
        for (const auto& [index, text] : named.by_cluster) ood_intents.push_back(text);
      }

      const std::vector<JointLabel> joint = build_joint_labels(split.ind_labels, ood_intents, descriptions);
      std::vector<std::string> joint_texts;
      for (const auto& j : joint) joint_texts.push_back(j.text);
      if (pseudo) {
        rec.pseudo_intents.assign(joint_texts.begin() + static_cast<std::ptrdiff_t>(split.ind_labels.size()),
                                  joint_texts.end());
      }

      std::vector<RenderedPrompt> prompts;
      prompts.reserve(split.gid_test_pool.size());
      for (const auto& q : split.gid_test_pool) prompts.push_back(forge.render_gid_stage2(joint, demos, q, config.variant));
      const std::vector<Exchange> exchanges = gateway.complete_all(prompts);

      std::vector<ClassificationAnswer> answers;
      answers.reserve(exchanges.size());
      for (const auto& e : exchanges) {
        count(rec.provenance, e);
        answers.push_back(parse_classification(e.response_text, joint_texts, phrases));
      }
      rec.recall = audit(answers);
      rec.assignment = repair(answers, static_cast<int>(joint.size()), rec.seed);

      std::vector<std::string> gold, predicted;
      for (std::size_t i = 0; i < split.gid_test_pool.size(); ++i) {
        rec.position_ids.push_back(split.gid_test_pool[i].id);
        gold.push_back(split.gid_test_pool[i].label);
        predicted.push_back(joint_texts[static_cast<std::size_t>(rec.assignment[i] - 1)]);
      }

      std::optional<std::map<std::string, std::string>> alignment;
      if (pseudo) {
        const std::set<std::string> pseudo_set(rec.pseudo_intents.begin(), rec.pseudo_intents.end());
        std::vector<std::string> ood_gold, ood_pred;
        for (std::size_t i = 0; i < gold.size(); ++i) {
          if (split.is_ood(gold[i]) && pseudo_set.count(predicted[i])) {
            ood_gold.push_back(gold[i]);
            ood_pred.push_back(predicted[i]);
          }
        }
        std::map<std::string, std::string> map;
        if (!ood_gold.empty()) map = align_pseudo(ood_gold, ood_pred);
        for (const auto& p : rec.pseudo_intents) map.emplace(p, kUnalignedLabel);
        rec.alignment = map;
        alignment = std::move(map);
      }
      rec.group = group_scores(gold, predicted, split.ind_labels, split.ood_labels, alignment);
      report.runs.push_back(std::move(rec));
    } catch (const Error&) {
      rethrow_for_run(run);
    }
  }
  finalize(report);
  return report;
}

EvalReport run_estimate_k(const ExperimentConfig& config, const ExperimentSplit& split, Gateway& gateway) {
  ExperimentConfig c = config;
  c.study.include_cluster_count = false;
  c.validate();
  const PromptForge forge(TemplateSet::load(c.templates_dir));
  const int k_true = static_cast<int>(split.ood_labels.size());

  std::optional<EmbeddingSet> embeddings;
  int k_prime = 0;
  if (c.study.embeddings_path) {
    embeddings = subset_embeddings(load_embeddings(*c.study.embeddings_path), split.discovery_pool);
    if (c.study.k_prime) {
      k_prime = *c.study.k_prime;
    } else if (c.study.k_prime_multiplier) {
      k_prime = k_prime_from_multiplier(*c.study.k_prime_multiplier, k_true);
    } else {
      throw ConfigError("the embedding baseline needs k_prime or k_prime_multiplier");
    }
  }

  EvalReport report = new_report(c, "estimate_k");
  for (int run = 0; run < c.runs; ++run) {
    try {
      RunRecord rec;
      rec.run = run;
      rec.seed = run_seed(c, run);
      const StageOne s = cluster_once(c, split, forge, gateway, rec.seed, false, false, rec.provenance);
      rec.recall = s.recall;
      fill_clustering(rec, s, split);
      rec.k_true = k_true;
      rec.k_pred = static_cast<int>(s.parsed.k());
      rec.k_error = k_error(*rec.k_pred, k_true);
      if (embeddings) {
        const KEstimate est = estimate_k(*embeddings, k_prime, c.study.size_threshold_ratio, rec.seed);
        BaselineK b;
        b.k_prime = est.k_prime;
        b.k_pred = est.k_pred;
        b.cluster_sizes = est.cluster_sizes;
        if (est.k_pred >= 1) b.k_error = k_error(est.k_pred, k_true);
        rec.baseline_k = std::move(b);
      }
      report.runs.push_back(std::move(rec));
    } catch (const Error&) {
      rethrow_for_run(run);
    }
  }
  finalize(report);
  return report;
}

namespace {

template <class F>
EvalReport with_gateway(const ExperimentConfig& config, F&& run) {
  config.validate();
  const ExperimentSplit split = resolve_split(config);
  Gateway gateway(config.provider, make_session(config));
  return run(config, split, gateway);
}

EvalReport run_task(const ExperimentConfig& c, const ExperimentSplit& split, Gateway& gateway) {
  return c.gid ? run_gid(c, split, gateway) : run_discovery(c, split, gateway);
}

}  // namespace

EvalReport run_discovery(const ExperimentConfig& config) {
  return with_gateway(config, [](const auto& c, const auto& s, Gateway& g) { return run_discovery(c, s, g); });
}

EvalReport run_gid(const ExperimentConfig& config) {
  return with_gateway(config, [](const auto& c, const auto& s, Gateway& g) { return run_gid(c, s, g); });
}

EvalReport run_estimate_k(const ExperimentConfig& config) {
  return with_gateway(config, [](const auto& c, const auto& s, Gateway& g) { return run_estimate_k(c, s, g); });
}

std::vector<EvalReport> run_study(const ExperimentConfig& config, StudyKind study) {
  config.validate();
  return run_study(config, study, make_session(config));
}

std::vector<EvalReport> run_study(const ExperimentConfig& config, StudyKind study, const Session& session) {
  std::vector<EvalReport> out;
  auto point = [&](ExperimentConfig c, const std::string& tag, const ExperimentSplit& split, auto&& fn) {
    c.validate();
    Gateway gateway(c.provider, session);
    EvalReport r = fn(c, split, gateway);
    r.tag = tag;
    out.push_back(std::move(r));
  };

  switch (study) {
    case StudyKind::sample_sweep: {
      if (config.split_path) throw ConfigError("sample_sweep resamples the split and needs a corpus, not a split file");
      if (config.study.samples_per_class.empty()) throw ConfigError("sample_sweep needs samples_per_class values");
      const Corpus corpus = load_corpus(*config.corpus_path, config.corpus_format);
      for (int n : config.study.samples_per_class) {
        ExperimentConfig c = config;
        c.split.discovery_per_class = n;
        point(c, "samples_per_class=" + std::to_string(n), make_split(corpus, c.split, c.seed), run_task);
      }
      break;
    }
    case StudyKind::demo_strategy: {
      const ExperimentSplit split = resolve_split(config);
      for (DemoStrategy d : config.study.demo_strategies) {
        ExperimentConfig c = config;
        c.study.demo_strategy = d;
        if (c.gid && d == DemoStrategy::ood && c.study.intent_set_source == IntentSetSource::pseudo) {
          c.study.intent_set_source = IntentSetSource::ground_truth;
        }
        point(c, "demos=" + std::string(to_string(d)), split, run_task);
      }
      break;
    }
    case StudyKind::intent_set_ablation: {
      const ExperimentSplit split = resolve_split(config);
      std::vector<IntentSetSource> sources{IntentSetSource::pseudo, IntentSetSource::ground_truth};
      if (config.study.descriptions_path) sources.push_back(IntentSetSource::ground_truth_with_descriptions);
      for (IntentSetSource s : sources) {
        ExperimentConfig c = config;
        c.gid = true;
        c.study.intent_set_source = s;
        if (s != IntentSetSource::ground_truth_with_descriptions) c.study.descriptions_path.reset();
        point(c, "intent_set=" + std::string(to_string(s)), split,
              [](const auto& cc, const auto& ss, Gateway& g) { return run_gid(cc, ss, g); });
      }
      break;
    }
    case StudyKind::prompt_variants: {
      const ExperimentSplit split = resolve_split(config);
      for (PromptVariant v : config.study.variants) {
        ExperimentConfig c = config;
        c.variant = v;
        point(c, "variant=" + std::string(to_string(v)), split, run_task);
      }
      break;
    }
    case StudyKind::estimate_k: {
      const ExperimentSplit split = resolve_split(config);
      point(config, "estimate_k", split,
            [](const auto& cc, const auto& ss, Gateway& g) { return run_estimate_k(cc, ss, g); });
      break;
    }
    case StudyKind::provider_matrix: {
      if (config.study.providers.empty()) throw ConfigError("provider_matrix needs a providers list");
      const ExperimentSplit split = resolve_split(config);
      for (const auto& p : config.study.providers) {
        ExperimentConfig c = config;
        c.provider = p;
        point(c, "provider=" + p.model_name, split, run_task);
      }
      break;
    }
  }
  return out;
}

}  // namespace intentdisc
