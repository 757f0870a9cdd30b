#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "intentdisc/corpus.hpp"
#include "intentdisc/errors.hpp"
#include "intentdisc/rng.hpp"
#include "intentdisc/text.hpp"

namespace intentdisc {

std::string_view to_string(RatioTag t) noexcept {
  switch (t) {
    case RatioTag::r3_1: return "3:1";
    case RatioTag::r3_2: return "3:2";
    case RatioTag::r1_1: return "1:1";
    case RatioTag::custom: return "custom";
  }
  return "custom";
}

RatioTag ratio_tag_from_string(std::string_view s) {
  if (s == "3:1") return RatioTag::r3_1;
  if (s == "3:2") return RatioTag::r3_2;
  if (s == "1:1") return RatioTag::r1_1;
  if (s == "custom") return RatioTag::custom;
  throw DataError("unknown ratio tag \"" + std::string(s) + "\"");
}

RatioTag ratio_tag_for(int n_ind, int m_ood) noexcept {
  if (n_ind <= 0 || m_ood <= 0) return RatioTag::custom;
  if (n_ind == 3 * m_ood) return RatioTag::r3_1;
  if (2 * n_ind == 3 * m_ood) return RatioTag::r3_2;
  if (n_ind == m_ood) return RatioTag::r1_1;
  return RatioTag::custom;
}

bool ExperimentSplit::is_ind(std::string_view label) const {
  return std::find(ind_labels.begin(), ind_labels.end(), label) != ind_labels.end();
}

bool ExperimentSplit::is_ood(std::string_view label) const {
  return std::find(ood_labels.begin(), ood_labels.end(), label) != ood_labels.end();
}

namespace {

void validate_config(const SplitConfig& c) {
  if (c.n_ind < 0 || c.m_ood < 1) throw ConfigError("split config needs n_ind >= 0 and m_ood >= 1");
  if (c.discovery_per_class < 0 || c.gid_per_class < 0 || c.demos_per_class < 0 ||
      c.ood_demos_per_class < 0) {
    throw ConfigError("split config per-class counts must be non-negative");
  }
}

std::pair<std::vector<std::string>, std::vector<std::string>> choose_labels(
    const Corpus& corpus, const SplitConfig& config, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(config.n_ind);
  const auto m = static_cast<std::size_t>(config.m_ood);
  if (config.fixed_labels) {
    const FixedLabels& fixed = *config.fixed_labels;
    if (fixed.ind.size() < n || fixed.ood.size() < m) {
      throw DataError("fixed label lists hold " + std::to_string(fixed.ind.size()) + " IND / " +
                      std::to_string(fixed.ood.size()) + " OOD labels; config asks for " +
                      std::to_string(n) + " / " + std::to_string(m));
    }
    std::vector<std::string> ind(fixed.ind.begin(), fixed.ind.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<std::string> ood(fixed.ood.begin(), fixed.ood.begin() + static_cast<std::ptrdiff_t>(m));
    const std::set<std::string> ind_set(fixed.ind.begin(), fixed.ind.end());
    for (const auto& label : fixed.ood) {
      if (ind_set.count(label)) throw DataError("fixed label lists overlap on \"" + label + "\"");
    }
    if (ind_set.size() != fixed.ind.size() ||
        std::set<std::string>(fixed.ood.begin(), fixed.ood.end()).size() != fixed.ood.size()) {
      throw DataError("fixed label lists contain duplicates");
    }
    for (const auto* list : {&ind, &ood}) {
      for (const auto& label : *list) {
        if (std::find(corpus.label_set.begin(), corpus.label_set.end(), label) == corpus.label_set.end()) {
          throw DataError("fixed label \"" + label + "\" does not occur in corpus " + corpus.name);
        }
      }
    }
    return {std::move(ind), std::move(ood)};
  }
  if (corpus.label_set.size() < n + m) {
    throw DataError("corpus " + corpus.name + " has " + std::to_string(corpus.label_set.size()) +
                    " labels; split needs " + std::to_string(n + m));
  }
  std::vector<std::string> labels = corpus.label_set;
  auto rng = stream_for(seed, "labels");
  shuffle(std::span<std::string>(labels), rng);
  std::vector<std::string> ind(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<std::string> ood(labels.begin() + static_cast<std::ptrdiff_t>(n),
                               labels.begin() + static_cast<std::ptrdiff_t>(n + m));
  return {std::move(ind), std::move(ood)};
}

// Uniform sample without replacement of `count` utterances of one class.
std::vector<Utterance> sample_class(const Corpus& corpus, const std::string& label, Partition partition,
                                    int count, std::uint64_t seed, std::string_view site) {
  std::vector<std::size_t> pool = corpus.indices_of(label, partition);
  if (pool.size() < static_cast<std::size_t>(count)) {
    throw DataError("class \"" + label + "\" has " + std::to_string(pool.size()) + " " +
                    std::string(to_string(partition)) + " samples; " + std::to_string(count) + " required");
  }
  auto rng = stream_for(seed, std::string(site) + ":" + label);
  // Partial Fisher-Yates: the first `count` slots become the sample.
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<Utterance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) out.push_back(corpus.utterances[pool[i]]);
  return out;
}

}  // namespace

ExperimentSplit make_split(const Corpus& corpus, const SplitConfig& config, std::uint64_t seed) {
  validate_config(config);
  ExperimentSplit split;
  split.corpus_name = corpus.name;
  split.seed = seed;
  split.config = config;
  split.ratio_tag = ratio_tag_for(config.n_ind, config.m_ood);
  std::tie(split.ind_labels, split.ood_labels) = choose_labels(corpus, config, seed);

  for (const auto& label : split.ood_labels) {
    auto s = sample_class(corpus, label, Partition::test, config.discovery_per_class, seed, "discovery");
    split.discovery_pool.insert(split.discovery_pool.end(), s.begin(), s.end());
  }
  for (const auto* labels : {&split.ind_labels, &split.ood_labels}) {
    for (const auto& label : *labels) {
      auto s = sample_class(corpus, label, Partition::test, config.gid_per_class, seed, "gid");
      split.gid_test_pool.insert(split.gid_test_pool.end(), s.begin(), s.end());
    }
  }
  if (config.demos_per_class > 0) {
    for (const auto& label : split.ind_labels) {
      split.demo_pool[label] = sample_class(corpus, label, Partition::train, config.demos_per_class, seed, "demo");
    }
  }
  if (config.ood_demos_per_class > 0) {
    for (const auto& label : split.ood_labels) {
      split.ood_demo_pool[label] =
          sample_class(corpus, label, Partition::train, config.ood_demos_per_class, seed, "ood_demo");
    }
  }
  return split;
}

FixedLabels load_fixed_labels(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path.string()));
    FixedLabels fixed;
    fixed.ind = j.at("ind").get<std::vector<std::string>>();
    fixed.ood = j.at("ood").get<std::vector<std::string>>();
    return fixed;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad fixed label file " + path.string() + ": " + e.what());
  }
}

}  // namespace intentdisc
