#pragma once

// Builds the scripted responses for the bundled 5-class x 5-sample discovery run.
// In every run each class keeps four of its samples in its own category and loses
// one to the next category, so the best matching recovers 20 of 25 samples.

#include <json.hpp>

#include "intentdisc/config.hpp"
#include "intentdisc/gateway.hpp"
#include "intentdisc/prompt.hpp"

namespace fixtures {

inline nlohmann::json shifted_discovery_fixture(const intentdisc::ExperimentConfig& c,
                                                const intentdisc::ExperimentSplit& split) {
  using namespace intentdisc;
  const PromptForge forge(TemplateSet::load(c.templates_dir));
  std::map<std::int64_t, int> class_of;
  for (const auto& u : split.discovery_pool) {
    const auto it = std::find(split.ood_labels.begin(), split.ood_labels.end(), u.label);
    class_of[u.id] = static_cast<int>(it - split.ood_labels.begin());
  }
  const int k = static_cast<int>(split.ood_labels.size());
  nlohmann::json entries = nlohmann::json::array();
  for (int run = 0; run < c.runs; ++run) {
    const auto prompt = forge.render_discovery(split, c.method, c.variant, k, c.seed + static_cast<std::uint64_t>(run));
    std::vector<std::vector<int>> clusters(static_cast<std::size_t>(k));
    std::vector<int> seen(static_cast<std::size_t>(k), 0);
    for (std::size_t p = 0; p < prompt.index_map.size(); ++p) {
      const int cls = class_of.at(prompt.index_map[p]);
      // The last sample of each class drifts into the neighbouring category.
      const bool drift = ++seen[static_cast<std::size_t>(cls)] == split.config.discovery_per_class;
      clusters[static_cast<std::size_t>(drift ? (cls + 1) % k : cls)].push_back(static_cast<int>(p) + 1);
    }
    std::string response;
    for (int i = 0; i < k; ++i) {
      response += "Category " + std::to_string(i + 1) + ": ";
      for (std::size_t j = 0; j < clusters[static_cast<std::size_t>(i)].size(); ++j) {
        response += (j ? "," : "") + std::to_string(clusters[static_cast<std::size_t>(i)][j]);
      }
      response += "\n";
    }
    entries.push_back({{"prompt_hash", prompt_hash(c.provider.model_name, prompt.text, c.provider.temperature)},
                       {"response", response}});
  }
  return {{"entries", entries}};
}

}  // namespace fixtures
