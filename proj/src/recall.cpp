#include "intentdisc/recall.hpp"

#include <algorithm>
#include <stdexcept>

#include "intentdisc/errors.hpp"
#include "intentdisc/rng.hpp"

namespace intentdisc {

namespace {

std::vector<int> listing_counts(const ClusterAssignment& a, int n) {
  std::vector<int> counts(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& c : a.clusters) {
    for (int p : c.positions) {
      if (p >= 1 && p <= n) ++counts[static_cast<std::size_t>(p)];
    }
  }
  return counts;
}

RecallReport make_report(int n, std::vector<int> missing, std::vector<int> repeated) {
  RecallReport r;
  r.n_total = n;
  std::sort(missing.begin(), missing.end());
  std::sort(repeated.begin(), repeated.end());
  r.missing_rate = n > 0 ? static_cast<double>(missing.size()) / n : 0.0;
  r.repeated_rate = n > 0 ? static_cast<double>(repeated.size()) / n : 0.0;
  r.missing_ids = std::move(missing);
  r.repeated_ids = std::move(repeated);
  return r;
}

}  // namespace

RecallAccounting account(const ClusterAssignment& assignment, int n_total) {
  RecallAccounting acc;
  const auto counts = listing_counts(assignment, n_total);
  for (int p = 1; p <= n_total; ++p) {
    const int c = counts[static_cast<std::size_t>(p)];
    acc.listed += c;
    if (c == 0) {
      ++acc.missing;
    } else {
      ++acc.distinct;
      acc.overlap_multiplicity += c - 1;
    }
  }
  return acc;
}

RecallReport audit(const ClusterAssignment& assignment, int n_total) {
  if (n_total < 1) throw ConfigError("recall audit needs n_total >= 1");
  const auto counts = listing_counts(assignment, n_total);
  std::vector<int> missing, repeated;
  for (int p = 1; p <= n_total; ++p) {
    const int c = counts[static_cast<std::size_t>(p)];
    if (c == 0) missing.push_back(p);
    if (c >= 2) repeated.push_back(p);
  }
  return make_report(n_total, std::move(missing), std::move(repeated));
}

RecallReport audit(const std::vector<ClassificationAnswer>& answers) {
  if (answers.empty()) throw ConfigError("recall audit needs at least one answer");
  std::vector<int> missing, repeated;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (answers[i].refusal || answers[i].chosen.empty()) missing.push_back(id);
    if (answers[i].chosen.size() >= 2) repeated.push_back(id);
  }
  return make_report(static_cast<int>(answers.size()), std::move(missing), std::move(repeated));
}

ClusterAssignment repair(const ClusterAssignment& assignment, int k, std::uint64_t seed) {
  if (k < 1) throw ConfigError("repair needs k >= 1");
  const int n = assignment.n;
  ClusterAssignment out = assignment;
  std::vector<bool> placed(static_cast<std::size_t>(n) + 1, false);
  for (auto& cluster : out.clusters) {
    std::vector<int> kept;
    for (int p : cluster.positions) {
      if (p < 1 || p > n || placed[static_cast<std::size_t>(p)]) continue;
      placed[static_cast<std::size_t>(p)] = true;
      kept.push_back(p);
    }
    cluster.positions = std::move(kept);
  }
  auto rng = stream_for(seed, "repair");
  for (int p = 1; p <= n; ++p) {
    if (placed[static_cast<std::size_t>(p)]) continue;
    const int target = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    auto it = std::find_if(out.clusters.begin(), out.clusters.end(), [&](const Cluster& c) { return c.index == target; });
    if (it == out.clusters.end()) {
      out.clusters.push_back(Cluster{target, {}});
      it = std::prev(out.clusters.end());
    }
    it->positions.push_back(p);
  }
  return out;
}

std::vector<int> repair(const std::vector<ClassificationAnswer>& answers, int n_labels, std::uint64_t seed) {
  if (n_labels < 1) throw ConfigError("repair needs at least one intent label");
  auto rng = stream_for(seed, "repair_classification");
  std::vector<int> out;
  out.reserve(answers.size());
  for (const auto& a : answers) {
    if (!a.refusal && !a.chosen.empty()) {
      out.push_back(a.chosen.front());
    } else {
      out.push_back(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_labels))));
    }
  }
  return out;
}

std::vector<int> cluster_per_position(const ClusterAssignment& total) {
  std::vector<int> out(static_cast<std::size_t>(total.n), 0);
  for (const auto& c : total.clusters) {
    for (int p : c.positions) {
      if (p < 1 || p > total.n) continue;
      if (out[static_cast<std::size_t>(p - 1)] != 0) throw std::logic_error("assignment is not a function");
      out[static_cast<std::size_t>(p - 1)] = c.index;
    }
  }
  if (std::find(out.begin(), out.end(), 0) != out.end()) throw std::logic_error("assignment is not total");
  return out;
}

}  // namespace intentdisc
