#include "intentdisc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "intentdisc/errors.hpp"

namespace intentdisc {

Contingency Contingency::build(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw ConfigError("label lists differ in length: " + std::to_string(truth.size()) + " vs " +
                      std::to_string(predicted.size()));
  }
  Contingency t;
  t.row_labels.assign(truth.begin(), truth.end());
  t.col_labels.assign(predicted.begin(), predicted.end());
  for (auto* labels : {&t.row_labels, &t.col_labels}) {
    std::sort(labels->begin(), labels->end());
    labels->erase(std::unique(labels->begin(), labels->end()), labels->end());
  }
  t.counts.assign(t.row_labels.size(), std::vector<long long>(t.col_labels.size(), 0));
  t.row_sums.assign(t.row_labels.size(), 0);
  t.col_sums.assign(t.col_labels.size(), 0);
  auto index_of = [](const std::vector<int>& labels, int value) {
    return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), value) - labels.begin());
  };
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t r = index_of(t.row_labels, truth[i]);
    const std::size_t c = index_of(t.col_labels, predicted[i]);
    ++t.counts[r][c];
    ++t.row_sums[r];
    ++t.col_sums[c];
  }
  t.total = static_cast<long long>(truth.size());
  return t;
}

long long matched_count(const Contingency& table) {
  CostMatrix cost(table.row_labels.size(), table.col_labels.size());
  for (std::size_t r = 0; r < cost.rows(); ++r) {
    for (std::size_t c = 0; c < cost.cols(); ++c) cost(r, c) = -static_cast<double>(table.counts[r][c]);
  }
  const LinearAssignment match = hungarian_rectangular(cost);
  long long matched = 0;
  for (std::size_t r = 0; r < match.row_to_col.size(); ++r) {
    if (match.row_to_col[r] < cost.cols()) matched += table.counts[r][match.row_to_col[r]];
  }
  return matched;
}

namespace {

double entropy(const std::vector<long long>& sums, double n) {
  double h = 0.0;
  for (long long s : sums) {
    if (s > 0) {
      const double p = static_cast<double>(s) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

double comb2(long long x) { return static_cast<double>(x) * static_cast<double>(x - 1) / 2.0; }

}  // namespace

ClusteringScores clustering_scores(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.empty()) throw ConfigError("clustering scores need at least one sample");
  const Contingency t = Contingency::build(truth, predicted);
  const double n = static_cast<double>(t.total);
  ClusteringScores s;
  s.acc = static_cast<double>(matched_count(t)) / n;

  double mi = 0.0;
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    for (std::size_t c = 0; c < t.col_labels.size(); ++c) {
      const long long nij = t.counts[r][c];
      if (nij == 0) continue;
      mi += (static_cast<double>(nij) / n) *
            std::log(n * static_cast<double>(nij) / (static_cast<double>(t.row_sums[r]) * static_cast<double>(t.col_sums[c])));
    }
  }
  const double h_true = entropy(t.row_sums, n);
  const double h_pred = entropy(t.col_sums, n);
  const double denom = (h_true + h_pred) / 2.0;
  if (denom <= 0.0) {
    s.nmi = (t.row_labels.size() == 1 && t.col_labels.size() == 1) ? 1.0 : 0.0;
  } else {
    s.nmi = std::clamp(mi / denom, 0.0, 1.0);
  }

  double sum_cells = 0.0;
  for (const auto& row : t.counts) {
    for (long long nij : row) sum_cells += comb2(nij);
  }
  double sum_rows = 0.0, sum_cols = 0.0;
  for (long long a : t.row_sums) sum_rows += comb2(a);
  for (long long b : t.col_sums) sum_cols += comb2(b);
  const double total_pairs = comb2(t.total);
  const double expected = total_pairs > 0 ? sum_rows * sum_cols / total_pairs : 0.0;
  const double max_index = (sum_rows + sum_cols) / 2.0;
  // Identical trivial partitions (all singletons, or one shared cluster) leave 0/0; they agree perfectly.
  s.ari = max_index == expected ? 1.0 : (sum_cells - expected) / (max_index - expected);
  return s;
}

namespace {

GroupCell score_group(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                      const std::vector<std::string>& group) {
  GroupCell cell;
  const std::set<std::string> members(group.begin(), group.end());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!members.count(gold[i])) continue;
    ++cell.support;
    if (pred[i] == gold[i]) ++correct;
  }
  cell.accuracy = cell.support ? static_cast<double>(correct) / static_cast<double>(cell.support) : 0.0;
  if (group.empty()) return cell;
  double f1_sum = 0.0;
  for (const auto& label : group) {
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool is_gold = gold[i] == label;
      const bool is_pred = pred[i] == label;
      if (is_gold && is_pred) ++tp;
      else if (is_pred) ++fp;
      else if (is_gold) ++fn;
    }
    const long long denom = 2 * tp + fp + fn;
    f1_sum += denom ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
  }
  cell.macro_f1 = f1_sum / static_cast<double>(group.size());
  return cell;
}

}  // namespace

GroupScores group_scores(const std::vector<std::string>& gold, const std::vector<std::string>& predicted,
                         const std::vector<std::string>& ind_labels, const std::vector<std::string>& ood_labels,
                         const std::optional<std::map<std::string, std::string>>& pseudo_alignment) {
  if (gold.size() != predicted.size()) throw ConfigError("gold and predicted label lists differ in length");
  std::vector<std::string> pred = predicted;
  if (pseudo_alignment) {
    for (auto& p : pred) {
      if (auto it = pseudo_alignment->find(p); it != pseudo_alignment->end()) p = it->second;
    }
  }
  std::vector<std::string> all = ind_labels;
  all.insert(all.end(), ood_labels.begin(), ood_labels.end());
  return GroupScores{score_group(gold, pred, ind_labels), score_group(gold, pred, ood_labels),
                     score_group(gold, pred, all)};
}

std::map<std::string, std::string> align_pseudo(const std::vector<std::string>& ood_gold,
                                                const std::vector<std::string>& ood_pred_pseudo) {
  if (ood_gold.empty()) throw ConfigError("align_pseudo: empty inputs");
  if (ood_gold.size() != ood_pred_pseudo.size()) throw ConfigError("align_pseudo: input lists differ in length");
  std::vector<std::string> pseudo(ood_pred_pseudo.begin(), ood_pred_pseudo.end());
  std::vector<std::string> gold(ood_gold.begin(), ood_gold.end());
  for (auto* v : {&pseudo, &gold}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  auto index_of = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), s) - v.begin());
  };
  CostMatrix cost(pseudo.size(), gold.size(), 0.0);
  for (std::size_t i = 0; i < ood_gold.size(); ++i) {
    cost(index_of(pseudo, ood_pred_pseudo[i]), index_of(gold, ood_gold[i])) -= 1.0;
  }
  const LinearAssignment match = hungarian_rectangular(cost);
  std::map<std::string, std::string> out;
  for (std::size_t r = 0; r < pseudo.size(); ++r) {
    const std::size_t c = match.row_to_col[r];
    out[pseudo[r]] = c < gold.size() ? gold[c] : kUnalignedLabel;
  }
  return out;
}

int k_error(int k_pred, int k_true) {
  if (k_pred < 1 || k_true < 1) throw ConfigError("k_error needs both cluster counts >= 1");
  return std::abs(k_pred - k_true);
}

}  // namespace intentdisc
