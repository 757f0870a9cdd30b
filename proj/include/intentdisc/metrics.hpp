#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace intentdisc {

/// Dense row-major matrix of assignment costs.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct LinearAssignment {
  std::vector<std::size_t> row_to_col;
  double cost = 0.0;
};

/// Minimum-cost perfect matching of a square matrix in O(n^3).
/// Throws ConfigError on an empty, non-square or non-finite matrix.
LinearAssignment hungarian(const CostMatrix& cost);

/// Rectangular matrices are padded with zero-cost dummy rows/columns. Entries of
/// row_to_col that are >= cols mean the row was left unmatched.
LinearAssignment hungarian_rectangular(const CostMatrix& cost);

/// counts[r][c]: samples of true class r placed in predicted cluster c.
struct Contingency {
  std::vector<int> row_labels;   // sorted distinct true labels
  std::vector<int> col_labels;   // sorted distinct predicted labels
  std::vector<std::vector<long long>> counts;
  std::vector<long long> row_sums;
  std::vector<long long> col_sums;
  long long total = 0;

  static Contingency build(std::span<const int> truth, std::span<const int> predicted);
};

struct ClusteringScores {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
};

/// ACC via Hungarian matching of the contingency table, NMI normalized by the
/// arithmetic mean of the two entropies, ARI under the permutation model.
ClusteringScores clustering_scores(std::span<const int> truth, std::span<const int> predicted);
/// Matched sample count behind ACC.
long long matched_count(const Contingency& table);

struct GroupCell {
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t support = 0;
};

struct GroupScores {
  GroupCell ind;
  GroupCell ood;
  GroupCell all;
};

/// Sink for pseudo intents that no gold OOD label was matched to; always scored wrong.
inline constexpr const char* kUnalignedLabel = "<unaligned>";

/// Accuracy per group over samples whose gold label is in the group; macro F1 over the
/// group's labels with per-class F1 counted across all samples. Predictions are first
/// mapped through `pseudo_alignment` when given.
GroupScores group_scores(const std::vector<std::string>& gold, const std::vector<std::string>& predicted,
                         const std::vector<std::string>& ind_labels, const std::vector<std::string>& ood_labels,
                         const std::optional<std::map<std::string, std::string>>& pseudo_alignment = std::nullopt);

/// Maximum-overlap bijection between predicted pseudo intents and gold OOD labels.
/// Pseudo intents left without a partner map to kUnalignedLabel.
std::map<std::string, std::string> align_pseudo(const std::vector<std::string>& ood_gold,
                                                const std::vector<std::string>& ood_pred_pseudo);

/// |k_pred - k_true|; both must be >= 1.
int k_error(int k_pred, int k_true);

}  // namespace intentdisc
