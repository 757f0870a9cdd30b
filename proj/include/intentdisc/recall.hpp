#pragma once

#include <cstdint>
#include <vector>

#include "intentdisc/parser.hpp"

namespace intentdisc {

struct RecallReport {
  int n_total = 0;
  std::vector<int> missing_ids;    // sorted, 1-based positions / query indices
  std::vector<int> repeated_ids;   // sorted
  double missing_rate = 0.0;
  double repeated_rate = 0.0;

  friend bool operator==(const RecallReport&, const RecallReport&) = default;
};

/// Tally used to check that a parse neither invents nor loses positions:
/// union + missing == n and listed - overlap_multiplicity == union.
struct RecallAccounting {
  int listed = 0;                 // sum of cluster sizes
  int distinct = 0;               // |union of clusters|
  int missing = 0;
  int overlap_multiplicity = 0;   // extra listings beyond the first, summed over positions

  bool reconciles(int n) const noexcept {
    return distinct + missing == n && listed - overlap_multiplicity == distinct;
  }
};

RecallAccounting account(const ClusterAssignment& assignment, int n_total);

/// Missing: positions in no cluster. Repeated: positions in two or more clusters.
RecallReport audit(const ClusterAssignment& assignment, int n_total);

/// Missing: refusals and empty answers. Repeated: answers naming two or more intents.
RecallReport audit(const std::vector<ClassificationAnswer>& answers);

/// Every position ends up in exactly one cluster: repeated positions keep the cluster
/// listed first in the response, missing positions are drawn uniformly from 1..k.
ClusterAssignment repair(const ClusterAssignment& assignment, int k, std::uint64_t seed);

/// Per-query intent index (1-based): the first chosen intent, or a uniform draw from 1..n_labels.
std::vector<int> repair(const std::vector<ClassificationAnswer>& answers, int n_labels, std::uint64_t seed);

/// cluster index per position 1..n (element p-1). The assignment must be total.
std::vector<int> cluster_per_position(const ClusterAssignment& total);

}  // namespace intentdisc
