#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace intentdisc {

/// Externally produced sentence embeddings, one row per utterance.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  /// Throws DataError on ragged rows, non-finite values or an id/row count mismatch.
  EmbeddingSet(std::vector<std::int64_t> ids, std::vector<std::vector<double>> rows, std::string source_tag);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::int64_t>& ids() const noexcept { return ids_; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }
  const std::string& source_tag() const noexcept { return source_tag_; }

 private:
  std::vector<std::int64_t> ids_;
  std::vector<double> data_;
  std::size_t dim_ = 0;
  std::string source_tag_;
};

/// JSON-lines {"id": int, "vector": [numbers]}; dimensionality fixed by the first line.
EmbeddingSet load_embeddings(const std::filesystem::path& path);

struct KMeansResult {
  std::vector<int> assignment;             // 0-based cluster per row
  std::vector<std::vector<double>> centroids;
  std::vector<double> objective_history;   // within-cluster sum of squares after each iteration
  int iterations = 0;
};

/// k-means++ seeding then Lloyd iterations until the assignment stops changing or
/// max_iters is reached. Empty clusters are re-seeded from the farthest point.
KMeansResult kmeans(const EmbeddingSet& embeddings, int k, std::uint64_t seed, int max_iters = 300);

struct KEstimate {
  int k_pred = 0;
  int k_prime = 0;
  double min_cluster_size = 0.0;  // threshold_ratio * n / k_prime
  std::vector<int> cluster_sizes;
};

/// Overclusters with k_prime centroids and counts clusters holding at least
/// size_threshold_ratio * n / k_prime points.
KEstimate estimate_k(const EmbeddingSet& embeddings, int k_prime, double size_threshold_ratio, std::uint64_t seed,
                     int max_iters = 300);

/// round(multiplier * k_reference); multiplier must be >= 1.
int k_prime_from_multiplier(double multiplier, int k_reference);

}  // namespace intentdisc
