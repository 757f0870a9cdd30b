#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "intentdisc/baseline.hpp"
#include "intentdisc/errors.hpp"
#include "intentdisc/metrics.hpp"
#include "../support/blobs.hpp"

using namespace intentdisc;

namespace {

EmbeddingSet line_points(std::vector<double> xs) {
  std::vector<std::int64_t> ids;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ids.push_back(static_cast<std::int64_t>(i));
    rows.push_back({xs[i]});
  }
  return EmbeddingSet(std::move(ids), std::move(rows), "line");
}

}  // namespace

TEST_CASE("embedding set validation") {
  CHECK_THROWS_AS(EmbeddingSet({1, 2}, {{1.0, 2.0}, {1.0}}, "t"), DataError);
  CHECK_THROWS_AS(EmbeddingSet({1}, {{1.0}, {2.0}}, "t"), DataError);
  CHECK_THROWS_AS(EmbeddingSet({1}, {{std::nan("")}}, "t"), DataError);
  const EmbeddingSet e({5, 6}, {{1.0, 2.0}, {3.0, 4.0}}, "t");
  CHECK(e.dim() == 2);
  CHECK(e.row(1)[0] == 3.0);
}

TEST_CASE("embedding file") {
  const auto path = std::filesystem::temp_directory_path() / "intentdisc_emb.jsonl";
  std::ofstream(path) << "{\"id\": 1, \"vector\": [0.5, 1]}\n{\"id\": 2, \"vector\": [1.5, 2]}\n";
  const auto e = load_embeddings(path);
  CHECK(e.size() == 2);
  CHECK(e.ids()[1] == 2);
  std::ofstream(path) << "{\"id\": 1, \"vector\": [0.5, 1]}\n{\"id\": 2, \"vector\": [1.5]}\n";
  CHECK_THROWS_AS(load_embeddings(path), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("k = 1 puts everything in one cluster at the mean") {
  const auto r = kmeans(line_points({1, 2, 3, 6}), 1, 0);
  CHECK(r.assignment == std::vector<int>{0, 0, 0, 0});
  CHECK(r.centroids[0][0] == doctest::Approx(3.0));
}

TEST_CASE("k = n gives singletons with zero objective") {
  const auto r = kmeans(line_points({1, 5, 9}), 3, 4);
  std::set<int> used(r.assignment.begin(), r.assignment.end());
  CHECK(used.size() == 3);
  CHECK(r.objective_history.back() == doctest::Approx(0.0));
  CHECK_THROWS_AS(kmeans(line_points({1, 2}), 3, 0), ConfigError);
  CHECK_THROWS_AS(kmeans(line_points({1, 2}), 0, 0), ConfigError);
}

TEST_CASE("kmeans is deterministic and its objective never increases") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = fixtures::three_blobs(seed, 30, 0.3);
    const auto a = kmeans(x, 5, seed);
    const auto b = kmeans(x, 5, seed);
    CHECK(a.assignment == b.assignment);
    for (std::size_t i = 1; i < a.objective_history.size(); ++i) {
      CHECK(a.objective_history[i] <= a.objective_history[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("well separated blobs are recovered") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = kmeans(fixtures::three_blobs(seed), 3, seed);
    CHECK(clustering_scores(fixtures::blob_truth(), r.assignment).acc == 1.0);
  }
}

TEST_CASE("estimate_k counts clusters above the size threshold") {
  // Two big groups and one stray point: K' = 3, threshold 0.9 * 7 / 3 = 2.1.
  const auto e = estimate_k(line_points({0, 0.1, 0.2, 10, 10.1, 10.2, 50}), 3, 0.9, 1);
  CHECK(e.k_prime == 3);
  CHECK(e.min_cluster_size == doctest::Approx(2.1));
  CHECK(e.k_pred == 2);
  CHECK(e.cluster_sizes.size() == 3);
  CHECK_THROWS_AS(estimate_k(line_points({0, 1}), 2, 0.0, 1), ConfigError);
}

TEST_CASE("k prime from a multiplier") {
  CHECK(k_prime_from_multiplier(2.0, 3) == 6);
  CHECK(k_prime_from_multiplier(1.5, 5) == 8);
  CHECK_THROWS_AS(k_prime_from_multiplier(0.5, 5), ConfigError);
}
