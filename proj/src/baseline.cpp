#include "intentdisc/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "intentdisc/errors.hpp"
#include "intentdisc/rng.hpp"

namespace intentdisc {

EmbeddingSet::EmbeddingSet(std::vector<std::int64_t> ids, std::vector<std::vector<double>> rows, std::string source_tag)
    : ids_(std::move(ids)), source_tag_(std::move(source_tag)) {
  if (ids_.size() != rows.size()) throw DataError("embedding id count does not match row count");
  dim_ = rows.empty() ? 0 : rows.front().size();
  data_.reserve(rows.size() * dim_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim_) {
      throw DataError("embedding row " + std::to_string(i + 1) + " has dimension " + std::to_string(rows[i].size()) +
                      ", expected " + std::to_string(dim_));
    }
    for (double x : rows[i]) {
      if (!std::isfinite(x)) throw DataError("embedding row " + std::to_string(i + 1) + " holds a non-finite value");
    }
    data_.insert(data_.end(), rows[i].begin(), rows[i].end());
  }
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path.string());
  std::vector<std::int64_t> ids;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ids.push_back(j.at("id").get<std::int64_t>());
      rows.push_back(j.at("vector").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad embedding record: " + e.what());
    }
    if (rows.back().size() != rows.front().size()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": dimension " +
                      std::to_string(rows.back().size()) + " differs from first line's " +
                      std::to_string(rows.front().size()));
    }
  }
  if (rows.empty()) throw DataError("embedding file " + path.string() + " is empty");
  return EmbeddingSet(std::move(ids), std::move(rows), path.filename().string());
}

namespace {

double sq_dist(std::span<const double> a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

std::vector<std::vector<double>> plus_plus_seeds(const EmbeddingSet& x, int k, SplitMix64& rng) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> centroids;
  auto take = [&](std::size_t i) { centroids.emplace_back(x.row(i).begin(), x.row(i).end()); };
  take(static_cast<std::size_t>(rng.below(n)));
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = sq_dist(x.row(i), centroids.back());
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (double d : nearest) total += d;
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = static_cast<std::size_t>(rng.below(n));
    } else {
      double target = rng.unit() * total;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        target -= nearest[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    }
    take(pick);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], sq_dist(x.row(i), centroids.back()));
  }
  return centroids;
}

double objective(const EmbeddingSet& x, const std::vector<int>& assignment,
                 const std::vector<std::vector<double>>& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += sq_dist(x.row(i), centroids[static_cast<std::size_t>(assignment[i])]);
  }
  return total;
}

}  // namespace

KMeansResult kmeans(const EmbeddingSet& x, int k, std::uint64_t seed, int max_iters) {
  const std::size_t n = x.size();
  if (k < 1) throw ConfigError("kmeans needs k >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw ConfigError("kmeans: k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " points");
  }
  if (max_iters < 1) throw ConfigError("kmeans needs max_iters >= 1");
  const std::size_t d = x.dim();
  const auto kk = static_cast<std::size_t>(k);
  auto rng = stream_for(seed, "kmeans");

  KMeansResult result;
  result.centroids = plus_plus_seeds(x, k, rng);
  result.assignment.assign(n, -1);
  std::vector<double> dist(n, 0.0);

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < kk; ++c) {
        const double dc = sq_dist(x.row(i), result.centroids[c]);
        if (dc < best_d) {
          best_d = dc;
          best = static_cast<int>(c);
        }
      }
      dist[i] = best_d;
      if (result.assignment[i] != best) {
        result.assignment[i] = best;
        changed = true;
      }
    }
    std::vector<int> sizes(kk, 0);
    for (int a : result.assignment) ++sizes[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < kk; ++c) {
      if (sizes[c] > 0) continue;
      // Re-seed from the point farthest from its centroid, among clusters that can spare one.
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(result.assignment[i])] < 2) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) break;
      --sizes[static_cast<std::size_t>(result.assignment[far])];
      result.assignment[far] = static_cast<int>(c);
      sizes[c] = 1;
      dist[far] = 0.0;
      changed = true;
    }
    if (!changed && iter > 0) break;
    std::vector<std::vector<double>> sums(kk, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[static_cast<std::size_t>(result.assignment[i])];
      const auto row = x.row(i);
      for (std::size_t j = 0; j < d; ++j) s[j] += row[j];
    }
    for (std::size_t c = 0; c < kk; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) result.centroids[c][j] = sums[c][j] / sizes[c];
    }
    result.objective_history.push_back(objective(x, result.assignment, result.centroids));
    result.iterations = iter + 1;
  }
  return result;
}

KEstimate estimate_k(const EmbeddingSet& x, int k_prime, double size_threshold_ratio, std::uint64_t seed,
                     int max_iters) {
  if (!(size_threshold_ratio > 0.0 && size_threshold_ratio <= 1.0)) {
    throw ConfigError("size_threshold_ratio must lie in (0, 1]");
  }
  if (k_prime < 1 || static_cast<std::size_t>(k_prime) > x.size()) {
    throw ConfigError("K' = " + std::to_string(k_prime) + " must lie in 1.." + std::to_string(x.size()));
  }
  const KMeansResult km = kmeans(x, k_prime, seed, max_iters);
  KEstimate est;
  est.k_prime = k_prime;
  est.min_cluster_size = size_threshold_ratio * static_cast<double>(x.size()) / static_cast<double>(k_prime);
  est.cluster_sizes.assign(static_cast<std::size_t>(k_prime), 0);
  for (int a : km.assignment) ++est.cluster_sizes[static_cast<std::size_t>(a)];
  for (int s : est.cluster_sizes) {
    if (static_cast<double>(s) >= est.min_cluster_size) ++est.k_pred;
  }
  return est;
}

int k_prime_from_multiplier(double multiplier, int k_reference) {
  if (!(multiplier >= 1.0)) throw ConfigError("K' multiplier must be >= 1");
  if (k_reference < 1) throw ConfigError("reference cluster count must be >= 1");
  return static_cast<int>(std::lround(multiplier * k_reference));
}

}  // namespace intentdisc
