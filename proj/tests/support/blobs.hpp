#pragma once

#include <cmath>
#include <numbers>

#include "intentdisc/baseline.hpp"
#include "intentdisc/rng.hpp"

namespace fixtures {

// Isotropic Gaussian blobs around the corners of a unit equilateral triangle, in 2-D.
// Rows are grouped by blob: blob b holds rows [b * per_blob, (b + 1) * per_blob).
inline intentdisc::EmbeddingSet three_blobs(std::uint64_t seed, int per_blob = 30, double sigma = 0.05) {
  const double centers[3][2] = {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
  auto rng = intentdisc::stream_for(seed, "blobs");
  auto gauss = [&] {
    // Box-Muller on SplitMix64 uniforms.
    const double u1 = 1.0 - rng.unit(), u2 = rng.unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };
  std::vector<std::int64_t> ids;
  std::vector<std::vector<double>> rows;
  for (int b = 0; b < 3; ++b) {
    for (int i = 0; i < per_blob; ++i) {
      ids.push_back(b * per_blob + i + 1);
      rows.push_back({centers[b][0] + sigma * gauss(), centers[b][1] + sigma * gauss()});
    }
  }
  return intentdisc::EmbeddingSet(std::move(ids), std::move(rows), "blobs");
}

inline std::vector<int> blob_truth(int per_blob = 30) {
  std::vector<int> t;
  for (int b = 0; b < 3; ++b) t.insert(t.end(), static_cast<std::size_t>(per_blob), b);
  return t;
}

}  // namespace fixtures
