#include <doctest.h>

#include <set>

#include "intentdisc/errors.hpp"
#include "intentdisc/recall.hpp"
#include "intentdisc/rng.hpp"
#include "../support/fixtures.hpp"

using namespace intentdisc;

namespace {

ClusterAssignment fuzz_assignment(SplitMix64& rng) {
  ClusterAssignment a;
  a.n = 1 + static_cast<int>(rng.below(25));
  const int k = 1 + static_cast<int>(rng.below(6));
  for (int c = 1; c <= k; ++c) {
    if (rng.below(5) == 0) continue;
    Cluster cl{c, {}};
    const auto m = rng.below(static_cast<std::uint64_t>(a.n) + 1);
    for (std::uint64_t i = 0; i < m; ++i) {
      const int p = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(a.n)));
      if (std::find(cl.positions.begin(), cl.positions.end(), p) == cl.positions.end()) cl.positions.push_back(p);
    }
    a.clusters.push_back(cl);
  }
  return a;
}

}  // namespace

TEST_CASE("small audit example") {
  ClusterAssignment a;
  a.n = 5;
  a.clusters = {Cluster{1, {1, 2}}, Cluster{2, {2}}};
  const auto r = audit(a, 5);
  CHECK(r.missing_ids == std::vector<int>{3, 4, 5});
  CHECK(r.repeated_ids == std::vector<int>{2});
  CHECK(r.missing_rate == 0.6);
  CHECK(r.repeated_rate == 0.2);
}

TEST_CASE("repair keeps the first listed cluster and fills gaps from 1..k") {
  ClusterAssignment a;
  a.n = 6;
  a.clusters = {Cluster{2, {1, 2}}, Cluster{1, {2, 3}}};
  const auto fixed = repair(a, 3, 42);
  const auto per = cluster_per_position(fixed);
  CHECK(per[0] == 2);
  CHECK(per[1] == 2);
  CHECK(per[2] == 1);
  for (int c : per) CHECK((c >= 1 && c <= 3));
  const auto r = audit(fixed, 6);
  CHECK(r.missing_ids.empty());
  CHECK(r.repeated_ids.empty());
}

TEST_CASE("repair contract on fuzzed assignments") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = fuzz_assignment(rng);
    const int k = 1 + static_cast<int>(rng.below(6));
    const std::uint64_t seed = rng.next();
    const auto once = repair(a, k, seed);
    const auto per = cluster_per_position(once);  // throws unless total and single-valued
    CHECK(per.size() == static_cast<std::size_t>(a.n));
    const auto twice = repair(once, k, seed ^ 1);
    CHECK(twice.clusters == once.clusters);
    CHECK(repair(a, k, seed).clusters == once.clusters);
    // Positions already placed exactly once keep their cluster.
    for (const auto& c : a.clusters) {
      for (int p : c.positions) {
        int listings = 0;
        for (const auto& d : a.clusters) listings += static_cast<int>(std::count(d.positions.begin(), d.positions.end(), p));
        if (listings == 1) CHECK(per[static_cast<std::size_t>(p - 1)] == c.index);
      }
    }
    CHECK(account(a, a.n).reconciles(a.n));
  }
}

TEST_CASE("missing positions spread over every cluster") {
  ClusterAssignment a;
  a.n = 3000;
  a.clusters = {Cluster{1, {1}}};
  const auto per = cluster_per_position(repair(a, 3, 7));
  std::map<int, int> counts;
  for (int c : per) ++counts[c];
  for (int c = 1; c <= 3; ++c) CHECK(counts[c] > 900);
}

TEST_CASE("classification audit and repair") {
  const std::vector<std::string> joint = fixtures::banking_ind();
  std::vector<ClassificationAnswer> answers{
      parse_classification(fixtures::read("classify_refusal.txt"), joint),
      parse_classification(fixtures::read("classify_multi.txt"), joint),
      parse_classification("4", joint),
  };
  const auto r = audit(answers);
  CHECK(r.missing_ids == std::vector<int>{1});
  CHECK(r.repeated_ids == std::vector<int>{2});
  const auto fixed = repair(answers, static_cast<int>(joint.size()), 5);
  CHECK(fixed[1] == 8);
  CHECK(fixed[2] == 4);
  CHECK((fixed[0] >= 1 && fixed[0] <= 15));
  CHECK(repair(answers, static_cast<int>(joint.size()), 5) == fixed);
  CHECK_THROWS_AS(repair(answers, 0, 5), ConfigError);
}
