#include <doctest.h>

#include "intentdisc/errors.hpp"
#include "intentdisc/parser.hpp"
#include "intentdisc/recall.hpp"
#include "intentdisc/rng.hpp"
#include "../support/fixtures.hpp"

using namespace intentdisc;

TEST_CASE("plain category lines") {
  const auto a = parse_cluster_assignment("Category 1: 1,2\nCategory 2: 3, 4 and 5", 5);
  REQUIRE(a.k() == 2);
  CHECK(a.clusters[0] == Cluster{1, {1, 2}});
  CHECK(a.clusters[1] == Cluster{2, {3, 4, 5}});
  CHECK(a.diagnostics.ignored_lines == 0);
}

TEST_CASE("format drift is tolerated") {
  const std::string resp =
      "Sure! Here is the result:\n"
      "**Category 1**: 1, 2; 3\n"
      "- category 2 - 4 5\n"
      "CATEGORY 3) __6__\n"
      "\n"
      "Let me know if you need anything else.";
  const auto a = parse_cluster_assignment(resp, 6);
  REQUIRE(a.k() == 3);
  CHECK(a.clusters[0].positions == std::vector<int>{1, 2, 3});
  CHECK(a.clusters[1].positions == std::vector<int>{4, 5});
  CHECK(a.clusters[2].positions == std::vector<int>{6});
  CHECK(a.diagnostics.ignored_lines == 2);
}

TEST_CASE("clusters keep response order and merge repeated headers") {
  const auto a = parse_cluster_assignment("Category 3: 1\nCategory 1: 2\nCategory 3: 3, 1", 3);
  REQUIRE(a.k() == 2);
  CHECK(a.clusters[0] == Cluster{3, {1, 3}});
  CHECK(a.clusters[1] == Cluster{1, {2}});
  CHECK(a.diagnostics.duplicates_within_cluster == 1);
}

TEST_CASE("out-of-range positions are recorded, not scored") {
  const auto a = parse_cluster_assignment("Category 1: 1, 7, 0\nCategory 2: 2", 2);
  CHECK(a.diagnostics.foreign_positions == std::vector<int>{7, 0});
  CHECK(a.clusters[0].positions == std::vector<int>{1});
}

TEST_CASE("no category line is a parse error") {
  CHECK_THROWS_AS(parse_cluster_assignment("I cannot help with that.", 5), ParseError);
  CHECK_THROWS_AS(parse_cluster_assignment("", 5), ParseError);
  CHECK_THROWS_AS(parse_cluster_assignment("Category 1: shipping questions", 5), ParseError);
}

TEST_CASE("format then parse is the identity") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(30));
    ClusterAssignment a;
    a.n = n;
    const int k = 1 + static_cast<int>(rng.below(6));
    for (int c = 1; c <= k; ++c) {
      Cluster cl{c, {}};
      for (int p = 1; p <= n; ++p) {
        if (rng.below(3) == 0) cl.positions.push_back(p);
      }
      if (!cl.positions.empty()) a.clusters.push_back(cl);
    }
    if (a.clusters.empty()) a.clusters.push_back(Cluster{1, {1}});
    const auto back = parse_cluster_assignment(format_cluster_assignment(a), n);
    CHECK(back.clusters == a.clusters);
  }
}

TEST_CASE("parser never throws anything but ParseError on noise") {
  SplitMix64 rng(99);
  const std::string alphabet = "Category 0123456789:,;.-*_ and\nSet#()";
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const auto len = rng.below(80);
    for (std::uint64_t i = 0; i < len; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
    try {
      const auto a = parse_cluster_assignment(s, 10);
      const auto acc = account(a, 10);
      CHECK(acc.reconciles(10));
    } catch (const ParseError&) {
    }
    const auto ans = parse_classification(s, {"a_b", "c"});
    for (int c : ans.chosen) CHECK((c >= 1 && c <= 2));
  }
}

TEST_CASE("sample discovery response: missing and repeated recall") {
  const auto a = parse_cluster_assignment(fixtures::read("discovery_recall_sample.txt"), 50);
  CHECK(a.k() == 10);
  const auto r = audit(a, 50);
  CHECK(r.missing_ids == std::vector<int>{20, 26, 29, 35, 40, 41, 42, 46, 48});
  CHECK(r.repeated_ids == std::vector<int>{2, 27});
  CHECK(r.missing_rate == 0.18);
  CHECK(r.repeated_rate == 0.04);
  CHECK(account(a, 50).reconciles(50));
}

TEST_CASE("intent descriptions") {
  const std::string resp =
      "Category 1: 1, 2\nCategory 2: 3\n\n"
      "Category 1: card delivery timing\n"
      "2. cancelling a transfer\n";
  const auto d = parse_intent_descriptions(resp, 3);
  CHECK(d.by_cluster.at(1) == "card delivery timing");
  CHECK(d.by_cluster.at(2) == "cancelling a transfer");
  CHECK(d.by_cluster.at(3) == "unlabeled cluster 3");
  CHECK(d.shortfall() == 1);
  CHECK(d.missing == std::vector<int>{3});
}

TEST_CASE("classification: numbers first") {
  const std::vector<std::string> labels{"pin_blocked", "card_arrival", "exchange_rate"};
  CHECK(parse_classification("2", labels).chosen == std::vector<int>{2});
  CHECK(parse_classification("Category 3: exchange_rate", labels).chosen == std::vector<int>{3});
  CHECK(parse_classification("It belongs to Set 1, number 1.", labels).chosen == std::vector<int>{1});
  CHECK(parse_classification("about 2.5 percent", labels).chosen.empty());
  CHECK(parse_classification("pin blocked", labels).chosen == std::vector<int>{1});
  CHECK(parse_classification("Card_Arrival or maybe exchange rate", labels).chosen == std::vector<int>{2, 3});
  CHECK(parse_classification("99", labels).chosen.empty());
}

TEST_CASE("classification: refusals") {
  const std::vector<std::string> joint = fixtures::banking_ind();
  const auto a = parse_classification(fixtures::read("classify_refusal.txt"), joint);
  CHECK(a.refusal);
  CHECK(a.chosen.empty());
  const auto b = parse_classification(fixtures::read("classify_refusal_explained.txt"), joint);
  CHECK(b.refusal);
  const auto c = parse_classification("I am not sure", joint, {"not sure"});
  CHECK(c.refusal);
  const auto d = parse_classification("I am not sure", joint);
  CHECK_FALSE(d.refusal);
  CHECK(d.chosen.empty());
}

TEST_CASE("classification: several intents named") {
  const std::vector<std::string> joint = fixtures::banking_ind();
  const auto a = parse_classification(fixtures::read("classify_multi.txt"), joint);
  CHECK(a.chosen == std::vector<int>{8, 3, 11});
  CHECK_FALSE(a.refusal);
  std::vector<std::string> with_ood = joint;
  for (int i = 0; i < 10; ++i) with_ood.push_back("ood " + std::to_string(i));
  const auto b = parse_classification(fixtures::read("classify_truncated.txt"), with_ood);
  CHECK(b.chosen == std::vector<int>{12, 24});
}
