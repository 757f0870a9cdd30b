#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "intentdisc/errors.hpp"
#include "intentdisc/prompt.hpp"
#include "intentdisc/template.hpp"
#include "../support/fixtures.hpp"
#include "../support/prompt_goldens.hpp"

using namespace intentdisc;
using namespace goldens;

namespace {

ExperimentSplit bigger_split(int n) {
  ExperimentSplit s = example_split();
  s.discovery_pool.clear();
  for (int i = 0; i < n; ++i) s.discovery_pool.push_back(Utterance{100 + i, "q" + std::to_string(i), "x"});
  return s;
}

const PromptForge& forge() {
  static const PromptForge f(TemplateSet::load(fixtures::templates_dir()));
  return f;
}

}  // namespace

TEST_CASE("template placeholders and sections") {
  const auto t = Template::parse("a {{x}}{{#y}} [{{y}}]{{/y}}!", "t");
  CHECK(t.render({{"x", "1"}, {"y", "2"}}) == "a 1 [2]!");
  CHECK(t.render({{"x", "1"}}) == "a 1!");
  CHECK(t.render({{"x", "1"}, {"y", ""}}) == "a 1!");
  CHECK_THROWS_AS(t.render({{"y", "2"}}), ConfigError);
  CHECK(t.uses("x"));
  CHECK(t.uses("y"));
  CHECK_FALSE(t.uses("z"));
  CHECK_THROWS_AS(Template::parse("{{#a}}open", "t"), ConfigError);
  CHECK_THROWS_AS(Template::parse("{{/a}}", "t"), ConfigError);
  CHECK_THROWS_AS(Template::parse("{{#a}}{{/b}}", "t"), ConfigError);
  CHECK_THROWS_AS(Template::parse("{{unterminated", "t"), ConfigError);
  CHECK(Template::parse("no tags { here }", "t").render({}) == "no tags { here }");
}

TEST_CASE("GID-DC prompts match the reference text") {
  const auto s1 = forge().render_gid_stage1(example_split(), DiscoveryMethod::DC, PromptVariant::Original, 5, 0);
  CHECK(s1.text == kDcStage1);
  CHECK(s1.stage == PromptStage::gid_stage1);
  CHECK(s1.declared_k == 5);

  const auto joint = build_joint_labels({"pin_blocked"}, {});
  const auto s2 = forge().render_gid_stage2(joint, {}, Utterance{1, kSample, "x"}, PromptVariant::Original);
  CHECK(s2.text == kZeroShotStage2);
}

TEST_CASE("GID-ZSD prompts match the reference text") {
  const auto s1 = forge().render_gid_stage1(example_split(), DiscoveryMethod::ZSD, PromptVariant::Original, 5, 0);
  CHECK(s1.text == kZsdStage1);
}

TEST_CASE("GID-FSD prompts match the reference text") {
  const auto s1 = forge().render_gid_stage1(example_split(), DiscoveryMethod::FSD, PromptVariant::Original, 5, 0);
  CHECK(s1.text == kFsdStage1);

  const auto joint = build_joint_labels({"pin_blocked"}, {});
  const auto demos = collect_demos(example_split(), DemoSource::ind);
  const auto s2 = forge().render_gid_stage2(joint, demos, Utterance{1, kSample, "x"}, PromptVariant::Original);
  CHECK(s2.text == kFsdStage2);
}

TEST_CASE("DC variants render the reference wording and differ from each other") {
  const auto split = example_split();
  const std::string tail = "\nSet 1: 1. " + kSample;
  const auto para = forge().render_discovery(split, DiscoveryMethod::DC, PromptVariant::Paraphrase, 5, 0);
  CHECK(para.text ==
        "I will provide you with a collection of sentences, noted as Set 1. Your task is to categorize the sentences "
        "in Set 1 into 5 distinct groups based on their underlying intentions. Your output should include the category "
        "number along with the corresponding sentence number, formatted as follows:\n"
        "Category 1: 1, 2, 3, 4, 5, and so on..." +
            tail);
  const auto verb = forge().render_discovery(split, DiscoveryMethod::DC, PromptVariant::Verbosity, 5, 0);
  CHECK(verb.text ==
        "Next, I will be presenting you with a compilation of sentences, collectively labeled as \"Set 1\". Your task "
        "is to categorize these sentences into 5 distinct groups according to their underlying intentions. Upon "
        "completing the task, your response is anticipated to take the form of a structured enumeration. Your "
        "response should consist of the assigned category number along with the respective sentence numbers following "
        "this format:\n"
        "Category 1: 1, 2, 3, 4, 5..." +
            tail);
  const auto simp = forge().render_discovery(split, DiscoveryMethod::DC, PromptVariant::Simplification, 5, 0);
  CHECK(simp.text ==
        "Next, I'll provide sentences in Set 1. Please categorize them into 5 groups based on intentions. Output the "
        "category number and sentence number in this format:\n"
        "Category 1: 1, 2, 3, 4, 5…" +
            tail);
  const auto orig = forge().render_discovery(split, DiscoveryMethod::DC, PromptVariant::Original, 5, 0);
  const std::set<std::string> texts{orig.text, para.text, verb.text, simp.text};
  CHECK(texts.size() == 4);
}

TEST_CASE("cluster count can be left out") {
  const auto p = forge().render_discovery(example_split(), DiscoveryMethod::DC, PromptVariant::Original, std::nullopt, 0);
  CHECK(p.text.find("into categories according") != std::string::npos);
  CHECK_FALSE(p.includes_cluster_count);
  CHECK_THROWS_AS(forge().render_discovery(example_split(), DiscoveryMethod::DC, PromptVariant::Original, 0, 0),
                  ConfigError);
}

TEST_CASE("sample order is a seeded permutation tracked by the index map") {
  const auto split = bigger_split(20);
  const auto a = forge().render_discovery(split, DiscoveryMethod::DC, PromptVariant::Original, 4, 1);
  const auto b = forge().render_discovery(split, DiscoveryMethod::DC, PromptVariant::Original, 4, 1);
  const auto c = forge().render_discovery(split, DiscoveryMethod::DC, PromptVariant::Original, 4, 2);
  CHECK(a.text == b.text);
  CHECK(a.index_map == b.index_map);
  CHECK(a.index_map != c.index_map);
  std::set<std::int64_t> ids(a.index_map.begin(), a.index_map.end());
  CHECK(ids.size() == 20);
  for (std::size_t p = 0; p < a.index_map.size(); ++p) {
    const std::string line = std::to_string(p + 1) + ". q" + std::to_string(a.index_map[p] - 100);
    CHECK(a.text.find(line) != std::string::npos);
  }
}

TEST_CASE("joint labels") {
  const auto j = build_joint_labels({"a", "b"}, {"c", "a", "c"}, {{"b", "the b intent"}});
  REQUIRE(j.size() == 5);
  CHECK(j[2].text == "c");
  CHECK(j[3].text == "a (2)");
  CHECK(j[4].text == "c (2)");
  CHECK(j[4].index == 5);
  CHECK(j[1].description == "the b intent");
  const auto p = forge().render_gid_stage2(j, {}, Utterance{1, "q", "a"}, PromptVariant::Original);
  CHECK(p.text.find("Descriptions of the categories in Set 1:\n2. b: the b intent\n") != std::string::npos);
  CHECK(p.text.find("1. a; 2. b; 3. c; 4. a (2); 5. c (2);") != std::string::npos);
}

TEST_CASE("stage-2 variants fall back to the original wording") {
  const auto j = build_joint_labels({"a"}, {"b"});
  const Utterance q{1, "q", "a"};
  CHECK(forge().render_gid_stage2(j, {}, q, PromptVariant::Paraphrase).text ==
        forge().render_gid_stage2(j, {}, q, PromptVariant::Original).text);
}

TEST_CASE("OOD demos drop the disjointness note") {
  ExperimentSplit s = example_split();
  s.ood_demo_pool["card_delivery_estimate"] = {Utterance{3, "when will it arrive", "card_delivery_estimate"}};
  const auto p = forge().render_discovery(s, DiscoveryMethod::FSD, PromptVariant::Original, 5, 0, DemoSource::ood);
  CHECK(p.text.find("do not overlap") == std::string::npos);
  CHECK(p.text.find("when will it arrive\tintention:card_delivery_estimate;") != std::string::npos);
  ExperimentSplit none = example_split();
  none.demo_pool.clear();
  CHECK_THROWS_AS(forge().render_discovery(none, DiscoveryMethod::FSD, PromptVariant::Original, 5, 0), ConfigError);
}

TEST_CASE("template directory validation") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "intentdisc_tmpl_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const auto& e : fs::directory_iterator(fixtures::templates_dir())) fs::copy(e.path(), dir / e.path().filename());
  CHECK_NOTHROW(TemplateSet::load(dir));

  std::ofstream(dir / "zsd.original.txt") << "Set 2: {{samples}}\n";
  CHECK_THROWS_AS(TemplateSet::load(dir), ConfigError);  // lacks ind_labels

  fs::remove(dir / "zsd.original.txt");
  CHECK_THROWS_AS(TemplateSet::load(dir), ConfigError);  // missing file

  fs::copy(fs::path(fixtures::templates_dir()) / "zsd.original.txt", dir / "zsd.original.txt");
  std::ofstream(dir / "dc.paraphrase.txt") << "{{samples}} {{bogus}}\n";
  CHECK_THROWS_AS(TemplateSet::load(dir), ConfigError);  // unknown placeholder
  fs::remove_all(dir);
}
