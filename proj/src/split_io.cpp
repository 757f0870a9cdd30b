#include <fstream>

#include "intentdisc/corpus.hpp"
#include "intentdisc/errors.hpp"
#include "intentdisc/hash.hpp"
#include "intentdisc/serialize.hpp"
#include "intentdisc/text.hpp"

namespace intentdisc {

using nlohmann::json;

void to_json(json& j, const Utterance& u) { j = json{{"id", u.id}, {"text", u.text}, {"label", u.label}}; }

void from_json(const json& j, Utterance& u) {
  u.id = j.at("id").get<std::int64_t>();
  u.text = j.at("text").get<std::string>();
  u.label = j.at("label").get<std::string>();
}

void to_json(json& j, const FixedLabels& f) { j = json{{"ind", f.ind}, {"ood", f.ood}}; }

void from_json(const json& j, FixedLabels& f) {
  f.ind = j.at("ind").get<std::vector<std::string>>();
  f.ood = j.at("ood").get<std::vector<std::string>>();
}

void to_json(json& j, const SplitConfig& c) {
  j = json{{"n_ind", c.n_ind},
           {"m_ood", c.m_ood},
           {"discovery_per_class", c.discovery_per_class},
           {"gid_per_class", c.gid_per_class},
           {"demos_per_class", c.demos_per_class},
           {"ood_demos_per_class", c.ood_demos_per_class}};
  if (c.fixed_labels) j["fixed_labels"] = *c.fixed_labels;
}

void from_json(const json& j, SplitConfig& c) {
  auto read = [&](const char* key, int& field) {
    if (j.contains(key)) field = j.at(key).get<int>();
  };
  read("n_ind", c.n_ind);
  read("m_ood", c.m_ood);
  read("discovery_per_class", c.discovery_per_class);
  read("gid_per_class", c.gid_per_class);
  read("demos_per_class", c.demos_per_class);
  read("ood_demos_per_class", c.ood_demos_per_class);
  if (j.contains("fixed_labels") && j.at("fixed_labels").is_object()) {
    c.fixed_labels = j.at("fixed_labels").get<FixedLabels>();
  }
}

namespace {

json split_payload(const ExperimentSplit& s) {
  return json{{"schema_version", kSplitSchemaVersion},
              {"corpus", s.corpus_name},
              {"seed", s.seed},
              {"ratio_tag", std::string(to_string(s.ratio_tag))},
              {"config", s.config},
              {"ind_labels", s.ind_labels},
              {"ood_labels", s.ood_labels},
              {"discovery_pool", s.discovery_pool},
              {"gid_test_pool", s.gid_test_pool},
              {"demo_pool", s.demo_pool},
              {"ood_demo_pool", s.ood_demo_pool}};
}

}  // namespace

std::string serialize_split(const ExperimentSplit& split) {
  json doc = split_payload(split);
  doc["checksum"] = sha256_hex(doc.dump());
  return doc.dump(2) + "\n";
}

ExperimentSplit deserialize_split(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("split file is not valid JSON: ") + e.what());
  }
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kSplitSchemaVersion) {
      throw DataError("split schema_version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kSplitSchemaVersion) + ")");
    }
    const std::string stored = doc.at("checksum").get<std::string>();
    json payload = doc;
    payload.erase("checksum");
    if (sha256_hex(payload.dump()) != stored) throw DataError("split checksum mismatch");

    ExperimentSplit s;
    s.corpus_name = doc.at("corpus").get<std::string>();
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.ratio_tag = ratio_tag_from_string(doc.at("ratio_tag").get<std::string>());
    s.config = doc.at("config").get<SplitConfig>();
    s.ind_labels = doc.at("ind_labels").get<std::vector<std::string>>();
    s.ood_labels = doc.at("ood_labels").get<std::vector<std::string>>();
    s.discovery_pool = doc.at("discovery_pool").get<std::vector<Utterance>>();
    s.gid_test_pool = doc.at("gid_test_pool").get<std::vector<Utterance>>();
    s.demo_pool = doc.at("demo_pool").get<std::map<std::string, std::vector<Utterance>>>();
    s.ood_demo_pool = doc.at("ood_demo_pool").get<std::map<std::string, std::vector<Utterance>>>();
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed split file: ") + e.what());
  }
}

void write_split(const ExperimentSplit& split, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write split file " + path.string());
  out << serialize_split(split);
  if (!out) throw ConfigError("failed writing split file " + path.string());
}

ExperimentSplit read_split(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open split file " + path.string());
  return deserialize_split(read_file(path.string()));
}

}  // namespace intentdisc
