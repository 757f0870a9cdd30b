#include "intentdisc/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "intentdisc/errors.hpp"
#include "intentdisc/text.hpp"

namespace intentdisc {

using nlohmann::json;

std::string_view to_string(Partition p) noexcept {
  switch (p) {
    case Partition::train: return "train";
    case Partition::validation: return "validation";
    case Partition::test: return "test";
  }
  return "test";
}

Partition partition_from_string(std::string_view s) {
  if (s == "train") return Partition::train;
  if (s == "validation") return Partition::validation;
  if (s == "test") return Partition::test;
  throw DataError("unknown partition \"" + std::string(s) + "\" (expected train, validation or test)");
}

CorpusFormat corpus_format_from_string(std::string_view s) {
  if (s == "jsonl") return CorpusFormat::jsonl;
  if (s == "tsv") return CorpusFormat::tsv;
  throw ConfigError("unknown corpus format \"" + std::string(s) + "\" (expected jsonl or tsv)");
}

std::vector<std::size_t> Corpus::indices_of(std::string_view label, Partition p) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    if (partitions[i] == p && utterances[i].label == label) out.push_back(i);
  }
  return out;
}

std::size_t Corpus::count(Partition p) const {
  return static_cast<std::size_t>(std::count(partitions.begin(), partitions.end(), p));
}

namespace {

struct Record {
  std::string text;
  std::string label;
  Partition partition;
  std::optional<std::int64_t> id;
};

[[noreturn]] void fail_line(const std::string& name, std::size_t line, const std::string& what) {
  throw DataError(name + ":" + std::to_string(line) + ": " + what);
}

Record parse_jsonl_record(const std::string& line, const std::string& name, std::size_t lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    fail_line(name, lineno, std::string("malformed JSON record: ") + e.what());
  }
  if (!j.is_object()) fail_line(name, lineno, "record is not a JSON object");
  Record r;
  for (const char* field : {"text", "label", "partition"}) {
    if (!j.contains(field)) fail_line(name, lineno, std::string("record missing \"") + field + "\" field");
    if (!j[field].is_string()) fail_line(name, lineno, std::string("field \"") + field + "\" is not a string");
  }
  r.text = j["text"].get<std::string>();
  r.label = j["label"].get<std::string>();
  try {
    r.partition = partition_from_string(j["partition"].get<std::string>());
  } catch (const DataError& e) {
    fail_line(name, lineno, e.what());
  }
  if (j.contains("id")) {
    if (!j["id"].is_number_integer()) fail_line(name, lineno, "field \"id\" is not an integer");
    r.id = j["id"].get<std::int64_t>();
  }
  return r;
}

Record parse_tsv_record(const std::string& line, const std::string& name, std::size_t lineno) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (cols.size() < 3 || cols.size() > 4) {
    fail_line(name, lineno, "expected 3 or 4 tab-separated columns, got " + std::to_string(cols.size()));
  }
  Record r;
  r.text = cols[0];
  r.label = cols[1];
  try {
    r.partition = partition_from_string(trim(cols[2]));
  } catch (const DataError& e) {
    fail_line(name, lineno, e.what());
  }
  if (cols.size() == 4) {
    try {
      std::size_t used = 0;
      const std::string id = trim(cols[3]);
      r.id = std::stoll(id, &used);
      if (used != id.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      fail_line(name, lineno, "id column is not an integer");
    }
  }
  return r;
}

}  // namespace

Corpus parse_corpus(std::istream& in, CorpusFormat format, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  std::unordered_set<std::int64_t> seen_ids;
  std::unordered_set<std::string> seen_labels;
  std::string line;
  std::size_t lineno = 0;
  std::size_t ordinal = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (format == CorpusFormat::tsv && ordinal == 0 && line.rfind("text\tlabel\tpartition", 0) == 0) continue;
    Record r = format == CorpusFormat::jsonl ? parse_jsonl_record(line, corpus.name, lineno)
                                             : parse_tsv_record(line, corpus.name, lineno);
    ++ordinal;
    if (trim(r.text).empty()) fail_line(corpus.name, lineno, "empty text");
    if (trim(r.label).empty()) fail_line(corpus.name, lineno, "empty label");
    const std::int64_t id = r.id.value_or(static_cast<std::int64_t>(ordinal));
    if (id <= 0) fail_line(corpus.name, lineno, "id must be positive");
    if (!seen_ids.insert(id).second) fail_line(corpus.name, lineno, "duplicate id " + std::to_string(id));
    if (seen_labels.insert(r.label).second) corpus.label_set.push_back(r.label);
    corpus.utterances.push_back(Utterance{id, std::move(r.text), std::move(r.label)});
    corpus.partitions.push_back(r.partition);
  }
  if (corpus.utterances.empty()) throw DataError(corpus.name + ": corpus file is empty");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return parse_corpus(in, format, path.filename().string());
}

}  // namespace intentdisc
