#include "intentdisc/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "intentdisc/errors.hpp"
#include "intentdisc/text.hpp"

namespace intentdisc {

using nlohmann::json;

namespace {

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_get(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

template <class T, class F>
std::optional<double> mean_of(const std::vector<RunRecord>& runs, F&& field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : runs) {
    if (const std::optional<T> v = field(r)) {
      sum += static_cast<double>(*v);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<ClusteringScores> mean_clustering(const std::vector<RunRecord>& runs) {
  ClusteringScores m;
  for (const auto& r : runs) {
    if (!r.clustering) return std::nullopt;
    m.acc += r.clustering->acc;
    m.nmi += r.clustering->nmi;
    m.ari += r.clustering->ari;
  }
  const auto n = static_cast<double>(runs.size());
  m.acc /= n;
  m.nmi /= n;
  m.ari /= n;
  return m;
}

std::optional<GroupScores> mean_group(const std::vector<RunRecord>& runs) {
  GroupScores m;
  for (const auto& r : runs) {
    if (!r.group) return std::nullopt;
    for (auto [dst, src] : {std::pair{&m.ind, &r.group->ind}, std::pair{&m.ood, &r.group->ood},
                            std::pair{&m.all, &r.group->all}}) {
      dst->macro_f1 += src->macro_f1;
      dst->accuracy += src->accuracy;
    }
  }
  const auto n = static_cast<double>(runs.size());
  for (auto [dst, src] : {std::pair{&m.ind, &runs.front().group->ind}, std::pair{&m.ood, &runs.front().group->ood},
                          std::pair{&m.all, &runs.front().group->all}}) {
    dst->macro_f1 /= n;
    dst->accuracy /= n;
    dst->support = src->support;
  }
  return m;
}

void compute(const std::vector<RunRecord>& runs, MeanScores& mean, RecallSummary& recall, ProvenanceCounts& prov) {
  mean = MeanScores{};
  recall = RecallSummary{};
  prov = ProvenanceCounts{};
  if (runs.empty()) return;
  mean.clustering = mean_clustering(runs);
  mean.group = mean_group(runs);
  mean.k_pred = mean_of<int>(runs, [](const RunRecord& r) { return r.k_pred; });
  mean.k_error = mean_of<int>(runs, [](const RunRecord& r) { return r.k_error; });
  mean.baseline_k_pred = mean_of<int>(runs, [](const RunRecord& r) {
    return r.baseline_k ? std::optional<int>(r.baseline_k->k_pred) : std::nullopt;
  });
  mean.baseline_k_error = mean_of<int>(runs, [](const RunRecord& r) {
    return r.baseline_k ? r.baseline_k->k_error : std::nullopt;
  });

  long long missing = 0, repeated = 0, total = 0;
  for (const auto& r : runs) {
    recall.run_mean_missing_rate += r.recall.missing_rate;
    recall.run_mean_repeated_rate += r.recall.repeated_rate;
    missing += static_cast<long long>(r.recall.missing_ids.size());
    repeated += static_cast<long long>(r.recall.repeated_ids.size());
    total += r.recall.n_total;
    prov.live += r.provenance.live;
    prov.replay += r.provenance.replay;
    prov.scripted += r.provenance.scripted;
  }
  const auto n = static_cast<double>(runs.size());
  recall.run_mean_missing_rate /= n;
  recall.run_mean_repeated_rate /= n;
  if (total > 0) {
    recall.pooled_missing_rate = static_cast<double>(missing) / static_cast<double>(total);
    recall.pooled_repeated_rate = static_cast<double>(repeated) / static_cast<double>(total);
  }
  mean.missing_rate = recall.run_mean_missing_rate;
  mean.repeated_rate = recall.run_mean_repeated_rate;
}

bool same(const std::optional<double>& a, const std::optional<double>& b) { return a == b; }

bool same(const GroupCell& a, const GroupCell& b) {
  return a.macro_f1 == b.macro_f1 && a.accuracy == b.accuracy;
}

}  // namespace

void finalize(EvalReport& report) { compute(report.runs, report.mean, report.recall_summary, report.provenance); }

void check_means(const EvalReport& report) {
  MeanScores mean;
  RecallSummary recall;
  ProvenanceCounts prov;
  compute(report.runs, mean, recall, prov);
  const MeanScores& m = report.mean;
  bool ok = mean.clustering.has_value() == m.clustering.has_value() && mean.group.has_value() == m.group.has_value();
  if (ok && mean.clustering) {
    ok = mean.clustering->acc == m.clustering->acc && mean.clustering->nmi == m.clustering->nmi &&
         mean.clustering->ari == m.clustering->ari;
  }
  if (ok && mean.group) {
    ok = same(mean.group->ind, m.group->ind) && same(mean.group->ood, m.group->ood) &&
         same(mean.group->all, m.group->all);
  }
  ok = ok && same(mean.k_pred, m.k_pred) && same(mean.k_error, m.k_error) &&
       same(mean.baseline_k_pred, m.baseline_k_pred) && same(mean.baseline_k_error, m.baseline_k_error) &&
       mean.missing_rate == m.missing_rate && mean.repeated_rate == m.repeated_rate &&
       recall.pooled_missing_rate == report.recall_summary.pooled_missing_rate &&
       recall.pooled_repeated_rate == report.recall_summary.pooled_repeated_rate && prov == report.provenance;
  if (!ok) throw std::logic_error("report \"" + report.tag + "\": stored means disagree with the per-run values");
}

// ---- json ----

void to_json(json& j, const ClusteringScores& s) { j = json{{"acc", s.acc}, {"nmi", s.nmi}, {"ari", s.ari}}; }
void from_json(const json& j, ClusteringScores& s) {
  j.at("acc").get_to(s.acc);
  j.at("nmi").get_to(s.nmi);
  j.at("ari").get_to(s.ari);
}

void to_json(json& j, const GroupCell& c) {
  j = json{{"f1", c.macro_f1}, {"acc", c.accuracy}, {"support", c.support}};
}
void from_json(const json& j, GroupCell& c) {
  j.at("f1").get_to(c.macro_f1);
  j.at("acc").get_to(c.accuracy);
  j.at("support").get_to(c.support);
}

void to_json(json& j, const GroupScores& g) { j = json{{"ind", g.ind}, {"ood", g.ood}, {"all", g.all}}; }
void from_json(const json& j, GroupScores& g) {
  j.at("ind").get_to(g.ind);
  j.at("ood").get_to(g.ood);
  j.at("all").get_to(g.all);
}

void to_json(json& j, const RecallReport& r) {
  j = json{{"n_total", r.n_total},
           {"missing_ids", r.missing_ids},
           {"repeated_ids", r.repeated_ids},
           {"missing_rate", r.missing_rate},
           {"repeated_rate", r.repeated_rate}};
}
void from_json(const json& j, RecallReport& r) {
  j.at("n_total").get_to(r.n_total);
  j.at("missing_ids").get_to(r.missing_ids);
  j.at("repeated_ids").get_to(r.repeated_ids);
  j.at("missing_rate").get_to(r.missing_rate);
  j.at("repeated_rate").get_to(r.repeated_rate);
}

void to_json(json& j, const BaselineK& b) {
  j = json{{"k_prime", b.k_prime}, {"k_pred", b.k_pred}, {"k_error", opt_json(b.k_error)},
           {"cluster_sizes", b.cluster_sizes}};
}
void from_json(const json& j, BaselineK& b) {
  j.at("k_prime").get_to(b.k_prime);
  j.at("k_pred").get_to(b.k_pred);
  b.k_error = opt_get<int>(j, "k_error");
  j.at("cluster_sizes").get_to(b.cluster_sizes);
}

void to_json(json& j, const ProvenanceCounts& p) {
  j = json{{"live", p.live}, {"replay", p.replay}, {"scripted", p.scripted}};
}
void from_json(const json& j, ProvenanceCounts& p) {
  j.at("live").get_to(p.live);
  j.at("replay").get_to(p.replay);
  j.at("scripted").get_to(p.scripted);
}

void to_json(json& j, const RunRecord& r) {
  j = json{{"run", r.run},
           {"seed", r.seed},
           {"clustering", opt_json(r.clustering)},
           {"group", opt_json(r.group)},
           {"recall", r.recall},
           {"stage1_recall", opt_json(r.stage1_recall)},
           {"k_true", opt_json(r.k_true)},
           {"k_pred", opt_json(r.k_pred)},
           {"k_error", opt_json(r.k_error)},
           {"baseline_k", opt_json(r.baseline_k)},
           {"pseudo_intents", r.pseudo_intents},
           {"description_shortfall", r.description_shortfall},
           {"alignment", r.alignment},
           {"foreign_positions", r.foreign_positions},
           {"position_ids", r.position_ids},
           {"assignment", r.assignment},
           {"provenance", r.provenance}};
}
void from_json(const json& j, RunRecord& r) {
  j.at("run").get_to(r.run);
  j.at("seed").get_to(r.seed);
  r.clustering = opt_get<ClusteringScores>(j, "clustering");
  r.group = opt_get<GroupScores>(j, "group");
  j.at("recall").get_to(r.recall);
  r.stage1_recall = opt_get<RecallReport>(j, "stage1_recall");
  r.k_true = opt_get<int>(j, "k_true");
  r.k_pred = opt_get<int>(j, "k_pred");
  r.k_error = opt_get<int>(j, "k_error");
  r.baseline_k = opt_get<BaselineK>(j, "baseline_k");
  j.at("pseudo_intents").get_to(r.pseudo_intents);
  j.at("description_shortfall").get_to(r.description_shortfall);
  j.at("alignment").get_to(r.alignment);
  j.at("foreign_positions").get_to(r.foreign_positions);
  j.at("position_ids").get_to(r.position_ids);
  j.at("assignment").get_to(r.assignment);
  j.at("provenance").get_to(r.provenance);
}

void to_json(json& j, const MeanScores& m) {
  j = json{{"clustering", opt_json(m.clustering)},
           {"group", opt_json(m.group)},
           {"k_pred", opt_json(m.k_pred)},
           {"k_error", opt_json(m.k_error)},
           {"baseline_k_pred", opt_json(m.baseline_k_pred)},
           {"baseline_k_error", opt_json(m.baseline_k_error)},
           {"missing_rate", m.missing_rate},
           {"repeated_rate", m.repeated_rate}};
}
void from_json(const json& j, MeanScores& m) {
  m.clustering = opt_get<ClusteringScores>(j, "clustering");
  m.group = opt_get<GroupScores>(j, "group");
  m.k_pred = opt_get<double>(j, "k_pred");
  m.k_error = opt_get<double>(j, "k_error");
  m.baseline_k_pred = opt_get<double>(j, "baseline_k_pred");
  m.baseline_k_error = opt_get<double>(j, "baseline_k_error");
  j.at("missing_rate").get_to(m.missing_rate);
  j.at("repeated_rate").get_to(m.repeated_rate);
}

void to_json(json& j, const RecallSummary& s) {
  j = json{{"run_mean_missing_rate", s.run_mean_missing_rate},
           {"run_mean_repeated_rate", s.run_mean_repeated_rate},
           {"pooled_missing_rate", s.pooled_missing_rate},
           {"pooled_repeated_rate", s.pooled_repeated_rate}};
}
void from_json(const json& j, RecallSummary& s) {
  j.at("run_mean_missing_rate").get_to(s.run_mean_missing_rate);
  j.at("run_mean_repeated_rate").get_to(s.run_mean_repeated_rate);
  j.at("pooled_missing_rate").get_to(s.pooled_missing_rate);
  j.at("pooled_repeated_rate").get_to(s.pooled_repeated_rate);
}

void to_json(json& j, const EvalReport& r) {
  j = json{{"task", r.task},     {"tag", r.tag},   {"method", r.method}, {"variant", r.variant},
           {"config", r.config}, {"runs", r.runs}, {"mean", r.mean},     {"recall_summary", r.recall_summary},
           {"provenance", r.provenance}};
}
void from_json(const json& j, EvalReport& r) {
  j.at("task").get_to(r.task);
  j.at("tag").get_to(r.tag);
  j.at("method").get_to(r.method);
  j.at("variant").get_to(r.variant);
  r.config = j.at("config");
  j.at("runs").get_to(r.runs);
  j.at("mean").get_to(r.mean);
  j.at("recall_summary").get_to(r.recall_summary);
  j.at("provenance").get_to(r.provenance);
}

ReportFormat report_format_from_string(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  throw ConfigError("unknown report format \"" + std::string(s) + "\" (expected json, csv or markdown)");
}

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pct(double v) { return fixed(100.0 * v, 2); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void csv_metrics(std::ostringstream& os, const EvalReport& r, const std::string& run, const RunRecord* rec,
                 const MeanScores* mean) {
  auto row = [&](const std::string& metric, double v) {
    os << csv_field(r.task) << ',' << csv_field(r.tag) << ',' << csv_field(r.method) << ',' << csv_field(r.variant)
       << ',' << run << ',' << metric << ',' << fixed(v, 4) << '\n';
  };
  const auto& clustering = rec ? rec->clustering : mean->clustering;
  const auto& group = rec ? rec->group : mean->group;
  if (clustering) {
    row("acc", clustering->acc);
    row("nmi", clustering->nmi);
    row("ari", clustering->ari);
  }
  if (group) {
    for (auto [name, cell] : {std::pair{"ind", &group->ind}, std::pair{"ood", &group->ood},
                              std::pair{"all", &group->all}}) {
      row(std::string(name) + "_f1", cell->macro_f1);
      row(std::string(name) + "_acc", cell->accuracy);
    }
  }
  if (rec) {
    if (rec->k_true) row("k_true", *rec->k_true);
    if (rec->k_pred) row("k_pred", *rec->k_pred);
    if (rec->k_error) row("k_error", *rec->k_error);
    if (rec->baseline_k) {
      row("baseline_k_pred", rec->baseline_k->k_pred);
      if (rec->baseline_k->k_error) row("baseline_k_error", *rec->baseline_k->k_error);
    }
    row("missing_rate", rec->recall.missing_rate);
    row("repeated_rate", rec->recall.repeated_rate);
  } else {
    if (mean->k_pred) row("k_pred", *mean->k_pred);
    if (mean->k_error) row("k_error", *mean->k_error);
    if (mean->baseline_k_pred) row("baseline_k_pred", *mean->baseline_k_pred);
    if (mean->baseline_k_error) row("baseline_k_error", *mean->baseline_k_error);
    row("missing_rate", mean->missing_rate);
    row("repeated_rate", mean->repeated_rate);
  }
}

std::string render_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "task,tag,method,variant,run,metric,value\n";
  for (const auto& r : reports) {
    for (const auto& rec : r.runs) csv_metrics(os, r, std::to_string(rec.run), &rec, nullptr);
    csv_metrics(os, r, "mean", nullptr, &r.mean);
  }
  return os.str();
}

std::string setting_of(const EvalReport& r) { return r.tag.empty() ? "-" : r.tag; }

std::string label_of(const EvalReport& r) {
  std::string s = r.method;
  if (!r.variant.empty() && r.variant != "original") s += " (" + r.variant + ")";
  return s;
}

std::string render_markdown(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  bool first = true;
  auto section = [&](const std::string& title) {
    if (!first) os << '\n';
    first = false;
    os << "## " << title << "\n\n";
  };

  std::vector<const EvalReport*> clustering, group, kest;
  for (const auto& r : reports) {
    if (r.task == "estimate_k") kest.push_back(&r);
    if (r.mean.clustering && r.task != "estimate_k") clustering.push_back(&r);
    if (r.mean.group) group.push_back(&r);
  }
  if (!clustering.empty()) {
    section("OOD discovery");
    os << "| Method | Setting | ACC | NMI | ARI |\n|---|---|---|---|---|\n";
    for (const auto* r : clustering) {
      os << "| " << label_of(*r) << " | " << setting_of(*r) << " | " << pct(r->mean.clustering->acc) << " | "
         << pct(r->mean.clustering->nmi) << " | " << pct(r->mean.clustering->ari) << " |\n";
    }
  }
  if (!group.empty()) {
    section("Generalized intent discovery");
    os << "| Method | Setting | IND F1 | IND ACC | OOD F1 | OOD ACC | ALL F1 | ALL ACC |\n"
       << "|---|---|---|---|---|---|---|---|\n";
    for (const auto* r : group) {
      const GroupScores& g = *r->mean.group;
      os << "| " << label_of(*r) << " | " << setting_of(*r) << " | " << pct(g.ind.macro_f1) << " | " << pct(g.ind.accuracy)
         << " | " << pct(g.ood.macro_f1) << " | " << pct(g.ood.accuracy) << " | " << pct(g.all.macro_f1) << " | "
         << pct(g.all.accuracy) << " |\n";
    }
  }
  if (!kest.empty()) {
    section("Cluster number estimation");
    os << "| Method | Setting | K true | K pred | K error | Baseline K pred | Baseline K error |\n"
       << "|---|---|---|---|---|---|---|\n";
    for (const auto* r : kest) {
      auto num = [](const std::optional<double>& v) { return v ? fixed(*v, 2) : std::string("-"); };
      const std::string k_true =
          !r->runs.empty() && r->runs.front().k_true ? std::to_string(*r->runs.front().k_true) : std::string("-");
      os << "| " << label_of(*r) << " | " << setting_of(*r) << " | " << k_true << " | " << num(r->mean.k_pred) << " | "
         << num(r->mean.k_error) << " | " << num(r->mean.baseline_k_pred) << " | " << num(r->mean.baseline_k_error)
         << " |\n";
    }
  }
  section("Recall");
  os << "| Method | Setting | Task | Missing (run mean) | Repeated (run mean) | Missing (pooled) | Repeated (pooled) |\n"
     << "|---|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    const RecallSummary& s = r.recall_summary;
    os << "| " << label_of(r) << " | " << setting_of(r) << " | " << r.task << " | " << pct(s.run_mean_missing_rate) << " | "
       << pct(s.run_mean_repeated_rate) << " | " << pct(s.pooled_missing_rate) << " | "
       << pct(s.pooled_repeated_rate) << " |\n";
  }
  return os.str();
}

}  // namespace

std::string render_report(const std::vector<EvalReport>& reports, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return json(reports).dump(2) + "\n";
    case ReportFormat::csv: return render_csv(reports);
    case ReportFormat::markdown: return render_markdown(reports);
  }
  return {};
}

void emit_report(const std::vector<EvalReport>& reports, ReportFormat format, const std::filesystem::path& path) {
  if (reports.empty()) throw ConfigError("no reports to emit");
  for (const auto& r : reports) check_means(r);
  const std::string text = render_report(reports, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write report to " + path.string());
  out << text;
  if (!out.flush()) throw ConfigError("failed writing report to " + path.string());
}

std::vector<EvalReport> parse_reports(std::string_view json_text) {
  try {
    const json doc = json::parse(json_text);
    if (doc.is_array()) return doc.get<std::vector<EvalReport>>();
    return {doc.get<EvalReport>()};
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report json: ") + e.what());
  }
}

std::vector<EvalReport> read_reports(const std::filesystem::path& path) { return parse_reports(read_file(path.string())); }

}  // namespace intentdisc
