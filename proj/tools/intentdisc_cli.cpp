#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "intentdisc/config.hpp"
#include "intentdisc/corpus.hpp"
#include "intentdisc/errors.hpp"
#include "intentdisc/orchestrator.hpp"
#include "intentdisc/report.hpp"

using namespace intentdisc;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<std::string> replay;
  std::optional<std::string> record;
  std::optional<std::string> scripted;
  std::optional<std::string> method;
  std::optional<std::string> variant;
  std::string format = "json";
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool session_flags = true) {
  cmd->add_option("-c,--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "base seed");
  if (!session_flags) return;
  cmd->add_option("--runs", f.runs, "number of seeded runs");
  auto* replay = cmd->add_option("--replay", f.replay, "serve every call from this exchange store");
  auto* record = cmd->add_option("--record", f.record, "call the provider live and append to this store");
  auto* scripted = cmd->add_option("--scripted", f.scripted, "answer from a scripted fixture");
  replay->excludes(record)->excludes(scripted);
  record->excludes(scripted);
  cmd->add_option("--method", f.method, "DC, ZSD, FSD or GID-DC, GID-ZSD, GID-FSD");
  cmd->add_option("--variant", f.variant, "original, paraphrase, verbosity or simplification");
  cmd->add_option("--format", f.format, "json, csv or markdown")->check(CLI::IsMember({"json", "csv", "markdown", "md"}));
  cmd->add_option("-o,--out", f.out, "output file (default: stdout)");
}

ExperimentConfig load_with_overrides(const CommonFlags& f) {
  ExperimentConfig c = load_experiment_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.runs) c.runs = *f.runs;
  if (f.replay) {
    c.session_mode = SessionMode::replay;
    c.store_path = *f.replay;
  }
  if (f.record) {
    c.session_mode = SessionMode::live_record;
    c.store_path = *f.record;
  }
  if (f.scripted) {
    c.session_mode = SessionMode::scripted;
    c.fixture_path = *f.scripted;
  }
  if (f.method) std::tie(c.method, c.gid) = parse_method_name(*f.method);
  if (f.variant) c.variant = prompt_variant_from_string(*f.variant);
  c.validate();
  return c;
}

void write_output(const std::vector<EvalReport>& reports, const CommonFlags& f) {
  const ReportFormat format = report_format_from_string(f.format);
  if (f.out.empty()) {
    for (const auto& r : reports) check_means(r);
    std::cout << render_report(reports, format);
  } else {
    emit_report(reports, format, f.out);
  }
}

void print_recall_notes(const std::vector<EvalReport>& reports) {
  for (const auto& r : reports) {
    for (const auto& run : r.runs) {
      if (!run.recall.missing_ids.empty() || !run.recall.repeated_ids.empty()) {
        std::fprintf(stderr, "note: %s run %d: %zu missing, %zu repeated (repaired)\n", r.tag.empty() ? r.method.c_str() : r.tag.c_str(),
                     run.run, run.recall.missing_ids.size(), run.recall.repeated_ids.size());
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline LLM intent discovery and GID experiment harness"};
  app.require_subcommand(1);

  CommonFlags split_f, disc_f, gid_f, study_f, est_f;
  std::string split_out;
  auto* split_cmd = app.add_subcommand("split", "sample IND/OOD labels and query pools, write a split file");
  add_common(split_cmd, split_f, false);
  split_cmd->add_option("-o,--out", split_out, "split file to write")->required();

  auto* disc_cmd = app.add_subcommand("discover", "OOD intent discovery (clustering)");
  add_common(disc_cmd, disc_f);
  auto* gid_cmd = app.add_subcommand("gid", "generalized intent discovery (two stages)");
  add_common(gid_cmd, gid_f);
  auto* est_cmd = app.add_subcommand("estimate-k", "cluster-count estimation");
  add_common(est_cmd, est_f);

  std::string study_kind;
  auto* study_cmd = app.add_subcommand("study", "run one study fan-out");
  add_common(study_cmd, study_f);
  study_cmd->add_option("--kind", study_kind,
                        "sample_sweep, demo_strategy, intent_set_ablation, prompt_variants, estimate_k or provider_matrix")
      ->required();

  std::string report_in, report_format = "markdown", report_out;
  auto* report_cmd = app.add_subcommand("report", "re-render saved JSON reports");
  report_cmd->add_option("-i,--in", report_in, "JSON report file")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--format", report_format, "json, csv or markdown")
      ->check(CLI::IsMember({"json", "csv", "markdown", "md"}));
  report_cmd->add_option("-o,--out", report_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*split_cmd) {
      ExperimentConfig c = load_experiment_config(split_f.config);
      if (split_f.seed) c.seed = *split_f.seed;
      if (!c.corpus_path) throw ConfigError("split needs a corpus in the config");
      const Corpus corpus = load_corpus(*c.corpus_path, c.corpus_format);
      const ExperimentSplit split = make_split(corpus, c.split, c.seed);
      write_split(split, split_out);
      std::fprintf(stderr, "wrote %s: %zu IND, %zu OOD labels, %zu discovery and %zu GID test queries\n",
                   split_out.c_str(), split.ind_labels.size(), split.ood_labels.size(), split.discovery_pool.size(),
                   split.gid_test_pool.size());
    } else if (*disc_cmd) {
      const std::vector<EvalReport> r{run_discovery(load_with_overrides(disc_f))};
      print_recall_notes(r);
      write_output(r, disc_f);
    } else if (*gid_cmd) {
      ExperimentConfig c = load_with_overrides(gid_f);
      c.gid = true;
      const std::vector<EvalReport> r{run_gid(c)};
      print_recall_notes(r);
      write_output(r, gid_f);
    } else if (*est_cmd) {
      const std::vector<EvalReport> r{run_estimate_k(load_with_overrides(est_f))};
      write_output(r, est_f);
    } else if (*study_cmd) {
      const std::vector<EvalReport> r = run_study(load_with_overrides(study_f), study_kind_from_string(study_kind));
      print_recall_notes(r);
      write_output(r, study_f);
    } else if (*report_cmd) {
      const std::vector<EvalReport> r = read_reports(report_in);
      const ReportFormat format = report_format_from_string(report_format);
      if (report_out.empty()) {
        for (const auto& x : r) check_means(x);
        std::cout << render_report(r, format);
      } else {
        emit_report(r, format, report_out);
      }
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 4;
  } catch (const ProviderError& e) {
    std::fprintf(stderr, "provider error: %s\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
