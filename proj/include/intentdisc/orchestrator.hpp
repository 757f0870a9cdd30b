#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "intentdisc/config.hpp"
#include "intentdisc/gateway.hpp"
#include "intentdisc/report.hpp"

namespace intentdisc {

/// Loads the split named by the config, or samples one from its corpus with the base seed.
ExperimentSplit resolve_split(const ExperimentConfig& config);

/// Builds the record/replay/scripted session named by the config.
Session make_session(const ExperimentConfig& config);

/// Reads an intent -> description file: one "intent<TAB>description" per line.
std::map<std::string, std::string> load_descriptions(const std::string& path);

/// Runs `config.runs` seeded repetitions (run seed = seed + run index) of
/// render, complete, parse, audit, repair and score.
EvalReport run_discovery(const ExperimentConfig& config, const ExperimentSplit& split, Gateway& gateway);
EvalReport run_discovery(const ExperimentConfig& config);

/// Stage 1 induces pseudo intents (unless the ground-truth set is configured), stage 2
/// classifies every GID test query against IND + OOD intents.
EvalReport run_gid(const ExperimentConfig& config, const ExperimentSplit& split, Gateway& gateway);
EvalReport run_gid(const ExperimentConfig& config);

/// Discovery without the cluster count in the prompt; K is the number of parsed clusters.
/// Adds the embedding baseline when an embedding file is configured.
EvalReport run_estimate_k(const ExperimentConfig& config, const ExperimentSplit& split, Gateway& gateway);
EvalReport run_estimate_k(const ExperimentConfig& config);

/// One report per study point.
std::vector<EvalReport> run_study(const ExperimentConfig& config, StudyKind study);
std::vector<EvalReport> run_study(const ExperimentConfig& config, StudyKind study, const Session& session);

}  // namespace intentdisc
