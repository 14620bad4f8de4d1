#pragma once

#include "uiground/encoder.hpp"
#include "uiground/probing.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace uiground {

struct TypeAccuracy {
    double ext_acc = 0.0, abs_acc = 0.0, rel_acc = 0.0, all_acc = 0.0;
    int n_ext = 0, n_abs = 0, n_rel = 0;
};

struct GroundingReportRow {
    std::string model;
    Split split = Split::Test;
    TypeAccuracy acc;
};

struct GroundingReport {
    std::vector<GroundingReportRow> rows;
};

struct PredictionRow {
    std::string command_id;
    Reasoning reasoning = Reasoning::Extractive;
    std::string predicted_id;
    std::string target_id;
    bool correct = false;
};

// Grounds every command of the split with each model; accuracy per reasoning
// type plus the command-weighted micro average. Optionally returns the
// per-command predictions backing the table.
GroundingReport grounding_report(
    const std::vector<std::pair<std::string, const ScorerModel*>>& models, const Corpus& corpus,
    Split split, std::vector<std::vector<PredictionRow>>* predictions = nullptr);

// CSV: model, split, ext_acc, abs_acc, rel_acc, all_acc, n_ext, n_abs, n_rel
void save_grounding_report(const std::filesystem::path& path, const GroundingReport& report);

// CSV: command_id, reasoning, predicted_id, target_id, correct
void save_predictions(const std::filesystem::path& path, const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> load_predictions(const std::filesystem::path& path);

// Recomputes a TypeAccuracy from dumped predictions (self-consistency check).
TypeAccuracy accuracy_from_predictions(const std::vector<PredictionRow>& rows);

struct FilterLogRow {
    std::string command_id;
    Reasoning reasoning = Reasoning::Extractive;
    double top1_prob = 0.0;
    bool removed = false;
};

struct FilterResult {
    std::vector<Command> kept;
    std::vector<FilterLogRow> log;
};

// Removes every command whose target is ranked first by the position-blind
// model with relevance probability above tau. Requires a TextOnly model
// (WrongModelKind otherwise) and tau in (0.5, 1).
FilterResult filter_trivial(const Corpus& corpus, const ScorerModel& position_blind_model,
                            double tau);

// CSV: command_id, reasoning, top1_prob, removed
void save_removal_log(const std::filesystem::path& path, const std::vector<FilterLogRow>& log);

// Writes curves_<model>_<task>.csv and .svg into dir: an accuracy curve and a
// selectivity curve over log10 parameter count. Failed probes stay in the CSV
// flagged, but are not plotted; duplicate param counts keep the first point.
void emit_curves(const std::filesystem::path& dir, const std::string& model_name, AuxTask task,
                 const std::vector<ProbeRun>& runs);

} // namespace uiground
