#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "runner.hpp"

namespace sculptor {

/// Full results (configs, weights, trajectories, aggregates) as JSON text.
/// Wall-clock times are excluded so output is reproducible.
std::string results_to_json(std::span<const ExperimentResult> results);
std::vector<ExperimentResult> results_from_json(const std::string& text);

std::string timing_to_json(std::span<const ExperimentResult> results);

/// CSV: trial,knot_index,abundance,weight,success
void write_weights_csv(std::ostream& os, const ExperimentResult& res, const StatisticRun& run);

/// CSV: trial,knot_index,detector,statistic_value
void write_deltas_csv(std::ostream& os, const ExperimentResult& res, const StatisticRun& run);

struct WeightRow {
  int trial = 0;
  int knot_index = 0;
  double abundance = 0.0;
  double weight = 0.0;
  bool success = false;
};
std::vector<WeightRow> read_weights_csv(std::istream& is);

/// Per-trial weights (solid lines for successful trials, dashed otherwise);
/// one <polyline> per trial. Empty string when there are no trials.
std::string weights_svg(const ExperimentResult& res, const StatisticRun& run);
/// Mean weight per knot with standard-error bars.
std::string mean_weights_svg(const ExperimentResult& res, const StatisticRun& run);
/// Mean statistic of each detector minus the clairvoyant, and Bayes - RGLRT.
std::string differences_svg(const ExperimentResult& res, const StatisticRun& run);

/// Base name shared by the files of one (K, statistic) run.
std::string run_stem(const ExperimentResult& res, const StatisticRun& run);

/// Writes summary.json, timing.json, and per run weights_*.csv,
/// deltas_*.csv plus SVG plots into `outdir` (created if missing).
void emit_reports(std::span<const ExperimentResult> results, const std::string& outdir);

/// Re-renders SVG plots from a summary.json written by emit_reports().
void render_report(const std::string& summary_path, const std::string& outdir);

/// Plain-text table of aggregates.
std::string summary_table(std::span<const ExperimentResult> results);

}  // namespace sculptor
