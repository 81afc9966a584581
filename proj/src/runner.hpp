#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "sculpt.hpp"

namespace sculptor {

using ProgressFn = std::function<void(const std::string&)>;

inline const std::vector<std::string>& detector_names() {
  static const std::vector<std::string> names{"clairvoyant", "glrt", "rglrt", "bayes"};
  return names;
}

/// Per-knot statistic values of each detector on that knot's population.
/// `glrt` is empty when the continuous GLRT was not evaluated.
struct DetectorComparison {
  std::vector<double> clairvoyant;
  std::vector<double> glrt;
  std::vector<double> rglrt;
  std::vector<double> bayes;

  const std::vector<double>& operator[](const std::string& name) const;
};

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  SculptResult sculpt;
  DetectorComparison detectors;
  double wall_seconds = 0.0;
  std::string error;  // non-empty when the trial failed

  bool ok() const { return error.empty(); }
};

struct AggregateResult {
  int trials_ok = 0;
  int trials_failed = 0;
  std::vector<double> mean_weights;
  std::vector<double> se_weights;
  double success_fraction = 0.0;
  std::vector<double> mean_delta;  // Bayes - RGLRT
  std::vector<double> se_delta;
  std::map<std::string, std::vector<double>> mean_stat;
  std::map<std::string, std::vector<double>> se_stat;
};

struct StatisticRun {
  RocStatistic stat = RocStatistic::one_minus_auc();
  std::vector<TrialResult> trials;
  AggregateResult aggregate;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string mode;  // "sculpt" or "compare"
  int K = 1;
  std::vector<double> knots;
  double sigma_t = 0.0;
  bool sigma_calibrated = false;
  std::vector<StatisticRun> runs;
};

struct CalibrationReport {
  double sigma_t = 0.0;
  double detection_rate = 0.0;
  double abundance = 0.0;
  std::vector<std::pair<double, double>> probes;  // (sigma_t, DR)
};

/// Bisects sigma_t in [0.5, 50] until the clairvoyant DR at FAR=calib_far
/// for the middle knot of the first K falls inside [calib_low, calib_high].
/// Throws Calibration when the bracket does not straddle the band.
double calibrate(const ExperimentConfig& config, CalibrationReport* report = nullptr);

/// Clairvoyant DR@FAR for abundance a on a fresh probe sample.
double clairvoyant_detection_rate(const ExperimentConfig& config, double sigma_t, double a, double far,
                                  std::size_t n, std::uint64_t seed);

/// Evaluates all four detectors per knot for prior `w`.
/// `glrt_scores` holds background then per-knot GLRT scores, or is empty.
DetectorComparison compare_detectors_on(const PairScores& scores, const RocStatistic& stat,
                                        const PriorWeights& w,
                                        const std::vector<std::vector<double>>& glrt_scores);

AggregateResult aggregate(const std::vector<TrialResult>& trials, int K);

/// Sculpts a prior per statistic for each trial, trial t using seed
/// base_seed + t, then compares detectors. Uses config.knots.front().
ExperimentResult run_trials(const ExperimentConfig& config, const ProgressFn& progress = {});

/// run_trials for every K in config.knots with a shared sigma_t.
std::vector<ExperimentResult> knot_sweep(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Detector comparison for a fixed prior (uniform when `weights` is empty).
ExperimentResult compare_detectors(const ExperimentConfig& config, std::optional<std::vector<double>> weights,
                                   const ProgressFn& progress = {});

}  // namespace sculptor
