#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roc.hpp"

namespace sculptor {

/// Knot counts used by sweep-knots when none are given.
std::vector<int> default_knot_sweep();

/// The nine Fig.-1-style statistics: seven DR@FAR levels, AUC, FAR@DR=0.5.
std::vector<RocStatistic> default_statistics();

/// Flat experiment configuration. JSON keys mirror the field names.
struct ExperimentConfig {
  double nu = 3.0;
  int dim = 9;
  double sigma_t = 0.0;  // <= 0: calibrate before running
  std::vector<int> knots{5};
  std::size_t pairs = 100000;
  int trials = 5;
  std::vector<RocStatistic> stats = default_statistics();
  double step = 0.01;
  int iters = 500;
  int restarts = 1;
  std::uint64_t seed = 1;
  std::string out = "results";

  bool glrt = true;        // evaluate the continuous GLRT in comparisons
  double se_mult = 2.0;    // success when loss <= se_mult * SE
  std::size_t calib_pairs = 100000;
  double calib_far = 0.05;
  double calib_low = 0.4;
  double calib_high = 0.8;

  /// Throws Config on any out-of-range field.
  void validate() const;

  /// Sets one field from its text form (used by CLI flags and the C API).
  void set(const std::string& key, const std::string& value);

  /// Text form of one field, accepted back by set().
  std::string get(const std::string& key) const;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  /// FNV-1a over the canonical JSON (excluding `out`), hex encoded.
  std::string hash() const;
};

}  // namespace sculptor
