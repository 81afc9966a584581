#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sculptor {

enum class StatKind { OneMinusDrAtFar, FarAtDr, OneMinusAuc };

/// ROC-based performance statistic in smaller-is-better form:
/// 1 - DR@FAR=x, FAR@DR=x, or 1 - AUC.
class RocStatistic {
public:
  static RocStatistic one_minus_dr_at_far(double far);
  static RocStatistic far_at_dr(double dr);
  static RocStatistic one_minus_auc();

  /// Accepts "dr@far:<x>", "far@dr:<x>" and "auc".
  static RocStatistic parse(std::string_view text);

  StatKind kind() const { return kind_; }
  double param() const { return param_; }

  /// Round-trips through parse().
  std::string name() const;
  /// Human-readable, e.g. "1-DR@FAR=0.05".
  std::string label() const;
  /// Safe for file names, e.g. "dr_at_far_0.05".
  std::string tag() const;

  friend bool operator==(const RocStatistic&, const RocStatistic&) = default;

private:
  RocStatistic(StatKind kind, double param) : kind_(kind), param_(param) {}

  StatKind kind_;
  double param_;
};

/// Target-free and target-present detector scores. Background scores are
/// stored sorted ascending.
class ScorePair {
public:
  /// Throws Evaluation on empty arrays or NaN scores.
  ScorePair(std::vector<double> bkg, std::vector<double> tgt);

  std::span<const double> bkg() const { return bkg_; }
  std::span<const double> tgt() const { return tgt_; }

private:
  std::vector<double> bkg_;
  std::vector<double> tgt_;
};

// Threshold convention: eta is the ceil(N x)-th largest score of the
// reference population and a sample is detected iff its score is strictly
// greater than eta.

/// Fraction of target scores above the ceil(N_bkg far)-th largest background score.
double dr_at_far(const ScorePair& sp, double far);

/// Fraction of background scores above the ceil(N_tgt dr)-th largest target score.
double far_at_dr(const ScorePair& sp, double dr);

/// Mann-Whitney estimate P(tgt > bkg) + P(tgt = bkg)/2, O(N log N).
double auc(const ScorePair& sp);

/// Smaller-is-better value of `stat`.
double evaluate(const RocStatistic& stat, const ScorePair& sp);

/// Evaluates `stat` for one background population against several target
/// populations. Buffers are reordered in place (all statistics are
/// permutation invariant); results equal evaluate() on the same data.
std::vector<double> evaluate_many(const RocStatistic& stat, std::span<double> bkg,
                                  std::span<const std::span<double>> tgts);

/// Binomial standard error of the statistic at `value` (Hanley-McNeil for AUC).
double standard_error(const RocStatistic& stat, double value, std::size_t n_bkg, std::size_t n_tgt);

/// Rank of the threshold order statistic: ceil(n x), clamped to [1, n].
std::size_t threshold_rank(std::size_t n, double x);

struct RocPoint {
  double threshold;
  double far;
  double dr;
};

/// Empirical ROC steps, one point per distinct score (descending threshold),
/// ending at (1, 1).
std::vector<RocPoint> roc_curve(const ScorePair& sp);

void write_roc_csv(std::ostream& os, std::span<const RocPoint> curve);

}  // namespace sculptor
