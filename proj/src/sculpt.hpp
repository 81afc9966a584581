#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "detectors.hpp"
#include "roc.hpp"
#include "targets.hpp"

namespace sculptor {

/// Score matrices for the background population and each knot's target
/// population of one matched-pair set. Filled once, then read-only.
class PairScores {
public:
  explicit PairScores(const MatchedPairSet& pairs);

  int knots() const { return static_cast<int>(tgt_.size()); }
  std::size_t pairs() const { return bkg_.rows(); }
  const ScoreMatrix& bkg() const { return bkg_; }
  const ScoreMatrix& tgt(int k) const { return tgt_[static_cast<std::size_t>(k)]; }

private:
  ScoreMatrix bkg_;
  std::vector<ScoreMatrix> tgt_;
};

/// L(a_k, w) = s_Bayes(w, a_k) - s_RGLRT(a_k) for each knot and its maximum.
struct LossReport {
  std::vector<double> per_knot;
  double loss = 0.0;
  int argmax_knot = 0;  // first index on ties
};

struct SculptResult {
  PriorWeights weights{std::vector<double>{1.0}};
  LossReport final;
  std::vector<double> trajectory;  // iterations + 1 loss values
  int iterations = 0;
  double step = 0.0;
  std::vector<double> rglrt_baseline;
  double tolerance = 0.0;
  bool success = false;
};

/// s_RGLRT(a_k) for every knot. Weight-independent, so computed once per set.
std::vector<double> rglrt_baseline(const PairScores& scores, const RocStatistic& stat);

/// Same values computed point by point from log_lr, without score matrices.
std::vector<double> rglrt_baseline_direct(const MatchedPairSet& pairs, const RocStatistic& stat);

/// Builds a report from precomputed detector scores; buffers may be reordered.
LossReport loss_from_scores(const RocStatistic& stat, std::span<double> bkg_scores,
                            std::span<const std::span<double>> tgt_scores,
                            std::span<const double> baseline);

/// Reusable scratch space for repeated loss evaluations on one PairScores.
class LossEvaluator {
public:
  LossEvaluator(const PairScores& scores, const RocStatistic& stat, std::vector<double> baseline);

  LossReport operator()(const PriorWeights& w);

  const std::vector<double>& baseline() const { return baseline_; }
  const RocStatistic& statistic() const { return stat_; }
  const PairScores& scores() const { return scores_; }

private:
  const PairScores& scores_;
  RocStatistic stat_;
  std::vector<double> baseline_;
  std::vector<double> bkg_buf_;
  std::vector<std::vector<double>> tgt_buf_;
};

/// Bayes-minus-RGLRT loss for weights w; O(N K^2) per call.
LossReport bayes_loss(const PriorWeights& w, const PairScores& scores, const RocStatistic& stat,
                      std::span<const double> baseline);

/// Same loss, re-scoring every point from log_lr.
LossReport bayes_loss_direct(const PriorWeights& w, const MatchedPairSet& pairs,
                             const RocStatistic& stat, std::span<const double> baseline);

/// Desk-scale success threshold: se_mult standard errors of the statistic,
/// taken at knot k's RGLRT value.
double success_tolerance(const RocStatistic& stat, std::span<const double> baseline, int k,
                         std::size_t n_pairs, double se_mult);

struct BabystepsOptions {
  double step = 0.01;
  int iters = 500;
  double se_mult = 2.0;
};

/// Raises the weight of the knot with the largest loss by `step`, then
/// divides every weight by (1 + step). Returns the best iterate, not the last.
/// Starts from the uniform prior unless `init` is given.
SculptResult babysteps(LossEvaluator& eval, const BabystepsOptions& opt,
                       std::optional<PriorWeights> init = std::nullopt);

SculptResult babysteps(const PairScores& scores, const RocStatistic& stat, const BabystepsOptions& opt);

/// One run from the uniform prior plus (restarts - 1) runs from random
/// simplex points (normalized exponentials); keeps the lowest loss.
SculptResult random_restart_babysteps(LossEvaluator& eval, const BabystepsOptions& opt, int restarts,
                                      std::uint64_t seed);

/// One babysteps update applied in place.
void babystep_update(std::vector<double>& w, int k_star, double step);

}  // namespace sculptor
