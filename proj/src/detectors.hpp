#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "distributions.hpp"
#include "knots.hpp"
#include "targets.hpp"

namespace sculptor {

/// Everything a detector needs beyond the MFR point: the t background's
/// degrees of freedom and dimension, and the whitened target norm.
struct DetectionModel {
  double nu = 3.0;
  int d = 1;
  double sigma_t = 1.0;

  static DetectionModel of(const MatchedPairSet& pairs) { return {pairs.nu, pairs.d, pairs.sigma_t}; }
  static DetectionModel of(const TBackground& bkg, double sigma_t) { return {bkg.nu(), bkg.dim(), sigma_t}; }
};

/// Clairvoyant log likelihood ratio log P_tgt(a, x) - log P_bkg(x), written
/// in MFR coordinates:
///
///   -d log(1-a) + (nu+d)/2 [ log(nu-2 + m^2 + r^2)
///                            - log(nu-2 + ((m - a sigma_t)^2 + r^2) / (1-a)^2) ].
///
/// Throws Abundance unless 0 <= a < 1.
double log_lr(double a, MfrPoint p, const DetectionModel& model);
double log_lr(double a, MfrPoint p, const TBackground& bkg, double sigma_t);

/// Per-point, per-knot log likelihood ratios for one population.
///
/// Alongside llr the matrix caches each row's maximum and the shifted
/// exponentials exp(llr - max), so a Bayes score for any prior is one
/// weighted sum and one log per row. The cached path reproduces bayes_score()
/// bit for bit.
class ScoreMatrix {
public:
  ScoreMatrix(std::span<const MfrPoint> pts, const KnotGrid& knots, const DetectionModel& model,
              std::string provenance = {});

  std::size_t rows() const { return rows_; }
  int knots() const { return K_; }
  const std::string& provenance() const { return provenance_; }

  std::span<const double> row(std::size_t i) const {
    return {llr_.data() + i * static_cast<std::size_t>(K_), static_cast<std::size_t>(K_)};
  }
  double llr(std::size_t i, int k) const { return llr_[i * static_cast<std::size_t>(K_) + static_cast<std::size_t>(k)]; }
  double row_max(std::size_t i) const { return max_[i]; }
  std::span<const double> shifted_row(std::size_t i) const {
    return {exp_.data() + i * static_cast<std::size_t>(K_), static_cast<std::size_t>(K_)};
  }

private:
  std::size_t rows_ = 0;
  int K_ = 0;
  std::vector<double> llr_;
  std::vector<double> max_;
  std::vector<double> exp_;
  std::string provenance_;
};

/// Restricted GLRT: max_k llr[k].
double rglrt_score(std::span<const double> row);

struct GlrtResult {
  double score = 0.0;
  double argmax = 0.0;
};

/// Continuous GLRT: max over a in [0, 1 - 1e-6] of log_lr. A 512-point grid
/// locates the candidate peaks, each of which is refined by golden-section
/// search to |da| <= 1e-8. Always >= 0 since a = 0 is on the grid.
GlrtResult glrt(MfrPoint p, const DetectionModel& model);
double glrt_score(MfrPoint p, const DetectionModel& model);

/// Delta-comb Bayes detector: log sum_k w_k exp(llr[k]), via log-sum-exp.
double bayes_score(std::span<const double> row, const PriorWeights& w);

/// Max-with-prior detector: max over w_k > 0 of llr[k] + log w_k.
double maxq_score(std::span<const double> row, const PriorWeights& w);

// Bulk forms over a ScoreMatrix (out.size() == rows()).
void bayes_scores(const ScoreMatrix& sm, const PriorWeights& w, std::span<double> out);
void rglrt_scores(const ScoreMatrix& sm, std::span<double> out);
void clairvoyant_scores(const ScoreMatrix& sm, int k, std::span<double> out);
void maxq_scores(const ScoreMatrix& sm, const PriorWeights& w, std::span<double> out);
std::vector<double> glrt_scores(std::span<const MfrPoint> pts, const DetectionModel& model);

}  // namespace sculptor
