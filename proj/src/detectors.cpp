#include "detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"

namespace sculptor {

namespace {

constexpr int kGlrtGrid = 512;
constexpr double kGlrtMaxAbundance = 1.0 - 1e-6;
constexpr double kGlrtTolerance = 1e-8;

// Shared by bayes_score() and the cached bulk path so both produce identical
// bits: same operands, same order.
inline double weighted_sum(const double* w, const double* e, std::size_t K) {
  double s = 0.0;
  for (std::size_t k = 0; k < K; ++k) s += w[k] * e[k];
  return s;
}

// Exact log-sum-exp over the positively weighted entries. Used only when the
// shared-max shortcut underflows to zero.
double bayes_fallback(std::span<const double> row, std::span<const double> w) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < row.size(); ++k)
    if (w[k] > 0.0) mx = std::max(mx, row[k]);
  double s = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k)
    if (w[k] > 0.0) s += w[k] * std::exp(row[k] - mx);
  return mx + std::log(s);
}

inline double finish_bayes(double mx, double s, std::span<const double> row, std::span<const double> w) {
  if (s > 0.0) return mx + std::log(s);
  return bayes_fallback(row, w);
}

void check_weights(std::size_t K, const PriorWeights& w) {
  if (static_cast<std::size_t>(w.size()) != K) {
    std::ostringstream os;
    os << "prior has " << w.size() << " weights but the score row has " << K << " knots";
    fail(ErrorCode::Dimension, os.str());
  }
}

}  // namespace

double log_lr(double a, MfrPoint p, const DetectionModel& model) {
  check_abundance(a);
  const double c = model.nu - 2.0;
  const double h = 0.5 * (model.nu + model.d);
  const double one_minus = 1.0 - a;
  const double dm = p.m - a * model.sigma_t;
  const double q_tgt = (dm * dm + p.r * p.r) / (one_minus * one_minus);
  const double q_bkg = p.m * p.m + p.r * p.r;
  return -model.d * std::log1p(-a) + h * (std::log(c + q_bkg) - std::log(c + q_tgt));
}

double log_lr(double a, MfrPoint p, const TBackground& bkg, double sigma_t) {
  return log_lr(a, p, DetectionModel::of(bkg, sigma_t));
}

ScoreMatrix::ScoreMatrix(std::span<const MfrPoint> pts, const KnotGrid& knots,
                         const DetectionModel& model, std::string provenance)
  : rows_(pts.size()), K_(knots.size()), provenance_(std::move(provenance)) {
  const auto K = static_cast<std::size_t>(K_);
  llr_.resize(rows_ * K);
  max_.resize(rows_);
  exp_.resize(rows_ * K);
  parallel_for(rows_, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double* row = llr_.data() + i * K;
      for (std::size_t k = 0; k < K; ++k) row[k] = log_lr(knots[k], pts[i], model);
      const double mx = *std::max_element(row, row + K);
      max_[i] = mx;
      double* e = exp_.data() + i * K;
      for (std::size_t k = 0; k < K; ++k) e[k] = std::exp(row[k] - mx);
    }
  });
}

double rglrt_score(std::span<const double> row) {
  if (row.empty()) fail(ErrorCode::Dimension, "empty score row");
  return *std::max_element(row.begin(), row.end());
}

namespace {

// Abundance-only factors of log_lr on the GLRT grid, computed once per model
// so each grid value costs a single log.
class GlrtGrid {
public:
  explicit GlrtGrid(const DetectionModel& model) : model_(model) {
    h_ = kGlrtMaxAbundance / (kGlrtGrid - 1);
    for (int j = 0; j < kGlrtGrid; ++j) {
      const double a = j * h_;
      shift_[j] = a * model.sigma_t;
      inv_sq_[j] = 1.0 / ((1.0 - a) * (1.0 - a));
      jac_[j] = -model.d * std::log1p(-a);
    }
  }

  GlrtResult run(MfrPoint p) const {
    const double c = model_.nu - 2.0;
    const double half = 0.5 * (model_.nu + model_.d);
    const double r2 = p.r * p.r;
    const double base = std::log(c + p.m * p.m + r2);
    double grid[kGlrtGrid];
    for (int j = 0; j < kGlrtGrid; ++j) {
      const double dm = p.m - shift_[j];
      grid[j] = jac_[j] + half * (base - std::log(c + (dm * dm + r2) * inv_sq_[j]));
    }

    GlrtResult best{grid[0], 0.0};
    for (int j = 1; j < kGlrtGrid; ++j)
      if (grid[j] > best.score) best = {grid[j], j * h_};

    // Refine every grid-local peak, not only the best one, so that a
    // second hump between grid points cannot be missed.
    auto f = [&](double a) { return log_lr(a, p, model_); };
    constexpr double inv_phi = 0.6180339887498949;
    for (int j = 0; j < kGlrtGrid; ++j) {
      const bool left_ok = j == 0 || grid[j] >= grid[j - 1];
      const bool right_ok = j == kGlrtGrid - 1 || grid[j] >= grid[j + 1];
      if (!left_ok || !right_ok) continue;
      double lo = std::max(0.0, (j - 1) * h_);
      double hi = std::min(kGlrtMaxAbundance, (j + 1) * h_);
      double x1 = hi - inv_phi * (hi - lo);
      double x2 = lo + inv_phi * (hi - lo);
      double f1 = f(x1), f2 = f(x2);
      while (hi - lo > kGlrtTolerance) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + inv_phi * (hi - lo);
          f2 = f(x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - inv_phi * (hi - lo);
          f1 = f(x1);
        }
      }
      if (f1 > best.score) best = {f1, x1};
      if (f2 > best.score) best = {f2, x2};
    }
    return best;
  }

private:
  DetectionModel model_;
  double h_;
  double shift_[kGlrtGrid];
  double inv_sq_[kGlrtGrid];
  double jac_[kGlrtGrid];
};

}  // namespace

GlrtResult glrt(MfrPoint p, const DetectionModel& model) { return GlrtGrid(model).run(p); }

double glrt_score(MfrPoint p, const DetectionModel& model) { return glrt(p, model).score; }

double bayes_score(std::span<const double> row, const PriorWeights& w) {
  check_weights(row.size(), w);
  const double mx = rglrt_score(row);
  std::vector<double> e(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) e[k] = std::exp(row[k] - mx);
  return finish_bayes(mx, weighted_sum(w.values().data(), e.data(), row.size()), row, w.values());
}

double maxq_score(std::span<const double> row, const PriorWeights& w) {
  check_weights(row.size(), w);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < row.size(); ++k)
    if (w[k] > 0.0) best = std::max(best, row[k] + std::log(w[k]));
  return best;
}

void bayes_scores(const ScoreMatrix& sm, const PriorWeights& w, std::span<double> out) {
  const auto K = static_cast<std::size_t>(sm.knots());
  check_weights(K, w);
  if (out.size() != sm.rows()) fail(ErrorCode::Dimension, "output length does not match score rows");
  const double* wv = w.values().data();
  parallel_for(sm.rows(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      out[i] = finish_bayes(sm.row_max(i), weighted_sum(wv, sm.shifted_row(i).data(), K), sm.row(i),
                            w.values());
  });
}

void rglrt_scores(const ScoreMatrix& sm, std::span<double> out) {
  if (out.size() != sm.rows()) fail(ErrorCode::Dimension, "output length does not match score rows");
  for (std::size_t i = 0; i < sm.rows(); ++i) out[i] = sm.row_max(i);
}

void clairvoyant_scores(const ScoreMatrix& sm, int k, std::span<double> out) {
  if (k < 0 || k >= sm.knots()) fail(ErrorCode::Parameter, "knot index out of range");
  if (out.size() != sm.rows()) fail(ErrorCode::Dimension, "output length does not match score rows");
  for (std::size_t i = 0; i < sm.rows(); ++i) out[i] = sm.llr(i, k);
}

void maxq_scores(const ScoreMatrix& sm, const PriorWeights& w, std::span<double> out) {
  if (out.size() != sm.rows()) fail(ErrorCode::Dimension, "output length does not match score rows");
  for (std::size_t i = 0; i < sm.rows(); ++i) out[i] = maxq_score(sm.row(i), w);
}

std::vector<double> glrt_scores(std::span<const MfrPoint> pts, const DetectionModel& model) {
  std::vector<double> out(pts.size());
  const GlrtGrid grid(model);
  parallel_for(pts.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) out[i] = grid.run(pts[i]).score;
  }, 256);
  return out;
}

}  // namespace sculptor
