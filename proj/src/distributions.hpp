#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "rng.hpp"

namespace sculptor {

/// Elliptically-contoured multivariate t background,
///
///   p(x) = c * [nu - 2 + (x - mu)^T R^{-1} (x - mu)]^{-(nu + d)/2},
///
/// parameterized so that R is the covariance (requires nu > 2). The lower
/// Cholesky factor of R and log(c) are computed once at construction.
class TBackground {
public:
  /// Throws Parameter for nu <= 2 or empty mean, Dimension when mu and R
  /// disagree, Model when R is not symmetric positive-definite.
  TBackground(double nu, Eigen::VectorXd mu, Eigen::MatrixXd R);

  /// Zero mean, identity covariance.
  static TBackground standard(double nu, int d);

  double nu() const { return nu_; }
  int dim() const { return static_cast<int>(mu_.size()); }
  const Eigen::VectorXd& mean() const { return mu_; }
  const Eigen::MatrixXd& covariance() const { return R_; }
  const Eigen::MatrixXd& cholesky() const { return L_; }
  double log_normalizer() const { return log_c_; }

  /// log p(x). All density arithmetic is done in log domain.
  double log_pdf(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// log p as a function of the Mahalanobis form q = (x-mu)^T R^{-1} (x-mu).
  double log_pdf_quadratic(double q) const;

  /// L^{-1} (x - mu).
  Eigen::VectorXd whiten(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// (x-mu)^T R^{-1} (x-mu).
  double mahalanobis(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// n x d block; row i is mu + L g sqrt((nu-2)/u), g ~ N(0, I), u ~ chi2(nu).
  /// Rows are generated in fixed blocks with seeds derived from `seed`, so the
  /// result is identical however the work is split.
  Eigen::MatrixXd sample(std::size_t n, std::uint64_t seed) const;

  /// Rows per independently seeded sampling block.
  static constexpr std::size_t kBlockRows = 4096;

private:
  double nu_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd R_;
  Eigen::MatrixXd L_;
  double log_c_ = 0.0;
};

/// Draws one whitened row y = g sqrt((nu-2)/u) into `y` (length d).
/// `normal` and `chi2` carry state between rows of one block.
void draw_whitened(Rng& rng, std::normal_distribution<double>& normal,
                   std::chi_squared_distribution<double>& chi2, double nu,
                   Eigen::Ref<Eigen::VectorXd> y);

}  // namespace sculptor
