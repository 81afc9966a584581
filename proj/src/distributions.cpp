#include "distributions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"

namespace sculptor {

TBackground::TBackground(double nu, Eigen::VectorXd mu, Eigen::MatrixXd R)
  : nu_(nu), mu_(std::move(mu)), R_(std::move(R)) {
  if (!(nu_ > 2.0) || !std::isfinite(nu_)) {
    std::ostringstream os;
    os << "degrees of freedom must be finite and > 2, got " << nu_;
    fail(ErrorCode::Parameter, os.str());
  }
  const auto d = mu_.size();
  if (d == 0) fail(ErrorCode::Parameter, "spectral dimension must be positive");
  if (R_.rows() != d || R_.cols() != d) {
    std::ostringstream os;
    os << "covariance is " << R_.rows() << "x" << R_.cols() << " but mean has length " << d;
    fail(ErrorCode::Dimension, os.str());
  }
  if (!R_.allFinite() || !mu_.allFinite())
    fail(ErrorCode::Model, "mean and covariance must be finite");
  const double scale = R_.cwiseAbs().maxCoeff();
  if ((R_ - R_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    fail(ErrorCode::Model, "covariance is not symmetric");

  // No pivoting and no repair: a non-SPD covariance is rejected.
  Eigen::LLT<Eigen::MatrixXd> llt(R_);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::Model, "covariance is not positive-definite");
  L_ = llt.matrixL();
  for (Eigen::Index i = 0; i < L_.rows(); ++i)
    if (!(L_(i, i) > 0.0)) fail(ErrorCode::Model, "covariance is not positive-definite");

  const double half_logdet = L_.diagonal().array().log().sum();
  const double dd = static_cast<double>(d);
  // The (nu - 2)^((nu + d)/2) factor comes from writing the density in terms
  // of nu - 2 + q rather than 1 + q/(nu - 2); it vanishes only at nu = 3.
  log_c_ = std::lgamma(0.5 * (nu_ + dd)) - std::lgamma(0.5 * nu_) -
           0.5 * dd * std::log((nu_ - 2.0) * std::numbers::pi) - half_logdet +
           0.5 * (nu_ + dd) * std::log(nu_ - 2.0);
}

TBackground TBackground::standard(double nu, int d) {
  if (d <= 0) fail(ErrorCode::Parameter, "spectral dimension must be positive");
  return TBackground(nu, Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d));
}

Eigen::VectorXd TBackground::whiten(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != mu_.size()) {
    std::ostringstream os;
    os << "vector has length " << x.size() << ", background dimension is " << mu_.size();
    fail(ErrorCode::Dimension, os.str());
  }
  return L_.triangularView<Eigen::Lower>().solve(x - mu_);
}

double TBackground::mahalanobis(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return whiten(x).squaredNorm();
}

double TBackground::log_pdf_quadratic(double q) const {
  return log_c_ - 0.5 * (nu_ + static_cast<double>(dim())) * std::log(nu_ - 2.0 + q);
}

double TBackground::log_pdf(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return log_pdf_quadratic(mahalanobis(x));
}

void draw_whitened(Rng& rng, std::normal_distribution<double>& normal,
                   std::chi_squared_distribution<double>& chi2, double nu,
                   Eigen::Ref<Eigen::VectorXd> y) {
  for (Eigen::Index j = 0; j < y.size(); ++j) y[j] = normal(rng);
  const double u = chi2(rng);
  y *= std::sqrt((nu - 2.0) / u);
}

Eigen::MatrixXd TBackground::sample(std::size_t n, std::uint64_t seed) const {
  if (n == 0) fail(ErrorCode::Parameter, "sample size must be at least 1");
  const auto d = mu_.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  const std::size_t blocks = (n + kBlockRows - 1) / kBlockRows;
  parallel_for(blocks, [&](std::size_t b0, std::size_t b1) {
    Eigen::VectorXd y(d);
    for (std::size_t b = b0; b < b1; ++b) {
      Rng rng = make_rng(seed, Stream::Background, b);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::chi_squared_distribution<double> chi2(nu_);
      const std::size_t lo = b * kBlockRows;
      const std::size_t hi = std::min(n, lo + kBlockRows);
      for (std::size_t i = lo; i < hi; ++i) {
        draw_whitened(rng, normal, chi2, nu_, y);
        out.row(static_cast<Eigen::Index>(i)) = (mu_ + L_ * y).transpose();
      }
    }
  }, 1);
  return out;
}

}  // namespace sculptor
