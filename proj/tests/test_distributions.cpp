#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include "distributions.hpp"
#include "error.hpp"
#include "oracles.hpp"

using namespace sculptor;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("normalizer for nu=3, d=1 is 2/pi") {
  const auto b = TBackground::standard(3.0, 1);
  CHECK(std::exp(b.log_normalizer()) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
  Eigen::VectorXd x(1);
  x << 0.0;
  CHECK(b.log_pdf(x) == doctest::Approx(std::log(2.0 / std::numbers::pi)).epsilon(1e-14));
  x << 1.0;
  CHECK(b.log_pdf(x) == doctest::Approx(std::log(2.0 / std::numbers::pi) - 2.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("log_pdf agrees with a dense-inverse evaluation") {
  const int d = 9;
  Eigen::MatrixXd R = oracle::random_spd(d, 7);
  Eigen::VectorXd mu = Eigen::VectorXd::LinSpaced(d, -1.0, 1.0);
  for (double nu : {2.5, 3.0, 7.0, 30.0}) {
    TBackground b(nu, mu, R);
    std::mt19937 gen(11);
    std::normal_distribution<double> n01;
    for (int rep = 0; rep < 50; ++rep) {
      Eigen::VectorXd x(d);
      for (int i = 0; i < d; ++i) x[i] = 3.0 * n01(gen);
      CHECK(b.log_pdf(x) == doctest::Approx(oracle::t_log_pdf(nu, mu, R, x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("d=1 density integrates to one") {
  for (double nu : {2.5, 3.0, 5.0}) {
    const auto b = TBackground::standard(nu, 1);
    auto f = [&](double x) {
      Eigen::VectorXd v(1);
      v << x;
      return std::exp(b.log_pdf(v));
    };
    boost::math::quadrature::sinh_sinh<double> integrator;
    const double total = integrator.integrate(f, 1e-14);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("density integrates to one radially") {
  boost::math::quadrature::exp_sinh<double> integrator;
  for (auto [nu, d] : {std::pair{3.0, 9}, std::pair{5.0, 9}, std::pair{2.5, 4}, std::pair{7.0, 30}}) {
    const auto b = TBackground::standard(nu, d);
    const double log_surface = std::log(2.0) + 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d);
    const double total = integrator.integrate(
      [&](double rho) {
        if (rho <= 0.0) return 0.0;
        return std::exp(b.log_pdf_quadratic(rho * rho) + log_surface + (d - 1) * std::log(rho));
      },
      1e-13);
    INFO("nu=" << nu << " d=" << d);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK(code_of([] { TBackground::standard(2.0, 3); }) == ErrorCode::Parameter);
  CHECK(code_of([] { TBackground::standard(1.5, 3); }) == ErrorCode::Parameter);
  CHECK(code_of([] { TBackground::standard(std::nan(""), 3); }) == ErrorCode::Parameter);
  CHECK(code_of([] { TBackground(3.0, Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(2, 2)); }) ==
        ErrorCode::Dimension);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK(code_of([&] { TBackground(3.0, Eigen::VectorXd::Zero(2), indefinite); }) == ErrorCode::Model);

  Eigen::MatrixXd asym(2, 2);
  asym << 2.0, 0.1, 0.0, 2.0;
  CHECK(code_of([&] { TBackground(3.0, Eigen::VectorXd::Zero(2), asym); }) == ErrorCode::Model);

  Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(3, 3);
  singular(0, 0) = 1.0;
  CHECK(code_of([&] { TBackground(3.0, Eigen::VectorXd::Zero(3), singular); }) == ErrorCode::Model);
}

TEST_CASE("cholesky factor reconstructs R") {
  for (int d : {1, 9, 40}) {
    Eigen::MatrixXd R = oracle::random_spd(d, 100 + static_cast<unsigned>(d));
    TBackground b(3.0, Eigen::VectorXd::Zero(d), R);
    const Eigen::MatrixXd& L = b.cholesky();
    CHECK((L * L.transpose() - R).norm() <= 1e-10 * R.norm());
    CHECK(L.isLowerTriangular());
  }
}

TEST_CASE("density depends on x only through the Mahalanobis form") {
  const auto b = TBackground::standard(3.0, 4);
  Eigen::VectorXd x(4), y(4);
  x << 1.0, 2.0, 0.0, -2.0;
  y << 3.0, 0.0, 0.0, 0.0;
  CHECK(b.log_pdf(x) == doctest::Approx(b.log_pdf(y)).epsilon(1e-14));
  CHECK(b.log_pdf(x) == doctest::Approx(b.log_pdf_quadratic(9.0)).epsilon(1e-14));
  CHECK(b.log_pdf(Eigen::VectorXd::Zero(4)) > b.log_pdf(x));
}

TEST_CASE("sampler follows the scaled F law for the Mahalanobis form") {
  // (x-mu)^T R^{-1} (x-mu) / (nu-2) = |g|^2 / u = (d/nu) F(d, nu).
  const double nu = 3.0;
  const int d = 9;
  Eigen::MatrixXd R = oracle::random_spd(d, 3);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(d, 2.0);
  TBackground b(nu, mu, R);
  const Eigen::MatrixXd X = b.sample(100000, 42);
  REQUIRE(X.rows() == 100000);
  REQUIRE(X.cols() == d);
  const Eigen::MatrixXd Rinv = R.inverse();
  std::vector<double> q(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::VectorXd dx = X.row(i).transpose() - mu;
    q[static_cast<std::size_t>(i)] = dx.dot(Rinv * dx) / (nu - 2.0);
  }
  const double ks = oracle::ks_distance(q, [&](double v) { return oracle::f_cdf(v * nu / d, d, nu); });
  CHECK(ks < 0.01);
}

TEST_CASE("sample moments") {
  const int d = 9;
  const auto b = TBackground::standard(3.0, d);
  // With nu = 3 the fourth moment is infinite and the sample covariance error
  // is heavy tailed; the median over independent replicates is stable.
  std::vector<double> frob;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Eigen::MatrixXd X = b.sample(100000, seed);
    const Eigen::VectorXd mean = X.colwise().mean();
    CHECK(mean.cwiseAbs().maxCoeff() < 0.05);
    const Eigen::MatrixXd C = (X.transpose() * X) / static_cast<double>(X.rows());
    frob.push_back((C - Eigen::MatrixXd::Identity(d, d)).norm());
  }
  std::sort(frob.begin(), frob.end());
  CHECK(frob[2] < 0.3);
}

TEST_CASE("sampling is deterministic and seed sensitive") {
  const auto b = TBackground::standard(3.0, 5);
  const Eigen::MatrixXd a = b.sample(10000, 9);
  const Eigen::MatrixXd c = b.sample(10000, 9);
  const Eigen::MatrixXd e = b.sample(10000, 10);
  CHECK(a == c);
  CHECK(a != e);
  // A prefix of a larger draw is the smaller draw.
  const Eigen::MatrixXd big = b.sample(20000, 9);
  CHECK(big.topRows(10000) == a);
}

TEST_CASE("whiten and mahalanobis are consistent") {
  const int d = 6;
  Eigen::MatrixXd R = oracle::random_spd(d, 5);
  Eigen::VectorXd mu = Eigen::VectorXd::LinSpaced(d, 0.0, 1.0);
  TBackground b(4.0, mu, R);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(d, 3.0, -3.0);
  const Eigen::VectorXd y = b.whiten(x);
  CHECK(y.squaredNorm() == doctest::Approx((x - mu).dot(R.inverse() * (x - mu))).epsilon(1e-12));
  CHECK(b.mahalanobis(x) == doctest::Approx(y.squaredNorm()).epsilon(1e-14));
}
