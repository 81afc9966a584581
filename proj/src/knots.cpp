#include "knots.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace sculptor {

KnotGrid::KnotGrid(int K) {
  if (K < 1) fail(ErrorCode::Parameter, "number of knots must be at least 1");
  a_.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) a_[static_cast<std::size_t>(k)] = (k + 0.5) / K;
}

PriorWeights::PriorWeights(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) fail(ErrorCode::Weight, "prior needs at least one weight");
  double sum = 0.0;
  for (double v : w_) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::Weight, "prior weights must be finite and non-negative");
    sum += v;
  }
  if (!(std::abs(sum - 1.0) <= 1e-12)) {
    std::ostringstream os;
    os.precision(17);
    os << "prior weights must sum to 1, got " << sum;
    fail(ErrorCode::Weight, os.str());
  }
}

PriorWeights PriorWeights::uniform(int K) {
  if (K < 1) fail(ErrorCode::Weight, "prior needs at least one weight");
  return PriorWeights(std::vector<double>(static_cast<std::size_t>(K), 1.0 / K));
}

PriorWeights PriorWeights::indicator(int K, int j) {
  if (K < 1 || j < 0 || j >= K) fail(ErrorCode::Weight, "indicator knot out of range");
  std::vector<double> w(static_cast<std::size_t>(K), 0.0);
  w[static_cast<std::size_t>(j)] = 1.0;
  return PriorWeights(std::move(w));
}

PriorWeights PriorWeights::normalized(std::vector<double> w) {
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::Weight, "prior weights must be finite and non-negative");
    sum += v;
  }
  if (!(sum > 0.0)) fail(ErrorCode::Weight, "all prior weights are zero");
  for (double& v : w) v /= sum;
  return PriorWeights(std::move(w));
}

}  // namespace sculptor
