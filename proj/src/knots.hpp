#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sculptor {

/// Abundance knots a_k = (k - 1/2)/K, k = 1..K: midpoints of K equal
/// segments of the unit interval.
class KnotGrid {
public:
  explicit KnotGrid(int K);

  int size() const { return static_cast<int>(a_.size()); }
  double operator[](std::size_t k) const { return a_[k]; }
  std::span<const double> abundances() const { return a_; }

  /// Index of the middle knot (lower middle for even K).
  std::size_t middle() const { return (a_.size() - 1) / 2; }

private:
  std::vector<double> a_;
};

/// Delta-comb prior weights on the probability simplex.
class PriorWeights {
public:
  /// Validates w_k >= 0 and |sum - 1| <= 1e-12; throws Weight otherwise.
  explicit PriorWeights(std::vector<double> w);

  static PriorWeights uniform(int K);

  /// Indicator of knot j.
  static PriorWeights indicator(int K, int j);

  /// Rescales arbitrary non-negative values to sum to one.
  static PriorWeights normalized(std::vector<double> w);

  int size() const { return static_cast<int>(w_.size()); }
  double operator[](std::size_t k) const { return w_[k]; }
  std::span<const double> values() const { return w_; }

private:
  std::vector<double> w_;
};

}  // namespace sculptor
