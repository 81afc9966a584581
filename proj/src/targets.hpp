#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "distributions.hpp"
#include "knots.hpp"

namespace sculptor {

/// Target spectrum together with its whitened form s = L^{-1}(t - mu) and
/// whitened norm sigma_t = |s|. With mu = 0 this is sqrt(t^T R^{-1} t).
struct TargetSignature {
  Eigen::VectorXd t;
  Eigen::VectorXd s;
  double sigma_t = 0.0;

  /// Throws Parameter when the whitened signature is zero.
  static TargetSignature from_spectrum(const TBackground& bkg, Eigen::VectorXd t);

  /// t = mu + sigma_t * L e_1, i.e. s = sigma_t e_1.
  static TargetSignature along_first_axis(const TBackground& bkg, double sigma_t);
};

/// Matched-filter / residual coordinates of a whitened pixel y:
/// m = s.y / sigma_t and r = |y - m s/sigma_t|.
struct MfrPoint {
  double m = 0.0;
  double r = 0.0;

  friend bool operator==(const MfrPoint&, const MfrPoint&) = default;
};

/// Replacement model: (1 - a) z + a t. Requires 0 <= a < 1.
Eigen::VectorXd implant(const Eigen::Ref<const Eigen::VectorXd>& z, double a,
                        const Eigen::Ref<const Eigen::VectorXd>& t);

MfrPoint mfr_project(const Eigen::Ref<const Eigen::VectorXd>& x, const TBackground& bkg,
                     const TargetSignature& sig);

/// MFR of an already whitened pixel.
MfrPoint mfr_from_whitened(const Eigen::Ref<const Eigen::VectorXd>& y,
                           const TargetSignature& sig);

/// Exact MFR image of implant(): ((1-a) m + a sigma_t, (1-a) r).
MfrPoint implant_mfr(MfrPoint p, double a, double sigma_t);

/// Throws Abundance unless 0 <= a < 1.
void check_abundance(double a);

/// Background pixels and, for every knot, the same pixels with target
/// implanted at that knot's abundance. tgt[k][i] pairs with bkg[i].
struct MatchedPairSet {
  double nu = 0.0;
  int d = 0;
  double sigma_t = 0.0;
  KnotGrid knots{1};
  std::vector<MfrPoint> bkg;
  std::vector<std::vector<MfrPoint>> tgt;

  std::size_t size() const { return bkg.size(); }
};

/// Draws n background pixels, projects each to MFR once and implants at
/// every knot in MFR space. Memory is O(n K), independent of d.
MatchedPairSet make_matched_pairs(const TBackground& bkg, const TargetSignature& sig,
                                  const KnotGrid& knots, std::size_t n, std::uint64_t seed);

/// Same pixels as make_matched_pairs, before implanting.
std::vector<MfrPoint> sample_mfr(const TBackground& bkg, const TargetSignature& sig,
                                 std::size_t n, std::uint64_t seed);

/// CSV layout: one '#' metadata line, a header, then rows
/// population,pair_index,m,r with population 0 for background and k for the
/// k-th knot (1-based).
void write_pairs_csv(std::ostream& os, const MatchedPairSet& pairs);
MatchedPairSet read_pairs_csv(std::istream& is);

/// Little-endian binary layout:
///   char[4] "SCMP", u32 version (1), f64 nu, u32 d, f64 sigma_t, u32 K,
///   u64 n, then K+1 populations (background first) of n (f64 m, f64 r).
void write_pairs_binary(std::ostream& os, const MatchedPairSet& pairs);
MatchedPairSet read_pairs_binary(std::istream& is);

void save_pairs(const std::string& path, const MatchedPairSet& pairs);
MatchedPairSet load_pairs(const std::string& path);

}  // namespace sculptor
