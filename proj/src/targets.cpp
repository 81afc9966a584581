#include "targets.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"

namespace sculptor {

void check_abundance(double a) {
  if (!(a >= 0.0 && a < 1.0)) {
    std::ostringstream os;
    os << "abundance must lie in [0, 1), got " << a;
    fail(ErrorCode::Abundance, os.str());
  }
}

TargetSignature TargetSignature::from_spectrum(const TBackground& bkg, Eigen::VectorXd t) {
  TargetSignature sig;
  sig.s = bkg.whiten(t);
  sig.t = std::move(t);
  sig.sigma_t = sig.s.norm();
  if (!(sig.sigma_t > 0.0) || !std::isfinite(sig.sigma_t))
    fail(ErrorCode::Parameter, "target signature must differ from the background mean");
  return sig;
}

TargetSignature TargetSignature::along_first_axis(const TBackground& bkg, double sigma_t) {
  if (!(sigma_t > 0.0) || !std::isfinite(sigma_t))
    fail(ErrorCode::Parameter, "target norm sigma_t must be positive");
  TargetSignature sig;
  sig.s = Eigen::VectorXd::Zero(bkg.dim());
  sig.s[0] = sigma_t;
  sig.t = bkg.mean() + bkg.cholesky() * sig.s;
  sig.sigma_t = sigma_t;
  return sig;
}

Eigen::VectorXd implant(const Eigen::Ref<const Eigen::VectorXd>& z, double a,
                        const Eigen::Ref<const Eigen::VectorXd>& t) {
  check_abundance(a);
  if (z.size() != t.size()) fail(ErrorCode::Dimension, "pixel and target dimensions differ");
  return (1.0 - a) * z + a * t;
}

MfrPoint mfr_from_whitened(const Eigen::Ref<const Eigen::VectorXd>& y,
                           const TargetSignature& sig) {
  if (y.size() != sig.s.size()) fail(ErrorCode::Dimension, "pixel and target dimensions differ");
  MfrPoint p;
  p.m = sig.s.dot(y) / sig.sigma_t;
  // Clamp round-off when y lies on the target line.
  p.r = std::sqrt(std::max(0.0, y.squaredNorm() - p.m * p.m));
  return p;
}

MfrPoint mfr_project(const Eigen::Ref<const Eigen::VectorXd>& x, const TBackground& bkg,
                     const TargetSignature& sig) {
  return mfr_from_whitened(bkg.whiten(x), sig);
}

MfrPoint implant_mfr(MfrPoint p, double a, double sigma_t) {
  check_abundance(a);
  return {(1.0 - a) * p.m + a * sigma_t, (1.0 - a) * p.r};
}

std::vector<MfrPoint> sample_mfr(const TBackground& bkg, const TargetSignature& sig,
                                 std::size_t n, std::uint64_t seed) {
  if (n == 0) fail(ErrorCode::Parameter, "pair count must be at least 1");
  if (sig.s.size() != bkg.dim()) fail(ErrorCode::Dimension, "pixel and target dimensions differ");
  std::vector<MfrPoint> out(n);
  const std::size_t rows = TBackground::kBlockRows;
  const std::size_t blocks = (n + rows - 1) / rows;
  parallel_for(blocks, [&](std::size_t b0, std::size_t b1) {
    Eigen::VectorXd y(bkg.dim());
    for (std::size_t b = b0; b < b1; ++b) {
      // Same stream and per-row procedure as TBackground::sample; the whitened
      // row y equals L^{-1}(x - mu) of the corresponding sampled x.
      Rng rng = make_rng(seed, Stream::Background, b);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::chi_squared_distribution<double> chi2(bkg.nu());
      const std::size_t hi = std::min(n, (b + 1) * rows);
      for (std::size_t i = b * rows; i < hi; ++i) {
        draw_whitened(rng, normal, chi2, bkg.nu(), y);
        out[i] = mfr_from_whitened(y, sig);
      }
    }
  }, 1);
  return out;
}

MatchedPairSet make_matched_pairs(const TBackground& bkg, const TargetSignature& sig,
                                  const KnotGrid& knots, std::size_t n, std::uint64_t seed) {
  MatchedPairSet pairs;
  pairs.nu = bkg.nu();
  pairs.d = bkg.dim();
  pairs.sigma_t = sig.sigma_t;
  pairs.knots = knots;
  pairs.bkg = sample_mfr(bkg, sig, n, seed);
  pairs.tgt.resize(static_cast<std::size_t>(knots.size()));
  for (int k = 0; k < knots.size(); ++k) {
    auto& pop = pairs.tgt[static_cast<std::size_t>(k)];
    pop.resize(n);
    const double a = knots[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < n; ++i) pop[i] = implant_mfr(pairs.bkg[i], a, sig.sigma_t);
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void check_pairs_shape(const MatchedPairSet& p) {
  if (p.tgt.size() != static_cast<std::size_t>(p.knots.size()))
    fail(ErrorCode::Parameter, "matched pairs: population count does not match knot grid");
  for (const auto& pop : p.tgt)
    if (pop.size() != p.bkg.size())
      fail(ErrorCode::Parameter, "matched pairs: populations are not index-aligned");
}

}  // namespace

void write_pairs_csv(std::ostream& os, const MatchedPairSet& pairs) {
  check_pairs_shape(pairs);
  char buf[128];
  std::snprintf(buf, sizeof buf, "# nu=%.17g d=%d sigma_t=%.17g K=%d n=%zu\n", pairs.nu, pairs.d,
                pairs.sigma_t, pairs.knots.size(), pairs.size());
  os << buf << "population,pair_index,m,r\n";
  auto emit = [&](int pop, const std::vector<MfrPoint>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g\n", pop, i, pts[i].m, pts[i].r);
      os << buf;
    }
  };
  emit(0, pairs.bkg);
  for (std::size_t k = 0; k < pairs.tgt.size(); ++k) emit(static_cast<int>(k + 1), pairs.tgt[k]);
  if (!os) fail(ErrorCode::Io, "failed writing matched pairs CSV");
}

MatchedPairSet read_pairs_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("#", 0) != 0)
    fail(ErrorCode::Io, "matched pairs CSV: missing metadata line");
  double nu = 0, sigma = 0;
  int d = 0, K = 0;
  std::size_t n = 0;
  if (std::sscanf(line.c_str(), "# nu=%lf d=%d sigma_t=%lf K=%d n=%zu", &nu, &d, &sigma, &K, &n) != 5)
    fail(ErrorCode::Io, "matched pairs CSV: malformed metadata line");
  if (K < 1 || n == 0) fail(ErrorCode::Io, "matched pairs CSV: empty set");
  if (!std::getline(is, line) || line != "population,pair_index,m,r")
    fail(ErrorCode::Io, "matched pairs CSV: unexpected header");
  MatchedPairSet p;
  p.nu = nu;
  p.d = d;
  p.sigma_t = sigma;
  p.knots = KnotGrid(K);
  p.bkg.resize(n);
  p.tgt.assign(static_cast<std::size_t>(K), std::vector<MfrPoint>(n));
  std::vector<std::size_t> seen(static_cast<std::size_t>(K) + 1, 0);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    int pop = -1;
    std::size_t idx = 0;
    MfrPoint pt;
    if (std::sscanf(line.c_str(), "%d,%zu,%lf,%lf", &pop, &idx, &pt.m, &pt.r) != 4 || pop < 0 ||
        pop > K || idx >= n)
      fail(ErrorCode::Io, "matched pairs CSV: malformed row '" + line + "'");
    (pop == 0 ? p.bkg : p.tgt[static_cast<std::size_t>(pop - 1)])[idx] = pt;
    ++seen[static_cast<std::size_t>(pop)];
  }
  for (auto c : seen)
    if (c != n) fail(ErrorCode::Io, "matched pairs CSV: populations are incomplete");
  return p;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}
void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}
void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) fail(ErrorCode::Io, "matched pairs binary: truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) fail(ErrorCode::Io, "matched pairs binary: truncated");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_pairs_binary(std::ostream& os, const MatchedPairSet& pairs) {
  check_pairs_shape(pairs);
  os.write("SCMP", 4);
  put_u32(os, 1);
  put_f64(os, pairs.nu);
  put_u32(os, static_cast<std::uint32_t>(pairs.d));
  put_f64(os, pairs.sigma_t);
  put_u32(os, static_cast<std::uint32_t>(pairs.knots.size()));
  put_u64(os, pairs.size());
  auto emit = [&](const std::vector<MfrPoint>& pts) {
    for (const auto& p : pts) {
      put_f64(os, p.m);
      put_f64(os, p.r);
    }
  };
  emit(pairs.bkg);
  for (const auto& pop : pairs.tgt) emit(pop);
  if (!os) fail(ErrorCode::Io, "failed writing matched pairs binary");
}

MatchedPairSet read_pairs_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "SCMP")
    fail(ErrorCode::Io, "matched pairs binary: bad magic");
  if (get_u32(is) != 1) fail(ErrorCode::Io, "matched pairs binary: unsupported version");
  MatchedPairSet p;
  p.nu = get_f64(is);
  p.d = static_cast<int>(get_u32(is));
  p.sigma_t = get_f64(is);
  const auto K = get_u32(is);
  const auto n = get_u64(is);
  if (K < 1 || n == 0) fail(ErrorCode::Io, "matched pairs binary: empty set");
  p.knots = KnotGrid(static_cast<int>(K));
  auto read_pop = [&](std::vector<MfrPoint>& pts) {
    pts.resize(n);
    for (auto& pt : pts) {
      pt.m = get_f64(is);
      pt.r = get_f64(is);
    }
  };
  read_pop(p.bkg);
  p.tgt.resize(K);
  for (auto& pop : p.tgt) read_pop(pop);
  return p;
}

namespace {
bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
}  // namespace

void save_pairs(const std::string& path, const MatchedPairSet& pairs) {
  const bool csv = ends_with(path, ".csv");
  std::ofstream os(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  csv ? write_pairs_csv(os, pairs) : write_pairs_binary(os, pairs);
}

MatchedPairSet load_pairs(const std::string& path) {
  const bool csv = ends_with(path, ".csv");
  std::ifstream is(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open '" + path + "'");
  return csv ? read_pairs_csv(is) : read_pairs_binary(is);
}

}  // namespace sculptor
