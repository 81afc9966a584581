#include "roc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "error.hpp"

namespace sculptor {

namespace {

void check_fraction(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) {
    std::ostringstream os;
    os << what << " must lie strictly inside (0, 1), got " << x;
    fail(ErrorCode::Parameter, os.str());
  }
}

std::string format_param(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::size_t count_above(std::span<const double> v, double eta) {
  std::size_t c = 0;
  for (double s : v) c += s > eta;
  return c;
}

double kth_largest_inplace(std::span<double> v, std::size_t k) {
  auto nth = v.begin() + static_cast<std::ptrdiff_t>(v.size() - k);
  std::nth_element(v.begin(), nth, v.end());
  return *nth;
}

// sum over pairs of 2[t > b] + [t = b], both arrays sorted ascending.
std::uint64_t twice_mann_whitney(std::span<const double> bkg, std::span<const double> tgt) {
  std::uint64_t total = 0;
  std::size_t below = 0, upto = 0;
  for (double t : tgt) {
    while (below < bkg.size() && bkg[below] < t) ++below;
    if (upto < below) upto = below;
    while (upto < bkg.size() && bkg[upto] <= t) ++upto;
    total += 2 * static_cast<std::uint64_t>(below) + (upto - below);
  }
  return total;
}

void check_nonempty(std::size_t nb, std::size_t nt) {
  if (nb == 0 || nt == 0) fail(ErrorCode::Evaluation, "ROC evaluation needs non-empty score arrays");
}

}  // namespace

RocStatistic RocStatistic::one_minus_dr_at_far(double far) {
  check_fraction(far, "FAR");
  return {StatKind::OneMinusDrAtFar, far};
}

RocStatistic RocStatistic::far_at_dr(double dr) {
  check_fraction(dr, "DR");
  return {StatKind::FarAtDr, dr};
}

RocStatistic RocStatistic::one_minus_auc() { return {StatKind::OneMinusAuc, 0.0}; }

RocStatistic RocStatistic::parse(std::string_view text) {
  auto param_of = [&](std::string_view prefix) {
    const auto rest = text.substr(prefix.size());
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), x);
    if (ec != std::errc{} || ptr != rest.data() + rest.size())
      fail(ErrorCode::Config, "bad statistic parameter in '" + std::string(text) + "'");
    return x;
  };
  if (text == "auc") return one_minus_auc();
  if (text.starts_with("dr@far:")) return one_minus_dr_at_far(param_of("dr@far:"));
  if (text.starts_with("far@dr:")) return far_at_dr(param_of("far@dr:"));
  fail(ErrorCode::Config,
       "unknown statistic '" + std::string(text) + "' (expected dr@far:<x>, far@dr:<x> or auc)");
}

std::string RocStatistic::name() const {
  switch (kind_) {
    case StatKind::OneMinusDrAtFar: return "dr@far:" + format_param(param_);
    case StatKind::FarAtDr: return "far@dr:" + format_param(param_);
    case StatKind::OneMinusAuc: return "auc";
  }
  return {};
}

std::string RocStatistic::label() const {
  switch (kind_) {
    case StatKind::OneMinusDrAtFar: return "1-DR@FAR=" + format_param(param_);
    case StatKind::FarAtDr: return "FAR@DR=" + format_param(param_);
    case StatKind::OneMinusAuc: return "1-AUC";
  }
  return {};
}

std::string RocStatistic::tag() const {
  switch (kind_) {
    case StatKind::OneMinusDrAtFar: return "dr_at_far_" + format_param(param_);
    case StatKind::FarAtDr: return "far_at_dr_" + format_param(param_);
    case StatKind::OneMinusAuc: return "auc";
  }
  return {};
}

ScorePair::ScorePair(std::vector<double> bkg, std::vector<double> tgt)
  : bkg_(std::move(bkg)), tgt_(std::move(tgt)) {
  check_nonempty(bkg_.size(), tgt_.size());
  auto has_nan = [](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double s) { return std::isnan(s); });
  };
  if (has_nan(bkg_) || has_nan(tgt_)) fail(ErrorCode::Evaluation, "NaN detector score");
  std::sort(bkg_.begin(), bkg_.end());
}

std::size_t threshold_rank(std::size_t n, double x) {
  // Shave a relative 1e-12 so products like 100 * 0.07 = 7.000000000000001
  // keep their intended integer rank.
  const double raw = std::ceil(static_cast<double>(n) * x * (1.0 - 1e-12));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n);
}

double dr_at_far(const ScorePair& sp, double far) {
  check_fraction(far, "FAR");
  const auto bkg = sp.bkg();
  const double eta = bkg[bkg.size() - threshold_rank(bkg.size(), far)];
  return static_cast<double>(count_above(sp.tgt(), eta)) / static_cast<double>(sp.tgt().size());
}

double far_at_dr(const ScorePair& sp, double dr) {
  check_fraction(dr, "DR");
  std::vector<double> tgt(sp.tgt().begin(), sp.tgt().end());
  const double eta = kth_largest_inplace(tgt, threshold_rank(tgt.size(), dr));
  const auto bkg = sp.bkg();
  const auto above = bkg.end() - std::upper_bound(bkg.begin(), bkg.end(), eta);
  return static_cast<double>(above) / static_cast<double>(bkg.size());
}

double auc(const ScorePair& sp) {
  std::vector<double> tgt(sp.tgt().begin(), sp.tgt().end());
  std::sort(tgt.begin(), tgt.end());
  const double pairs = 2.0 * static_cast<double>(sp.bkg().size()) * static_cast<double>(tgt.size());
  return static_cast<double>(twice_mann_whitney(sp.bkg(), tgt)) / pairs;
}

double evaluate(const RocStatistic& stat, const ScorePair& sp) {
  switch (stat.kind()) {
    case StatKind::OneMinusDrAtFar: return 1.0 - dr_at_far(sp, stat.param());
    case StatKind::FarAtDr: return far_at_dr(sp, stat.param());
    case StatKind::OneMinusAuc: return 1.0 - auc(sp);
  }
  fail(ErrorCode::Internal, "unhandled statistic");
}

std::vector<double> evaluate_many(const RocStatistic& stat, std::span<double> bkg,
                                  std::span<const std::span<double>> tgts) {
  check_nonempty(bkg.size(), tgts.empty() ? 1 : tgts.front().size());
  std::vector<double> out;
  out.reserve(tgts.size());
  const auto nb = static_cast<double>(bkg.size());
  switch (stat.kind()) {
    case StatKind::OneMinusDrAtFar: {
      const double eta = kth_largest_inplace(bkg, threshold_rank(bkg.size(), stat.param()));
      for (auto t : tgts) {
        check_nonempty(bkg.size(), t.size());
        out.push_back(1.0 - static_cast<double>(count_above(t, eta)) / static_cast<double>(t.size()));
      }
      break;
    }
    case StatKind::FarAtDr:
      for (auto t : tgts) {
        check_nonempty(bkg.size(), t.size());
        const double eta = kth_largest_inplace(t, threshold_rank(t.size(), stat.param()));
        out.push_back(static_cast<double>(count_above(bkg, eta)) / nb);
      }
      break;
    case StatKind::OneMinusAuc:
      std::sort(bkg.begin(), bkg.end());
      for (auto t : tgts) {
        check_nonempty(bkg.size(), t.size());
        std::sort(t.begin(), t.end());
        const double pairs = 2.0 * nb * static_cast<double>(t.size());
        out.push_back(1.0 - static_cast<double>(twice_mann_whitney(bkg, t)) / pairs);
      }
      break;
  }
  return out;
}

double standard_error(const RocStatistic& stat, double value, std::size_t n_bkg, std::size_t n_tgt) {
  const auto nb = static_cast<double>(n_bkg);
  const auto nt = static_cast<double>(n_tgt);
  switch (stat.kind()) {
    case StatKind::OneMinusDrAtFar: {
      const double p = std::clamp(1.0 - value, 0.0, 1.0);
      return std::sqrt(p * (1.0 - p) / nt);
    }
    case StatKind::FarAtDr: {
      const double p = std::clamp(value, 0.0, 1.0);
      return std::sqrt(p * (1.0 - p) / nb);
    }
    case StatKind::OneMinusAuc: {
      const double a = std::clamp(1.0 - value, 0.0, 1.0);
      const double q1 = a / (2.0 - a);
      const double q2 = 2.0 * a * a / (1.0 + a);
      const double var = (a * (1.0 - a) + (nt - 1.0) * (q1 - a * a) + (nb - 1.0) * (q2 - a * a)) / (nt * nb);
      return std::sqrt(std::max(0.0, var));
    }
  }
  return 0.0;
}

std::vector<RocPoint> roc_curve(const ScorePair& sp) {
  std::vector<double> tgt(sp.tgt().begin(), sp.tgt().end());
  std::sort(tgt.begin(), tgt.end());
  const auto bkg = sp.bkg();
  const auto nb = static_cast<double>(bkg.size());
  const auto nt = static_cast<double>(tgt.size());

  std::vector<double> values(bkg.begin(), bkg.end());
  values.insert(values.end(), tgt.begin(), tgt.end());
  std::sort(values.begin(), values.end(), std::greater<>());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  std::vector<RocPoint> curve;
  curve.reserve(values.size() + 1);
  for (double eta : values) {
    const auto fa = bkg.end() - std::upper_bound(bkg.begin(), bkg.end(), eta);
    const auto de = tgt.end() - std::upper_bound(tgt.begin(), tgt.end(), eta);
    curve.push_back({eta, static_cast<double>(fa) / nb, static_cast<double>(de) / nt});
  }
  curve.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
  return curve;
}

void write_roc_csv(std::ostream& os, std::span<const RocPoint> curve) {
  os << "threshold,far,dr\n";
  char buf[96];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.threshold, p.far, p.dr);
    os << buf;
  }
}

}  // namespace sculptor
