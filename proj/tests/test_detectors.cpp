#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "detectors.hpp"
#include "error.hpp"
#include "oracles.hpp"
#include "roc.hpp"

using namespace sculptor;

namespace {

const DetectionModel kModel{3.0, 9, 3.0};

std::vector<MfrPoint> mixed_points(std::size_t n, double sigma, unsigned seed) {
  const auto b = TBackground::standard(3.0, 9);
  auto pts = sample_mfr(b, TargetSignature::along_first_axis(b, sigma), n, seed);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ua(0.0, 0.999);
  for (std::size_t i = 0; i < n; i += 2) pts[i] = implant_mfr(pts[i], ua(gen), sigma);
  return pts;
}

// Dense-grid maximum of log_lr over [0, 1 - 1e-6].
GlrtResult dense_glrt(MfrPoint p, const DetectionModel& m, int n) {
  GlrtResult best{log_lr(0.0, p, m), 0.0};
  for (int i = 1; i <= n; ++i) {
    const double a = (1.0 - 1e-6) * i / n;
    const double v = log_lr(a, p, m);
    if (v > best.score) best = {v, a};
  }
  return best;
}

}  // namespace

TEST_CASE("log_lr examples") {
  CHECK(log_lr(0.0, {1.3, 2.1}, kModel) == 0.0);
  CHECK_THROWS_AS(log_lr(1.0, {0.0, 1.0}, kModel), Error);
  CHECK_THROWS_AS(log_lr(-0.01, {0.0, 1.0}, kModel), Error);

  // Hand evaluation: d=1, nu=3, sigma=1, a=0.5, (m, r) = (1, 0):
  // -log(0.5) + 2 [log(2) - log(1 + 0.25/0.25)] = log 2.
  CHECK(log_lr(0.5, {1.0, 0.0}, DetectionModel{3.0, 1, 1.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("points on the target line score positive") {
  for (double sigma : {2.0, 3.0, 5.0, 20.0}) {
    const DetectionModel m{3.0, 9, sigma};
    double lowest = INFINITY;
    for (int i = 1; i < 100000; ++i) lowest = std::min(lowest, log_lr(i / 100000.0, {sigma, 0.0}, m));
    INFO("sigma=" << sigma);
    CHECK(lowest > 0.0);
  }
}

TEST_CASE("score matrix caches log_lr") {
  const auto pts = mixed_points(2000, 3.0, 1);
  const KnotGrid knots(7);
  const ScoreMatrix sm(pts, knots, kModel, "test");
  CHECK(sm.rows() == 2000);
  CHECK(sm.knots() == 7);
  CHECK(sm.provenance() == "test");
  for (std::size_t i = 0; i < sm.rows(); ++i) {
    double mx = -INFINITY;
    for (int k = 0; k < 7; ++k) {
      CHECK(sm.llr(i, k) == log_lr(knots[static_cast<std::size_t>(k)], pts[i], kModel));
      mx = std::max(mx, sm.llr(i, k));
    }
    CHECK(sm.row_max(i) == mx);
    CHECK(rglrt_score(sm.row(i)) == mx);
  }
  const ScoreMatrix one(pts, KnotGrid(1), kModel);
  for (std::size_t i = 0; i < one.rows(); ++i) CHECK(one.llr(i, 0) == log_lr(0.5, pts[i], kModel));
}

TEST_CASE("rglrt, bayes and maxq examples") {
  const std::vector<double> row{0.5, -1.0, 2.0, 1.5};
  CHECK(rglrt_score(row) == 2.0);
  const std::vector<double> shifted{3.5, 2.0, 5.0, 4.5};
  CHECK(rglrt_score(shifted) == rglrt_score(row) + 3.0);

  const std::vector<double> flat(5, -0.75);
  CHECK(bayes_score(flat, PriorWeights::uniform(5)) == doctest::Approx(-0.75).epsilon(1e-15));
  const std::vector<double> single{0.3};
  CHECK(bayes_score(single, PriorWeights::uniform(1)) == 0.3);

  const auto w = PriorWeights({0.1, 0.2, 0.3, 0.4});
  double direct = 0.0;
  for (std::size_t k = 0; k < 4; ++k) direct += w[k] * std::exp(row[k]);
  CHECK(bayes_score(row, w) == doctest::Approx(std::log(direct)).epsilon(1e-14));

  CHECK(maxq_score(row, PriorWeights::uniform(4)) == doctest::Approx(2.0 + std::log(0.25)).epsilon(1e-15));
  CHECK(maxq_score(row, PriorWeights::indicator(4, 1)) == -1.0);
  CHECK(maxq_score(row, w) <= rglrt_score(row));

  // Extreme values stay finite through log-sum-exp.
  const std::vector<double> big{800.0, 799.0};
  CHECK(bayes_score(big, PriorWeights::uniform(2)) == doctest::Approx(800.0 + std::log(0.5 * (1 + std::exp(-1.0)))));
  const std::vector<double> tiny{-800.0, -1000.0};
  CHECK(std::isfinite(bayes_score(tiny, PriorWeights::uniform(2))));
  CHECK_THROWS_AS(bayes_score(row, PriorWeights::uniform(3)), Error);
}

TEST_CASE("glrt examples") {
  // Background-typical point: m small relative to sigma.
  const GlrtResult null = glrt({0.0, 3.0}, kModel);
  CHECK(null.score >= 0.0);
  CHECK(null.score < 1e-6);
  CHECK(null.argmax < 1e-3);

  const DetectionModel m{3.0, 9, 5.0};
  for (double a0 : {0.2, 0.5, 0.8}) {
    const MfrPoint p = implant_mfr({0.0, 0.0}, a0, m.sigma_t);
    const GlrtResult g = glrt(p, m);
    const GlrtResult dense = dense_glrt(p, m, 100000);
    CHECK(std::abs(g.argmax - dense.argmax) < 1e-3);
    CHECK(g.score >= dense.score - 1e-12);
  }
}

TEST_CASE("glrt matches a dense grid and a fine restricted max") {
  const auto pts = mixed_points(300, 3.0, 4);
  const KnotGrid fine(10000);
  for (const MfrPoint& p : pts) {
    const GlrtResult g = glrt(p, kModel);
    const GlrtResult dense = dense_glrt(p, kModel, 100000);
    CHECK(g.score >= dense.score - 1e-12);
    CHECK(g.score <= dense.score + 1e-6 * (1.0 + std::abs(dense.score)));
    double fine_max = -INFINITY;
    for (int k = 0; k < fine.size(); ++k) fine_max = std::max(fine_max, log_lr(fine[static_cast<std::size_t>(k)], p, kModel));
    CHECK(g.score >= fine_max - 1e-12);
    CHECK(glrt_score(p, kModel) == g.score);
  }
}

TEST_CASE("ordering chain bayes <= rglrt <= glrt") {
  const auto pts = mixed_points(20000, 3.0, 9);
  for (int K : {1, 5, 20}) {
    const ScoreMatrix sm(pts, KnotGrid(K), kModel);
    std::mt19937_64 gen(static_cast<unsigned>(K));
    std::exponential_distribution<double> ex;
    std::vector<double> raw(static_cast<std::size_t>(K));
    for (auto& v : raw) v = ex(gen);
    const auto w = PriorWeights::normalized(raw);
    const auto g = glrt_scores(pts, kModel);
    int violations = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double b = bayes_score(sm.row(i), w);
      const double r = rglrt_score(sm.row(i));
      violations += b > r + 1e-12;
      violations += r > g[i] + 1e-12;
      violations += maxq_score(sm.row(i), w) > r + 1e-12;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("bulk scores are bit-identical to scalar scores") {
  const auto pts = mixed_points(5000, 2.0, 2);
  const KnotGrid knots(6);
  const DetectionModel m{3.0, 9, 2.0};
  const ScoreMatrix sm(pts, knots, m);
  const auto w = PriorWeights({0.05, 0.3, 0.0, 0.25, 0.15, 0.25});
  std::vector<double> bayes(sm.rows()), rglrt(sm.rows()), clair(sm.rows()), maxq(sm.rows());
  bayes_scores(sm, w, bayes);
  rglrt_scores(sm, rglrt);
  clairvoyant_scores(sm, 3, clair);
  maxq_scores(sm, w, maxq);
  for (std::size_t i = 0; i < sm.rows(); ++i) {
    CHECK(bayes[i] == bayes_score(sm.row(i), w));
    CHECK(rglrt[i] == rglrt_score(sm.row(i)));
    CHECK(clair[i] == log_lr(knots[3], pts[i], m));
    CHECK(maxq[i] == maxq_score(sm.row(i), w));
  }
}

TEST_CASE("monotone transforms leave ROC statistics unchanged") {
  const auto b = TBackground::standard(3.0, 9);
  const auto sig = TargetSignature::along_first_axis(b, 2.0);
  const auto pairs = make_matched_pairs(b, sig, KnotGrid(3), 20000, 5);
  const DetectionModel m = DetectionModel::of(pairs);
  const ScoreMatrix sb(pairs.bkg, pairs.knots, m), st(pairs.tgt[1], pairs.knots, m);
  std::vector<double> bs(sb.rows()), ts(st.rows());
  rglrt_scores(sb, bs);
  rglrt_scores(st, ts);
  auto tb = bs, tt = ts;
  for (auto& v : tb) v = std::exp(0.5 * v);
  for (auto& v : tt) v = std::exp(0.5 * v);
  const ScorePair log_sp(bs, ts), exp_sp(tb, tt);
  for (const auto& stat : {RocStatistic::one_minus_dr_at_far(0.05), RocStatistic::far_at_dr(0.5), RocStatistic::one_minus_auc()})
    CHECK(evaluate(stat, log_sp) == evaluate(stat, exp_sp));
}
