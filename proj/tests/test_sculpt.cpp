#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "error.hpp"
#include "sculpt.hpp"

using namespace sculptor;

namespace {

MatchedPairSet pairs_for(int K, std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  const auto b = TBackground::standard(3.0, 9);
  return make_matched_pairs(b, TargetSignature::along_first_axis(b, sigma), KnotGrid(K), n, seed);
}

double sum(std::span<const double> w) { return std::accumulate(w.begin(), w.end(), 0.0); }

}  // namespace

TEST_CASE("babystep update arithmetic") {
  std::vector<double> w{0.5, 0.5};
  babystep_update(w, 0, 0.01);
  CHECK(w[0] == doctest::Approx(0.504950).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(0.495050).epsilon(1e-6));
  CHECK(w[0] == 0.51 / 1.01);
  CHECK(w[1] == 0.5 / 1.01);
}

TEST_CASE("update raises the chosen knot and keeps the simplex") {
  std::vector<double> w(7, 1.0 / 7.0);
  for (int it = 0; it < 5000; ++it) {
    const int k = (it * 5 + it / 3) % 7;
    const auto before = w;
    babystep_update(w, k, 0.01);
    CHECK(w[static_cast<std::size_t>(k)] > before[static_cast<std::size_t>(k)]);
    for (std::size_t j = 0; j < w.size(); ++j) {
      CHECK(w[j] >= 0.0);
      if (j != static_cast<std::size_t>(k) && before[j] > 0.0) CHECK(w[j] < before[j]);
    }
    CHECK(std::abs(sum(w) - 1.0) <= 1e-12);
  }
}

TEST_CASE("K=1 has zero loss exactly") {
  const auto pairs = pairs_for(1, 20000, 3);
  const PairScores scores(pairs);
  for (const auto& stat : {RocStatistic::one_minus_dr_at_far(0.05), RocStatistic::far_at_dr(0.5), RocStatistic::one_minus_auc()}) {
    const auto base = rglrt_baseline(scores, stat);
    const auto rep = bayes_loss(PriorWeights::uniform(1), scores, stat, base);
    REQUIRE(rep.per_knot.size() == 1);
    CHECK(rep.per_knot[0] == 0.0);
    CHECK(rep.loss == 0.0);
    const auto res = babysteps(scores, stat, BabystepsOptions{0.01, 20, 2.0});
    CHECK(res.weights[0] == 1.0);
    CHECK(res.final.loss == 0.0);
    CHECK(res.success);
  }
}

TEST_CASE("cached and direct computations are bit-identical") {
  const auto pairs = pairs_for(5, 20000, 4);
  const PairScores scores(pairs);
  for (const auto& stat : {RocStatistic::one_minus_dr_at_far(0.05), RocStatistic::far_at_dr(0.5), RocStatistic::one_minus_auc()}) {
    const auto base = rglrt_baseline(scores, stat);
    CHECK(base == rglrt_baseline_direct(pairs, stat));
    LossEvaluator eval(scores, stat, base);
    for (const auto& w : {PriorWeights::uniform(5), PriorWeights({0.1, 0.0, 0.3, 0.4, 0.2}), PriorWeights::indicator(5, 4)}) {
      const auto cached = eval(w);
      const auto fresh = bayes_loss(w, scores, stat, base);
      const auto direct = bayes_loss_direct(w, pairs, stat, base);
      CHECK(cached.per_knot == fresh.per_knot);
      CHECK(cached.per_knot == direct.per_knot);
      CHECK(cached.loss == direct.loss);
      CHECK(cached.argmax_knot == direct.argmax_knot);
      CHECK(cached.loss == *std::max_element(cached.per_knot.begin(), cached.per_knot.end()));
    }
  }
}

TEST_CASE("loss is the max of the per-knot losses with first-index ties") {
  std::vector<double> bkg{1.0, 2.0, 3.0, 4.0};
  std::vector<double> t0{5.0, 6.0, 7.0, 8.0}, t1{5.0, 6.0, 7.0, 8.0};
  std::vector<std::span<double>> tgts{t0, t1};
  const std::vector<double> base{0.0, 0.0};
  const auto rep = loss_from_scores(RocStatistic::one_minus_auc(), bkg, tgts, base);
  CHECK(rep.per_knot == std::vector<double>{0.0, 0.0});
  CHECK(rep.argmax_knot == 0);
}

TEST_CASE("identical bayes and rglrt scores give zero loss for any weights") {
  const auto pairs = pairs_for(4, 5000, 6);
  const PairScores scores(pairs);
  const auto stat = RocStatistic::one_minus_dr_at_far(0.05);
  const auto base = rglrt_baseline(scores, stat);
  std::vector<double> bkg(scores.pairs());
  rglrt_scores(scores.bkg(), bkg);
  std::vector<std::vector<double>> tgt(4, std::vector<double>(scores.pairs()));
  std::vector<std::span<double>> spans;
  for (int k = 0; k < 4; ++k) {
    rglrt_scores(scores.tgt(k), tgt[static_cast<std::size_t>(k)]);
    spans.emplace_back(tgt[static_cast<std::size_t>(k)]);
  }
  const auto rep = loss_from_scores(stat, bkg, spans, base);
  for (double v : rep.per_knot) CHECK(v == 0.0);
}

TEST_CASE("babysteps bookkeeping") {
  const auto pairs = pairs_for(5, 20000, 7);
  const PairScores scores(pairs);
  const auto stat = RocStatistic::one_minus_dr_at_far(0.05);
  const BabystepsOptions opt{0.01, 60, 2.0};
  const auto res = babysteps(scores, stat, opt);
  CHECK(res.iterations == 60);
  CHECK(res.step == 0.01);
  REQUIRE(res.trajectory.size() == 61);
  CHECK(res.trajectory.front() == bayes_loss(PriorWeights::uniform(5), scores, stat, res.rglrt_baseline).loss);
  // Best iterate, not the last.
  CHECK(res.final.loss == *std::min_element(res.trajectory.begin(), res.trajectory.end()));
  // Reported loss reproduces from the reported weights.
  const auto again = bayes_loss(res.weights, scores, stat, res.rglrt_baseline);
  CHECK(again.loss == res.final.loss);
  CHECK(again.per_knot == res.final.per_knot);
  CHECK(std::abs(sum(res.weights.values()) - 1.0) <= 1e-12);
  CHECK(res.tolerance == success_tolerance(stat, res.rglrt_baseline, res.final.argmax_knot, 20000, 2.0));
  CHECK(res.success == (res.final.loss <= res.tolerance));

  const auto twice = babysteps(scores, stat, opt);
  CHECK(twice.trajectory == res.trajectory);
  CHECK(std::equal(twice.weights.values().begin(), twice.weights.values().end(), res.weights.values().begin()));
}

TEST_CASE("random restarts") {
  const auto pairs = pairs_for(5, 10000, 8);
  const PairScores scores(pairs);
  const auto stat = RocStatistic::far_at_dr(0.5);
  LossEvaluator eval(scores, stat, rglrt_baseline(scores, stat));
  const BabystepsOptions opt{0.01, 30, 2.0};

  const auto plain = babysteps(eval, opt);
  const auto one = random_restart_babysteps(eval, opt, 1, 99);
  CHECK(one.trajectory == plain.trajectory);
  CHECK(one.final.loss == plain.final.loss);

  double prev = one.final.loss;
  for (int r = 2; r <= 5; ++r) {
    const auto res = random_restart_babysteps(eval, opt, r, 99);
    CHECK(res.final.loss <= prev);
    prev = res.final.loss;
    const auto rep = random_restart_babysteps(eval, opt, r, 99);
    CHECK(rep.final.loss == res.final.loss);
  }
  CHECK_THROWS_AS(random_restart_babysteps(eval, opt, 0, 1), Error);
}

TEST_CASE("options are validated") {
  const auto pairs = pairs_for(3, 1000, 1);
  const PairScores scores(pairs);
  const auto stat = RocStatistic::one_minus_auc();
  CHECK_THROWS_AS(babysteps(scores, stat, BabystepsOptions{0.0, 10, 2.0}), Error);
  CHECK_THROWS_AS(babysteps(scores, stat, BabystepsOptions{0.01, 0, 2.0}), Error);
  LossEvaluator eval(scores, stat, rglrt_baseline(scores, stat));
  CHECK_THROWS_AS(eval(PriorWeights::uniform(4)), Error);
}

TEST_CASE("success tolerance") {
  const std::vector<double> base{0.9, 0.5, 0.1};
  CHECK(success_tolerance(RocStatistic::one_minus_dr_at_far(0.05), base, 1, 1000000, 2.0) ==
        doctest::Approx(2.0 * std::sqrt(0.25 / 1e6)));
  CHECK(success_tolerance(RocStatistic::one_minus_dr_at_far(0.05), base, 2, 10000, 3.0) ==
        doctest::Approx(3.0 * std::sqrt(0.09 / 1e4)));
}
