#include "sculpt.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace sculptor {

namespace {

std::vector<ScoreMatrix> score_targets(const MatchedPairSet& pairs) {
  std::vector<ScoreMatrix> out;
  out.reserve(pairs.tgt.size());
  const auto model = DetectionModel::of(pairs);
  for (std::size_t k = 0; k < pairs.tgt.size(); ++k)
    out.emplace_back(pairs.tgt[k], pairs.knots, model, "tgt[" + std::to_string(k) + "]");
  return out;
}

void check_baseline(std::span<const double> baseline, std::size_t K) {
  if (baseline.size() != K) fail(ErrorCode::Dimension, "RGLRT baseline length does not match knot count");
}

std::vector<std::span<double>> spans_of(std::vector<std::vector<double>>& bufs) {
  return {bufs.begin(), bufs.end()};
}

}  // namespace

PairScores::PairScores(const MatchedPairSet& pairs)
  : bkg_(pairs.bkg, pairs.knots, DetectionModel::of(pairs), "bkg"), tgt_(score_targets(pairs)) {}

std::vector<double> rglrt_baseline(const PairScores& scores, const RocStatistic& stat) {
  std::vector<double> bkg(scores.pairs());
  rglrt_scores(scores.bkg(), bkg);
  std::vector<std::vector<double>> tgt(static_cast<std::size_t>(scores.knots()),
                                       std::vector<double>(scores.pairs()));
  for (int k = 0; k < scores.knots(); ++k) rglrt_scores(scores.tgt(k), tgt[static_cast<std::size_t>(k)]);
  const auto spans = spans_of(tgt);
  return evaluate_many(stat, bkg, spans);
}

std::vector<double> rglrt_baseline_direct(const MatchedPairSet& pairs, const RocStatistic& stat) {
  const auto model = DetectionModel::of(pairs);
  const auto K = static_cast<std::size_t>(pairs.knots.size());
  auto score = [&](const std::vector<MfrPoint>& pts) {
    std::vector<double> out(pts.size()), row(K);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t k = 0; k < K; ++k) row[k] = log_lr(pairs.knots[k], pts[i], model);
      out[i] = rglrt_score(row);
    }
    return out;
  };
  std::vector<double> bkg = score(pairs.bkg);
  std::vector<std::vector<double>> tgt;
  for (const auto& pop : pairs.tgt) tgt.push_back(score(pop));
  const auto spans = spans_of(tgt);
  return evaluate_many(stat, bkg, spans);
}

LossReport loss_from_scores(const RocStatistic& stat, std::span<double> bkg_scores,
                            std::span<const std::span<double>> tgt_scores,
                            std::span<const double> baseline) {
  check_baseline(baseline, tgt_scores.size());
  LossReport rep;
  rep.per_knot = evaluate_many(stat, bkg_scores, tgt_scores);
  for (std::size_t k = 0; k < rep.per_knot.size(); ++k) rep.per_knot[k] -= baseline[k];
  const auto it = std::max_element(rep.per_knot.begin(), rep.per_knot.end());
  rep.argmax_knot = static_cast<int>(it - rep.per_knot.begin());
  rep.loss = *it;
  return rep;
}

LossEvaluator::LossEvaluator(const PairScores& scores, const RocStatistic& stat,
                             std::vector<double> baseline)
  : scores_(scores), stat_(stat), baseline_(std::move(baseline)),
    bkg_buf_(scores.pairs()),
    tgt_buf_(static_cast<std::size_t>(scores.knots()), std::vector<double>(scores.pairs())) {
  check_baseline(baseline_, static_cast<std::size_t>(scores.knots()));
}

LossReport LossEvaluator::operator()(const PriorWeights& w) {
  bayes_scores(scores_.bkg(), w, bkg_buf_);
  for (int k = 0; k < scores_.knots(); ++k) bayes_scores(scores_.tgt(k), w, tgt_buf_[static_cast<std::size_t>(k)]);
  const auto spans = spans_of(tgt_buf_);
  return loss_from_scores(stat_, bkg_buf_, spans, baseline_);
}

LossReport bayes_loss(const PriorWeights& w, const PairScores& scores, const RocStatistic& stat,
                      std::span<const double> baseline) {
  LossEvaluator eval(scores, stat, {baseline.begin(), baseline.end()});
  return eval(w);
}

LossReport bayes_loss_direct(const PriorWeights& w, const MatchedPairSet& pairs,
                             const RocStatistic& stat, std::span<const double> baseline) {
  const auto model = DetectionModel::of(pairs);
  const auto K = static_cast<std::size_t>(pairs.knots.size());
  auto score = [&](const std::vector<MfrPoint>& pts) {
    std::vector<double> out(pts.size()), row(K);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t k = 0; k < K; ++k) row[k] = log_lr(pairs.knots[k], pts[i], model);
      out[i] = bayes_score(row, w);
    }
    return out;
  };
  std::vector<double> bkg = score(pairs.bkg);
  std::vector<std::vector<double>> tgt;
  for (const auto& pop : pairs.tgt) tgt.push_back(score(pop));
  const auto spans = spans_of(tgt);
  return loss_from_scores(stat, bkg, spans, baseline);
}

double success_tolerance(const RocStatistic& stat, std::span<const double> baseline, int k,
                         std::size_t n_pairs, double se_mult) {
  if (k < 0 || static_cast<std::size_t>(k) >= baseline.size())
    fail(ErrorCode::Parameter, "knot index out of range");
  return se_mult * standard_error(stat, baseline[static_cast<std::size_t>(k)], n_pairs, n_pairs);
}

void babystep_update(std::vector<double>& w, int k_star, double step) {
  w[static_cast<std::size_t>(k_star)] += step;
  for (double& v : w) v /= 1.0 + step;
}

SculptResult babysteps(LossEvaluator& eval, const BabystepsOptions& opt, std::optional<PriorWeights> init) {
  if (!(opt.step > 0.0)) fail(ErrorCode::Parameter, "babysteps step must be positive");
  if (opt.iters < 1) fail(ErrorCode::Parameter, "babysteps needs at least one iteration");
  const int K = eval.scores().knots();
  PriorWeights current = init ? *init : PriorWeights::uniform(K);
  if (current.size() != K) fail(ErrorCode::Dimension, "initial prior does not match knot count");

  SculptResult res;
  res.step = opt.step;
  res.iterations = opt.iters;
  res.rglrt_baseline = eval.baseline();
  res.trajectory.reserve(static_cast<std::size_t>(opt.iters) + 1);

  std::vector<double> w(current.values().begin(), current.values().end());
  for (int it = 0;; ++it) {
    PriorWeights pw(w);
    LossReport rep = eval(pw);
    res.trajectory.push_back(rep.loss);
    if (it == 0 || rep.loss < res.final.loss) {
      res.weights = pw;
      res.final = rep;
    }
    if (it == opt.iters) break;
    babystep_update(w, rep.argmax_knot, opt.step);
  }
  res.tolerance = success_tolerance(eval.statistic(), res.rglrt_baseline, res.final.argmax_knot,
                                    eval.scores().pairs(), opt.se_mult);
  res.success = res.final.loss <= res.tolerance;
  return res;
}

SculptResult babysteps(const PairScores& scores, const RocStatistic& stat, const BabystepsOptions& opt) {
  LossEvaluator eval(scores, stat, rglrt_baseline(scores, stat));
  return babysteps(eval, opt);
}

SculptResult random_restart_babysteps(LossEvaluator& eval, const BabystepsOptions& opt, int restarts,
                                      std::uint64_t seed) {
  if (restarts < 1) fail(ErrorCode::Parameter, "restarts must be at least 1");
  SculptResult best = babysteps(eval, opt);
  Rng rng = make_rng(seed, Stream::Restart);
  std::exponential_distribution<double> expo(1.0);
  const int K = eval.scores().knots();
  for (int r = 1; r < restarts; ++r) {
    std::vector<double> w(static_cast<std::size_t>(K));
    for (double& v : w) v = expo(rng);
    SculptResult cand = babysteps(eval, opt, PriorWeights::normalized(std::move(w)));
    if (cand.final.loss < best.final.loss) best = std::move(cand);
  }
  return best;
}

}  // namespace sculptor
