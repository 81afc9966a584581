#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace sculptor {

namespace {

constexpr double kCalibLow = 0.5;
constexpr double kCalibHigh = 50.0;
constexpr int kCalibMaxSteps = 200;
constexpr std::uint64_t kCalibSeedOffset = 0x9E3779B97F4A7C15ULL;

std::vector<double> column(const ScoreMatrix& sm, int k) {
  std::vector<double> out(sm.rows());
  clairvoyant_scores(sm, k, out);
  return out;
}

double evaluate_one(const RocStatistic& stat, std::vector<double> bkg, std::vector<double> tgt) {
  std::span<double> t(tgt);
  return evaluate_many(stat, bkg, std::span<const std::span<double>>(&t, 1)).front();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void report(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

}  // namespace

const std::vector<double>& DetectorComparison::operator[](const std::string& name) const {
  if (name == "clairvoyant") return clairvoyant;
  if (name == "glrt") return glrt;
  if (name == "rglrt") return rglrt;
  if (name == "bayes") return bayes;
  fail(ErrorCode::Parameter, "unknown detector '" + name + "'");
}

double clairvoyant_detection_rate(const ExperimentConfig& config, double sigma_t, double a, double far,
                                  std::size_t n, std::uint64_t seed) {
  const auto bkg = TBackground::standard(config.nu, config.dim);
  // With s along the first axis, (m, r) of a background pixel do not depend
  // on sigma_t.
  const auto sig = TargetSignature::along_first_axis(bkg, sigma_t);
  const auto pts = sample_mfr(bkg, sig, n, seed);
  const DetectionModel model{config.nu, config.dim, sigma_t};
  std::vector<double> b(n), t(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = log_lr(a, pts[i], model);
    t[i] = log_lr(a, implant_mfr(pts[i], a, sigma_t), model);
  }
  return dr_at_far(ScorePair(std::move(b), std::move(t)), far);
}

double calibrate(const ExperimentConfig& config, CalibrationReport* out) {
  config.validate();
  const KnotGrid knots(config.knots.front());
  const double a = knots[knots.middle()];
  const auto bkg = TBackground::standard(config.nu, config.dim);
  const auto pts = sample_mfr(bkg, TargetSignature::along_first_axis(bkg, 1.0), config.calib_pairs,
                              config.seed + kCalibSeedOffset);

  CalibrationReport rep;
  rep.abundance = a;
  auto probe = [&](double sigma) {
    const DetectionModel model{config.nu, config.dim, sigma};
    std::vector<double> b(pts.size()), t(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      b[i] = log_lr(a, pts[i], model);
      t[i] = log_lr(a, implant_mfr(pts[i], a, sigma), model);
    }
    const double dr = dr_at_far(ScorePair(std::move(b), std::move(t)), config.calib_far);
    rep.probes.emplace_back(sigma, dr);
    return dr;
  };
  auto inside = [&](double dr) { return dr >= config.calib_low && dr <= config.calib_high; };
  auto finish = [&](double sigma, double dr) {
    rep.sigma_t = sigma;
    rep.detection_rate = dr;
    if (out) *out = rep;
    return sigma;
  };
  auto diagnostics = [&] {
    std::ostringstream os;
    os << " (abundance " << a << ", probes:";
    for (const auto& [s, dr] : rep.probes) os << " sigma_t=" << s << "->DR=" << dr;
    os << ")";
    return os.str();
  };

  // The endpoints only validate the bracket; the answer is always a midpoint.
  double lo = kCalibLow, hi = kCalibHigh;
  const double dr_lo = probe(lo);
  const double dr_hi = probe(hi);
  if (dr_lo > config.calib_high || dr_hi < config.calib_low)
    fail(ErrorCode::Calibration, "target-norm bracket [0.5, 50] does not straddle the DR band" + diagnostics());
  for (int step = 0; step < kCalibMaxSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double dr = probe(mid);
    if (inside(dr)) return finish(mid, dr);
    (dr < config.calib_low ? lo : hi) = mid;
  }
  fail(ErrorCode::Calibration, "bisection did not reach the DR band" + diagnostics());
}

DetectorComparison compare_detectors_on(const PairScores& scores, const RocStatistic& stat,
                                        const PriorWeights& w,
                                        const std::vector<std::vector<double>>& glrt_scores) {
  const int K = scores.knots();
  const std::size_t n = scores.pairs();
  DetectorComparison cmp;
  for (int k = 0; k < K; ++k)
    cmp.clairvoyant.push_back(evaluate_one(stat, column(scores.bkg(), k), column(scores.tgt(k), k)));

  cmp.rglrt = rglrt_baseline(scores, stat);

  std::vector<double> bkg(n);
  std::vector<std::vector<double>> tgt(static_cast<std::size_t>(K), std::vector<double>(n));
  bayes_scores(scores.bkg(), w, bkg);
  for (int k = 0; k < K; ++k) bayes_scores(scores.tgt(k), w, tgt[static_cast<std::size_t>(k)]);
  {
    std::vector<std::span<double>> spans(tgt.begin(), tgt.end());
    cmp.bayes = evaluate_many(stat, bkg, spans);
  }

  if (!glrt_scores.empty()) {
    if (glrt_scores.size() != static_cast<std::size_t>(K) + 1)
      fail(ErrorCode::Dimension, "GLRT scores must cover background and every knot");
    bkg = glrt_scores[0];
    for (int k = 0; k < K; ++k) tgt[static_cast<std::size_t>(k)] = glrt_scores[static_cast<std::size_t>(k) + 1];
    std::vector<std::span<double>> spans(tgt.begin(), tgt.end());
    cmp.glrt = evaluate_many(stat, bkg, spans);
  }
  return cmp;
}

AggregateResult aggregate(const std::vector<TrialResult>& trials, int K) {
  AggregateResult agg;
  const auto Kz = static_cast<std::size_t>(K);
  std::vector<const TrialResult*> ok;
  for (const auto& t : trials) (t.ok() ? ok.push_back(&t) : void(++agg.trials_failed));
  agg.trials_ok = static_cast<int>(ok.size());
  if (ok.empty()) return agg;

  // Fixed-order reductions: trials in index order.
  auto mean_se = [&](auto&& value, std::vector<double>& mean, std::vector<double>& se) {
    mean.assign(Kz, 0.0);
    se.assign(Kz, 0.0);
    const auto n = static_cast<double>(ok.size());
    for (std::size_t k = 0; k < Kz; ++k) {
      double s = 0.0;
      for (const auto* t : ok) s += value(*t, k);
      mean[k] = s / n;
      if (ok.size() > 1) {
        double ss = 0.0;
        for (const auto* t : ok) {
          const double dv = value(*t, k) - mean[k];
          ss += dv * dv;
        }
        se[k] = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
      }
    }
  };
  mean_se([](const TrialResult& t, std::size_t k) { return t.sculpt.weights[k]; }, agg.mean_weights,
          agg.se_weights);
  mean_se([](const TrialResult& t, std::size_t k) { return t.detectors.bayes[k] - t.detectors.rglrt[k]; },
          agg.mean_delta, agg.se_delta);
  for (const auto& name : detector_names()) {
    if (ok.front()->detectors[name].empty()) continue;
    mean_se([&](const TrialResult& t, std::size_t k) { return t.detectors[name][k]; }, agg.mean_stat[name],
            agg.se_stat[name]);
  }
  int successes = 0;
  for (const auto* t : ok) successes += t->sculpt.success;
  agg.success_fraction = static_cast<double>(successes) / static_cast<double>(ok.size());
  return agg;
}

namespace {

ExperimentResult run_experiment(const ExperimentConfig& config, std::optional<std::vector<double>> fixed,
                                double sigma_t, bool calibrated, const ProgressFn& progress) {
  const int K = config.knots.front();
  const KnotGrid knots(K);
  ExperimentResult res;
  res.config = config;
  res.mode = fixed ? "compare" : "sculpt";
  res.K = K;
  res.knots.assign(knots.abundances().begin(), knots.abundances().end());
  res.sigma_t = sigma_t;
  res.sigma_calibrated = calibrated;
  for (const auto& s : config.stats) res.runs.push_back(StatisticRun{s, {}, {}});

  std::optional<PriorWeights> fixed_w;
  if (fixed) {
    fixed_w = fixed->empty() ? PriorWeights::uniform(K) : PriorWeights(*fixed);
    if (fixed_w->size() != K) fail(ErrorCode::Dimension, "prior weight count does not match K");
  }

  const auto bkg = TBackground::standard(config.nu, config.dim);
  const auto sig = TargetSignature::along_first_axis(bkg, sigma_t);
  const BabystepsOptions opt{config.step, config.iters, config.se_mult};

  for (int t = 0; t < config.trials; ++t) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(t);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<TrialResult> trial(config.stats.size());
    for (auto& tr : trial) {
      tr.trial = t;
      tr.seed = seed;
    }
    try {
      const auto pairs = make_matched_pairs(bkg, sig, knots, config.pairs, seed);
      const PairScores scores(pairs);
      std::vector<std::vector<double>> glrt;
      if (config.glrt) {
        const auto model = DetectionModel::of(pairs);
        glrt.push_back(glrt_scores(pairs.bkg, model));
        for (const auto& pop : pairs.tgt) glrt.push_back(glrt_scores(pop, model));
      }
      for (std::size_t s = 0; s < config.stats.size(); ++s) {
        const auto& stat = config.stats[s];
        auto& tr = trial[s];
        const auto ts = std::chrono::steady_clock::now();
        try {
          LossEvaluator eval(scores, stat, rglrt_baseline(scores, stat));
          if (fixed_w) {
            SculptResult sr;
            sr.weights = *fixed_w;
            sr.final = eval(*fixed_w);
            sr.trajectory = {sr.final.loss};
            sr.rglrt_baseline = eval.baseline();
            sr.tolerance = success_tolerance(stat, sr.rglrt_baseline, sr.final.argmax_knot, pairs.size(),
                                             config.se_mult);
            sr.success = sr.final.loss <= sr.tolerance;
            tr.sculpt = std::move(sr);
          } else {
            tr.sculpt = random_restart_babysteps(eval, opt, config.restarts, seed);
          }
          tr.detectors = compare_detectors_on(scores, stat, tr.sculpt.weights, glrt);
        } catch (const std::exception& e) {
          tr.error = e.what();
        }
        tr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - ts).count();
        report(progress, "K=" + std::to_string(K) + " trial " + std::to_string(t) + " " + stat.label() +
                             (tr.ok() ? " loss=" + fmt("%.3g", tr.sculpt.final.loss) +
                                            (tr.sculpt.success ? " (success)" : " (no success)")
                                      : " failed: " + tr.error));
      }
    } catch (const std::exception& e) {
      for (auto& tr : trial)
        if (tr.ok()) tr.error = e.what();
      report(progress, "K=" + std::to_string(K) + " trial " + std::to_string(t) + " failed: " + e.what());
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double stat_time = 0.0;
    for (const auto& tr : trial) stat_time += tr.wall_seconds;
    // Shared data generation and scoring is charged evenly to the statistics.
    const double shared = (total - stat_time) / static_cast<double>(trial.size());
    for (std::size_t s = 0; s < trial.size(); ++s) {
      trial[s].wall_seconds += shared;
      res.runs[s].trials.push_back(std::move(trial[s]));
    }
  }
  for (auto& run : res.runs) run.aggregate = aggregate(run.trials, K);
  return res;
}

std::pair<double, bool> resolve_sigma(const ExperimentConfig& config, const ProgressFn& progress) {
  if (config.sigma_t > 0.0) return {config.sigma_t, false};
  CalibrationReport rep;
  const double s = calibrate(config, &rep);
  report(progress, "calibrated sigma_t=" + fmt("%.6g", s) + " (clairvoyant DR " + fmt("%.3f", rep.detection_rate) +
                       " at a=" + fmt("%.3g", rep.abundance) + ")");
  return {s, true};
}

}  // namespace

ExperimentResult run_trials(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  const auto [sigma, calibrated] = resolve_sigma(config, progress);
  return run_experiment(config, std::nullopt, sigma, calibrated, progress);
}

std::vector<ExperimentResult> knot_sweep(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  const auto [sigma, calibrated] = resolve_sigma(config, progress);
  std::vector<ExperimentResult> out;
  for (int K : config.knots) {
    ExperimentConfig c = config;
    c.knots = {K};
    out.push_back(run_experiment(c, std::nullopt, sigma, calibrated, progress));
  }
  return out;
}

ExperimentResult compare_detectors(const ExperimentConfig& config, std::optional<std::vector<double>> weights,
                                   const ProgressFn& progress) {
  config.validate();
  const auto [sigma, calibrated] = resolve_sigma(config, progress);
  return run_experiment(config, weights ? std::move(weights) : std::vector<double>{}, sigma, calibrated,
                        progress);
}

}  // namespace sculptor
