#include "sculptor/sculptor.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "report.hpp"
#include "runner.hpp"

struct sculptor_config {
  sculptor::ExperimentConfig cfg;
};
struct sculptor_results {
  std::vector<sculptor::ExperimentResult> results;
};
struct sculptor_background {
  sculptor::TBackground bkg;
};
struct sculptor_pairs {
  sculptor::MatchedPairSet pairs;
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
int guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return SCULPTOR_OK;
  } catch (const sculptor::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SCULPTOR_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SCULPTOR_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return SCULPTOR_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) sculptor::fail(sculptor::ErrorCode::Parameter, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sculptor::ProgressFn wrap(sculptor_progress_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](const std::string& msg) { fn(msg.c_str(), user); };
}

const sculptor::StatisticRun& run_at(const sculptor_results* res, size_t e, size_t s) {
  require(res, "results");
  if (e >= res->results.size() || s >= res->results[e].runs.size())
    sculptor::fail(sculptor::ErrorCode::Parameter, "result index out of range");
  return res->results[e].runs[s];
}

}  // namespace

extern "C" {

const char* sculptor_version(void) { return "0.1.0"; }

const char* sculptor_last_error(void) { return g_last_error.c_str(); }

const char* sculptor_status_name(int status) {
  return sculptor::error_code_name(static_cast<sculptor::ErrorCode>(status));
}

void sculptor_string_free(char* s) { std::free(s); }

int sculptor_config_new(sculptor_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new sculptor_config{};
  });
}

int sculptor_config_from_json(const char* json, sculptor_config** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new sculptor_config{sculptor::ExperimentConfig::from_json(json)};
  });
}

int sculptor_config_load(const char* path, sculptor_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sculptor_config{sculptor::ExperimentConfig::load(path)};
  });
}

int sculptor_config_set(sculptor_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    // Applied to a copy so a rejected value leaves the handle unchanged.
    auto next = cfg->cfg;
    next.set(key, value);
    next.validate();
    cfg->cfg = std::move(next);
  });
}

int sculptor_config_get(const sculptor_config* cfg, const char* key, char** value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    *value = dup_string(cfg->cfg.get(key));
  });
}

int sculptor_config_to_json(const sculptor_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = dup_string(cfg->cfg.to_json());
  });
}

void sculptor_config_free(sculptor_config* cfg) { delete cfg; }

int sculptor_calibrate(const sculptor_config* cfg, double* sigma_t, double* detection_rate) {
  return guarded([&] {
    require(cfg, "config");
    require(sigma_t, "sigma_t");
    sculptor::CalibrationReport rep;
    *sigma_t = sculptor::calibrate(cfg->cfg, &rep);
    if (detection_rate) *detection_rate = rep.detection_rate;
  });
}

int sculptor_run_trials(const sculptor_config* cfg, sculptor_progress_fn progress, void* user,
                        sculptor_results** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    auto res = std::make_unique<sculptor_results>();
    res->results.push_back(sculptor::run_trials(cfg->cfg, wrap(progress, user)));
    *out = res.release();
  });
}

int sculptor_sweep_knots(const sculptor_config* cfg, sculptor_progress_fn progress, void* user,
                         sculptor_results** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    auto res = std::make_unique<sculptor_results>();
    res->results = sculptor::knot_sweep(cfg->cfg, wrap(progress, user));
    *out = res.release();
  });
}

int sculptor_compare_detectors(const sculptor_config* cfg, const double* weights, size_t n_weights,
                               sculptor_progress_fn progress, void* user, sculptor_results** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    std::optional<std::vector<double>> w;
    if (weights) w = std::vector<double>(weights, weights + n_weights);
    auto res = std::make_unique<sculptor_results>();
    res->results.push_back(sculptor::compare_detectors(cfg->cfg, std::move(w), wrap(progress, user)));
    *out = res.release();
  });
}

int sculptor_results_emit(const sculptor_results* res, const char* outdir) {
  return guarded([&] {
    require(res, "results");
    require(outdir, "outdir");
    sculptor::emit_reports(res->results, outdir);
  });
}

int sculptor_results_to_json(const sculptor_results* res, char** out) {
  return guarded([&] {
    require(res, "results");
    require(out, "out");
    *out = dup_string(sculptor::results_to_json(res->results));
  });
}

int sculptor_results_summary(const sculptor_results* res, char** out) {
  return guarded([&] {
    require(res, "results");
    require(out, "out");
    *out = dup_string(sculptor::summary_table(res->results));
  });
}

int sculptor_results_shape(const sculptor_results* res, size_t* experiments, size_t* statistics) {
  return guarded([&] {
    require(res, "results");
    if (experiments) *experiments = res->results.size();
    if (statistics) *statistics = res->results.empty() ? 0 : res->results.front().runs.size();
  });
}

int sculptor_results_success_fraction(const sculptor_results* res, size_t experiment, size_t statistic,
                                      double* out) {
  return guarded([&] {
    require(out, "out");
    *out = run_at(res, experiment, statistic).aggregate.success_fraction;
  });
}

int sculptor_results_mean_weights(const sculptor_results* res, size_t experiment, size_t statistic,
                                  double* weights, size_t K) {
  return guarded([&] {
    require(weights, "weights");
    const auto& mean = run_at(res, experiment, statistic).aggregate.mean_weights;
    if (mean.size() != K) sculptor::fail(sculptor::ErrorCode::Dimension, "weight buffer does not match K");
    std::copy(mean.begin(), mean.end(), weights);
  });
}

void sculptor_results_free(sculptor_results* res) { delete res; }

int sculptor_report(const char* summary_json, const char* outdir) {
  return guarded([&] {
    require(summary_json, "summary_json");
    require(outdir, "outdir");
    sculptor::render_report(summary_json, outdir);
  });
}

int sculptor_background_new(double nu, int d, const double* mu, const double* R, sculptor_background** out) {
  return guarded([&] {
    require(out, "out");
    if (d < 1) sculptor::fail(sculptor::ErrorCode::Parameter, "dimension must be positive");
    Eigen::VectorXd m = mu ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(mu, d)) : Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d);
    if (R) cov = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(R, d, d);
    *out = new sculptor_background{sculptor::TBackground(nu, std::move(m), std::move(cov))};
  });
}

int sculptor_background_log_pdf(const sculptor_background* bkg, const double* x, size_t d, double* out) {
  return guarded([&] {
    require(bkg, "background");
    require(x, "x");
    require(out, "out");
    *out = bkg->bkg.log_pdf(Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(d)));
  });
}

int sculptor_background_sample(const sculptor_background* bkg, size_t n, uint64_t seed, double* out) {
  return guarded([&] {
    require(bkg, "background");
    require(out, "out");
    const Eigen::MatrixXd s = bkg->bkg.sample(n, seed);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, s.rows(), s.cols()) = s;
  });
}

void sculptor_background_free(sculptor_background* bkg) { delete bkg; }

int sculptor_log_lr(double nu, int d, double sigma_t, double a, double m, double r, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sculptor::log_lr(a, {m, r}, sculptor::DetectionModel{nu, d, sigma_t});
  });
}

int sculptor_glrt(double nu, int d, double sigma_t, double m, double r, double* score, double* argmax) {
  return guarded([&] {
    require(score, "score");
    const auto g = sculptor::glrt({m, r}, sculptor::DetectionModel{nu, d, sigma_t});
    *score = g.score;
    if (argmax) *argmax = g.argmax;
  });
}

int sculptor_roc_evaluate(const char* stat, const double* bkg, size_t n_bkg, const double* tgt, size_t n_tgt,
                          double* out) {
  return guarded([&] {
    require(stat, "stat");
    require(out, "out");
    if ((n_bkg && !bkg) || (n_tgt && !tgt)) sculptor::fail(sculptor::ErrorCode::Parameter, "score array is NULL");
    const auto s = sculptor::RocStatistic::parse(stat);
    sculptor::ScorePair sp(std::vector<double>(bkg, bkg + n_bkg), std::vector<double>(tgt, tgt + n_tgt));
    *out = sculptor::evaluate(s, sp);
  });
}

int sculptor_pairs_generate(double nu, int d, double sigma_t, int K, size_t n, uint64_t seed,
                            sculptor_pairs** out) {
  return guarded([&] {
    require(out, "out");
    const auto bkg = sculptor::TBackground::standard(nu, d);
    const auto sig = sculptor::TargetSignature::along_first_axis(bkg, sigma_t);
    *out = new sculptor_pairs{sculptor::make_matched_pairs(bkg, sig, sculptor::KnotGrid(K), n, seed)};
  });
}

int sculptor_pairs_load(const char* path, sculptor_pairs** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sculptor_pairs{sculptor::load_pairs(path)};
  });
}

int sculptor_pairs_save(const sculptor_pairs* pairs, const char* path) {
  return guarded([&] {
    require(pairs, "pairs");
    require(path, "path");
    sculptor::save_pairs(path, pairs->pairs);
  });
}

int sculptor_pairs_info(const sculptor_pairs* pairs, size_t* n, int* K, double* sigma_t) {
  return guarded([&] {
    require(pairs, "pairs");
    if (n) *n = pairs->pairs.size();
    if (K) *K = pairs->pairs.knots.size();
    if (sigma_t) *sigma_t = pairs->pairs.sigma_t;
  });
}

int sculptor_pairs_get(const sculptor_pairs* pairs, int population, size_t index, double* m, double* r) {
  return guarded([&] {
    require(pairs, "pairs");
    const auto& p = pairs->pairs;
    if (population < 0 || population > p.knots.size() || index >= p.size())
      sculptor::fail(sculptor::ErrorCode::Parameter, "pair index out of range");
    const auto& pt = population == 0 ? p.bkg[index] : p.tgt[static_cast<size_t>(population - 1)][index];
    if (m) *m = pt.m;
    if (r) *r = pt.r;
  });
}

int sculptor_pairs_sculpt(const sculptor_pairs* pairs, const char* stat, double step, int iters, int restarts,
                          uint64_t seed, double se_mult, double* weights, size_t K, double* loss, int* success) {
  return guarded([&] {
    require(pairs, "pairs");
    require(stat, "stat");
    require(weights, "weights");
    if (K != static_cast<size_t>(pairs->pairs.knots.size()))
      sculptor::fail(sculptor::ErrorCode::Dimension, "weight buffer does not match K");
    const auto s = sculptor::RocStatistic::parse(stat);
    const sculptor::PairScores scores(pairs->pairs);
    sculptor::LossEvaluator eval(scores, s, sculptor::rglrt_baseline(scores, s));
    const auto res = sculptor::random_restart_babysteps(eval, {step, iters, se_mult}, restarts, seed);
    std::copy(res.weights.values().begin(), res.weights.values().end(), weights);
    if (loss) *loss = res.final.loss;
    if (success) *success = res.success ? 1 : 0;
  });
}

void sculptor_pairs_free(sculptor_pairs* pairs) { delete pairs; }

}  // extern "C"
