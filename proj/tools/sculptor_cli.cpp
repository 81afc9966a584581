// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sculptor/sculptor.h"

namespace {

struct ConfigDeleter {
  void operator()(sculptor_config* c) const { sculptor_config_free(c); }
};
struct ResultsDeleter {
  void operator()(sculptor_results* r) const { sculptor_results_free(r); }
};
struct PairsDeleter {
  void operator()(sculptor_pairs* p) const { sculptor_pairs_free(p); }
};
using ConfigPtr = std::unique_ptr<sculptor_config, ConfigDeleter>;
using ResultsPtr = std::unique_ptr<sculptor_results, ResultsDeleter>;
using PairsPtr = std::unique_ptr<sculptor_pairs, PairsDeleter>;

class ApiError : public std::runtime_error {
public:
  explicit ApiError(int status)
    : std::runtime_error(std::string(sculptor_status_name(status)) + ": " + sculptor_last_error()),
      status_(status) {}
  int status() const { return status_; }

private:
  int status_;
};

void check(int status) {
  if (status != SCULPTOR_OK) throw ApiError(status);
}

std::string take_string(char* s) {
  std::string out(s ? s : "");
  sculptor_string_free(s);
  return out;
}

void print_progress(const char* msg, void*) { std::fprintf(stderr, "%s\n", msg); }

// Experiment flags shared by every subcommand that runs trials.
struct ExperimentFlags {
  std::string config_path;
  std::string nu, dim, sigma_t, knots, pairs, trials, step, iters, restarts, seed, out, se_mult;
  std::vector<std::string> stats;
  bool no_glrt = false;
  bool quiet = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Flat JSON config file (flags override it)");
    app->add_option("--nu", nu, "Degrees of freedom of the t background (> 2)");
    app->add_option("--dim", dim, "Spectral dimension d");
    app->add_option("--sigma-t", sigma_t, "Whitened target norm (0 = calibrate)");
    app->add_option("--knots", knots, "Knot count K, or comma list for sweep-knots");
    app->add_option("--pairs", pairs, "Matched pairs N per population");
    app->add_option("--trials", trials, "Number of trials");
    app->add_option("--stat", stats, "Statistic: dr@far:<x>, far@dr:<x> or auc (repeatable)");
    app->add_option("--step", step, "Babysteps step size");
    app->add_option("--iters", iters, "Babysteps iterations");
    app->add_option("--restarts", restarts, "Random restarts");
    app->add_option("--seed", seed, "Base seed; trial t uses seed + t");
    app->add_option("--out", out, "Output directory");
    app->add_option("--se-mult", se_mult, "Success when loss <= se_mult * SE");
    app->add_flag("--no-glrt", no_glrt, "Skip the continuous GLRT comparison");
    app->add_flag("-q,--quiet", quiet, "No progress output");
  }

  ConfigPtr build() const {
    sculptor_config* raw = nullptr;
    check(config_path.empty() ? sculptor_config_new(&raw) : sculptor_config_load(config_path.c_str(), &raw));
    ConfigPtr cfg(raw);
    auto set = [&](const char* key, const std::string& v) {
      if (!v.empty()) check(sculptor_config_set(cfg.get(), key, v.c_str()));
    };
    set("nu", nu);
    set("dim", dim);
    set("sigma_t", sigma_t);
    set("knots", knots);
    set("pairs", pairs);
    set("trials", trials);
    set("step", step);
    set("iters", iters);
    set("restarts", restarts);
    set("seed", seed);
    set("out", out);
    set("se_mult", se_mult);
    if (!stats.empty()) {
      std::string joined;
      for (const auto& s : stats) joined += (joined.empty() ? "" : ",") + s;
      set("stats", joined);
    }
    if (no_glrt) set("glrt", "false");
    return cfg;
  }

  sculptor_progress_fn progress() const { return quiet ? nullptr : print_progress; }
};

std::string config_value(const sculptor_config* cfg, const char* key) {
  char* value = nullptr;
  check(sculptor_config_get(cfg, key, &value));
  return take_string(value);
}

std::string output_dir(const sculptor_config* cfg) { return config_value(cfg, "out"); }

void finish(ResultsPtr& res, const sculptor_config* cfg) {
  const std::string dir = output_dir(cfg);
  check(sculptor_results_emit(res.get(), dir.c_str()));
  char* table = nullptr;
  check(sculptor_results_summary(res.get(), &table));
  std::cout << take_string(table) << "results written to " << dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sculpt delta-comb Bayesian detection priors against the (restricted) GLRT"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sculptor_version());

  ExperimentFlags calib_f, sculpt_f, sweep_f, compare_f;

  auto* calib = app.add_subcommand("calibrate", "Find the target norm sigma_t for an informative regime");
  calib_f.attach(calib);

  auto* sculpt = app.add_subcommand("sculpt", "Sculpt priors over multiple trials and compare detectors");
  sculpt_f.attach(sculpt);
  std::string pairs_file;
  sculpt->add_option("--pairs-file", pairs_file, "Sculpt on a stored matched-pair set instead");

  auto* sweep = app.add_subcommand("sweep-knots", "Sculpt for each knot count in --knots");
  sweep_f.attach(sweep);

  auto* compare = app.add_subcommand("compare-detectors", "Compare detectors for a fixed prior");
  compare_f.attach(compare);
  std::vector<double> weights;
  compare->add_option("--weights", weights, "Prior weights (default uniform)")->delimiter(',');

  auto* report = app.add_subcommand("report", "Re-render plots from a results directory");
  std::string report_in, report_out;
  report->add_option("--in", report_in, "Results directory containing summary.json")->required();
  report->add_option("--out", report_out, "Where to write plots (default: --in)");

  auto* make_pairs = app.add_subcommand("make-pairs", "Generate and save a matched-pair set");
  double mp_nu = 3.0, mp_sigma = 0.0;
  int mp_dim = 9, mp_K = 5;
  std::size_t mp_n = 100000;
  std::uint64_t mp_seed = 1;
  std::string mp_path;
  make_pairs->add_option("--nu", mp_nu, "Degrees of freedom");
  make_pairs->add_option("--dim", mp_dim, "Spectral dimension");
  make_pairs->add_option("--sigma-t", mp_sigma, "Whitened target norm")->required();
  make_pairs->add_option("--knots", mp_K, "Knot count K");
  make_pairs->add_option("--pairs", mp_n, "Pairs per population");
  make_pairs->add_option("--seed", mp_seed, "Seed");
  make_pairs->add_option("--file", mp_path, "Output path (.csv or binary)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*calib) {
      auto cfg = calib_f.build();
      double sigma = 0.0, dr = 0.0;
      check(sculptor_calibrate(cfg.get(), &sigma, &dr));
      std::printf("sigma_t=%.10g clairvoyant_dr=%.6f\n", sigma, dr);
    } else if (*sculpt && !pairs_file.empty()) {
      sculptor_pairs* raw = nullptr;
      check(sculptor_pairs_load(pairs_file.c_str(), &raw));
      PairsPtr pairs(raw);
      std::size_t n = 0;
      int K = 0;
      check(sculptor_pairs_info(pairs.get(), &n, &K, nullptr));
      auto cfg = sculpt_f.build();
      auto grab = [&](const char* key) { return std::strtod(config_value(cfg.get(), key).c_str(), nullptr); };
      const auto stats = sculpt_f.stats.empty() ? std::vector<std::string>{"dr@far:0.05"} : sculpt_f.stats;
      for (const auto& s : stats) {
        std::vector<double> w(static_cast<std::size_t>(K));
        double loss = 0.0;
        int success = 0;
        check(sculptor_pairs_sculpt(pairs.get(), s.c_str(), grab("step"), static_cast<int>(grab("iters")),
                                    static_cast<int>(grab("restarts")), std::strtoull(config_value(cfg.get(), "seed").c_str(), nullptr, 10),
                                    grab("se_mult"), w.data(), w.size(), &loss, &success));
        std::printf("%s N=%zu K=%d loss=%.6g success=%d weights=", s.c_str(), n, K, loss, success);
        for (std::size_t k = 0; k < w.size(); ++k) std::printf("%s%.6f", k ? "," : "", w[k]);
        std::printf("\n");
      }
    } else if (*sculpt) {
      auto cfg = sculpt_f.build();
      sculptor_results* raw = nullptr;
      check(sculptor_run_trials(cfg.get(), sculpt_f.progress(), nullptr, &raw));
      ResultsPtr res(raw);
      finish(res, cfg.get());
    } else if (*sweep) {
      if (sweep_f.knots.empty()) sweep_f.knots = "1,2,5,10,15,20";
      auto cfg = sweep_f.build();
      sculptor_results* raw = nullptr;
      check(sculptor_sweep_knots(cfg.get(), sweep_f.progress(), nullptr, &raw));
      ResultsPtr res(raw);
      finish(res, cfg.get());
    } else if (*compare) {
      auto cfg = compare_f.build();
      sculptor_results* raw = nullptr;
      check(sculptor_compare_detectors(cfg.get(), weights.empty() ? nullptr : weights.data(), weights.size(),
                                       compare_f.progress(), nullptr, &raw));
      ResultsPtr res(raw);
      finish(res, cfg.get());
    } else if (*report) {
      const std::string out = report_out.empty() ? report_in : report_out;
      check(sculptor_report((report_in + "/summary.json").c_str(), out.c_str()));
      std::printf("plots written to %s\n", out.c_str());
    } else if (*make_pairs) {
      sculptor_pairs* raw = nullptr;
      check(sculptor_pairs_generate(mp_nu, mp_dim, mp_sigma, mp_K, mp_n, mp_seed, &raw));
      PairsPtr pairs(raw);
      check(sculptor_pairs_save(pairs.get(), mp_path.c_str()));
      std::printf("wrote %zu pairs x %d knots to %s\n", mp_n, mp_K, mp_path.c_str());
    }
  } catch (const ApiError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.status();
  }
  return 0;
}
