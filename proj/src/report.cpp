#include "report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "svg.hpp"

namespace sculptor {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kFormat = "sculptor-results/1";

json trial_to_json(const TrialResult& t) {
  json j{{"trial", t.trial}, {"seed", t.seed}};
  if (!t.ok()) {
    j["error"] = t.error;
    return j;
  }
  const auto& s = t.sculpt;
  j["weights"] = std::vector<double>(s.weights.values().begin(), s.weights.values().end());
  j["loss"] = s.final.loss;
  j["per_knot"] = s.final.per_knot;
  j["argmax_knot"] = s.final.argmax_knot;
  j["trajectory"] = s.trajectory;
  j["iterations"] = s.iterations;
  j["step"] = s.step;
  j["rglrt_baseline"] = s.rglrt_baseline;
  j["tolerance"] = s.tolerance;
  j["success"] = s.success;
  json det = json::object();
  for (const auto& name : detector_names())
    if (!t.detectors[name].empty()) det[name] = t.detectors[name];
  j["detectors"] = det;
  return j;
}

TrialResult trial_from_json(const json& j) {
  TrialResult t;
  t.trial = j.at("trial").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("error")) {
    t.error = j.at("error").get<std::string>();
    return t;
  }
  auto& s = t.sculpt;
  s.weights = PriorWeights(j.at("weights").get<std::vector<double>>());
  s.final.loss = j.at("loss").get<double>();
  s.final.per_knot = j.at("per_knot").get<std::vector<double>>();
  s.final.argmax_knot = j.at("argmax_knot").get<int>();
  s.trajectory = j.at("trajectory").get<std::vector<double>>();
  s.iterations = j.at("iterations").get<int>();
  s.step = j.at("step").get<double>();
  s.rglrt_baseline = j.at("rglrt_baseline").get<std::vector<double>>();
  s.tolerance = j.at("tolerance").get<double>();
  s.success = j.at("success").get<bool>();
  const auto& det = j.at("detectors");
  auto get = [&](const char* name) {
    return det.contains(name) ? det.at(name).get<std::vector<double>>() : std::vector<double>{};
  };
  t.detectors = {get("clairvoyant"), get("glrt"), get("rglrt"), get("bayes")};
  return t;
}

json aggregate_to_json(const AggregateResult& a) {
  return json{{"trials_ok", a.trials_ok},   {"trials_failed", a.trials_failed},
              {"mean_weights", a.mean_weights}, {"se_weights", a.se_weights},
              {"success_fraction", a.success_fraction},
              {"mean_delta_bayes_minus_rglrt", a.mean_delta}, {"se_delta_bayes_minus_rglrt", a.se_delta},
              {"mean_statistic", a.mean_stat}, {"se_statistic", a.se_stat}};
}

json experiment_to_json(const ExperimentResult& r) {
  json runs = json::array();
  for (const auto& run : r.runs) {
    json trials = json::array();
    for (const auto& t : run.trials) trials.push_back(trial_to_json(t));
    runs.push_back({{"statistic", run.stat.name()},
                    {"label", run.stat.label()},
                    {"trials", trials},
                    {"aggregate", aggregate_to_json(run.aggregate)}});
  }
  return json{{"mode", r.mode},
              {"K", r.K},
              {"knots", r.knots},
              {"sigma_t", r.sigma_t},
              {"sigma_calibrated", r.sigma_calibrated},
              {"config", json::parse(r.config.to_json())},
              {"config_hash", r.config.hash()},
              {"runs", runs}};
}

std::string write_csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot write '" + p.string() + "'");
  os << text;
  if (!os) fail(ErrorCode::Io, "failed writing '" + p.string() + "'");
}

const char* detector_color(const std::string& name) {
  if (name == "glrt") return "#d62728";
  if (name == "rglrt") return "#2ca02c";
  if (name == "bayes") return "#1f77b4";
  return "#7f7f7f";
}

void render_run_svgs(const ExperimentResult& res, const StatisticRun& run, const fs::path& dir) {
  const std::string stem = run_stem(res, run);
  const auto w = weights_svg(res, run);
  if (w.empty()) return;
  write_file(dir / (stem + "_weights.svg"), w);
  write_file(dir / (stem + "_weights_mean.svg"), mean_weights_svg(res, run));
  write_file(dir / (stem + "_differences.svg"), differences_svg(res, run));
}

}  // namespace

std::string run_stem(const ExperimentResult& res, const StatisticRun& run) {
  return res.mode + "_K" + std::to_string(res.K) + "_" + run.stat.tag();
}

std::string results_to_json(std::span<const ExperimentResult> results) {
  json exps = json::array();
  for (const auto& r : results) exps.push_back(experiment_to_json(r));
  json doc{{"format", kFormat},
           {"choices",
            {{"note", "Defaults below are declared choices, not values taken from a reference run."},
             {"knot_sweep_default", default_knot_sweep()},
             {"dr_at_far_levels_default", {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1}},
             {"babysteps_iterations_default", 500},
             {"reported_iterate", "best loss over the trajectory"},
             {"success_rule", "loss <= se_mult * binomial standard error at the worst knot"},
             {"target_signature", "sigma_t along the first whitened axis"}}},
           {"experiments", exps}};
  return doc.dump(2) + "\n";
}

std::vector<ExperimentResult> results_from_json(const std::string& text) {
  std::vector<ExperimentResult> out;
  try {
    const json doc = json::parse(text);
    if (doc.value("format", "") != kFormat) fail(ErrorCode::Io, "not a sculptor results file");
    for (const auto& e : doc.at("experiments")) {
      ExperimentResult r;
      r.mode = e.at("mode").get<std::string>();
      r.K = e.at("K").get<int>();
      r.knots = e.at("knots").get<std::vector<double>>();
      r.sigma_t = e.at("sigma_t").get<double>();
      r.sigma_calibrated = e.at("sigma_calibrated").get<bool>();
      r.config = ExperimentConfig::from_json(e.at("config").dump());
      for (const auto& rj : e.at("runs")) {
        StatisticRun run;
        run.stat = RocStatistic::parse(rj.at("statistic").get<std::string>());
        for (const auto& tj : rj.at("trials")) run.trials.push_back(trial_from_json(tj));
        run.aggregate = aggregate(run.trials, r.K);
        r.runs.push_back(std::move(run));
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, std::string("malformed results JSON: ") + e.what());
  }
  return out;
}

std::string timing_to_json(std::span<const ExperimentResult> results) {
  json exps = json::array();
  for (const auto& r : results) {
    json runs = json::array();
    for (const auto& run : r.runs) {
      json secs = json::array();
      for (const auto& t : run.trials) secs.push_back(t.wall_seconds);
      runs.push_back({{"statistic", run.stat.name()}, {"wall_seconds", secs}});
    }
    exps.push_back({{"K", r.K}, {"mode", r.mode}, {"runs", runs}});
  }
  return json{{"experiments", exps}}.dump(2) + "\n";
}

void write_weights_csv(std::ostream& os, const ExperimentResult& res, const StatisticRun& run) {
  os << "trial,knot_index,abundance,weight,success\n";
  for (const auto& t : run.trials) {
    if (!t.ok()) continue;
    for (std::size_t k = 0; k < res.knots.size(); ++k)
      os << t.trial << ',' << k << ',' << write_csv_number(res.knots[k]) << ','
         << write_csv_number(t.sculpt.weights[k]) << ',' << (t.sculpt.success ? 1 : 0) << '\n';
  }
}

void write_deltas_csv(std::ostream& os, const ExperimentResult& res, const StatisticRun& run) {
  os << "trial,knot_index,detector,statistic_value\n";
  for (const auto& t : run.trials) {
    if (!t.ok()) continue;
    for (const auto& name : detector_names()) {
      const auto& v = t.detectors[name];
      for (std::size_t k = 0; k < v.size() && k < res.knots.size(); ++k)
        os << t.trial << ',' << k << ',' << name << ',' << write_csv_number(v[k]) << '\n';
    }
  }
}

std::vector<WeightRow> read_weights_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "trial,knot_index,abundance,weight,success")
    fail(ErrorCode::Io, "weights CSV: unexpected header");
  std::vector<WeightRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    WeightRow r;
    int ok = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%d", &r.trial, &r.knot_index, &r.abundance, &r.weight, &ok) != 5)
      fail(ErrorCode::Io, "weights CSV: malformed row '" + line + "'");
    r.success = ok != 0;
    rows.push_back(r);
  }
  return rows;
}

std::string weights_svg(const ExperimentResult& res, const StatisticRun& run) {
  SvgChart chart("Prior weights, " + run.stat.label() + ", K=" + std::to_string(res.K), "abundance a", "weight w");
  chart.set_x_range(0.0, 1.0);
  int drawn = 0;
  for (const auto& t : run.trials) {
    if (!t.ok()) continue;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < res.knots.size(); ++k) pts.emplace_back(res.knots[k], t.sculpt.weights[k]);
    chart.add_line(pts, t.sculpt.success ? "#1f77b4" : "#ff7f0e", !t.sculpt.success);
    ++drawn;
  }
  return drawn == 0 ? std::string{} : chart.render();
}

std::string mean_weights_svg(const ExperimentResult& res, const StatisticRun& run) {
  const auto& agg = run.aggregate;
  SvgChart chart("Mean prior weights, " + run.stat.label() + ", K=" + std::to_string(res.K) + " (" +
                     std::to_string(agg.trials_ok) + " trials)",
                 "abundance a", "mean weight +/- SE");
  chart.set_x_range(0.0, 1.0);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < agg.mean_weights.size(); ++k) {
    pts.emplace_back(res.knots[k], agg.mean_weights[k]);
    chart.add_error_bar(res.knots[k], agg.mean_weights[k], agg.se_weights[k], "#1f77b4");
  }
  chart.add_line(pts, "#1f77b4", false);
  return chart.render();
}

std::string differences_svg(const ExperimentResult& res, const StatisticRun& run) {
  const auto& agg = run.aggregate;
  SvgChart chart("Detector minus clairvoyant, " + run.stat.label() + ", K=" + std::to_string(res.K), "abundance a",
                 "statistic difference (smaller is better)");
  chart.set_x_range(0.0, 1.0);
  chart.add_hline(0.0, "#999999");
  const auto clair = agg.mean_stat.find("clairvoyant");
  if (clair != agg.mean_stat.end()) {
    for (const auto& name : detector_names()) {
      if (name == "clairvoyant") continue;
      const auto it = agg.mean_stat.find(name);
      if (it == agg.mean_stat.end()) continue;
      std::vector<std::pair<double, double>> pts;
      for (std::size_t k = 0; k < it->second.size(); ++k)
        pts.emplace_back(res.knots[k], it->second[k] - clair->second[k]);
      chart.add_line(pts, detector_color(name), false, name + " - clairvoyant");
    }
  }
  std::vector<std::pair<double, double>> delta;
  for (std::size_t k = 0; k < agg.mean_delta.size(); ++k) delta.emplace_back(res.knots[k], agg.mean_delta[k]);
  chart.add_line(delta, "#9467bd", true, "bayes - rglrt");
  return chart.render();
}

void emit_reports(std::span<const ExperimentResult> results, const std::string& outdir) {
  const fs::path dir(outdir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorCode::Io, "cannot create output directory '" + outdir + "'");

  write_file(dir / "summary.json", results_to_json(results));
  write_file(dir / "timing.json", timing_to_json(results));
  for (const auto& res : results) {
    for (const auto& run : res.runs) {
      const std::string stem = run_stem(res, run);
      std::ostringstream w, d;
      write_weights_csv(w, res, run);
      write_deltas_csv(d, res, run);
      write_file(dir / (stem + "_weights.csv"), w.str());
      write_file(dir / (stem + "_deltas.csv"), d.str());
      render_run_svgs(res, run, dir);
    }
  }
}

void render_report(const std::string& summary_path, const std::string& outdir) {
  std::ifstream is(summary_path);
  if (!is) fail(ErrorCode::Io, "cannot open '" + summary_path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  const auto results = results_from_json(ss.str());
  const fs::path dir(outdir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorCode::Io, "cannot create output directory '" + outdir + "'");
  for (const auto& res : results)
    for (const auto& run : res.runs) render_run_svgs(res, run, dir);
}

std::string summary_table(std::span<const ExperimentResult> results) {
  std::ostringstream os;
  char buf[256];
  for (const auto& res : results) {
    std::snprintf(buf, sizeof buf, "%s K=%d sigma_t=%.6g%s d=%d nu=%g N=%zu\n", res.mode.c_str(), res.K,
                  res.sigma_t, res.sigma_calibrated ? " (calibrated)" : "", res.config.dim, res.config.nu,
                  res.config.pairs);
    os << buf;
    for (const auto& run : res.runs) {
      const auto& a = run.aggregate;
      std::snprintf(buf, sizeof buf, "  %-16s trials %d ok / %d failed, success %.2f\n", run.stat.label().c_str(),
                    a.trials_ok, a.trials_failed, a.success_fraction);
      os << buf;
      for (std::size_t k = 0; k < a.mean_weights.size(); ++k) {
        std::snprintf(buf, sizeof buf, "    a=%.4f  w=%.4f +/- %.4f  bayes-rglrt=%+.2e", res.knots[k],
                      a.mean_weights[k], a.se_weights[k], a.mean_delta[k]);
        os << buf;
        const auto c = a.mean_stat.find("clairvoyant");
        if (c != a.mean_stat.end()) {
          std::snprintf(buf, sizeof buf, "  clairvoyant=%.5f", c->second[k]);
          os << buf;
        }
        os << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace sculptor
