#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "error.hpp"
#include "report.hpp"
#include "svg.hpp"

using namespace sculptor;
namespace fs = std::filesystem;

namespace {

ExperimentResult sample_result() {
  ExperimentConfig c;
  c.sigma_t = 1.5;
  c.knots = {4};
  c.pairs = 3000;
  c.trials = 3;
  c.stats = {RocStatistic::one_minus_dr_at_far(0.05), RocStatistic::far_at_dr(0.5)};
  c.iters = 15;
  c.seed = 5;
  return run_trials(c);
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

// Tags open and close in order, attributes are quoted.
bool well_formed(const std::string& svg) {
  std::vector<std::string> stack;
  const std::regex tag(R"(<(/?)([a-zA-Z]+)((?:\s+[a-zA-Z:-]+="[^"<]*")*)\s*(/?)>)");
  std::size_t pos = svg.find("<svg");
  if (pos == std::string::npos) return false;
  auto begin = std::sregex_iterator(svg.begin() + static_cast<long>(pos), svg.end(), tag);
  std::size_t consumed = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    consumed += static_cast<std::size_t>(m.length());
    if (m[4].length() > 0) continue;
    if (m[1].length() == 0) {
      stack.push_back(m[2]);
    } else {
      if (stack.empty() || stack.back() != m[2]) return false;
      stack.pop_back();
    }
  }
  const auto lt = static_cast<std::size_t>(std::count(svg.begin() + static_cast<long>(pos), svg.end(), '<'));
  return stack.empty() && consumed > 0 && lt == static_cast<std::size_t>(std::distance(begin, std::sregex_iterator()));
}

}  // namespace

TEST_CASE("weights and deltas CSV") {
  const auto res = sample_result();
  const auto& run = res.runs.front();
  std::ostringstream w;
  write_weights_csv(w, res, run);
  std::istringstream in(w.str());
  const auto rows = read_weights_csv(in);
  REQUIRE(rows.size() == 3 * 4);
  for (const auto& r : rows) {
    const auto& tr = run.trials[static_cast<std::size_t>(r.trial)];
    CHECK(std::abs(r.weight - tr.sculpt.weights[static_cast<std::size_t>(r.knot_index)]) <= 1e-12);
    CHECK(r.abundance == res.knots[static_cast<std::size_t>(r.knot_index)]);
    CHECK(r.success == tr.sculpt.success);
  }

  std::ostringstream d;
  write_deltas_csv(d, res, run);
  const std::string text = d.str();
  CHECK(text.rfind("trial,knot_index,detector,statistic_value\n", 0) == 0);
  CHECK(count(text, "\n") == 1 + 3 * 4 * 4);
  CHECK(count(text, ",glrt,") == 12);
}

TEST_CASE("empty results give header-only CSV and no plot") {
  ExperimentResult res;
  res.K = 2;
  res.knots = {0.25, 0.75};
  StatisticRun run{RocStatistic::one_minus_auc(), {}, {}};
  std::ostringstream w, d;
  write_weights_csv(w, res, run);
  write_deltas_csv(d, res, run);
  CHECK(w.str() == "trial,knot_index,abundance,weight,success\n");
  CHECK(d.str() == "trial,knot_index,detector,statistic_value\n");
  CHECK(weights_svg(res, run).empty());

  std::istringstream bad("trial,knot\n");
  CHECK_THROWS_AS(read_weights_csv(bad), Error);
}

TEST_CASE("svg plots") {
  const auto res = sample_result();
  for (const auto& run : res.runs) {
    const std::string w = weights_svg(res, run);
    CHECK(well_formed(w));
    CHECK(count(w, "<polyline") == run.trials.size());
    std::size_t dashed = 0;
    for (const auto& t : run.trials) dashed += !t.sculpt.success;
    CHECK(count(w, "stroke-dasharray") == dashed);
    CHECK(well_formed(mean_weights_svg(res, run)));
    const std::string diff = differences_svg(res, run);
    CHECK(well_formed(diff));
    CHECK(count(diff, "<polyline") == 4);  // glrt, rglrt, bayes vs clairvoyant and bayes - rglrt
  }
  CHECK(xml_escape("a<b & \"c\"") == "a&lt;b &amp; &quot;c&quot;");
}

TEST_CASE("results JSON round-trips") {
  const std::vector<ExperimentResult> results{sample_result()};
  const std::string text = results_to_json(results);
  const auto back = results_from_json(text);
  REQUIRE(back.size() == 1);
  CHECK(results_to_json(back) == text);
  const auto& t0 = back[0].runs[1].trials[2];
  const auto& t1 = results[0].runs[1].trials[2];
  CHECK(t0.sculpt.trajectory == t1.sculpt.trajectory);
  CHECK(t0.seed == t1.seed);
  CHECK(text.find("\"config_hash\"") != std::string::npos);
  CHECK(text.find("wall") == std::string::npos);
  CHECK_THROWS_AS(results_from_json("{\"format\": \"other\"}"), Error);
  CHECK_THROWS_AS(results_from_json("[1,2"), Error);
}

TEST_CASE("emit and re-render reports") {
  const fs::path dir = fs::temp_directory_path() / "sculptor_test_report";
  fs::remove_all(dir);
  const std::vector<ExperimentResult> results{sample_result()};
  emit_reports(results, dir.string());
  const std::string stem = run_stem(results[0], results[0].runs[0]);
  CHECK(stem == "sculpt_K4_dr_at_far_0.05");
  for (const char* suffix : {"_weights.csv", "_deltas.csv", "_weights.svg", "_weights_mean.svg", "_differences.svg"})
    CHECK(fs::exists(dir / (stem + suffix)));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "timing.json"));

  const fs::path again = dir / "again";
  render_report((dir / "summary.json").string(), again.string());
  std::ifstream a(dir / (stem + "_weights.svg")), b(again / (stem + "_weights.svg"));
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK_THROWS_AS(render_report((dir / "missing.json").string(), again.string()), Error);
  fs::remove_all(dir);
}
