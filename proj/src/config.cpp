#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace sculptor {

using nlohmann::json;

std::vector<int> default_knot_sweep() { return {1, 2, 5, 10, 15, 20}; }

std::vector<RocStatistic> default_statistics() {
  std::vector<RocStatistic> out;
  for (double x : {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1})
    out.push_back(RocStatistic::one_minus_dr_at_far(x));
  out.push_back(RocStatistic::one_minus_auc());
  out.push_back(RocStatistic::far_at_dr(0.5));
  return out;
}

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::Config, what); }

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    bad("invalid value '" + text + "' for " + key);
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad("invalid boolean '" + text + "' for " + key);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

json to_json_object(const ExperimentConfig& c) {
  json stats = json::array();
  for (const auto& s : c.stats) stats.push_back(s.name());
  return json{{"nu", c.nu},           {"dim", c.dim},
              {"sigma_t", c.sigma_t}, {"knots", c.knots},
              {"pairs", c.pairs},     {"trials", c.trials},
              {"stats", stats},       {"step", c.step},
              {"iters", c.iters},     {"restarts", c.restarts},
              {"seed", c.seed},       {"out", c.out},
              {"glrt", c.glrt},       {"se_mult", c.se_mult},
              {"calib_pairs", c.calib_pairs}, {"calib_far", c.calib_far},
              {"calib_low", c.calib_low},     {"calib_high", c.calib_high}};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(nu > 2.0)) bad("nu must be > 2");
  if (dim < 1) bad("dim must be positive");
  if (!(sigma_t >= 0.0)) bad("sigma_t must be non-negative (0 requests calibration)");
  if (knots.empty()) bad("knots must name at least one knot count");
  for (int k : knots)
    if (k < 1) bad("knot counts must be positive");
  if (pairs < 1) bad("pairs must be positive");
  if (trials < 1) bad("trials must be at least 1");
  if (stats.empty()) bad("at least one statistic is required");
  if (!(step > 0.0)) bad("step must be positive");
  if (iters < 1) bad("iters must be at least 1");
  if (restarts < 1) bad("restarts must be at least 1");
  if (!(se_mult >= 0.0)) bad("se_mult must be non-negative");
  if (calib_pairs < 1) bad("calib_pairs must be positive");
  if (!(calib_far > 0.0 && calib_far < 1.0)) bad("calib_far must lie in (0, 1)");
  if (!(calib_low > 0.0 && calib_low < calib_high && calib_high < 1.0))
    bad("calibration band must satisfy 0 < calib_low < calib_high < 1");
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "nu") nu = parse_number<double>(key, value);
  else if (key == "dim") dim = parse_number<int>(key, value);
  else if (key == "sigma_t") sigma_t = parse_number<double>(key, value);
  else if (key == "knots") {
    knots.clear();
    for (const auto& s : split_list(value)) knots.push_back(parse_number<int>(key, s));
  } else if (key == "pairs") pairs = static_cast<std::size_t>(parse_number<double>(key, value));
  else if (key == "trials") trials = parse_number<int>(key, value);
  else if (key == "stats") {
    stats.clear();
    for (const auto& s : split_list(value)) stats.push_back(RocStatistic::parse(s));
  } else if (key == "step") step = parse_number<double>(key, value);
  else if (key == "iters") iters = parse_number<int>(key, value);
  else if (key == "restarts") restarts = parse_number<int>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "out") out = value;
  else if (key == "glrt") glrt = parse_bool(key, value);
  else if (key == "se_mult") se_mult = parse_number<double>(key, value);
  else if (key == "calib_pairs") calib_pairs = static_cast<std::size_t>(parse_number<double>(key, value));
  else if (key == "calib_far") calib_far = parse_number<double>(key, value);
  else if (key == "calib_low") calib_low = parse_number<double>(key, value);
  else if (key == "calib_high") calib_high = parse_number<double>(key, value);
  else bad("unknown configuration key '" + key + "'");
}

std::string ExperimentConfig::get(const std::string& key) const {
  const json j = to_json_object(*this);
  if (!j.contains(key)) bad("unknown configuration key '" + key + "'");
  const auto& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) out += (out.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
    return out;
  }
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  return v.dump();
}

std::string ExperimentConfig::to_json() const { return to_json_object(*this).dump(2); }

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "knots") {
        c.knots = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
      } else if (key == "stats") {
        c.stats.clear();
        const auto names = v.is_array() ? v.get<std::vector<std::string>>()
                                        : std::vector<std::string>{v.get<std::string>()};
        for (const auto& s : names) c.stats.push_back(RocStatistic::parse(s));
      } else if (v.is_string()) {
        c.set(key, v.get<std::string>());
      } else if (v.is_boolean()) {
        c.set(key, v.get<bool>() ? "true" : "false");
      } else if (v.is_number_integer() || v.is_number_unsigned()) {
        c.set(key, v.dump());
      } else if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        c.set(key, buf);
      } else {
        bad("unsupported value for key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    bad(std::string("config type error: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::Io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str());
}

std::string ExperimentConfig::hash() const {
  json j = to_json_object(*this);
  j.erase("out");
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sculptor
