#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "efln/experiments.hpp"
#include "efln/hysteresis.hpp"

namespace efln {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IdentifyConfig {
  IdentifySettings filter;
  std::string data;  // CSV path; empty means synthetic hysteresis data
  Excitation excitation;
  HysteresisParams hysteresis;
};

struct CostCurveSettings {
  std::vector<double> lambdas = default_lambda_grid();
  double emax = 5.0;
  std::size_t points = 1001;
};

/// Every parameter of a run. `jobs` is deliberately absent: results do not depend on it.
struct RunConfig {
  std::string scenario;  // case1, case2, identify or costcurves
  Case1Settings case1;
  Case2Settings case2;
  IdentifyConfig identify;
  CostCurveSettings costcurves;
};

inline std::vector<double> cost_curve_grid(const CostCurveSettings& s) {
  if (!(s.emax > 0.0)) throw std::invalid_argument("costcurves: emax must be positive");
  if (s.points < 2) throw std::invalid_argument("costcurves: need at least 2 grid points");
  std::vector<double> e(s.points);
  const double span = 2.0 * s.emax;
  for (std::size_t k = 0; k < s.points; ++k) {
    e[k] = -s.emax + span * static_cast<double>(k) / static_cast<double>(s.points - 1);
  }
  return e;
}

namespace detail {

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& err) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + err.what());
  }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* section) {
  if (!j.is_object()) throw ConfigError(std::string("config: '") + section + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw ConfigError(std::string("config: unknown key '") + key + "' in '" + section + "'");
  }
}

}  // namespace detail

inline json to_json(const Case1Settings& s) {
  return {{"sweep", s.sweep == Case1Sweep::step_size ? "mu" : "snr"},
          {"step_sizes", s.step_sizes},
          {"snrs_db", s.snrs_db},
          {"snr_db", s.snr_db},
          {"mu", s.mu},
          {"lambda", s.lambda},
          {"trials", s.n_trials},
          {"iterations", s.n_iterations},
          {"tail_window", s.tail_window},
          {"moment_samples", s.moment_samples},
          {"power_samples", s.power_samples},
          {"seed", s.base_seed}};
}

inline void from_json(const json& j, Case1Settings& s) {
  detail::reject_unknown(j,
                         {"sweep", "step_sizes", "snrs_db", "snr_db", "mu", "lambda", "trials", "iterations",
                          "tail_window", "moment_samples", "power_samples", "seed"},
                         "case1");
  std::string sweep = s.sweep == Case1Sweep::step_size ? "mu" : "snr";
  detail::read_field(j, "sweep", sweep);
  if (sweep != "mu" && sweep != "snr") throw ConfigError("config: case1.sweep must be 'mu' or 'snr'");
  s.sweep = sweep == "mu" ? Case1Sweep::step_size : Case1Sweep::snr;
  detail::read_field(j, "step_sizes", s.step_sizes);
  detail::read_field(j, "snrs_db", s.snrs_db);
  detail::read_field(j, "snr_db", s.snr_db);
  detail::read_field(j, "mu", s.mu);
  detail::read_field(j, "lambda", s.lambda);
  detail::read_field(j, "trials", s.n_trials);
  detail::read_field(j, "iterations", s.n_iterations);
  detail::read_field(j, "tail_window", s.tail_window);
  detail::read_field(j, "moment_samples", s.moment_samples);
  detail::read_field(j, "power_samples", s.power_samples);
  detail::read_field(j, "seed", s.base_seed);
}

inline json to_json(const Case2Settings& s) {
  std::vector<std::string> algos;
  for (Algorithm a : s.algorithms) algos.emplace_back(to_string(a));
  return {{"algorithms", algos},
          {"lambda_sweep", s.lambda_sweep},
          {"stable_only", s.stable_only},
          {"alpha", s.alpha},
          {"gamma", s.gamma},
          {"snr_db", s.snr_db},
          {"taps", s.taps},
          {"order", s.order},
          {"lambda", s.lambda},
          {"mu", s.mu},
          {"mcc_sigma", s.mcc_sigma},
          {"q0", s.q0},
          {"trials", s.n_trials},
          {"iterations", s.n_iterations},
          {"seed", s.base_seed},
          {"calibrate", s.calibrate},
          {"threshold_db", s.threshold_db},
          {"calibration_threshold_db", s.calibration_threshold_db},
          {"smoothing", s.smoothing},
          {"pilot_trials", s.pilot_trials},
          {"pilot_iterations", s.pilot_iterations},
          {"calibration_tolerance", s.calibration_tolerance}};
}

inline void from_json(const json& j, Case2Settings& s) {
  detail::reject_unknown(j,
                         {"algorithms", "lambda_sweep", "stable_only", "alpha", "gamma", "snr_db", "taps", "order",
                          "lambda", "mu", "mcc_sigma", "q0", "trials", "iterations", "seed", "calibrate",
                          "threshold_db", "calibration_threshold_db", "smoothing", "pilot_trials",
                          "pilot_iterations", "calibration_tolerance"},
                         "case2");
  if (j.contains("algorithms")) {
    std::vector<std::string> names;
    detail::read_field(j, "algorithms", names);
    s.algorithms.clear();
    for (const auto& n : names) {
      const auto a = parse_algorithm(n);
      if (!a) throw ConfigError("config: unknown algorithm '" + n + "'");
      s.algorithms.push_back(*a);
    }
  }
  detail::read_field(j, "lambda_sweep", s.lambda_sweep);
  detail::read_field(j, "stable_only", s.stable_only);
  detail::read_field(j, "alpha", s.alpha);
  detail::read_field(j, "gamma", s.gamma);
  detail::read_field(j, "snr_db", s.snr_db);
  detail::read_field(j, "taps", s.taps);
  detail::read_field(j, "order", s.order);
  detail::read_field(j, "lambda", s.lambda);
  detail::read_field(j, "mu", s.mu);
  detail::read_field(j, "mcc_sigma", s.mcc_sigma);
  detail::read_field(j, "q0", s.q0);
  detail::read_field(j, "trials", s.n_trials);
  detail::read_field(j, "iterations", s.n_iterations);
  detail::read_field(j, "seed", s.base_seed);
  detail::read_field(j, "calibrate", s.calibrate);
  detail::read_field(j, "threshold_db", s.threshold_db);
  detail::read_field(j, "calibration_threshold_db", s.calibration_threshold_db);
  detail::read_field(j, "smoothing", s.smoothing);
  detail::read_field(j, "pilot_trials", s.pilot_trials);
  detail::read_field(j, "pilot_iterations", s.pilot_iterations);
  detail::read_field(j, "calibration_tolerance", s.calibration_tolerance);
}

inline json to_json(const IdentifyConfig& c) {
  return {{"taps", c.filter.taps},
          {"order", c.filter.order},
          {"mu", c.filter.mu},
          {"lambda", c.filter.lambda},
          {"data", c.data},
          {"frequencies_hz", c.excitation.frequencies_hz},
          {"duration_s", c.excitation.duration_s},
          {"sample_rate_hz", c.excitation.sample_rate_hz},
          {"hysteresis",
           {{"gain", c.hysteresis.gain},
            {"alpha", c.hysteresis.alpha},
            {"beta", c.hysteresis.beta},
            {"gamma", c.hysteresis.gamma},
            {"lag_s", c.hysteresis.lag_s}}}};
}

inline void from_json(const json& j, IdentifyConfig& c) {
  detail::reject_unknown(
      j, {"taps", "order", "mu", "lambda", "data", "frequencies_hz", "duration_s", "sample_rate_hz", "hysteresis"},
      "identify");
  detail::read_field(j, "taps", c.filter.taps);
  detail::read_field(j, "order", c.filter.order);
  detail::read_field(j, "mu", c.filter.mu);
  detail::read_field(j, "lambda", c.filter.lambda);
  detail::read_field(j, "data", c.data);
  detail::read_field(j, "frequencies_hz", c.excitation.frequencies_hz);
  detail::read_field(j, "duration_s", c.excitation.duration_s);
  detail::read_field(j, "sample_rate_hz", c.excitation.sample_rate_hz);
  if (j.contains("hysteresis")) {
    const json& h = j.at("hysteresis");
    detail::reject_unknown(h, {"gain", "alpha", "beta", "gamma", "lag_s"}, "identify.hysteresis");
    detail::read_field(h, "gain", c.hysteresis.gain);
    detail::read_field(h, "alpha", c.hysteresis.alpha);
    detail::read_field(h, "beta", c.hysteresis.beta);
    detail::read_field(h, "gamma", c.hysteresis.gamma);
    detail::read_field(h, "lag_s", c.hysteresis.lag_s);
  }
}

inline json to_json(const CostCurveSettings& s) {
  return {{"lambdas", s.lambdas}, {"emax", s.emax}, {"points", s.points}};
}

inline void from_json(const json& j, CostCurveSettings& s) {
  detail::reject_unknown(j, {"lambdas", "emax", "points"}, "costcurves");
  detail::read_field(j, "lambdas", s.lambdas);
  detail::read_field(j, "emax", s.emax);
  detail::read_field(j, "points", s.points);
}

/// Effective config as echoed into result files: only the section of the selected scenario.
inline json to_json(const RunConfig& c) {
  json j{{"scenario", c.scenario}};
  if (c.scenario == "case1") j["case1"] = to_json(c.case1);
  if (c.scenario == "case2") j["case2"] = to_json(c.case2);
  if (c.scenario == "identify") j["identify"] = to_json(c.identify);
  if (c.scenario == "costcurves") j["costcurves"] = to_json(c.costcurves);
  return j;
}

/// Overlays the sections present in `j` onto `c`.
inline void merge_config(const json& j, RunConfig& c) {
  detail::reject_unknown(j, {"scenario", "case1", "case2", "identify", "costcurves"}, "<root>");
  detail::read_field(j, "scenario", c.scenario);
  if (j.contains("case1")) from_json(j.at("case1"), c.case1);
  if (j.contains("case2")) from_json(j.at("case2"), c.case2);
  if (j.contains("identify")) from_json(j.at("identify"), c.identify);
  if (j.contains("costcurves")) from_json(j.at("costcurves"), c.costcurves);
}

inline constexpr const char* config_comment_prefix = "# config: ";

/// Reads a config from a JSON config file, a JSON result file ("config" key) or a CSV
/// result file (its "# config: " line).
inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind(config_comment_prefix, 0) == 0) {
      try {
        return json::parse(line.substr(std::string(config_comment_prefix).size()));
      } catch (const json::exception& err) {
        throw ConfigError(path + ": malformed config line: " + err.what());
      }
    }
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& err) {
    throw ConfigError(path + ": not a JSON config: " + err.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("results")) return j.at("config");
  return j;
}

}  // namespace efln
