#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "efln/cost.hpp"
#include "efln/experiments.hpp"
#include "efln/run_config.hpp"

namespace efln {

enum class OutputFormat { csv, json };

/// One row of the cost-curve table: Q(e) and r(e) at a given lambda.
struct CostCurveRow {
  double lambda = 0.0;
  double e = 0.0;
  double q = 0.0;
  double r = 0.0;
};

inline std::vector<CostCurveRow> cost_curves(const CostCurveSettings& s) {
  const auto grid = cost_curve_grid(s);
  std::vector<CostCurveRow> rows;
  rows.reserve(grid.size() * s.lambdas.size());
  for (double lambda : s.lambdas) {
    const auto spec = CostSpec::isr(lambda);
    spec.validate();
    for (double e : grid) rows.push_back({lambda, e, cost_value(spec, e), influence(spec, e)});
  }
  return rows;
}

/// Everything a scenario produces; only the member matching `scenario` is populated.
struct ResultSet {
  std::string scenario;
  json config = json::object();
  std::vector<Case1Point> sweep;
  std::vector<LearningCurve> curves;
  std::vector<IdentifyResult> identify;
  std::vector<double> identify_inputs;
  std::vector<double> identify_desired;
  std::vector<CostCurveRow> cost;
};

class ResultsIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_number(std::ostream& out, double v) {
  if (std::isnan(v)) out << "nan";
  else if (std::isinf(v)) out << (v > 0 ? "inf" : "-inf");
  else out << format_number(v);
}

// JSON has no NaN; it is stored as null and read back as NaN.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double number_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline std::vector<double> numbers_from(const json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(number_or_nan(x));
  return v;
}

inline json optional_count(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<std::size_t> optional_count_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::size_t>();
}

}  // namespace detail

inline void write_csv(std::ostream& out, const ResultSet& r, bool echo_config = true) {
  if (echo_config && !r.config.empty()) out << config_comment_prefix << r.config.dump() << '\n';
  const auto num = [&](double v) { detail::put_number(out, v); };
  if (r.scenario == "case1") {
    out << "x,theory_db,sim_db\n";
    for (const auto& p : r.sweep) {
      num(p.x);
      out << ',';
      num(p.report.theory_valid ? p.report.theory_db() : std::numeric_limits<double>::quiet_NaN());
      out << ',';
      num(p.report.simulated_db());
      out << '\n';
    }
  } else if (r.scenario == "case2") {
    for (const auto& c : r.curves) {
      if (!echo_config) break;
      out << "# calibration: "
          << json{{"algorithm", c.label},
                  {"mu_w", c.mu_w},
                  {"mu_q", c.mu_q},
                  {"pilot_crossing", detail::optional_count(c.calibration.pilot_crossing)},
                  {"target_crossing", detail::optional_count(c.calibration.target_crossing)},
                  {"converged", c.calibration.converged},
                  {"diverged_trials", c.diverged_trials}}
                 .dump()
          << '\n';
    }
    out << "iteration,algorithm,value_db\n";
    for (const auto& c : r.curves) {
      for (std::size_t i = 0; i < c.emse_db.size(); ++i) {
        out << i + 1 << ',' << c.label << ',';
        num(c.emse_db[i]);
        out << '\n';
      }
    }
  } else if (r.scenario == "identify") {
    out << "algorithm,rmse,re_percent,mae,samples\n";
    for (const auto& res : r.identify) {
      out << res.label << ',';
      num(res.report.rmse);
      out << ',';
      num(res.report.re_percent);
      out << ',';
      num(res.report.mae);
      out << ',' << res.report.samples << '\n';
    }
  } else if (r.scenario == "costcurves") {
    out << "lambda,e,Q,r\n";
    for (const auto& row : r.cost) {
      num(row.lambda);
      out << ',';
      num(row.e);
      out << ',';
      num(row.q);
      out << ',';
      num(row.r);
      out << '\n';
    }
  } else {
    throw ResultsIoError("unknown scenario '" + r.scenario + "'");
  }
}

/// Sample-by-sample identification trace: input, desired and each filter's output.
inline void write_identify_trace(std::ostream& out, const ResultSet& r) {
  out << "index,input,desired";
  for (const auto& res : r.identify) out << ',' << res.label;
  out << '\n';
  for (std::size_t i = 0; i < r.identify_inputs.size(); ++i) {
    out << i << ',';
    detail::put_number(out, r.identify_inputs[i]);
    out << ',';
    detail::put_number(out, r.identify_desired[i]);
    for (const auto& res : r.identify) {
      out << ',';
      detail::put_number(out, res.output[i]);
    }
    out << '\n';
  }
}

inline json to_json(const ResultSet& r) {
  json results = json::array();
  if (r.scenario == "case1") {
    for (const auto& p : r.sweep) {
      const auto& rep = p.report;
      results.push_back({{"x", detail::number(p.x)},
                         {"mu", detail::number(p.mu)},
                         {"snr_db", detail::number(p.snr_db)},
                         {"theory_valid", rep.theory_valid},
                         {"emse_w_theory", detail::number(rep.emse_w_theory)},
                         {"emse_q_theory", detail::number(rep.emse_q_theory)},
                         {"emse_theory", detail::number(rep.emse_theory)},
                         {"emse_simulated", detail::number(rep.emse_simulated)},
                         {"diverged_trials", rep.diverged_trials},
                         {"e1", detail::number(rep.moments.e1)},
                         {"e2", detail::number(rep.moments.e2)},
                         {"e3", detail::number(rep.moments.e3)},
                         {"moment_samples", rep.moments.samples_used},
                         {"heavy_tail_warning", rep.moments.heavy_tail_warning},
                         {"pg", detail::number(rep.powers.pg)},
                         {"phw", detail::number(rep.powers.phw)},
                         {"power_samples", rep.powers.samples_used},
                         {"note", p.note}});
    }
  } else if (r.scenario == "case2") {
    for (const auto& c : r.curves) {
      std::vector<std::size_t> trials(c.trial_index.begin(), c.trial_index.end());
      results.push_back({{"label", c.label},
                         {"algorithm", std::string(to_string(c.algorithm))},
                         {"lambda", detail::number(c.lambda)},
                         {"mu_w", detail::number(c.mu_w)},
                         {"mu_q", detail::number(c.mu_q)},
                         {"emse_db", detail::numbers(c.emse_db)},
                         {"mse_db", detail::numbers(c.mse_db)},
                         {"steady_state", detail::numbers(c.steady_state)},
                         {"trial_index", trials},
                         {"diverged_trials", c.diverged_trials},
                         {"crossing", detail::optional_count(c.crossing)},
                         {"calibration",
                          {{"applied", c.calibration.applied},
                           {"converged", c.calibration.converged},
                           {"mu", detail::number(c.calibration.mu)},
                           {"pilot_crossing", detail::optional_count(c.calibration.pilot_crossing)},
                           {"target_crossing", detail::optional_count(c.calibration.target_crossing)}}}});
    }
  } else if (r.scenario == "identify") {
    for (const auto& res : r.identify) {
      results.push_back({{"label", res.label},
                         {"rmse", detail::number(res.report.rmse)},
                         {"re_percent", detail::number(res.report.re_percent)},
                         {"mae", detail::number(res.report.mae)},
                         {"samples", res.report.samples},
                         {"output", detail::numbers(res.output)}});
    }
  } else if (r.scenario == "costcurves") {
    for (const auto& row : r.cost) {
      results.push_back({{"lambda", detail::number(row.lambda)},
                         {"e", detail::number(row.e)},
                         {"Q", detail::number(row.q)},
                         {"r", detail::number(row.r)}});
    }
  } else {
    throw ResultsIoError("unknown scenario '" + r.scenario + "'");
  }
  json j{{"scenario", r.scenario}, {"config", r.config}, {"results", results}};
  if (r.scenario == "identify") {
    j["inputs"] = detail::numbers(r.identify_inputs);
    j["desired"] = detail::numbers(r.identify_desired);
  }
  return j;
}

inline ResultSet results_from_json(const json& j) {
  ResultSet r;
  try {
    r.scenario = j.at("scenario").get<std::string>();
    r.config = j.at("config");
    const json& results = j.at("results");
    if (r.scenario == "case1") {
      for (const auto& x : results) {
        Case1Point p;
        p.x = detail::number_or_nan(x.at("x"));
        p.mu = detail::number_or_nan(x.at("mu"));
        p.snr_db = detail::number_or_nan(x.at("snr_db"));
        auto& rep = p.report;
        rep.theory_valid = x.at("theory_valid").get<bool>();
        rep.emse_w_theory = detail::number_or_nan(x.at("emse_w_theory"));
        rep.emse_q_theory = detail::number_or_nan(x.at("emse_q_theory"));
        rep.emse_theory = detail::number_or_nan(x.at("emse_theory"));
        rep.emse_simulated = detail::number_or_nan(x.at("emse_simulated"));
        rep.diverged_trials = x.at("diverged_trials").get<std::size_t>();
        rep.moments.e1 = detail::number_or_nan(x.at("e1"));
        rep.moments.e2 = detail::number_or_nan(x.at("e2"));
        rep.moments.e3 = detail::number_or_nan(x.at("e3"));
        rep.moments.samples_used = x.at("moment_samples").get<std::size_t>();
        rep.moments.heavy_tail_warning = x.at("heavy_tail_warning").get<bool>();
        rep.powers.pg = detail::number_or_nan(x.at("pg"));
        rep.powers.phw = detail::number_or_nan(x.at("phw"));
        rep.powers.samples_used = x.at("power_samples").get<std::size_t>();
        p.note = x.at("note").get<std::string>();
        r.sweep.push_back(std::move(p));
      }
    } else if (r.scenario == "case2") {
      for (const auto& x : results) {
        LearningCurve c;
        c.label = x.at("label").get<std::string>();
        const auto a = parse_algorithm(x.at("algorithm").get<std::string>());
        if (!a) throw ResultsIoError("unknown algorithm in result file");
        c.algorithm = *a;
        c.lambda = detail::number_or_nan(x.at("lambda"));
        c.mu_w = detail::number_or_nan(x.at("mu_w"));
        c.mu_q = detail::number_or_nan(x.at("mu_q"));
        c.emse_db = detail::numbers_from(x.at("emse_db"));
        c.mse_db = detail::numbers_from(x.at("mse_db"));
        c.steady_state = detail::numbers_from(x.at("steady_state"));
        c.trial_index = x.at("trial_index").get<std::vector<std::size_t>>();
        c.diverged_trials = x.at("diverged_trials").get<std::size_t>();
        c.crossing = detail::optional_count_from(x.at("crossing"));
        const json& cal = x.at("calibration");
        c.calibration.applied = cal.at("applied").get<bool>();
        c.calibration.converged = cal.at("converged").get<bool>();
        c.calibration.mu = detail::number_or_nan(cal.at("mu"));
        c.calibration.pilot_crossing = detail::optional_count_from(cal.at("pilot_crossing"));
        c.calibration.target_crossing = detail::optional_count_from(cal.at("target_crossing"));
        r.curves.push_back(std::move(c));
      }
    } else if (r.scenario == "identify") {
      for (const auto& x : results) {
        IdentifyResult res;
        res.label = x.at("label").get<std::string>();
        res.report.rmse = detail::number_or_nan(x.at("rmse"));
        res.report.re_percent = detail::number_or_nan(x.at("re_percent"));
        res.report.mae = detail::number_or_nan(x.at("mae"));
        res.report.samples = x.at("samples").get<std::size_t>();
        res.output = detail::numbers_from(x.at("output"));
        r.identify.push_back(std::move(res));
      }
      r.identify_inputs = detail::numbers_from(j.at("inputs"));
      r.identify_desired = detail::numbers_from(j.at("desired"));
    } else if (r.scenario == "costcurves") {
      for (const auto& x : results) {
        r.cost.push_back({detail::number_or_nan(x.at("lambda")), detail::number_or_nan(x.at("e")),
                          detail::number_or_nan(x.at("Q")), detail::number_or_nan(x.at("r"))});
      }
    } else {
      throw ResultsIoError("unknown scenario '" + r.scenario + "'");
    }
  } catch (const json::exception& err) {
    throw ResultsIoError(std::string("malformed result file: ") + err.what());
  }
  return r;
}

inline void write_json(std::ostream& out, const ResultSet& r) { out << to_json(r).dump(1) << '\n'; }

inline ResultSet read_json(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& err) {
    throw ResultsIoError(std::string("malformed result file: ") + err.what());
  }
  return results_from_json(j);
}

/// Writes `r` to `path` in the given format; I/O failures name the path.
inline void write_results(const ResultSet& r, const std::string& path, OutputFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResultsIoError("cannot open " + path + " for writing");
  if (format == OutputFormat::csv) write_csv(out, r);
  else write_json(out, r);
  out.flush();
  if (!out) throw ResultsIoError("failed writing " + path);
}

inline ResultSet read_results_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResultsIoError("cannot open " + path);
  return read_json(in);
}

}  // namespace efln
