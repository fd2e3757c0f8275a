#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "efln/experiments.hpp"
#include "efln/hysteresis.hpp"
#include "efln/results_io.hpp"
#include "efln/run_config.hpp"

namespace {

using namespace efln;

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_usage = 2;
constexpr std::size_t protocol_trials = 50;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flags shared by every scenario.
struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_seed,
                const std::string& out_help = "Output file (default: standard output)") {
  cmd->add_option("--config", f.config_path, "JSON config file or a previous result file to re-run");
  cmd->add_option("--out", f.out, out_help);
  cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  if (with_seed) {
    f.seed_opt = cmd->add_option("--seed", f.seed, "Base seed; trial t uses seed+t (default: $EFLN_SEED or 1)");
    cmd->add_option("--jobs", f.jobs, "Worker threads, 0 = all cores; results do not depend on it");
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("EFLN_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  std::uint64_t seed = 0;
  const std::string_view s(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("EFLN_SEED is not an unsigned integer: " + std::string(s));
  return seed;
}

RunConfig base_config(const std::string& scenario, const CommonFlags& f) {
  RunConfig cfg;
  if (const auto s = env_seed()) {
    cfg.case1.base_seed = *s;
    cfg.case2.base_seed = *s;
  }
  if (!f.config_path.empty()) {
    json j;
    try {
      j = load_config_file(f.config_path);
      merge_config(j, cfg);
    } catch (const ConfigError& err) {
      throw UsageError(err.what());
    }
    if (!cfg.scenario.empty() && cfg.scenario != scenario) {
      throw UsageError("config file is for scenario '" + cfg.scenario + "', not '" + scenario + "'");
    }
  }
  cfg.scenario = scenario;
  return cfg;
}

std::vector<double> parse_number_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!detail::parse_double(item, v)) throw UsageError(std::string(flag) + ": not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

std::string algorithm_names() {
  std::string names;
  for (Algorithm a : all_algorithms) {
    if (!names.empty()) names += ", ";
    names += to_string(a);
  }
  return names;
}

std::vector<Algorithm> parse_algorithms(const std::string& text) {
  std::vector<Algorithm> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = parse_algorithm(detail::trim(item));
    if (!a) throw UsageError("unknown algorithm '" + item + "'; valid names: " + algorithm_names());
    out.push_back(*a);
  }
  if (out.empty()) throw UsageError("--algos: empty list; valid names: " + algorithm_names());
  return out;
}

void emit(const ResultSet& r, const CommonFlags& f) {
  const auto format = f.format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (f.out.empty()) {
    if (format == OutputFormat::csv) write_csv(std::cout, r);
    else write_json(std::cout, r);
    return;
  }
  write_results(r, f.out, format);
}

void warn_trials(std::size_t trials) {
  if (trials != protocol_trials) {
    std::cerr << "warning: running " << trials << " trial(s); the reference protocol averages " << protocol_trials
              << " independent trials\n";
  }
}

/// Evenly spread subset: first, middle and last sweep points.
std::vector<double> fast_points(const std::vector<double>& xs) {
  if (xs.size() <= 3) return xs;
  return {xs.front(), xs[xs.size() / 2], xs.back()};
}

struct Case1Flags {
  CommonFlags common;
  std::string sweep = "mu";
  std::size_t trials = 0;
  std::size_t iterations = 0;
  double lambda = 0.0;
  bool fast = false;
  CLI::Option* sweep_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* iterations_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
};

int cmd_case1(const Case1Flags& f) {
  RunConfig cfg = base_config("case1", f.common);
  auto& s = cfg.case1;
  if (f.sweep_opt->count() > 0) s.sweep = f.sweep == "mu" ? Case1Sweep::step_size : Case1Sweep::snr;
  if (f.fast) {
    s.n_trials = 10;
    s.step_sizes = fast_points(s.step_sizes);
    s.snrs_db = fast_points(s.snrs_db);
  }
  if (f.trials_opt->count() > 0) s.n_trials = f.trials;
  if (f.iterations_opt->count() > 0) s.n_iterations = f.iterations;
  if (f.lambda_opt->count() > 0) s.lambda = f.lambda;
  if (f.common.seed_opt->count() > 0) s.base_seed = f.common.seed;
  s.jobs = f.common.jobs;
  if (s.n_trials == 0 || s.n_iterations < s.tail_window) {
    throw UsageError("case1 needs --trials >= 1 and --iterations >= " + std::to_string(s.tail_window));
  }
  warn_trials(s.n_trials);

  ResultSet r;
  r.scenario = "case1";
  r.config = to_json(cfg);
  r.sweep = run_case1(s);
  for (const auto& p : r.sweep) {
    if (!p.note.empty()) std::cerr << "note: x=" << format_number(p.x) << ": " << p.note << '\n';
  }
  emit(r, f.common);
  return exit_ok;
}

struct Case2Flags {
  CommonFlags common;
  std::string algos;
  std::string lambda_sweep;
  bool stable_only = false;
  bool no_calibrate = false;
  std::size_t trials = 0;
  std::size_t iterations = 0;
  double lambda = 0.0;
  double mu = 0.0;
  CLI::Option* algos_opt = nullptr;
  CLI::Option* lambda_sweep_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* iterations_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* mu_opt = nullptr;
};

int cmd_case2(const Case2Flags& f) {
  RunConfig cfg = base_config("case2", f.common);
  auto& s = cfg.case2;
  if (f.algos_opt->count() > 0) s.algorithms = parse_algorithms(f.algos);
  if (f.lambda_sweep_opt->count() > 0) s.lambda_sweep = parse_number_list(f.lambda_sweep, "--lambda-sweep");
  if (f.stable_only) s.stable_only = true;
  if (f.no_calibrate) s.calibrate = false;
  if (f.trials_opt->count() > 0) s.n_trials = f.trials;
  if (f.iterations_opt->count() > 0) s.n_iterations = f.iterations;
  if (f.lambda_opt->count() > 0) s.lambda = f.lambda;
  if (f.mu_opt->count() > 0) s.mu = f.mu;
  if (f.common.seed_opt->count() > 0) s.base_seed = f.common.seed;
  s.jobs = f.common.jobs;
  try {
    validate(s);
  } catch (const std::invalid_argument& err) {
    throw UsageError(err.what());
  }
  warn_trials(s.n_trials);

  ResultSet r;
  r.scenario = "case2";
  r.config = to_json(cfg);
  r.curves = run_case2(s);
  for (const auto& c : r.curves) {
    std::cerr << c.label << ": mu_w=" << format_number(c.mu_w) << " mu_q=" << format_number(c.mu_q)
              << " median steady-state EMSE " << format_number(to_db(c.median_steady_state())) << " dB";
    if (c.crossing) std::cerr << ", reaches " << format_number(s.threshold_db) << " dB at iteration " << *c.crossing;
    if (c.calibration.applied && !c.calibration.converged) std::cerr << " (calibration did not converge)";
    if (c.diverged_trials > 0) std::cerr << ", " << c.diverged_trials << " trial(s) diverged";
    std::cerr << '\n';
  }
  emit(r, f.common);
  return exit_ok;
}

struct IdentifyFlags {
  CommonFlags common;
  std::string data;
  bool synthetic = false;
  std::string trace;
  std::size_t taps = 0;
  std::size_t order = 0;
  double mu = 0.0;
  double lambda = 0.0;
  std::string freqs;
  double duration = 0.0;
  double rate = 0.0;
  CLI::Option* data_opt = nullptr;
  CLI::Option* taps_opt = nullptr;
  CLI::Option* order_opt = nullptr;
  CLI::Option* mu_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* freqs_opt = nullptr;
  CLI::Option* duration_opt = nullptr;
  CLI::Option* rate_opt = nullptr;
};

std::string default_trace_path(const std::string& out) {
  const auto dot = out.find_last_of('.');
  const auto slash = out.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? out.substr(0, dot) : out) + "_trace.csv";
}

int cmd_identify(const IdentifyFlags& f) {
  RunConfig cfg = base_config("identify", f.common);
  auto& c = cfg.identify;
  if (f.synthetic) c.data.clear();
  if (f.data_opt->count() > 0) c.data = f.data;
  if (f.taps_opt->count() > 0) c.filter.taps = f.taps;
  if (f.order_opt->count() > 0) c.filter.order = f.order;
  if (f.mu_opt->count() > 0) c.filter.mu = f.mu;
  if (f.lambda_opt->count() > 0) c.filter.lambda = f.lambda;
  if (f.freqs_opt->count() > 0) c.excitation.frequencies_hz = parse_number_list(f.freqs, "--freqs");
  if (f.duration_opt->count() > 0) c.excitation.duration_s = f.duration;
  if (f.rate_opt->count() > 0) c.excitation.sample_rate_hz = f.rate;
  if (c.filter.taps == 0 || c.filter.order == 0 || !(c.filter.mu > 0.0) || !(c.filter.lambda > 0.0)) {
    throw UsageError("identify needs --taps, --order >= 1 and positive --mu, --lambda");
  }

  SeriesPair data;
  if (c.data.empty()) {
    try {
      data = synthetic_hysteresis(c.excitation, c.hysteresis);
    } catch (const std::invalid_argument& err) {
      throw UsageError(err.what());
    }
  } else {
    data = csv_load(CsvPlant{c.data});
  }

  ResultSet r;
  r.scenario = "identify";
  r.config = to_json(cfg);
  r.identify = compare_identify(data, c.filter);
  r.identify_inputs = data.inputs;
  r.identify_desired = data.desired;

  std::cout << "source: " << (c.data.empty() ? std::string("synthetic hysteresis") : c.data) << ", "
            << data.inputs.size() << " samples\n";
  for (const auto& res : r.identify) {
    std::cout << res.label << ": RMSE " << format_number(res.report.rmse) << ", RE "
              << format_number(res.report.re_percent) << " %, MAE " << format_number(res.report.mae) << '\n';
  }
  if (!f.common.out.empty()) {
    write_results(r, f.common.out, f.common.format == "json" ? OutputFormat::json : OutputFormat::csv);
  }
  std::string trace = f.trace;
  if (trace.empty() && !f.common.out.empty() && f.common.format == "csv") trace = default_trace_path(f.common.out);
  if (!trace.empty()) {
    std::ofstream out(trace, std::ios::binary);
    if (!out) throw ResultsIoError("cannot open " + trace + " for writing");
    write_identify_trace(out, r);
  }
  return exit_ok;
}

struct CostCurveFlags {
  CommonFlags common;
  std::string lambdas;
  double emax = 0.0;
  std::size_t points = 0;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* emax_opt = nullptr;
  CLI::Option* points_opt = nullptr;
};

int cmd_costcurves(const CostCurveFlags& f) {
  RunConfig cfg = base_config("costcurves", f.common);
  auto& s = cfg.costcurves;
  if (f.lambda_opt->count() > 0) s.lambdas = parse_number_list(f.lambdas, "--lambda");
  if (f.emax_opt->count() > 0) s.emax = f.emax;
  if (f.points_opt->count() > 0) s.points = f.points;
  ResultSet r;
  r.scenario = "costcurves";
  r.config = to_json(cfg);
  try {
    r.cost = cost_curves(s);
  } catch (const std::invalid_argument& err) {
    throw UsageError(err.what());
  }
  emit(r, f.common);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust nonlinear adaptive filtering with an exponential functional link network and the "
               "inverse-square-root cost.",
               "efln"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "efln 1.0.0");

  Case1Flags c1;
  auto* case1 = app.add_subcommand("case1", "Steady-state EMSE: theory against simulation over a mu or SNR sweep");
  add_common(case1, c1.common, true);
  c1.sweep_opt = case1->add_option("--sweep", c1.sweep, "Swept quantity: mu (SNR 30 dB) or snr (mu 0.01)")
                     ->check(CLI::IsMember({"mu", "snr"}));
  c1.trials_opt = case1->add_option("--trials", c1.trials, "Independent trials per sweep point (default 50)");
  c1.iterations_opt = case1->add_option("--iterations", c1.iterations, "Iterations per trial (default 100000)");
  c1.lambda_opt = case1->add_option("--lambda", c1.lambda, "ISR cost parameter (default 1)");
  case1->add_flag("--fast", c1.fast, "10 trials and 3 sweep points");

  Case2Flags c2;
  auto* case2 = app.add_subcommand("case2", "Learning curves of competing filters under impulsive noise");
  add_common(case2, c2.common, true);
  c2.algos_opt = case2->add_option("--algos", c2.algos, "Comma-separated algorithms: " + algorithm_names());
  c2.lambda_sweep_opt =
      case2->add_option("--lambda-sweep", c2.lambda_sweep, "Comma-separated lambdas for EFLN-ISR (no calibration)");
  case2->add_flag("--stable-only", c2.stable_only, "Alpha-stable noise without the Gaussian component");
  case2->add_flag("--no-calibrate", c2.no_calibrate, "Use the same step size for every algorithm");
  c2.trials_opt = case2->add_option("--trials", c2.trials, "Independent trials (default 50)");
  c2.iterations_opt = case2->add_option("--iterations", c2.iterations, "Iterations per trial (default 50000)");
  c2.lambda_opt = case2->add_option("--lambda", c2.lambda, "ISR cost parameter (default 100)");
  c2.mu_opt = case2->add_option("--mu", c2.mu, "Reference step size of EFLN-ISR (default 0.01)");

  IdentifyFlags id;
  auto* identify = app.add_subcommand("identify", "EFLN-ISR and SOVF-ISR identification metrics on a recorded series");
  add_common(identify, id.common, false, "Report file (default: print the report only)");
  id.data_opt = identify->add_option("--data", id.data, "Two-column CSV: input,desired");
  auto* synth = identify->add_flag("--synthetic", id.synthetic, "Use synthetic hysteresis data");
  id.data_opt->excludes(synth);
  identify->add_option("--trace", id.trace, "Trace CSV (default: <out>_trace.csv when --out is CSV)");
  id.taps_opt = identify->add_option("--taps", id.taps, "Memory length P (default 7)");
  id.order_opt = identify->add_option("--order", id.order, "Expansion order N (default 2)");
  id.mu_opt = identify->add_option("--mu", id.mu, "Step size for weights and exponential factor (default 0.02)");
  id.lambda_opt = identify->add_option("--lambda", id.lambda, "ISR cost parameter (default 1)");
  id.freqs_opt = identify->add_option("--freqs", id.freqs, "Synthetic drive frequencies in Hz (default 5)");
  id.duration_opt = identify->add_option("--duration", id.duration, "Synthetic record length in s (default 1)");
  id.rate_opt = identify->add_option("--rate", id.rate, "Synthetic sample rate in Hz (default 1000)");

  CostCurveFlags cc;
  auto* costcurves = app.add_subcommand("costcurves", "Tabulate the ISR cost Q(e) and influence r(e)");
  add_common(costcurves, cc.common, false);
  cc.lambda_opt = costcurves->add_option("--lambda", cc.lambdas, "Comma-separated lambdas (default 0.1,1,10,100,1000)");
  cc.emax_opt = costcurves->add_option("--emax", cc.emax, "Grid covers [-emax, emax] (default 5)");
  cc.points_opt = costcurves->add_option("--points", cc.points, "Grid points per lambda (default 1001)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (case1->parsed()) return cmd_case1(c1);
    if (case2->parsed()) return cmd_case2(c2);
    if (identify->parsed()) return cmd_identify(id);
    if (costcurves->parsed()) return cmd_costcurves(cc);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime;
  }
  return exit_usage;
}
