#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "efln/analysis.hpp"
#include "efln/cost.hpp"
#include "efln/expansion.hpp"
#include "efln/filter.hpp"
#include "efln/hysteresis.hpp"
#include "efln/noise.hpp"
#include "efln/parallel.hpp"
#include "efln/plants.hpp"

namespace efln {

/// Shortest round-trip decimal form of a double.
inline std::string format_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// Seed for trial `t`; every stream of the trial derives from it by role.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) { return base_seed + trial; }

/// Grid lo, lo+step, ... up to hi inclusive, snapped to avoid drift.
inline std::vector<double> linear_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  for (std::size_t k = 0; k <= n; ++k) out.push_back(std::round((lo + step * static_cast<double>(k)) * 1e9) / 1e9);
  return out;
}

inline std::vector<double> default_step_sizes() { return linear_grid(0.004, 0.04, 0.003); }
inline std::vector<double> default_snrs_db() { return linear_grid(5.0, 55.0, 5.0); }
inline std::vector<double> default_lambda_grid() { return {0.1, 1.0, 10.0, 100.0, 1000.0}; }

// ---------------------------------------------------------------------------
// Case 1: steady-state theory against simulation

enum class Case1Sweep { step_size, snr };

struct Case1Settings {
  Case1Sweep sweep = Case1Sweep::step_size;
  std::vector<double> step_sizes = default_step_sizes();
  std::vector<double> snrs_db = default_snrs_db();
  double snr_db = 30.0;  // held fixed in the step-size sweep
  double mu = 0.01;      // held fixed in the SNR sweep
  double lambda = 1.0;
  std::size_t n_trials = 50;
  std::size_t n_iterations = 100000;
  std::size_t tail_window = 1000;
  std::size_t moment_samples = 1000000;
  std::size_t power_samples = 100000;
  std::uint64_t base_seed = 1;
  std::size_t jobs = 0;
};

struct Case1Point {
  double x = 0.0;  // swept value: mu or SNR in dB
  double mu = 0.0;
  double snr_db = 0.0;
  SteadyStateReport report;
  std::string note;  // validity or divergence diagnostics
};

/// Zero-prepadded Case 1 plant output for an input stream.
inline std::vector<double> case1_plant_outputs(const Case1Plant& plant, std::span<const double> inputs) {
  std::vector<double> y(inputs.size());
  double window[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    window[1] = window[0];
    window[0] = inputs[i];
    y[i] = case1_output(plant, window);
  }
  return y;
}

inline double mean_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

struct TrialEmse {
  double emse = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
};

/// One Case 1 trial: tail EMSE of EFLN-ISR identifying the plant under Gaussian noise at `snr_db`.
inline TrialEmse case1_trial(const Case1Plant& plant, double lambda, double mu, double snr_db,
                             std::size_t n_iterations, std::size_t tail_window, std::uint64_t seed) {
  SeededStream input_stream(seed, StreamRole::input);
  SeededStream noise_stream(seed, StreamRole::noise);
  const InputModel input = case1_input();
  std::vector<double> u(n_iterations);
  for (double& v : u) v = input.sample(input_stream);
  const std::vector<double> y_o = case1_plant_outputs(plant, u);
  const double variance = snr_to_variance(snr_db, mean_power(y_o));

  AdaptiveFilter filter(make_filter_config(Case1Plant::expansion(), CostSpec::isr(lambda), mu, mu));
  TrialTrace trace;
  trace.plant_output = y_o;
  trace.records.reserve(n_iterations);
  try {
    for (std::size_t i = 0; i < n_iterations; ++i) {
      trace.records.push_back(filter.push(u[i], y_o[i] + gaussian_sample(noise_stream, variance)));
    }
  } catch (const NonFiniteError&) {
    return {std::numeric_limits<double>::quiet_NaN(), true};
  }
  return {tail_emse(trace.plant_output, trace.records, tail_window), false};
}

namespace detail {
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

inline std::vector<Case1Point> run_case1(const Case1Settings& s) {
  if (s.n_trials == 0 || s.n_iterations == 0 || s.tail_window == 0 || s.tail_window > s.n_iterations) {
    throw std::invalid_argument("case1: insufficient steady-state data (need trials >= 1 and iterations >= tail window)");
  }
  const Case1Plant plant;
  const std::vector<double> w_o = plant.weights_block_major();

  // Operating-point statistics shared by all sweep points.
  SeededStream power_stream(detail::mix_seed(s.base_seed, 1), StreamRole::analysis);
  std::vector<double> probe(s.power_samples);
  for (double& v : probe) v = case1_input().sample(power_stream);
  const double plant_power = mean_power(case1_plant_outputs(plant, probe));
  SeededStream regressor_stream(detail::mix_seed(s.base_seed, 2), StreamRole::analysis);
  const RegressorPowers powers =
      estimate_regressor_powers(plant, case1_input(), w_o, plant.q_o, s.power_samples, regressor_stream);

  const bool mu_sweep = s.sweep == Case1Sweep::step_size;
  const std::vector<double>& xs = mu_sweep ? s.step_sizes : s.snrs_db;
  if (xs.empty()) throw std::invalid_argument("case1: empty sweep");

  std::vector<Case1Point> points(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    auto& p = points[k];
    p.x = xs[k];
    p.mu = mu_sweep ? xs[k] : s.mu;
    p.snr_db = mu_sweep ? s.snr_db : xs[k];
    // same moment stream at every point, so the sweep is smooth in x
    SeededStream moment_stream(detail::mix_seed(s.base_seed, 3), StreamRole::analysis);
    const NoiseModel noise = GaussianNoise{p.snr_db, plant_power};
    const NoiseMoments moments = estimate_noise_moments(s.lambda, noise, s.moment_samples, moment_stream);
    try {
      p.report = theoretical_emse(moments, powers, p.mu, p.mu);
    } catch (const ValidityError& err) {
      p.report = SteadyStateReport{};
      p.report.moments = moments;
      p.report.powers = powers;
      p.report.theory_valid = false;
      p.report.emse_theory = std::numeric_limits<double>::quiet_NaN();
      p.note = err.what();
    }
  }

  const std::size_t n_jobs = xs.size() * s.n_trials;
  const auto outcomes = parallel_map(n_jobs, s.jobs, [&](std::size_t job) {
    const std::size_t k = job / s.n_trials;
    const std::size_t t = job % s.n_trials;
    return case1_trial(plant, s.lambda, points[k].mu, points[k].snr_db, s.n_iterations, s.tail_window,
                       trial_seed(s.base_seed, t));
  });

  for (std::size_t k = 0; k < xs.size(); ++k) {
    double acc = 0.0;
    std::size_t used = 0;
    std::size_t diverged = 0;
    for (std::size_t t = 0; t < s.n_trials; ++t) {
      const auto& o = outcomes[k * s.n_trials + t];
      if (o.diverged) {
        ++diverged;
        continue;
      }
      acc += o.emse;
      ++used;
    }
    auto& rep = points[k].report;
    rep.diverged_trials = diverged;
    rep.emse_simulated = used > 0 ? acc / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
    if (diverged > 0) {
      if (!points[k].note.empty()) points[k].note += "; ";
      points[k].note += std::to_string(diverged) + " trial(s) diverged";
    }
  }
  return points;
}

// ---------------------------------------------------------------------------
// Case 2: algorithm comparison under impulsive noise

enum class Algorithm { efln_isr, efln_lms, efln_mcc, efln_tanh, sovf_isr, tfln_isr };

inline constexpr Algorithm all_algorithms[] = {Algorithm::efln_isr,  Algorithm::efln_lms, Algorithm::efln_mcc,
                                               Algorithm::efln_tanh, Algorithm::sovf_isr, Algorithm::tfln_isr};

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::efln_isr: return "efln-isr";
    case Algorithm::efln_lms: return "efln-lms";
    case Algorithm::efln_mcc: return "efln-mcc";
    case Algorithm::efln_tanh: return "efln-tanh";
    case Algorithm::sovf_isr: return "sovf-isr";
    case Algorithm::tfln_isr: return "tfln-isr";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : all_algorithms) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

struct Case2Settings {
  std::vector<Algorithm> algorithms{std::begin(all_algorithms), std::end(all_algorithms)};
  std::vector<double> lambda_sweep;  // non-empty: EFLN-ISR at each lambda, no calibration
  bool stable_only = false;
  double alpha = 1.6;
  double gamma = 0.05;
  double snr_db = 30.0;
  std::size_t taps = 1;
  std::size_t order = 3;
  double lambda = 100.0;
  double mu = 0.01;
  double mcc_sigma = 1.0;
  double q0 = 0.5;  // initial exponential factor of the EFLN-family filters
  std::size_t n_trials = 50;
  std::size_t n_iterations = 50000;
  std::uint64_t base_seed = 1;
  std::size_t jobs = 0;
  bool calibrate = true;
  double threshold_db = -10.0;              // convergence level reported on every curve
  double calibration_threshold_db = -20.0;  // level matched by the fair-start calibration
  std::size_t smoothing = 20;
  std::size_t pilot_trials = 10;
  std::size_t pilot_iterations = 10000;
  double calibration_tolerance = 0.10;
};

struct Calibration {
  bool applied = false;
  bool converged = true;
  double mu = 0.0;
  std::optional<std::size_t> pilot_crossing;
  std::optional<std::size_t> target_crossing;
};

struct LearningCurve {
  std::string label;
  Algorithm algorithm = Algorithm::efln_isr;
  double lambda = 0.0;
  double mu_w = 0.0;
  double mu_q = 0.0;
  std::vector<double> emse_db;          // trial-averaged (y_o - y)^2
  std::vector<double> mse_db;           // trial-averaged e^2, dominated by impulses
  std::vector<double> steady_state;     // per-trial mean EMSE over the last 10% of iterations
  std::vector<std::size_t> trial_index; // trial number of each steady_state entry
  std::size_t diverged_trials = 0;
  std::optional<std::size_t> crossing;  // iterations to reach the threshold on the averaged curve
  Calibration calibration;

  double median_steady_state() const;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double LearningCurve::median_steady_state() const { return median(steady_state); }

/// First iteration count at which the trailing moving average (full windows only) of a
/// linear-power curve drops to `threshold_db`.
inline std::optional<std::size_t> iterations_to_threshold(std::span<const double> curve, double threshold_db,
                                                          std::size_t window) {
  if (window == 0) window = 1;
  const double level = std::pow(10.0, threshold_db / 10.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    acc += curve[i];
    if (i >= window) acc -= curve[i - window];
    if (i + 1 >= window && acc / static_cast<double>(window) <= level) return i + 1;
  }
  return std::nullopt;
}

/// Filter configuration of one competitor at step size `mu` (mu_q = mu where q is adapted).
inline FilterConfig algorithm_config(Algorithm a, const Case2Settings& s, double mu, double lambda) {
  auto efln = [&](CostSpec cost) {
    auto cfg = make_filter_config({s.taps, s.order, ExpansionKind::efln}, cost, mu, mu);
    cfg.q0 = s.q0;
    return cfg;
  };
  switch (a) {
    case Algorithm::efln_isr:
      return efln(CostSpec::isr(lambda));
    case Algorithm::efln_lms:
      return efln(CostSpec::lms());
    case Algorithm::efln_mcc:
      return efln(CostSpec::mcc(s.mcc_sigma));
    case Algorithm::efln_tanh:
      return efln(CostSpec::tanh());
    case Algorithm::sovf_isr:
      return make_filter_config({s.taps, 1, ExpansionKind::sovf}, CostSpec::isr(lambda), mu, 0.0);
    case Algorithm::tfln_isr:
      return make_filter_config({s.taps, s.order, ExpansionKind::tfln}, CostSpec::isr(lambda), mu, 0.0);
  }
  throw std::invalid_argument("unknown algorithm");
}

inline NoiseModel case2_noise(const Case2Settings& s, double signal_power) {
  if (s.stable_only) return AlphaStableNoise{s.alpha, s.gamma};
  return CompositeNoise{GaussianNoise{s.snr_db, signal_power}, AlphaStableNoise{s.alpha, s.gamma}};
}

/// Per-sample squared a priori error and squared error of one Case 2 trial.
struct Case2Trace {
  std::vector<double> xi2;
  std::vector<double> e2;
  bool diverged = false;
};

/// Runs one filter against the loudspeaker plant. With `noisy` false the desired signal is y_o itself.
inline Case2Trace case2_trial(const FilterConfig& cfg, const Case2Settings& s, std::size_t n_iterations,
                              std::uint64_t seed, bool noisy, StreamRole input_role = StreamRole::input) {
  SeededStream input_stream(seed, input_role);
  SeededStream gauss_stream(seed, StreamRole::noise);
  SeededStream stable_stream(seed, StreamRole::stable);
  const LoudspeakerPlant plant;
  const InputModel input = case2_input();
  std::vector<double> u(n_iterations);
  std::vector<double> y_o(n_iterations);
  for (std::size_t i = 0; i < n_iterations; ++i) {
    u[i] = input.sample(input_stream);
    y_o[i] = loudspeaker_output(plant, u[i]);
  }
  const NoiseModel noise = case2_noise(s, std::max(mean_power(y_o), std::numeric_limits<double>::min()));

  Case2Trace out;
  out.xi2.resize(n_iterations);
  out.e2.resize(n_iterations);
  AdaptiveFilter filter(cfg);
  try {
    for (std::size_t i = 0; i < n_iterations; ++i) {
      const double d = noisy ? y_o[i] + noise_sample(noise, gauss_stream, stable_stream) : y_o[i];
      const StepRecord rec = filter.push(u[i], d);
      const double xi = y_o[i] - rec.y;
      out.xi2[i] = xi * xi;
      out.e2[i] = rec.e * rec.e;
    }
  } catch (const NonFiniteError&) {
    out.diverged = true;
  }
  return out;
}

/// Noise-free pilot: iterations for the trial-averaged EMSE to reach the threshold.
inline std::optional<std::size_t> pilot_crossing(const FilterConfig& cfg, const Case2Settings& s) {
  const auto traces = parallel_map(s.pilot_trials, s.jobs, [&](std::size_t t) {
    return case2_trial(cfg, s, s.pilot_iterations, trial_seed(s.base_seed, t), false, StreamRole::pilot);
  });
  std::vector<double> avg(s.pilot_iterations, 0.0);
  for (const auto& tr : traces) {
    if (tr.diverged) return 0;  // treated as "too fast": the step size must shrink
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += tr.xi2[i];
  }
  for (double& v : avg) v /= static_cast<double>(traces.size());
  return iterations_to_threshold(avg, s.calibration_threshold_db, s.smoothing);
}

/// Searches the step size (log-scale bisection) that matches the reference pilot crossing.
inline Calibration calibrate_step_size(Algorithm a, const Case2Settings& s, std::size_t target) {
  Calibration cal;
  cal.applied = true;
  cal.target_crossing = target;
  auto crossing_at = [&](double mu) {
    const auto c = pilot_crossing(algorithm_config(a, s, mu, s.lambda), s);
    return c ? static_cast<double>(*c) : std::numeric_limits<double>::infinity();
  };
  const double tol = s.calibration_tolerance * static_cast<double>(target);
  auto close_enough = [&](double c) { return std::abs(c - static_cast<double>(target)) <= tol; };

  double mu = s.mu;
  double c = crossing_at(mu);
  double lo = mu;
  double hi = mu;
  // bracket: crossing(lo) > target >= crossing(hi)
  if (c > static_cast<double>(target)) {
    for (int k = 0; k < 40 && c > static_cast<double>(target); ++k) {
      lo = hi;
      hi *= 2.0;
      c = crossing_at(hi);
    }
  } else {
    for (int k = 0; k < 40 && c <= static_cast<double>(target); ++k) {
      hi = lo;
      lo /= 2.0;
      c = crossing_at(lo);
    }
  }
  double best_mu = mu;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double probe : {lo, hi}) {
    const double pc = crossing_at(probe);
    if (std::abs(pc - static_cast<double>(target)) < best_gap) {
      best_gap = std::abs(pc - static_cast<double>(target));
      best_mu = probe;
    }
  }
  for (int k = 0; k < 40 && !close_enough(static_cast<double>(target) + best_gap); ++k) {
    const double mid = std::sqrt(lo * hi);
    const double mc = crossing_at(mid);
    if (std::abs(mc - static_cast<double>(target)) < best_gap) {
      best_gap = std::abs(mc - static_cast<double>(target));
      best_mu = mid;
    }
    if (mc > static_cast<double>(target)) lo = mid;
    else hi = mid;
  }
  cal.mu = best_mu;
  cal.converged = best_gap <= tol;
  const double final_c = crossing_at(best_mu);
  if (std::isfinite(final_c)) cal.pilot_crossing = static_cast<std::size_t>(final_c);
  return cal;
}

inline LearningCurve summarize_curve(std::string label, Algorithm a, const FilterConfig& cfg, double lambda,
                                     const std::vector<Case2Trace>& traces, const Case2Settings& s) {
  LearningCurve curve;
  curve.label = std::move(label);
  curve.algorithm = a;
  curve.lambda = lambda;
  curve.mu_w = cfg.mu_w;
  curve.mu_q = cfg.mu_q;
  std::vector<double> emse(s.n_iterations, 0.0);
  std::vector<double> mse(s.n_iterations, 0.0);
  std::size_t used = 0;
  const std::size_t tail = std::max<std::size_t>(1, s.n_iterations / 10);
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const auto& tr = traces[t];
    if (tr.diverged) {
      ++curve.diverged_trials;
      continue;
    }
    ++used;
    double ss = 0.0;
    for (std::size_t i = 0; i < s.n_iterations; ++i) {
      emse[i] += tr.xi2[i];
      mse[i] += tr.e2[i];
      if (i >= s.n_iterations - tail) ss += tr.xi2[i];
    }
    curve.steady_state.push_back(ss / static_cast<double>(tail));
    curve.trial_index.push_back(t);
  }
  curve.emse_db.resize(s.n_iterations);
  curve.mse_db.resize(s.n_iterations);
  const double n = static_cast<double>(std::max<std::size_t>(used, 1));
  for (std::size_t i = 0; i < s.n_iterations; ++i) {
    emse[i] /= n;
    mse[i] /= n;
    curve.emse_db[i] = used > 0 ? to_db(emse[i]) : std::numeric_limits<double>::quiet_NaN();
    curve.mse_db[i] = used > 0 ? to_db(mse[i]) : std::numeric_limits<double>::quiet_NaN();
  }
  if (used > 0) curve.crossing = iterations_to_threshold(emse, s.threshold_db, s.smoothing);
  return curve;
}

inline void validate(const Case2Settings& s) {
  if (s.n_trials == 0 || s.n_iterations == 0) throw std::invalid_argument("case2: need trials >= 1 and iterations >= 1");
  if (s.lambda_sweep.empty() && s.algorithms.empty()) throw std::invalid_argument("case2: no algorithms selected");
  if (!(s.mu > 0.0)) throw std::invalid_argument("case2: mu must be positive");
  for (double l : s.lambda_sweep) {
    if (!(l > 0.0)) throw std::invalid_argument("case2: lambda values must be positive");
  }
  validate(case2_noise(s, 1.0));
}

/// Comparison curves (or the lambda sweep when `lambda_sweep` is non-empty).
inline std::vector<LearningCurve> run_case2(const Case2Settings& s) {
  validate(s);
  struct Entry {
    std::string label;
    Algorithm algorithm;
    double lambda;
    FilterConfig cfg;
    Calibration calibration;
  };
  std::vector<Entry> entries;
  if (!s.lambda_sweep.empty()) {
    for (double l : s.lambda_sweep) {
      Entry e{"efln-isr(lambda=" + format_number(l) + ")", Algorithm::efln_isr, l,
              algorithm_config(Algorithm::efln_isr, s, s.mu, l), {}};
      e.calibration.mu = s.mu;
      entries.push_back(std::move(e));
    }
  } else {
    std::optional<std::size_t> target;
    if (s.calibrate) target = pilot_crossing(algorithm_config(Algorithm::efln_isr, s, s.mu, s.lambda), s);
    for (Algorithm a : s.algorithms) {
      Entry e{std::string(to_string(a)), a, s.lambda, algorithm_config(a, s, s.mu, s.lambda), {}};
      e.calibration.mu = s.mu;
      if (target && a != Algorithm::efln_isr) {
        e.calibration = calibrate_step_size(a, s, *target);
        e.cfg = algorithm_config(a, s, e.calibration.mu, s.lambda);
      } else if (target) {
        e.calibration.target_crossing = target;
        e.calibration.pilot_crossing = target;
      }
      entries.push_back(std::move(e));
    }
  }

  std::vector<LearningCurve> curves;
  for (const auto& e : entries) {
    const auto traces = parallel_map(s.n_trials, s.jobs, [&](std::size_t t) {
      return case2_trial(e.cfg, s, s.n_iterations, trial_seed(s.base_seed, t), true);
    });
    auto curve = summarize_curve(e.label, e.algorithm, e.cfg, e.lambda, traces, s);
    curve.calibration = e.calibration;
    curves.push_back(std::move(curve));
  }
  return curves;
}

// ---------------------------------------------------------------------------
// Case 3: identification metrics on replayed data

struct IdentifyReport {
  double rmse = 0.0;
  double re_percent = 0.0;
  double mae = 0.0;
  std::size_t samples = 0;
};

inline IdentifyReport identify_metrics(std::span<const double> errors, std::span<const double> desired) {
  if (errors.empty()) throw std::invalid_argument("identify: empty data");
  if (errors.size() != desired.size()) throw std::invalid_argument("identify: error and desired lengths differ");
  double se = 0.0;
  double sd = 0.0;
  double mae = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    se += errors[i] * errors[i];
    sd += desired[i] * desired[i];
    mae = std::max(mae, std::abs(errors[i]));
  }
  if (sd == 0.0) throw std::invalid_argument("identify: desired signal is all zero, relative error undefined");
  const double m = static_cast<double>(errors.size());
  return {std::sqrt(se / m), std::sqrt(se / sd) * 100.0, mae, errors.size()};
}

struct IdentifySettings {
  std::size_t taps = 7;
  std::size_t order = 2;
  double mu = 0.02;
  double lambda = 1.0;
};

struct IdentifyResult {
  std::string label;
  IdentifyReport report;
  std::vector<double> output;
};

inline IdentifyResult run_identify(const SeriesPair& data, const FilterConfig& cfg, std::string label) {
  if (data.inputs.empty()) throw std::invalid_argument("identify: empty data");
  const auto records = run(cfg, data.inputs, data.desired);
  IdentifyResult res;
  res.label = std::move(label);
  std::vector<double> errors(records.size());
  res.output.resize(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    errors[i] = records[i].e;
    res.output[i] = records[i].y;
  }
  res.report = identify_metrics(errors, data.desired);
  return res;
}

/// EFLN-ISR and SOVF-ISR with identical taps, step size and lambda.
inline std::vector<IdentifyResult> compare_identify(const SeriesPair& data, const IdentifySettings& s) {
  const auto efln_cfg =
      make_filter_config({s.taps, s.order, ExpansionKind::efln}, CostSpec::isr(s.lambda), s.mu, s.mu);
  const auto sovf_cfg = make_filter_config({s.taps, 1, ExpansionKind::sovf}, CostSpec::isr(s.lambda), s.mu, 0.0);
  return {run_identify(data, efln_cfg, "efln-isr"), run_identify(data, sovf_cfg, "sovf-isr")};
}

}  // namespace efln
