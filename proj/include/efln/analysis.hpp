#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "efln/cost.hpp"
#include "efln/expansion.hpp"
#include "efln/filter.hpp"
#include "efln/noise.hpp"
#include "efln/plants.hpp"

namespace efln {

inline double to_db(double power) { return 10.0 * std::log10(power); }

/// Noise functionals of the ISR influence evaluated at the noise:
/// E1 = E{r^2}, E2 = E{r'}, E3 = E{r'^2} + E{r r''}.
struct NoiseMoments {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  std::size_t samples_used = 0;
  /// Set when the noise has infinite variance, where the small-error expansion is not justified.
  bool heavy_tail_warning = false;
};

struct RegressorPowers {
  double pg = 0.0;   // E{||g||^2}
  double phw = 0.0;  // E{|h^T w|^2}
  std::size_t samples_used = 0;
};

struct SteadyStateReport {
  double emse_w_theory = 0.0;
  double emse_q_theory = 0.0;
  double emse_theory = 0.0;
  double emse_simulated = std::numeric_limits<double>::quiet_NaN();
  bool theory_valid = true;
  std::size_t diverged_trials = 0;
  NoiseMoments moments;
  RegressorPowers powers;

  double theory_db() const { return to_db(emse_theory); }
  double simulated_db() const { return to_db(emse_simulated); }
};

/// The small-step prediction is outside its region (denominator <= 0).
class ValidityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Per-sample integrands of E1, E2 and E3.
struct MomentIntegrands {
  double r2;
  double r_d1;
  double r_combo;
};

inline MomentIntegrands moment_integrands(double lambda, double eta) {
  const double eta2 = eta * eta;
  const double le4 = lambda * eta2 * eta2;
  const double t = 1.0 + le4;
  const double t_m52 = 1.0 / (t * t * std::sqrt(t));
  const double t_m5 = 1.0 / (t * t * t * t * t);
  const double r_d1 = (1.0 - 5.0 * le4) * t_m52;
  return {eta2 / (t * t * t), r_d1, (1.0 - 5.0 * le4) * (1.0 - 5.0 * le4) * t_m5 - 30.0 * le4 * (1.0 - le4) * t_m5};
}

/// Sample means of the three integrands over given noise draws.
inline NoiseMoments noise_moments_from_samples(double lambda, std::span<const double> noise) {
  if (noise.empty()) throw std::invalid_argument("noise moments: no samples");
  NoiseMoments m;
  for (double eta : noise) {
    const auto v = moment_integrands(lambda, eta);
    m.e1 += v.r2;
    m.e2 += v.r_d1;
    m.e3 += v.r_combo;
  }
  const double n = static_cast<double>(noise.size());
  m.e1 /= n;
  m.e2 /= n;
  m.e3 /= n;
  m.samples_used = noise.size();
  return m;
}

inline constexpr std::size_t min_moment_samples = 10000;

inline NoiseMoments estimate_noise_moments(double lambda, const NoiseModel& model, std::size_t n_samples,
                                           SeededStream& stream) {
  if (!(lambda > 0.0)) throw std::invalid_argument("noise moments: lambda must be positive");
  if (n_samples < min_moment_samples) {
    throw std::invalid_argument("noise moments: need at least " + std::to_string(min_moment_samples) + " samples");
  }
  validate(model);
  NoiseMoments m;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto v = moment_integrands(lambda, noise_sample(model, stream));
    m.e1 += v.r2;
    m.e2 += v.r_d1;
    m.e3 += v.r_combo;
  }
  const double n = static_cast<double>(n_samples);
  m.e1 /= n;
  m.e2 /= n;
  m.e3 /= n;
  m.samples_used = n_samples;
  m.heavy_tail_warning = is_heavy_tailed(model);
  return m;
}

/// E{||g||^2} and E{|h^T w|^2} over windows of a fresh input stream, at fixed (w, q).
inline RegressorPowers estimate_regressor_powers(const ExpansionConfig& expansion, const InputModel& input,
                                                 std::span<const double> w, double q, std::size_t n_samples,
                                                 SeededStream& stream) {
  expansion.validate();
  if (w.size() != expansion.dimension()) throw std::invalid_argument("regressor powers: weight dimension mismatch");
  if (n_samples == 0) throw std::invalid_argument("regressor powers: no samples");
  std::vector<double> window(expansion.taps);
  for (double& u : window) u = input.sample(stream);
  std::vector<double> g(expansion.dimension());
  std::vector<double> h(expansion.dimension());
  RegressorPowers p;
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t k = window.size() - 1; k > 0; --k) window[k] = window[k - 1];
    window[0] = input.sample(stream);
    expand_into(expansion, window, q, g, h);
    double gg = 0.0;
    double hw = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      gg += g[k] * g[k];
      hw += h[k] * w[k];
    }
    p.pg += gg;
    p.phw += hw * hw;
  }
  p.pg /= static_cast<double>(n_samples);
  p.phw /= static_cast<double>(n_samples);
  p.samples_used = n_samples;
  return p;
}

/// Powers for the Case 1 plant at its operating point (w_o, q_o) unless overridden.
inline RegressorPowers estimate_regressor_powers(const Case1Plant&, const InputModel& input,
                                                 std::span<const double> w_block_major, double q,
                                                 std::size_t n_samples, SeededStream& stream) {
  return estimate_regressor_powers(Case1Plant::expansion(), input, w_block_major, q, n_samples, stream);
}

/// Steady-state EMSE: mu E1 P / (2 E2 - mu E3 P) per branch; the branches add with no cross term.
inline SteadyStateReport theoretical_emse(const NoiseMoments& moments, const RegressorPowers& powers, double mu_w,
                                          double mu_q) {
  auto branch = [&](double mu, double power, const char* name) {
    const double denom = 2.0 * moments.e2 - mu * moments.e3 * power;
    if (!(denom > 0.0)) {
      throw ValidityError(std::string("steady-state theory invalid for the ") + name +
                          " branch: 2 E2 - mu E3 P = " + std::to_string(denom));
    }
    return mu * moments.e1 * power / denom;
  };
  SteadyStateReport rep;
  rep.moments = moments;
  rep.powers = powers;
  rep.emse_w_theory = branch(mu_w, powers.pg, "weight");
  rep.emse_q_theory = branch(mu_q, powers.phw, "exponential-factor");
  rep.emse_theory = rep.emse_w_theory + rep.emse_q_theory;
  return rep;
}

/// One filter run against a known plant: noise-free outputs and the step records.
struct TrialTrace {
  std::vector<double> plant_output;
  std::vector<StepRecord> records;
  bool diverged = false;
};

struct SimulatedEmse {
  double value = std::numeric_limits<double>::quiet_NaN();
  std::size_t trials_used = 0;
  std::size_t diverged_trials = 0;
};

/// Mean over the last `tail_window` samples of (y_o - y)^2, averaged over non-diverged trials.
inline double tail_emse(std::span<const double> plant_output, std::span<const StepRecord> records,
                        std::size_t tail_window) {
  if (plant_output.size() != records.size()) throw std::invalid_argument("simulated emse: trace length mismatch");
  if (tail_window == 0 || tail_window > records.size()) {
    throw std::invalid_argument("simulated emse: tail window exceeds trace length");
  }
  double acc = 0.0;
  for (std::size_t i = records.size() - tail_window; i < records.size(); ++i) {
    const double xi = plant_output[i] - records[i].y;
    acc += xi * xi;
  }
  return acc / static_cast<double>(tail_window);
}

inline SimulatedEmse simulated_emse(std::span<const TrialTrace> trials, std::size_t tail_window) {
  SimulatedEmse out;
  double acc = 0.0;
  for (const auto& t : trials) {
    if (t.diverged) {
      ++out.diverged_trials;
      continue;
    }
    acc += tail_emse(t.plant_output, t.records, tail_window);
    ++out.trials_used;
  }
  if (out.trials_used > 0) out.value = acc / static_cast<double>(out.trials_used);
  return out;
}

}  // namespace efln
