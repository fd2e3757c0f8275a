#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "efln/cost.hpp"
#include "efln/expansion.hpp"

namespace efln {

struct FilterConfig {
  ExpansionConfig expansion;
  CostSpec cost;
  double mu_w = 0.01;
  double mu_q = 0.0;
  std::vector<double> w0;
  double q0 = 0.0;

  void validate() const {
    expansion.validate();
    cost.validate();
    if (!(mu_w >= 0.0) || !(mu_q >= 0.0)) throw std::invalid_argument("filter: step sizes must be non-negative");
    if (w0.size() != expansion.dimension()) {
      throw std::invalid_argument("filter: w0 has " + std::to_string(w0.size()) + " entries, expansion needs " +
                                  std::to_string(expansion.dimension()));
    }
    if (!expansion.has_exponential_factor() && mu_q != 0.0) {
      throw std::invalid_argument("filter: mu_q must be 0 for expansions without an exponential factor");
    }
  }
};

/// Config with the neutral start w0 = 0, q0 = 0.
inline FilterConfig make_filter_config(ExpansionConfig expansion, CostSpec cost, double mu_w, double mu_q) {
  FilterConfig cfg{expansion, cost, mu_w, mu_q, {}, 0.0};
  cfg.w0.assign(expansion.dimension(), 0.0);
  return cfg;
}

struct FilterState {
  std::vector<double> w;
  double q = 0.0;
  std::size_t iteration = 0;
};

struct StepRecord {
  double y = 0.0;
  double e = 0.0;
  std::optional<std::vector<double>> w;
  std::optional<double> q;
};

/// Thrown when the adapted parameters leave the finite range.
class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(std::size_t iteration)
      : std::runtime_error("filter diverged: non-finite state at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

inline FilterState init(const FilterConfig& cfg) {
  cfg.validate();
  return FilterState{cfg.w0, cfg.q0, 0};
}

/// Online EFLN/TFLN/SOVF filter with its own delay line and scratch buffers.
class AdaptiveFilter {
 public:
  explicit AdaptiveFilter(FilterConfig cfg) : cfg_(std::move(cfg)), state_(init(cfg_)) {
    const std::size_t dim = cfg_.expansion.dimension();
    g_.resize(dim);
    h_.resize(dim);
    delay_.assign(cfg_.expansion.taps, 0.0);
  }

  AdaptiveFilter(FilterConfig cfg, FilterState state) : AdaptiveFilter(std::move(cfg)) {
    if (state.w.size() != g_.size()) throw std::invalid_argument("filter: state dimension mismatch");
    state_ = std::move(state);
  }

  const FilterConfig& config() const noexcept { return cfg_; }
  const FilterState& state() const noexcept { return state_; }

  /// Output y = g^T w for a window at the current q, without adapting.
  double predict(std::span<const double> window) {
    expand_into(cfg_.expansion, window, state_.q, g_, h_);
    return dot(g_, state_.w);
  }

  /// One adaptation step on an explicit window. The q-update uses the pre-update weights.
  StepRecord step(std::span<const double> window, double d, bool snapshot = false) {
    expand_into(cfg_.expansion, window, state_.q, g_, h_);
    const double y = dot(g_, state_.w);
    const double e = d - y;
    const double r = influence(cfg_.cost, e);

    double q_next = state_.q;
    if (cfg_.mu_q != 0.0) q_next += cfg_.mu_q * r * dot(h_, state_.w);

    const double gain = cfg_.mu_w * r;
    bool finite = std::isfinite(q_next) && std::isfinite(y);
    for (std::size_t k = 0; k < g_.size(); ++k) {
      state_.w[k] += gain * g_[k];
      finite = finite && std::isfinite(state_.w[k]);
    }
    state_.q = q_next;
    if (!finite) throw NonFiniteError(state_.iteration);
    ++state_.iteration;

    StepRecord rec{y, e, std::nullopt, std::nullopt};
    if (snapshot) {
      rec.w = state_.w;
      rec.q = state_.q;
    }
    return rec;
  }

  /// Shifts u into the delay line (zero-initialised) and adapts towards d.
  StepRecord push(double u, double d, bool snapshot = false) {
    for (std::size_t p = delay_.size() - 1; p > 0; --p) delay_[p] = delay_[p - 1];
    delay_[0] = u;
    return step(delay_, d, snapshot);
  }

  std::span<const double> delay_line() const noexcept { return delay_; }

 private:
  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
  }

  FilterConfig cfg_;
  FilterState state_;
  std::vector<double> g_;
  std::vector<double> h_;
  std::vector<double> delay_;
};

/// Value-semantics single step: returns the advanced state and the record.
inline std::pair<FilterState, StepRecord> step(const FilterState& state, const FilterConfig& cfg,
                                               std::span<const double> window, double d) {
  AdaptiveFilter filter(cfg, state);
  StepRecord rec = filter.step(window, d, true);
  return {filter.state(), std::move(rec)};
}

struct RunOptions {
  bool snapshots = false;
};

/// Slides a zero-padded tap window over `inputs` and adapts at every sample.
inline std::vector<StepRecord> run(const FilterConfig& cfg, std::span<const double> inputs,
                                   std::span<const double> desired, RunOptions opts = {}) {
  if (inputs.size() != desired.size()) {
    throw std::invalid_argument("filter: input and desired streams differ in length");
  }
  std::vector<StepRecord> records;
  records.reserve(inputs.size());
  AdaptiveFilter filter(cfg);
  for (std::size_t i = 0; i < inputs.size(); ++i) records.push_back(filter.push(inputs[i], desired[i], opts.snapshots));
  return records;
}

}  // namespace efln
