#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "efln/plants.hpp"

namespace efln {

// Synthetic stand-in for logged piezo-actuator data: a Bouc-Wen hysteresis loop
// followed by a first-order actuator lag, which makes the loop width rate dependent.
// Input and output are both normalised to roughly [0, 1].
struct HysteresisParams {
  double gain = 1.0;     // linear part of the displacement
  double alpha = 0.45;   // hysteretic stiffness
  double beta = 1.2;     // loop shape
  double gamma = 0.4;    // loop shape
  double lag_s = 0.002;  // actuator time constant in seconds
};

struct Excitation {
  std::vector<double> frequencies_hz{5.0};
  double duration_s = 1.0;
  double sample_rate_hz = 1000.0;
};

/// Normalised drive voltage in [0, 1]: mean 0.5, equal-amplitude sines summed and rescaled.
inline std::vector<double> sinusoidal_drive(const Excitation& ex) {
  if (ex.frequencies_hz.empty()) throw std::invalid_argument("hysteresis: no excitation frequencies");
  if (!(ex.sample_rate_hz > 0.0) || !(ex.duration_s > 0.0)) throw std::invalid_argument("hysteresis: bad timing");
  const auto n = static_cast<std::size_t>(std::llround(ex.duration_s * ex.sample_rate_hz));
  const double scale = 0.5 / static_cast<double>(ex.frequencies_hz.size());
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / ex.sample_rate_hz;
    double acc = 0.0;
    for (double f : ex.frequencies_hz) acc += std::sin(2.0 * std::numbers::pi * f * t - std::numbers::pi / 2.0);
    u[i] = 0.5 + scale * acc;
  }
  return u;
}

/// Displacement response of the hysteretic actuator to `drive` sampled at `sample_rate_hz`.
inline std::vector<double> hysteresis_response(const HysteresisParams& p, const std::vector<double>& drive,
                                               double sample_rate_hz) {
  const double dt = 1.0 / sample_rate_hz;
  std::vector<double> out(drive.size());
  double z = 0.0;
  double x = 0.0;
  double prev = drive.empty() ? 0.0 : drive.front();
  constexpr int substeps = 8;
  for (std::size_t i = 0; i < drive.size(); ++i) {
    const double du = (drive[i] - prev) / substeps;
    for (int s = 0; s < substeps; ++s) {
      z += p.alpha * du - p.beta * std::abs(du) * z - p.gamma * du * std::abs(z);
    }
    prev = drive[i];
    const double target = p.gain * drive[i] - z;
    x += (target - x) * (1.0 - std::exp(-dt / p.lag_s));
    out[i] = x;
  }
  return out;
}

inline SeriesPair synthetic_hysteresis(const Excitation& ex, const HysteresisParams& p = {}) {
  SeriesPair s;
  s.inputs = sinusoidal_drive(ex);
  s.desired = hysteresis_response(p, s.inputs, ex.sample_rate_hz);
  return s;
}

}  // namespace efln
