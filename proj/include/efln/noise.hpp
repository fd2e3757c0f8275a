#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

namespace efln {

/// Independent sub-streams derived from one seed.
enum class StreamRole : std::uint32_t { input = 1, noise = 2, stable = 3, analysis = 4, pilot = 5 };

/// Reproducible random stream: identical (seed, role) gives an identical sequence.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed, StreamRole role = StreamRole::input) : seed_(seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(role)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    double u = 0.0;
    do {
      u = std::generate_canonical<double, 53>(engine_);
      ++counter_;
    } while (u <= 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }

  double standard_normal() {
    ++counter_;
    return normal_(engine_);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double snr_to_variance(double snr_db, double signal_power) {
  return signal_power * std::pow(10.0, -snr_db / 10.0);
}

inline double gaussian_sample(SeededStream& stream, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian_sample: variance must be positive");
  return std::sqrt(variance) * stream.standard_normal();
}

/// Symmetric alpha-stable draw with characteristic function exp(-gamma^alpha |t|^alpha),
/// via the Chambers-Mallows-Stuck transform.
inline double alpha_stable_sample(SeededStream& stream, double alpha, double gamma) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha_stable_sample: alpha must lie in (0, 2]");
  if (!(gamma > 0.0)) throw std::invalid_argument("alpha_stable_sample: gamma must be positive");
  constexpr double half_pi = std::numbers::pi / 2.0;
  const double v = stream.uniform(-half_pi, half_pi);
  const double w = -std::log(stream.uniform_open());
  if (alpha == 1.0) return gamma * std::tan(v);
  const double av = alpha * v;
  const double head = std::sin(av) / std::pow(std::cos(v), 1.0 / alpha);
  const double tail = std::pow(std::cos(v - av) / w, (1.0 - alpha) / alpha);
  return gamma * head * tail;
}

struct GaussianNoise {
  double snr_db = 30.0;
  double signal_power = 1.0;

  double variance() const { return snr_to_variance(snr_db, signal_power); }
};

struct AlphaStableNoise {
  double alpha = 1.6;
  double gamma = 0.05;
};

struct CompositeNoise {
  GaussianNoise gaussian;
  AlphaStableNoise stable;
};

using NoiseModel = std::variant<GaussianNoise, AlphaStableNoise, CompositeNoise>;

inline void validate(const NoiseModel& model) {
  auto check_stable = [](const AlphaStableNoise& s) {
    if (!(s.alpha > 0.0 && s.alpha <= 2.0)) throw std::invalid_argument("noise: alpha must lie in (0, 2]");
    if (!(s.gamma > 0.0)) throw std::invalid_argument("noise: gamma must be positive");
  };
  auto check_gauss = [](const GaussianNoise& g) {
    if (!(g.signal_power > 0.0)) throw std::invalid_argument("noise: signal power must be positive");
  };
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) check_gauss(m);
        else if constexpr (std::is_same_v<T, AlphaStableNoise>) check_stable(m);
        else {
          check_gauss(m.gaussian);
          check_stable(m.stable);
        }
      },
      model);
}

/// True when the model has infinite variance (alpha < 2 component present).
inline bool is_heavy_tailed(const NoiseModel& model) {
  if (const auto* s = std::get_if<AlphaStableNoise>(&model)) return s->alpha < 2.0;
  if (const auto* c = std::get_if<CompositeNoise>(&model)) return c->stable.alpha < 2.0;
  return false;
}

/// Draws one additive noise sample. The composite's two components use the same stream in a fixed order.
inline double noise_sample(const NoiseModel& model, SeededStream& stream) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          return gaussian_sample(stream, m.variance());
        } else if constexpr (std::is_same_v<T, AlphaStableNoise>) {
          return alpha_stable_sample(stream, m.alpha, m.gamma);
        } else {
          const double gauss = gaussian_sample(stream, m.gaussian.variance());
          return gauss + alpha_stable_sample(stream, m.stable.alpha, m.stable.gamma);
        }
      },
      model);
}

/// Variant drawing the Gaussian and alpha-stable parts from separate streams, so each
/// component's sequence does not depend on the other's presence.
inline double noise_sample(const NoiseModel& model, SeededStream& gaussian_stream, SeededStream& stable_stream) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          return gaussian_sample(gaussian_stream, m.variance());
        } else if constexpr (std::is_same_v<T, AlphaStableNoise>) {
          return alpha_stable_sample(stable_stream, m.alpha, m.gamma);
        } else {
          const double gauss = gaussian_sample(gaussian_stream, m.gaussian.variance());
          return gauss + alpha_stable_sample(stable_stream, m.stable.alpha, m.stable.gamma);
        }
      },
      model);
}

/// Same noise model with its Gaussian part rescaled to a new signal power.
inline NoiseModel with_signal_power(NoiseModel model, double signal_power) {
  if (auto* g = std::get_if<GaussianNoise>(&model)) g->signal_power = signal_power;
  if (auto* c = std::get_if<CompositeNoise>(&model)) c->gaussian.signal_power = signal_power;
  return model;
}

}  // namespace efln
