#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace efln {

enum class ExpansionKind { efln, tfln, sovf };

inline std::string_view to_string(ExpansionKind kind) {
  switch (kind) {
    case ExpansionKind::efln: return "efln";
    case ExpansionKind::tfln: return "tfln";
    case ExpansionKind::sovf: return "sovf";
  }
  return "?";
}

/// Tapped-delay-line expansion settings. `taps` is P, `order` is N.
struct ExpansionConfig {
  std::size_t taps = 1;
  std::size_t order = 1;
  ExpansionKind kind = ExpansionKind::efln;

  void validate() const {
    if (taps == 0) throw std::invalid_argument("expansion: taps must be >= 1");
    if (order == 0) throw std::invalid_argument("expansion: order must be >= 1");
  }

  /// Length L of the expanded vector.
  std::size_t dimension() const {
    if (kind == ExpansionKind::sovf) return taps + taps * (taps + 1) / 2;
    return taps * (2 * order + 1);
  }

  /// Number of blocks of `taps` entries (2N+1); meaningless for SOVF.
  std::size_t blocks() const { return 2 * order + 1; }

  bool has_exponential_factor() const { return kind == ExpansionKind::efln; }
};

/// Expanded input g(i) and its derivative h(i) = dg/dq.
struct ExpandedRegressor {
  std::vector<double> g;
  std::vector<double> h;
};

/// Flat index of (block, tap) in the block-major trigonometric layout.
/// Block 0 is the raw taps, block 2n-1 is sin(n pi u), block 2n is cos(n pi u).
constexpr std::size_t flat_index(std::size_t block, std::size_t tap, std::size_t taps) {
  return block * taps + tap;
}

/// Writes the expansion into preallocated buffers. `window` is [u(i), u(i-1), ..., u(i-P+1)].
/// `g` and `h` must already have length cfg.dimension().
inline void expand_into(const ExpansionConfig& cfg, std::span<const double> window, double q,
                        std::span<double> g, std::span<double> h) {
  const std::size_t taps = cfg.taps;
  if (window.size() != taps) {
    throw std::invalid_argument("expansion: window has " + std::to_string(window.size()) +
                                " samples, expected " + std::to_string(taps));
  }
  const std::size_t dim = cfg.dimension();
  if (g.size() != dim || h.size() != dim) {
    throw std::invalid_argument("expansion: output buffers must have length " + std::to_string(dim));
  }

  if (cfg.kind == ExpansionKind::sovf) {
    std::size_t k = 0;
    for (std::size_t p = 0; p < taps; ++p) g[k++] = window[p];
    for (std::size_t a = 0; a < taps; ++a) {
      for (std::size_t b = a; b < taps; ++b) g[k++] = window[a] * window[b];
    }
    std::fill(h.begin(), h.end(), 0.0);
    return;
  }

  const bool exponential = cfg.kind == ExpansionKind::efln;
  for (std::size_t p = 0; p < taps; ++p) {
    const double u = window[p];
    const double mag = std::abs(u);
    const double damp = exponential ? std::exp(-q * mag) : 1.0;
    const double slope = exponential ? -mag : 0.0;
    g[flat_index(0, p, taps)] = u;
    h[flat_index(0, p, taps)] = 0.0;
    for (std::size_t n = 1; n <= cfg.order; ++n) {
      const double arg = static_cast<double>(n) * std::numbers::pi * u;
      const double s = damp * std::sin(arg);
      const double c = damp * std::cos(arg);
      const std::size_t sb = flat_index(2 * n - 1, p, taps);
      const std::size_t cb = flat_index(2 * n, p, taps);
      g[sb] = s;
      g[cb] = c;
      h[sb] = slope * s;
      h[cb] = slope * c;
    }
  }
}

inline ExpandedRegressor expand(const ExpansionConfig& cfg, std::span<const double> window, double q) {
  cfg.validate();
  ExpandedRegressor out;
  out.g.resize(cfg.dimension());
  out.h.resize(cfg.dimension());
  expand_into(cfg, window, q, out.g, out.h);
  return out;
}

}  // namespace efln
