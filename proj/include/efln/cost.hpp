#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace efln {

enum class CostKind { isr, lms, mcc, tanh };

inline std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::isr: return "isr";
    case CostKind::lms: return "lms";
    case CostKind::mcc: return "mcc";
    case CostKind::tanh: return "tanh";
  }
  return "?";
}

/// Error cost. `param` is lambda for ISR and the kernel width sigma for MCC; unused otherwise.
struct CostSpec {
  CostKind kind = CostKind::isr;
  double param = 1.0;

  static CostSpec isr(double lambda) { return {CostKind::isr, lambda}; }
  static CostSpec lms() { return {CostKind::lms, 0.0}; }
  static CostSpec mcc(double sigma) { return {CostKind::mcc, sigma}; }
  static CostSpec tanh() { return {CostKind::tanh, 0.0}; }

  double lambda() const { return param; }
  double sigma() const { return param; }

  void validate() const {
    if ((kind == CostKind::isr || kind == CostKind::mcc) && !(param > 0.0 && std::isfinite(param))) {
      throw std::invalid_argument(std::string("cost: ") + std::string(to_string(kind)) +
                                  " parameter must be positive and finite");
    }
  }
};

inline double cost_value(const CostSpec& spec, double e) {
  const double e2 = e * e;
  switch (spec.kind) {
    case CostKind::isr: return 0.5 * e2 / std::sqrt(1.0 + spec.lambda() * e2 * e2);
    case CostKind::lms: return 0.5 * e2;
    case CostKind::mcc: {
      const double s2 = spec.sigma() * spec.sigma();
      return -s2 * std::expm1(-e2 / (2.0 * s2));
    }
    case CostKind::tanh: {
      // ln cosh(e) without overflow for large |e|
      const double a = std::abs(e);
      return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    }
  }
  return 0.0;
}

/// Influence function r(e) = dQ/de, the per-sample gradient weight.
inline double influence(const CostSpec& spec, double e) {
  switch (spec.kind) {
    case CostKind::isr: {
      const double t = 1.0 + spec.lambda() * e * e * e * e;
      return e / (t * std::sqrt(t));
    }
    case CostKind::lms: return e;
    case CostKind::mcc: {
      const double s2 = spec.sigma() * spec.sigma();
      return e * std::exp(-e * e / (2.0 * s2));
    }
    case CostKind::tanh: return std::tanh(e);
  }
  return 0.0;
}

namespace detail {
inline void require_isr(const CostSpec& spec, const char* what) {
  if (spec.kind != CostKind::isr) {
    throw std::invalid_argument(std::string(what) + " is only defined for the ISR cost");
  }
}
}  // namespace detail

/// r'(e) = (1 - 5 lambda e^4)(1 + lambda e^4)^(-5/2).
inline double influence_d1(const CostSpec& spec, double e) {
  detail::require_isr(spec, "influence_d1");
  const double le4 = spec.lambda() * e * e * e * e;
  const double t = 1.0 + le4;
  return (1.0 - 5.0 * le4) / (t * t * std::sqrt(t));
}

/// r''(e) = -30 lambda e^3 (1 - lambda e^4)(1 + lambda e^4)^(-7/2).
inline double influence_d2(const CostSpec& spec, double e) {
  detail::require_isr(spec, "influence_d2");
  const double lambda = spec.lambda();
  const double e3 = e * e * e;
  const double le4 = lambda * e3 * e;
  const double t = 1.0 + le4;
  return -30.0 * lambda * e3 * (1.0 - le4) / (t * t * t * std::sqrt(t));
}

/// sup_e |r(e)| for ISR, attained at |e| = (5 lambda)^(-1/4).
inline double isr_peak_influence(double lambda) {
  const double e = std::pow(5.0 * lambda, -0.25);
  return influence(CostSpec::isr(lambda), e);
}

}  // namespace efln
