#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "efln/expansion.hpp"
#include "efln/noise.hpp"

namespace efln {

/// EFLN-structured unknown system with P = 2, N = 2.
///
/// The weights are stored in tap-major order: for each tap, the raw sample followed by
/// sin(pi u), cos(pi u), sin(2 pi u), cos(2 pi u), all damped by exp(-q_o |u|).
/// `index_map[k]` is the position of tap-major entry k inside the block-major expansion.
struct Case1Plant {
  static constexpr std::size_t taps = 2;
  static constexpr std::size_t order = 2;
  static constexpr std::size_t dimension = taps * (2 * order + 1);

  std::array<double, dimension> w_o{0.3, 0.6, -0.2, 0.05, -0.27, -0.3, 0.4, -0.1, 0.01, 0.25};
  double q_o = -0.2;
  std::array<std::size_t, dimension> index_map = make_index_map();

  static constexpr ExpansionConfig expansion() { return {taps, order, ExpansionKind::efln}; }

  static constexpr std::array<std::size_t, dimension> make_index_map() {
    std::array<std::size_t, dimension> map{};
    constexpr std::size_t per_tap = 2 * order + 1;
    for (std::size_t k = 0; k < dimension; ++k) {
      const std::size_t tap = k / per_tap;
      const std::size_t block = k % per_tap;
      map[k] = flat_index(block, tap, taps);
    }
    return map;
  }

  /// w_o rearranged into the expansion module's block-major layout.
  std::vector<double> weights_block_major() const {
    std::vector<double> w(dimension, 0.0);
    for (std::size_t k = 0; k < dimension; ++k) w[index_map[k]] = w_o[k];
    return w;
  }
};

inline double case1_output(const Case1Plant& plant, std::span<const double> window) {
  if (window.size() != Case1Plant::taps) throw std::invalid_argument("case1 plant: window must hold 2 samples");
  std::array<double, Case1Plant::dimension> g{};
  std::array<double, Case1Plant::dimension> h{};
  expand_into(Case1Plant::expansion(), window, plant.q_o, g, h);
  double y = 0.0;
  for (std::size_t k = 0; k < Case1Plant::dimension; ++k) y += plant.w_o[k] * g[plant.index_map[k]];
  return y;
}

/// Asymmetric loudspeaker distortion: y = beta [sigmoid(rho kappa) - 0.5], kappa = 1.5u - 0.3u^2.
struct LoudspeakerPlant {
  double beta = 2.0;
  double rho_pos = 4.0;
  double rho_neg = 0.5;
};

inline double loudspeaker_output(const LoudspeakerPlant& plant, double u) {
  const double kappa = 1.5 * u - 0.3 * u * u;
  const double rho = kappa > 0.0 ? plant.rho_pos : plant.rho_neg;
  return plant.beta * (1.0 / (1.0 + std::exp(-rho * kappa)) - 0.5);
}

/// Distribution of the excitation signal u(i).
struct InputModel {
  enum class Kind { gaussian, uniform } kind = Kind::gaussian;
  double a = 0.0;  // mean (gaussian) or lower bound (uniform)
  double b = 1.0;  // variance (gaussian) or upper bound (uniform)

  static InputModel gaussian(double mean, double variance) { return {Kind::gaussian, mean, variance}; }
  static InputModel uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }

  double sample(SeededStream& stream) const {
    if (kind == Kind::uniform) return stream.uniform(a, b);
    return a + std::sqrt(b) * stream.standard_normal();
  }
};

/// Case 1 excitation: zero-mean, unit-variance Gaussian.
inline InputModel case1_input() { return InputModel::gaussian(0.0, 1.0); }
/// Case 2 excitation: uniform on [-0.5, 0.5].
inline InputModel case2_input() { return InputModel::uniform(-0.5, 0.5); }

/// Two-column (input, desired) time series replayed from a CSV log.
struct CsvPlant {
  std::string path;
  double sample_rate_hz = 10000.0;
};

struct SeriesPair {
  std::vector<double> inputs;
  std::vector<double> desired;
};

class CsvError : public std::runtime_error {
 public:
  enum class Kind { io, parse, length_mismatch };

  CsvError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  Kind kind() const noexcept { return kind_; }
  /// 1-based line number, 0 for file-level errors.
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Parses "input,desired" rows. A single non-numeric first row is treated as a header.
inline SeriesPair parse_csv_series(std::istream& in, const std::string& source = "<stream>") {
  SeriesPair out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      if (line_no == 1 && comma != std::string_view::npos) continue;  // header with extra columns
      throw CsvError(CsvError::Kind::length_mismatch, line_no,
                     source + ":" + std::to_string(line_no) + ": expected exactly two columns");
    }
    double x = 0.0;
    double y = 0.0;
    const bool ok_x = detail::parse_double(row.substr(0, comma), x);
    const bool ok_y = detail::parse_double(row.substr(comma + 1), y);
    if (!ok_x || !ok_y) {
      if (line_no == 1 && out.inputs.empty()) continue;
      throw CsvError(CsvError::Kind::parse, line_no, source + ":" + std::to_string(line_no) + ": non-numeric value");
    }
    out.inputs.push_back(x);
    out.desired.push_back(y);
  }
  return out;
}

inline SeriesPair csv_load(const CsvPlant& plant) {
  std::ifstream in(plant.path);
  if (!in) throw CsvError(CsvError::Kind::io, 0, "cannot open " + plant.path);
  return parse_csv_series(in, plant.path);
}

inline void write_csv_series(std::ostream& out, std::span<const double> inputs, std::span<const double> desired,
                             std::string_view header = "input,desired") {
  if (inputs.size() != desired.size()) throw std::invalid_argument("csv: column lengths differ");
  if (!header.empty()) out << header << '\n';
  char buf[64];
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto r = std::to_chars(buf, buf + sizeof buf, inputs[i]);
    out.write(buf, r.ptr - buf);
    out << ',';
    r = std::to_chars(buf, buf + sizeof buf, desired[i]);
    out.write(buf, r.ptr - buf);
    out << '\n';
  }
}

}  // namespace efln
