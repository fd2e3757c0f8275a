#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "efln/analysis.hpp"
#include "efln/experiments.hpp"

using namespace efln;

namespace {

// High-precision quadrature of the three integrands against N(0, 1), lambda = 1.
constexpr double e1_quad = 0.10518378083677688;
constexpr double e2_quad = 0.18956810051319408;
constexpr double e3_quad = -0.02591922125023761;

}  // namespace

TEST(Analysis, IntegrandsAtZeroNoise) {
  const std::vector<double> zeros(10, 0.0);
  const auto m = noise_moments_from_samples(1.0, zeros);
  EXPECT_EQ(m.e1, 0.0);
  EXPECT_EQ(m.e2, 1.0);
  EXPECT_EQ(m.e3, 1.0);
  EXPECT_THROW(noise_moments_from_samples(1.0, std::vector<double>{}), std::invalid_argument);
}

TEST(Analysis, IntegrandsMatchCostDerivatives) {
  for (double lambda : {0.3, 1.0, 50.0}) {
    const auto spec = CostSpec::isr(lambda);
    for (double eta = -3.0; eta <= 3.0; eta += 0.13) {
      const auto v = moment_integrands(lambda, eta);
      const double r = influence(spec, eta);
      const double r1 = influence_d1(spec, eta);
      const double r2 = influence_d2(spec, eta);
      EXPECT_NEAR(v.r2, r * r, 1e-14);
      EXPECT_NEAR(v.r_d1, r1, 1e-14);
      EXPECT_NEAR(v.r_combo, r1 * r1 + r * r2, 1e-13);
    }
  }
}

TEST(Analysis, MomentsInLmsLimit) {
  SeededStream s(1, StreamRole::analysis);
  const auto m = estimate_noise_moments(1e-12, GaussianNoise{30.0, 1.0}, 1000000, s);
  EXPECT_NEAR(m.e1, 1e-3, 1e-5);
  EXPECT_NEAR(m.e2, 1.0, 1e-2);
  EXPECT_NEAR(m.e3, 1.0, 1e-2);
  EXPECT_FALSE(m.heavy_tail_warning);
  EXPECT_EQ(m.samples_used, 1000000u);
}

TEST(Analysis, MomentsAgainstQuadrature) {
  constexpr std::size_t n = 10000000;
  SeededStream s(2, StreamRole::analysis);
  const auto m = estimate_noise_moments(1.0, GaussianNoise{0.0, 1.0}, n, s);
  EXPECT_NEAR(m.e1, e1_quad, 0.005 * e1_quad);
  EXPECT_NEAR(m.e2, e2_quad, 0.005 * e2_quad);

  // E3 cancels to a small mean with a wide integrand; compare within 4 standard errors.
  SeededStream again(2, StreamRole::analysis);
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = moment_integrands(1.0, noise_sample(GaussianNoise{0.0, 1.0}, again)).r_combo;
    sq += c * c;
  }
  const double sd = std::sqrt(sq / static_cast<double>(n) - m.e3 * m.e3);
  EXPECT_NEAR(m.e3, e3_quad, 4.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST(Analysis, MomentGuards) {
  SeededStream s(1);
  EXPECT_THROW(estimate_noise_moments(1.0, GaussianNoise{}, 10, s), std::invalid_argument);
  EXPECT_THROW(estimate_noise_moments(0.0, GaussianNoise{}, min_moment_samples, s), std::invalid_argument);
  const auto heavy = estimate_noise_moments(1.0, AlphaStableNoise{}, min_moment_samples, s);
  EXPECT_TRUE(heavy.heavy_tail_warning);
  EXPECT_TRUE(std::isfinite(heavy.e1) && std::isfinite(heavy.e2) && std::isfinite(heavy.e3));
}

TEST(Analysis, RegressorPowersZeroWeights) {
  SeededStream s(3, StreamRole::analysis);
  const Case1Plant plant;
  const std::vector<double> w(10, 0.0);
  EXPECT_EQ(estimate_regressor_powers(plant, case1_input(), w, plant.q_o, 1000, s).phw, 0.0);
}

TEST(Analysis, RegressorPowersZeroInput) {
  SeededStream s(3, StreamRole::analysis);
  const Case1Plant plant;
  const auto p = estimate_regressor_powers(plant, InputModel::gaussian(0.0, 0.0), plant.weights_block_major(),
                                           plant.q_o, 100, s);
  EXPECT_DOUBLE_EQ(p.pg, 4.0);
  EXPECT_EQ(p.phw, 0.0);
}

TEST(Analysis, RegressorPowerMatchesPerElementOracle) {
  // oracle: squares of the printed expansion entries, averaged over independent draws
  const Case1Plant plant;
  SeededStream s(4, StreamRole::analysis);
  const auto p = estimate_regressor_powers(plant, case1_input(), plant.weights_block_major(), plant.q_o, 200000, s);

  SeededStream o(5, StreamRole::analysis);
  const double pi = std::numbers::pi;
  double acc = 0.0;
  constexpr int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double u = o.standard_normal();
    const double d2 = std::exp(-2.0 * plant.q_o * std::abs(u));
    // per tap: u^2 + d^2 (sin^2 + cos^2)(pi u) + d^2 (sin^2 + cos^2)(2 pi u), evaluated term by term
    const double per_tap = u * u + d2 * std::pow(std::sin(pi * u), 2) + d2 * std::pow(std::cos(pi * u), 2) +
                           d2 * std::pow(std::sin(2 * pi * u), 2) + d2 * std::pow(std::cos(2 * pi * u), 2);
    acc += 2.0 * per_tap;  // two identically distributed taps
  }
  EXPECT_NEAR(p.pg, acc / n, 0.01 * acc / n);
}

TEST(Analysis, TheoryZeroStep) {
  const NoiseMoments m{1e-3, 1.0, 1.0, 100, false};
  const RegressorPowers p{7.0, 0.7, 100};
  const auto r = theoretical_emse(m, p, 0.0, 0.0);
  EXPECT_EQ(r.emse_theory, 0.0);
}

TEST(Analysis, TheoryBranchesAdd) {
  const NoiseMoments m{2e-3, 0.9, 0.8, 100, false};
  const RegressorPowers p{7.0, 0.7, 100};
  const auto r = theoretical_emse(m, p, 0.01, 0.02);
  EXPECT_NEAR(r.emse_w_theory, 0.01 * 2e-3 * 7.0 / (1.8 - 0.01 * 0.8 * 7.0), 1e-18);
  EXPECT_NEAR(r.emse_q_theory, 0.02 * 2e-3 * 0.7 / (1.8 - 0.02 * 0.8 * 0.7), 1e-18);
  EXPECT_EQ(r.emse_theory, r.emse_w_theory + r.emse_q_theory);
}

TEST(Analysis, TheoryValidityError) {
  const NoiseMoments m{1e-3, 1.0, 1.0, 100, false};
  const RegressorPowers p{10.0, 1.0, 100};
  EXPECT_THROW(theoretical_emse(m, p, 0.2, 0.01), ValidityError);
  EXPECT_THROW(theoretical_emse(m, p, 0.01, 2.5), ValidityError);
}

TEST(Analysis, LmsLimitClosedForm) {
  const double sigma2 = 1e-3;
  SeededStream s(6, StreamRole::analysis);
  const auto m = estimate_noise_moments(1e-12, GaussianNoise{30.0, 1.0}, 1000000, s);
  const RegressorPowers p{7.685, 0.695, 1};
  for (double mu : {0.004, 0.01, 0.04}) {
    const double closed = mu * sigma2 * p.pg / (2.0 - mu * p.pg);
    EXPECT_NEAR(theoretical_emse(m, p, mu, 0.0).emse_w_theory, closed, 0.01 * closed);
  }
}

TEST(Analysis, PerfectFilterHasZeroEmse) {
  const Case1Plant plant;
  auto cfg = make_filter_config(Case1Plant::expansion(), CostSpec::isr(1.0), 0.0, 0.0);
  cfg.w0 = plant.weights_block_major();
  cfg.q0 = plant.q_o;
  SeededStream s(7);
  std::vector<double> u(3000);
  for (double& v : u) v = s.standard_normal();
  TrialTrace t;
  t.plant_output = case1_plant_outputs(plant, u);
  std::vector<double> d = t.plant_output;
  for (double& v : d) v += 0.1 * s.standard_normal();
  t.records = run(cfg, u, d);
  const std::vector<TrialTrace> trials{t, t};
  const auto sim = simulated_emse(trials, 1000);
  EXPECT_LT(sim.value, 1e-28);
  EXPECT_EQ(sim.trials_used, 2u);
}

TEST(Analysis, SimulatedEmseCountsDivergence) {
  TrialTrace ok;
  ok.plant_output = {1.0, 1.0, 1.0};
  ok.records = {StepRecord{0.0, 0.0, {}, {}}, StepRecord{0.5, 0.0, {}, {}}, StepRecord{0.0, 0.0, {}, {}}};
  TrialTrace bad;
  bad.diverged = true;
  const std::vector<TrialTrace> trials{ok, bad};
  const auto sim = simulated_emse(trials, 2);
  EXPECT_DOUBLE_EQ(sim.value, (0.25 + 1.0) / 2.0);
  EXPECT_EQ(sim.diverged_trials, 1u);
  EXPECT_EQ(sim.trials_used, 1u);
  EXPECT_THROW(tail_emse(ok.plant_output, ok.records, 4), std::invalid_argument);
  EXPECT_THROW(tail_emse(ok.plant_output, ok.records, 0), std::invalid_argument);
}

TEST(Analysis, Decibels) {
  EXPECT_DOUBLE_EQ(to_db(1e-3), -30.0);
  EXPECT_DOUBLE_EQ(to_db(1.0), 0.0);
}
