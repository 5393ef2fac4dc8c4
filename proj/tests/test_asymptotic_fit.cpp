#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hearcorners/analytic_spectra.hpp"
#include "hearcorners/asymptotic_fit.hpp"

using namespace hearcorners;

namespace {

TraceSamples synthetic(double am1, double amh, double a0, double ah, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  TraceSamples s;
  s.t = geometric_grid(1e-4, 1e-2, 60);
  for (double t : s.t) {
    const double v = am1 / t + amh / std::sqrt(t) + a0 + ah * std::sqrt(t);
    s.h.push_back(v * (1.0 + noise * n(rng)));
    s.tail_bound.push_back(0.0);
    s.flagged.push_back(false);
  }
  return s;
}

}  // namespace

TEST(Fit, RecoversExactSyntheticCoefficients) {
  const auto f = fit_expansion(synthetic(0.1, -0.3, 0.21, 0.05, 0.0, 1));
  EXPECT_NEAR(f.a_minus1, 0.1, 1e-12);
  EXPECT_NEAR(f.a_minus_half, -0.3, 1e-10);
  EXPECT_NEAR(f.a0, 0.21, 1e-8);
  EXPECT_NEAR(f.a_half, 0.05, 1e-6);
  EXPECT_LE(f.max_relative_residual, 1e-12);
}

TEST(Fit, UncertaintyCoversNoise) {
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto f = fit_expansion(synthetic(0.1, -0.3, 0.21, 0.05, 1e-7, seed));
    covered += std::abs(f.a0 - 0.21) <= 3.0 * f.sigma_a0;
  }
  EXPECT_GE(covered, 38);
}

TEST(Fit, AssistedModePinsLeadingTerms) {
  FitOptions o;
  o.pinned_area = 4 * pi * 0.1;
  o.pinned_perimeter = 0.3 * 8 * std::sqrt(pi);
  const auto f = fit_expansion(synthetic(0.1, -0.3, 0.21, 0.05, 0.0, 1), o);
  EXPECT_TRUE(f.assisted);
  EXPECT_DOUBLE_EQ(f.a_minus1, 0.1);
  EXPECT_NEAR(f.a_minus_half, -0.3, 1e-15);
  EXPECT_NEAR(f.a0, 0.21, 1e-10);
  EXPECT_EQ(f.sigma_a_minus1, 0.0);
  FitOptions half;
  half.pinned_area = 1.0;
  EXPECT_THROW(fit_expansion(synthetic(0.1, -0.3, 0.21, 0.05, 0.0, 1), half), FitError);
}

TEST(Fit, WindowFollowsCutoff) {
  const auto s = rectangle_spectrum(1, 1, 2e5);
  const auto w = choose_window(s);
  EXPECT_DOUBLE_EQ(w.t_min, 12.0 / 2e5);
  EXPECT_GE(w.t_max / w.t_min, 8.0);
  EXPECT_EQ(w.grid.size(), 60u);
  WindowOptions o;
  o.kappa = 20;
  EXPECT_DOUBLE_EQ(choose_window(s, o).t_min, 20.0 / 2e5);
}

TEST(Fit, ShortSpectrumNamesTheNeededCutoff) {
  const auto s = rectangle_spectrum(1, 1, 300);
  try {
    fit_spectrum(s);
    FAIL() << "fit accepted a 10-mode spectrum";
  } catch (const InsufficientSpectrum& e) {
    EXPECT_GT(e.required_cutoff(), 300.0);
  }
}

TEST(Fit, BlindSquare) {
  const auto f = fit_spectrum(rectangle_spectrum(1, 1, 2e5));
  EXPECT_NEAR(f.a0, 0.25, 0.01);
  EXPECT_NEAR(f.implied_area(), 1.0, 0.005);
  EXPECT_NEAR(f.implied_perimeter(), 4.0, 0.04);
  EXPECT_GT(f.sigma_a0, 0.0);
  EXPECT_LE(f.sigma_a0, 0.01);
}

TEST(Fit, ScaleInvariantA0) {
  const auto a = fit_spectrum(rectangle_spectrum(2, 1, 1e5));
  const auto b = fit_spectrum(dilated(rectangle_spectrum(2, 1, 1e5), 3.0));
  EXPECT_NEAR(a.a0, b.a0, 1e-6);
  EXPECT_NEAR(b.implied_area(), 9.0 * a.implied_area(), 1e-6 * b.implied_area());
}

TEST(Fit, UncertaintyComponentsAddInQuadrature) {
  const auto f = fit_spectrum(disk_spectrum(1, 3e4));
  EXPECT_NEAR(f.sigma_a0 * f.sigma_a0,
              f.a0_statistical * f.a0_statistical + f.a0_window * f.a0_window + f.a0_truncation * f.a0_truncation,
              1e-12);
}
