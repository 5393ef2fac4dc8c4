#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hearcorners/analytic_spectra.hpp"
#include "hearcorners/classifier.hpp"
#include "hearcorners/corpus.hpp"
#include "hearcorners/fem.hpp"

using namespace hearcorners;

namespace {

AsymptoticFit fake_fit(double a0, double sigma, double window = 0.0) {
  AsymptoticFit f;
  f.a0 = a0;
  f.sigma_a0 = sigma;
  f.a0_window = window;
  return f;
}

}  // namespace

TEST(Decide, OneSidedRule) {
  EXPECT_EQ(decide(fake_fit(0.25, 0.001)).decision, Decision::has_corners);
  EXPECT_EQ(decide(fake_fit(1.0 / 6.0 + 0.002, 0.001)).decision, Decision::smooth);
  EXPECT_EQ(decide(fake_fit(1.0 / 6.0 - 0.004, 0.001)).decision, Decision::indeterminate);
  // Far below the threshold is not evidence of smoothness.
  EXPECT_EQ(decide(fake_fit(0.1, 0.001)).decision, Decision::indeterminate);
  // Within the band but the window probes disagree.
  EXPECT_EQ(decide(fake_fit(1.0 / 6.0, 0.02, 0.02)).decision, Decision::indeterminate);
}

TEST(Decide, MarginAndThreshold) {
  ClassifyOptions o;
  o.chi = 0;
  const auto v = decide(fake_fit(0.05, 0.01), o);
  EXPECT_DOUBLE_EQ(v.threshold, 0.0);
  EXPECT_NEAR(v.margin, 5.0, 1e-12);
  EXPECT_EQ(v.decision, Decision::has_corners);
  o.decision_z = 6.0;
  EXPECT_EQ(decide(fake_fit(0.05, 0.01), o).decision, Decision::smooth);
  EXPECT_EQ(decide(fake_fit(0.05, 0.01, 0.05), o).decision, Decision::indeterminate);
}

TEST(Decide, RejectsImpossibleEulerCharacteristic) {
  ClassifyOptions o;
  o.chi = 2;
  EXPECT_THROW(decide(fake_fit(0.3, 0.01), o), DomainError);
  o.chi = 1;
  o.decision_z = 0.0;
  EXPECT_THROW(decide(fake_fit(0.3, 0.01), o), DomainError);
}

TEST(Decide, OffsetShiftsEstimate) {
  ClassifyOptions o;
  o.a0_offset = -0.2;
  const auto v = decide(fake_fit(0.25, 0.001), o);
  EXPECT_NEAR(v.a0_estimate, 0.05, 1e-15);
  EXPECT_NE(v.decision, Decision::has_corners);
}

TEST(Decision, NamesAndExitCodes) {
  for (auto d : {Decision::has_corners, Decision::smooth, Decision::indeterminate})
    EXPECT_EQ(decision_from_string(to_string(d)), d);
  EXPECT_EQ(exit_code(Decision::smooth), 0);
  EXPECT_EQ(exit_code(Decision::has_corners), 10);
  EXPECT_EQ(exit_code(Decision::indeterminate), 20);
  EXPECT_THROW(decision_from_string("maybe"), ParseError);
}

TEST(Classify, AnalyticPipelines) {
  EXPECT_EQ(classify(rectangle_spectrum(1, 1, 1e5)).decision, Decision::has_corners);
  EXPECT_EQ(classify(sector_spectrum(pi / 2, 1, 1e5)).decision, Decision::has_corners);
  EXPECT_NE(classify(disk_spectrum(1, 1e5)).decision, Decision::has_corners);
}

TEST(Classify, TruncatedSpectrumIsInsufficient) {
  auto s = rectangle_spectrum(1, 1, 1e4);
  s.eigenvalues.resize(10);
  s.cutoff = s.eigenvalues.back();
  EXPECT_THROW(classify(s), InsufficientSpectrum);
}

TEST(AngleFunction, MinimumAtStraightAngles) {
  const std::vector<double> ones(5, 1.0);
  EXPECT_DOUBLE_EQ(f_corner(ones), 10.0);
  EXPECT_DOUBLE_EQ(a0_from_angle_ratios(ones), 1.0 / 6.0);
  EXPECT_THROW(f_corner(std::vector<double>{0.5, 0.0}), DomainError);
  EXPECT_DOUBLE_EQ(a0_lower_bound(4), 1.0 / 6.0);
  EXPECT_THROW(a0_lower_bound(-1), DomainError);
}

TEST(AngleFunction, StrictlyAboveMinimumOffOnes) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(0.01, 1.99);
  std::uniform_int_distribution<int> n(1, 12);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> v(static_cast<std::size_t>(n(rng)));
    for (double& e : v) e = x(rng);
    EXPECT_GT(f_corner(v), 2.0 * static_cast<double>(v.size()));
    EXPECT_GT(a0_from_angle_ratios(v), 1.0 / 6.0);
  }
}

TEST(AngleFunction, MatchesSquareAndLShape) {
  EXPECT_NEAR(a0_from_angle_ratios(std::vector<double>(4, 0.5)), 0.25, 1e-15);
  EXPECT_NEAR(a0_from_angle_ratios(std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5, 1.5}), 5.0 / 18.0, 1e-15);
}

TEST(Isospectral, ComparesLeadingEigenvalues) {
  const auto a = rectangle_spectrum(2, 1, 2000);
  const auto b = dilated(rectangle_spectrum(4, 2, 500), 0.5);
  const auto same = isospectral_compare(a, b, 50, 1e-12);
  EXPECT_TRUE(same.isospectral);
  const auto c = rectangle_spectrum(1.9, 1.05, 2000);
  const auto diff = isospectral_compare(a, c, 50, 1e-6);
  EXPECT_FALSE(diff.isospectral);
  EXPECT_GE(diff.worst_index, 1u);
  EXPECT_LE(diff.worst_index, 50u);
  EXPECT_THROW(isospectral_compare(a, c, 100000, 1e-6), DomainError);
}

TEST(Decide, ThresholdFlipsMonotonically) {
  // Decisions along a0 = 1/6 + delta: indeterminate, smooth, has_corners, in that order.
  const double sigma = 0.002, z = 3.0;
  int stage = 0;
  for (int i = -400; i <= 400; ++i) {
    const double delta = i * 2.5e-5;
    const Decision d = decide(fake_fit(1.0 / 6.0 + delta, sigma)).decision;
    const int s = d == Decision::indeterminate ? (delta < 0 ? 0 : 3) : d == Decision::smooth ? 1 : 2;
    EXPECT_GE(s, stage) << delta;
    stage = s;
    if (delta < -z * sigma - 1e-12) EXPECT_EQ(d, Decision::indeterminate) << delta;
    if (std::abs(delta) < z * sigma - 1e-12) EXPECT_EQ(d, Decision::smooth) << delta;
    if (delta > z * sigma + 1e-12) EXPECT_EQ(d, Decision::has_corners) << delta;
  }
}

TEST(AngleFunction, AgreesWithTheoreticalA0OnRandomPolygons) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> sides(3, 14);
  for (int i = 0; i < 500; ++i) {
    const DomainSpec d = corpus::random_star_polygon(rng, sides(rng));
    const auto c = theoretical_coefficients(d);
    std::vector<double> x;
    for (const auto& k : c.corners) x.push_back(k.theta / pi);
    EXPECT_NEAR(a0_from_angle_ratios(x), c.a0, 1e-12);
    EXPECT_GT(c.a0, a0_lower_bound(static_cast<int>(x.size())));
  }
}

TEST(Classify, VerdictIsScaleInvariant) {
  const auto s = rectangle_spectrum(1, 1, 2e5);
  const auto a = classify(s);
  const auto b = classify(dilated(s, 2.0));
  EXPECT_EQ(a.decision, b.decision);
  EXPECT_NEAR(a.a0_estimate, b.a0_estimate, 1e-9);
}

TEST(Isospectral, TrivialCases) {
  const auto sq = rectangle_spectrum(1, 1, 2000);
  const auto self = isospectral_compare(sq, sq, 30, 0.0);
  EXPECT_TRUE(self.isospectral);
  EXPECT_EQ(self.max_deviation, 0.0);
  const auto disk = isospectral_compare(sq, disk_spectrum(1, 2000), 30, 1e-3);
  EXPECT_FALSE(disk.isospectral);
  EXPECT_EQ(disk.first_mismatch, 1u);
  EXPECT_EQ(self.first_mismatch, 0u);
}

namespace {

Spectrum lowest_modes(const DomainSpec& d, double h, std::size_t count) {
  Spectrum s;
  s.eigenvalues = solve_lowest(assemble(mesh_domain(d, h)), count).values;
  s.cutoff = s.eigenvalues.back();
  return s;
}

}  // namespace

TEST(Isospectral, SevenHalfSquareDrums) {
  const auto [a, b] = corpus::isospectral_drums();
  EXPECT_NEAR(area(a), 3.5, 1e-14);
  EXPECT_NEAR(area(b), 3.5, 1e-14);
  EXPECT_NEAR(perimeter(a), perimeter(b), 1e-14);
  const auto c = isospectral_compare(lowest_modes(a, 0.01, 20), lowest_modes(b, 0.01, 20), 20, 1e-2);
  EXPECT_TRUE(c.isospectral);
  EXPECT_LE(c.max_deviation, 1e-4);
}

TEST(Isospectral, NearMissPairIsResolved) {
  // Two other seven-half-square regions. Their spectra differ by about 0.6%, far
  // above the discretization error at this mesh size.
  const DomainSpec a = shapes::polygon({{0, 0}, {1, 0}, {2, 1}, {2, 0}, {3, 1}, {4, 1}, {3, 2}, {2, 2}});
  const DomainSpec b = shapes::polygon({{0, 0}, {1, 0}, {2, 1}, {3, 0}, {3, 1}, {4, 1}, {3, 2}, {2, 2}});
  const auto c = isospectral_compare(lowest_modes(a, 0.03, 20), lowest_modes(b, 0.03, 20), 20, 1e-3);
  EXPECT_FALSE(c.isospectral);
  EXPECT_GT(c.max_deviation, 3e-3);
}
