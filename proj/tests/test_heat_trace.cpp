#include <cmath>

#include <gtest/gtest.h>

#include "hearcorners/analytic_spectra.hpp"
#include "hearcorners/heat_trace.hpp"

using namespace hearcorners;

namespace {

// Square trace as a product of one-dimensional theta sums.
double square_trace(double t) {
  double one = 0.0;
  for (int m = 1; m < 200; ++m) one += std::exp(-pi * pi * m * m * t);
  return one * one;
}

}  // namespace

TEST(HeatTrace, SquareProductFormula) {
  const auto s = rectangle_spectrum(1, 1, 2e5);
  const auto samples = evaluate_trace(s, {0.1, 0.01, 0.001});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(samples.h[i], square_trace(samples.t[i]), 1e-12 * samples.h[i]);
  // Direct double-series summation gives 0.1537761772991...
  EXPECT_NEAR(samples.h[0], 0.1537761773, 1e-10);
}

TEST(HeatTrace, TailBoundCoversTruncation) {
  const auto full = rectangle_spectrum(1, 1, 2e5);
  const auto cut = rectangle_spectrum(1, 1, 2e4);
  const auto grid = geometric_grid(2e-4, 0.05, 30);
  const auto a = evaluate_trace(full, grid), b = evaluate_trace(cut, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double missing = a.h[i] - b.h[i];
    EXPECT_GE(missing, 0.0);
    EXPECT_LE(missing, b.tail_bound[i] + 1e-15) << grid[i];
  }
}

TEST(HeatTrace, SquareExpansionIsExponentiallyAccurate) {
  const auto c = theoretical_coefficients(shapes::unit_square());
  for (double t : {1e-3, 5e-3, 2e-2}) EXPECT_NEAR(square_trace(t), expansion_value(c, t), 1e-12 * square_trace(t));
}

TEST(HeatTrace, ScalingLaw) {
  const auto a = evaluate_trace(disk_spectrum(1, 4e4), {0.01, 0.02});
  const auto b = evaluate_trace(disk_spectrum(2, 1e4), {0.04, 0.08});
  EXPECT_NEAR(a.h[0], b.h[0], 1e-10 * a.h[0]);
  EXPECT_NEAR(a.h[1], b.h[1], 1e-10 * a.h[1]);
}

TEST(HeatTrace, DecreasingInT) {
  const auto s = equilateral_triangle_spectrum(1, 1e5);
  const auto samples = evaluate_trace(s, geometric_grid(1e-3, 1.0, 40));
  for (std::size_t i = 1; i < samples.size(); ++i) EXPECT_LT(samples.h[i], samples.h[i - 1]);
}

TEST(HeatTrace, CornerTerm) {
  EXPECT_NEAR(corner_term(pi / 2), 1.0 / 16.0, 1e-15);
  EXPECT_NEAR(corner_term(pi / 3), 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(corner_term(pi), 0.0, 1e-16);
  EXPECT_LT(corner_term(1.5 * pi), 0.0);
  EXPECT_NEAR(corner_term_with_turning(pi) - 1.0 / 12.0, 0.0, 1e-16);
  EXPECT_THROW(corner_term(0.0), DomainError);
  EXPECT_THROW(corner_term(two_pi), DomainError);
}

TEST(HeatTrace, SamplesRoundTrip) {
  const auto s = evaluate_trace(rectangle_spectrum(2, 1, 1e4), geometric_grid(1e-3, 0.05, 12));
  const auto r = parse_trace_samples(format_trace_samples(s));
  EXPECT_EQ(r.t, s.t);
  EXPECT_EQ(r.h, s.h);
  EXPECT_EQ(r.tail_bound, s.tail_bound);
}

TEST(HeatTrace, RejectsBadInput) {
  EXPECT_THROW(geometric_grid(0.1, 0.01, 10), DomainError);
  EXPECT_THROW(evaluate_trace(Spectrum{}, {0.1}), InsufficientSpectrum);
  EXPECT_THROW(evaluate_trace(rectangle_spectrum(1, 1, 100), {-1.0}), DomainError);
}
