#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hearcorners/classifier.hpp"
#include "hearcorners/corpus.hpp"
#include "hearcorners/geometry.hpp"
#include "hearcorners/heat_trace.hpp"

using namespace hearcorners;

namespace {

std::size_t count_theta(const std::vector<Corner>& cs, double theta) {
  std::size_t n = 0;
  for (const auto& c : cs) n += std::abs(c.theta - theta) < 1e-12;
  return n;
}

}  // namespace

TEST(Geometry, SquareMeasures) {
  const auto d = shapes::unit_square();
  EXPECT_DOUBLE_EQ(area(d), 1.0);
  EXPECT_DOUBLE_EQ(perimeter(d), 4.0);
  EXPECT_NEAR(diameter(d), std::sqrt(2.0), 1e-12);
  const auto cs = detect_corners(d);
  ASSERT_EQ(cs.size(), 4u);
  EXPECT_EQ(count_theta(cs, pi / 2), 4u);
  EXPECT_EQ(d.euler_characteristic(), 1);
}

TEST(Geometry, LShapeHasOneReentrantCorner) {
  const auto d = shapes::l_shape();
  EXPECT_DOUBLE_EQ(area(d), 3.0);
  EXPECT_DOUBLE_EQ(perimeter(d), 8.0);
  const auto cs = detect_corners(d);
  ASSERT_EQ(cs.size(), 6u);
  EXPECT_EQ(count_theta(cs, pi / 2), 5u);
  EXPECT_EQ(count_theta(cs, 1.5 * pi), 1u);
}

TEST(Geometry, DiskIsSmooth) {
  const auto d = shapes::disk(2.0);
  EXPECT_NEAR(area(d), 4.0 * pi, 1e-12);
  EXPECT_NEAR(perimeter(d), 4.0 * pi, 1e-12);
  EXPECT_TRUE(detect_corners(d).empty());
  EXPECT_NEAR(curvature_integral(d), two_pi, 1e-12);
}

TEST(Geometry, AnnulusHasEulerCharacteristicZero) {
  const auto d = shapes::annulus(1.0, 0.5);
  EXPECT_EQ(d.euler_characteristic(), 0);
  EXPECT_NEAR(area(d), 0.75 * pi, 1e-12);
  EXPECT_NEAR(perimeter(d), 3.0 * pi, 1e-12);
  EXPECT_NEAR(curvature_integral(d), 0.0, 1e-12);
}

TEST(Geometry, EllipseMeasuresFromQuadrature) {
  const auto d = shapes::ellipse(1.5, 1.0);
  EXPECT_NEAR(area(d), 1.5 * pi, 1e-9);
  // Ramanujan's second approximation is good to ~1e-10 at this eccentricity.
  const double h = std::pow(0.5 / 2.5, 2);
  const double ramanujan = pi * 2.5 * (1 + 3 * h / (10 + std::sqrt(4 - 3 * h)));
  EXPECT_NEAR(perimeter(d), ramanujan, 1e-8);
  EXPECT_TRUE(detect_corners(d).empty());
  EXPECT_NEAR(curvature_integral(d), two_pi, 1e-8);
}

TEST(Geometry, GaussBonnetOnCorpusDomains) {
  for (const auto& [name, d] : corpus::detail::exact_segment_domains())
    EXPECT_LE(gauss_bonnet_check(d), 1e-8) << name;
  EXPECT_LE(gauss_bonnet_check(shapes::ellipse(2.0, 0.7)), 1e-8);
}

TEST(Geometry, RejectsSelfIntersection) {
  try {
    shapes::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}});
    FAIL() << "bow tie accepted";
  } catch (const InvalidDomain& e) {
    EXPECT_NE(std::string(e.what()).find("loop 0"), std::string::npos) << e.what();
  }
}

TEST(Geometry, RejectsClockwiseOuterBoundary) {
  EXPECT_THROW(DomainSpec({shapes::polygon_loop({{0, 0}, {0, 1}, {1, 1}, {1, 0}})}), InvalidDomain);
  const auto hole = shapes::polygon_loop({{0.2, 0.2}, {0.4, 0.2}, {0.4, 0.4}, {0.2, 0.4}});
  EXPECT_THROW(DomainSpec({shapes::unit_square().loops()[0], hole}), InvalidDomain);
}

TEST(Geometry, RejectsOpenLoop) {
  std::vector<Segment> segs{Segment::line({0, 0}, {1, 0}), Segment::line({1, 0}, {1, 1}),
                            Segment::line({1, 1}, {0, 0.5})};
  EXPECT_THROW(DomainSpec({BoundaryLoop(segs)}), InvalidDomain);
}

TEST(Geometry, RejectsHoleOutsideOuter) {
  auto outer = shapes::polygon_loop({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  auto hole = shapes::polygon_loop({{2, 2}, {2, 3}, {3, 3}, {3, 2}});
  EXPECT_THROW(DomainSpec({outer, hole}), InvalidDomain);
}

TEST(Geometry, ContainsPoint) {
  const auto d = shapes::l_shape();
  EXPECT_TRUE(contains(d, {0.5, 0.5}));
  EXPECT_TRUE(contains(d, {0.5, 1.5}));
  EXPECT_FALSE(contains(d, {1.5, 1.5}));
  EXPECT_FALSE(contains(shapes::square_with_hole(), {0.5, 0.5}));
}

TEST(Geometry, TheoreticalA0OfReferenceDomains) {
  EXPECT_NEAR(theoretical_coefficients(shapes::unit_square()).a0, 0.25, 1e-14);
  EXPECT_NEAR(theoretical_coefficients(shapes::l_shape()).a0, 5.0 / 18.0, 1e-14);
  EXPECT_NEAR(theoretical_coefficients(shapes::equilateral_triangle()).a0, 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(theoretical_coefficients(shapes::quarter_disk()).a0, 11.0 / 48.0, 1e-14);
  EXPECT_NEAR(theoretical_coefficients(shapes::half_disk()).a0, 5.0 / 24.0, 1e-14);
  EXPECT_NEAR(theoretical_coefficients(shapes::disk()).a0, 1.0 / 6.0, 1e-14);
  EXPECT_NEAR(theoretical_coefficients(shapes::annulus()).a0, 0.0, 1e-14);
  EXPECT_NEAR(theoretical_coefficients(shapes::square_with_hole()).a0, 1.0 / 9.0, 1e-14);
  EXPECT_NEAR(theoretical_coefficients(shapes::ellipse(1.5, 1.0)).a0, 1.0 / 6.0, 1e-9);
}

TEST(Geometry, CurvedCornerRoutesAgree) {
  for (double theta : {0.3, pi / 3, 2.0, 1.5 * pi, 5.9}) {
    const auto c = theoretical_coefficients(shapes::sector(theta));
    EXPECT_NEAR(c.a0_curvature_route, c.a0_angle_route, 1e-12) << theta;
  }
}

TEST(Geometry, RegularPolygonTable) {
  for (int n = 3; n <= 12; ++n)
    EXPECT_NEAR(theoretical_coefficients(shapes::regular_polygon(n)).a0, corpus::regular_polygon_a0(n), 1e-12) << n;
  EXPECT_DOUBLE_EQ(corpus::regular_polygon_a0(4), 0.25);
}

TEST(GeometryProperty, SimilarityInvariance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3), s(0.1, 5);
  std::uniform_int_distribution<int> n(3, 10);
  for (int i = 0; i < 200; ++i) {
    const auto d = corpus::random_star_polygon(rng, n(rng));
    const Similarity m{s(rng), u(rng), {u(rng), u(rng)}};
    const auto e = transformed(d, m);
    const auto c0 = theoretical_coefficients(d), c1 = theoretical_coefficients(e);
    EXPECT_NEAR(area(e), m.scale * m.scale * area(d), 1e-10 * area(e));
    EXPECT_NEAR(perimeter(e), m.scale * perimeter(d), 1e-10 * perimeter(e));
    EXPECT_NEAR(c1.a0, c0.a0, 1e-10);
    EXPECT_EQ(c1.corners.size(), c0.corners.size());
  }
}

TEST(GeometryProperty, RandomPolygonsExceedSmoothValue) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> n(3, 14);
  for (int i = 0; i < 500; ++i) {
    const auto d = corpus::random_star_polygon(rng, n(rng));
    const auto c = theoretical_coefficients(d);
    ASSERT_GT(c.a0, 1.0 / 6.0);
    std::vector<double> x;
    for (const auto& corner : c.corners) x.push_back(corner.theta / pi);
    ASSERT_GT(f_corner(x), 2.0 * static_cast<double>(x.size()));
    ASSERT_NEAR(a0_from_angle_ratios(x), c.a0, 1e-12);
    ASSERT_LE(gauss_bonnet_check(d), 1e-10);
  }
}
