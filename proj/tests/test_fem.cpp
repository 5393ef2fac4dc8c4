#include <cmath>

#include <gtest/gtest.h>

#include "hearcorners/analytic_spectra.hpp"
#include "hearcorners/fem.hpp"

using namespace hearcorners;

namespace {

std::vector<double> square_exact(std::size_t n) {
  const auto s = rectangle_spectrum(1, 1, 2000);
  return {s.eigenvalues.begin(), s.eigenvalues.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace

TEST(FemElements, ReferenceTriangle) {
  const auto k = element_stiffness({0, 0}, {1, 0}, {0, 1});
  const double K[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  const auto m = element_mass({0, 0}, {1, 0}, {0, 1});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(k[i][j], K[i][j], 1e-15);
      EXPECT_NEAR(m[i][j], (i == j ? 2.0 : 1.0) / 24.0, 1e-15);
    }
}

TEST(FemElements, StiffnessAnnihilatesConstantsAndMassIntegratesArea) {
  const Vec2 a{0.3, -0.2}, b{1.7, 0.4}, c{0.1, 1.1};
  const auto k = element_stiffness(a, b, c);
  const auto m = element_mass(a, b, c);
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(k[i][0] + k[i][1] + k[i][2], 0.0, 1e-14);
    for (int j = 0; j < 3; ++j) total += m[i][j];
  }
  EXPECT_NEAR(total, triangle_area(a, b, c), 1e-15);
  EXPECT_THROW(element_stiffness(a, c, b), MeshError);
}

TEST(FemAssembly, SharedPatternAndSymmetry) {
  const auto ops = assemble(mesh_domain(shapes::l_shape(), 0.2));
  EXPECT_EQ(ops.K.nonZeros(), ops.M.nonZeros());
  EXPECT_NEAR((SparseMatrix(ops.K.transpose()) - ops.K).norm(), 0.0, 1e-12);
  EXPECT_NEAR((SparseMatrix(ops.M.transpose()) - ops.M).norm(), 0.0, 1e-14);
  EXPECT_NEAR(ops.area, 3.0, 1e-12);
}

TEST(FemEigen, SquareWithinTolerance) {
  const auto ops = assemble(mesh_domain(shapes::unit_square(), 0.02));
  const auto r = solve_lowest(ops, 10);
  const auto exact = square_exact(10);
  EXPECT_LE(r.values[0], 1.003 * exact[0]);
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_GE(r.values[k], exact[k]) << k;
    EXPECT_LE(r.values[k], 1.01 * exact[k]) << k;
    EXPECT_LE(r.residuals[k], 1e-8) << k;
  }
}

TEST(FemEigen, DiskWithinOnePercent) {
  const auto ops = assemble(mesh_domain(shapes::disk(), 0.05));
  const auto r = solve_lowest(ops, 12);
  const auto exact = disk_spectrum(1, 200);
  for (std::size_t k = 0; k < 12; ++k) {
    // The chordal polygon lies inside the disk, so these are upper bounds too.
    EXPECT_GE(r.values[k], exact[k]) << k;
    EXPECT_LE(r.values[k], 1.01 * exact[k]) << k;
  }
}

TEST(FemEigen, SecondOrderConvergence) {
  const Mesh coarse = mesh_domain(shapes::unit_square(), 0.1, 1.0);
  const Mesh fine = refine_uniform(coarse);
  const double e1 = solve_lowest(assemble(coarse), 1).values[0] - 2 * pi * pi;
  const double e2 = solve_lowest(assemble(fine), 1).values[0] - 2 * pi * pi;
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(FemEigen, NestedRefinementDecreasesEveryEigenvalue) {
  const Mesh coarse = mesh_domain(shapes::l_shape(), 0.15);
  const auto a = solve_lowest(assemble(coarse), 30);
  const auto b = solve_lowest(assemble(refine_uniform(coarse)), 30);
  for (std::size_t k = 0; k < 30; ++k) EXPECT_LE(b.values[k], a.values[k] * (1 + 1e-12)) << k;
}

TEST(FemEigen, MOrthonormalEigenvectors) {
  const auto ops = assemble(mesh_domain(shapes::quarter_disk(), 0.03));
  ASSERT_GT(ops.size(), 600) << "exercise the sparse path";
  EigenOptions o;
  o.keep_vectors = true;
  o.slice_target = 15;
  const auto r = solve_lowest(ops, 50, o);
  ASSERT_EQ(r.vectors.cols(), 50);
  EXPECT_GT(r.slices, 1u);
  const Eigen::MatrixXd g = r.vectors.transpose() * (ops.M * r.vectors);
  const double dev = (g - Eigen::MatrixXd::Identity(50, 50)).cwiseAbs().maxCoeff();
  EXPECT_LE(dev, 1e-8);
  for (Eigen::Index k = 0; k < 50; ++k) {
    const Eigen::VectorXd x = r.vectors.col(k);
    const double rq = x.dot(ops.K * x) / x.dot(ops.M * x);
    EXPECT_NEAR(rq, r.values[static_cast<std::size_t>(k)], 1e-9 * rq);
  }
}

TEST(FemEigen, SparseAndDensePathsAgree) {
  const auto ops = assemble(mesh_domain(shapes::l_shape(), 0.15));
  ASSERT_GT(ops.size(), 600);
  const auto sparse = solve_lowest(ops, 25);
  const Eigen::MatrixXd K(ops.K), M(ops.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(K, M, Eigen::EigenvaluesOnly);
  for (std::size_t k = 0; k < 25; ++k)
    EXPECT_NEAR(sparse.values[k], dense.eigenvalues()(static_cast<Eigen::Index>(k)), 1e-9 * sparse.values[k]);
}

TEST(FemEigen, SolveBelowIsComplete) {
  const auto ops = assemble(mesh_domain(shapes::unit_square(), 0.08));
  const auto r = solve_below(ops, 400.0);
  const Eigen::MatrixXd K(ops.K), M(ops.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(K, M, Eigen::EigenvaluesOnly);
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < dense.eigenvalues().size(); ++i) n += dense.eigenvalues()(i) < 400.0;
  EXPECT_EQ(r.values.size(), n);
}

TEST(FemEigen, DeterministicForSeed) {
  const auto ops = assemble(mesh_domain(shapes::l_shape(), 0.05));
  EigenOptions o;
  o.seed = 42;
  EXPECT_EQ(solve_lowest(ops, 40, o).values, solve_lowest(ops, 40, o).values);
}

TEST(FemEigen, DiscreteDomainMonotonicity) {
  // (0,1)^2 inside (0,1.2)x(0,1): nested conforming meshes are not needed for
  // the continuous inequality, but it must survive discretization here.
  const auto inner = solve_lowest(assemble(mesh_domain(shapes::unit_square(), 0.03)), 15);
  const auto outer = solve_lowest(assemble(mesh_domain(shapes::rectangle(1.2, 1.0), 0.03)), 15);
  for (std::size_t k = 0; k < 15; ++k) EXPECT_LT(outer.values[k], inner.values[k]) << k;
}

TEST(FemPollution, CutsWhereWeylRatioDrifts) {
  std::vector<double> ev;
  for (int k = 1; k <= 400; ++k) {
    const double w = weyl_two_term_inverse(k, 1.0, 4.0);
    ev.push_back(k <= 200 ? w : w * (1.0 + 0.002 * (k - 200)));
  }
  const auto cut = pollution_cut(ev, 1.0, 4.0, 0.05);
  EXPECT_TRUE(cut.detected);
  EXPECT_GT(cut.trusted, 200u);
  EXPECT_LT(cut.trusted, 230u);
  const auto clean = pollution_cut(std::vector<double>(ev.begin(), ev.begin() + 150), 1.0, 4.0, 0.05);
  EXPECT_FALSE(clean.detected);
}

TEST(FemSpectrum, RawSquareSpectrumIsConformingAndAnnotated) {
  FemOptions o;
  o.h = 0.05;
  o.extrapolate = false;
  const auto run = fem_spectrum(shapes::unit_square(), o);
  const auto exact = rectangle_spectrum(1, 1, 1e5);
  ASSERT_GT(run.spectrum.size(), 20u);
  for (std::size_t k = 0; k < run.spectrum.size(); ++k) ASSERT_GE(run.spectrum[k], exact[k]);
  const auto r = run.spectrum[run.spectrum.size() - 1] / exact[run.spectrum.size() - 1];
  EXPECT_LE(r, 1.1) << "trusted range ends near the 5% drift";
  EXPECT_EQ(run.spectrum.source, SpectrumSource::fem);
  EXPECT_EQ(run.spectrum.cutoff, run.spectrum.eigenvalues.back());
  EXPECT_TRUE(run.spectrum.annotation("h"));
  EXPECT_TRUE(run.spectrum.annotation("area_error"));
  EXPECT_FALSE(run.spectrum.annotation("extrapolation"));
}

TEST(FemSpectrum, ExtrapolationReducesError) {
  FemOptions raw;
  raw.h = 0.1;
  raw.count = 20;
  raw.extrapolate = false;
  FemOptions ext = raw;
  ext.extrapolate = true;
  const auto a = fem_spectrum(shapes::unit_square(), raw).spectrum;
  const auto b = fem_spectrum(shapes::unit_square(), ext).spectrum;
  const auto exact = square_exact(20);
  ASSERT_EQ(a.size(), b.size());
  double ea = 0.0, eb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ea = std::max(ea, std::abs(a[k] - exact[k]) / exact[k]);
    eb = std::max(eb, std::abs(b[k] - exact[k]) / exact[k]);
  }
  EXPECT_LT(eb, 0.1 * ea);
  EXPECT_EQ(b.annotation("extrapolation"), std::optional<std::string>("richardson"));
}
