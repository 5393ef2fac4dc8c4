#pragma once

// Piecewise-linear finite elements for the Dirichlet Laplacian and a sparse
// generalized eigensolver for K x = lambda M x.
//
// Eigenvalues are computed slice by slice. For a slice [lo, hi) the number
// of eigenvalues it holds is known exactly from Sylvester inertia counts of
// LDL^T factorizations of K - lo M and K - hi M. The eigenpairs themselves
// come from shift-invert subspace iteration with the operator
// (K - sigma M)^{-1} M, sigma at the slice center: a block Krylov basis is
// grown with full M-orthogonalization until every wanted Ritz pair has
// converged, then one more application of the operator and a Rayleigh-Ritz
// step polish the pairs before their residuals are checked explicitly.
// Missing pairs trigger a restart from a fresh random block, deflated
// against the pairs already found.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "hearcorners/errors.hpp"
#include "hearcorners/geometry.hpp"
#include "hearcorners/mesh.hpp"
#include "hearcorners/spectrum.hpp"
#include "hearcorners/text_io.hpp"

namespace hearcorners {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

using ElementMatrix = std::array<std::array<double, 3>, 3>;

/// P1 element stiffness: grad(phi_i) . grad(phi_j) * area.
inline ElementMatrix element_stiffness(Vec2 a, Vec2 b, Vec2 c) {
  const double ar = triangle_area(a, b, c);
  if (!(ar > 0.0)) throw MeshError("singular element (nonpositive area)");
  // Edge vectors opposite each vertex.
  const std::array<Vec2, 3> e{c - b, a - c, b - a};
  ElementMatrix k{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k[i][j] = dot(e[i], e[j]) / (4.0 * ar);
  return k;
}

/// P1 consistent mass: area/12 * (1 + delta_ij).
inline ElementMatrix element_mass(Vec2 a, Vec2 b, Vec2 c) {
  const double ar = triangle_area(a, b, c);
  if (!(ar > 0.0)) throw MeshError("singular element (nonpositive area)");
  ElementMatrix m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = ar / 12.0 * (i == j ? 2.0 : 1.0);
  return m;
}

struct OperatorPair {
  SparseMatrix K;  ///< stiffness over interior vertices
  SparseMatrix M;  ///< mass over interior vertices, same sparsity pattern as K
  std::vector<int> dof_of_vertex;  ///< -1 for boundary vertices
  std::vector<int> vertex_of_dof;
  double area = 0.0;       ///< meshed area
  double perimeter = 0.0;  ///< meshed boundary length

  Eigen::Index size() const { return K.rows(); }
};

/// Assembles K and M with the Dirichlet rows and columns removed.
inline OperatorPair assemble(const Mesh& mesh) {
  OperatorPair ops;
  ops.area = mesh.area;
  ops.perimeter = mesh.boundary_length;
  ops.dof_of_vertex.assign(mesh.vertices.size(), -1);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (mesh.boundary[v]) continue;
    ops.dof_of_vertex[v] = static_cast<int>(ops.vertex_of_dof.size());
    ops.vertex_of_dof.push_back(static_cast<int>(v));
  }
  const auto n = static_cast<Eigen::Index>(ops.vertex_of_dof.size());
  if (n == 0) throw MeshError("mesh has no interior vertices; decrease h");
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(9 * mesh.triangles.size());
  mt.reserve(9 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const Vec2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    const auto ke = element_stiffness(a, b, c);
    const auto me = element_mass(a, b, c);
    for (int i = 0; i < 3; ++i) {
      const int di = ops.dof_of_vertex[t[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = ops.dof_of_vertex[t[j]];
        if (dj < 0) continue;
        kt.emplace_back(di, dj, ke[i][j]);
        mt.emplace_back(di, dj, me[i][j]);
      }
    }
  }
  ops.K.resize(n, n);
  ops.M.resize(n, n);
  ops.K.setFromTriplets(kt.begin(), kt.end());
  ops.M.setFromTriplets(mt.begin(), mt.end());
  ops.K.makeCompressed();
  ops.M.makeCompressed();
  return ops;
}

// ---------------------------------------------------------------------------

struct EigenOptions {
  /// Bound on ||K x - lambda M x||_{M^-1} / ||x||_2 for M-normalized x.
  double residual_tol = 1e-8;
  std::uint64_t seed = 1;
  std::size_t slice_target = 40;  ///< eigenvalues per slice
  std::size_t block = 4;
  std::size_t max_restarts = 8;
  std::size_t max_polish = 8;
  std::size_t polish_guard = 8;  ///< extra vectors carried through polishing
  bool keep_vectors = false;
};

struct EigenResult {
  std::vector<double> values;
  std::vector<double> residuals;  ///< ||K x - lambda M x||_{M^-1} / ||x||_2, x M-normalized
  Eigen::MatrixXd vectors;        ///< M-orthonormal columns, when kept
  double max_slice_orthogonality = 0.0;  ///< max |x_i^T M x_j - delta_ij| within slices
  std::size_t slices = 0;
  std::size_t factorizations = 0;
  std::size_t operator_applications = 0;
  std::size_t restarts = 0;
};

namespace detail {

/// Deterministic uniform variates in [-1, 1) independent of the standard
/// library's distribution implementations.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-52 - 1.0; }

 private:
  std::mt19937_64 rng_;
};

class SliceEngine {
 public:
  SliceEngine(const OperatorPair& ops, const EigenOptions& opt) : ops_(ops), opt_(opt), rng_(opt.seed) {
    n_ = ops.size();
    if (ops.M.nonZeros() != ops.K.nonZeros() ||
        !std::equal(ops.K.innerIndexPtr(), ops.K.innerIndexPtr() + ops.K.nonZeros(), ops.M.innerIndexPtr()))
      throw NumericError("stiffness and mass matrices must share one sparsity pattern");
    shifted_ = ops.K;
    ldlt_.analyzePattern(shifted_);
    mass_.compute(ops.M);
    if (mass_.info() != Eigen::Success) throw NumericError("mass matrix factorization failed");
  }

  /// Number of eigenvalues strictly below x.
  std::size_t count_below(double x) {
    if (x <= 0.0) return 0;
    factor(x);
    std::size_t neg = 0;
    const auto& d = ldlt_.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) neg += d[i] < 0.0;
    return neg;
  }

  /// Runs slices upward from 0 until stop(values) returns true or the
  /// operator is exhausted.
  EigenResult run(const std::function<bool(const std::vector<double>&)>& stop, std::size_t hard_limit) {
    if (n_ <= dense_limit) return dense();
    EigenResult res;
    double lo = 0.0;
    std::size_t below_lo = 0;
    const double density = std::max(ops_.area, 1e-300) / (4.0 * pi);  // Weyl dN/dlambda
    double width = static_cast<double>(opt_.slice_target) / density;
    std::vector<std::pair<double, Eigen::VectorXd>> kept;
    while (!stop(res.values) && static_cast<Eigen::Index>(below_lo) < n_ && res.values.size() < hard_limit) {
      // Size the slice to hold about slice_target eigenvalues.
      double hi = lo + width;
      std::size_t below_hi = count_below(hi);
      ++res.factorizations;
      for (int adjust = 0; adjust < 30; ++adjust) {
        const std::size_t c = below_hi - below_lo;
        if (c > 2 * opt_.slice_target && hi - lo > 1e-12 * hi) {
          hi = lo + (hi - lo) * 0.6 * static_cast<double>(opt_.slice_target) / static_cast<double>(c);
        } else if (c == 0 && below_hi < static_cast<std::size_t>(n_)) {
          hi = lo + 2.0 * (hi - lo);
        } else {
          break;
        }
        below_hi = count_below(hi);
        ++res.factorizations;
      }
      const std::size_t c = below_hi - below_lo;
      if (c == 0) break;
      std::vector<double> vals;
      Eigen::MatrixXd vecs;
      std::vector<double> resid;
      solve_slice(lo, hi, c, vals, vecs, resid, res);
      for (std::size_t i = 0; i < vals.size(); ++i) {
        res.values.push_back(vals[i]);
        res.residuals.push_back(resid[i]);
        if (opt_.keep_vectors) kept.emplace_back(vals[i], vecs.col(static_cast<Eigen::Index>(i)));
      }
      ++res.slices;
      width = (hi - lo) * std::clamp(static_cast<double>(opt_.slice_target) / static_cast<double>(c), 0.5, 2.0);
      lo = hi;
      below_lo = below_hi;
    }
    if (opt_.keep_vectors) {
      res.vectors.resize(n_, static_cast<Eigen::Index>(kept.size()));
      for (std::size_t i = 0; i < kept.size(); ++i) res.vectors.col(static_cast<Eigen::Index>(i)) = kept[i].second;
    }
    return res;
  }

 private:
  const OperatorPair& ops_;
  EigenOptions opt_;
  UniformSource rng_;
  Eigen::Index n_ = 0;
  SparseMatrix shifted_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> mass_;
  double factored_shift_ = NAN;

  static constexpr Eigen::Index dense_limit = 600;

  /// Small problems: every eigenpair from a dense generalized solve.
  EigenResult dense() {
    EigenResult res;
    const Eigen::MatrixXd K(ops_.K), M(ops_.M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(K, M);
    if (ges.info() != Eigen::Success) throw NumericError("dense generalized eigensolve failed");
    const Eigen::MatrixXd& X = ges.eigenvectors();
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      res.values.push_back(ges.eigenvalues()[j]);
      res.residuals.push_back(m_norm_of_residual(K * X.col(j) - ges.eigenvalues()[j] * (M * X.col(j))) /
                              X.col(j).norm());
    }
    const Eigen::MatrixXd G = X.transpose() * M * X;
    res.max_slice_orthogonality = (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
    res.slices = 1;
    if (opt_.keep_vectors) res.vectors = X;
    return res;
  }

  void factor(double sigma) {
    if (sigma == factored_shift_) return;
    double s = sigma;
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double* k = ops_.K.valuePtr();
      const double* m = ops_.M.valuePtr();
      double* a = shifted_.valuePtr();
      for (Eigen::Index i = 0; i < ops_.K.nonZeros(); ++i) a[i] = k[i] - s * m[i];
      ldlt_.factorize(shifted_);
      if (ldlt_.info() == Eigen::Success) {
        factored_shift_ = sigma;
        return;
      }
      // Exact zero pivot: nudge the shift.
      s = sigma * (1.0 + 1e-10 * (attempt + 1));
    }
    throw NumericError("LDL^T factorization of K - sigma M failed at sigma = " + format_double(sigma));
  }

  Eigen::VectorXd random_vector() {
    Eigen::VectorXd v(n_);
    for (Eigen::Index i = 0; i < n_; ++i) v[i] = rng_();
    return v;
  }

  double m_norm_of_residual(const Eigen::VectorXd& r) const {
    const Eigen::VectorXd z = mass_.solve(r);
    return std::sqrt(std::max(0.0, r.dot(z)));
  }

  /// Orthogonalizes w against the columns [0, m) of Q (with MQ = M Q) in the
  /// M inner product, twice. Returns the accumulated coefficients.
  static Eigen::VectorXd orthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& MQ,
                                       Eigen::Index m) {
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(m);
    if (m == 0) return coef;
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd c = MQ.leftCols(m).transpose() * w;
      w.noalias() -= Q.leftCols(m) * c;
      coef += c;
    }
    return coef;
  }

  void solve_slice(double lo, double hi, std::size_t wanted, std::vector<double>& vals, Eigen::MatrixXd& vecs,
                   std::vector<double>& resid, EigenResult& stats) {
    const double sigma = 0.5 * (lo + hi);
    factor(sigma);
    ++stats.factorizations;
    const auto op = [&](const Eigen::VectorXd& x) {
      ++stats.operator_applications;
      return Eigen::VectorXd(ldlt_.solve(ops_.M * x));
    };

    const auto b = static_cast<Eigen::Index>(std::max<std::size_t>(1, opt_.block));
    const auto kmax = static_cast<Eigen::Index>(
        std::min<std::size_t>(static_cast<std::size_t>(n_), 2 * wanted + 60 + static_cast<std::size_t>(b)));

    // Locked pairs of this slice.
    Eigen::MatrixXd Y(n_, 0), MY(n_, 0);
    std::vector<double> locked_vals;

    for (std::size_t restart = 0; restart <= opt_.max_restarts; ++restart) {
      if (restart > 0) ++stats.restarts;
      Eigen::MatrixXd Q(n_, kmax + b), MQ(n_, kmax + b);
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(kmax + b, kmax);
      Eigen::Index m = 0;
      const auto append = [&](Eigen::VectorXd w, Eigen::Index col, bool record) {
        // Deflate against locked pairs, then against the basis.
        for (int pass = 0; pass < 2 && Y.cols() > 0; ++pass) w.noalias() -= Y * (MY.transpose() * w);
        const Eigen::VectorXd coef = orthogonalize(w, Q, MQ, m);
        Eigen::VectorXd mw = ops_.M * w;
        double beta = std::sqrt(std::max(0.0, w.dot(mw)));
        const double scale = coef.size() ? std::max(coef.norm(), beta) : beta;
        if (record) H.col(col).head(m) = coef;
        if (!(beta > 1e-10 * scale)) {
          // Invariant subspace reached: continue with a fresh direction.
          w = random_vector();
          for (int pass = 0; pass < 2 && Y.cols() > 0; ++pass) w.noalias() -= Y * (MY.transpose() * w);
          orthogonalize(w, Q, MQ, m);
          mw = ops_.M * w;
          const double nb = std::sqrt(std::max(0.0, w.dot(mw)));
          w /= nb;
          mw /= nb;
          if (record) H(m, col) = 0.0;
        } else {
          w /= beta;
          mw /= beta;
          if (record) H(m, col) = beta;
        }
        Q.col(m) = w;
        MQ.col(m) = mw;
        ++m;
      };
      for (Eigen::Index i = 0; i < b; ++i) append(random_vector(), 0, false);

      const std::size_t still_wanted = wanted - locked_vals.size();
      std::vector<Eigen::Index> good;
      Eigen::MatrixXd S;
      Eigen::VectorXd theta;
      Eigen::Index k = 0;
      while (k < kmax) {
        append(op(Q.col(k)), k, true);
        ++k;
        if (k < static_cast<Eigen::Index>(still_wanted) || (k % 10 != 0 && k < kmax)) continue;
        const Eigen::MatrixXd hk = 0.5 * (H.topLeftCorner(k, k) + H.topLeftCorner(k, k).transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hk);
        theta = es.eigenvalues();
        S = es.eigenvectors();
        good.clear();
        std::size_t in_slice = 0;
        for (Eigen::Index i = 0; i < k; ++i) {
          if (theta[i] == 0.0) continue;
          const double lam = sigma + 1.0 / theta[i];
          if (lam < lo || lam >= hi) continue;
          ++in_slice;
          const double est = (H.block(k, 0, m - k, k) * S.col(i)).norm() +
                             (H.topLeftCorner(k, k) * S.col(i) - theta[i] * S.col(i)).norm();
          if (est <= 1e-9 * std::abs(theta[i])) good.push_back(i);
        }
        if (good.size() >= still_wanted && in_slice == good.size()) {
          break;
        }
      }
      // Lock whatever converged (all of it on success).
      if (!good.empty()) {
        Eigen::MatrixXd X(n_, static_cast<Eigen::Index>(good.size()));
        for (std::size_t j = 0; j < good.size(); ++j)
          X.col(static_cast<Eigen::Index>(j)) = Q.leftCols(k) * S.col(good[j]);
        lock(X, Y, MY);
      }
      if (static_cast<std::size_t>(Y.cols()) >= wanted) break;
    }
    if (static_cast<std::size_t>(Y.cols()) < wanted)
      throw NumericError("eigensolver found " + std::to_string(Y.cols()) + " of " + std::to_string(wanted) +
                         " eigenvalues in [" + format_double(lo) + ", " + format_double(hi) + ") after " +
                         std::to_string(opt_.max_restarts) + " restarts");

    // Polish: subspace iteration on the locked vectors plus a few guard
    // vectors, so that eigenvalues near the slice ends converge against the
    // next eigenvalue outside the guard block rather than the one just outside.
    const auto guard = static_cast<Eigen::Index>(std::min<std::size_t>(
        opt_.polish_guard, static_cast<std::size_t>(n_) - std::min<std::size_t>(static_cast<std::size_t>(n_), wanted)));
    Eigen::MatrixXd X(n_, Y.cols() + guard);
    X.leftCols(Y.cols()) = Y;
    for (Eigen::Index j = 0; j < guard; ++j) X.col(Y.cols() + j) = random_vector();
    double worst = 0.0;
    std::size_t found = 0;
    // Ritz values are taken for the shift-inverted operator. There the slice is
    // |theta| > 2 / (hi - lo), and interlacing rules out spurious interior values
    // from vectors that mix both sides of the slice.
    const double theta_min = 2.0 / (hi - lo);
    // The factorization does not pivot, so single solves carry a backward error
    // well above the residual tolerance. Two steps of iterative refinement fix it.
    const auto refined_op = [&](const Eigen::VectorXd& x) {
      ++stats.operator_applications;
      const Eigen::VectorXd b = ops_.M * x;
      Eigen::VectorXd y = ldlt_.solve(b);
      for (int step = 0; step < 2; ++step) y += ldlt_.solve(Eigen::VectorXd(b - shifted_ * y));
      return y;
    };
    for (std::size_t it = 0; it <= opt_.max_polish; ++it) {
      Eigen::MatrixXd Z(n_, X.cols());
      for (Eigen::Index j = 0; j < X.cols(); ++j) Z.col(j) = refined_op(X.col(j));
      const Eigen::MatrixXd MX0 = ops_.M * X;
      Eigen::MatrixXd A = MX0.transpose() * Z, B = MX0.transpose() * X;
      A = 0.5 * (A + A.transpose()).eval();
      B = 0.5 * (B + B.transpose()).eval();
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
      if (ges.info() != Eigen::Success) throw NumericError("Rayleigh-Ritz step failed");
      std::vector<Eigen::Index> sel;
      for (Eigen::Index j = 0; j < ges.eigenvalues().size(); ++j)
        if (std::abs(ges.eigenvalues()[j]) > theta_min) sel.push_back(j);
      // Ascending in lambda: negative theta first (below the shift), each side by decreasing |theta|.
      std::sort(sel.begin(), sel.end(), [&](Eigen::Index i, Eigen::Index j) {
        const double li = sigma + 1.0 / ges.eigenvalues()[i], lj = sigma + 1.0 / ges.eigenvalues()[j];
        return li < lj;
      });
      found = sel.size();
      X = Z * ges.eigenvectors();
      Eigen::MatrixXd MX = ops_.M * X;
      for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double nrm = std::sqrt(std::max(0.0, X.col(j).dot(MX.col(j))));
        X.col(j) /= nrm;
        MX.col(j) /= nrm;
      }
      const Eigen::MatrixXd KX = ops_.K * X;
      vals.clear();
      resid.clear();
      worst = 0.0;
      for (const Eigen::Index j : sel) {
        const double lam = X.col(j).dot(KX.col(j));
        vals.push_back(lam);
        const Eigen::VectorXd r = KX.col(j) - lam * MX.col(j);
        resid.push_back(m_norm_of_residual(r) / X.col(j).norm());
        worst = std::max(worst, resid.back());
      }
      if (found != wanted || worst > opt_.residual_tol) continue;
      Eigen::MatrixXd W(n_, static_cast<Eigen::Index>(sel.size())), MW(n_, W.cols());
      for (std::size_t j = 0; j < sel.size(); ++j) {
        W.col(static_cast<Eigen::Index>(j)) = X.col(sel[j]);
        MW.col(static_cast<Eigen::Index>(j)) = MX.col(sel[j]);
      }
      const Eigen::MatrixXd G = W.transpose() * MW;
      stats.max_slice_orthogonality = std::max(
          stats.max_slice_orthogonality, (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff());
      vecs = W;
      return;
    }
    if (found != wanted)
      throw NumericError("Rayleigh-Ritz found " + std::to_string(found) + " eigenvalues in [" + format_double(lo) +
                         ", " + format_double(hi) + "), inertia count says " + std::to_string(wanted));
    throw NumericError("eigenpairs in [" + format_double(lo) + ", " + format_double(hi) +
                       ") did not reach the residual tolerance: worst " + format_double(worst) + " after " +
                       std::to_string(opt_.max_polish + 1) + " polishing steps");
  }

  void lock(const Eigen::MatrixXd& X, Eigen::MatrixXd& Y, Eigen::MatrixXd& MY) const {
    const Eigen::Index old = Y.cols();
    Y.conservativeResize(n_, old + X.cols());
    MY.conservativeResize(n_, old + X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      Eigen::VectorXd w = X.col(j);
      for (int pass = 0; pass < 2; ++pass) w.noalias() -= Y.leftCols(old + j) * (MY.leftCols(old + j).transpose() * w);
      Eigen::VectorXd mw = ops_.M * w;
      const double nrm = std::sqrt(std::max(0.0, w.dot(mw)));
      Y.col(old + j) = w / nrm;
      MY.col(old + j) = mw / nrm;
    }
  }
};

}  // namespace detail

/// The `count` smallest generalized eigenvalues of (K, M), ascending.
inline EigenResult solve_lowest(const OperatorPair& ops, std::size_t count, const EigenOptions& opt = {}) {
  if (count == 0) throw DomainError("count must be at least 1");
  if (count > static_cast<std::size_t>(ops.size()))
    throw DomainError("count " + std::to_string(count) + " exceeds the " + std::to_string(ops.size()) +
                      " degrees of freedom");
  detail::SliceEngine engine(ops, opt);
  auto res = engine.run([count](const std::vector<double>& v) { return v.size() >= count; }, count);
  res.values.resize(std::min(res.values.size(), count));
  res.residuals.resize(res.values.size());
  if (opt.keep_vectors) res.vectors.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(res.values.size()));
  return res;
}

/// All generalized eigenvalues strictly below cutoff.
inline EigenResult solve_below(const OperatorPair& ops, double cutoff, const EigenOptions& opt = {}) {
  detail::SliceEngine engine(ops, opt);
  const std::size_t total = engine.count_below(cutoff);
  if (total == 0) return {};
  auto res = engine.run([total](const std::vector<double>& v) { return v.size() >= total; }, total);
  res.values.resize(total);
  res.residuals.resize(total);
  if (opt.keep_vectors) res.vectors.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(total));
  return res;
}

// ---------------------------------------------------------------------------

/// Inverse of the two-term Weyl law N(lambda) = (A lambda - P sqrt(lambda)) / (4 pi).
inline double weyl_two_term_inverse(double k, double area, double perimeter) {
  const double s = (perimeter + std::sqrt(perimeter * perimeter + 16.0 * pi * area * k)) / (2.0 * area);
  return s * s;
}

struct PollutionCut {
  std::size_t trusted = 0;  ///< leading eigenvalues before pollution
  bool detected = false;    ///< the ratio actually crossed 1 + tol
};

/// Pollution rule for discrete spectra: the first k at which the windowed
/// mean of lambda_k / weyl_two_term_inverse(k) exceeds 1 + tol ends the
/// trusted range. The last few values cannot be judged and are excluded.
inline PollutionCut pollution_cut(const std::vector<double>& ev, double area, double perimeter, double tol = 0.05) {
  const std::size_t n = ev.size();
  std::vector<double> ratio(n);
  for (std::size_t k = 0; k < n; ++k)
    ratio[k] = ev[k] / weyl_two_term_inverse(static_cast<double>(k + 1), area, perimeter);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t w = std::max<std::size_t>(5, (k + 1) / 20);
    if (k + w >= n) return {k, false};
    const std::size_t a = k >= w ? k - w : 0;
    double s = 0.0;
    for (std::size_t j = a; j <= k + w; ++j) s += ratio[j];
    if (s / static_cast<double>(k + w - a + 1) > 1.0 + tol) return {k, true};
  }
  return {n, false};
}

struct FemOptions {
  double h = 0.04;
  double grading = 0.5;
  /// Number of eigenvalues to compute; 0 computes until the pollution rule
  /// triggers.
  std::size_t count = 0;
  std::size_t max_count = 20000;
  double pollution_tol = 0.05;
  /// Combine the kept eigenvalues with those of the uniformly refined mesh,
  /// (4 lambda(h/2) - lambda(h)) / 3, which removes the h^2 error term. The
  /// result is no longer a conforming upper bound.
  bool extrapolate = true;
  EigenOptions eigen{};
};

struct FemRun {
  Spectrum spectrum;
  std::size_t vertices = 0, triangles = 0, dofs = 0;
  std::size_t computed = 0;  ///< eigenvalues computed before the pollution cut
  double mesh_area = 0.0, mesh_perimeter = 0.0;
  double max_residual = 0.0;
  std::size_t fine_vertices = 0, fine_dofs = 0;  ///< refined mesh, when extrapolating
  EigenResult eigen;
};

/// Mesh, assemble, solve and apply the pollution cut. The returned spectrum
/// is complete below its cutoff for the discrete problem.
inline FemRun fem_spectrum(const DomainSpec& domain, const FemOptions& opt) {
  const Mesh mesh = mesh_domain(domain, opt.h, opt.grading);
  const OperatorPair ops = assemble(mesh);
  FemRun run;
  run.vertices = mesh.vertex_count();
  run.triangles = mesh.triangle_count();
  run.dofs = static_cast<std::size_t>(ops.size());
  run.mesh_area = mesh.area;
  run.mesh_perimeter = mesh.boundary_length;

  detail::SliceEngine engine(ops, opt.eigen);
  const std::size_t limit = std::min<std::size_t>(opt.count ? opt.count : opt.max_count, run.dofs);
  const double area = mesh.area, per = mesh.boundary_length, tol = opt.pollution_tol;
  const auto stop = [&](const std::vector<double>& v) {
    if (v.size() >= limit) return true;
    if (opt.count) return false;
    return pollution_cut(v, area, per, tol).detected;
  };
  run.eigen = engine.run(stop, limit);
  auto& ev = run.eigen.values;
  if (ev.size() > limit) ev.resize(limit);
  run.computed = ev.size();
  for (std::size_t i = 0; i < ev.size(); ++i) run.max_residual = std::max(run.max_residual, run.eigen.residuals[i]);

  const std::size_t trusted = pollution_cut(ev, area, per, tol).trusted;
  if (trusted == 0)
    throw InsufficientSpectrum("no FEM eigenvalue passes the pollution rule; decrease h or raise count",
                               ev.empty() ? 0.0 : ev.front());
  std::vector<double> keep(ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(trusted));
  // Do not split a cluster of equal eigenvalues at the cut.
  while (!keep.empty() && trusted < ev.size() && ev[keep.size()] <= keep.back() * (1.0 + 1e-9)) keep.pop_back();
  if (keep.empty()) throw InsufficientSpectrum("FEM spectrum too short after the pollution cut", ev.front());

  if (opt.extrapolate) {
    const Mesh fine = refine_uniform(mesh);
    const OperatorPair fine_ops = assemble(fine);
    run.fine_vertices = fine.vertex_count();
    run.fine_dofs = static_cast<std::size_t>(fine_ops.size());
    const EigenResult r = solve_lowest(fine_ops, keep.size(), opt.eigen);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      run.max_residual = std::max(run.max_residual, r.residuals[i]);
      keep[i] = (4.0 * r.values[i] - keep[i]) / 3.0;
    }
    std::sort(keep.begin(), keep.end());
  }

  Spectrum s;
  s.eigenvalues = keep;
  s.cutoff = keep.back();
  s.source = SpectrumSource::fem;
  s.domain_label = domain.label();
  s.area_hint = mesh.area;
  s.annotate("h", format_double(opt.h));
  s.annotate("grading", format_double(opt.grading));
  s.annotate("vertices", std::to_string(run.vertices));
  s.annotate("dofs", std::to_string(run.dofs));
  s.annotate("computed", std::to_string(run.computed));
  s.annotate("pollution_tol", format_double(tol));
  s.annotate("mesh_area", format_double(mesh.area));
  s.annotate("mesh_perimeter", format_double(mesh.boundary_length));
  s.annotate("area_error", format_double(mesh.area - mesh.domain_area));
  s.annotate("perimeter_error", format_double(mesh.boundary_length - mesh.domain_perimeter));
  s.annotate("max_residual", format_double(run.max_residual));
  if (opt.extrapolate) {
    s.annotate("extrapolation", "richardson");
    s.annotate("fine_dofs", std::to_string(run.fine_dofs));
  }
  run.spectrum = std::move(s);
  return run;
}

}  // namespace hearcorners
