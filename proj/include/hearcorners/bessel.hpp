#pragma once

// Positive zeros j_{nu,k} of the Bessel function of the first kind, nu >= 0.
//
// Zeros are bracketed by sign changes and polished with TOMS 748. Brackets
// come from McMahon's large-zero expansion whenever it lands close enough to
// be certified, and from a unit-step scan otherwise. Certification relies on
// consecutive zeros being more than 3.1 apart for every nu >= 0 (the smallest
// gap is j_{0,2} - j_{0,1} = 3.1153...).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>

#include "hearcorners/errors.hpp"
#include "hearcorners/geometry.hpp"

namespace hearcorners {

inline double bessel_j(double nu, double x) { return boost::math::cyl_bessel_j(nu, x); }

/// McMahon's asymptotic expansion of the k-th positive zero of J_nu (k >= 1).
inline double mcmahon_zero(double nu, int k) {
  const double mu = 4.0 * nu * nu;
  const double beta = (k + 0.5 * nu - 0.25) * pi;
  const double b8 = 8.0 * beta;
  return beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8) -
         32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * std::pow(b8, 5));
}

namespace detail {

inline constexpr double bessel_zero_min_gap = 3.1;

inline double polish_bessel_zero(double nu, double lo, double hi, double flo, double fhi) {
  std::uintmax_t max_iter = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(50);
  const auto fn = [nu](double x) { return bessel_j(nu, x); };
  const auto r = boost::math::tools::toms748_solve(fn, lo, hi, flo, fhi, tol, max_iter);
  if (max_iter >= 200)
    throw NumericError("Bessel zero refinement did not converge for order " + std::to_string(nu) +
                       " in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return 0.5 * (r.first + r.second);
}

}  // namespace detail

/// All positive zeros of J_nu strictly below x_max, ascending, to about
/// 1e-15 relative accuracy.
inline std::vector<double> bessel_zeros_below(double nu, double x_max) {
  if (!(nu >= 0.0)) throw DomainError("Bessel order must be nonnegative");
  std::vector<double> zeros;
  // j_{nu,1} > nu, and J_nu > 0 on (0, j_{nu,1}).
  double x = nu > 0.0 ? nu : 1e-3;
  double fx = bessel_j(nu, x);
  if (fx <= 0.0) throw NumericError("unexpected sign of J_" + std::to_string(nu) + " below its first zero");
  const double step = 1.0;
  while (x < x_max) {
    const int k = static_cast<int>(zeros.size()) + 1;
    // Certified McMahon bracket: at most one zero in (last, last + 2*gap).
    if (!zeros.empty()) {
      const double last = zeros.back();
      const double g = mcmahon_zero(nu, k);
      const double lo = g - 0.5, hi = g + 0.5;
      if (lo > last + 0.5 && hi < last + 2.0 * detail::bessel_zero_min_gap) {
        const double flo = bessel_j(nu, lo), fhi = bessel_j(nu, hi);
        if (flo * fhi < 0.0) {
          if (lo >= x_max) break;
          const double z = detail::polish_bessel_zero(nu, lo, hi, flo, fhi);
          if (z >= x_max) break;
          zeros.push_back(z);
          x = z + detail::bessel_zero_min_gap;
          fx = bessel_j(nu, x);
          continue;
        }
      }
    }
    const double xn = std::min(x + step, x_max);
    const double fn = bessel_j(nu, xn);
    if (fn == 0.0) {
      zeros.push_back(xn);
      x = xn + detail::bessel_zero_min_gap;
      fx = bessel_j(nu, x);
      continue;
    }
    if (fx * fn < 0.0) {
      const double z = detail::polish_bessel_zero(nu, x, xn, fx, fn);
      if (z >= x_max) break;
      zeros.push_back(z);
      x = z + detail::bessel_zero_min_gap;
      fx = bessel_j(nu, x);
      continue;
    }
    x = xn;
    fx = fn;
    if (xn >= x_max) break;
  }
  return zeros;
}

}  // namespace hearcorners
