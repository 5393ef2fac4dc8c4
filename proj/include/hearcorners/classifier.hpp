#pragma once

// Corner detection from the spectrum alone. For a planar domain of Euler
// characteristic chi, smooth boundary gives a0 = chi/6 exactly while any
// corner pushes a0 strictly above chi/6. The decision is one-sided:
//
//   has_corners    (a0_hat - chi/6) / sigma > z
//   smooth         |a0_hat - chi/6| <= z sigma and the window probes agree
//   indeterminate  otherwise

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hearcorners/asymptotic_fit.hpp"
#include "hearcorners/errors.hpp"
#include "hearcorners/spectrum.hpp"

namespace hearcorners {

enum class Decision { has_corners, smooth, indeterminate };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::has_corners: return "has_corners";
    case Decision::smooth: return "smooth";
    case Decision::indeterminate: return "indeterminate";
  }
  return "?";
}

inline Decision decision_from_string(const std::string& s) {
  if (s == "has_corners") return Decision::has_corners;
  if (s == "smooth") return Decision::smooth;
  if (s == "indeterminate") return Decision::indeterminate;
  throw ParseError("unknown decision '" + s + "'");
}

/// CLI exit code for a decision.
inline int exit_code(Decision d) {
  switch (d) {
    case Decision::smooth: return 0;
    case Decision::has_corners: return 10;
    case Decision::indeterminate: return 20;
  }
  return 1;
}

struct ClassifyOptions {
  int chi = 1;
  double decision_z = 3.0;
  /// Window probes must agree on a0 to this absolute tolerance before a
  /// smooth verdict is issued.
  double robust_tolerance = 0.01;
  WindowOptions window{};
  /// Added to the estimated a0 before deciding; fault injection for the
  /// verification corpus. Zero in normal use.
  double a0_offset = 0.0;
};

struct Verdict {
  Decision decision = Decision::indeterminate;
  double a0_estimate = 0.0;
  double uncertainty = 0.0;
  double threshold = 1.0 / 6.0;
  double margin = 0.0;  ///< (a0_estimate - threshold) / uncertainty
  int chi = 1;
  double decision_z = 3.0;
  bool window_robust = false;
  AsymptoticFit fit;
};

/// Applies the one-sided decision rule to a finished fit.
inline Verdict decide(const AsymptoticFit& fit, const ClassifyOptions& opt = {}) {
  if (opt.chi > 1) throw DomainError("planar domains have Euler characteristic <= 1, got " + std::to_string(opt.chi));
  if (!(opt.decision_z > 0.0)) throw DomainError("decision_z must be positive");
  Verdict v;
  v.fit = fit;
  v.chi = opt.chi;
  v.decision_z = opt.decision_z;
  v.threshold = opt.chi / 6.0;
  v.a0_estimate = fit.a0 + opt.a0_offset;
  v.uncertainty = std::max(fit.sigma_a0, 1e-300);
  v.margin = (v.a0_estimate - v.threshold) / v.uncertainty;
  v.window_robust = fit.a0_window <= opt.robust_tolerance;
  if (v.margin > opt.decision_z) v.decision = Decision::has_corners;
  else if (std::abs(v.margin) <= opt.decision_z && v.window_robust) v.decision = Decision::smooth;
  else v.decision = Decision::indeterminate;
  return v;
}

/// Blind pipeline: window, trace, fit, decide. Throws InsufficientSpectrum
/// when the spectrum cannot support a window.
inline Verdict classify(const Spectrum& spectrum, const ClassifyOptions& opt = {}) {
  if (opt.chi > 1) throw DomainError("planar domains have Euler characteristic <= 1, got " + std::to_string(opt.chi));
  return decide(fit_spectrum(spectrum, opt.window), opt);
}

/// f(x) = sum_k (1/x_k + x_k) with x_k = theta_k / pi. Its minimum over
/// positive x is 2n, attained only at x = (1, ..., 1), which is not a corner.
inline double f_corner(std::span<const double> x) {
  double f = 0.0;
  for (double xk : x) {
    if (!(xk > 0.0)) throw DomainError("angle ratios must be positive");
    f += 1.0 / xk + xk;
  }
  return f;
}

/// a0 in terms of angle ratios: f(x)/24 - n/12 + chi/6.
inline double a0_from_angle_ratios(std::span<const double> x, int chi = 1) {
  return f_corner(x) / 24.0 - static_cast<double>(x.size()) / 12.0 + chi / 6.0;
}

/// Strict lower bound on a0 for a domain with n >= 1 corners: chi/6 (1/6 in
/// the simply connected case). For n = 0 the value chi/6 is attained exactly.
inline double a0_lower_bound(int n, int chi = 1) {
  if (n < 0) throw DomainError("corner count must be nonnegative");
  return chi / 6.0;
}

struct IsospectralComparison {
  bool isospectral = false;
  double max_deviation = 0.0;  ///< max_k |lambda_k(a) - lambda_k(b)| / lambda_k(a)
  std::size_t worst_index = 0;  ///< 1-based
  std::size_t first_mismatch = 0;  ///< 1-based index of the first mode beyond rel_tol, 0 if none
};

inline IsospectralComparison isospectral_compare(const Spectrum& a, const Spectrum& b, std::size_t count,
                                                 double rel_tol) {
  if (count == 0) throw DomainError("count must be positive");
  if (a.size() < count || b.size() < count)
    throw DomainError("spectra hold " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                      " eigenvalues, fewer than the requested " + std::to_string(count));
  IsospectralComparison c;
  for (std::size_t k = 0; k < count; ++k) {
    const double d = std::abs(a[k] - b[k]) / a[k];
    if (k == 0 || d > c.max_deviation) {
      c.max_deviation = d;
      c.worst_index = k + 1;
    }
    if (d > rel_tol && c.first_mismatch == 0) c.first_mismatch = k + 1;
  }
  c.isospectral = c.max_deviation <= rel_tol;
  return c;
}

}  // namespace hearcorners
