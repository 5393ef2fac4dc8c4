#pragma once

// Reads the small-time expansion coefficients off a sampled heat trace by
// relative-error weighted least squares on the basis {1/t, 1/sqrt(t), 1, sqrt(t)}.
// The sqrt(t) column absorbs the leading remainder of the three-term
// expansion; an optional t column is available for sensitivity studies.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hearcorners/errors.hpp"
#include "hearcorners/heat_trace.hpp"
#include "hearcorners/spectrum.hpp"
#include "hearcorners/text_io.hpp"

namespace hearcorners {

struct WindowOptions {
  double kappa = 12.0;          ///< t_min = kappa / cutoff
  std::size_t points = 60;      ///< geometric grid size
  double min_ratio = 8.0;       ///< required t_max / t_min
  std::optional<double> t_min;  ///< explicit overrides
  std::optional<double> t_max;
};

struct FitWindow {
  double t_min = 0.0;
  double t_max = 0.0;
  std::vector<double> grid;
};

/// t_min = kappa / cutoff; t_max = min(0.5 / lambda_1, 0.05 |Omega|) with
/// |Omega| estimated as 4 pi N / cutoff. Requires the window to span a factor
/// min_ratio and the a0 term (~1/6) to be at least 1e-3 of h(t_max).
inline FitWindow choose_window(const Spectrum& spectrum, const WindowOptions& opt = {}) {
  if (spectrum.empty()) throw InsufficientSpectrum("empty spectrum", 0.0);
  if (!(opt.kappa > 0.0)) throw DomainError("kappa must be positive");
  const double cutoff = spectrum.cutoff;
  const double n = static_cast<double>(spectrum.complete_count());
  if (n < 1) throw InsufficientSpectrum("no eigenvalue below the spectrum cutoff", spectrum[0]);
  const double area_est = 4.0 * pi * n / cutoff;
  FitWindow w;
  w.t_min = opt.t_min.value_or(opt.kappa / cutoff);
  w.t_max = opt.t_max.value_or(std::min(0.5 / spectrum[0], 0.05 * area_est));
  const double required = opt.kappa * opt.min_ratio / w.t_max;
  if (!(w.t_max >= opt.min_ratio * w.t_min) && !opt.t_min)
    throw InsufficientSpectrum("spectrum too short for a heat-trace window: cutoff " + format_double(cutoff) +
                                   " gives t_min = " + format_double(w.t_min) + " but t_max = " +
                                   format_double(w.t_max) + "; need cutoff >= " + format_double(required),
                               required);
  if (!(w.t_max > w.t_min)) throw InsufficientSpectrum("empty heat-trace window", required);
  const double h_est = area_est / (4.0 * pi * w.t_max);
  if ((1.0 / 6.0) < 1e-3 * h_est)
    throw InsufficientSpectrum("constant term would be below 1e-3 of h(t_max); widen the window", required);
  w.grid = geometric_grid(w.t_min, w.t_max, std::max<std::size_t>(opt.points, 10));
  return w;
}

struct FitOptions {
  /// Pin a_{-1} and a_{-1/2} to a known area and perimeter and fit only the
  /// constant and sqrt(t) terms.
  std::optional<double> pinned_area;
  std::optional<double> pinned_perimeter;
  bool include_t_term = false;
  /// Refit on shrunken windows and on tail-shifted data to estimate the
  /// systematic part of the uncertainty.
  bool robustness_probes = true;
  double max_tail_fraction = 0.01;
  double max_condition = 1e12;

  bool assisted() const { return pinned_area.has_value() && pinned_perimeter.has_value(); }
};

struct AsymptoticFit {
  // Physical coefficients: a_minus1 [length^2], a_minus_half [length],
  // a0 [dimensionless], a_half [1/length], a_one [1/length^2].
  double a_minus1 = 0.0, a_minus_half = 0.0, a0 = 0.0, a_half = 0.0;
  std::optional<double> a_one;
  // Total uncertainties (statistical and systematic combined in quadrature).
  double sigma_a_minus1 = 0.0, sigma_a_minus_half = 0.0, sigma_a0 = 0.0, sigma_a_half = 0.0;
  // Components of sigma_a0.
  double a0_statistical = 0.0;
  double a0_window = 0.0;
  double a0_truncation = 0.0;

  double t_min = 0.0, t_max = 0.0;
  std::size_t samples = 0;
  bool assisted = false;
  double max_relative_residual = 0.0;
  double rms_relative_residual = 0.0;
  double condition = 0.0;

  double implied_area() const { return 4.0 * pi * a_minus1; }
  double implied_perimeter() const { return -8.0 * std::sqrt(pi) * a_minus_half; }

  bool operator==(const AsymptoticFit&) const = default;
};

namespace detail {

struct RawFit {
  Eigen::VectorXd coef;       // in basis order {1/t, 1/sqrt t, 1, sqrt t, [t]} minus pinned ones
  Eigen::VectorXd stat_sigma;
  double max_rel = 0.0, rms_rel = 0.0, condition = 0.0;
};

/// Weighted least squares of y on the chosen basis with weights 1/h.
inline RawFit solve_relative_lsq(const std::vector<double>& t, const std::vector<double>& h,
                                 const std::vector<double>& y, const std::vector<int>& powers2,
                                 double max_condition) {
  // powers2 holds twice the exponent of t for each basis column.
  const Eigen::Index n = static_cast<Eigen::Index>(t.size());
  const Eigen::Index p = static_cast<Eigen::Index>(powers2.size());
  if (n < p + 2) throw FitError("too few samples (" + std::to_string(n) + ") for " + std::to_string(p) + " terms");
  // Normalized time keeps the columns O(1).
  const double t_ref = std::sqrt(t.front() * t.back());
  Eigen::MatrixXd a(n, p);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tau = t[static_cast<std::size_t>(i)] / t_ref;
    const double w = 1.0 / h[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = std::pow(tau, 0.5 * powers2[static_cast<std::size_t>(j)]) * w;
    rhs(i) = y[static_cast<std::size_t>(i)] * w;
  }
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < p; ++j) a.col(j) /= scale(j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  RawFit r;
  r.condition = sv(0) / sv(p - 1);
  if (!(r.condition <= max_condition))
    throw FitError("ill-conditioned fit (condition " + format_double(r.condition) +
                   "); use a wider t window");
  const Eigen::VectorXd xs = svd.solve(rhs);
  const Eigen::VectorXd res = a * xs - rhs;
  r.max_rel = res.cwiseAbs().maxCoeff();
  r.rms_rel = std::sqrt(res.squaredNorm() / static_cast<double>(n));
  const double s2 = res.squaredNorm() / static_cast<double>(n - p);
  const Eigen::MatrixXd v = svd.matrixV();
  Eigen::VectorXd inv_s2 = sv.cwiseInverse().cwiseAbs2();
  const Eigen::MatrixXd cov = v * inv_s2.asDiagonal() * v.transpose() * s2;
  r.coef.resize(p);
  r.stat_sigma.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    // back to physical time: c * tau^e = c * t_ref^{-e} * t^e
    const double unscale = std::pow(t_ref, -0.5 * powers2[static_cast<std::size_t>(j)]) / scale(j);
    r.coef(j) = xs(j) * unscale;
    r.stat_sigma(j) = std::sqrt(std::max(cov(j, j), 0.0)) * std::abs(unscale);
  }
  return r;
}

struct CoefficientSet {
  double a_minus1, a_minus_half, a0, a_half;
  std::optional<double> a_one;
  RawFit raw;
};

inline CoefficientSet fit_once(const std::vector<double>& t, const std::vector<double>& h,
                               const FitOptions& opt) {
  std::vector<int> powers2;
  std::vector<double> y = h;
  double pinned_m1 = 0.0, pinned_mh = 0.0;
  if (opt.assisted()) {
    pinned_m1 = *opt.pinned_area / (4.0 * pi);
    pinned_mh = -*opt.pinned_perimeter / (8.0 * std::sqrt(pi));
    for (std::size_t i = 0; i < t.size(); ++i) y[i] -= pinned_m1 / t[i] + pinned_mh / std::sqrt(t[i]);
    powers2 = {0, 1};
  } else {
    powers2 = {-2, -1, 0, 1};
  }
  if (opt.include_t_term) powers2.push_back(2);
  CoefficientSet c{};
  c.raw = solve_relative_lsq(t, h, y, powers2, opt.max_condition);
  std::size_t j = 0;
  if (opt.assisted()) {
    c.a_minus1 = pinned_m1;
    c.a_minus_half = pinned_mh;
  } else {
    c.a_minus1 = c.raw.coef(j++);
    c.a_minus_half = c.raw.coef(j++);
  }
  c.a0 = c.raw.coef(j++);
  c.a_half = c.raw.coef(j++);
  if (opt.include_t_term) c.a_one = c.raw.coef(j++);
  return c;
}

}  // namespace detail

inline AsymptoticFit fit_expansion(const TraceSamples& samples, const FitOptions& opt = {}) {
  if (samples.size() < 10) throw FitError("need at least 10 heat-trace samples, got " + std::to_string(samples.size()));
  if (opt.pinned_area.has_value() != opt.pinned_perimeter.has_value())
    throw FitError("assisted mode needs both area and perimeter");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples.h[i] > 0.0)) throw FitError("heat-trace samples must be positive");
    if (samples.tail_bound[i] > opt.max_tail_fraction * samples.h[i])
      throw FitError("truncation tail exceeds " + format_double(100 * opt.max_tail_fraction) + "% of h at t = " +
                     format_double(samples.t[i]) + "; raise the cutoff or t_min");
  }
  const auto base = detail::fit_once(samples.t, samples.h, opt);

  AsymptoticFit f;
  f.a_minus1 = base.a_minus1;
  f.a_minus_half = base.a_minus_half;
  f.a0 = base.a0;
  f.a_half = base.a_half;
  f.a_one = base.a_one;
  f.t_min = samples.t.front();
  f.t_max = samples.t.back();
  f.samples = samples.size();
  f.assisted = opt.assisted();
  f.max_relative_residual = base.raw.max_rel;
  f.rms_relative_residual = base.raw.rms_rel;
  f.condition = base.raw.condition;

  std::size_t j = 0;
  double stat_m1 = 0.0, stat_mh = 0.0;
  if (!f.assisted) {
    stat_m1 = base.raw.stat_sigma(j++);
    stat_mh = base.raw.stat_sigma(j++);
  }
  const double stat_a0 = base.raw.stat_sigma(j++);
  const double stat_ah = base.raw.stat_sigma(j++);
  f.a0_statistical = stat_a0;

  double sys_m1 = 0.0, sys_mh = 0.0, sys_ah = 0.0;
  if (opt.robustness_probes) {
    auto shift = [&](const detail::CoefficientSet& c, double& a0_component) {
      a0_component = std::max(a0_component, std::abs(c.a0 - base.a0));
      sys_m1 = std::max(sys_m1, std::abs(c.a_minus1 - base.a_minus1));
      sys_mh = std::max(sys_mh, std::abs(c.a_minus_half - base.a_minus_half));
      sys_ah = std::max(sys_ah, std::abs(c.a_half - base.a_half));
    };
    auto sub_window = [&](double lo, double hi) {
      std::vector<double> t, h;
      for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples.t[i] >= lo && samples.t[i] <= hi) {
          t.push_back(samples.t[i]);
          h.push_back(samples.h[i]);
        }
      return std::pair{t, h};
    };
    for (auto [lo, hi] : {std::pair{f.t_min, 0.5 * f.t_max}, std::pair{2.0 * f.t_min, f.t_max}}) {
      auto [t, h] = sub_window(lo, hi);
      if (t.size() >= 10) shift(detail::fit_once(t, h, opt), f.a0_window);
    }
    std::vector<double> shifted = samples.h;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += samples.tail_bound[i];
    shift(detail::fit_once(samples.t, shifted, opt), f.a0_truncation);
  }
  auto rss = [](double a, double b) { return std::sqrt(a * a + b * b); };
  f.sigma_a0 = std::sqrt(stat_a0 * stat_a0 + f.a0_window * f.a0_window + f.a0_truncation * f.a0_truncation);
  f.sigma_a_minus1 = f.assisted ? 0.0 : rss(stat_m1, sys_m1);
  f.sigma_a_minus_half = f.assisted ? 0.0 : rss(stat_mh, sys_mh);
  f.sigma_a_half = rss(stat_ah, sys_ah);
  return f;
}

/// Value of the fitted model at t.
inline double fitted_model(const AsymptoticFit& f, double t) {
  double v = f.a_minus1 / t + f.a_minus_half / std::sqrt(t) + f.a0 + f.a_half * std::sqrt(t);
  if (f.a_one) v += *f.a_one * t;
  return v;
}

/// Window + trace + fit in one call.
inline AsymptoticFit fit_spectrum(const Spectrum& spectrum, const WindowOptions& wopt = {},
                                  const FitOptions& fopt = {}) {
  const auto w = choose_window(spectrum, wopt);
  const auto samples = evaluate_trace(spectrum, w.grid);
  return fit_expansion(samples, fopt);
}

}  // namespace hearcorners
