#pragma once

// Heat trace h(t) = sum_k exp(-lambda_k t) of a truncated spectrum, and the
// coefficients of its small-time expansion computed from geometry:
//
//   h(t) ~ |Omega|/(4 pi t) - |dOmega|/(8 sqrt(pi t)) + a0,
//   a0 = (1/(12 pi)) * int k ds + sum_j (pi^2 - theta_j^2) / (24 pi theta_j).

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "hearcorners/errors.hpp"
#include "hearcorners/geometry.hpp"
#include "hearcorners/spectrum.hpp"
#include "hearcorners/text_io.hpp"

namespace hearcorners {

/// Local heat-trace contribution of a corner with opening angle theta.
inline double corner_term(double theta) {
  if (!(theta > 0.0 && theta < two_pi))
    throw DomainError("corner angle " + format_double(theta) + " outside (0, 2*pi): cusps and slits are unsupported");
  return (pi * pi - theta * theta) / (24.0 * pi * theta);
}

/// Same corner expressed with its share of the Gauss-Bonnet turning:
/// theta/(12 pi) + corner_term(theta) = (pi^2 + theta^2)/(24 pi theta).
inline double corner_term_with_turning(double theta) {
  if (!(theta > 0.0 && theta < two_pi)) throw DomainError("corner angle outside (0, 2*pi)");
  return (pi * pi + theta * theta) / (24.0 * pi * theta);
}

struct TheoreticalCoefficients {
  double area = 0.0;
  double perimeter = 0.0;
  double a_minus1 = 0.0;      ///< |Omega| / (4 pi)
  double a_minus_half = 0.0;  ///< -|dOmega| / (8 sqrt(pi))
  double a0 = 0.0;
  double a0_curvature_route = 0.0;  ///< int k ds / (12 pi) + sum corner_term
  double a0_angle_route = 0.0;      ///< chi/6 + sum [(pi^2+theta^2)/(24 pi theta) - 1/12]
  double curvature_integral = 0.0;
  double curvature_contribution = 0.0;  ///< int k ds / (12 pi)
  std::vector<Corner> corners;
  std::vector<double> corner_terms;
  int euler_characteristic = 1;
};

inline TheoreticalCoefficients theoretical_coefficients(const DomainSpec& domain,
                                                        double angle_tol = default_angle_tol) {
  TheoreticalCoefficients c;
  c.area = area(domain);
  c.perimeter = perimeter(domain);
  c.a_minus1 = c.area / (4.0 * pi);
  c.a_minus_half = -c.perimeter / (8.0 * std::sqrt(pi));
  c.euler_characteristic = domain.euler_characteristic();
  c.corners = detect_corners(domain, angle_tol);
  c.curvature_integral = curvature_integral(domain, angle_tol);
  c.curvature_contribution = c.curvature_integral / (12.0 * pi);

  double corners_sum = 0.0, reduced_sum = 0.0;
  for (const auto& corner : c.corners) {
    c.corner_terms.push_back(corner_term(corner.theta));
    corners_sum += c.corner_terms.back();
    reduced_sum += corner_term_with_turning(corner.theta) - 1.0 / 12.0;
  }
  c.a0_curvature_route = c.curvature_contribution + corners_sum;
  c.a0_angle_route = c.euler_characteristic / 6.0 + reduced_sum;
  if (std::abs(c.a0_curvature_route - c.a0_angle_route) > 1e-10)
    throw NumericError("a0 routes disagree (" + format_double(c.a0_curvature_route) + " vs " +
                       format_double(c.a0_angle_route) + "): inconsistent boundary geometry");
  c.a0 = c.a0_angle_route;
  return c;
}

/// The three-term expansion a_{-1}/t + a_{-1/2}/sqrt(t) + a0.
inline double expansion_value(const TheoreticalCoefficients& c, double t) {
  return c.a_minus1 / t + c.a_minus_half / std::sqrt(t) + c.a0;
}

// ---------------------------------------------------------------------------

struct TraceSamples {
  std::vector<double> t;
  std::vector<double> h;           ///< partial sums over eigenvalues <= cutoff
  std::vector<double> tail_bound;  ///< estimated truncation error
  std::vector<bool> flagged;       ///< tail_bound > 10% of h
  double cutoff = 0.0;
  double safety_factor = 2.0;
  double area_used = 0.0;  ///< area entering the Weyl-density tail estimate

  std::size_t size() const { return t.size(); }
};

inline std::vector<double> geometric_grid(double t_min, double t_max, std::size_t n) {
  if (!(t_min > 0.0) || !(t_max > t_min) || n < 2) throw DomainError("invalid t grid");
  std::vector<double> g(n);
  const double r = std::log(t_max / t_min) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = t_min * std::exp(r * static_cast<double>(i));
  g.front() = t_min;
  g.back() = t_max;
  return g;
}

/// Weyl-density estimate of the omitted tail, times a safety factor:
/// safety * |Omega| exp(-cutoff t) / (4 pi t).
inline double weyl_tail_estimate(double area, double cutoff, double t, double safety = 2.0) {
  return safety * area * std::exp(-cutoff * t) / (4.0 * pi * t);
}

/// Partial heat trace on the grid, summed in ascending eigenvalue order with
/// compensated summation. Without an area hint the area is estimated from
/// the eigenvalue count, 4 pi N(cutoff) / cutoff.
inline TraceSamples evaluate_trace(const Spectrum& spectrum, const std::vector<double>& grid,
                                   std::optional<double> area_hint = std::nullopt, double safety = 2.0) {
  if (spectrum.empty()) throw InsufficientSpectrum("cannot evaluate the heat trace of an empty spectrum", 0.0);
  TraceSamples s;
  s.cutoff = spectrum.cutoff;
  s.safety_factor = safety;
  const std::size_t n = spectrum.complete_count();
  if (n == 0) throw InsufficientSpectrum("spectrum has no eigenvalues below its cutoff", spectrum[0]);
  if (!area_hint) area_hint = spectrum.area_hint;
  s.area_used = area_hint ? *area_hint : 4.0 * pi * static_cast<double>(n) / spectrum.cutoff;
  for (double t : grid) {
    if (!(t > 0.0)) throw DomainError("heat-trace times must be positive");
    // Neumaier summation
    double sum = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double term = std::exp(-spectrum[k] * t);
      const double tmp = sum + term;
      if (std::abs(sum) >= std::abs(term)) comp += (sum - tmp) + term;
      else comp += (term - tmp) + sum;
      sum = tmp;
      if (term < 1e-300) break;
    }
    const double h = sum + comp;
    const double tail = weyl_tail_estimate(s.area_used, spectrum.cutoff, t, safety);
    s.t.push_back(t);
    s.h.push_back(h);
    s.tail_bound.push_back(tail);
    s.flagged.push_back(tail > 0.1 * h);
  }
  return s;
}

inline std::string format_trace_samples(const TraceSamples& s) {
  std::ostringstream out;
  out << "# hearcorners-trace version=1 cutoff=" << format_double(s.cutoff)
      << " safety_factor=" << format_double(s.safety_factor) << " area_used=" << format_double(s.area_used)
      << "\n";
  out << "t,h,tail_bound\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << format_double(s.t[i]) << "," << format_double(s.h[i]) << "," << format_double(s.tail_bound[i])
        << "\n";
  return out.str();
}

inline TraceSamples parse_trace_samples(const std::string& text) {
  TraceSamples s;
  std::map<std::string, std::string> header;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      parse_header_tokens(std::string_view(line).substr(1), header);
      continue;
    }
    if (line.rfind("t,", 0) == 0) continue;
    std::stringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c, ','))
      throw ParseError("trace line '" + line + "' must have three columns");
    s.t.push_back(std::stod(a));
    s.h.push_back(std::stod(b));
    s.tail_bound.push_back(std::stod(c));
    s.flagged.push_back(s.tail_bound.back() > 0.1 * s.h.back());
  }
  if (header.count("cutoff")) s.cutoff = std::stod(header["cutoff"]);
  if (header.count("safety_factor")) s.safety_factor = std::stod(header["safety_factor"]);
  if (header.count("area_used")) s.area_used = std::stod(header["area_used"]);
  return s;
}

// ---------------------------------------------------------------------------

/// Heat-kernel trace of an infinite wedge of opening theta taken over a
/// finite wedge of area |W| and side length |dW|. The O(exp(-c/t))
/// remainder is omitted; see wedge_remainder_bound.
inline double wedge_trace(double wedge_area, double side_length, double theta, double t) {
  if (!(t > 0.0)) throw DomainError("t must be positive");
  return wedge_area / (4.0 * pi * t) - side_length / (8.0 * std::sqrt(pi * t)) + corner_term(theta);
}

/// Conservative c-free bound exp(-diam^2 / (16 t)) for the omitted remainder.
inline double wedge_remainder_bound(double diam, double t) { return std::exp(-diam * diam / (16.0 * t)); }

/// Boundary term -L/(8 sqrt(pi t)) of the Dirichlet half-plane kernel,
/// cross-checked against quadrature of the image term -exp(-x^2/t)/(4 pi t)
/// over the normal direction x in (0, inf).
inline double halfplane_boundary_correction(double t, double length) {
  if (!(t > 0.0) || !(length > 0.0)) throw DomainError("t and length must be positive");
  const double closed = -1.0 / (8.0 * std::sqrt(pi * t));
  boost::math::quadrature::exp_sinh<double> integrator;
  const double quad = integrator.integrate([t](double x) { return -std::exp(-x * x / t) / (4.0 * pi * t); });
  if (std::abs(quad - closed) > 1e-8 * std::abs(closed))
    throw NumericError("half-plane boundary term quadrature mismatch: " + format_double(quad) + " vs " +
                       format_double(closed));
  return length * closed;
}

}  // namespace hearcorners
