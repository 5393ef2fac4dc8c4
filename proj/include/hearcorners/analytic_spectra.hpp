#pragma once

// Exact Dirichlet spectra of reference domains, complete below a cutoff.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hearcorners/bessel.hpp"
#include "hearcorners/errors.hpp"
#include "hearcorners/geometry.hpp"
#include "hearcorners/spectrum.hpp"
#include "hearcorners/text_io.hpp"

namespace hearcorners {

namespace detail {

inline Spectrum finish_analytic(std::vector<double> ev, double cutoff, std::string label, double area,
                                double first_eigenvalue) {
  if (ev.empty())
    throw InsufficientSpectrum("cutoff " + format_double(cutoff) + " lies below the first eigenvalue " +
                                   format_double(first_eigenvalue) + " of the " + label,
                               first_eigenvalue);
  std::sort(ev.begin(), ev.end());
  Spectrum s;
  s.eigenvalues = std::move(ev);
  s.cutoff = cutoff;
  s.source = SpectrumSource::analytic;
  s.domain_label = std::move(label);
  s.area_hint = area;
  return s;
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
}

}  // namespace detail

/// pi^2 (m^2/a^2 + n^2/b^2), m, n >= 1.
inline Spectrum rectangle_spectrum(double a, double b, double cutoff) {
  detail::require_positive(a, "rectangle side a");
  detail::require_positive(b, "rectangle side b");
  const double pa = pi * pi / (a * a), pb = pi * pi / (b * b);
  std::vector<double> ev;
  for (long m = 1; pa * m * m + pb <= cutoff; ++m)
    for (long n = 1; pa * m * m + pb * n * n <= cutoff; ++n) ev.push_back(pa * m * m + pb * n * n);
  auto s = detail::finish_analytic(std::move(ev), cutoff, "rectangle", a * b, pa + pb);
  s.annotate("family", "rectangle");
  s.annotate("a", format_double(a));
  s.annotate("b", format_double(b));
  return s;
}

/// (j_{nu,k}/R)^2 for integer nu >= 0; nu > 0 modes are doubly degenerate.
inline Spectrum disk_spectrum(double radius, double cutoff) {
  detail::require_positive(radius, "disk radius");
  const double x_max = radius * std::sqrt(std::max(cutoff, 0.0));
  std::vector<double> ev;
  for (int nu = 0;; ++nu) {
    const auto z = bessel_zeros_below(nu, std::nextafter(x_max, 1e300));
    if (z.empty()) break;
    for (double j : z) {
      const double l = (j / radius) * (j / radius);
      if (l > cutoff) continue;
      ev.push_back(l);
      if (nu > 0) ev.push_back(l);
    }
  }
  const double j01 = 2.404825557695773;
  auto s = detail::finish_analytic(std::move(ev), cutoff, "disk", pi * radius * radius,
                                   j01 * j01 / (radius * radius));
  s.annotate("family", "disk");
  s.annotate("radius", format_double(radius));
  return s;
}

/// Circular sector of opening theta: (j_{m pi/theta, k}/R)^2, m, k >= 1.
inline Spectrum sector_spectrum(double theta, double radius, double cutoff) {
  if (!(theta > 0.0 && theta < two_pi)) throw DomainError("sector angle must lie in (0, 2*pi)");
  detail::require_positive(radius, "sector radius");
  const double x_max = radius * std::sqrt(std::max(cutoff, 0.0));
  std::vector<double> ev;
  const double base = pi / theta;
  for (int m = 1;; ++m) {
    const auto z = bessel_zeros_below(m * base, std::nextafter(x_max, 1e300));
    if (z.empty()) break;
    for (double j : z) {
      const double l = (j / radius) * (j / radius);
      if (l <= cutoff) ev.push_back(l);
    }
  }
  double first = 0.0;
  if (ev.empty()) {
    // j_{nu,1} < nu + 4 nu^(1/3) + 10 comfortably for all nu.
    const auto z = bessel_zeros_below(base, base + 4.0 * std::cbrt(base) + 10.0);
    first = z.empty() ? 0.0 : (z.front() / radius) * (z.front() / radius);
  }
  auto s = detail::finish_analytic(std::move(ev), cutoff, "sector", 0.5 * theta * radius * radius, first);
  s.annotate("family", "sector");
  s.annotate("theta", format_double(theta));
  s.annotate("radius", format_double(radius));
  return s;
}

/// Equilateral triangle of side s: (16 pi^2 / (9 s^2)) (m^2 + m n + n^2) over
/// ordered pairs m, n >= 1. The pair (m, n) with m != n and its mirror (n, m)
/// are the symmetric and antisymmetric modes of one degenerate level; m == n
/// gives a simple eigenvalue.
inline Spectrum equilateral_triangle_spectrum(double side, double cutoff) {
  detail::require_positive(side, "triangle side");
  const double c = 16.0 * pi * pi / (9.0 * side * side);
  std::vector<double> ev;
  for (long m = 1; c * (m * m + m + 1) <= cutoff; ++m)
    for (long n = 1; c * (m * m + m * n + n * n) <= cutoff; ++n) ev.push_back(c * (m * m + m * n + n * n));
  auto s = detail::finish_analytic(std::move(ev), cutoff, "equilateral-triangle",
                                   0.25 * std::sqrt(3.0) * side * side, 3.0 * c);
  s.annotate("family", "equilateral-triangle");
  s.annotate("side", format_double(side));
  return s;
}

/// A domain recognized as one of the families with a closed-form spectrum.
struct ReferenceFamily {
  std::string name;  ///< rectangle, disk, sector, equilateral-triangle
  double a = 0.0;    ///< side a, radius, radius, side
  double b = 0.0;    ///< side b, -, opening angle, -
};

namespace detail {

inline bool close(double x, double y, double rel = 1e-9) {
  return std::abs(x - y) <= rel * std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace detail

/// Conservative recognition: exact segment kinds and angle checks. Anything
/// that does not match cleanly returns nullopt and should go to FEM.
inline std::optional<ReferenceFamily> detect_reference_family(const DomainSpec& d) {
  if (d.loops().size() != 1) return std::nullopt;
  const auto& loop = d.outer();
  const auto& segs = loop.segments();
  const auto corners = detect_corners(d);
  const bool all_lines = std::all_of(segs.begin(), segs.end(), [](const Segment& s) { return s.kind() == SegmentKind::line; });
  const bool all_arcs = std::all_of(segs.begin(), segs.end(), [](const Segment& s) { return s.kind() == SegmentKind::arc; });

  if (all_lines) {
    const auto side = [&](std::size_t i) { return distance(corners[i].vertex, corners[(i + 1) % corners.size()].vertex); };
    const auto all_angles = [&](double theta) {
      return std::all_of(corners.begin(), corners.end(), [&](const Corner& c) { return detail::close(c.theta, theta); });
    };
    if (corners.size() == 4 && all_angles(pi / 2) && detail::close(side(0), side(2)) && detail::close(side(1), side(3)))
      return ReferenceFamily{"rectangle", side(0), side(1)};
    if (corners.size() == 3 && all_angles(pi / 3) && detail::close(side(0), side(1)) && detail::close(side(1), side(2)))
      return ReferenceFamily{"equilateral-triangle", side(0), 0.0};
    return std::nullopt;
  }

  if (all_arcs && corners.empty()) {
    const auto& first = segs.front().as_arc();
    double sweep = 0.0;
    for (const auto& s : segs) {
      const auto& a = s.as_arc();
      if (!(a.radius > 0.0) || !detail::close(a.radius, first.radius) || !detail::close(a.center.x, first.center.x) ||
          !detail::close(a.center.y, first.center.y))
        return std::nullopt;
      sweep += a.sweep;
    }
    if (detail::close(sweep, two_pi)) return ReferenceFamily{"disk", first.radius, 0.0};
    return std::nullopt;
  }

  if (segs.size() == 3) {
    // line apex -> A, arc A -> B about the apex, line B -> apex, in any rotation
    for (std::size_t r = 0; r < 3; ++r) {
      const Segment& in = segs[r];
      const Segment& arc = segs[(r + 1) % 3];
      const Segment& out = segs[(r + 2) % 3];
      if (in.kind() != SegmentKind::line || arc.kind() != SegmentKind::arc || out.kind() != SegmentKind::line) continue;
      const auto& a = arc.as_arc();
      const Vec2 apex = in.as_line().from;
      if (!(a.radius > 0.0) || !detail::close(distance(apex, a.center), 0.0) ||
          !detail::close(distance(out.as_line().to, apex), 0.0))
        return std::nullopt;
      return ReferenceFamily{"sector", a.radius, a.sweep};
    }
  }
  return std::nullopt;
}

inline Spectrum reference_spectrum(const ReferenceFamily& f, double cutoff) {
  if (f.name == "rectangle") return rectangle_spectrum(f.a, f.b, cutoff);
  if (f.name == "disk") return disk_spectrum(f.a, cutoff);
  if (f.name == "sector") return sector_spectrum(f.b, f.a, cutoff);
  if (f.name == "equilateral-triangle") return equilateral_triangle_spectrum(f.a, cutoff);
  throw DomainError("unknown reference family '" + f.name + "'");
}

}  // namespace hearcorners
