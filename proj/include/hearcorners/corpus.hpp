#pragma once

// Bundled verification corpus. The ten acceptance criteria and the wider
// verify table share one Context, so each expensive spectrum (disk Bessel
// zeros, the FEM L-shape) is computed once per run.

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hearcorners/analytic_spectra.hpp"
#include "hearcorners/asymptotic_fit.hpp"
#include "hearcorners/classifier.hpp"
#include "hearcorners/fem.hpp"
#include "hearcorners/geometry.hpp"
#include "hearcorners/heat_trace.hpp"
#include "hearcorners/mesh.hpp"
#include "hearcorners/spectrum.hpp"

namespace hearcorners::corpus {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Row {
  std::string id;
  std::string group;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  /// Fault injection: every classifier row has its a0 estimate shifted by
  /// this amount toward the wrong side of chi/6. Zero in normal use.
  double inject_a0 = 0.0;
  std::uint64_t seed = 1;
  FemOptions fem{};
};

/// Regular n-gon: n corners of angle pi (n - 2) / n.
inline double regular_polygon_a0(int n) {
  if (n < 3) throw DomainError("a polygon needs at least 3 sides");
  return n * corner_term(pi * (n - 2) / n);
}

/// Isospectral, non-congruent drums: two simple polygons of area 7/2, each a
/// union of seven half-squares of the unit lattice.
inline std::pair<DomainSpec, DomainSpec> isospectral_drums() {
  return {shapes::polygon({{0, 0}, {1, 0}, {1, 1}, {2, 1}, {3, 2}, {2, 2}, {2, 3}, {0, 1}}, "drum-a"),
          shapes::polygon({{0, 1}, {1, 0}, {1, 1}, {2, 1}, {3, 2}, {2, 3}, {2, 2}, {0, 2}}, "drum-b")};
}

/// Random simple polygon, star-shaped about the origin: sorted random polar
/// angles with random radii.
template <class Rng>
DomainSpec random_star_polygon(Rng& rng, int n) {
  std::uniform_real_distribution<double> angle(0.0, two_pi), radius(0.2, 1.0);
  std::vector<double> a(static_cast<std::size_t>(n));
  for (;;) {
    for (double& x : a) x = angle(rng);
    std::sort(a.begin(), a.end());
    // Every angular gap in (1e-3, 0.9 pi) keeps the polygon star-shaped about 0.
    const auto gap_ok = [](double g) { return g > 1e-3 && g < 0.9 * pi; };
    bool spread = gap_ok(a.front() + two_pi - a.back());
    for (std::size_t i = 1; i < a.size(); ++i) spread = spread && gap_ok(a[i] - a[i - 1]);
    if (spread) break;
  }
  std::vector<Vec2> v;
  for (double x : a) {
    const double r = radius(rng);
    v.push_back({r * std::cos(x), r * std::sin(x)});
  }
  return shapes::polygon(std::move(v), "random-polygon");
}

class Context {
 public:
  explicit Context(Options opt = {}) : opt_(std::move(opt)) {}

  const Options& options() const { return opt_; }

  const Spectrum& square() { return cached("square", [] { return rectangle_spectrum(1, 1, 2e5); }); }
  const Spectrum& rectangle() { return cached("rectangle", [] { return rectangle_spectrum(2, 1, 1e5); }); }
  const Spectrum& disk() { return cached("disk", [] { return disk_spectrum(1, 1e5); }); }
  const Spectrum& quarter_disk() { return cached("quarter-disk", [] { return sector_spectrum(pi / 2, 1, 1e5); }); }
  const Spectrum& half_disk() { return cached("half-disk", [] { return sector_spectrum(pi, 1, 1e5); }); }
  const Spectrum& triangle() {
    return cached("triangle", [] { return equilateral_triangle_spectrum(1, 2e5); });
  }
  const FemRun& l_shape_run() {
    if (!l_shape_) l_shape_ = std::make_unique<FemRun>(fem_spectrum(shapes::l_shape(), opt_.fem));
    return *l_shape_;
  }
  const Spectrum& l_shape() { return l_shape_run().spectrum; }

  const AsymptoticFit& blind_fit(const std::string& name, const Spectrum& s) {
    auto it = fits_.find(name);
    if (it == fits_.end()) it = fits_.emplace(name, fit_spectrum(s)).first;
    return it->second;
  }

 private:
  template <class Make>
  const Spectrum& cached(const std::string& name, Make make) {
    auto it = spectra_.find(name);
    if (it == spectra_.end()) it = spectra_.emplace(name, make()).first;
    return it->second;
  }

  Options opt_;
  std::map<std::string, Spectrum> spectra_;
  std::map<std::string, AsymptoticFit> fits_;
  std::unique_ptr<FemRun> l_shape_;
};

struct Check {
  std::string id;
  std::string group;
  std::string title;
  std::function<Outcome(Context&)> run;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline Outcome a0_recovery(const AsymptoticFit& fit, double truth, double tol) {
  const double err = std::abs(fit.a0 - truth);
  return {err <= tol, "a0 = " + fmt(fit.a0) + " +- " + fmt(fit.sigma_a0) + ", truth " + fmt(truth) +
                          ", error " + fmt(err) + " (tol " + fmt(tol) + ")"};
}

struct ClassifierCase {
  const char* name;
  const Spectrum& (Context::*spectrum)();
  bool corners;
};

inline const std::vector<ClassifierCase>& classifier_cases() {
  static const std::vector<ClassifierCase> cases = {
      {"square", &Context::square, true},
      {"rectangle-2x1", &Context::rectangle, true},
      {"equilateral-triangle", &Context::triangle, true},
      {"quarter-disk", &Context::quarter_disk, true},
      {"half-disk", &Context::half_disk, true},
      {"l-shape", &Context::l_shape, true},
      {"disk", &Context::disk, false},
  };
  return cases;
}

inline Outcome classify_case(Context& ctx, const ClassifierCase& c) {
  const Spectrum& s = (ctx.*c.spectrum)();
  ClassifyOptions opt;
  opt.a0_offset = c.corners ? -ctx.options().inject_a0 : ctx.options().inject_a0;
  const Verdict v = decide(ctx.blind_fit(c.name, s), opt);
  const bool ok = c.corners ? v.decision == Decision::has_corners : v.decision != Decision::has_corners;
  return {ok, std::string(to_string(v.decision)) + " (a0 = " + fmt(v.a0_estimate) + ", margin " + fmt(v.margin) +
                  ", expected " + (c.corners ? "has_corners" : "smooth or indeterminate") + ")"};
}

inline Outcome recovery_case(Context& ctx, const char* name, const Spectrum& s, double area, double perimeter) {
  const AsymptoticFit& f = ctx.blind_fit(name, s);
  const double ea = std::abs(f.implied_area() - area) / area;
  const double ep = std::abs(f.implied_perimeter() - perimeter) / perimeter;
  return {ea <= 0.005 && ep <= 0.01,
          std::string(name) + ": area error " + fmt(100 * ea) + "%, perimeter error " + fmt(100 * ep) + "%"};
}

inline Outcome rectangle_monotonicity() {
  // Each pair is (outer, inner) with inner inside outer.
  const double pairs[][4] = {{1.0, 1.0, 0.9, 0.95}, {2.0, 1.0, 1.5, 1.0}, {1.3, 0.7, 1.3, 0.69}, {3.0, 2.0, 1.0, 1.0}};
  std::size_t violations = 0, compared = 0;
  for (const auto& p : pairs) {
    const auto count = [](double a, double b) { return 200.0 * 4.0 * pi / (a * b) + 400.0 * (a + b) / (a * b); };
    const Spectrum outer = rectangle_spectrum(p[0], p[1], count(p[2], p[3]));
    const Spectrum inner = rectangle_spectrum(p[2], p[3], count(p[2], p[3]));
    if (outer.size() < 200 || inner.size() < 200) return {false, "fewer than 200 modes below the cutoff"};
    for (std::size_t k = 0; k < 200; ++k, ++compared)
      if (outer[k] > inner[k]) ++violations;
  }
  return {violations == 0, fmt(static_cast<double>(compared)) + " comparisons, " +
                               fmt(static_cast<double>(violations)) + " violations"};
}

inline Outcome random_polygons(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> sides(3, 12);
  std::size_t bound_violations = 0, f_violations = 0, route_violations = 0;
  double min_gap = HUGE_VAL;
  for (int i = 0; i < 500; ++i) {
    const DomainSpec d = random_star_polygon(rng, sides(rng));
    const auto c = theoretical_coefficients(d);
    std::vector<double> x;
    bool all_one = true;
    for (const auto& corner : c.corners) {
      x.push_back(corner.theta / pi);
      all_one = all_one && x.back() == 1.0;
    }
    if (!(c.a0 > 1.0 / 6.0)) ++bound_violations;
    min_gap = std::min(min_gap, c.a0 - 1.0 / 6.0);
    if (!all_one && !(f_corner(x) > 2.0 * static_cast<double>(x.size()))) ++f_violations;
    if (std::abs(a0_from_angle_ratios(x) - c.a0) > 1e-12) ++route_violations;
  }
  return {bound_violations + f_violations + route_violations == 0,
          "500 polygons: " + fmt(static_cast<double>(bound_violations)) + " a0 <= 1/6, " +
              fmt(static_cast<double>(f_violations)) + " f(x) <= 2n, " + fmt(static_cast<double>(route_violations)) +
              " route mismatches; min a0 - 1/6 = " + fmt(min_gap)};
}

inline std::vector<std::pair<std::string, DomainSpec>> exact_segment_domains() {
  return {{"unit-square", shapes::unit_square()},
          {"rectangle-2x1", shapes::rectangle(2, 1)},
          {"l-shape", shapes::l_shape()},
          {"equilateral-triangle", shapes::equilateral_triangle()},
          {"regular-hexagon", shapes::regular_polygon(6)},
          {"disk", shapes::disk()},
          {"quarter-disk", shapes::quarter_disk()},
          {"half-disk", shapes::half_disk()},
          {"sector-3pi/2", shapes::sector(1.5 * pi)},
          {"square-with-hole", shapes::square_with_hole()},
          {"annulus", shapes::annulus()}};
}

inline Outcome gauss_bonnet_suite() {
  double worst = 0.0;
  std::string at;
  for (const auto& [name, d] : exact_segment_domains()) {
    const double e = gauss_bonnet_check(d);
    if (e >= worst) {
      worst = e;
      at = name;
    }
  }
  return {worst <= 1e-8, "max defect " + fmt(worst) + " (" + at + ")"};
}

inline Outcome rigid_motion_invariance() {
  double worst = 0.0;
  for (const auto& [name, d] : exact_segment_domains()) {
    const auto c0 = theoretical_coefficients(d);
    const auto c1 = theoretical_coefficients(transformed(d, Similarity{1.0, 0.731, {0.3, -1.7}}));
    worst = std::max({worst, std::abs(c0.area - c1.area) / c0.area,
                      std::abs(c0.perimeter - c1.perimeter) / c0.perimeter, std::abs(c0.a0 - c1.a0)});
  }
  return {worst <= 1e-10, "max change " + fmt(worst)};
}

inline Outcome square_lattice_count(Context& ctx) {
  long brute = 0;
  const double q = 2e5 / (pi * pi);
  for (long m = 1; m * m < q; ++m)
    for (long n = 1; m * m + n * n <= q; ++n) ++brute;
  const auto got = static_cast<long>(ctx.square().size());
  return {got == brute, fmt(static_cast<double>(got)) + " eigenvalues, lattice count " + fmt(static_cast<double>(brute))};
}

inline Outcome square_trace_value(Context& ctx) {
  double one = 0.0;
  for (int m = 1; m < 60; ++m) one += std::exp(-pi * pi * m * m * 0.1);
  const double want = one * one;
  const auto s = evaluate_trace(ctx.square(), {0.1});
  const double err = std::abs(s.h[0] - want) / want;
  return {err <= 1e-12, "h(0.1) = " + fmt(s.h[0]) + ", product formula " + fmt(want)};
}

inline Outcome fem_square() {
  const auto r = solve_lowest(assemble(mesh_domain(shapes::unit_square(), 0.02)), 10);
  const auto exact = rectangle_spectrum(1, 1, 2000);
  bool upper = true;
  for (std::size_t k = 0; k < r.values.size(); ++k) upper = upper && r.values[k] >= exact[k];
  const double err = (r.values[0] - exact[0]) / exact[0];
  return {upper && err <= 0.003,
          "lambda_1 relative error " + fmt(err) + (upper ? ", 10 upper bounds" : ", upper bound violated")};
}

inline Outcome isospectral_pair() {
  const auto [a, b] = isospectral_drums();
  const auto lowest = [](const DomainSpec& d) {
    Spectrum s;
    s.eigenvalues = solve_lowest(assemble(mesh_domain(d, 0.03)), 20).values;
    s.cutoff = s.eigenvalues.back();
    return s;
  };
  const auto c = isospectral_compare(lowest(a), lowest(b), 20, 1e-2);
  return {c.isospectral && c.max_deviation <= 1e-3,
          "max deviation " + fmt(c.max_deviation) + " at mode " + std::to_string(c.worst_index)};
}

inline Outcome regular_polygon_row() {
  const double a = regular_polygon_a0(4);
  return {std::abs(a - 0.25) <= 1e-14, "n = 4 gives a0 = " + fmt(a)};
}

}  // namespace detail

/// The ten acceptance criteria, in order.
inline std::vector<Check> acceptance_checks() {
  using namespace detail;
  return {
      {"1", "fit", "square a0 recovery",
       [](Context& c) { return a0_recovery(c.blind_fit("square", c.square()), 0.25, 0.01); }},
      {"2", "fit", "disk a0 recovery",
       [](Context& c) { return a0_recovery(c.blind_fit("disk", c.disk()), 1.0 / 6.0, 0.01); }},
      {"3", "fit", "quarter-disk a0 recovery",
       [](Context& c) { return a0_recovery(c.blind_fit("quarter-disk", c.quarter_disk()), 11.0 / 48.0, 0.01); }},
      {"4", "fit", "equilateral-triangle a0 recovery",
       [](Context& c) { return a0_recovery(c.blind_fit("equilateral-triangle", c.triangle()), 1.0 / 3.0, 0.01); }},
      {"5", "fem", "FEM L-shape assisted a0",
       [](Context& c) {
         FitOptions f;
         f.pinned_area = 3.0;
         f.pinned_perimeter = 8.0;
         const auto& run = c.l_shape_run();
         auto out = a0_recovery(fit_spectrum(run.spectrum, {}, f), 5.0 / 18.0, 0.05);
         out.detail += "; " + fmt(static_cast<double>(run.spectrum.size())) + " eigenvalues, " +
                       fmt(static_cast<double>(run.dofs)) + " dofs";
         return out;
       }},
      {"6", "classifier", "classifier corpus",
       [](Context& c) {
         Outcome all{true, ""};
         for (const auto& cc : classifier_cases()) {
           const auto o = classify_case(c, cc);
           all.passed = all.passed && o.passed;
           if (!all.detail.empty()) all.detail += "; ";
           all.detail += std::string(cc.name) + " " + (o.passed ? "ok" : "WRONG: " + o.detail);
         }
         return all;
       }},
      {"7", "geometry", "random polygons satisfy a0 > 1/6 and f(x) > 2n",
       [](Context& c) { return random_polygons(c.options().seed); }},
      {"8", "geometry", "Gauss-Bonnet on exact-segment domains", [](Context&) { return gauss_bonnet_suite(); }},
      {"9", "analytic", "domain monotonicity for nested rectangles",
       [](Context&) { return rectangle_monotonicity(); }},
      {"10", "fit", "area and perimeter from the fitted leading terms",
       [](Context& c) {
         const Outcome parts[] = {
             recovery_case(c, "square", c.square(), 1.0, 4.0),
             recovery_case(c, "disk", c.disk(), pi, two_pi),
             recovery_case(c, "quarter-disk", c.quarter_disk(), pi / 4, 2.0 + pi / 2),
             recovery_case(c, "equilateral-triangle", c.triangle(), std::sqrt(3.0) / 4, 3.0),
         };
         Outcome all{true, ""};
         for (const auto& p : parts) {
           all.passed = all.passed && p.passed;
           all.detail += (all.detail.empty() ? "" : "; ") + p.detail;
         }
         return all;
       }},
  };
}

/// Full verify table: every acceptance criterion except the aggregate
/// classifier row, one row per classifier domain, and extra invariants.
inline std::vector<Check> verify_checks() {
  using namespace detail;
  std::vector<Check> checks = {
      {"geometry-rigid-motion", "geometry", "area, perimeter and a0 invariant under rigid motion",
       [](Context&) { return rigid_motion_invariance(); }},
      {"analytic-square-count", "analytic", "square spectrum count matches lattice enumeration",
       [](Context& c) { return square_lattice_count(c); }},
      {"trace-square", "trace", "square heat trace matches the product formula",
       [](Context& c) { return square_trace_value(c); }},
      {"fem-square", "fem", "FEM unit square lambda_1 within 0.3%, upper bounds", [](Context&) { return fem_square(); }},
      {"isospectral-drums", "isospectral", "seven half-square drum pair agrees on 20 modes",
       [](Context&) { return isospectral_pair(); }},
      {"plotdata-regular-polygon", "plotdata", "regular polygon table", [](Context&) { return regular_polygon_row(); }},
  };
  for (auto& c : acceptance_checks())
    if (c.id != "6") {
      c.id = "criterion-" + c.id;
      checks.push_back(std::move(c));
    }
  for (const auto& cc : classifier_cases()) {
    checks.push_back({std::string("classify-") + cc.name, "classifier",
                      std::string("classify ") + cc.name + (cc.corners ? " -> has_corners" : " -> not has_corners"),
                      [&cc](Context& c) { return classify_case(c, cc); }});
  }
  return checks;
}

/// A check is selected when the filter is empty or equals its id or group.
inline bool selected(const Check& c, const std::string& filter) {
  return filter.empty() || c.id == filter || c.group == filter;
}

inline Row run_check(const Check& check, Context& ctx) {
  Row row{check.id, check.group, check.title, false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Outcome o = check.run(ctx);
    row.passed = o.passed;
    row.detail = o.detail;
  } catch (const std::exception& e) {
    row.detail = std::string("exception: ") + e.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

inline std::string format_row(const Row& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.title << " (" << std::fixed;
  os.precision(2);
  os << r.seconds << " s): " << r.detail;
  return os.str();
}

}  // namespace hearcorners::corpus
