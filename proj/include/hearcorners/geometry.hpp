#pragma once

// Planar domains with piecewise-smooth boundary and the geometric invariants
// that enter the small-time heat-trace expansion: area, perimeter, the
// curvature integral of the smooth boundary part and the opening angles of
// boundary corners.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hearcorners/errors.hpp"

namespace hearcorners {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }
inline Vec2 rotated(Vec2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Signed angle (radians, in (-pi, pi]) that rotates direction `from` onto `to`.
inline double turning_angle(Vec2 from, Vec2 to) {
  return std::atan2(cross(from, to), dot(from, to));
}

/// Relative tolerance of the adaptive Gauss-Kronrod rule used on
/// smooth-parametric segments.
inline constexpr double default_quadrature_tol = 1e-10;

/// Junctions whose one-sided tangents are within this angle of a straight
/// continuation are treated as smooth.
inline constexpr double default_angle_tol = 1e-6;

enum class SegmentKind { line, arc, parametric };

inline const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::line: return "line";
    case SegmentKind::arc: return "arc";
    case SegmentKind::parametric: return "parametric";
  }
  return "?";
}

struct LineData {
  Vec2 from;
  Vec2 to;
};

/// Circular arc from `from` to `to` around `center`. The sign of `radius`
/// gives the direction of travel: positive is counterclockwise.
struct ArcData {
  Vec2 from;
  Vec2 to;
  Vec2 center;
  double radius = 1.0;
  double start_angle = 0.0;
  double sweep = 0.0;  // unsigned, in (0, 2*pi]
};

/// A smooth curve on the parameter interval [0, 1]. `family` and `params`
/// describe the curve for serialization ("bezier": flattened control points;
/// "ellipse-arc": cx, cy, a, b, rotation, t0, t1; "custom": not serializable).
struct ParametricData {
  std::string family = "custom";
  std::vector<double> params;
  std::function<Vec2(double)> position;
  std::function<Vec2(double)> velocity;
  std::function<Vec2(double)> acceleration;
};

class Segment {
 public:
  static Segment line(Vec2 from, Vec2 to) {
    Segment s;
    s.kind_ = SegmentKind::line;
    s.data_ = LineData{from, to};
    s.length_ = distance(from, to);
    s.area_moment_ = 0.5 * cross(from, to);
    s.turning_ = 0.0;
    return s;
  }

  static Segment arc(Vec2 from, Vec2 to, Vec2 center, double signed_radius) {
    if (!(std::abs(signed_radius) > 0.0) || !std::isfinite(signed_radius))
      throw InvalidDomain("arc segment with zero or non-finite radius");
    const double r = std::abs(signed_radius);
    const double tol = 1e-9 * std::max(1.0, r);
    if (std::abs(distance(from, center) - r) > tol ||
        std::abs(distance(to, center) - r) > tol)
      throw InvalidDomain("arc endpoints do not lie on the circle of the given center and radius");
    ArcData a{from, to, center, signed_radius, 0.0, 0.0};
    a.start_angle = std::atan2(from.y - center.y, from.x - center.x);
    const double end_angle = std::atan2(to.y - center.y, to.x - center.x);
    double sweep = signed_radius > 0 ? end_angle - a.start_angle : a.start_angle - end_angle;
    sweep = std::fmod(sweep, two_pi);
    if (sweep <= 0.0) sweep += two_pi;
    if (distance(from, to) <= tol) sweep = two_pi;
    a.sweep = sweep;

    Segment s;
    s.kind_ = SegmentKind::arc;
    s.data_ = a;
    s.length_ = r * sweep;
    const double signed_sweep = signed_radius > 0 ? sweep : -sweep;
    const double a0 = a.start_angle, a1 = a.start_angle + signed_sweep;
    s.area_moment_ = 0.5 * (r * center.x * (std::sin(a1) - std::sin(a0)) -
                            r * center.y * (std::cos(a1) - std::cos(a0)) + r * r * signed_sweep);
    s.turning_ = signed_sweep;
    return s;
  }

  static Segment parametric(ParametricData p, double quad_tol = default_quadrature_tol) {
    if (!p.position || !p.velocity || !p.acceleration)
      throw InvalidDomain("parametric segment requires position, velocity and acceleration");
    Segment s;
    s.kind_ = SegmentKind::parametric;
    // Nonvanishing speed on a dense sample.
    for (int i = 0; i <= 256; ++i) {
      if (!(norm(p.velocity(i / 256.0)) > 0.0))
        throw InvalidDomain("parametric segment has vanishing speed");
    }
    using boost::math::quadrature::gauss_kronrod;
    const auto& pos = p.position;
    const auto& vel = p.velocity;
    const auto& acc = p.acceleration;
    s.length_ = gauss_kronrod<double, 15>::integrate(
        [&](double u) { return norm(vel(u)); }, 0.0, 1.0, 20, quad_tol);
    s.area_moment_ = 0.5 * gauss_kronrod<double, 15>::integrate(
        [&](double u) { return cross(pos(u), vel(u)); }, 0.0, 1.0, 20, quad_tol);
    s.turning_ = gauss_kronrod<double, 15>::integrate(
        [&](double u) {
          const Vec2 v = vel(u);
          return cross(v, acc(u)) / dot(v, v);
        },
        0.0, 1.0, 20, quad_tol);
    s.data_ = std::move(p);
    return s;
  }

  SegmentKind kind() const { return kind_; }
  const LineData& as_line() const { return std::get<LineData>(data_); }
  const ArcData& as_arc() const { return std::get<ArcData>(data_); }
  const ParametricData& as_parametric() const { return std::get<ParametricData>(data_); }

  Vec2 start() const { return point(0.0); }
  Vec2 end() const { return point(1.0); }

  /// Point at curve parameter u in [0, 1]. Endpoints are returned exactly.
  Vec2 point(double u) const {
    switch (kind_) {
      case SegmentKind::line: {
        const auto& l = as_line();
        if (u == 0.0) return l.from;
        if (u == 1.0) return l.to;
        return l.from + u * (l.to - l.from);
      }
      case SegmentKind::arc: {
        const auto& a = as_arc();
        if (u == 0.0) return a.from;
        if (u == 1.0) return a.to;
        const double phi = arc_angle(a, u);
        const double r = std::abs(a.radius);
        return a.center + Vec2{r * std::cos(phi), r * std::sin(phi)};
      }
      case SegmentKind::parametric:
        return as_parametric().position(u);
    }
    return {};
  }

  /// Derivative of point(u) with respect to u.
  Vec2 velocity(double u) const {
    switch (kind_) {
      case SegmentKind::line: return as_line().to - as_line().from;
      case SegmentKind::arc: {
        const auto& a = as_arc();
        const double phi = arc_angle(a, u);
        const double w = (a.radius > 0 ? 1.0 : -1.0) * a.sweep * std::abs(a.radius);
        return {-w * std::sin(phi), w * std::cos(phi)};
      }
      case SegmentKind::parametric: return as_parametric().velocity(u);
    }
    return {};
  }

  Vec2 start_tangent() const { return normalized(velocity(0.0)); }
  Vec2 end_tangent() const { return normalized(velocity(1.0)); }

  double length() const { return length_; }
  /// Contribution (1/2) * integral of (x dy - y dx) along the segment.
  double area_moment() const { return area_moment_; }
  /// Integral of signed curvature along the segment (total tangent turning).
  double turning() const { return turning_; }

  /// Samples the segment into `pieces` chords; returns pieces + 1 points.
  std::vector<Vec2> polyline(std::size_t pieces) const {
    std::vector<Vec2> pts;
    pts.reserve(pieces + 1);
    for (std::size_t i = 0; i <= pieces; ++i) pts.push_back(point(static_cast<double>(i) / pieces));
    pts.back() = end();
    return pts;
  }

  /// Default chord count for validation and plotting.
  std::size_t default_pieces() const {
    switch (kind_) {
      case SegmentKind::line: return 1;
      case SegmentKind::arc:
        return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(as_arc().sweep / (pi / 64))));
      case SegmentKind::parametric: return 128;
    }
    return 1;
  }

 private:
  static double arc_angle(const ArcData& a, double u) {
    return a.start_angle + (a.radius > 0 ? 1.0 : -1.0) * a.sweep * u;
  }

  SegmentKind kind_ = SegmentKind::line;
  std::variant<LineData, ArcData, ParametricData> data_;
  double length_ = 0.0;
  double area_moment_ = 0.0;
  double turning_ = 0.0;
};

// ---------------------------------------------------------------------------
// Parametric curve families

/// Bezier curve of arbitrary degree (>= 1) through the given control points.
inline Segment bezier(std::vector<Vec2> control, double quad_tol = default_quadrature_tol) {
  if (control.size() < 2) throw InvalidDomain("bezier segment needs at least two control points");
  auto eval = [](const std::vector<Vec2>& c, double u) {
    std::vector<Vec2> w = c;
    for (std::size_t k = w.size(); k-- > 1;)
      for (std::size_t i = 0; i < k; ++i) w[i] = (1.0 - u) * w[i] + u * w[i + 1];
    return w.front();
  };
  auto derived = [](const std::vector<Vec2>& c) {
    std::vector<Vec2> d;
    const double n = static_cast<double>(c.size() - 1);
    for (std::size_t i = 0; i + 1 < c.size(); ++i) d.push_back(n * (c[i + 1] - c[i]));
    if (d.empty()) d.push_back({});
    return d;
  };
  const auto d1 = derived(control);
  const auto d2 = control.size() > 2 ? derived(d1) : std::vector<Vec2>{Vec2{}};
  ParametricData p;
  p.family = "bezier";
  for (const auto& c : control) {
    p.params.push_back(c.x);
    p.params.push_back(c.y);
  }
  p.position = [control, eval](double u) {
    if (u == 0.0) return control.front();
    if (u == 1.0) return control.back();
    return eval(control, u);
  };
  p.velocity = [d1, eval](double u) { return eval(d1, u); };
  p.acceleration = [d2, eval](double u) { return eval(d2, u); };
  return Segment::parametric(std::move(p), quad_tol);
}

/// Arc of the ellipse center + R(rotation) * (a cos t, b sin t) for t from t0 to t1.
inline Segment ellipse_arc(Vec2 center, double a, double b, double rotation, double t0, double t1,
                           double quad_tol = default_quadrature_tol) {
  if (!(a > 0.0) || !(b > 0.0) || t0 == t1) throw InvalidDomain("degenerate ellipse arc");
  ParametricData p;
  p.family = "ellipse-arc";
  p.params = {center.x, center.y, a, b, rotation, t0, t1};
  const double dt = t1 - t0;
  p.position = [=](double u) {
    const double t = t0 + dt * u;
    return center + rotated({a * std::cos(t), b * std::sin(t)}, rotation);
  };
  p.velocity = [=](double u) {
    const double t = t0 + dt * u;
    return rotated({-a * dt * std::sin(t), b * dt * std::cos(t)}, rotation);
  };
  p.acceleration = [=](double u) {
    const double t = t0 + dt * u;
    return rotated({-a * dt * dt * std::cos(t), -b * dt * dt * std::sin(t)}, rotation);
  };
  return Segment::parametric(std::move(p), quad_tol);
}

// ---------------------------------------------------------------------------
// Loops and domains

namespace detail {

inline double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

inline bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

/// Closed-segment intersection test (touching and collinear overlap count).
inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

/// Winding number of a closed polyline (last point not repeated) around p.
inline int winding_number(const std::vector<Vec2>& poly, Vec2 p) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && orient(a, b, p) > 0) ++wn;
    } else {
      if (b.y <= p.y && orient(a, b, p) < 0) --wn;
    }
  }
  return wn;
}

}  // namespace detail

class BoundaryLoop {
 public:
  BoundaryLoop() = default;
  explicit BoundaryLoop(std::vector<Segment> segments) : segments_(std::move(segments)) {}

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  const Segment& operator[](std::size_t i) const { return segments_[i]; }

  /// Signed enclosed area; positive for counterclockwise traversal.
  double signed_area() const {
    double a = 0.0;
    for (const auto& s : segments_) a += s.area_moment();
    return a;
  }

  double length() const {
    double l = 0.0;
    for (const auto& s : segments_) l += s.length();
    return l;
  }

  /// Closed polyline approximation (first point not repeated at the end).
  std::vector<Vec2> polyline() const {
    std::vector<Vec2> pts;
    for (const auto& s : segments_) {
      auto p = s.polyline(s.default_pieces());
      pts.insert(pts.end(), p.begin(), p.end() - 1);
    }
    return pts;
  }

 private:
  std::vector<Segment> segments_;
};

/// A bounded planar domain: first loop is the outer boundary (counterclockwise),
/// any further loops are holes (clockwise), so the interior is always on the
/// left of the direction of travel. Validated on construction and immutable.
class DomainSpec {
 public:
  explicit DomainSpec(std::vector<BoundaryLoop> loops, std::string label = {})
      : loops_(std::move(loops)), label_(std::move(label)) {
    validate();
  }

  const std::vector<BoundaryLoop>& loops() const { return loops_; }
  const BoundaryLoop& outer() const { return loops_.front(); }
  const std::string& label() const { return label_; }
  std::size_t hole_count() const { return loops_.size() - 1; }
  /// Euler characteristic: 1 - (number of holes).
  int euler_characteristic() const { return 1 - static_cast<int>(hole_count()); }

  /// Characteristic length scale (max extent of the bounding box).
  double scale() const { return scale_; }

 private:
  void validate();

  std::vector<BoundaryLoop> loops_;
  std::string label_;
  double scale_ = 1.0;
};

inline void DomainSpec::validate() {
  if (loops_.empty()) throw InvalidDomain("domain has no boundary loops");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& loop : loops_)
    for (const auto& p : loop.polyline()) {
      xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
  scale_ = std::max(xmax - xmin, ymax - ymin);
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw InvalidDomain("domain has zero extent");
  const double close_tol = 1e-9 * scale_;

  for (std::size_t li = 0; li < loops_.size(); ++li) {
    const auto& loop = loops_[li];
    const std::string where = "loop " + std::to_string(li);
    if (loop.size() == 0) throw InvalidDomain(where + " has no segments");
    for (std::size_t si = 0; si < loop.size(); ++si) {
      const auto& s = loop[si];
      if (!(s.length() > close_tol))
        throw InvalidDomain(where + " segment " + std::to_string(si) + " has zero length");
      const auto& next = loop[(si + 1) % loop.size()];
      if (distance(s.end(), next.start()) > close_tol)
        throw InvalidDomain(where + " is not closed: segment " + std::to_string(si) +
                            " does not end where segment " +
                            std::to_string((si + 1) % loop.size()) + " starts");
      const double phi = turning_angle(s.end_tangent(), next.start_tangent());
      if (std::abs(std::abs(phi) - pi) < default_angle_tol)
        throw InvalidDomain(where + " has a cusp or slit at the end of segment " +
                            std::to_string(si) + " (opening angle 0 or 2*pi)");
    }
    const double a = loop.signed_area();
    if (li == 0 && !(a > 0.0))
      throw InvalidDomain(where + " (outer boundary) must be counterclockwise");
    if (li > 0 && !(a < 0.0)) throw InvalidDomain(where + " (hole) must be clockwise");
  }

  // Simplicity and disjointness: pairwise chord intersection at sampling resolution.
  struct Piece {
    Vec2 a, b;
    std::size_t loop, index, count;
  };
  std::vector<Piece> pieces;
  for (std::size_t li = 0; li < loops_.size(); ++li) {
    const auto pts = loops_[li].polyline();
    for (std::size_t i = 0; i < pts.size(); ++i)
      pieces.push_back({pts[i], pts[(i + 1) % pts.size()], li, i, pts.size()});
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    const double pxmin = std::min(p.a.x, p.b.x), pxmax = std::max(p.a.x, p.b.x);
    const double pymin = std::min(p.a.y, p.b.y), pymax = std::max(p.a.y, p.b.y);
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      const auto& q = pieces[j];
      if (std::max(q.a.x, q.b.x) < pxmin || std::min(q.a.x, q.b.x) > pxmax ||
          std::max(q.a.y, q.b.y) < pymin || std::min(q.a.y, q.b.y) > pymax)
        continue;
      if (p.loop == q.loop) {
        const std::size_t d = q.index - p.index;
        if (d == 1 || d == p.count - 1) continue;  // neighbours share a vertex
      }
      if (detail::segments_intersect(p.a, p.b, q.a, q.b)) {
        if (p.loop == q.loop)
          throw InvalidDomain("loop " + std::to_string(p.loop) + " intersects itself");
        throw InvalidDomain("loops " + std::to_string(p.loop) + " and " + std::to_string(q.loop) +
                            " intersect");
      }
    }
  }

  if (loops_.size() > 1) {
    const auto outer_poly = loops_[0].polyline();
    for (std::size_t li = 1; li < loops_.size(); ++li) {
      if (detail::winding_number(outer_poly, loops_[li][0].start()) == 0)
        throw InvalidDomain("loop " + std::to_string(li) + " (hole) lies outside the outer boundary");
      for (std::size_t lj = 1; lj < loops_.size(); ++lj) {
        if (lj == li) continue;
        if (detail::winding_number(loops_[lj].polyline(), loops_[li][0].start()) != 0)
          throw InvalidDomain("loop " + std::to_string(li) + " (hole) lies inside hole " +
                              std::to_string(lj));
      }
    }
  }
}

/// A boundary vertex where the one-sided tangents are not collinear.
struct Corner {
  Vec2 vertex;
  double theta = 0.0;  ///< interior opening angle in (0, 2*pi), != pi
  std::size_t loop = 0;
  std::size_t segment_in = 0;   ///< segment ending at the vertex
  std::size_t segment_out = 0;  ///< segment starting at the vertex
};

namespace detail {

struct Junction {
  std::size_t loop, segment_in, segment_out;
  Vec2 vertex;
  double turn;  ///< signed tangent turning angle at the junction
};

inline std::vector<Junction> junctions(const DomainSpec& d) {
  std::vector<Junction> out;
  for (std::size_t li = 0; li < d.loops().size(); ++li) {
    const auto& loop = d.loops()[li];
    for (std::size_t si = 0; si < loop.size(); ++si) {
      const std::size_t next = (si + 1) % loop.size();
      out.push_back({li, si, next, loop[next].start(),
                     turning_angle(loop[si].end_tangent(), loop[next].start_tangent())});
    }
  }
  return out;
}

}  // namespace detail

/// Every segment junction whose tangent turning exceeds angle_tol is a
/// corner with interior angle pi - turn (interior on the left).
inline std::vector<Corner> detect_corners(const DomainSpec& domain,
                                          double angle_tol = default_angle_tol) {
  if (!(angle_tol > 0.0)) throw DomainError("angle_tol must be positive");
  std::vector<Corner> corners;
  for (const auto& j : detail::junctions(domain)) {
    if (std::abs(j.turn) <= angle_tol) continue;
    corners.push_back({j.vertex, pi - j.turn, j.loop, j.segment_in, j.segment_out});
  }
  return corners;
}

inline double area(const DomainSpec& domain) {
  double a = 0.0;
  for (const auto& loop : domain.loops()) a += loop.signed_area();
  return a;
}

inline double perimeter(const DomainSpec& domain) {
  double l = 0.0;
  for (const auto& loop : domain.loops()) l += loop.length();
  return l;
}

/// Integral of the signed boundary curvature over the boundary minus its
/// corners. Junction kinks below angle_tol belong to the smooth part.
inline double curvature_integral(const DomainSpec& domain, double angle_tol = default_angle_tol) {
  double k = 0.0;
  for (const auto& loop : domain.loops())
    for (const auto& s : loop.segments()) k += s.turning();
  for (const auto& j : detail::junctions(domain))
    if (std::abs(j.turn) <= angle_tol) k += j.turn;
  return k;
}

/// |curvature integral - (sum theta_j + pi (2 chi - n))|; zero up to rounding
/// for any consistently oriented domain.
inline double gauss_bonnet_check(const DomainSpec& domain, double angle_tol = default_angle_tol) {
  const auto corners = detect_corners(domain, angle_tol);
  double sum_theta = 0.0;
  for (const auto& c : corners) sum_theta += c.theta;
  const double n = static_cast<double>(corners.size());
  const double rhs = sum_theta + pi * (2.0 * domain.euler_characteristic() - n);
  return std::abs(curvature_integral(domain, angle_tol) - rhs);
}

/// Diameter of the sampled boundary.
inline double diameter(const DomainSpec& domain) {
  std::vector<Vec2> pts;
  for (const auto& loop : domain.loops()) {
    auto p = loop.polyline();
    pts.insert(pts.end(), p.begin(), p.end());
  }
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, distance(pts[i], pts[j]));
  return d;
}

/// Whether p lies inside the domain (sampled boundary; points on the
/// boundary may go either way).
inline bool contains(const DomainSpec& domain, Vec2 p) {
  if (detail::winding_number(domain.outer().polyline(), p) == 0) return false;
  for (std::size_t li = 1; li < domain.loops().size(); ++li)
    if (detail::winding_number(domain.loops()[li].polyline(), p) != 0) return false;
  return true;
}

/// Similarity transform x -> scale * R(rotation) x + shift.
struct Similarity {
  double scale = 1.0;
  double rotation = 0.0;
  Vec2 shift{};

  Vec2 operator()(Vec2 p) const { return scale * rotated(p, rotation) + shift; }
  Vec2 linear(Vec2 v) const { return scale * rotated(v, rotation); }
};

inline Segment transformed(const Segment& s, const Similarity& m) {
  switch (s.kind()) {
    case SegmentKind::line: return Segment::line(m(s.as_line().from), m(s.as_line().to));
    case SegmentKind::arc: {
      const auto& a = s.as_arc();
      return Segment::arc(m(a.from), m(a.to), m(a.center), a.radius * m.scale);
    }
    case SegmentKind::parametric: {
      const auto& p = s.as_parametric();
      if (p.family == "bezier") {
        std::vector<Vec2> c;
        for (std::size_t i = 0; i + 1 < p.params.size(); i += 2) c.push_back(m({p.params[i], p.params[i + 1]}));
        return bezier(std::move(c));
      }
      if (p.family == "ellipse-arc") {
        const auto& q = p.params;
        return ellipse_arc(m({q[0], q[1]}), q[2] * m.scale, q[3] * m.scale, q[4] + m.rotation, q[5], q[6]);
      }
      ParametricData t;
      t.family = "custom";
      t.position = [pos = p.position, m](double u) { return m(pos(u)); };
      t.velocity = [vel = p.velocity, m](double u) { return m.linear(vel(u)); };
      t.acceleration = [acc = p.acceleration, m](double u) { return m.linear(acc(u)); };
      return Segment::parametric(std::move(t));
    }
  }
  return s;
}

inline DomainSpec transformed(const DomainSpec& d, const Similarity& m) {
  if (!(m.scale > 0.0)) throw DomainError("similarity scale must be positive");
  std::vector<BoundaryLoop> loops;
  for (const auto& loop : d.loops()) {
    std::vector<Segment> segs;
    for (const auto& s : loop.segments()) segs.push_back(transformed(s, m));
    loops.emplace_back(std::move(segs));
  }
  return DomainSpec(std::move(loops), d.label());
}

// ---------------------------------------------------------------------------
// Reference shapes

namespace shapes {

/// Closed polygon loop through the vertices in the given order.
inline BoundaryLoop polygon_loop(const std::vector<Vec2>& v) {
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < v.size(); ++i) segs.push_back(Segment::line(v[i], v[(i + 1) % v.size()]));
  return BoundaryLoop(std::move(segs));
}

/// Simple polygon; vertex order is normalized to counterclockwise.
inline DomainSpec polygon(std::vector<Vec2> v, std::string label = "polygon") {
  if (v.size() < 3) throw InvalidDomain("polygon needs at least three vertices");
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  if (a < 0) std::reverse(v.begin(), v.end());
  return DomainSpec({polygon_loop(v)}, std::move(label));
}

inline DomainSpec rectangle(double a, double b) {
  return polygon({{0, 0}, {a, 0}, {a, b}, {0, b}}, "rectangle");
}

inline DomainSpec unit_square() { return polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, "unit-square"); }

/// L-shaped hexagon made of three unit squares: five right angles and one
/// reflex corner of 3*pi/2 at (1, 1).
inline DomainSpec l_shape() {
  return polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, "l-shape");
}

inline DomainSpec equilateral_triangle(double side = 1.0) {
  return polygon({{0, 0}, {side, 0}, {0.5 * side, 0.5 * std::sqrt(3.0) * side}}, "equilateral-triangle");
}

inline DomainSpec regular_polygon(int n, double circumradius = 1.0) {
  if (n < 3) throw InvalidDomain("regular polygon needs n >= 3");
  std::vector<Vec2> v;
  for (int k = 0; k < n; ++k) {
    const double phi = two_pi * k / n;
    v.push_back({circumradius * std::cos(phi), circumradius * std::sin(phi)});
  }
  return polygon(std::move(v), "regular-" + std::to_string(n) + "-gon");
}

/// Circle as `pieces` counterclockwise arcs with matching tangents.
inline BoundaryLoop circle_loop(Vec2 center, double radius, int pieces = 4, bool clockwise = false) {
  std::vector<Segment> segs;
  for (int k = 0; k < pieces; ++k) {
    const double a0 = two_pi * k / pieces, a1 = two_pi * (k + 1) / pieces;
    Vec2 p0 = center + radius * Vec2{std::cos(a0), std::sin(a0)};
    Vec2 p1 = center + radius * Vec2{std::cos(a1), std::sin(a1)};
    if (k == 0) p0 = center + Vec2{radius, 0.0};
    if (k + 1 == pieces) p1 = center + Vec2{radius, 0.0};
    segs.push_back(Segment::arc(p0, p1, center, radius));
  }
  if (clockwise) {
    std::vector<Segment> rev;
    for (auto it = segs.rbegin(); it != segs.rend(); ++it)
      rev.push_back(Segment::arc(it->as_arc().to, it->as_arc().from, center, -radius));
    segs = std::move(rev);
  }
  return BoundaryLoop(std::move(segs));
}

inline DomainSpec disk(double radius = 1.0, int pieces = 4) {
  return DomainSpec({circle_loop({0, 0}, radius, pieces)}, "disk");
}

/// Circular sector of opening angle theta in (0, 2*pi) with apex at the origin.
inline DomainSpec sector(double theta, double radius = 1.0) {
  if (!(theta > 0.0 && theta < two_pi)) throw DomainError("sector angle must lie in (0, 2*pi)");
  const Vec2 o{0, 0};
  const Vec2 a{radius, 0};
  const Vec2 b{radius * std::cos(theta), radius * std::sin(theta)};
  std::vector<Segment> segs{Segment::line(o, a), Segment::arc(a, b, o, radius), Segment::line(b, o)};
  return DomainSpec({BoundaryLoop(std::move(segs))}, "sector");
}

inline DomainSpec quarter_disk(double radius = 1.0) { return sector(pi / 2, radius); }
inline DomainSpec half_disk(double radius = 1.0) { return sector(pi, radius); }

/// Square [0,outer]^2 with a centered square hole of side `hole`.
inline DomainSpec square_with_hole(double outer = 1.0, double hole = 0.5) {
  const double lo = 0.5 * (outer - hole), hi = 0.5 * (outer + hole);
  auto outer_loop = polygon_loop({{0, 0}, {outer, 0}, {outer, outer}, {0, outer}});
  auto hole_loop = polygon_loop({{lo, lo}, {lo, hi}, {hi, hi}, {hi, lo}});
  return DomainSpec({outer_loop, hole_loop}, "square-with-hole");
}

inline DomainSpec annulus(double outer_radius = 1.0, double inner_radius = 0.5) {
  return DomainSpec({circle_loop({0, 0}, outer_radius), circle_loop({0, 0}, inner_radius, 4, true)},
                    "annulus");
}

/// Ellipse with semi-axes a, b built from four parametric quarter arcs.
inline DomainSpec ellipse(double a, double b) {
  std::vector<Segment> segs;
  for (int k = 0; k < 4; ++k) segs.push_back(ellipse_arc({0, 0}, a, b, 0.0, k * pi / 2, (k + 1) * pi / 2));
  return DomainSpec({BoundaryLoop(std::move(segs))}, "ellipse");
}

}  // namespace shapes

}  // namespace hearcorners
