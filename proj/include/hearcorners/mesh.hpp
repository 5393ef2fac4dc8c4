#pragma once

// Graded triangular meshes of a DomainSpec by constrained Delaunay
// refinement.
//
// The boundary is first cut into chords (curved segments with sagitta at
// most h^2/diam), the chord endpoints are triangulated inside a super
// triangle, and missing chords are recovered by midpoint splitting. The
// chords then become constrained edges and the triangulation is refined:
// encroached subsegments are split first, then triangles that are too large
// for the local size field or whose circumradius to shortest edge ratio
// exceeds sqrt(2) (minimum angle about 20.7 degrees) get their circumcenter
// inserted. Chords are only ever split at points on the chord, so the meshed
// region is the same polygon throughout.
//
// Local target size near reentrant corners c_j:
//
//   size(p) = h * min(1, min_j (|p - c_j| / diam)^(1 - grading))
//
// so grading = 1 is a uniform mesh and grading = 0.5 gives the usual
// square-root grading.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hearcorners/errors.hpp"
#include "hearcorners/geometry.hpp"
#include "hearcorners/text_io.hpp"

namespace hearcorners {

struct MeshOptions {
  double h = 0.05;
  double grading = 0.5;  ///< applied at reentrant corners; 1 = no grading
  double quality_ratio = std::sqrt(2.0);  ///< max circumradius / shortest edge
  std::size_t max_vertices = 4'000'000;
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  ///< counterclockwise
  std::vector<bool> boundary;                 ///< vertex lies on a boundary chord
  std::vector<std::array<int, 2>> boundary_edges;
  double h = 0.0;
  double grading = 1.0;
  double diameter = 0.0;
  double area = 0.0;             ///< area of the meshed polygon
  double boundary_length = 0.0;  ///< total chord length
  double domain_area = 0.0;
  double domain_perimeter = 0.0;
  std::vector<Vec2> graded_corners;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  std::size_t interior_vertex_count() const {
    return static_cast<std::size_t>(std::count(boundary.begin(), boundary.end(), false));
  }
};

inline double triangle_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

/// Interior angles of a triangle in radians.
inline std::array<double, 3> triangle_angles(Vec2 a, Vec2 b, Vec2 c) {
  const auto ang = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::atan2(std::abs(cross(q - p, r - p)), dot(q - p, r - p));
  };
  return {ang(a, b, c), ang(b, c, a), ang(c, a, b)};
}

/// Local target element size.
inline double graded_size(Vec2 p, double h, double grading, double diam, const std::vector<Vec2>& corners) {
  const double e = 1.0 - grading;
  if (corners.empty() || e <= 0.0) return h;
  double s = h;
  for (Vec2 c : corners) s = std::min(s, h * std::pow(distance(p, c) / diam, e));
  // Below this size the graded target is smaller than the distance to the
  // corner it is measured from; floor it so refinement terminates.
  const double floor_size = 0.5 * std::pow(h * std::pow(diam, -e), 1.0 / (1.0 - e));
  return std::max(s, floor_size);
}

namespace detail {

inline double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

inline Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab), ac2 = dot(ac, ac);
  return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

class Refiner {
 public:
  struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};  ///< neighbor across the edge opposite v[i]
    std::array<bool, 3> con{false, false, false};
    bool inside = false;
    bool alive = true;
  };
  struct SubsegInfo {
    std::size_t loop = 0, segment = 0;
  };

  Refiner(const DomainSpec& domain, const MeshOptions& opt) : domain_(domain), opt_(opt) {
    if (!(opt.h > 0.0) || !std::isfinite(opt.h)) throw MeshError("mesh size h must be positive");
    if (!(opt.grading > 0.0 && opt.grading <= 1.0)) throw MeshError("grading exponent must lie in (0, 1]");
    if (!(opt.quality_ratio >= std::sqrt(2.0) - 1e-12)) throw MeshError("quality ratio below sqrt(2) may not terminate");
    diam_ = diameter(domain);
    for (const auto& c : detect_corners(domain)) {
      if (c.theta > pi) reentrant_.push_back(c.vertex);
    }
  }

  Mesh run() {
    build_boundary();
    triangulate_points();
    recover_subsegments();
    classify_regions();
    refine();
    return finish();
  }

 private:
  const DomainSpec& domain_;
  MeshOptions opt_;
  double diam_ = 0.0;
  std::vector<Vec2> reentrant_;

  std::vector<Vec2> pts_;
  std::vector<int> vtri_;
  std::vector<char> small_corner_;  ///< input vertex with interior angle below 60 degrees
  std::vector<Tri> tris_;
  std::vector<unsigned> visit_;
  unsigned stamp_ = 0;
  int super_[3] = {-1, -1, -1};

  std::unordered_map<std::uint64_t, SubsegInfo> subsegs_;
  std::vector<std::array<int, 2>> initial_chords_;
  std::vector<SubsegInfo> initial_info_;

  std::deque<std::array<int, 2>> encroached_;
  std::deque<int> bad_;
  std::vector<int> created_;

  // --- basic helpers -------------------------------------------------------

  double size_at(Vec2 p) const { return graded_size(p, opt_.h, opt_.grading, diam_, reentrant_); }

  bool is_super(int v) const { return v == super_[0] || v == super_[1] || v == super_[2]; }

  int add_point(Vec2 p, bool small_corner = false) {
    if (pts_.size() >= opt_.max_vertices)
      throw MeshError("refinement exceeded " + std::to_string(opt_.max_vertices) + " vertices; h too small");
    pts_.push_back(p);
    vtri_.push_back(-1);
    small_corner_.push_back(small_corner ? 1 : 0);
    return static_cast<int>(pts_.size()) - 1;
  }

  std::string describe(const SubsegInfo& s) const {
    return "loop " + std::to_string(s.loop) + " segment " + std::to_string(s.segment);
  }

  bool constrained(int a, int b) const { return subsegs_.count(edge_key(a, b)) != 0; }

  /// Triangle and local edge index of the edge (a, b) in either direction.
  std::optional<std::pair<int, int>> find_edge(int a, int b) const {
    const int t0 = vtri_[a];
    if (t0 < 0) return std::nullopt;
    // Walk the star of a in both directions.
    std::vector<int> seen;
    std::vector<int> stack{t0};
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      if (std::find(seen.begin(), seen.end(), t) != seen.end()) continue;
      seen.push_back(t);
      const Tri& tr = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int p = tr.v[(i + 1) % 3], q = tr.v[(i + 2) % 3];
        if ((p == a && q == b) || (p == b && q == a)) return std::make_pair(t, i);
      }
      for (int i = 0; i < 3; ++i) {
        if (tr.v[i] == a) continue;
        const int n = tr.nb[i];
        if (n >= 0) {
          const auto& nv = tris_[n].v;
          if (nv[0] == a || nv[1] == a || nv[2] == a) stack.push_back(n);
        }
      }
      if (seen.size() > 4096) break;
    }
    return std::nullopt;
  }

  int neighbor_index(int t, int n) const {
    for (int i = 0; i < 3; ++i)
      if (tris_[t].nb[i] == n) return i;
    return -1;
  }

  bool contains_circ(const Tri& t, Vec2 p) const {
    return incircle(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], p) > 0.0;
  }

  // --- point location ------------------------------------------------------

  struct Location {
    int tri = -1;
    std::array<int, 2> blocked{-1, -1};  ///< constrained edge crossed on the way
  };

  Location locate(Vec2 p, int start, std::uint64_t pass_key) const {
    Location loc;
    int t = start;
    unsigned rot = 0;
    for (std::size_t step = 0; step < 4 * tris_.size() + 16; ++step) {
      const Tri& tr = tris_[t];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int i = static_cast<int>((k + rot) % 3);
        const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
        if (orient(pts_[a], pts_[b], p) < 0.0) {
          if (tr.con[i] && edge_key(a, b) != pass_key) {
            loc.blocked = {a, b};
            return loc;
          }
          if (tr.nb[i] < 0) return loc;
          t = tr.nb[i];
          moved = true;
          break;
        }
      }
      ++rot;
      if (!moved) {
        loc.tri = t;
        return loc;
      }
    }
    return loc;
  }

  // --- insertion -----------------------------------------------------------

  enum class Status { inserted, blocked, encroaches, degenerate };

  struct BoundaryEdge {
    int a, b, outer, outer_edge, owner;
    bool con;
  };

  /// Bowyer-Watson insertion of p. When split is given, p lies on that
  /// constrained edge, which is replaced by two halves. With check_encroach,
  /// insertion is abandoned if p would encroach a constrained edge of its
  /// cavity; those edges are reported in encroached.
  Status insert(Vec2 p, int start, std::optional<std::array<int, 2>> split, bool check_encroach,
                std::vector<std::array<int, 2>>& encroached, std::array<int, 2>& blocked, int& vertex) {
    const std::uint64_t pass_key = split ? edge_key((*split)[0], (*split)[1]) : ~std::uint64_t{0};
    int t0 = start;
    int forced_other = -1;
    if (split) {
      const auto e = find_edge((*split)[0], (*split)[1]);
      if (!e) throw MeshError("internal error: subsegment missing from triangulation");
      t0 = e->first;
      forced_other = tris_[t0].nb[e->second];
    } else {
      const Location loc = locate(p, start, pass_key);
      if (loc.blocked[0] >= 0) {
        blocked = loc.blocked;
        return Status::blocked;
      }
      if (loc.tri < 0) return Status::degenerate;
      t0 = loc.tri;
      for (int v : tris_[t0].v)
        if (distance(pts_[v], p) <= 1e-12 * diam_) return Status::degenerate;
      // A point on an unconstrained edge takes the triangle across it too.
      const Tri& tr = tris_[t0];
      for (int i = 0; i < 3; ++i) {
        const Vec2 a = pts_[tr.v[(i + 1) % 3]], b = pts_[tr.v[(i + 2) % 3]];
        if (tr.nb[i] >= 0 && !tr.con[i] && orient(a, b, p) <= 1e-13 * dot(b - a, b - a)) forced_other = tr.nb[i];
      }
    }

    // Cavity.
    ++stamp_;
    if (visit_.size() < tris_.size()) visit_.resize(tris_.size(), 0);
    std::vector<int> cavity{t0};
    visit_[t0] = stamp_;
    if (forced_other >= 0) {
      cavity.push_back(forced_other);
      visit_[forced_other] = stamp_;
    }
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const Tri& tr = tris_[cavity[k]];
      for (int i = 0; i < 3; ++i) {
        const int n = tr.nb[i];
        if (n < 0 || visit_[n] == stamp_) continue;
        if (tr.con[i] && edge_key(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3]) != pass_key) continue;
        if (contains_circ(tris_[n], p)) {
          visit_[n] = stamp_;
          cavity.push_back(n);
        }
      }
    }

    // Boundary edges, shrinking the cavity until p sees every one of them.
    std::vector<BoundaryEdge> edges;
    for (;;) {
      edges.clear();
      int bad_owner = -1;
      for (int c : cavity) {
        if (visit_[c] != stamp_) continue;
        const Tri& tr = tris_[c];
        for (int i = 0; i < 3; ++i) {
          const int n = tr.nb[i];
          const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
          const bool is_split = tr.con[i] && edge_key(a, b) == pass_key;
          if (n >= 0 && visit_[n] == stamp_ && (!tr.con[i] || is_split)) continue;
          const Vec2 ab = pts_[b] - pts_[a];
          if (orient(pts_[a], pts_[b], p) <= 1e-13 * dot(ab, ab)) {
            if (c == t0 || c == forced_other) return Status::degenerate;
            bad_owner = c;
          }
          edges.push_back({a, b, n, n >= 0 ? neighbor_index(n, c) : -1, c, tr.con[i]});
        }
      }
      if (bad_owner < 0) break;
      visit_[bad_owner] = 0;
    }

    if (check_encroach) {
      for (const auto& e : edges) {
        if (!e.con) continue;
        if (dot(pts_[e.a] - p, pts_[e.b] - p) < 0.0) encroached.push_back({e.a, e.b});
      }
      if (!encroached.empty()) return Status::encroaches;
    }

    vertex = add_point(p);
    for (int c : cavity)
      if (visit_[c] == stamp_) tris_[c].alive = false;

    created_.clear();
    const std::size_t first = tris_.size();
    for (const auto& e : edges) {
      Tri nt;
      nt.v = {vertex, e.a, e.b};
      nt.nb[0] = e.outer;
      nt.con[0] = e.con;
      nt.inside = tris_[e.owner].inside;
      const int id = static_cast<int>(tris_.size());
      tris_.push_back(nt);
      created_.push_back(id);
      if (e.outer >= 0) tris_[e.outer].nb[e.outer_edge] = id;
    }
    // Link the fan: triangle (p, a, b) meets (p, x, a) across (p, a) and
    // (p, b, y) across (b, p).
    for (std::size_t i = first; i < tris_.size(); ++i) {
      const int a = tris_[i].v[1], b = tris_[i].v[2];
      for (std::size_t j = first; j < tris_.size(); ++j) {
        if (i == j) continue;
        if (tris_[j].v[2] == a) tris_[i].nb[2] = static_cast<int>(j);
        if (tris_[j].v[1] == b) tris_[i].nb[1] = static_cast<int>(j);
      }
    }
    for (std::size_t i = first; i < tris_.size(); ++i) {
      Tri& tr = tris_[i];
      if (tr.nb[1] < 0 || tr.nb[2] < 0) throw MeshError("internal error: open cavity");
      if (split) {
        const int sa = (*split)[0], sb = (*split)[1];
        if (tr.v[1] == sa || tr.v[1] == sb) tr.con[2] = true;  // edge (p, v1)
        if (tr.v[2] == sa || tr.v[2] == sb) tr.con[1] = true;  // edge (v2, p)
      }
      for (int v : tr.v) vtri_[v] = static_cast<int>(i);
    }
    if (visit_.size() < tris_.size()) visit_.resize(tris_.size(), 0);
    return Status::inserted;
  }

  // --- setup ---------------------------------------------------------------

  void build_boundary() {
    const double sag = opt_.h * opt_.h / diam_;
    const auto corners = detect_corners(domain_);
    for (std::size_t li = 0; li < domain_.loops().size(); ++li) {
      const auto& loop = domain_.loops()[li];
      std::vector<int> loop_vertices;
      for (std::size_t si = 0; si < loop.size(); ++si) {
        const Segment& s = loop[si];
        std::vector<double> us{0.0, 1.0};
        if (s.kind() == SegmentKind::line) {
          const auto n = static_cast<std::size_t>(std::ceil(s.length() / opt_.h));
          us.clear();
          for (std::size_t k = 0; k <= n; ++k) us.push_back(static_cast<double>(k) / static_cast<double>(n));
        } else if (s.kind() == SegmentKind::arc) {
          const auto& a = s.as_arc();
          const double r = std::abs(a.radius);
          const double phi = sag >= r ? pi : 2.0 * std::acos(1.0 - sag / r);
          const auto n = static_cast<std::size_t>(
              std::max(std::ceil(s.length() / opt_.h), std::ceil(a.sweep / phi)));
          us.clear();
          for (std::size_t k = 0; k <= n; ++k) us.push_back(static_cast<double>(k) / static_cast<double>(n));
        } else {
          us = adaptive_parameters(s, sag);
        }
        bool small = false;
        for (const auto& c : corners)
          if (c.loop == li && c.segment_out == si && c.theta < pi / 3.0) small = true;
        const int v0 = add_point(s.start(), small);
        loop_vertices.push_back(v0);
        for (std::size_t k = 1; k + 1 < us.size(); ++k) loop_vertices.push_back(add_point(s.point(us[k])));
        // Chords of this segment are recorded after the loop is complete.
        for (std::size_t k = 0; k + 1 < us.size(); ++k) initial_info_.push_back({li, si});
      }
      for (std::size_t k = 0; k < loop_vertices.size(); ++k)
        initial_chords_.push_back({loop_vertices[k], loop_vertices[(k + 1) % loop_vertices.size()]});
    }
    for (std::size_t k = 0; k < initial_chords_.size(); ++k) {
      const auto& c = initial_chords_[k];
      if (distance(pts_[c[0]], pts_[c[1]]) <= 1e-12 * diam_)
        throw MeshError("degenerate boundary chord on " + describe(initial_info_[k]));
    }
  }

  std::vector<double> adaptive_parameters(const Segment& s, double sag) const {
    std::vector<double> out{0.0};
    struct Span {
      double u0, u1;
      int depth;
    };
    std::vector<Span> stack{{0.5, 1.0, 1}, {0.0, 0.5, 1}};
    while (!stack.empty()) {
      const Span sp = stack.back();
      stack.pop_back();
      const Vec2 a = s.point(sp.u0), b = s.point(sp.u1), m = s.point(0.5 * (sp.u0 + sp.u1));
      const double len = distance(a, b);
      const double dev = len > 0.0 ? std::abs(cross(b - a, m - a)) / len : distance(a, m);
      if ((len > opt_.h || dev > sag) && sp.depth < 30) {
        const double um = 0.5 * (sp.u0 + sp.u1);
        stack.push_back({um, sp.u1, sp.depth + 1});
        stack.push_back({sp.u0, um, sp.depth + 1});
      } else {
        out.push_back(sp.u1);
      }
    }
    return out;
  }

  void triangulate_points() {
    double xmin = pts_[0].x, xmax = xmin, ymin = pts_[0].y, ymax = ymin;
    for (Vec2 p : pts_) {
      xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    const Vec2 c{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
    const double r = 20.0 * std::max({xmax - xmin, ymax - ymin, diam_});
    const std::size_t n_input = pts_.size();
    for (int k = 0; k < 3; ++k) {
      const double ang = pi / 2.0 + k * 2.0 * pi / 3.0;
      super_[k] = add_point(c + r * Vec2{std::cos(ang), std::sin(ang)});
    }
    Tri t;
    t.v = {super_[0], super_[1], super_[2]};
    tris_.push_back(t);
    for (int v : t.v) vtri_[v] = 0;

    // Insert input points along a space-filling order for short walks.
    std::vector<int> order(n_input);
    for (std::size_t i = 0; i < n_input; ++i) order[i] = static_cast<int>(i);
    std::vector<std::array<int, 2>> none;
    std::array<int, 2> blocked{};
    int last = 0;
    for (int idx : order) {
      // Reuse the existing vertex slot: insert creates a new one, so move the
      // inserted point back onto idx afterwards.
      int v = -1;
      const auto st = insert(pts_[idx], last, std::nullopt, false, none, blocked, v);
      if (st != Status::inserted) throw MeshError("duplicate or degenerate boundary vertex");
      relabel(v, idx);
      last = vtri_[idx];
    }
  }

  /// Renames vertex `from` (the most recently added) to `to` and drops it.
  void relabel(int from, int to) {
    for (int t : created_)
      for (int& v : tris_[t].v)
        if (v == from) v = to;
    vtri_[to] = vtri_[from];
    pts_.pop_back();
    vtri_.pop_back();
    small_corner_.pop_back();
  }

  void recover_subsegments() {
    std::vector<std::array<int, 2>> chords = initial_chords_;
    std::vector<SubsegInfo> info = initial_info_;
    std::vector<std::array<int, 2>> none;
    std::array<int, 2> blocked{};
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<std::array<int, 2>> next;
      std::vector<SubsegInfo> next_info;
      for (std::size_t k = 0; k < chords.size(); ++k) {
        const auto c = chords[k];
        if (find_edge(c[0], c[1])) {
          next.push_back(c);
          next_info.push_back(info[k]);
          continue;
        }
        const Vec2 a = pts_[c[0]], b = pts_[c[1]];
        if (distance(a, b) < 1e-9 * diam_) throw MeshError("cannot recover boundary chord on " + describe(info[k]));
        int v = -1;
        const auto st = insert(0.5 * (a + b), vtri_[c[0]], std::nullopt, false, none, blocked, v);
        if (st != Status::inserted) throw MeshError("cannot recover boundary chord on " + describe(info[k]));
        next.push_back({c[0], v});
        next.push_back({v, c[1]});
        next_info.push_back(info[k]);
        next_info.push_back(info[k]);
        changed = true;
      }
      chords = std::move(next);
      info = std::move(next_info);
    }
    for (std::size_t k = 0; k < chords.size(); ++k) {
      const auto e = find_edge(chords[k][0], chords[k][1]);
      if (!e) throw MeshError("boundary chord lost during recovery on " + describe(info[k]));
      subsegs_[edge_key(chords[k][0], chords[k][1])] = info[k];
      set_constraint(e->first, e->second);
    }
  }

  void set_constraint(int t, int i) {
    tris_[t].con[i] = true;
    const int n = tris_[t].nb[i];
    if (n >= 0) tris_[n].con[neighbor_index(n, t)] = true;
  }

  bool inside_point(Vec2 p) const {
    bool in = false;
    for (const auto& [key, info] : subsegs_) {
      const Vec2 a = pts_[static_cast<int>(key >> 32)], b = pts_[static_cast<int>(key & 0xffffffffu)];
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (x > p.x) in = !in;
      }
    }
    return in;
  }

  void classify_regions() {
    std::vector<int> comp(tris_.size(), -1);
    int ncomp = 0;
    for (std::size_t s = 0; s < tris_.size(); ++s) {
      if (!tris_[s].alive || comp[s] >= 0) continue;
      std::vector<int> members{static_cast<int>(s)};
      comp[s] = ncomp;
      bool touches_super = false;
      for (std::size_t k = 0; k < members.size(); ++k) {
        const Tri& tr = tris_[members[k]];
        for (int v : tr.v) touches_super |= is_super(v);
        for (int i = 0; i < 3; ++i) {
          const int n = tr.nb[i];
          if (n < 0 || tr.con[i] || comp[n] >= 0) continue;
          comp[n] = ncomp;
          members.push_back(n);
        }
      }
      bool inside = false;
      if (!touches_super) {
        const Tri& tr = tris_[s];
        inside = inside_point((pts_[tr.v[0]] + pts_[tr.v[1]] + pts_[tr.v[2]]) / 3.0);
      }
      for (int m : members) tris_[m].inside = inside;
      ++ncomp;
    }
  }

  // --- refinement ----------------------------------------------------------

  bool is_bad(const Tri& t) const {
    const Vec2 a = pts_[t.v[0]], b = pts_[t.v[1]], c = pts_[t.v[2]];
    const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
    const double area2 = std::abs(cross(b - a, c - a));
    if (area2 <= 0.0) return false;
    const double r = la * lb * lc / (2.0 * area2);
    const double shortest = std::min({la, lb, lc});
    const Vec2 centroid = (a + b + c) / 3.0;
    if (std::sqrt(3.0) * r > size_at(centroid)) return true;
    if (r / shortest > opt_.quality_ratio) {
      for (int v : t.v)
        if (small_corner_[v]) return false;
      return true;
    }
    return false;
  }

  void queue_new_work() {
    for (int id : created_) {
      const Tri& tr = tris_[id];
      if (!tr.inside) continue;
      for (int i = 0; i < 3; ++i) {
        if (!tr.con[i]) continue;
        const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
        const Vec2 p = pts_[tr.v[i]];
        if (dot(pts_[a] - p, pts_[b] - p) < 0.0) encroached_.push_back({a, b});
      }
      if (is_bad(tr)) bad_.push_back(id);
    }
  }

  Vec2 split_point(int a, int b) const {
    const Vec2 pa = pts_[a], pb = pts_[b];
    const double d = distance(pa, pb);
    const bool ca = small_corner_[a] != 0, cb = small_corner_[b] != 0;
    if (ca != cb) {
      // Concentric shells around a small input angle.
      const double l = std::exp2(std::round(std::log2(0.5 * d)));
      return ca ? pa + (pb - pa) * (l / d) : pb + (pa - pb) * (l / d);
    }
    return 0.5 * (pa + pb);
  }

  void split_subsegment(int a, int b) {
    const auto it = subsegs_.find(edge_key(a, b));
    if (it == subsegs_.end()) return;
    const SubsegInfo info = it->second;
    if (distance(pts_[a], pts_[b]) < 1e-9 * diam_)
      throw MeshError("refinement failure: boundary features on " + describe(info) + " are too small for h = " +
                      format_double(opt_.h));
    std::vector<std::array<int, 2>> none;
    std::array<int, 2> blocked{};
    int v = -1;
    const Vec2 p = split_point(a, b);
    const auto st = insert(p, vtri_[a], std::array<int, 2>{a, b}, false, none, blocked, v);
    if (st != Status::inserted) throw MeshError("refinement failure while splitting " + describe(info));
    subsegs_.erase(it);
    subsegs_[edge_key(a, v)] = info;
    subsegs_[edge_key(v, b)] = info;
    queue_new_work();
  }

  void refine() {
    for (auto& [key, info] : subsegs_) {
      (void)info;
      const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
      const auto e = find_edge(a, b);
      for (int side = 0; side < 2 && e; ++side) {
        const int t = side == 0 ? e->first : tris_[e->first].nb[e->second];
        if (t < 0 || !tris_[t].inside) continue;
        for (int v : tris_[t].v) {
          if (v == a || v == b) continue;
          if (dot(pts_[a] - pts_[v], pts_[b] - pts_[v]) < 0.0) encroached_.push_back({a, b});
        }
      }
    }
    for (std::size_t t = 0; t < tris_.size(); ++t)
      if (tris_[t].alive && tris_[t].inside && is_bad(tris_[t])) bad_.push_back(static_cast<int>(t));

    std::vector<std::array<int, 2>> enc;
    std::array<int, 2> blocked{};
    while (!encroached_.empty() || !bad_.empty()) {
      if (!encroached_.empty()) {
        const auto s = encroached_.front();
        encroached_.pop_front();
        split_subsegment(s[0], s[1]);
        continue;
      }
      const int t = bad_.front();
      bad_.pop_front();
      if (!tris_[t].alive || !tris_[t].inside || !is_bad(tris_[t])) continue;
      const Tri tr = tris_[t];
      const Vec2 c = circumcenter(pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]]);
      enc.clear();
      int v = -1;
      const auto st = insert(c, t, std::nullopt, true, enc, blocked, v);
      if (st == Status::inserted) {
        queue_new_work();
      } else if (st == Status::blocked) {
        encroached_.push_back(blocked);
        bad_.push_back(t);
      } else if (st == Status::encroaches) {
        for (const auto& e : enc) encroached_.push_back(e);
        bad_.push_back(t);
      }
      // Degenerate circumcenters (on top of an existing vertex) are skipped.
    }
  }

  Mesh finish() const {
    Mesh m;
    m.h = opt_.h;
    m.grading = opt_.grading;
    m.diameter = diam_;
    m.domain_area = area(domain_);
    m.domain_perimeter = perimeter(domain_);
    m.graded_corners = opt_.grading < 1.0 ? reentrant_ : std::vector<Vec2>{};
    std::vector<int> remap(pts_.size(), -1);
    for (const Tri& t : tris_) {
      if (!t.alive || !t.inside) continue;
      std::array<int, 3> tri{};
      for (int k = 0; k < 3; ++k) {
        int& r = remap[t.v[k]];
        if (r < 0) {
          r = static_cast<int>(m.vertices.size());
          m.vertices.push_back(pts_[t.v[k]]);
        }
        tri[k] = r;
      }
      const double a = triangle_area(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]]);
      if (!(a > 0.0)) throw MeshError("refinement produced a degenerate triangle");
      m.area += a;
      m.triangles.push_back(tri);
    }
    if (m.triangles.empty()) throw MeshError("mesh has no interior triangles");
    m.boundary.assign(m.vertices.size(), false);
    for (const auto& [key, info] : subsegs_) {
      (void)info;
      const int a = remap[static_cast<int>(key >> 32)], b = remap[static_cast<int>(key & 0xffffffffu)];
      if (a < 0 || b < 0) throw MeshError("boundary chord on " + describe(info) + " is not covered by the mesh");
      m.boundary[a] = m.boundary[b] = true;
      m.boundary_edges.push_back({std::min(a, b), std::max(a, b)});
      m.boundary_length += distance(m.vertices[a], m.vertices[b]);
    }
    std::sort(m.boundary_edges.begin(), m.boundary_edges.end());
    return m;
  }
};

}  // namespace detail

/// Delaunay-refined, optionally graded triangulation of the domain.
inline Mesh mesh_domain(const DomainSpec& domain, const MeshOptions& opt) {
  detail::Refiner r(domain, opt);
  return r.run();
}

inline Mesh mesh_domain(const DomainSpec& domain, double h, double grading = 0.5) {
  MeshOptions opt;
  opt.h = h;
  opt.grading = grading;
  return mesh_domain(domain, opt);
}

/// Uniform red refinement: every triangle is split into four through its
/// edge midpoints. Boundary midpoints stay on their chords, so the meshed
/// polygon and the grading profile are unchanged while every element size
/// halves.
inline Mesh refine_uniform(const Mesh& m) {
  Mesh r = m;
  r.h = 0.5 * m.h;
  r.triangles.clear();
  r.boundary_edges.clear();
  std::unordered_map<std::uint64_t, int> mid;
  const auto midpoint = [&](int a, int b) {
    const auto key = detail::edge_key(a, b);
    const auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(r.vertices.size());
    r.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
    r.boundary.push_back(false);
    mid.emplace(key, id);
    return id;
  };
  r.triangles.reserve(4 * m.triangles.size());
  for (const auto& t : m.triangles) {
    const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
    r.triangles.push_back({t[0], ab, ca});
    r.triangles.push_back({ab, t[1], bc});
    r.triangles.push_back({ca, bc, t[2]});
    r.triangles.push_back({ab, bc, ca});
  }
  for (const auto& e : m.boundary_edges) {
    const int c = mid.at(detail::edge_key(e[0], e[1]));
    r.boundary[c] = true;
    r.boundary_edges.push_back({std::min(e[0], c), std::max(e[0], c)});
    r.boundary_edges.push_back({std::min(c, e[1]), std::max(c, e[1])});
  }
  std::sort(r.boundary_edges.begin(), r.boundary_edges.end());
  return r;
}

struct MeshQuality {
  bool conforming = true;       ///< no edge shared by more than two triangles
  bool boundary_consistent = true;  ///< edges on one triangle are exactly the boundary chords
  bool positive_areas = true;
  double min_angle = 0.0;  ///< radians
  double max_angle = 0.0;
  double min_area = 0.0;
  double max_edge = 0.0;
  double min_edge = 0.0;
};

inline MeshQuality check_mesh(const Mesh& m) {
  MeshQuality q;
  q.min_angle = pi;
  q.min_area = HUGE_VAL;
  q.min_edge = HUGE_VAL;
  std::unordered_map<std::uint64_t, int> uses;
  for (const auto& t : m.triangles) {
    const Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
    const double ar = triangle_area(a, b, c);
    q.positive_areas &= ar > 0.0;
    q.min_area = std::min(q.min_area, ar);
    for (double ang : triangle_angles(a, b, c)) {
      q.min_angle = std::min(q.min_angle, ang);
      q.max_angle = std::max(q.max_angle, ang);
    }
    for (int k = 0; k < 3; ++k) {
      const int p = t[k], r = t[(k + 1) % 3];
      ++uses[detail::edge_key(p, r)];
      const double l = distance(m.vertices[p], m.vertices[r]);
      q.max_edge = std::max(q.max_edge, l);
      q.min_edge = std::min(q.min_edge, l);
    }
  }
  std::vector<std::array<int, 2>> single;
  for (const auto& [key, n] : uses) {
    if (n > 2) q.conforming = false;
    if (n == 1) single.push_back({static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)});
  }
  std::sort(single.begin(), single.end());
  q.boundary_consistent = single == m.boundary_edges;
  for (const auto& e : m.boundary_edges) q.boundary_consistent &= m.boundary[e[0]] && m.boundary[e[1]];
  return q;
}

/// Largest distance from a boundary vertex of the mesh to the true boundary,
/// measured against a dense polyline of each segment.
inline double boundary_deviation(const Mesh& m, const DomainSpec& domain) {
  std::vector<std::pair<Vec2, Vec2>> pieces;
  for (const auto& loop : domain.loops())
    for (const auto& s : loop.segments()) {
      const auto poly = s.polyline(s.kind() == SegmentKind::line ? 1 : 16 * s.default_pieces());
      for (std::size_t i = 0; i + 1 < poly.size(); ++i) pieces.emplace_back(poly[i], poly[i + 1]);
    }
  double worst = 0.0;
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (!m.boundary[v]) continue;
    const Vec2 p = m.vertices[v];
    double best = HUGE_VAL;
    for (const auto& [a, b] : pieces) {
      const Vec2 ab = b - a;
      const double u = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
      best = std::min(best, distance(p, a + u * ab));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

/// Smallest circumradius-based element size among triangles within
/// `radius` of p.
inline double smallest_element_near(const Mesh& m, Vec2 p, double radius) {
  double best = HUGE_VAL;
  for (const auto& t : m.triangles) {
    const Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
    if (distance((a + b + c) / 3.0, p) > radius) continue;
    best = std::min({best, distance(a, b), distance(b, c), distance(c, a)});
  }
  return best;
}

/// Plain-text vertex and triangle tables.
inline std::string format_mesh(const Mesh& m) {
  std::ostringstream out;
  out << "# hearcorners-mesh version=1 tool=" << tool_version << " vertices=" << m.vertices.size()
      << " triangles=" << m.triangles.size() << " h=" << format_double(m.h)
      << " grading=" << format_double(m.grading) << "\n";
  out << "vertex,x,y,boundary\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    out << i << "," << format_double(m.vertices[i].x) << "," << format_double(m.vertices[i].y) << ","
        << (m.boundary[i] ? 1 : 0) << "\n";
  out << "triangle,v0,v1,v2\n";
  for (std::size_t i = 0; i < m.triangles.size(); ++i)
    out << i << "," << m.triangles[i][0] << "," << m.triangles[i][1] << "," << m.triangles[i][2] << "\n";
  return out.str();
}

inline void write_mesh_file(const std::string& path, const Mesh& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << format_mesh(m);
}

}  // namespace hearcorners
