#pragma once

// Domain files (schema 1) are JSON documents:
//
//   {
//     "schema": 1,
//     "label": "quarter disk",
//     "loops": [
//       {"segments": [
//         {"kind": "line", "from": [0, 0], "to": [1, 0]},
//         {"kind": "arc", "from": [1, 0], "to": [0, 1], "center": [0, 0], "radius": 1},
//         {"kind": "line", "from": [0, 1], "to": [0, 0]}
//       ]}
//     ]
//   }
//
// The first loop is the outer boundary (counterclockwise), later loops are
// holes (clockwise). Arc radius is signed: positive means counterclockwise
// travel. Parametric segments are
//   {"kind": "parametric", "curve": "bezier", "control": [[x, y], ...]}
//   {"kind": "parametric", "curve": "ellipse-arc", "center": [x, y],
//    "semi_axes": [a, b], "rotation": phi, "t0": t0, "t1": t1}
// Unknown kinds, curves and keys are rejected.

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hearcorners/errors.hpp"
#include "hearcorners/geometry.hpp"

namespace hearcorners {

inline constexpr int domain_schema_version = 1;

namespace detail {

inline void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ParseError(where + ": unknown key '" + key + "'");
}

inline Vec2 read_point(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing '" + key + "'");
  const auto& p = j.at(key);
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
    throw ParseError(where + ": '" + key + "' must be a pair of numbers");
  return {p[0].get<double>(), p[1].get<double>()};
}

inline double read_number(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ParseError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline nlohmann::json point_json(Vec2 p) { return nlohmann::json::array({p.x, p.y}); }

inline Segment parse_segment(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ParseError(where + ": segment needs a string 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "line") {
      require_keys(j, {"kind", "from", "to"}, where);
      return Segment::line(read_point(j, "from", where), read_point(j, "to", where));
    }
    if (kind == "arc") {
      require_keys(j, {"kind", "from", "to", "center", "radius"}, where);
      return Segment::arc(read_point(j, "from", where), read_point(j, "to", where),
                          read_point(j, "center", where), read_number(j, "radius", where));
    }
    if (kind == "parametric") {
      if (!j.contains("curve") || !j.at("curve").is_string())
        throw ParseError(where + ": parametric segment needs a string 'curve'");
      const auto curve = j.at("curve").get<std::string>();
      if (curve == "bezier") {
        require_keys(j, {"kind", "curve", "control"}, where);
        const auto& c = j.at("control");
        if (!c.is_array() || c.size() < 2) throw ParseError(where + ": 'control' needs >= 2 points");
        std::vector<Vec2> pts;
        for (const auto& p : c) {
          if (!p.is_array() || p.size() != 2) throw ParseError(where + ": bad control point");
          pts.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        return bezier(std::move(pts));
      }
      if (curve == "ellipse-arc") {
        require_keys(j, {"kind", "curve", "center", "semi_axes", "rotation", "t0", "t1"}, where);
        const Vec2 ab = read_point(j, "semi_axes", where);
        const double rot = j.contains("rotation") ? read_number(j, "rotation", where) : 0.0;
        return ellipse_arc(read_point(j, "center", where), ab.x, ab.y, rot, read_number(j, "t0", where),
                           read_number(j, "t1", where));
      }
      throw ParseError(where + ": unknown parametric curve '" + curve + "'");
    }
  } catch (const InvalidDomain& e) {
    throw InvalidDomain(where + ": " + e.what());
  }
  throw ParseError(where + ": unknown segment kind '" + kind + "'");
}

inline nlohmann::json segment_json(const Segment& s) {
  switch (s.kind()) {
    case SegmentKind::line:
      return {{"kind", "line"}, {"from", point_json(s.as_line().from)}, {"to", point_json(s.as_line().to)}};
    case SegmentKind::arc: {
      const auto& a = s.as_arc();
      return {{"kind", "arc"},
              {"from", point_json(a.from)},
              {"to", point_json(a.to)},
              {"center", point_json(a.center)},
              {"radius", a.radius}};
    }
    case SegmentKind::parametric: {
      const auto& p = s.as_parametric();
      if (p.family == "bezier") {
        auto c = nlohmann::json::array();
        for (std::size_t i = 0; i + 1 < p.params.size(); i += 2) c.push_back({p.params[i], p.params[i + 1]});
        return {{"kind", "parametric"}, {"curve", "bezier"}, {"control", c}};
      }
      if (p.family == "ellipse-arc") {
        const auto& q = p.params;
        return {{"kind", "parametric"},  {"curve", "ellipse-arc"},
                {"center", {q[0], q[1]}}, {"semi_axes", {q[2], q[3]}},
                {"rotation", q[4]},       {"t0", q[5]},
                {"t1", q[6]}};
      }
      throw ParseError("custom parametric segments cannot be serialized");
    }
  }
  return {};
}

}  // namespace detail

inline DomainSpec parse_domain(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("domain file is not valid JSON: ") + e.what());
  }
  detail::require_keys(j, {"schema", "label", "loops"}, "domain");
  if (!j.contains("schema") || !j.at("schema").is_number_integer() ||
      j.at("schema").get<int>() != domain_schema_version)
    throw ParseError("domain: unsupported or missing 'schema' (expected 1)");
  if (!j.contains("loops") || !j.at("loops").is_array() || j.at("loops").empty())
    throw ParseError("domain: 'loops' must be a non-empty array");
  std::vector<BoundaryLoop> loops;
  for (std::size_t li = 0; li < j.at("loops").size(); ++li) {
    const auto& lj = j.at("loops")[li];
    const std::string where = "loop " + std::to_string(li);
    detail::require_keys(lj, {"segments"}, where);
    if (!lj.contains("segments") || !lj.at("segments").is_array() || lj.at("segments").empty())
      throw ParseError(where + ": 'segments' must be a non-empty array");
    std::vector<Segment> segs;
    for (std::size_t si = 0; si < lj.at("segments").size(); ++si)
      segs.push_back(detail::parse_segment(lj.at("segments")[si], where + " segment " + std::to_string(si)));
    loops.emplace_back(std::move(segs));
  }
  const std::string label = j.contains("label") ? j.at("label").get<std::string>() : std::string{};
  return DomainSpec(std::move(loops), label);
}

inline std::string format_domain(const DomainSpec& d) {
  nlohmann::json j;
  j["schema"] = domain_schema_version;
  j["label"] = d.label();
  j["loops"] = nlohmann::json::array();
  for (const auto& loop : d.loops()) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : loop.segments()) segs.push_back(detail::segment_json(s));
    j["loops"].push_back({{"segments", segs}});
  }
  return j.dump(2) + "\n";
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline DomainSpec read_domain_file(const std::string& path) { return parse_domain(read_text_file(path)); }

inline void write_domain_file(const std::string& path, const DomainSpec& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << format_domain(d);
}

}  // namespace hearcorners
