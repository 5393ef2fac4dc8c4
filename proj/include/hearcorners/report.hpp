#pragma once

// Fit and verdict reports as versioned JSON. Numbers are written with
// round-trip precision, so parse(format(r)) == r.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hearcorners/asymptotic_fit.hpp"
#include "hearcorners/classifier.hpp"
#include "hearcorners/errors.hpp"
#include "hearcorners/heat_trace.hpp"
#include "hearcorners/text_io.hpp"

namespace hearcorners {

inline constexpr int report_version = 1;

struct InputRecord {
  std::string role;  ///< "spectrum" or "domain"
  std::string path;
  std::string digest;  ///< fnv1a64 of the file bytes
  bool operator==(const InputRecord&) const = default;
};

struct TheoryBlock {
  double area = 0.0, perimeter = 0.0;
  double a_minus1 = 0.0, a_minus_half = 0.0, a0 = 0.0;
  int euler_characteristic = 1;
  std::vector<double> corner_angles;
  bool operator==(const TheoryBlock&) const = default;
};

struct ComparisonBlock {
  double a_minus1_diff = 0.0, a_minus_half_diff = 0.0, a0_diff = 0.0;  ///< fitted - theoretical
  double a_minus1_z = 0.0, a_minus_half_z = 0.0, a0_z = 0.0;
  double area_rel_error = 0.0, perimeter_rel_error = 0.0;
  bool operator==(const ComparisonBlock&) const = default;
};

struct VerdictBlock {
  Decision decision = Decision::indeterminate;
  double a0_estimate = 0.0, uncertainty = 0.0, threshold = 0.0, margin = 0.0;
  int chi = 1;
  double decision_z = 3.0;
  bool window_robust = false;
  bool operator==(const VerdictBlock&) const = default;
};

struct Report {
  int version = report_version;
  std::string tool = tool_version;
  std::vector<InputRecord> inputs;
  std::string domain_label;
  double cutoff = 0.0;
  std::size_t eigenvalue_count = 0;
  AsymptoticFit fit;
  std::optional<TheoryBlock> theoretical;
  std::optional<ComparisonBlock> comparison;
  std::optional<VerdictBlock> verdict;
  bool operator==(const Report&) const = default;
};

inline TheoryBlock theory_block(const TheoreticalCoefficients& c) {
  TheoryBlock b;
  b.area = c.area;
  b.perimeter = c.perimeter;
  b.a_minus1 = c.a_minus1;
  b.a_minus_half = c.a_minus_half;
  b.a0 = c.a0;
  b.euler_characteristic = c.euler_characteristic;
  for (const auto& corner : c.corners) b.corner_angles.push_back(corner.theta);
  return b;
}

inline VerdictBlock verdict_block(const Verdict& v) {
  return {v.decision, v.a0_estimate, v.uncertainty, v.threshold, v.margin, v.chi, v.decision_z, v.window_robust};
}

namespace detail {
inline double zscore(double diff, double sigma) { return sigma > 0.0 ? diff / sigma : (diff == 0.0 ? 0.0 : HUGE_VAL); }
}  // namespace detail

/// Side-by-side fitted and theoretical values. The comparison block is
/// present only when a theoretical block is supplied.
inline Report fit_report(const AsymptoticFit& fit, const std::optional<TheoreticalCoefficients>& theory = std::nullopt) {
  Report r;
  r.fit = fit;
  if (theory) {
    r.theoretical = theory_block(*theory);
    ComparisonBlock c;
    c.a_minus1_diff = fit.a_minus1 - theory->a_minus1;
    c.a_minus_half_diff = fit.a_minus_half - theory->a_minus_half;
    c.a0_diff = fit.a0 - theory->a0;
    c.a_minus1_z = detail::zscore(c.a_minus1_diff, fit.sigma_a_minus1);
    c.a_minus_half_z = detail::zscore(c.a_minus_half_diff, fit.sigma_a_minus_half);
    c.a0_z = detail::zscore(c.a0_diff, fit.sigma_a0);
    c.area_rel_error = (fit.implied_area() - theory->area) / theory->area;
    c.perimeter_rel_error = (fit.implied_perimeter() - theory->perimeter) / theory->perimeter;
    r.comparison = c;
  }
  return r;
}

// ---------------------------------------------------------------------------
// JSON mapping

using nlohmann::json;

inline json fit_to_json(const AsymptoticFit& f) {
  json j = {
      {"a_minus1", f.a_minus1},
      {"a_minus_half", f.a_minus_half},
      {"a0", f.a0},
      {"a_half", f.a_half},
      {"sigma_a_minus1", f.sigma_a_minus1},
      {"sigma_a_minus_half", f.sigma_a_minus_half},
      {"sigma_a0", f.sigma_a0},
      {"sigma_a_half", f.sigma_a_half},
      {"a0_uncertainty_components",
       {{"statistical", f.a0_statistical}, {"window", f.a0_window}, {"truncation", f.a0_truncation}}},
      {"window", {{"t_min", f.t_min}, {"t_max", f.t_max}, {"samples", f.samples}}},
      {"assisted", f.assisted},
      {"max_relative_residual", f.max_relative_residual},
      {"rms_relative_residual", f.rms_relative_residual},
      {"condition", f.condition},
      {"implied_area", f.implied_area()},
      {"implied_perimeter", f.implied_perimeter()},
  };
  if (f.a_one) j["a_one"] = *f.a_one;
  return j;
}

inline AsymptoticFit fit_from_json(const json& j) {
  AsymptoticFit f;
  f.a_minus1 = j.at("a_minus1").get<double>();
  f.a_minus_half = j.at("a_minus_half").get<double>();
  f.a0 = j.at("a0").get<double>();
  f.a_half = j.at("a_half").get<double>();
  if (j.contains("a_one")) f.a_one = j.at("a_one").get<double>();
  f.sigma_a_minus1 = j.at("sigma_a_minus1").get<double>();
  f.sigma_a_minus_half = j.at("sigma_a_minus_half").get<double>();
  f.sigma_a0 = j.at("sigma_a0").get<double>();
  f.sigma_a_half = j.at("sigma_a_half").get<double>();
  const auto& u = j.at("a0_uncertainty_components");
  f.a0_statistical = u.at("statistical").get<double>();
  f.a0_window = u.at("window").get<double>();
  f.a0_truncation = u.at("truncation").get<double>();
  const auto& w = j.at("window");
  f.t_min = w.at("t_min").get<double>();
  f.t_max = w.at("t_max").get<double>();
  f.samples = w.at("samples").get<std::size_t>();
  f.assisted = j.at("assisted").get<bool>();
  f.max_relative_residual = j.at("max_relative_residual").get<double>();
  f.rms_relative_residual = j.at("rms_relative_residual").get<double>();
  f.condition = j.at("condition").get<double>();
  return f;
}

inline json report_to_json(const Report& r) {
  json j;
  j["report_version"] = r.version;
  j["tool_version"] = r.tool;
  j["inputs"] = json::array();
  for (const auto& in : r.inputs) j["inputs"].push_back({{"role", in.role}, {"path", in.path}, {"digest", in.digest}});
  j["spectrum"] = {{"domain_label", r.domain_label}, {"cutoff", r.cutoff}, {"count", r.eigenvalue_count}};
  j["fit"] = fit_to_json(r.fit);
  if (r.theoretical) {
    const auto& t = *r.theoretical;
    j["theoretical"] = {{"area", t.area},         {"perimeter", t.perimeter},
                        {"a_minus1", t.a_minus1}, {"a_minus_half", t.a_minus_half},
                        {"a0", t.a0},             {"euler_characteristic", t.euler_characteristic},
                        {"corner_angles", t.corner_angles}};
  }
  if (r.comparison) {
    const auto& c = *r.comparison;
    j["comparison"] = {{"a_minus1_diff", c.a_minus1_diff},   {"a_minus_half_diff", c.a_minus_half_diff},
                       {"a0_diff", c.a0_diff},               {"a_minus1_z", c.a_minus1_z},
                       {"a_minus_half_z", c.a_minus_half_z}, {"a0_z", c.a0_z},
                       {"area_rel_error", c.area_rel_error}, {"perimeter_rel_error", c.perimeter_rel_error}};
  }
  if (r.verdict) {
    const auto& v = *r.verdict;
    j["verdict"] = {{"decision", to_string(v.decision)},
                    {"a0_estimate", v.a0_estimate},
                    {"uncertainty", v.uncertainty},
                    {"threshold", v.threshold},
                    {"margin", v.margin},
                    {"chi", v.chi},
                    {"decision_z", v.decision_z},
                    {"window_robust", v.window_robust}};
  }
  return j;
}

inline Report report_from_json(const json& j) {
  Report r;
  r.version = j.at("report_version").get<int>();
  if (r.version != report_version) throw ParseError("unsupported report_version " + std::to_string(r.version));
  r.tool = j.at("tool_version").get<std::string>();
  for (const auto& in : j.at("inputs"))
    r.inputs.push_back({in.at("role").get<std::string>(), in.at("path").get<std::string>(),
                        in.at("digest").get<std::string>()});
  const auto& s = j.at("spectrum");
  r.domain_label = s.at("domain_label").get<std::string>();
  r.cutoff = s.at("cutoff").get<double>();
  r.eigenvalue_count = s.at("count").get<std::size_t>();
  r.fit = fit_from_json(j.at("fit"));
  if (j.contains("theoretical")) {
    const auto& t = j["theoretical"];
    TheoryBlock b;
    b.area = t.at("area").get<double>();
    b.perimeter = t.at("perimeter").get<double>();
    b.a_minus1 = t.at("a_minus1").get<double>();
    b.a_minus_half = t.at("a_minus_half").get<double>();
    b.a0 = t.at("a0").get<double>();
    b.euler_characteristic = t.at("euler_characteristic").get<int>();
    b.corner_angles = t.at("corner_angles").get<std::vector<double>>();
    r.theoretical = b;
  }
  if (j.contains("comparison")) {
    const auto& c = j["comparison"];
    ComparisonBlock b;
    b.a_minus1_diff = c.at("a_minus1_diff").get<double>();
    b.a_minus_half_diff = c.at("a_minus_half_diff").get<double>();
    b.a0_diff = c.at("a0_diff").get<double>();
    b.a_minus1_z = c.at("a_minus1_z").get<double>();
    b.a_minus_half_z = c.at("a_minus_half_z").get<double>();
    b.a0_z = c.at("a0_z").get<double>();
    b.area_rel_error = c.at("area_rel_error").get<double>();
    b.perimeter_rel_error = c.at("perimeter_rel_error").get<double>();
    r.comparison = b;
  }
  if (j.contains("verdict")) {
    const auto& v = j["verdict"];
    VerdictBlock b;
    b.decision = decision_from_string(v.at("decision").get<std::string>());
    b.a0_estimate = v.at("a0_estimate").get<double>();
    b.uncertainty = v.at("uncertainty").get<double>();
    b.threshold = v.at("threshold").get<double>();
    b.margin = v.at("margin").get<double>();
    b.chi = v.at("chi").get<int>();
    b.decision_z = v.at("decision_z").get<double>();
    b.window_robust = v.at("window_robust").get<bool>();
    r.verdict = b;
  }
  return r;
}

inline std::string format_report(const Report& r) { return report_to_json(r).dump(2) + "\n"; }

inline Report parse_report(const std::string& text) {
  try {
    return report_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

/// Short human-readable summary of a report.
inline std::string summarize_report(const Report& r) {
  std::ostringstream out;
  out << "domain      " << (r.domain_label.empty() ? "-" : r.domain_label) << "\n";
  out << "cutoff      " << format_double(r.cutoff) << " (" << r.eigenvalue_count << " eigenvalues)\n";
  out << "window      [" << format_double(r.fit.t_min) << ", " << format_double(r.fit.t_max) << "], "
      << r.fit.samples << " samples" << (r.fit.assisted ? ", assisted" : ", blind") << "\n";
  out << "a0          " << format_double(r.fit.a0) << " +- " << format_double(r.fit.sigma_a0) << "\n";
  out << "area        " << format_double(r.fit.implied_area()) << "\n";
  out << "perimeter   " << format_double(r.fit.implied_perimeter()) << "\n";
  if (r.theoretical) out << "a0 theory   " << format_double(r.theoretical->a0) << "\n";
  if (r.comparison) out << "a0 z-score  " << format_double(r.comparison->a0_z) << "\n";
  if (r.verdict)
    out << "verdict     " << to_string(r.verdict->decision) << " (margin " << format_double(r.verdict->margin)
        << ", chi " << r.verdict->chi << ")\n";
  return out.str();
}

}  // namespace hearcorners
