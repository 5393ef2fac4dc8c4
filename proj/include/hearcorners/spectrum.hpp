#pragma once

// Spectrum container and the plain-text spectrum file:
//
//   # hearcorners-spectrum version=1
//   # cutoff=200000 area_hint=1 source=analytic domain=unit-square count=15915
//   # <free key=value provenance tokens>
//   index,eigenvalue,multiplicity_hint
//   1,19.739208802178716,1
//   ...
//
// `cutoff` is the completeness bound: every eigenvalue <= cutoff is listed.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hearcorners/errors.hpp"
#include "hearcorners/geometry.hpp"
#include "hearcorners/text_io.hpp"

namespace hearcorners {

enum class SpectrumSource { analytic, fem, file };

inline const char* to_string(SpectrumSource s) {
  switch (s) {
    case SpectrumSource::analytic: return "analytic";
    case SpectrumSource::fem: return "fem";
    case SpectrumSource::file: return "file";
  }
  return "?";
}

/// Ascending Dirichlet eigenvalues (units 1/length^2), repeated according to
/// multiplicity, complete up to `cutoff`.
struct Spectrum {
  std::vector<double> eigenvalues;
  double cutoff = 0.0;
  SpectrumSource source = SpectrumSource::file;
  std::string domain_label;
  std::optional<double> area_hint;
  /// Ordered provenance annotations (solver parameters, digests, ...).
  std::vector<std::pair<std::string, std::string>> provenance;

  std::size_t size() const { return eigenvalues.size(); }
  bool empty() const { return eigenvalues.empty(); }
  double operator[](std::size_t i) const { return eigenvalues[i]; }

  /// Eigenvalues that are guaranteed complete (those <= cutoff).
  std::size_t complete_count() const {
    return static_cast<std::size_t>(
        std::upper_bound(eigenvalues.begin(), eigenvalues.end(), cutoff) - eigenvalues.begin());
  }

  void annotate(std::string key, std::string value) {
    for (auto& [k, v] : provenance)
      if (k == key) {
        v = std::move(value);
        return;
      }
    provenance.emplace_back(std::move(key), std::move(value));
  }

  std::optional<std::string> annotation(const std::string& key) const {
    for (const auto& [k, v] : provenance)
      if (k == key) return v;
    return std::nullopt;
  }
};

/// Throws NumericError unless the list is positive and nondecreasing.
inline void check_spectrum(const Spectrum& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0) || !std::isfinite(s[i]))
      throw NumericError("spectrum entry " + std::to_string(i + 1) + " is not a positive finite number");
    if (i > 0 && s[i] < s[i - 1])
      throw NumericError("spectrum is not sorted at entry " + std::to_string(i + 1));
  }
}

/// Rescales a spectrum to the domain dilated by factor s (eigenvalues / s^2).
inline Spectrum dilated(Spectrum spec, double s) {
  for (auto& l : spec.eigenvalues) l /= s * s;
  spec.cutoff /= s * s;
  if (spec.area_hint) *spec.area_hint *= s * s;
  return spec;
}

/// |Omega| lambda_k / (4 pi k) for k = 1..K; tends to 1 by Weyl's law.
inline std::vector<double> weyl_ratio(const Spectrum& spectrum, double area) {
  std::vector<double> r;
  r.reserve(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k)
    r.push_back(area * spectrum[k] / (4.0 * pi * static_cast<double>(k + 1)));
  return r;
}

/// Number of entries sharing each eigenvalue (relative spread <= rel_tol).
inline std::vector<int> multiplicity_hints(const std::vector<double>& ev, double rel_tol = 1e-9) {
  std::vector<int> hint(ev.size(), 1);
  std::size_t i = 0;
  while (i < ev.size()) {
    std::size_t j = i + 1;
    while (j < ev.size() && ev[j] - ev[i] <= rel_tol * ev[i]) ++j;
    for (std::size_t k = i; k < j; ++k) hint[k] = static_cast<int>(j - i);
    i = j;
  }
  return hint;
}

inline std::string format_spectrum(const Spectrum& s) {
  std::ostringstream out;
  out << "# hearcorners-spectrum version=1 tool=" << tool_version << "\n";
  out << "# cutoff=" << format_double(s.cutoff)
      << " area_hint=" << (s.area_hint ? format_double(*s.area_hint) : std::string("-"))
      << " source=" << to_string(s.source) << " domain=" << escape_token(s.domain_label)
      << " count=" << s.size() << "\n";
  if (!s.provenance.empty()) {
    out << "#";
    for (const auto& [k, v] : s.provenance) out << " " << k << "=" << escape_token(v);
    out << "\n";
  }
  out << "index,eigenvalue,multiplicity_hint\n";
  const auto hints = multiplicity_hints(s.eigenvalues);
  for (std::size_t i = 0; i < s.size(); ++i)
    out << (i + 1) << "," << format_double(s[i]) << "," << hints[i] << "\n";
  return out.str();
}

inline Spectrum parse_spectrum(const std::string& text) {
  Spectrum s;
  s.source = SpectrumSource::file;
  std::map<std::string, std::string> header;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      parse_header_tokens(std::string_view(line).substr(1), header);
      continue;
    }
    if (line.rfind("index", 0) == 0) continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    if (cols.empty() || cols.size() > 3)
      throw ParseError("spectrum line " + std::to_string(lineno) + ": expected index,eigenvalue,multiplicity_hint");
    const std::string& value = cols.size() == 1 ? cols[0] : cols[1];
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      s.eigenvalues.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("spectrum line " + std::to_string(lineno) + ": '" + value + "' is not a number");
    }
  }
  if (s.eigenvalues.empty()) throw ParseError("spectrum file contains no eigenvalues");
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  check_spectrum(s);
  s.cutoff = s.eigenvalues.back();
  for (const auto& [k, v] : header) {
    if (k == "cutoff") s.cutoff = std::stod(v);
    else if (k == "area_hint") {
      if (!v.empty() && v != "-") s.area_hint = std::stod(v);
    } else if (k == "domain") s.domain_label = v;
    else if (k == "source") s.annotate("original_source", v);
    else if (k == "version" || k == "count" || k == "tool") continue;
    else s.annotate(k, v);
  }
  return s;
}

inline Spectrum read_spectrum_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spectrum(ss.str());
}

inline void write_spectrum_file(const std::string& path, const Spectrum& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << format_spectrum(s);
}

}  // namespace hearcorners
