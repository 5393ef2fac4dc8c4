// hearcorners: spectrum, fit, classify, verify and plot-data front end.
//
// Exit codes: 0 success or smooth, 10 has_corners, 20 indeterminate,
// 1 failure, 2 invalid input, 3 insufficient spectrum, 4 missing artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hearcorners/hearcorners.hpp"

namespace fs = std::filesystem;
using namespace hearcorners;

namespace {

enum Exit { ok = 0, failure = 1, invalid_input = 2, insufficient = 3, missing_artifacts = 4 };

struct Config {
  std::string domain, spectrum, report, out, filter;
  std::optional<double> cutoff, h, grading, kappa;
  std::size_t count = 0;
  int chi = 1;
  double decision_z = 3.0;
  double inject_a0 = 0.0;
  std::uint64_t seed = 1;
  bool assisted = false;
};

/// Raised for a missing input artifact (exit 4 in plotdata).
struct MissingArtifact : Error {
  using Error::Error;
};

InputRecord input_record(const std::string& role, const std::string& path) {
  return {role, path, fnv1a64(read_text_file(path))};
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  if (const auto dir = fs::path(out).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + out + "'");
  f << text;
}

WindowOptions window_options(const Config& c) {
  WindowOptions w;
  if (c.kappa) w.kappa = *c.kappa;
  return w;
}

/// Analytic spectrum for a recognized reference family, FEM otherwise.
Spectrum spectrum_for_domain(const Config& c) {
  const DomainSpec d = read_domain_file(c.domain);
  const InputRecord in = input_record("domain", c.domain);
  Spectrum s;
  const auto family = detect_reference_family(d);
  if (family && !c.h) {
    s = reference_spectrum(*family, c.cutoff.value_or(1e5));
    if (c.count && s.size() > c.count) {
      // Keep whole degenerate levels so the list stays complete below its last value.
      std::size_t n = c.count;
      while (n > 0 && s[n] <= s[n - 1] * (1.0 + 1e-12)) --n;
      if (n == 0) throw DomainError("count cuts through the first eigenvalue level");
      s.eigenvalues.resize(n);
      s.cutoff = s.eigenvalues.back();
    }
  } else {
    FemOptions fo;
    if (c.h) fo.h = *c.h;
    if (c.grading) fo.grading = *c.grading;
    fo.count = c.count;
    fo.eigen.seed = c.seed;
    s = fem_spectrum(d, fo).spectrum;
    s.annotate("seed", std::to_string(c.seed));
  }
  if (!d.label().empty()) s.domain_label = d.label();
  s.annotate("domain_file", in.path);
  s.annotate("domain_digest", in.digest);
  return s;
}

/// Spectrum from --spectrum, else computed from --domain.
Spectrum load_spectrum(const Config& c, std::vector<InputRecord>& inputs) {
  if (!c.spectrum.empty()) {
    inputs.push_back(input_record("spectrum", c.spectrum));
    return read_spectrum_file(c.spectrum);
  }
  if (c.domain.empty()) throw DomainError("give --spectrum or --domain");
  inputs.push_back(input_record("domain", c.domain));
  return spectrum_for_domain(c);
}

Report make_report(const Spectrum& s, const AsymptoticFit& fit, std::vector<InputRecord> inputs,
                   const std::optional<TheoreticalCoefficients>& theory) {
  Report r = fit_report(fit, theory);
  r.inputs = std::move(inputs);
  r.domain_label = s.domain_label;
  r.cutoff = s.cutoff;
  r.eigenvalue_count = s.size();
  return r;
}

int cmd_spectrum(const Config& c) {
  const Spectrum s = spectrum_for_domain(c);
  emit(c.out, format_spectrum(s));
  if (!c.out.empty()) std::cerr << s.size() << " eigenvalues below " << format_double(s.cutoff) << " -> " << c.out << "\n";
  return ok;
}

int cmd_trace(const Config& c) {
  std::vector<InputRecord> inputs;
  const Spectrum s = load_spectrum(c, inputs);
  const FitWindow w = choose_window(s, window_options(c));
  const TraceSamples t = evaluate_trace(s, geometric_grid(w.t_min, w.t_max, window_options(c).points));
  std::string text = "# hearcorners-trace tool=" + std::string(tool_version);
  for (const auto& in : inputs) text += " " + in.role + "_digest=" + in.digest;
  emit(c.out, text + "\n" + format_trace_samples(t));
  return ok;
}

int cmd_fit(const Config& c) {
  std::vector<InputRecord> inputs;
  const Spectrum s = load_spectrum(c, inputs);
  std::optional<TheoreticalCoefficients> theory;
  if (!c.domain.empty()) theory = theoretical_coefficients(read_domain_file(c.domain));
  FitOptions fo;
  if (c.assisted) {
    if (!theory) throw DomainError("--assisted needs --domain");
    fo.pinned_area = theory->area;
    fo.pinned_perimeter = theory->perimeter;
  }
  const AsymptoticFit fit = fit_spectrum(s, window_options(c), fo);
  const Report r = make_report(s, fit, std::move(inputs), theory);
  emit(c.out, format_report(r));
  if (!c.out.empty()) std::cout << summarize_report(r);
  return ok;
}

int cmd_classify(const Config& c) {
  std::vector<InputRecord> inputs;
  const Spectrum s = load_spectrum(c, inputs);
  ClassifyOptions opt;
  opt.chi = c.chi;
  opt.decision_z = c.decision_z;
  opt.window = window_options(c);
  const Verdict v = classify(s, opt);
  Report r = make_report(s, v.fit, std::move(inputs), std::nullopt);
  r.verdict = verdict_block(v);
  emit(c.out, format_report(r));
  if (!c.out.empty()) std::cout << summarize_report(r);
  return exit_code(v.decision);
}

int cmd_verify(const Config& c) {
  corpus::Options opt;
  opt.inject_a0 = c.inject_a0;
  opt.seed = c.seed;
  if (c.h) opt.fem.h = *c.h;
  if (c.grading) opt.fem.grading = *c.grading;
  corpus::Context ctx(opt);
  std::vector<std::string> failed;
  std::size_t ran = 0;
  for (const auto& check : corpus::verify_checks()) {
    if (!corpus::selected(check, c.filter)) continue;
    const auto row = corpus::run_check(check, ctx);
    ++ran;
    std::cout << corpus::format_row(row) << std::endl;
    if (!row.passed) failed.push_back(row.id);
  }
  if (ran == 0) throw DomainError("filter '" + c.filter + "' selects no checks");
  nlohmann::json j{{"tool_version", tool_version}, {"ran", ran}, {"failed", failed}};
  std::cout << "failed: " << j["failed"].dump() << std::endl;
  if (!c.out.empty()) emit(c.out, j.dump(2) + "\n");
  return failed.empty() ? ok : failure;
}

int cmd_plotdata(const Config& c) {
  if (c.spectrum.empty()) throw MissingArtifact("plotdata needs --spectrum");
  for (const auto& p : {c.spectrum, c.report})
    if (!p.empty() && !fs::exists(p)) throw MissingArtifact("missing artifact '" + p + "'");
  if (c.out.empty()) throw DomainError("plotdata needs --out DIR");

  std::vector<InputRecord> inputs{input_record("spectrum", c.spectrum)};
  const Spectrum s = read_spectrum_file(c.spectrum);
  AsymptoticFit fit;
  if (!c.report.empty()) {
    inputs.push_back(input_record("report", c.report));
    fit = parse_report(read_text_file(c.report)).fit;
  } else {
    fit = fit_spectrum(s, window_options(c));
  }
  std::string header = "# hearcorners-plotdata tool=" + std::string(tool_version);
  for (const auto& in : inputs) header += " " + in.role + "_digest=" + in.digest;
  header += "\n";

  fs::create_directories(c.out);
  const TraceSamples t = evaluate_trace(s, geometric_grid(fit.t_min, fit.t_max, fit.samples));
  std::string trace = header + "t,h,model,residual\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double m = fitted_model(fit, t.t[i]);
    trace += format_double(t.t[i]) + "," + format_double(t.h[i]) + "," + format_double(m) + "," +
             format_double(t.h[i] - m) + "\n";
  }
  emit((fs::path(c.out) / "trace.csv").string(), trace);

  std::string poly = header + "n,a0\n";
  for (int n = 3; n <= 24; ++n) poly += std::to_string(n) + "," + format_double(corpus::regular_polygon_a0(n)) + "\n";
  emit((fs::path(c.out) / "regular_polygons.csv").string(), poly);
  std::cout << "wrote " << (fs::path(c.out) / "trace.csv").string() << " and "
            << (fs::path(c.out) / "regular_polygons.csv").string() << "\n";
  return ok;
}

int cmd_mesh(const Config& c) {
  const DomainSpec d = read_domain_file(c.domain);
  const Mesh m = mesh_domain(d, c.h.value_or(FemOptions{}.h), c.grading.value_or(0.5));
  std::string text = format_mesh(m);
  text.insert(text.find('\n') + 1, "# domain_digest=" + fnv1a64(read_text_file(c.domain)) + "\n");
  emit(c.out, text);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hear corners of planar drums from their Dirichlet spectrum"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help message and exit");
  app.set_version_flag("--version", tool_version);
  Config c;

  const auto positive = CLI::PositiveNumber;
  const auto add_fit = [&](CLI::App* s) {
    s->add_option("--kappa", c.kappa, "window start t_min = kappa / cutoff")->check(positive);
  };
  const auto add_solver = [&](CLI::App* s) {
    s->add_option("--cutoff", c.cutoff, "analytic spectrum cutoff")->check(positive);
    s->add_option("--count", c.count, "number of eigenvalues");
    s->add_option("--h", c.h, "FEM mesh size; forces FEM")->check(positive);
    s->add_option("--grading", c.grading, "corner grading exponent in (0, 1]")->check(CLI::Range(1e-3, 1.0));
    s->add_option("--seed", c.seed, "seed for the eigensolver start block");
  };

  auto* spectrum = app.add_subcommand("spectrum", "compute a spectrum file from a domain file");
  spectrum->add_option("--domain", c.domain, "domain file")->required();
  add_solver(spectrum);
  spectrum->add_option("--out", c.out, "output spectrum file (default stdout)");

  auto* trace = app.add_subcommand("trace", "tabulate the partial heat trace over the fit window");
  trace->add_option("--spectrum", c.spectrum, "spectrum file");
  trace->add_option("--domain", c.domain, "domain file, used when no spectrum is given");
  add_solver(trace);
  add_fit(trace);
  trace->add_option("--out", c.out, "output table (default stdout)");

  auto* fit = app.add_subcommand("fit", "fit the heat-trace expansion and write a report");
  fit->add_option("--spectrum", c.spectrum, "spectrum file");
  fit->add_option("--domain", c.domain, "domain file: theory comparison, or the spectrum source");
  fit->add_flag("--assisted", c.assisted, "pin area and perimeter to the domain values");
  add_solver(fit);
  add_fit(fit);
  fit->add_option("--out", c.out, "report file (default stdout)");

  auto* cls = app.add_subcommand("classify", "decide whether the drum has corners");
  cls->add_option("--spectrum", c.spectrum, "spectrum file");
  cls->add_option("--domain", c.domain, "domain file, used when no spectrum is given");
  add_solver(cls);
  add_fit(cls);
  cls->add_option("--chi", c.chi, "Euler characteristic of the domain");
  cls->add_option("--decision-z", c.decision_z, "decision threshold in standard errors")->check(positive);
  cls->add_option("--out", c.out, "report file (default stdout)");

  auto* verify = app.add_subcommand("verify", "run the bundled verification corpus");
  verify->add_option("--filter", c.filter, "run only checks with this id or group");
  verify->add_option("--inject-a0", c.inject_a0, "shift classifier a0 estimates toward the wrong side")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", c.seed, "seed for randomized checks");
  verify->add_option("--h", c.h, "FEM mesh size for the L-shape check")->check(positive);
  verify->add_option("--grading", c.grading, "corner grading exponent")->check(CLI::Range(1e-3, 1.0));
  verify->add_option("--out", c.out, "machine-readable summary (JSON)");

  auto* plot = app.add_subcommand("plotdata", "write t,h,model,residual and n,a0 tables");
  plot->add_option("--spectrum", c.spectrum, "spectrum file");
  plot->add_option("--report", c.report, "fit report; refit from the spectrum when absent");
  add_fit(plot);
  plot->add_option("--out", c.out, "output directory (created on demand)");

  auto* mesh = app.add_subcommand("mesh", "write the FEM mesh as vertex and triangle tables");
  mesh->add_option("--domain", c.domain, "domain file")->required();
  mesh->add_option("--h", c.h, "mesh size")->check(positive);
  mesh->add_option("--grading", c.grading, "corner grading exponent")->check(CLI::Range(1e-3, 1.0));
  mesh->add_option("--out", c.out, "output mesh file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : invalid_input;
  }

  try {
    if (*spectrum) return cmd_spectrum(c);
    if (*trace) return cmd_trace(c);
    if (*fit) return cmd_fit(c);
    if (*cls) return cmd_classify(c);
    if (*verify) return cmd_verify(c);
    if (*plot) return cmd_plotdata(c);
    if (*mesh) return cmd_mesh(c);
  } catch (const MissingArtifact& e) {
    std::cerr << "error: " << e.what() << "\n";
    return missing_artifacts;
  } catch (const InsufficientSpectrum& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.required_cutoff() > 0.0) std::cerr << "hint: a cutoff of at least " << format_double(e.required_cutoff()) << " is needed\n";
    return insufficient;
  } catch (const InvalidDomain& e) {
    std::cerr << "invalid domain: " << e.what() << "\n";
    return invalid_input;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid_input;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid_input;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
  return failure;
}
