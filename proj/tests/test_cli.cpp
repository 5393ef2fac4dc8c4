#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hearcorners/text_io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string exe = HEARCORNERS_EXE;
const std::string data = HEARCORNERS_DATA;

struct Result {
  int code = -1;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hearcorners_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = "'" + exe + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string domain(const std::string& name) { return data + "/" + name + ".dom"; }

  fs::path dir_;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    rows.push_back(cols);
  }
  return rows;
}

std::size_t lattice_count(double cutoff) {
  const double r = cutoff / (M_PI * M_PI);
  std::size_t n = 0;
  for (long a = 1; a * a < r; ++a)
    for (long b = 1; a * a + b * b <= r; ++b) ++n;
  return n;
}

}  // namespace

TEST_F(Cli, SpectrumOfSquareMatchesLatticeCount) {
  const auto r = run("spectrum --domain '" + domain("square") + "' --cutoff 2e5 --out '" + path("sq.spec") + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = slurp(path("sq.spec"));
  const auto rows = csv_rows(text);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.size() - 1, lattice_count(2e5));
  const std::string digest = hearcorners::fnv1a64(slurp(domain("square")));
  EXPECT_NE(text.find("domain_digest=" + digest), std::string::npos);
  EXPECT_NE(text.find("tool=" + std::string(hearcorners::tool_version)), std::string::npos);
}

TEST_F(Cli, InvalidDomainNamesTheLoop) {
  std::ofstream(path("bowtie.dom")) << R"({"schema": 1, "label": "bowtie", "loops": [{"segments": [
    {"kind": "line", "from": [0, 0], "to": [1, 1]},
    {"kind": "line", "from": [1, 1], "to": [1, 0]},
    {"kind": "line", "from": [1, 0], "to": [0, 1]},
    {"kind": "line", "from": [0, 1], "to": [0, 0]}]}]})";
  const auto r = run("spectrum --domain '" + path("bowtie.dom") + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("loop 0"), std::string::npos) << r.err;
}

TEST_F(Cli, BadArgumentsAreInvalidInput) {
  EXPECT_EQ(run("spectrum").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("spectrum --domain '" + path("absent.dom") + "'").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, ClassifyExitCodes) {
  const auto sq = run("classify --domain '" + domain("square") + "' --cutoff 2e5 --out '" + path("sq.json") + "'");
  EXPECT_EQ(sq.code, 10) << sq.err;
  EXPECT_NE(slurp(path("sq.json")).find("\"has_corners\""), std::string::npos);
  const auto disk = run("classify --domain '" + domain("disk") + "'");
  EXPECT_TRUE(disk.code == 0 || disk.code == 20) << disk.code << " " << disk.err;
}

TEST_F(Cli, ShortSpectrumIsInsufficient) {
  std::ofstream f(path("short.spec"));
  f << "index,eigenvalue,multiplicity_hint\n";
  const double ev[] = {19.74, 49.35, 49.35, 78.96, 98.70, 98.70, 128.3, 128.3, 167.8, 167.8};
  for (int i = 0; i < 10; ++i) f << i + 1 << "," << ev[i] << ",1\n";
  f.close();
  const auto r = run("classify --spectrum '" + path("short.spec") + "'");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("cutoff"), std::string::npos) << r.err;
}

TEST_F(Cli, VerifyGeometryGroupPasses) {
  const auto r = run("verify --filter geometry --out '" + path("v.json") + "'");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("failed: []"), std::string::npos);
  EXPECT_EQ(run("verify --filter no-such-check").code, 2);
}

TEST_F(Cli, InjectedA0FaultFailsEveryClassifierRow) {
  const auto r = run("verify --filter classifier --inject-a0 0.2");
  EXPECT_EQ(r.code, 1);
  std::size_t rows = 0, failing = 0;
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("[classify-") == std::string::npos) continue;
    ++rows;
    failing += line.rfind("FAIL", 0) == 0;
    // The fault must be caught by the decision, not by a crash.
    EXPECT_EQ(line.find("exception"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 7u) << r.out;
  EXPECT_EQ(failing, rows) << r.out;
  const auto summary = r.out.substr(r.out.find("failed: "));
  EXPECT_EQ(summary.find("criterion"), std::string::npos) << summary;
}

TEST_F(Cli, PlotData) {
  ASSERT_EQ(run("spectrum --domain '" + domain("square") + "' --cutoff 1e5 --out '" + path("sq.spec") + "'").code, 0);
  ASSERT_EQ(run("fit --spectrum '" + path("sq.spec") + "' --out '" + path("fit.json") + "'").code, 0);
  const std::string out = path("plots/nested");
  const auto r = run("plotdata --spectrum '" + path("sq.spec") + "' --report '" + path("fit.json") + "' --out '" + out + "'");
  ASSERT_EQ(r.code, 0) << r.err;

  const auto poly = csv_rows(slurp(out + "/regular_polygons.csv"));
  ASSERT_EQ(poly.size(), 23u);
  EXPECT_EQ(poly[0][0], "n");
  EXPECT_EQ(poly[2][0], "4");
  EXPECT_NEAR(std::stod(poly[2][1]), 0.25, 1e-15);

  const auto report = slurp(path("fit.json"));
  const auto num = [&](const std::string& key) {
    const auto p = report.find("\"" + key + "\":");
    return std::stod(report.substr(p + key.size() + 3));
  };
  const double max_rel = num("max_relative_residual");
  const auto trace = csv_rows(slurp(out + "/trace.csv"));
  ASSERT_GT(trace.size(), 10u);
  EXPECT_EQ(trace[0], (std::vector<std::string>{"t", "h", "model", "residual"}));
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double t = std::stod(trace[i][0]), h = std::stod(trace[i][1]), model = std::stod(trace[i][2]),
                 res = std::stod(trace[i][3]);
    // Complete square trace from the product formula. Polya's bound N(l) <= l / (4 pi)
    // limits the part above the cutoff to (cutoff t + 1) e^{-cutoff t} / (4 pi t).
    double one = 0.0;
    for (int m = 1; m < 200; ++m) one += std::exp(-M_PI * M_PI * m * m * t);
    const double missing = one * one - h;
    EXPECT_GE(missing, -1e-12 * h) << "t=" << t;
    EXPECT_LE(missing, (1e5 * t + 1) * std::exp(-1e5 * t) / (4 * M_PI * t) + 1e-12 * h) << "t=" << t;
    EXPECT_NEAR(res, h - model, 1e-12 * h);
    EXPECT_LE(std::abs(res), max_rel * h * (1 + 1e-9)) << "t=" << t;
  }
  EXPECT_NE(slurp(out + "/trace.csv").find("spectrum_digest=" + hearcorners::fnv1a64(slurp(path("sq.spec")))),
            std::string::npos);

  EXPECT_EQ(run("plotdata --spectrum '" + path("absent.spec") + "' --out '" + out + "'").code, 4);
  EXPECT_EQ(run("plotdata --spectrum '" + path("sq.spec") + "' --report '" + path("absent.json") + "' --out '" +
                out + "'").code,
            4);
}

TEST_F(Cli, MeshOutput) {
  const auto r = run("mesh --domain '" + domain("lshape") + "' --h 0.2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# hearcorners-mesh version=1", 0), 0u);
  EXPECT_NE(r.out.find("# domain_digest=" + hearcorners::fnv1a64(slurp(domain("lshape")))), std::string::npos);
  EXPECT_NE(r.out.find("triangle,v0,v1,v2"), std::string::npos);
}

TEST_F(Cli, ClassifyIsDeterministic) {
  ASSERT_EQ(run("spectrum --domain '" + domain("rectangle-2x1") + "' --out '" + path("r.spec") + "'").code, 0);
  const std::string args = "classify --spectrum '" + path("r.spec") + "' --out '";
  EXPECT_EQ(run(args + path("a.json") + "'").code, 10);
  EXPECT_EQ(run(args + path("b.json") + "'").code, 10);
  const auto a = slurp(path("a.json"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(path("b.json")));
}
