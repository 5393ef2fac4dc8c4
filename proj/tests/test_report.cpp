#include <gtest/gtest.h>

#include "hearcorners/analytic_spectra.hpp"
#include "hearcorners/report.hpp"

using namespace hearcorners;

namespace {

Report square_report() {
  const auto s = rectangle_spectrum(1, 1, 1e5);
  const auto v = classify(s);
  Report r = fit_report(v.fit, theoretical_coefficients(shapes::unit_square()));
  r.inputs = {{"spectrum", "square.spec", "00000000deadbeef"}};
  r.domain_label = "unit-square";
  r.cutoff = s.cutoff;
  r.eigenvalue_count = s.size();
  r.verdict = verdict_block(v);
  return r;
}

}  // namespace

TEST(Report, RoundTrip) {
  const Report r = square_report();
  const Report back = parse_report(format_report(r));
  EXPECT_EQ(back, r);
}

TEST(Report, ComparisonAgainstTheory) {
  const Report r = square_report();
  ASSERT_TRUE(r.comparison);
  ASSERT_TRUE(r.theoretical);
  EXPECT_DOUBLE_EQ(r.theoretical->a0, 0.25);
  EXPECT_NEAR(r.comparison->a0_diff, r.fit.a0 - 0.25, 1e-15);
  EXPECT_NEAR(r.comparison->area_rel_error, r.fit.implied_area() - 1.0, 1e-15);
  EXPECT_EQ(r.theoretical->corner_angles.size(), 4u);
}

TEST(Report, VersionedKeysAndDigests) {
  const auto j = report_to_json(square_report());
  EXPECT_EQ(j.at("report_version"), report_version);
  EXPECT_EQ(j.at("tool_version"), tool_version);
  EXPECT_EQ(j.at("inputs")[0].at("digest"), "00000000deadbeef");
  EXPECT_EQ(j.at("verdict").at("decision"), "has_corners");
  EXPECT_TRUE(j.at("fit").contains("a0_uncertainty_components"));
}

TEST(Report, RejectsMalformedText) {
  EXPECT_THROW(parse_report("{"), ParseError);
  EXPECT_THROW(parse_report("{\"report_version\": 99}"), ParseError);
}

TEST(Report, Summary) {
  const auto text = summarize_report(square_report());
  EXPECT_NE(text.find("unit-square"), std::string::npos);
  EXPECT_NE(text.find("has_corners"), std::string::npos);
}

TEST(Report, FitWithoutTheoryHasNoComparison) {
  const Report r = fit_report(fit_spectrum(disk_spectrum(1, 2e4)));
  EXPECT_FALSE(r.comparison);
  EXPECT_FALSE(r.theoretical);
  EXPECT_EQ(parse_report(format_report(r)), r);
}
