#include <gtest/gtest.h>

#include <sstream>

#include "szego/verify.hpp"

using namespace szego;

namespace {

RunConfig from_text(const std::string& s) {
  std::istringstream in(s);
  return load_config(KeyValueText::parse(in));
}

}  // namespace

TEST(Report, LineFormat) {
  CriterionResult c{4, "gaussian-reproducing", {{"max_rel_err", 1.5e-7, 1e-6}}, {}};
  EXPECT_EQ(format_line(c), "C04 PASS gaussian-reproducing max_rel_err=1.500e-07<=1.000e-06");
  c.checks.push_back({"order", 2.0, 3.5, true});
  EXPECT_EQ(format_line(c), "C04 FAIL gaussian-reproducing max_rel_err=1.500e-07<=1.000e-06 order=2.000e+00>=3.500e+00");
  CriterionResult e{9, "two-route", {}, "boom"};
  EXPECT_EQ(format_line(e), "C09 FAIL two-route error=\"boom\"");
}

TEST(Report, NonFiniteNeverPasses) {
  EXPECT_FALSE((Check{"x", std::nan(""), 1.0}).ok());
  EXPECT_FALSE((Check{"x", std::numeric_limits<double>::infinity(), 1.0, true}).ok());
  EXPECT_FALSE(CriterionResult{}.ok());
}

TEST(Report, Summary) {
  Report r;
  r.criteria.push_back({1, "a", {{"m", 0.0, 1.0}}, {}});
  r.criteria.push_back({2, "b", {{"m", 2.0, 1.0}}, {}});
  EXPECT_FALSE(r.ok());
  EXPECT_NE(r.str().find("SUMMARY 1/2 FAIL\n"), std::string::npos);
}

TEST(Criteria, CheapCriteriaPassAtDefaults) {
  const RunConfig cfg = from_text("");
  verify_detail::Rng rng(1);
  EXPECT_TRUE(verify_detail::c01_gamma(cfg, rng).ok());
  EXPECT_TRUE(verify_detail::c03_phase(cfg, rng).ok());
  EXPECT_TRUE(verify_detail::c06_parseval(cfg, rng).ok());
}

TEST(Criteria, TightToleranceFails) {
  const RunConfig cfg = from_text("tolerance.parseval = 1e-30\n");
  verify_detail::Rng rng(1);
  const auto c = verify_detail::c06_parseval(cfg, rng);
  EXPECT_FALSE(c.ok());
  EXPECT_NE(format_line(c).find("FAIL parseval"), std::string::npos);
}

TEST(Criteria, BudgetViolationIsReportedByName) {
  // a 2-unit spatial box leaves far more Gaussian mass outside than 1e-10
  const RunConfig cfg = from_text("grid.spatial_radius = 2\ngrid.spatial_points = 17\n");
  std::vector<std::string> lines;
  const Report rep = run_verification(cfg, 1, [&](const CriterionResult& c) { lines.push_back(format_line(c)); });
  ASSERT_EQ(lines.size(), 13u);
  EXPECT_FALSE(rep.ok());
  for (int id : {7, 8, 9}) {
    const std::string& l = lines[id - 1];
    EXPECT_NE(l.find("FAIL"), std::string::npos) << l;
    EXPECT_NE(l.find("gaussian-truncation"), std::string::npos) << l;
  }
  EXPECT_NE(rep.str().find("SUMMARY"), std::string::npos);
}

TEST(Criteria, DeterminismProbeIsStable) {
  const RunConfig cfg = from_text("grid.spatial_points = 33\ngrid.spatial_radius = 5.5\ngrid.vertical_points = 16\n");
  const auto a = verify_detail::determinism_probe(cfg, 1);
  const auto b = verify_detail::determinism_probe(cfg, 4);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)), 0);
}
