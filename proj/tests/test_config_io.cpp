#include <gtest/gtest.h>

#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "szego/config.hpp"
#include "szego/field_io.hpp"

using namespace szego;

namespace {

RunConfig from_text(const std::string& s) {
  std::istringstream in(s);
  return load_config(KeyValueText::parse(in));
}

FormField random_form(int n, int q, std::uint64_t seed) {
  GridSpec g;
  g.n = n;
  g.spatial_points = 4;
  g.spatial_radius = 1.25;
  g.vertical_points = 4;
  g.vertical_radius = 1.0;
  g.freq_max = 0.7;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  FormField u(q, g);
  for (const auto& J : all_multiindices(n, q)) {
    ScalarField f(g);
    for (auto& v : f.values) v = cplx(nd(rng), nd(rng)) * 1e-3;
    f.values[0] = cplx(1.0 / 3.0, -std::numeric_limits<double>::denorm_min());
    u.set(J, f);
  }
  return u;
}

void expect_identical(const FormField& a, const FormField& b) {
  EXPECT_EQ(a.q, b.q);
  EXPECT_TRUE(a.grid == b.grid);
  ASSERT_EQ(a.components.size(), b.components.size());
  for (const auto& [J, f] : a.components) {
    const auto& g = b.components.at(J).values;
    ASSERT_EQ(f.values.size(), g.size());
    EXPECT_EQ(std::memcmp(f.values.data(), g.data(), g.size() * sizeof(cplx)), 0) << J.str();
  }
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = from_text("");
  EXPECT_EQ(c.sig.n(), 1);
  EXPECT_EQ(c.grid.spatial_points, 49);
  EXPECT_EQ(c.grid2.n, 2);
  EXPECT_DOUBLE_EQ(c.epsilon, 0.5);
  EXPECT_EQ(c.seed, 20170605u);
  EXPECT_FALSE(c.table_points.has_value());
  EXPECT_DOUBLE_EQ(c.tol("gaussian_truncation"), 1e-10);
}

TEST(Config, SectionsAndOverrides) {
  const RunConfig c = from_text(
      "# comment\n"
      "tolerance.parseval = 1e-6\n"
      "run.jobs = 3\n"
      "[signature]\nlambdas = -1, 2\n"
      "[grid]\nspatial_points = 11  # trailing\nquadrature_rule = gauss-legendre\n"
      "[form]\ndegree = 1\n");
  EXPECT_EQ(c.sig.n(), 2);
  EXPECT_EQ(c.grid.n, 2);
  EXPECT_EQ(c.grid.spatial_points, 11);
  EXPECT_EQ(c.grid.rule, QuadratureRule::gauss_legendre);
  EXPECT_EQ(c.degree, 1);
  EXPECT_DOUBLE_EQ(c.tol("parseval"), 1e-6);
  EXPECT_EQ(c.jobs, 3);
}

TEST(Config, Packets) {
  const RunConfig c = from_text(
      "signature.lambdas = -1, 2\nform.degree = 1\n"
      "packet.a.component = (1)\npacket.a.alpha = 1, 0\n"
      "packet.b.component = (2)\npacket.b.sign = -1\npacket.b.t_high = 0.9\npacket.b.amplitude_im = 2\n");
  ASSERT_EQ(c.packets.size(), 2u);
  EXPECT_EQ(c.packets[0].component, MultiIndex{1});
  EXPECT_EQ(c.packets[0].spec.conjugated_axes, std::vector<int>{1});
  EXPECT_EQ(c.packets[0].spec.alpha, (std::vector<int>{1, 0}));
  EXPECT_EQ(c.packets[1].spec.sign, -1);
  EXPECT_EQ(c.packets[1].spec.amplitude, cplx(1.0, 2.0));
}

TEST(Config, TablePoints) {
  const RunConfig c = from_text("table.points = 0 0 0; 0.5 -0.5 1\ntable.epsilons = 0.5\n");
  ASSERT_TRUE(c.table_points.has_value());
  ASSERT_EQ(c.table_points->size(), 2u);
  EXPECT_EQ((*c.table_points)[1].z[0], cplx(0.5, -0.5));
  EXPECT_DOUBLE_EQ((*c.table_points)[1].x_last, 1.0);
  EXPECT_TRUE(from_text("table.points =\n").table_points->empty());
}

TEST(Config, Errors) {
  EXPECT_THROW(from_text("grid.spatial_pionts = 3\n"), UsageError);
  EXPECT_THROW(from_text("kernel.epsilon = -1\n"), UsageError);
  EXPECT_THROW(from_text("kernel.epsilon = abc\n"), UsageError);
  EXPECT_THROW(from_text("grid.spatial_points = 3.5\n"), UsageError);
  EXPECT_THROW(from_text("a = 1\na = 2\n"), UsageError);
  EXPECT_THROW(from_text("no equals sign\n"), UsageError);
  EXPECT_THROW(from_text("[open\n"), UsageError);
  EXPECT_THROW(from_text("tolerance.bogus = 1\n"), UsageError);
  EXPECT_THROW(from_text("tolerance.parseval = 0\n"), UsageError);
  EXPECT_THROW(from_text("form.degree = 2\n"), UsageError);
  EXPECT_THROW(from_text("grid.vertical_points = 7\n"), UsageError);
  EXPECT_THROW(from_text("grid.freq_points = 16\n"), UsageError);
  EXPECT_THROW(from_text("table.points = 1 2\n"), UsageError);
  EXPECT_THROW(from_text("signature.lambdas = \n"), UsageError);
  EXPECT_THROW(load_config_file("/nonexistent/config.ini"), UsageError);
}

TEST(FieldIo, BinaryRoundTripIsBitExact) {
  for (auto [n, q] : {std::pair{1, 0}, {2, 1}, {2, 2}}) {
    const FormField u = random_form(n, q, 17 + n + q);
    std::stringstream ss;
    write_form(ss, u, FieldFormat::binary);
    expect_identical(u, read_form(ss));
  }
}

TEST(FieldIo, CsvRoundTripIsBitExact) {
  const FormField u = random_form(2, 1, 5);
  std::stringstream ss;
  write_form(ss, u, FieldFormat::csv);
  const std::string text = ss.str();
  EXPECT_NE(text.find("component,i1,i2,i3,i4,k,re,im\n"), std::string::npos);
  EXPECT_NE(text.find("(1),0,0,0,0,0,"), std::string::npos);
  expect_identical(u, read_form(ss));
}

TEST(FieldIo, RejectsDamagedFiles) {
  const FormField u = random_form(1, 1, 3);
  std::stringstream ss;
  write_form(ss, u, FieldFormat::binary);
  const std::string good = ss.str();
  auto bad = [](const std::string& s) {
    std::istringstream in(s);
    return read_form(in);
  };
  EXPECT_THROW(bad("NOT-A-FIELD\n"), UsageError);
  EXPECT_THROW(bad(good.substr(0, good.size() - 3)), UsageError);
  EXPECT_THROW(bad(good + "x"), UsageError);
  std::string k = good;
  k.replace(k.find("q 1"), 3, "q 7");
  EXPECT_THROW(bad(k), UsageError);
  std::string e = good;
  e.replace(e.find("encoding f64le"), 14, "encoding f32be");
  EXPECT_THROW(bad(e), UsageError);
  std::string h = good;
  h.insert(h.find("end\n"), "colour blue\n");
  EXPECT_THROW(bad(h), UsageError);
  EXPECT_THROW(field_format_from_string("hdf5"), UsageError);
  EXPECT_THROW(read_form_file("/nonexistent/field.bin"), UsageError);
}

TEST(FieldIo, CsvRowOrderIsChecked) {
  const FormField u = random_form(1, 0, 4);
  std::stringstream ss;
  write_form(ss, u, FieldFormat::csv);
  std::string text = ss.str();
  const auto a = text.find("(),0,0,0,");
  const auto b = text.find("(),0,0,1,");
  const auto end_b = text.find('\n', b);
  std::string rowa = text.substr(a, b - a), rowb = text.substr(b, end_b + 1 - b);
  text.replace(a, rowa.size() + rowb.size(), rowb + rowa);
  std::istringstream in(text);
  EXPECT_THROW(read_form(in), UsageError);
}
