#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "szego/field_io.hpp"

namespace fs = std::filesystem;
using namespace szego;

namespace {

class Cli : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / ("szego-cli-" + std::string(info->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  /// Runs the CLI with args; stdout and stderr land in out.txt / err.txt.
  int run(const std::string& args) {
    const std::string cmd = std::string("'") + SZEGO_CLI_PATH + "' " + args + " >'" + path("out.txt") + "' 2>'" + path("err.txt") + "'";
    const int status = std::system(cmd.c_str());
    out = slurp(path("out.txt"));
    err = slurp(path("err.txt"));
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out, err;
};

const char* small_n1 =
    "grid.spatial_radius = 5\ngrid.spatial_points = 41\n"
    "grid.vertical_radius = 6.283185307179586\ngrid.vertical_points = 16\ngrid.freq_max = 2\n";

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("kernel-table --bogus"), 2);
  EXPECT_EQ(run("make-packet --format hdf5"), 2);
  EXPECT_EQ(run("verify --jobs -2"), 2);
  EXPECT_EQ(run("kernel-table --config /nonexistent.ini"), 2);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_NE(out.find("kernel-table"), std::string::npos);
}

TEST_F(Cli, UnknownConfigKeyIsAUsageError) {
  const auto cfg = write("bad.ini", "grid.spatial_pionts = 9\n");
  EXPECT_EQ(run("kernel-table --config " + cfg), 2);
  EXPECT_NE(err.find("spatial_pionts"), std::string::npos);
}

TEST_F(Cli, KernelTableDefault) {
  ASSERT_EQ(run("kernel-table"), 0) << err;
  EXPECT_EQ(out.substr(0, out.find('\n')), "x,y,epsilon,re,im,abs,route,abs_disagreement");
  EXPECT_EQ(count_lines(out), 1 + 3 * 3 * 4 * 2);
  EXPECT_NE(out.find(",closed-form,"), std::string::npos);
  EXPECT_NE(out.find(",fio-quadrature,"), std::string::npos);
}

TEST_F(Cli, KernelTableWithoutPointsIsHeaderOnly) {
  const auto cfg = write("empty.ini", "table.points =\n");
  ASSERT_EQ(run("kernel-table --config " + cfg + " --out " + path("t.csv")), 0) << err;
  EXPECT_EQ(slurp(path("t.csv")), "x,y,epsilon,re,im,abs,route,abs_disagreement\n");
  EXPECT_TRUE(out.empty());
}

TEST_F(Cli, KernelTableDiagonalValue) {
  const auto cfg = write("p.ini", "table.points = 0 0 0\ntable.epsilons = 1\n");
  ASSERT_EQ(run("kernel-table --config " + cfg), 0) << err;
  // 1 / (2 pi^2) at x = y, eps = 1
  EXPECT_NE(out.find("0;0;0,0;0;0,1,0.050660591821168"), std::string::npos) << out;
}

TEST_F(Cli, MakePacketThenProjectRoundTrip) {
  const auto cfg = write("n1.ini", small_n1);
  ASSERT_EQ(run("make-packet --config " + cfg + " --out " + path("u.bin")), 0) << err;
  ASSERT_EQ(run("project " + path("u.bin") + " --config " + cfg + " --format csv --out " + path("pu.csv") + " --jobs 2"), 0)
      << err;
  EXPECT_NE(out.find("vanishing no"), std::string::npos) << out;
  EXPECT_NE(out.find("idempotency_gap"), std::string::npos);
  EXPECT_NE(out.find("cr_residual="), std::string::npos);
  const FormField u = read_form_file(path("u.bin"));
  const FormField pu = read_form_file(path("pu.csv"));
  EXPECT_LE(norm(pu - u), 1e-6 * norm(u));
}

TEST_F(Cli, ProjectRequiresOut) {
  const auto cfg = write("n1.ini", small_n1);
  ASSERT_EQ(run("make-packet --config " + cfg + " --out " + path("u.bin")), 0) << err;
  EXPECT_EQ(run("project " + path("u.bin") + " --config " + cfg), 2);
  EXPECT_EQ(run("project " + path("missing.bin") + " --out " + path("x.bin")), 2);
}

TEST_F(Cli, ProjectRejectsDimensionMismatch) {
  const auto cfg = write("n1.ini", small_n1);
  ASSERT_EQ(run("make-packet --config " + cfg + " --out " + path("u.bin")), 0) << err;
  const auto cfg2 = write("n2.ini", "signature.lambdas = 1, 1\n");
  EXPECT_EQ(run("project " + path("u.bin") + " --config " + cfg2 + " --out " + path("x.bin")), 2);
  EXPECT_NE(err.find("n=2"), std::string::npos) << err;
}

TEST_F(Cli, ProjectBudgetViolationExitsThree) {
  const auto cfg = write("small.ini", "grid.spatial_radius = 1.5\ngrid.spatial_points = 13\n");
  ASSERT_EQ(run("make-packet --config " + cfg + " --out " + path("u.bin")), 0) << err;
  EXPECT_EQ(run("project " + path("u.bin") + " --config " + cfg + " --out " + path("pu.bin")), 3);
  EXPECT_NE(err.find("gaussian-truncation"), std::string::npos) << err;
  EXPECT_FALSE(fs::exists(path("pu.bin")));
}

TEST_F(Cli, NonDistinguishedDegreeProjectsToZero) {
  const auto cfg = write("q1.ini",
                         "signature.lambdas = 1, 1\nform.degree = 1\n"
                         "grid.spatial_radius = 5\ngrid.spatial_points = 9\n"
                         "packet.component = (1)\npacket.control = 1\npacket.t_low = 0.2\npacket.t_high = 0.9\n");
  EXPECT_EQ(run("make-packet --config " + write("q1b.ini", "signature.lambdas = 1, 1\nform.degree = 1\n")), 2);
  ASSERT_EQ(run("make-packet --config " + cfg + " --out " + path("u.bin")), 0) << err;
  ASSERT_EQ(run("project " + path("u.bin") + " --config " + cfg + " --out " + path("pu.bin")), 0) << err;
  EXPECT_NE(out.find("vanishing q = 1 is neither n_- = 0 nor n_+ = 2"), std::string::npos) << out;
  const FormField pu = read_form_file(path("pu.bin"));
  ASSERT_EQ(pu.components.size(), 1u);
  for (cplx v : pu.components.begin()->second.values) EXPECT_EQ(v, cplx(0.0));
}

TEST_F(Cli, VerifyFailureExitsOne) {
  const auto cfg = write("small.ini", "grid.spatial_radius = 2\ngrid.spatial_points = 17\n");
  EXPECT_EQ(run("verify --config " + cfg + " --out " + path("report.txt") + " --jobs 1"), 1);
  const std::string rep = slurp(path("report.txt"));
  EXPECT_EQ(rep, out);
  EXPECT_EQ(count_lines(rep), 14);
  EXPECT_NE(rep.find("C07 FAIL"), std::string::npos);
  EXPECT_NE(rep.find("SUMMARY"), std::string::npos);
}
