#include <gtest/gtest.h>

#include <random>

#include "szego/bergman.hpp"

using namespace szego;

namespace {

GridSpec gl_grid(int n, double R, int M) {
  GridSpec g;
  g.n = n;
  g.spatial_radius = R;
  g.spatial_points = M;
  g.vertical_points = 2;
  g.freq_max = 0.1;
  g.rule = QuadratureRule::gauss_legendre;
  return g;
}

std::vector<cplx> sample(const GridSpec& g, const std::function<cplx(const std::vector<cplx>&)>& f) {
  const auto z = spatial_coordinates(g);
  std::vector<cplx> v(g.spatial_size());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = f(std::vector<cplx>(z.begin() + s * g.n, z.begin() + (s + 1) * g.n));
  return v;
}

}  // namespace

TEST(BergmanKernel, Reference) {
  const WeightSpec w{LambdaSignature({1.0, 2.0}), 0.75};
  const cplx k = bergman_kernel({cplx(0.3, -0.2), cplx(1.1, 0.4)}, {cplx(-0.5, 0.1), cplx(0.2, -0.9)}, w);
  const cplx ref(-0.0015272481608297848, -0.00026752292285729299);
  EXPECT_LE(std::abs(k - ref), 1e-14 * std::abs(ref));
  EXPECT_EQ(bergman_kernel({0.0, 0.0}, {0.0, 0.0}, WeightSpec{w.sig, 0.0}), cplx(0.0));
  EXPECT_THROW(bergman_kernel({0.0}, {0.0}, WeightSpec{LambdaSignature({-1.0}), 1.0}), UsageError);
}

TEST(BergmanKernel, HermitianAndPositiveDiagonal) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const WeightSpec w{LambdaSignature({0.5, 1.5}), 1.25};
  for (int k = 0; k < 100; ++k) {
    std::vector<cplx> z{{u(rng), u(rng)}, {u(rng), u(rng)}}, x{{u(rng), u(rng)}, {u(rng), u(rng)}};
    EXPECT_LE(std::abs(bergman_kernel(z, x, w) - std::conj(bergman_kernel(x, z, w))), 1e-15);
    const cplx d = bergman_kernel(z, z, w);
    EXPECT_NEAR(d.imag(), 0.0, 1e-15);
    EXPECT_NEAR(d.real(), 0.5 * 1.5 * 1.25 * 1.25 / (pi * pi), 1e-14);
  }
}

TEST(GaussianReproducing, ReferenceCase) {
  // g(w) = w, z = 0.5, t = 2; both sides equal 0.5 e^{-1/2}
  const auto [lhs, rhs] =
      gaussian_reproducing_check(Polynomial{{{1.0, {1}}}}, {0.5}, 2.0, LambdaSignature({1.0}), gl_grid(1, 8.0, 160));
  EXPECT_NEAR(lhs.real(), 0.30326532985631671, 1e-15);
  EXPECT_LE(std::abs(rhs - lhs), 1e-10);
}

TEST(GaussianReproducing, TwoVariables) {
  const LambdaSignature sig({-1.0, 2.0});
  const Polynomial g{{{cplx(1, 1), {2, 0}}, {cplx(-0.5, 0), {1, 1}}, {cplx(0, 2), {0, 3}}}};
  const auto [lhs, rhs] = gaussian_reproducing_check(g, {cplx(0.2, -0.4), cplx(-0.3, 0.1)}, 1.0, LambdaSignature({1.0, 2.0}),
                                                     gl_grid(2, 8.0, 160));
  EXPECT_LE(std::abs(rhs - lhs), 1e-10 * std::max(1.0, std::abs(lhs)));
  EXPECT_THROW(gaussian_reproducing_check(g, {0.0, 0.0}, 1.0, sig, gl_grid(2, 8.0, 20)), UsageError);
}

TEST(BergmanProject, ReproducesHolomorphicTimesGaussian) {
  const GridSpec g = gl_grid(1, 8.0, 120);
  const WeightSpec w{LambdaSignature({1.0}), 0.8};
  for (int a = 0; a <= 3; ++a) {
    const auto u = sample(g, [&](const std::vector<cplx>& z) { return std::pow(z[0], a) * std::exp(-0.8 * std::norm(z[0])); });
    const auto p = bergman_project(FrequencySlice{0.8, u}, w, g);
    std::vector<cplx> d(u.size());
    for (std::size_t s = 0; s < u.size(); ++s) d[s] = p.values[s] - u[s];
    EXPECT_LE(slice_norm(d, g), 1e-9 * slice_norm(u, g)) << "a=" << a;
  }
}

TEST(BergmanProject, AnnihilatesAntiholomorphic) {
  const GridSpec g = gl_grid(1, 8.0, 120);
  const WeightSpec w{LambdaSignature({1.0}), 0.8};
  const auto u = sample(g, [](const std::vector<cplx>& z) { return std::conj(z[0]) * std::exp(-0.8 * std::norm(z[0])); });
  const auto p = bergman_project(FrequencySlice{0.8, u}, w, g);
  EXPECT_LE(slice_norm(p.values, g), 1e-9 * slice_norm(u, g));
}

TEST(BergmanProject, ContractiveAndIdempotent) {
  const GridSpec g = gl_grid(1, 8.0, 120);
  const WeightSpec w{LambdaSignature({1.5}), 0.9};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  const auto u = sample(g, [&](const std::vector<cplx>& z) { return cplx(nd(rng), nd(rng)) * std::exp(-0.3 * std::norm(z[0])); });
  const auto pu = bergman_project(FrequencySlice{0.9, u}, w, g).values;
  const auto ppu = bergman_project(FrequencySlice{0.9, pu}, w, g).values;
  EXPECT_LE(slice_norm(pu, g), slice_norm(u, g) * (1 + 1e-9));
  std::vector<cplx> d(u.size());
  for (std::size_t s = 0; s < d.size(); ++s) d[s] = ppu[s] - pu[s];
  EXPECT_LE(slice_norm(d, g), 1e-7 * slice_norm(pu, g));
}

TEST(BergmanProject, DiscreteOperatorIsSelfAdjoint) {
  // holds to rounding on any grid: the kernel is Hermitian and the weights are shared
  const GridSpec g = gl_grid(2, 5.0, 16);
  const WeightSpec w{LambdaSignature({1.0, 2.0}), 0.7};
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  auto noise = [&] { return sample(g, [&](const std::vector<cplx>&) { return cplx(nd(rng), nd(rng)); }); };
  const auto u = noise(), v = noise();
  const auto pu = bergman_project(FrequencySlice{0.7, u}, w, g).values;
  const auto pv = bergman_project(FrequencySlice{0.7, v}, w, g).values;
  EXPECT_LE(std::abs(slice_inner(pu, v, g) - slice_inner(u, pv, g)), 1e-12 * slice_norm(u, g) * slice_norm(v, g));
}

TEST(BergmanProject, ValidatesInput) {
  const GridSpec g = gl_grid(1, 4.0, 10);
  EXPECT_THROW(bergman_project(FrequencySlice{1.0, std::vector<cplx>(3)}, WeightSpec{LambdaSignature({1.0}), 1.0}, g), UsageError);
  EXPECT_THROW(bergman_project(FrequencySlice{1.0, std::vector<cplx>(100)}, WeightSpec{LambdaSignature({1.0, 1.0}), 1.0}, g),
               UsageError);
  const auto z = bergman_project(FrequencySlice{-1.0, std::vector<cplx>(100, 1.0)}, WeightSpec{LambdaSignature({1.0}), -1.0}, g);
  for (cplx v : z.values) EXPECT_EQ(v, cplx(0.0));
}

TEST(MonomialIntegral, References) {
  const auto a = monomial_integral({0}, 1.0, SignedWeightPattern{LambdaSignature({1.0}), MultiIndex{1}});
  ASSERT_TRUE(a.finite);
  EXPECT_NEAR(a.value, pi, 1e-14);
  const auto b = monomial_integral({2, 1}, 0.5, SignedWeightPattern{LambdaSignature({1.0, 3.0}), MultiIndex{1, 2}});
  ASSERT_TRUE(b.finite);
  EXPECT_NEAR(b.value, 8.7729816898572077, 1e-13);
  const double tr = truncated_monomial_integral({1, 0}, 1.0, SignedWeightPattern{LambdaSignature({1.0, 0.5}), MultiIndex{1}}, 1.5);
  EXPECT_NEAR(tr, 31.973635975400808, 1e-10);
}

TEST(MonomialIntegral, SignMapMatchesFrequencyConvention) {
  // eta = -t; an empty J flips every exponent
  const LambdaSignature sig({1.0, 2.0});
  const SignedWeightPattern pos{sig, MultiIndex{1, 2}}, neg{sig, MultiIndex{}};
  const double t = 0.75, eta = -t;
  EXPECT_FALSE(monomial_integral({0, 0}, eta, pos).finite);
  EXPECT_TRUE(monomial_integral({0, 0}, eta, neg).finite);
  EXPECT_TRUE(monomial_integral({0, 0}, -eta, pos).finite);
}

TEST(MonomialIntegral, TruncatedConvergesToFinite) {
  const SignedWeightPattern p{LambdaSignature({1.0, 2.0}), MultiIndex{1, 2}};
  const auto full = monomial_integral({1, 2}, 0.5, p);
  ASSERT_TRUE(full.finite);
  EXPECT_LE(std::abs(truncated_monomial_integral({1, 2}, 0.5, p, 9.0) - full.value), 1e-8 * full.value);
}

TEST(MonomialIntegral, DegenerateAndDivergent) {
  EXPECT_FALSE(monomial_integral({0, 0}, 1.0, SignedWeightPattern{LambdaSignature({1.0, 0.0}), MultiIndex{1, 2}}).finite);
  const SignedWeightPattern mixed{LambdaSignature({1.0, 1.0}), MultiIndex{1}};
  ASSERT_FALSE(monomial_integral({0, 0}, 1.0, mixed).finite);
  const auto w = divergence_witness({0, 0}, 1.0, mixed, default_witness_radii({0, 0}, 1.0, mixed));
  for (std::size_t k = 1; k < w.size(); ++k) EXPECT_GT(w[k], w[k - 1]);
  EXPECT_GT(w.back() / w.front(), 1e3);
  EXPECT_THROW(divergence_witness({0}, 1.0, SignedWeightPattern{LambdaSignature({1.0}), MultiIndex{1}}, {1, 2}), UsageError);
  EXPECT_THROW(monomial_integral({-1}, 1.0, SignedWeightPattern{LambdaSignature({1.0}), MultiIndex{1}}), UsageError);
}
