#include <gtest/gtest.h>

#include <random>

#include "szego/transform.hpp"

using namespace szego;

namespace {

GridSpec small_grid() {
  GridSpec g;
  g.spatial_radius = 5.0;
  g.spatial_points = 41;
  g.vertical_radius = 2.0 * pi;
  g.vertical_points = 16;
  g.freq_max = 2.0;
  return g;
}

ScalarField noise(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ScalarField f(g);
  const auto z = spatial_coordinates(g);
  for (std::size_t s = 0; s < g.spatial_size(); ++s) {
    double r2 = 0.0;
    for (int j = 0; j < g.n; ++j) r2 += std::norm(z[s * g.n + j]);
    for (int v = 0; v < g.vertical_points; ++v) f.at(s, v) = cplx(nd(rng), nd(rng)) * std::exp(-r2);
  }
  return f;
}

double freq_norm(const FrequencyField& F) {
  double acc = 0.0;
  for (const auto& sl : F.slices) acc += std::pow(slice_norm(sl.values, F.grid), 2);
  return std::sqrt(acc * freq_weight(F.grid));
}

WavePacketSpec packet(int alpha, bool conj, int sign, double lo, double hi) {
  WavePacketSpec p;
  p.alpha = {alpha};
  if (conj) p.conjugated_axes = {1};
  p.sign = sign;
  p.t_low = lo;
  p.t_high = hi;
  return p;
}

}  // namespace

TEST(PartialTransform, RoundTripAndParseval) {
  const GridSpec g = small_grid();
  const ScalarField u = noise(g, 1);
  const FrequencyField F = partial_ft(u);
  ASSERT_EQ(static_cast<int>(F.slices.size()), g.vertical_points);
  for (int s = 0; s < g.vertical_points; ++s) EXPECT_DOUBLE_EQ(F.slices[s].t, g.freq_node(s));
  const ScalarField back = partial_ift(F);
  EXPECT_LE(norm(back - u), 1e-13 * norm(u));
  EXPECT_NEAR(freq_norm(F), std::sqrt(2.0 * pi) * norm(u), 1e-12 * norm(u));
}

TEST(PartialTransform, PureToneLandsOnItsSlice) {
  // e^{-i t x'} with t = 3 dt: the transform stores uhat(z, -t_s), so the tone
  // sits on the slice labelled +t.
  const GridSpec g = small_grid();
  const double t = 3.0 * g.freq_step();
  ScalarField u(g);
  const auto x = g.vertical_nodes();
  for (std::size_t s = 0; s < g.spatial_size(); ++s)
    for (int v = 0; v < g.vertical_points; ++v) u.at(s, v) = std::exp(cplx(0, -t * x[v]));
  const FrequencyField F = partial_ft(u);
  for (const auto& sl : F.slices) {
    const double m = std::abs(sl.values[0]);
    if (std::abs(sl.t - t) < 1e-12) EXPECT_NEAR(m, 2.0 * g.vertical_radius, 1e-12);
    else EXPECT_LT(m, 1e-12);
  }
}

TEST(PartialTransform, RejectsMismatchedSlices) {
  const GridSpec g = small_grid();
  FrequencyField F = partial_ft(ScalarField(g));
  F.slices[2].t += 0.1;
  EXPECT_THROW(partial_ift(F), UsageError);
  F.slices.pop_back();
  EXPECT_THROW(partial_ift(F), UsageError);
}

TEST(Budget, TruncationNamedAndEnforced) {
  GridSpec g = small_grid();
  const LambdaSignature sig({1.0});
  const auto ok = truncation_budget(g, sig);
  EXPECT_EQ(ok.name, "gaussian-truncation");
  EXPECT_TRUE(ok.ok());
  g.spatial_radius = 1.0;
  const auto bad = truncation_budget(g, sig);
  EXPECT_FALSE(bad.ok());
  EXPECT_NEAR(bad.value, std::exp(-2.0 * g.freq_step()), 1e-15);
  try {
    scalar_pipeline_project(ScalarField(g), sig);
    FAIL() << "expected BudgetError";
  } catch (const BudgetError& e) {
    EXPECT_NE(std::string(e.what()).find("gaussian-truncation"), std::string::npos);
  }
}

TEST(Budget, ResolutionEstimateShrinksWithFinerGrid) {
  GridSpec g = small_grid();
  const LambdaSignature sig({1.0});
  const double coarse = resolution_estimate(g, sig, 1.0).value;
  g.spatial_points = 81;
  EXPECT_LT(resolution_estimate(g, sig, 1.0).value, coarse);
}

TEST(WavePacket, CrClassification) {
  const LambdaSignature pos({1.0}), neg({-1.0}), mix({-1.0, 2.0});
  EXPECT_TRUE(packet_is_cr(packet(0, false, 1, 0.5, 1.5), pos));
  EXPECT_FALSE(packet_is_cr(packet(0, true, 1, 0.5, 1.5), pos));
  EXPECT_TRUE(packet_is_cr(packet(0, true, 1, 0.5, 1.5), neg));
  EXPECT_TRUE(packet_is_cr(packet(0, true, -1, 0.5, 1.5), pos));
  WavePacketSpec m;
  m.alpha = {0, 0};
  m.conjugated_axes = {1};
  EXPECT_TRUE(packet_is_cr(m, mix));
  m.sign = -1;
  m.conjugated_axes = {2};
  EXPECT_TRUE(packet_is_cr(m, mix));
}

TEST(WavePacket, Validation) {
  const GridSpec g = small_grid();
  const LambdaSignature sig({1.0});
  EXPECT_THROW(make_wave_packet(packet(0, true, 1, 0.5, 1.5), sig, g), UsageError);
  auto p = packet(0, true, 1, 0.5, 1.5);
  p.control = true;
  EXPECT_NO_THROW(make_wave_packet(p, sig, g));
  EXPECT_THROW(make_wave_packet(packet(0, false, 1, 0.5, 2.5), sig, g), UsageError);
  EXPECT_THROW(make_wave_packet(packet(0, false, 2, 0.5, 1.5), sig, g), UsageError);
  EXPECT_THROW(make_wave_packet(packet(-1, false, 1, 0.5, 1.5), sig, g), UsageError);
  EXPECT_THROW(make_wave_packet(packet(0, false, 1, 0.5, 1.5), LambdaSignature({1.0, 1.0}), g), UsageError);
}

TEST(Pipeline, ReproducesCrPacket) {
  const GridSpec g = small_grid();
  const LambdaSignature sig({1.0});
  for (int a = 0; a <= 2; ++a) {
    const ScalarField u = make_wave_packet(packet(a, false, 1, 0.4, 1.9), sig, g);
    EXPECT_LE(norm(scalar_pipeline_project(u, sig) - u), 1e-6 * norm(u)) << "alpha=" << a;
  }
}

TEST(Pipeline, AnnihilatesNegativeFrequencyAndConjugatePatterns) {
  const GridSpec g = small_grid();
  const LambdaSignature sig({1.0});
  // negative frequencies: e^{+i t x'} has its transform on slices t < 0
  const ScalarField neg = make_wave_packet(packet(0, true, -1, 0.4, 1.9), sig, g);
  EXPECT_LE(norm(scalar_pipeline_project(neg, sig)), 1e-12 * norm(neg));
  auto c = packet(1, true, 1, 0.4, 1.9);
  c.control = true;
  const ScalarField anti = make_wave_packet(c, sig, g);
  EXPECT_LE(norm(scalar_pipeline_project(anti, sig)), 1e-5 * norm(anti));
}

TEST(Pipeline, ContractionIdempotencySelfAdjointness) {
  const GridSpec g = small_grid();
  const LambdaSignature sig({1.0});
  const ScalarField u = noise(g, 2), v = noise(g, 3);
  PipelineOptions opt;
  opt.jobs = 2;
  const ScalarField pu = scalar_pipeline_project(u, sig, opt), pv = scalar_pipeline_project(v, sig, opt);
  EXPECT_LE(norm(pu), norm(u) * (1 + 1e-9));
  EXPECT_LE(norm(scalar_pipeline_project(pu, sig, opt) - pu), 1e-4 * norm(pu));
  EXPECT_LE(std::abs(inner(pu, v) - inner(u, pv)), 1e-4 * norm(u) * norm(v));
}

TEST(Pipeline, JobsDoNotChangeBits) {
  const GridSpec g = small_grid();
  const LambdaSignature sig({1.0});
  const ScalarField u = noise(g, 4);
  PipelineOptions one, four;
  four.jobs = 4;
  EXPECT_EQ(scalar_pipeline_project(u, sig, one).values, scalar_pipeline_project(u, sig, four).values);
}

TEST(Pipeline, RejectsIndefiniteSignature) {
  const GridSpec g = small_grid();
  EXPECT_THROW(scalar_pipeline_project(ScalarField(g), LambdaSignature({-1.0})), UsageError);
}

TEST(FrequencyPairing, MatchesSpatialInnerProduct) {
  GridSpec g;
  g.spatial_radius = 4.0;
  g.spatial_points = 17;
  g.vertical_radius = pi;
  g.vertical_points = 8;
  g.freq_max = 1.5;
  const LambdaSignature sig({1.0});
  const ScalarField u = noise(g, 5), w = noise(g, 6);
  const cplx direct = inner(scalar_pipeline_project(u, sig), w);
  const cplx viaf = frequency_pairing(u, w, sig);
  EXPECT_LE(std::abs(direct - viaf), 1e-4 * norm(u) * norm(w));
  const auto batch = frequency_pairings({u, w}, {w, u}, sig);
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_EQ(batch[0], viaf);
  EXPECT_THROW(frequency_pairings({u}, {}, sig), UsageError);
}
