#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bergman.hpp"
#include "core.hpp"
#include "fft.hpp"
#include "parallel.hpp"

namespace szego {

// Conventions. With x_j = -R_v + j h_v (j < N) and eta_k = k dt, dt = pi / R_v,
//   uhat(z, eta_k) = h_v sum_j e^{-i x_j eta_k} u(z, x_j) = h_v (-1)^k FFT(u)[k mod N]
//   u(z, x_j)      = (1/2pi) sum_k dt e^{i x_j eta_k} uhat(z, eta_k)
// so sum |uhat|^2 dt = 2 pi sum |u|^2 h_v exactly. Slice s carries the label
// t_s = -eta_k, i.e. it stores uhat(z, -t_s); k = N/2 - 1 - s.

namespace detail {
inline int slice_bin(const GridSpec& g, int s) { return g.vertical_points / 2 - 1 - s; }
inline double alt_sign(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }
inline int wrap(int k, int N) { return ((k % N) + N) % N; }
}  // namespace detail

inline FrequencyField partial_ft(const ScalarField& field) {
  const GridSpec& g = field.grid;
  const int N = g.vertical_points;
  const std::size_t S = g.spatial_size();
  std::vector<cplx> buf = field.values;
  fft::batch(buf, N, static_cast<int>(S), fft::Direction::forward);
  FrequencyField out{g, std::vector<FrequencySlice>(N)};
  const double hv = g.vertical_step();
  for (int s = 0; s < N; ++s) {
    const int k = detail::slice_bin(g, s);
    const int col = detail::wrap(k, N);
    const double f = hv * detail::alt_sign(k);
    auto& sl = out.slices[s];
    sl.t = g.freq_node(s);
    sl.values.resize(S);
    for (std::size_t p = 0; p < S; ++p) sl.values[p] = f * buf[p * N + col];
  }
  return out;
}

inline ScalarField partial_ift(const FrequencyField& freq) {
  const GridSpec& g = freq.grid;
  const int N = g.vertical_points;
  const std::size_t S = g.spatial_size();
  if (static_cast<int>(freq.slices.size()) != N) throw UsageError("partial_ift: slice count does not match grid");
  std::vector<cplx> buf(g.size());
  for (int s = 0; s < N; ++s) {
    const auto& sl = freq.slices[s];
    if (sl.values.size() != S) throw UsageError("partial_ift: slice extents do not match grid");
    if (std::abs(sl.t - g.freq_node(s)) > 1e-12 * (1.0 + std::abs(sl.t)))
      throw UsageError("partial_ift: slice frequencies do not match grid");
    const int k = detail::slice_bin(g, s);
    const int col = detail::wrap(k, N);
    const double f = detail::alt_sign(k);
    for (std::size_t p = 0; p < S; ++p) buf[p * N + col] = f * sl.values[p];
  }
  fft::batch(buf, N, static_cast<int>(S), fft::Direction::backward);
  const double scale = g.freq_step() / (2.0 * pi);
  for (cplx& v : buf) v *= scale;
  return ScalarField(g, std::move(buf));
}

/// Frequency-axis weights (dt per slice).
inline double freq_weight(const GridSpec& g) { return g.freq_step(); }

// ---------------------------------------------------------------------------
// Budgets

struct BudgetCheck {
  std::string name;
  double value = 0.0;
  double budget = 0.0;
  bool ok() const { return value < budget; }
};

/// Smallest positive frequency node inside the band, or 0 if none.
inline double smallest_positive_frequency(const GridSpec& g) {
  const double dt = g.freq_step();
  return dt <= g.freq_max * (1 + 1e-12) ? dt : 0.0;
}

/// Largest frequency node inside the band.
inline double largest_band_frequency(const GridSpec& g) {
  const double dt = g.freq_step();
  return std::floor(g.freq_max / dt + 1e-9) * dt;
}

/// e^{-2 t_min l_min R^2}: Gaussian mass outside the spatial box at the lowest band frequency.
inline BudgetCheck truncation_budget(const GridSpec& g, const LambdaSignature& sig, double budget = 1e-10) {
  const double t = smallest_positive_frequency(g);
  const double v = t > 0 ? std::exp(-2.0 * t * sig.min_abs() * g.spatial_radius * g.spatial_radius) : 0.0;
  return {"gaussian-truncation", v, budget};
}

/// Aliasing estimate 2 exp(-(pi/h)^2 / (4 t_max l_max)) of the spatial quadrature at the band edge.
inline BudgetCheck resolution_estimate(const GridSpec& g, const LambdaSignature& sig, double budget) {
  const double t = largest_band_frequency(g);
  const double k = pi / g.spatial_step();
  const double v = t > 0 ? 2.0 * std::exp(-k * k / (4.0 * t * sig.max_abs())) : 0.0;
  return {"spatial-resolution", v, budget};
}

inline void require_budget(const BudgetCheck& b) {
  if (!b.ok()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "measured %.3e >= budget %.3e", b.value, b.budget);
    throw BudgetError(b.name, buf);
  }
}

// ---------------------------------------------------------------------------

struct PipelineOptions {
  double damping = 0.0;  // multiplies slice t by e^{-damping t}
  int jobs = 1;
  double truncation_budget = 1e-10;
};

/// P(u) = inverse transform of slice-wise Bergman projections of the transform of u,
/// keeping 0 < t <= freq_max.
inline ScalarField scalar_pipeline_project(const ScalarField& field, const LambdaSignature& sig,
                                           const PipelineOptions& opt = {}) {
  if (!sig.all_positive()) throw UsageError("scalar_pipeline_project: signature must be all-positive");
  if (sig.n() != field.grid.n) throw UsageError("scalar_pipeline_project: signature/grid dimension mismatch");
  field.grid.validate();
  require_budget(truncation_budget(field.grid, sig, opt.truncation_budget));
  FrequencyField F = partial_ft(field);
  const GridSpec& g = field.grid;
  parallel_for(F.slices.size(), opt.jobs, [&](std::size_t s) {
    auto& sl = F.slices[s];
    if (sl.t > 0 && sl.t <= g.freq_max * (1 + 1e-12)) {
      sl = bergman_project(sl, WeightSpec{sig, sl.t}, g);
      if (opt.damping > 0) {
        const double d = std::exp(-opt.damping * sl.t);
        for (cplx& v : sl.values) v *= d;
      }
    } else {
      std::fill(sl.values.begin(), sl.values.end(), cplx(0.0));
    }
  });
  return partial_ift(F);
}

// ---------------------------------------------------------------------------
// Wave packets

struct WavePacketSpec {
  std::vector<int> alpha;             // one exponent per complex axis
  std::vector<int> conjugated_axes;   // 1-based
  double t_low = 0.5;
  double t_high = 2.5;
  int smoothness = 4;                 // g(t) = (1 - s^2)^smoothness on [t_low, t_high]
  int sign = 1;                       // vertical factor e^{-i sign t x}
  bool control = false;               // allow patterns that do not solve the CR system
  cplx amplitude = 1.0;
};

inline double envelope(const WavePacketSpec& p, double t) {
  if (t <= p.t_low || t >= p.t_high) return 0.0;
  const double s = (2.0 * t - p.t_low - p.t_high) / (p.t_high - p.t_low);
  return std::pow(1.0 - s * s, p.smoothness);
}

/// Whether the packet pattern solves its CR system: sign * s_j * l_j > 0 for all j,
/// with s_j = -1 on conjugated axes.
inline bool packet_is_cr(const WavePacketSpec& p, const LambdaSignature& sig) {
  for (int j = 0; j < sig.n(); ++j) {
    bool conj = false;
    for (int a : p.conjugated_axes) conj |= (a == j + 1);
    if (!(p.sign * (conj ? -1.0 : 1.0) * sig[j] > 0)) return false;
  }
  return true;
}

/// u = sum over band nodes t of dt g(t) prod_j xi_j^{alpha_j} e^{-t |l_j| |z_j|^2} e^{-i sign t x},
/// xi_j = conj(z_j) on conjugated axes. The frequency integral is sampled on the
/// grid's dual nodes, so the packet is exactly periodic on the vertical grid.
inline ScalarField make_wave_packet(const WavePacketSpec& p, const LambdaSignature& sig, const GridSpec& grid) {
  grid.validate();
  const int n = sig.n();
  if (grid.n != n) throw UsageError("make_wave_packet: signature/grid dimension mismatch");
  if (static_cast<int>(p.alpha.size()) != n) throw UsageError("make_wave_packet: alpha must have n entries");
  for (int a : p.alpha)
    if (a < 0) throw UsageError("make_wave_packet: negative exponent");
  for (int a : p.conjugated_axes)
    if (a < 1 || a > n) throw UsageError("make_wave_packet: conjugated axis out of range");
  if (p.sign != 1 && p.sign != -1) throw UsageError("make_wave_packet: sign must be +1 or -1");
  if (!(p.t_low > 0) || !(p.t_high > p.t_low)) throw UsageError("make_wave_packet: need 0 < t_low < t_high");
  if (p.t_high > grid.freq_max * (1 + 1e-12))
    throw UsageError("make_wave_packet: envelope exceeds the grid's frequency band");
  if (p.smoothness < 1) throw UsageError("make_wave_packet: smoothness must be >= 1");
  if (sig.degenerate()) throw UsageError("make_wave_packet: degenerate signature, no Gaussian decay on a flat axis");
  if (!p.control && !packet_is_cr(p, sig))
    throw UsageError("make_wave_packet: conjugation pattern and vertical sign give a non-decaying CR solution "
                     "(not square-integrable); set control to build a plain Gaussian packet instead");

  std::vector<bool> conj(n, false);
  for (int a : p.conjugated_axes) conj[a - 1] = true;

  const double dt = grid.freq_step();
  std::vector<double> ts, gs;
  for (int k = 1; k * dt < grid.nyquist(); ++k) {
    const double t = k * dt;
    const double e = envelope(p, t);
    if (e > 0) {
      ts.push_back(t);
      gs.push_back(dt * e);
    }
  }

  ScalarField u(grid);
  const auto z = spatial_coordinates(grid);
  const auto xv = grid.vertical_nodes();
  const int N = grid.vertical_points;
  std::vector<std::vector<cplx>> tone(ts.size(), std::vector<cplx>(N));
  for (std::size_t m = 0; m < ts.size(); ++m)
    for (int v = 0; v < N; ++v) tone[m][v] = std::exp(cplx(0, -p.sign * ts[m] * xv[v]));
  const std::size_t S = grid.spatial_size();
  for (std::size_t s = 0; s < S; ++s) {
    cplx mono = p.amplitude;
    double r2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const cplx zj = z[s * n + j];
      mono *= std::pow(conj[j] ? std::conj(zj) : zj, p.alpha[j]);
      r2 += std::abs(sig[j]) * std::norm(zj);
    }
    for (std::size_t m = 0; m < ts.size(); ++m) {
      const cplx c = mono * (gs[m] * std::exp(-ts[m] * r2));
      for (int v = 0; v < N; ++v) u.at(s, v) += c * tone[m][v];
    }
  }
  return u;
}

// ---------------------------------------------------------------------------

/// (P u_p | g_p) for each pair p through the frequency-side formula:
/// (1/2pi) sum_t dt sum_{z,w} P_t(z,w) uhat(w,-t) conj(ghat(z,-t)) dmu(z) dmu(w), with the
/// kernel evaluated pointwise (dense O(S^2) per slice, shared by all pairs; small grids only).
inline std::vector<cplx> frequency_pairings(const std::vector<ScalarField>& us, const std::vector<ScalarField>& gs,
                                            const LambdaSignature& sig) {
  if (us.size() != gs.size()) throw UsageError("frequency_pairing: need as many g as u");
  if (us.empty()) return {};
  const GridSpec& grid = us[0].grid;
  for (std::size_t p = 0; p < us.size(); ++p)
    if (!(us[p].grid == grid) || !(gs[p].grid == grid)) throw UsageError("frequency_pairing: grid mismatch");
  if (!sig.all_positive()) throw UsageError("frequency_pairing: signature must be all-positive");
  const int n = grid.n;
  if (sig.n() != n) throw UsageError("frequency_pairing: signature/grid dimension mismatch");
  const std::size_t P = us.size();
  std::vector<FrequencyField> U, G;
  for (std::size_t p = 0; p < P; ++p) {
    U.push_back(partial_ft(us[p]));
    G.push_back(partial_ft(gs[p]));
  }
  const Rule1D ax = grid.spatial_axis();
  const int M = grid.spatial_points;
  const auto wts = spatial_weights(grid);
  const std::size_t S = grid.spatial_size();
  std::vector<std::vector<int>> midx(S);
  for (std::size_t s = 0; s < S; ++s) midx[s] = grid.spatial_multi(s);

  std::vector<cplx> total(P, 0.0);
  std::vector<cplx> uh(S * P), row(P);
  for (int sl = 0; sl < grid.vertical_points; ++sl) {
    const double t = U[0].slices[sl].t;
    if (!(t > 0 && t <= grid.freq_max * (1 + 1e-12))) continue;
    // Per axis, z = a+ib, w = c+id: AG[a][c][b] = e^{-tl(a-c)^2} e^{2i tl c b},
    // BE[b][d][a] = (tl/pi) e^{-tl(b-d)^2} e^{-2i tl a d}; their product is the kernel factor.
    std::vector<std::vector<cplx>> AG(n), BE(n);
    for (int j = 0; j < n; ++j) {
      const double tl = t * sig[j];
      AG[j].resize(static_cast<std::size_t>(M) * M * M);
      BE[j].resize(static_cast<std::size_t>(M) * M * M);
      for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b)
          for (int c = 0; c < M; ++c) {
            const double xa = ax.nodes[a], xb = ax.nodes[b], xc = ax.nodes[c];
            AG[j][(static_cast<std::size_t>(a) * M + c) * M + b] = std::exp(cplx(-tl * (xa - xc) * (xa - xc), 2 * tl * xc * xb));
            BE[j][(static_cast<std::size_t>(b) * M + c) * M + a] =
                (tl / pi) * std::exp(cplx(-tl * (xb - xc) * (xb - xc), -2 * tl * xa * xc));
          }
    }
    for (std::size_t ws = 0; ws < S; ++ws)
      for (std::size_t p = 0; p < P; ++p) uh[ws * P + p] = U[p].slices[sl].values[ws];
    std::vector<cplx> slice_sum(P, 0.0);
    for (std::size_t zs = 0; zs < S; ++zs) {
      const auto& zi = midx[zs];
      std::fill(row.begin(), row.end(), cplx(0.0));
      for (std::size_t ws = 0; ws < S; ++ws) {
        const auto& wi = midx[ws];
        cplx k = wts[ws];
        for (int j = 0; j < n; ++j) {
          const int a = zi[2 * j], b = zi[2 * j + 1], c = wi[2 * j], d = wi[2 * j + 1];
          k *= AG[j][(static_cast<std::size_t>(a) * M + c) * M + b] * BE[j][(static_cast<std::size_t>(b) * M + d) * M + a];
        }
        const cplx* u = uh.data() + ws * P;
        for (std::size_t p = 0; p < P; ++p) row[p] += k * u[p];
      }
      for (std::size_t p = 0; p < P; ++p) slice_sum[p] += wts[zs] * row[p] * std::conj(G[p].slices[sl].values[zs]);
    }
    for (std::size_t p = 0; p < P; ++p) total[p] += freq_weight(grid) * slice_sum[p];
  }
  for (cplx& v : total) v /= 2.0 * pi;
  return total;
}

inline cplx frequency_pairing(const ScalarField& u, const ScalarField& g, const LambdaSignature& sig) {
  return frequency_pairings({u}, {g}, sig)[0];
}

}  // namespace szego
