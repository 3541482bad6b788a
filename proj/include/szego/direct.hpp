#pragma once

#include <cmath>
#include <vector>

#include "core.hpp"
#include "fft.hpp"
#include "parallel.hpp"
#include "phase.hpp"

// Cross-check route: apply the closed-form kernel by direct quadrature over the
// grid, with no transform or Bergman factorisation involved. The grid is periodic
// in x', so the kernel is summed over all vertical images.

namespace szego {

/// Coefficients (ascending powers of c) of P_n with P_0 = c, P_{k+1} = -(1 + c^2) P_k'.
/// d^n/dw^n cot(pi w) = pi^n P_n(cot(pi w)).
inline std::vector<double> cot_derivative_poly(int n) {
  std::vector<double> p{0.0, 1.0};
  for (int k = 0; k < n; ++k) {
    std::vector<double> d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = i * p[i];
    std::vector<double> next(d.size() + 2, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      next[i] -= d[i];
      next[i + 2] -= d[i];
    }
    p = std::move(next);
  }
  return p;
}

inline cplx eval_poly(const std::vector<double>& p, cplx c) {
  cplx acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * c + *it;
  return acc;
}

/// c0 n! sum_m (a - i(sigma + m L))^{-(n+1)}, a > 0: the closed-form kernel (with
/// Im phi + eps = a, Re phi = sigma) summed over vertical period L.
inline cplx periodized_szego_kernel(double a, double sigma, int n, double L, double c0) {
  if (!(a > 0)) throw UsageError("periodized_szego_kernel: need a > 0");
  const cplx q = std::exp(cplx(-2.0 * pi * a / L, 2.0 * pi * sigma / L));
  const cplx c = cplx(0, 1) * (q + 1.0) / (q - 1.0);
  const cplx pref = std::pow(cplx(0, pi / L), n + 1) * ((n % 2) ? -c0 : c0);
  return pref * eval_poly(cot_derivative_poly(n), c);
}

struct DirectRouteOptions {
  int spatial_stride = 6;     // output every stride-th node on each spatial axis
  int vertical_upsample = 8;  // quadrature nodes per grid node in x'
  int jobs = 1;
};

/// Output nodes: strided spatial nodes times vertical nodes 0..N, the last one
/// being the periodic copy of node 0.
struct MicroGrid {
  std::vector<std::size_t> spatial;
  int vertical = 0;  // number of vertical output nodes (N + 1)
  std::size_t size() const { return spatial.size() * vertical; }
};

inline MicroGrid micro_grid(const GridSpec& g, int stride) {
  if (stride < 1 || (g.spatial_points - 1) % stride != 0)
    throw UsageError("micro_grid: stride must divide spatial_points - 1");
  MicroGrid m;
  m.vertical = g.vertical_points + 1;
  for (std::size_t s = 0; s < g.spatial_size(); ++s) {
    bool keep = true;
    for (int i : g.spatial_multi(s)) keep &= (i % stride == 0);
    if (keep) m.spatial.push_back(s);
  }
  return m;
}

inline std::vector<cplx> micro_samples(const ScalarField& f, const MicroGrid& m) {
  const int N = f.grid.vertical_points;
  std::vector<cplx> out;
  out.reserve(m.size());
  for (std::size_t s : m.spatial)
    for (int v = 0; v < m.vertical; ++v) out.push_back(f.at(s, v % N));
  return out;
}

/// (S u)(x) = int K_eps(x, y) u(y) dmu(y) on the micro-grid for all-positive lambda,
/// using the phase phi_- and the periodised closed-form kernel. The x' integral runs
/// on a refined periodic grid onto which u is trigonometrically interpolated.
inline std::vector<cplx> direct_kernel_project(const ScalarField& u, const LambdaSignature& sig, double epsilon,
                                               const DirectRouteOptions& opt = {}) {
  if (!sig.all_positive()) throw UsageError("direct_kernel_project: signature must be all-positive");
  if (!(epsilon > 0)) throw UsageError("direct_kernel_project: epsilon must be > 0");
  const GridSpec& g = u.grid;
  const int n = g.n;
  if (sig.n() != n) throw UsageError("direct_kernel_project: signature/grid dimension mismatch");
  if (opt.vertical_upsample < 1) throw UsageError("direct_kernel_project: vertical_upsample must be >= 1");
  const MicroGrid mg = micro_grid(g, opt.spatial_stride);
  const int N = g.vertical_points;
  const int r = opt.vertical_upsample;
  const int Nq = N * r;
  const double L = 2.0 * g.vertical_radius;
  const double hq = L / Nq;
  const std::size_t S = g.spatial_size();

  // Spectrum of u on the refined grid (zero padding, Nyquist bin split).
  std::vector<cplx> coarse = u.values;
  fft::batch(coarse, N, static_cast<int>(S), fft::Direction::forward);
  std::vector<cplx> Uq(S * Nq, 0.0);
  const double up = static_cast<double>(Nq) / N;  // FFT_Nq of the interpolant from FFT_N
  for (std::size_t s = 0; s < S; ++s)
    for (int m = 0; m < N; ++m) {
      const cplx c = coarse[s * N + m] * up;
      if (m < N / 2) Uq[s * Nq + m] = c;
      else if (m > N / 2) Uq[s * Nq + m + Nq - N] = c;
      else {
        Uq[s * Nq + m] = 0.5 * c;
        Uq[s * Nq + Nq - N / 2] = 0.5 * c;
      }
    }

  const auto z = spatial_coordinates(g);
  const auto w = spatial_weights(g);
  const double c0 = szego_constant(sig);
  const auto poly = cot_derivative_poly(n);
  const cplx pref = std::pow(cplx(0, pi / L), n + 1) * ((n % 2) ? -c0 : c0);
  std::vector<cplx> roots(Nq);
  for (int l = 0; l < Nq; ++l) roots[l] = std::exp(cplx(0, 2.0 * pi * l / Nq));

  std::vector<cplx> out(mg.size());
  parallel_for(mg.spatial.size(), opt.jobs, [&](std::size_t oi) {
    const std::size_t zs = mg.spatial[oi];
    std::vector<cplx> K(S * Nq);
    for (std::size_t ws = 0; ws < S; ++ws) {
      double a = epsilon, gam = 0.0;
      for (int j = 0; j < n; ++j) {
        const cplx zj = z[zs * n + j], wj = z[ws * n + j];
        a += std::abs(sig[j]) * std::norm(zj - wj);
        gam -= 2.0 * sig[j] * (std::conj(zj) * wj).imag();
      }
      const cplx Q = std::exp(cplx(-2.0 * pi * a / L, 2.0 * pi * gam / L));
      cplx* row = K.data() + ws * Nq;
      for (int l = 0; l < Nq; ++l) {
        const cplx q = roots[l] * Q;
        const cplx c = cplx(0, 1) * (q + 1.0) / (q - 1.0);
        row[l] = pref * eval_poly(poly, c);
      }
    }
    fft::batch(K, Nq, static_cast<int>(S), fft::Direction::backward);
    std::vector<cplx> acc(Nq, 0.0);
    for (std::size_t ws = 0; ws < S; ++ws) {
      const cplx* kr = K.data() + ws * Nq;
      const cplx* ur = Uq.data() + ws * Nq;
      for (int k = 0; k < Nq; ++k) acc[k] += w[ws] * kr[k] * ur[k];
    }
    fft::batch(acc, Nq, 1, fft::Direction::backward);
    for (int v = 0; v < mg.vertical; ++v) out[oi * mg.vertical + v] = acc[(v * r) % Nq] * (hq / Nq);
  });
  return out;
}

/// Polynomial extrapolation to eps = 0 (Neville), componentwise.
inline std::vector<cplx> extrapolate_to_zero(const std::vector<double>& eps, const std::vector<std::vector<cplx>>& vals) {
  if (eps.size() != vals.size() || eps.empty()) throw UsageError("extrapolate_to_zero: size mismatch");
  const std::size_t m = eps.size(), len = vals[0].size();
  std::vector<cplx> out(len);
  std::vector<cplx> P(m);
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t k = 0; k < m; ++k) P[k] = vals[k][i];
    for (std::size_t lev = 1; lev < m; ++lev)
      for (std::size_t k = 0; k + lev < m; ++k)
        P[k] = (eps[k] * P[k + 1] - eps[k + lev] * P[k]) / (eps[k] - eps[k + lev]);
    out[i] = P[0];
  }
  return out;
}

}  // namespace szego
