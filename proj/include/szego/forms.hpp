#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bergman.hpp"
#include "core.hpp"
#include "fft.hpp"
#include "transform.hpp"

namespace szego {

// ---------------------------------------------------------------------------
// CR vector fields Z_j = d/dz_j - i l_j conj(z_j) d/dx',  Zbar_j = d/dzbar_j + i l_j z_j d/dx'

enum class CrVariant { Z, Zbar };
enum class CrStructure { standard, hat };

struct CrOperatorChoice {
  CrVariant variant = CrVariant::Zbar;
  int axis = 1;  // 1-based
  CrStructure structure = CrStructure::standard;
};

inline constexpr int boundary_band = 2;

inline bool is_interior(const GridSpec& g, std::size_t s) {
  for (int i : g.spatial_multi(s))
    if (i < boundary_band || i > g.spatial_points - 1 - boundary_band) return false;
  return true;
}

namespace detail {

inline void require_fd_grid(const GridSpec& g) {
  if (g.rule != QuadratureRule::uniform_trapezoid)
    throw UsageError("apply_cr: finite differences need a uniform grid");
  if (g.spatial_points < 2 * boundary_band + 1) throw UsageError("apply_cr: need at least 5 nodes per spatial axis");
}

/// 4th-order centered derivative along spatial axis a; zero on the boundary band.
inline std::vector<cplx> fd_axis(const std::vector<cplx>& v, const GridSpec& g, int a, std::size_t inner) {
  const int M = g.spatial_points;
  const int dims = g.spatial_dims();
  std::size_t stride = inner;
  for (int k = a + 1; k < dims; ++k) stride *= M;
  const double h = g.spatial_step();
  std::vector<cplx> out(v.size(), 0.0);
  const std::size_t total = v.size();
  const std::size_t span = stride * M;
  for (std::size_t base = 0; base < total; base += span)
    for (std::size_t r = 0; r < stride; ++r)
      for (int i = boundary_band; i < M - boundary_band; ++i) {
        const std::size_t p = base + r + static_cast<std::size_t>(i) * stride;
        out[p] = (-v[p + 2 * stride] + 8.0 * v[p + stride] - 8.0 * v[p - stride] + v[p - 2 * stride]) / (12.0 * h);
      }
  return out;
}

/// Exact derivative in x' of a field that is a trigonometric polynomial on the periodic vertical grid.
inline std::vector<cplx> vertical_derivative(const ScalarField& f) {
  const GridSpec& g = f.grid;
  const int N = g.vertical_points;
  std::vector<cplx> buf = f.values;
  fft::batch(buf, N, static_cast<int>(g.spatial_size()), fft::Direction::forward);
  const double dt = g.freq_step();
  for (std::size_t p = 0; p < g.spatial_size(); ++p)
    for (int m = 0; m < N; ++m) {
      const int k = m < N / 2 ? m : (m == N / 2 ? 0 : m - N);
      const double eta = (m == N / 2) ? 0.0 : k * dt;
      buf[p * N + m] *= cplx(0, eta) / static_cast<double>(N);
    }
  fft::batch(buf, N, static_cast<int>(g.spatial_size()), fft::Direction::backward);
  return buf;
}

inline double structure_lambda(const LambdaSignature& sig, int j, CrStructure st) {
  return st == CrStructure::hat ? std::abs(sig[j]) : sig[j];
}

inline ScalarField apply_cr_with(const ScalarField& field, const CrOperatorChoice& op, const LambdaSignature& sig,
                                 const std::vector<cplx>& dv) {
  const GridSpec& g = field.grid;
  const int j = op.axis - 1;
  const int N = g.vertical_points;
  const auto dx = fd_axis(field.values, g, 2 * j, N);
  const auto dy = fd_axis(field.values, g, 2 * j + 1, N);
  const double l = structure_lambda(sig, j, op.structure);
  const Rule1D ax = g.spatial_axis();
  ScalarField out(g);
  for (std::size_t s = 0; s < g.spatial_size(); ++s) {
    if (!is_interior(g, s)) continue;
    const auto idx = g.spatial_multi(s);
    const cplx z(ax.nodes[idx[2 * j]], ax.nodes[idx[2 * j + 1]]);
    for (int v = 0; v < N; ++v) {
      const std::size_t p = s * N + v;
      if (op.variant == CrVariant::Z)
        out.values[p] = 0.5 * (dx[p] - cplx(0, 1) * dy[p]) - cplx(0, l) * std::conj(z) * dv[p];
      else
        out.values[p] = 0.5 * (dx[p] + cplx(0, 1) * dy[p]) + cplx(0, l) * z * dv[p];
    }
  }
  return out;
}

}  // namespace detail

/// Applies Z_j or Zbar_j: 4th-order centered differences on the spatial axes, exact
/// (spectral) derivative on the periodic vertical axis. The boundary band is left at 0.
inline ScalarField apply_cr(const ScalarField& field, const CrOperatorChoice& op, const LambdaSignature& sig) {
  const GridSpec& g = field.grid;
  detail::require_fd_grid(g);
  if (sig.n() != g.n) throw UsageError("apply_cr: signature/grid dimension mismatch");
  if (op.axis < 1 || op.axis > g.n) throw UsageError("apply_cr: axis out of range");
  return detail::apply_cr_with(field, op, sig, detail::vertical_derivative(field));
}

/// Weighted L^2 norm over interior nodes.
inline double interior_norm(const ScalarField& f) {
  const GridSpec& g = f.grid;
  const auto w = spatial_weights(g);
  const int N = g.vertical_points;
  double acc = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) {
    if (!is_interior(g, s)) continue;
    double row = 0.0;
    for (int v = 0; v < N; ++v) row += std::norm(f.values[s * N + v]);
    acc += w[s] * row;
  }
  return std::sqrt(acc * g.vertical_step());
}

struct CrResidual {
  double absolute = 0.0;
  double relative = 0.0;  // absolute / interior norm of the component (0 for a zero component)
};

/// Residual of a scalar field against Z_j u = 0 (j in J), Zbar_j u = 0 (j not in J).
inline CrResidual cr_residual(const ScalarField& u, const MultiIndex& J, const LambdaSignature& sig,
                              CrStructure st = CrStructure::standard) {
  detail::require_fd_grid(u.grid);
  if (sig.n() != u.grid.n) throw UsageError("cr_residual: signature/grid dimension mismatch");
  const auto dv = detail::vertical_derivative(u);
  double acc = 0.0;
  for (int j = 1; j <= sig.n(); ++j) {
    const CrOperatorChoice op{J.contains(j) ? CrVariant::Z : CrVariant::Zbar, j, st};
    const double r = interior_norm(detail::apply_cr_with(u, op, sig, dv));
    acc += r * r;
  }
  CrResidual res;
  res.absolute = std::sqrt(acc);
  const double un = interior_norm(u);
  res.relative = un > 0 ? res.absolute / un : 0.0;
  return res;
}

inline std::map<MultiIndex, CrResidual> cr_system_residual(const FormField& u, const LambdaSignature& sig) {
  std::map<MultiIndex, CrResidual> out;
  for (const auto& [J, f] : u.components) out[J] = cr_residual(f, J, sig);
  return out;
}

/// Slice-wise residual of (d/dz_j + l_j conj(z_j) eta) for j in J and (d/dzbar_j - l_j z_j eta)
/// otherwise, eta = -t, aggregated with frequency weights; relative to the interior norm of the input.
inline double frequency_cr_residual(const FrequencyField& freq, const MultiIndex& J, const LambdaSignature& sig) {
  const GridSpec& g = freq.grid;
  detail::require_fd_grid(g);
  if (sig.n() != g.n) throw UsageError("frequency_cr_residual: signature/grid dimension mismatch");
  const auto w = spatial_weights(g);
  const Rule1D ax = g.spatial_axis();
  const std::size_t S = g.spatial_size();
  double res = 0.0, ref = 0.0;
  for (const auto& sl : freq.slices) {
    const double eta = -sl.t;
    std::vector<double> acc(S, 0.0);
    for (int j = 0; j < g.n; ++j) {
      const auto dx = detail::fd_axis(sl.values, g, 2 * j, 1);
      const auto dy = detail::fd_axis(sl.values, g, 2 * j + 1, 1);
      const bool inJ = J.contains(j + 1);
      for (std::size_t s = 0; s < S; ++s) {
        if (!is_interior(g, s)) continue;
        const auto idx = g.spatial_multi(s);
        const cplx z(ax.nodes[idx[2 * j]], ax.nodes[idx[2 * j + 1]]);
        const cplx r = inJ ? 0.5 * (dx[s] - cplx(0, 1) * dy[s]) + sig[j] * std::conj(z) * eta * sl.values[s]
                           : 0.5 * (dx[s] + cplx(0, 1) * dy[s]) - sig[j] * z * eta * sl.values[s];
        acc[s] += std::norm(r);
      }
    }
    for (std::size_t s = 0; s < S; ++s) {
      if (!is_interior(g, s)) continue;
      res += w[s] * acc[s];
      ref += w[s] * std::norm(sl.values[s]);
    }
  }
  return ref > 0 ? std::sqrt(res / ref) : 0.0;
}

// ---------------------------------------------------------------------------
// Component extraction

namespace detail {
inline FormField extract(const FormField& u, const MultiIndex& J) {
  FormField out(J.size(), u.grid);
  if (u.q == J.size()) {
    auto it = u.components.find(J);
    if (it != u.components.end()) out.components[J] = it->second;
  }
  return out;
}
}  // namespace detail

/// The component indexed by the negative axes (empty index when there are none).
inline FormField tau_minus(const FormField& u, const LambdaSignature& sig) {
  if (sig.degenerate()) throw UsageError("tau_minus: degenerate signature");
  return detail::extract(u, j_minus(sig));
}

/// The component indexed by the positive axes; the scalar part when every lambda is negative.
inline FormField tau_plus(const FormField& u, const LambdaSignature& sig) {
  if (sig.degenerate()) throw UsageError("tau_plus: degenerate signature");
  return detail::extract(u, j_plus(sig));
}

// ---------------------------------------------------------------------------

enum class ReflectBlock { minus_block, plus_block };

/// minus_block conjugates the negative axes; plus_block conjugates the positive axes and
/// reverses x'. Both are exact involutions on symmetric grids.
inline ScalarField reflect_to_hat(const ScalarField& field, ReflectBlock which, const LambdaSignature& sig) {
  if (sig.degenerate()) throw UsageError("reflect_to_hat: degenerate signature");
  const GridSpec& g = field.grid;
  if (sig.n() != g.n) throw UsageError("reflect_to_hat: signature/grid dimension mismatch");
  const int M = g.spatial_points, N = g.vertical_points, n = g.n;
  std::vector<bool> flip(n);
  for (int j = 0; j < n; ++j) flip[j] = which == ReflectBlock::minus_block ? sig[j] < 0 : sig[j] > 0;
  const bool reverse = which == ReflectBlock::plus_block;
  ScalarField out(g);
  const std::size_t S = g.spatial_size();
  for (std::size_t s = 0; s < S; ++s) {
    auto idx = g.spatial_multi(s);
    for (int j = 0; j < n; ++j)
      if (flip[j]) idx[2 * j + 1] = M - 1 - idx[2 * j + 1];
    std::size_t src = 0;
    for (int i : idx) src = src * M + i;
    for (int v = 0; v < N; ++v) out.values[s * N + v] = field.values[src * N + (reverse ? (N - v) % N : v)];
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Why the projector vanishes identically in degree q, if it does.
inline std::optional<std::string> vanishing_reason(int q, const LambdaSignature& sig) {
  if (sig.degenerate()) return "some lambda_j = 0: the Hardy space is trivial in every degree";
  if (q != sig.n_minus() && q != sig.n_plus())
    return "q = " + std::to_string(q) + " is neither n_- = " + std::to_string(sig.n_minus()) + " nor n_+ = " +
           std::to_string(sig.n_plus()) + ": the Hardy space is trivial";
  return std::nullopt;
}

/// Szego projection of a (0,q)-form. Each active branch extracts its component,
/// reflects it to the |lambda| structure, runs the scalar pipeline there and reflects
/// back. Components outside {J_-, J_+} come back as exact zeros.
inline FormField szego_project_form(const FormField& u, const LambdaSignature& sig, const PipelineOptions& opt = {}) {
  if (sig.n() != u.grid.n) throw UsageError("szego_project_form: signature/grid dimension mismatch");
  FormField out(u.q, u.grid);
  for (const auto& [J, f] : u.components) out.components[J] = ScalarField(u.grid);
  if (vanishing_reason(u.q, sig)) return out;

  const LambdaSignature hat = sig.absolute();
  require_budget(truncation_budget(u.grid, hat, opt.truncation_budget));
  auto branch = [&](const MultiIndex& J, ReflectBlock block) {
    auto it = u.components.find(J);
    if (it == u.components.end()) return;
    const ScalarField v = reflect_to_hat(it->second, block, sig);
    out.components[J] = reflect_to_hat(scalar_pipeline_project(v, hat, opt), block, sig);
  };
  if (u.q == sig.n_minus()) branch(j_minus(sig), ReflectBlock::minus_block);
  if (u.q == sig.n_plus()) branch(j_plus(sig), ReflectBlock::plus_block);
  return out;
}

// ---------------------------------------------------------------------------

/// All multi-exponents of length n with total degree <= d, graded then lexicographic.
inline std::vector<std::vector<int>> exponents_up_to(int n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  for (int deg = 0; deg <= d; ++deg) {
    std::function<void(int, int)> rec = [&](int j, int left) {
      if (j == n - 1) {
        a[j] = left;
        out.push_back(a);
        return;
      }
      for (int k = left; k >= 0; --k) {
        a[j] = k;
        rec(j + 1, left - k);
      }
    };
    rec(0, deg);
  }
  return out;
}

struct VanishingEntry {
  MultiIndex J;
  int eta_sign = 1;
  bool any_finite = false;
};

struct VanishingReport {
  int q = 0;
  std::vector<VanishingEntry> entries;
  bool predicted_trivial = false;  // degenerate or q not in {n_-, n_+}
  bool all_infinite() const {
    for (const auto& e : entries)
      if (e.any_finite) return false;
    return true;
  }
  bool consistent() const { return !predicted_trivial || all_infinite(); }
};

inline VanishingReport vanishing_evidence(int q, const LambdaSignature& sig, int max_degree = 2) {
  VanishingReport rep;
  rep.q = q;
  rep.predicted_trivial = vanishing_reason(q, sig).has_value();
  const auto alphas = exponents_up_to(sig.n(), max_degree);
  for (const auto& J : all_multiindices(sig.n(), q))
    for (int es : {1, -1}) {
      VanishingEntry e{J, es, false};
      for (const auto& a : alphas)
        if (monomial_integral(a, es * 1.0, SignedWeightPattern{sig, J}).finite) e.any_finite = true;
      rep.entries.push_back(e);
    }
  return rep;
}

}  // namespace szego
