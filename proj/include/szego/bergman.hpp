#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <gsl/gsl_sf_gamma.h>

#include "core.hpp"

namespace szego {

struct WeightSpec {
  LambdaSignature sig;  // all entries positive
  double t = 0.0;
};

/// Encodes sum_{k in J} l_k |z_k|^2 - sum_{k not in J} l_k |z_k|^2.
struct SignedWeightPattern {
  LambdaSignature sig;
  MultiIndex J;
  double sign(int j) const { return J.contains(j + 1) ? 1.0 : -1.0; }  // j 0-based
};

namespace detail {
inline void require_positive(const LambdaSignature& sig, const char* where) {
  if (!sig.all_positive()) throw UsageError(std::string(where) + ": all lambdas must be positive");
}
}  // namespace detail

inline cplx bergman_kernel(const std::vector<cplx>& z, const std::vector<cplx>& w, const WeightSpec& weight) {
  detail::require_positive(weight.sig, "bergman_kernel");
  const int n = weight.sig.n();
  if (static_cast<int>(z.size()) != n || static_cast<int>(w.size()) != n)
    throw UsageError("bergman_kernel: dimension mismatch");
  const double t = weight.t;
  if (t <= 0) return 0.0;
  cplx expo = 0.0;
  double pref = 1.0;
  for (int j = 0; j < n; ++j) {
    const double l = weight.sig[j];
    pref *= t * l / pi;
    expo += -t * l * std::norm(w[j] - z[j]) - t * l * (w[j] * std::conj(z[j]) - std::conj(w[j]) * z[j]);
  }
  return pref * std::exp(expo);
}

namespace detail {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Applies the axis-j factor of the kernel to a spatial array in place.
/// Per complex axis the kernel factorises (z = a+ib, w = c+id) as
///   e^{-tl(a-c)^2} e^{2itl cb} * e^{-tl(b-d)^2} e^{-2itl ad},
/// so the sum over c is a GEMM and the sum over d is diagonal in (a, b).
inline void apply_bergman_axis(std::vector<cplx>& data, int n, int j, const Rule1D& ax, double tl) {
  const int M = static_cast<int>(ax.nodes.size());
  const auto& x = ax.nodes;
  const auto& w = ax.weights;
  std::size_t pre = 1, post = 1;
  for (int k = 0; k < 2 * j; ++k) pre *= M;
  for (int k = 2 * (j + 1); k < 2 * n; ++k) post *= M;
  const std::size_t MM = static_cast<std::size_t>(M) * M;

  RowMat K1(MM, M);  // rows (a,b), cols c
  RowMat K2(MM, M);  // rows (a,b), cols d
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      for (int c = 0; c < M; ++c) {
        const double da = x[a] - x[c];
        K1(a * M + b, c) = w[c] * std::exp(cplx(-tl * da * da, 2.0 * tl * x[c] * x[b]));
        const double db = x[b] - x[c];
        K2(a * M + b, c) = (tl / pi) * w[c] * std::exp(cplx(-tl * db * db, -2.0 * tl * x[a] * x[c]));
      }

  const std::size_t block = MM * post;
  RowMat S(MM, static_cast<Eigen::Index>(M * post));
  for (std::size_t p = 0; p < pre; ++p) {
    cplx* X = data.data() + p * block;
    Eigen::Map<RowMat> Xp(X, M, static_cast<Eigen::Index>(M * post));
    S.noalias() = K1 * Xp;
    for (std::size_t ab = 0; ab < MM; ++ab) {
      cplx* out = X + ab * post;
      for (std::size_t r = 0; r < post; ++r) out[r] = 0.0;
      for (int d = 0; d < M; ++d) {
        const cplx k = K2(ab, d);
        const cplx* src = S.data() + ab * S.cols() + d * post;
        for (std::size_t r = 0; r < post; ++r) out[r] += k * src[r];
      }
    }
  }
}

}  // namespace detail

/// v(z) = int P_{t psi}(z, w) u(w) dmu(w) by tensor quadrature on the grid.
inline FrequencySlice bergman_project(const FrequencySlice& slice, const WeightSpec& weight, const GridSpec& grid) {
  detail::require_positive(weight.sig, "bergman_project");
  if (weight.sig.n() != grid.n) throw UsageError("bergman_project: signature/grid dimension mismatch");
  if (slice.values.size() != grid.spatial_size()) throw UsageError("bergman_project: slice extents do not match grid");
  FrequencySlice out{weight.t, std::vector<cplx>(grid.spatial_size(), 0.0)};
  if (weight.t <= 0) return out;
  const Rule1D ax = grid.spatial_axis();
  out.values = slice.values;
  for (int j = 0; j < grid.n; ++j) detail::apply_bergman_axis(out.values, grid.n, j, ax, weight.t * weight.sig[j]);
  const double mu = separable_weights(grid).measure;
  for (cplx& v : out.values) v *= mu;
  return out;
}

/// Discrete L^2(C^n) norm of a slice.
inline double slice_norm(const std::vector<cplx>& v, const GridSpec& grid) {
  const auto w = spatial_weights(grid);
  double acc = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) acc += w[s] * std::norm(v[s]);
  return std::sqrt(acc);
}

inline cplx slice_inner(const std::vector<cplx>& u, const std::vector<cplx>& v, const GridSpec& grid) {
  const auto w = spatial_weights(grid);
  cplx acc = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) acc += w[s] * u[s] * std::conj(v[s]);
  return acc;
}

// ---------------------------------------------------------------------------

/// Holomorphic polynomial sum_k coef_k z^{alpha_k}.
struct Polynomial {
  struct Term {
    cplx coef;
    std::vector<int> alpha;
  };
  std::vector<Term> terms;

  cplx operator()(const std::vector<cplx>& z) const {
    cplx acc = 0.0;
    for (const auto& t : terms) {
      cplx m = t.coef;
      for (std::size_t j = 0; j < t.alpha.size(); ++j) m *= std::pow(z[j], t.alpha[j]);
      acc += m;
    }
    return acc;
  }
};

/// (lhs, rhs) of the Gaussian reproducing identity at z; rhs by quadrature.
inline std::pair<cplx, cplx> gaussian_reproducing_check(const Polynomial& g, const std::vector<cplx>& z, double t,
                                                        const LambdaSignature& sig, const GridSpec& grid) {
  detail::require_positive(sig, "gaussian_reproducing_check");
  if (!(t > 0)) throw UsageError("gaussian_reproducing_check: t must be > 0");
  const int n = sig.n();
  if (grid.n != n || static_cast<int>(z.size()) != n) throw UsageError("gaussian_reproducing_check: dimension mismatch");
  for (const auto& term : g.terms)
    if (static_cast<int>(term.alpha.size()) != n) throw UsageError("gaussian_reproducing_check: exponent length != n");

  double r2 = 0.0;
  for (int j = 0; j < n; ++j) r2 += std::abs(sig[j]) * std::norm(z[j]);
  const cplx lhs = std::exp(-t * r2) * g(z);

  // The integrand factorises over complex axes, so each monomial is a product
  // of 2-D sums; the measure factor is applied once.
  const Rule1D ax = grid.spatial_axis();
  const int M = grid.spatial_points;
  int maxdeg = 0;
  for (const auto& term : g.terms)
    for (int a : term.alpha) maxdeg = std::max(maxdeg, a);
  std::vector<std::vector<cplx>> moment(n, std::vector<cplx>(maxdeg + 1, 0.0));
  for (int j = 0; j < n; ++j) {
    const double l = sig[j], al = std::abs(l);
    for (int c = 0; c < M; ++c)
      for (int d = 0; d < M; ++d) {
        const cplx w(ax.nodes[c], ax.nodes[d]);
        const cplx e = -t * al * std::norm(z[j] - w) - t * l * (std::conj(z[j]) * w - z[j] * std::conj(w)) - t * al * std::norm(w);
        cplx k = (t * al / pi) * ax.weights[c] * ax.weights[d] * std::exp(e);
        for (int a = 0; a <= maxdeg; ++a) {
          moment[j][a] += k;
          k *= w;
        }
      }
  }
  const double mu = separable_weights(grid).measure;
  cplx rhs = 0.0;
  for (const auto& term : g.terms) {
    cplx m = term.coef;
    for (int j = 0; j < n; ++j) m *= moment[j][term.alpha[j]];
    rhs += m;
  }
  return {lhs, mu * rhs};
}

// ---------------------------------------------------------------------------
// Monomial Gaussian integrals  I = int |z^alpha|^2 e^{-2 eta lt|z|^2} dmu(z)

struct MonomialIntegral {
  bool finite = false;
  double value = 0.0;  // meaningful only when finite
};

namespace detail {
inline std::vector<double> exponent_coefficients(const std::vector<int>& alpha, double eta, const SignedWeightPattern& p) {
  const int n = p.sig.n();
  if (static_cast<int>(alpha.size()) != n) throw UsageError("monomial_integral: exponent length != n");
  if (p.J.max_entry() > n) throw UsageError("monomial_integral: J exceeds n");
  for (int a : alpha)
    if (a < 0) throw UsageError("monomial_integral: negative exponent");
  std::vector<double> c(n);
  for (int j = 0; j < n; ++j) c[j] = 2.0 * eta * p.sign(j) * p.sig[j];
  return c;
}
}  // namespace detail

inline MonomialIntegral monomial_integral(const std::vector<int>& alpha, double eta, const SignedWeightPattern& pattern) {
  const auto c = detail::exponent_coefficients(alpha, eta, pattern);
  if (pattern.sig.degenerate()) return {};
  double v = 1.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (!(c[j] > 0)) return {};
    v *= 2.0 * pi * std::tgamma(alpha[j] + 1.0) / std::pow(c[j], alpha[j] + 1.0);
  }
  return {true, v};
}

namespace detail {

/// int_0^V r^a e^{-c r} dr
inline double radial_moment(int a, double c, double V) {
  if (V <= 0) return 0.0;
  if (c == 0) return std::pow(V, a + 1) / (a + 1);
  if (c > 0) return std::tgamma(a + 1.0) / std::pow(c, a + 1) * gsl_sf_gamma_inc_P(a + 1.0, c * V);
  // growing exponential: finite closed form, k = -c > 0
  const double k = -c;
  double acc = 0.0, fact = 1.0;  // a!/(a-m)!
  for (int m = 0; m <= a; ++m) {
    acc += ((m % 2) ? -1.0 : 1.0) * fact * std::pow(V, a - m) / std::pow(k, m + 1);
    fact *= (a - m);
  }
  double tail = std::tgamma(a + 1.0) / std::pow(k, a + 1);
  return std::exp(k * V) * acc - ((a % 2) ? -1.0 : 1.0) * tail;
}

/// Breakpoints on [0, U] graded geometrically toward both ends.
inline std::vector<double> graded_breaks(double U) {
  std::vector<double> lo{0.0};
  double h = std::min(U / 2, 0.05);
  while (h < U / 2) {
    lo.push_back(h);
    h *= 2.0;
  }
  std::vector<double> b = lo;
  b.push_back(U / 2);
  for (auto it = lo.rbegin(); it != lo.rend(); ++it) b.push_back(U - *it);
  return b;
}

/// int over {sum r_j <= U, r_j >= 0} of prod_{j >= level} r_j^{a_j} e^{-c_j r_j}.
inline double simplex_integral(const std::vector<int>& a, const std::vector<double>& c, std::size_t level, double U) {
  if (U <= 0) return 0.0;
  if (level + 1 == a.size()) return radial_moment(a[level], c[level], U);
  const Rule1D r = composite_gauss_legendre(graded_breaks(U), 12);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double x = r.nodes[i];
    acc += r.weights[i] * std::pow(x, a[level]) * std::exp(-c[level] * x) * simplex_integral(a, c, level + 1, U - x);
  }
  return acc;
}

}  // namespace detail

/// Integral over the ball |z| <= R (no finiteness precondition).
inline double truncated_monomial_integral(const std::vector<int>& alpha, double eta, const SignedWeightPattern& pattern,
                                          double R) {
  const auto c = detail::exponent_coefficients(alpha, eta, pattern);
  const int n = pattern.sig.n();
  // polar coordinates per axis: dmu = 2^n prod dx dy = (2 pi)^n prod d(|z_j|^2) after the angles
  return std::pow(2.0 * pi, n) * detail::simplex_integral(alpha, c, 0, R * R);
}

/// Radius sweep used by the verification suite.
inline std::vector<double> default_witness_radii(const std::vector<int>& alpha, double eta, const SignedWeightPattern& pattern) {
  const auto c = detail::exponent_coefficients(alpha, eta, pattern);
  for (double cj : c)
    if (cj < 0) return {1, 2, 3, 4, 5};
  return {1, 2, 3, 4, 5, 10, 20, 30, 40, 50};
}

inline std::vector<double> divergence_witness(const std::vector<int>& alpha, double eta, const SignedWeightPattern& pattern,
                                              const std::vector<double>& radii) {
  if (monomial_integral(alpha, eta, pattern).finite) throw UsageError("divergence_witness: integral is finite");
  std::vector<double> out;
  double prev = 0.0;
  for (double R : radii) {
    if (!(R > prev)) throw UsageError("divergence_witness: radii must be positive and increasing");
    prev = R;
    out.push_back(truncated_monomial_integral(alpha, eta, pattern, R));
  }
  return out;
}

}  // namespace szego
