#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <gsl/gsl_integration.h>

namespace szego {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

/// Bad arguments, malformed input, precondition violations.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A numerical budget (truncation, resolution) the grid does not meet.
struct BudgetError : UsageError {
  BudgetError(std::string name, const std::string& what)
      : UsageError("budget '" + name + "' violated: " + what), budget(std::move(name)) {}
  std::string budget;
};

// ---------------------------------------------------------------------------
// LambdaSignature

class LambdaSignature {
 public:
  LambdaSignature() = default;
  explicit LambdaSignature(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
    if (lambdas_.empty()) throw UsageError("LambdaSignature: need at least one lambda");
    for (double l : lambdas_) {
      if (!std::isfinite(l)) throw UsageError("LambdaSignature: non-finite lambda");
      if (l < 0) ++n_minus_;
      else if (l > 0) ++n_plus_;
      else degenerate_ = true;
    }
    // negatives first, stable; positions are 0-based user axes
    for (int j = 0; j < n(); ++j)
      if (lambdas_[j] < 0) order_.push_back(j);
    for (int j = 0; j < n(); ++j)
      if (lambdas_[j] >= 0) order_.push_back(j);
  }

  int n() const { return static_cast<int>(lambdas_.size()); }
  const std::vector<double>& lambdas() const { return lambdas_; }
  double operator[](int j) const { return lambdas_[j]; }
  int n_minus() const { return n_minus_; }
  int n_plus() const { return n_plus_; }
  bool degenerate() const { return degenerate_; }
  bool all_positive() const { return n_plus_ == n(); }

  /// canonical_order()[k] is the user axis placed at canonical slot k.
  const std::vector<int>& canonical_order() const { return order_; }

  LambdaSignature absolute() const {
    std::vector<double> a(lambdas_);
    for (double& l : a) l = std::abs(l);
    return LambdaSignature(std::move(a));
  }

  double abs_product() const {
    double p = 1.0;
    for (double l : lambdas_) p *= std::abs(l);
    return p;
  }
  double min_abs() const {
    double m = std::abs(lambdas_[0]);
    for (double l : lambdas_) m = std::min(m, std::abs(l));
    return m;
  }
  double max_abs() const {
    double m = 0.0;
    for (double l : lambdas_) m = std::max(m, std::abs(l));
    return m;
  }

 private:
  std::vector<double> lambdas_;
  int n_minus_ = 0;
  int n_plus_ = 0;
  bool degenerate_ = false;
  std::vector<int> order_;
};

// ---------------------------------------------------------------------------
// HeisenbergPoint

struct HeisenbergPoint {
  std::vector<cplx> z;
  double x_last = 0.0;
  int n() const { return static_cast<int>(z.size()); }
};

// ---------------------------------------------------------------------------
// MultiIndex (1-based entries, strictly increasing)

class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> e) : MultiIndex(std::vector<int>(e)) {}
  explicit MultiIndex(std::vector<int> e) : entries_(std::move(e)) {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (entries_[k] < 1) throw UsageError("MultiIndex: entries start at 1");
      if (k > 0 && entries_[k] <= entries_[k - 1])
        throw UsageError("MultiIndex: entries must be strictly increasing");
    }
  }

  const std::vector<int>& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool contains(int j) const { return std::binary_search(entries_.begin(), entries_.end(), j); }
  int max_entry() const { return entries_.empty() ? 0 : entries_.back(); }

  std::string str() const {
    std::string s = "(";
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(entries_[k]);
    }
    return s + ")";
  }

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> entries_;
};

inline MultiIndex multiindex_complement(const MultiIndex& J, int n) {
  if (J.max_entry() > n) throw UsageError("multiindex_complement: entry " + std::to_string(J.max_entry()) + " > n");
  std::vector<int> c;
  for (int j = 1; j <= n; ++j)
    if (!J.contains(j)) c.push_back(j);
  return MultiIndex(std::move(c));
}

/// All strictly increasing multi-indices of length q over {1..n}, lexicographic.
inline std::vector<MultiIndex> all_multiindices(int n, int q) {
  std::vector<MultiIndex> out;
  if (q < 0 || q > n) return out;
  std::vector<int> cur(q);
  for (int k = 0; k < q; ++k) cur[k] = k + 1;
  while (true) {
    out.emplace_back(cur);
    int k = q - 1;
    while (k >= 0 && cur[k] == n - q + k + 1) --k;
    if (k < 0) break;
    ++cur[k];
    for (int m = k + 1; m < q; ++m) cur[m] = cur[m - 1] + 1;
  }
  return out;
}

/// Axes with negative lambda, as a MultiIndex in user labels.
inline MultiIndex j_minus(const LambdaSignature& sig) {
  std::vector<int> e;
  for (int j = 0; j < sig.n(); ++j)
    if (sig[j] < 0) e.push_back(j + 1);
  return MultiIndex(std::move(e));
}

inline MultiIndex j_plus(const LambdaSignature& sig) { return multiindex_complement(j_minus(sig), sig.n()); }

// ---------------------------------------------------------------------------
// Quadrature nodes

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with m points on [a, b].
inline Rule1D gauss_legendre(int m, double a, double b) {
  if (m < 1) throw UsageError("gauss_legendre: need at least one point");
  gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(m));
  if (!tab) throw std::runtime_error("gauss_legendre: table allocation failed");
  Rule1D r;
  r.nodes.resize(m);
  r.weights.resize(m);
  for (int i = 0; i < m; ++i) gsl_integration_glfixed_point(a, b, i, &r.nodes[i], &r.weights[i], tab);
  gsl_integration_glfixed_table_free(tab);
  return r;
}

/// Composite Gauss-Legendre over consecutive breakpoints.
inline Rule1D composite_gauss_legendre(const std::vector<double>& breaks, int order) {
  const Rule1D ref = gauss_legendre(order, -1.0, 1.0);
  Rule1D r;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    if (!(b > a)) continue;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      r.nodes.push_back(c + h * ref.nodes[i]);
      r.weights.push_back(h * ref.weights[i]);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// GridSpec

enum class QuadratureRule { uniform_trapezoid, gauss_legendre };

inline std::string to_string(QuadratureRule r) {
  return r == QuadratureRule::uniform_trapezoid ? "uniform-trapezoid" : "gauss-legendre";
}

inline QuadratureRule quadrature_rule_from_string(const std::string& s) {
  if (s == "uniform-trapezoid") return QuadratureRule::uniform_trapezoid;
  if (s == "gauss-legendre") return QuadratureRule::gauss_legendre;
  throw UsageError("unknown quadrature rule '" + s + "'");
}

/// Tensor grid over C^n x R. Spatial axes are ordered (Re z1, Im z1, Re z2, ...),
/// each with spatial_points nodes on [-R, R]. The vertical axis is periodic:
/// x_j = -R_v + j h_v, j < vertical_points. The frequency axis is the discrete
/// dual of the vertical one (spacing pi / R_v); freq_max is the band edge.
struct GridSpec {
  int n = 1;
  double spatial_radius = 6.0;
  int spatial_points = 49;
  double vertical_radius = 8.0;
  int vertical_points = 32;
  double freq_max = 3.0;
  int freq_points = 0;  // 0: same as vertical_points, the only admissible value
  QuadratureRule rule = QuadratureRule::uniform_trapezoid;

  void validate() const {
    if (n < 1) throw UsageError("grid: n must be >= 1");
    if (spatial_points < 2 || vertical_points < 2) throw UsageError("grid: point counts must be >= 2");
    if (vertical_points % 2 != 0) throw UsageError("grid: vertical_points must be even");
    if (!(spatial_radius > 0) || !(vertical_radius > 0)) throw UsageError("grid: radii must be > 0");
    if (!(freq_max > 0)) throw UsageError("grid: freq_max must be > 0");
    if (freq_points != 0 && freq_points != vertical_points)
      throw UsageError("grid: freq_points must equal vertical_points (the frequency axis is the dual of the vertical axis)");
    if (freq_max >= nyquist())
      throw UsageError("grid: freq_max must lie below the Nyquist frequency " + std::to_string(nyquist()));
  }

  int spatial_dims() const { return 2 * n; }
  std::size_t spatial_size() const {
    std::size_t s = 1;
    for (int a = 0; a < spatial_dims(); ++a) s *= static_cast<std::size_t>(spatial_points);
    return s;
  }
  std::size_t size() const { return spatial_size() * static_cast<std::size_t>(vertical_points); }

  double vertical_step() const { return 2.0 * vertical_radius / vertical_points; }
  double freq_step() const { return pi / vertical_radius; }
  double nyquist() const { return 0.5 * vertical_points * freq_step(); }

  /// One real spatial axis (nodes and 1-D weights, no measure factor).
  Rule1D spatial_axis() const {
    const int M = spatial_points;
    const double R = spatial_radius;
    if (rule == QuadratureRule::gauss_legendre) return gauss_legendre(M, -R, R);
    Rule1D r;
    r.nodes.resize(M);
    r.weights.assign(M, 2.0 * R / (M - 1));
    for (int i = 0; i < M; ++i) r.nodes[i] = -R + 2.0 * R * i / (M - 1);
    r.weights.front() *= 0.5;
    r.weights.back() *= 0.5;
    return r;
  }
  double spatial_step() const { return 2.0 * spatial_radius / (spatial_points - 1); }

  std::vector<double> vertical_nodes() const {
    std::vector<double> x(vertical_points);
    for (int j = 0; j < vertical_points; ++j) x[j] = -vertical_radius + j * vertical_step();
    return x;
  }

  /// Frequency node of slice s, ascending: t_s = (s - N/2 + 1) * dt.
  double freq_node(int s) const { return (s - vertical_points / 2 + 1) * freq_step(); }
  std::vector<double> freq_nodes() const {
    std::vector<double> t(vertical_points);
    for (int s = 0; s < vertical_points; ++s) t[s] = freq_node(s);
    return t;
  }

  /// Multi-index (one entry per spatial axis) of a flat spatial index, axis 0 slowest.
  std::vector<int> spatial_multi(std::size_t s) const {
    std::vector<int> idx(spatial_dims());
    for (int a = spatial_dims() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(s % spatial_points);
      s /= spatial_points;
    }
    return idx;
  }

  bool operator==(const GridSpec&) const = default;
};

/// Full spatial coordinates of every spatial node, z[s*n + j].
inline std::vector<cplx> spatial_coordinates(const GridSpec& g) {
  const Rule1D ax = g.spatial_axis();
  const std::size_t S = g.spatial_size();
  std::vector<cplx> z(S * g.n);
  for (std::size_t s = 0; s < S; ++s) {
    auto idx = g.spatial_multi(s);
    for (int j = 0; j < g.n; ++j) z[s * g.n + j] = cplx(ax.nodes[idx[2 * j]], ax.nodes[idx[2 * j + 1]]);
  }
  return z;
}

// ---------------------------------------------------------------------------
// Volume weights. The 2^n factor of the Heisenberg volume form enters here and
// nowhere else: consumers obtain it through these functions or SeparableWeights.

inline double measure_factor(int n) { return std::ldexp(1.0, n); }

/// Per-axis 1-D weights together with the measure factor; the spatial weight of
/// a node is measure * prod_a axis[a][i_a].
struct SeparableWeights {
  std::vector<double> axis;
  double measure = 1.0;
};

inline SeparableWeights separable_weights(const GridSpec& g) {
  return SeparableWeights{g.spatial_axis().weights, measure_factor(g.n)};
}

/// Spatial-only weight (the measure on C^n) at a flat spatial index.
inline double spatial_volume_weight(const GridSpec& g, std::size_t s) {
  if (s >= g.spatial_size()) throw UsageError("volume_weight: spatial index out of range");
  const auto w = g.spatial_axis().weights;
  double v = measure_factor(g.n);
  for (int i : g.spatial_multi(s)) v *= w[i];
  return v;
}

/// Weight of a full grid node (spatial index s, vertical index v) on H_{n+1}.
inline double volume_weight(const GridSpec& g, std::size_t s, int v) {
  if (v < 0 || v >= g.vertical_points) throw UsageError("volume_weight: vertical index out of range");
  return spatial_volume_weight(g, s) * g.vertical_step();
}

/// All spatial weights in flat order.
inline std::vector<double> spatial_weights(const GridSpec& g) {
  const auto w = g.spatial_axis().weights;
  const std::size_t S = g.spatial_size();
  std::vector<double> out(S);
  for (std::size_t s = 0; s < S; ++s) {
    double v = measure_factor(g.n);
    for (int i : g.spatial_multi(s)) v *= w[i];
    out[s] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fields. Layout: values[s * vertical_points + v], spatial index s major.

struct ScalarField {
  GridSpec grid;
  std::vector<cplx> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g) : grid(g), values(g.size()) {}
  ScalarField(const GridSpec& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw UsageError("ScalarField: extents do not match grid");
  }

  cplx& at(std::size_t s, int v) { return values[s * grid.vertical_points + v]; }
  const cplx& at(std::size_t s, int v) const { return values[s * grid.vertical_points + v]; }
};

/// Discrete L^2(H_{n+1}) inner product <u, v> = sum u conj(v) dmu.
inline cplx inner(const ScalarField& u, const ScalarField& v) {
  if (!(u.grid == v.grid)) throw UsageError("inner: grid mismatch");
  const auto w = spatial_weights(u.grid);
  const int N = u.grid.vertical_points;
  cplx acc = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) {
    cplx row = 0.0;
    for (int k = 0; k < N; ++k) row += u.values[s * N + k] * std::conj(v.values[s * N + k]);
    acc += w[s] * row;
  }
  return acc * u.grid.vertical_step();
}

inline double norm(const ScalarField& u) { return std::sqrt(std::max(0.0, inner(u, u).real())); }

inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid == b.grid)) throw UsageError("field difference: grid mismatch");
  ScalarField r(a.grid);
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] = a.values[i] - b.values[i];
  return r;
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid == b.grid)) throw UsageError("field sum: grid mismatch");
  ScalarField r(a.grid);
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] = a.values[i] + b.values[i];
  return r;
}

/// A (0,q)-form of fixed degree. Absent components are zero.
struct FormField {
  int q = 0;
  GridSpec grid;
  std::map<MultiIndex, ScalarField> components;

  FormField() = default;
  FormField(int degree, const GridSpec& g) : q(degree), grid(g) {}

  void set(const MultiIndex& J, ScalarField f) {
    if (J.size() != q) throw UsageError("FormField: component " + J.str() + " has wrong length for degree " + std::to_string(q));
    if (J.max_entry() > grid.n) throw UsageError("FormField: component " + J.str() + " exceeds n");
    if (!(f.grid == grid)) throw UsageError("FormField: component grid mismatch");
    components[J] = std::move(f);
  }

  /// Component J, or a zero field if absent.
  ScalarField get(const MultiIndex& J) const {
    auto it = components.find(J);
    return it == components.end() ? ScalarField(grid) : it->second;
  }
};

/// Component-wise sum of scalar inner products.
inline cplx inner(const FormField& u, const FormField& v) {
  if (u.q != v.q || !(u.grid == v.grid)) throw UsageError("inner: form mismatch");
  cplx acc = 0.0;
  for (const auto& [J, f] : u.components) {
    auto it = v.components.find(J);
    if (it != v.components.end()) acc += inner(f, it->second);
  }
  return acc;
}

inline double norm(const FormField& u) { return std::sqrt(std::max(0.0, inner(u, u).real())); }

inline FormField operator-(const FormField& a, const FormField& b) {
  if (a.q != b.q || !(a.grid == b.grid)) throw UsageError("form difference: mismatch");
  FormField r(a.q, a.grid);
  for (const auto& [J, f] : a.components) r.components[J] = f - b.get(J);
  for (const auto& [J, f] : b.components)
    if (!a.components.count(J)) r.components[J] = ScalarField(a.grid) - f;
  return r;
}

struct FrequencySlice {
  double t = 0.0;
  std::vector<cplx> values;  // over the spatial multi-grid
};

/// Slices ordered by ascending t, matching GridSpec::freq_nodes().
struct FrequencyField {
  GridSpec grid;
  std::vector<FrequencySlice> slices;
};

}  // namespace szego
