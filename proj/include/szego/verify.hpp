#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bergman.hpp"
#include "config.hpp"
#include "core.hpp"
#include "direct.hpp"
#include "forms.hpp"
#include "parallel.hpp"
#include "phase.hpp"
#include "transform.hpp"

// Verification suite: thirteen criteria, one report line each. Lines carry
// measured values and the budgets that gate them and nothing run-dependent
// (no timings, no worker counts), so reports compare byte for byte.

namespace szego {

struct Check {
  std::string name;
  double measured = 0.0;
  double budget = 0.0;
  bool at_least = false;  // pass iff measured >= budget (default: measured <= budget)
  bool ok() const { return std::isfinite(measured) && (at_least ? measured >= budget : measured <= budget); }
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::string error;  // non-empty: the criterion could not be evaluated
  bool ok() const {
    if (!error.empty() || checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok(); });
  }
};

struct Report {
  std::vector<CriterionResult> criteria;
  bool ok() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.ok(); });
  }
  std::string str() const;
};

inline std::string format_line(const CriterionResult& c) {
  char head[64];
  std::snprintf(head, sizeof head, "C%02d %s %s", c.id, c.ok() ? "PASS" : "FAIL", c.title.c_str());
  std::string line = head;
  for (const auto& k : c.checks) {
    char buf[160];
    std::snprintf(buf, sizeof buf, " %s=%.3e%s%.3e", k.name.c_str(), k.measured, k.at_least ? ">=" : "<=", k.budget);
    line += buf;
  }
  if (!c.error.empty()) line += " error=\"" + c.error + "\"";
  return line;
}

inline std::string Report::str() const {
  std::string out;
  int passed = 0;
  for (const auto& c : criteria) {
    out += format_line(c) + "\n";
    passed += c.ok();
  }
  out += "SUMMARY " + std::to_string(passed) + "/" + std::to_string(criteria.size()) + " " + (ok() ? "PASS" : "FAIL") + "\n";
  return out;
}

namespace verify_detail {

using Rng = std::mt19937_64;

inline double uniform(Rng& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }
inline cplx gauss_c(Rng& r) {
  std::normal_distribution<double> d(0.0, 1.0);
  const double re = d(r);
  const double im = d(r);
  return {re, im};
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Complex white noise under a Gaussian spatial envelope exp(-|z|^2 / width^2).
inline ScalarField random_field(const GridSpec& g, Rng& rng, double width = 1.0) {
  ScalarField f(g);
  const auto z = spatial_coordinates(g);
  const int N = g.vertical_points;
  for (std::size_t s = 0; s < g.spatial_size(); ++s) {
    double r2 = 0.0;
    for (int j = 0; j < g.n; ++j) r2 += std::norm(z[s * g.n + j]);
    const double env = std::exp(-r2 / (width * width));
    for (int v = 0; v < N; ++v) f.at(s, v) = env * gauss_c(rng);
  }
  return f;
}

inline FormField random_form(int q, const GridSpec& g, Rng& rng) {
  FormField u(q, g);
  for (const auto& J : all_multiindices(g.n, q)) u.set(J, random_field(g, rng));
  return u;
}

inline GridSpec grid_n1(const RunConfig& c) {
  if (c.grid.n == 1) return c.grid;
  return GridSpec{};
}

inline LambdaSignature sig_n1(const RunConfig& c) {
  if (c.sig.n() == 1 && !c.sig.degenerate()) return c.sig.absolute();
  return LambdaSignature({1.0});
}

inline HeisenbergPoint random_point(Rng& r, int n, double zr, double xr) {
  HeisenbergPoint x;
  for (int j = 0; j < n; ++j) x.z.emplace_back(uniform(r, -zr, zr), uniform(r, -zr, zr));
  x.x_last = uniform(r, -xr, xr);
  return x;
}

inline double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

inline double rel_norm_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

// ---------------------------------------------------------------------------

inline CriterionResult c01_gamma(const RunConfig& cfg, Rng& rng) {
  CriterionResult r{1, "gamma-moment", {}, {}};
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const cplx s(uniform(rng, 0.2, 5.0), uniform(rng, -10.0, 10.0));
    for (int m = 0; m <= 6; ++m) worst = std::max(worst, rel(laplace_moment_ray(m, s), gamma_moment(m, s)));
  }
  r.checks.push_back({"max_rel_err", worst, cfg.tol("gamma_moment")});
  return r;
}

inline CriterionResult c02_fio(const RunConfig& cfg, Rng& rng) {
  CriterionResult r{2, "closed-form-vs-fio", {}, {}};
  const std::vector<LambdaSignature> sigs{LambdaSignature({1.0}), LambdaSignature({-1.0, 2.0})};
  const PhaseChoice choices[3] = {PhaseChoice::minus, PhaseChoice::plus, PhaseChoice::hat};
  double worst = 0.0;
  for (const auto& sig : sigs)
    for (double eps : {0.25, 1.0})
      for (int k = 0; k < 100; ++k) {
        const auto x = random_point(rng, sig.n(), 1.5, 3.0);
        const auto y = random_point(rng, sig.n(), 1.5, 3.0);
        const PhaseChoice ch = choices[k % 3];
        const cplx closed = szego_kernel_scalar(x, y, sig, ch, eps);
        const cplx quad = fio_quadrature(x, y, sig, ch, eps).value;
        worst = std::max(worst, rel(quad, closed));
      }
  r.checks.push_back({"max_rel_err", worst, cfg.tol("fio_agreement")});
  return r;
}

inline CriterionResult c03_phase(const RunConfig& cfg, Rng& rng) {
  CriterionResult r{3, "phase-identities", {}, {}};
  double sym = 0.0, neg_im = 0.0, diag = 0.0;
  double off_min = 1.0;  // smallest Im phi / |z-w|^2 over off-diagonal samples
  for (int k = 0; k < 1000; ++k) {
    const int n = 1 + k % 3;
    std::vector<double> l(n);
    for (double& v : l) v = (uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0) * uniform(rng, 0.2, 3.0);
    const LambdaSignature sig(l);
    const auto x = random_point(rng, n, 2.0, 5.0);
    auto y = random_point(rng, n, 2.0, 5.0);
    const bool on_diag = k % 10 == 0;
    if (on_diag) y.z = x.z;
    const cplx pm = phase(PhaseChoice::minus, x, y, sig);
    const cplx pp = phase(PhaseChoice::plus, x, y, sig);
    const cplx pmr = phase(PhaseChoice::minus, y, x, sig);
    const double scale = 1.0 + std::abs(pm);
    sym = std::max({sym, std::abs(pp + std::conj(pm)) / scale, std::abs(pp - pmr) / scale});
    for (auto ch : {PhaseChoice::minus, PhaseChoice::plus, PhaseChoice::hat}) {
      const double im = phase(ch, x, y, sig).imag();
      neg_im = std::max(neg_im, -im);
      if (on_diag) diag = std::max(diag, std::abs(im));
      else {
        double d2 = 0.0;
        for (int j = 0; j < n; ++j) d2 += std::norm(x.z[j] - y.z[j]);
        off_min = std::min(off_min, im / (sig.min_abs() * d2));
      }
    }
  }
  const double tol = cfg.tol("phase_identity");
  r.checks.push_back({"symmetry", sym, tol});
  r.checks.push_back({"negative_im", neg_im, tol});
  r.checks.push_back({"diagonal_im", diag, tol});
  // Im phi >= min|l| |z-w|^2, so the ratio is at least 1 away from the diagonal.
  r.checks.push_back({"offdiag_im_ratio", off_min, 1.0 - tol, true});
  return r;
}

inline CriterionResult c04_reproducing(const RunConfig& cfg, Rng& rng) {
  CriterionResult r{4, "gaussian-reproducing", {}, {}};
  double worst = 0.0;
  for (int n : {1, 2}) {
    const LambdaSignature sig = n == 1 ? LambdaSignature({1.0}) : LambdaSignature({1.0, 2.0});
    GridSpec g;
    g.n = n;
    g.rule = QuadratureRule::gauss_legendre;
    g.spatial_radius = 8.0;
    g.spatial_points = 160;
    for (const auto& alpha : exponents_up_to(n, 4))
      for (double t : {0.5, 1.0, 2.0}) {
        std::vector<cplx> z;
        for (int j = 0; j < n; ++j) z.emplace_back(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
        const Polynomial p{{{cplx(1.0, 0.0), alpha}}};
        const auto [lhs, rhs] = gaussian_reproducing_check(p, z, t, sig, g);
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
      }
  }
  r.checks.push_back({"max_scaled_err", worst, cfg.tol("gaussian_reproducing")});
  return r;
}

inline CriterionResult c05_slice(const RunConfig& cfg, Rng& rng) {
  CriterionResult r{5, "bergman-slice", {}, {}};
  const GridSpec g = grid_n1(cfg);
  const LambdaSignature sig = sig_n1(cfg);
  require_budget(truncation_budget(g, sig, cfg.tol("gaussian_truncation")));
  const auto z = spatial_coordinates(g);
  const std::size_t S = g.spatial_size();
  double repro = 0.0, annih = 0.0, contr = -1.0, idem = 0.0;
  for (int s = 0; s < g.vertical_points; ++s) {
    const double t = g.freq_node(s);
    if (!(t > 0 && t <= g.freq_max * (1 + 1e-12))) continue;
    const WeightSpec w{sig, t};
    for (int a = 0; a <= 2; ++a) {
      FrequencySlice hol{t, std::vector<cplx>(S)}, anti{t, std::vector<cplx>(S)};
      for (std::size_t p = 0; p < S; ++p) {
        const double e = std::exp(-t * sig[0] * std::norm(z[p]));
        hol.values[p] = std::pow(z[p], a) * e;
        anti.values[p] = std::pow(std::conj(z[p]), a + 1) * e;
      }
      const auto ph = bergman_project(hol, w, g);
      repro = std::max(repro, rel_norm_diff(ph.values, hol.values));
      const double an = slice_norm(anti.values, g);
      annih = std::max(annih, slice_norm(bergman_project(anti, w, g).values, g) / an);
    }
    FrequencySlice noise{t, std::vector<cplx>(S)};
    for (std::size_t p = 0; p < S; ++p) noise.values[p] = std::exp(-std::norm(z[p])) * gauss_c(rng);
    const auto p1 = bergman_project(noise, w, g);
    const auto p2 = bergman_project(p1, w, g);
    const double n0 = slice_norm(noise.values, g), n1 = slice_norm(p1.values, g);
    contr = std::max(contr, n1 / n0 - 1.0);
    double d = 0.0;
    for (std::size_t p = 0; p < S; ++p) d += spatial_volume_weight(g, p) * std::norm(p2.values[p] - p1.values[p]);
    idem = std::max(idem, std::sqrt(d) / n1);
  }
  r.checks.push_back({"reproduction", repro, cfg.tol("slice_reproduction")});
  r.checks.push_back({"annihilation", annih, cfg.tol("slice_annihilation")});
  r.checks.push_back({"contraction_excess", contr, cfg.tol("slice_contraction")});
  r.checks.push_back({"idempotency", idem, cfg.tol("slice_idempotency")});
  return r;
}

inline CriterionResult c06_parseval(const RunConfig& cfg, Rng& rng) {
  CriterionResult r{6, "parseval", {}, {}};
  const GridSpec g = grid_n1(cfg);
  const double dt = freq_weight(g);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const ScalarField u = random_field(g, rng, 2.0), v = random_field(g, rng, 2.0);
    const FrequencyField U = partial_ft(u), V = partial_ft(v);
    cplx uu = 0.0, uv = 0.0;
    for (std::size_t s = 0; s < U.slices.size(); ++s) {
      uu += dt * slice_inner(U.slices[s].values, U.slices[s].values, g);
      uv += dt * slice_inner(U.slices[s].values, V.slices[s].values, g);
    }
    const cplx ref_uu = 2.0 * pi * inner(u, u), ref_uv = 2.0 * pi * inner(u, v);
    worst = std::max(worst, rel(uu, ref_uu));
    worst = std::max(worst, std::abs(uv - ref_uv) / (2.0 * pi * norm(u) * norm(v)));
  }
  r.checks.push_back({"max_rel_err", worst, cfg.tol("parseval")});
  return r;
}

inline CriterionResult c07_hardy(const RunConfig& cfg, int jobs) {
  CriterionResult r{7, "hardy-reproduction", {}, {}};
  const GridSpec g = grid_n1(cfg);
  const LambdaSignature sig = sig_n1(cfg);
  PipelineOptions opt;
  opt.jobs = jobs;
  opt.truncation_budget = cfg.tol("gaussian_truncation");
  const double f = g.freq_max;
  // envelopes as fractions of the band edge
  const double env[5][2] = {{0.17, 0.83}, {0.23, 0.93}, {0.33, 1.0}, {0.1, 0.5}, {0.17, 0.67}};
  const int alpha[5] = {0, 1, 2, 1, 2};
  double repro = 0.0, negf = 0.0;
  for (int k = 0; k < 5; ++k) {
    WavePacketSpec p;
    p.alpha = {alpha[k]};
    p.t_low = env[k][0] * f;
    p.t_high = env[k][1] * f;
    const ScalarField u = make_wave_packet(p, sig, g);
    repro = std::max(repro, norm(scalar_pipeline_project(u, sig, opt) - u) / norm(u));

    WavePacketSpec q = p;  // vertical frequency of the wrong sign
    q.sign = -1;
    q.control = true;
    const ScalarField un = make_wave_packet(q, sig, g);
    negf = std::max(negf, norm(scalar_pipeline_project(un, sig, opt)) / norm(un));
    q.control = false;  // solves the conjugate system, still negative frequency
    q.conjugated_axes = {1};
    const ScalarField uc = make_wave_packet(q, sig, g);
    negf = std::max(negf, norm(scalar_pipeline_project(uc, sig, opt)) / norm(uc));
  }
  r.checks.push_back({"reproduction", repro, cfg.tol("hardy_reproduction")});
  r.checks.push_back({"negative_frequency", negf, cfg.tol("negative_frequency")});
  return r;
}

inline CriterionResult c08_algebra(const RunConfig& cfg, Rng& rng, int jobs) {
  CriterionResult r{8, "projector-algebra", {}, {}};
  PipelineOptions opt;
  opt.jobs = jobs;
  opt.truncation_budget = cfg.tol("gaussian_truncation");
  double idem = 0.0, adj = 0.0;
  auto record = [&](const FormField& u, const FormField& v, const LambdaSignature& sig) {
    const FormField pu = szego_project_form(u, sig, opt);
    const FormField ppu = szego_project_form(pu, sig, opt);
    const FormField pv = szego_project_form(v, sig, opt);
    idem = std::max(idem, norm(ppu - pu) / norm(pu));
    adj = std::max(adj, std::abs(inner(pu, v) - inner(u, pv)) / (norm(u) * norm(v)));
  };
  const GridSpec g1 = grid_n1(cfg);
  const LambdaSignature s1 = sig_n1(cfg);
  for (int k = 0; k < 8; ++k) record(random_form(0, g1, rng), random_form(0, g1, rng), s1);
  const GridSpec& g2 = cfg.grid2;
  const LambdaSignature mixed({-1.0, 1.0}), neg({-1.0, -1.0});
  record(random_form(1, g2, rng), random_form(1, g2, rng), mixed);
  record(random_form(2, g2, rng), random_form(2, g2, rng), neg);
  record(random_form(0, g2, rng), random_form(0, g2, rng), neg);
  r.checks.push_back({"idempotency", idem, cfg.tol("idempotency")});
  r.checks.push_back({"self_adjointness", adj, cfg.tol("self_adjointness")});
  return r;
}

inline CriterionResult c09_two_route(const RunConfig& cfg, Rng& rng, int jobs) {
  CriterionResult r{9, "two-route", {}, {}};
  const GridSpec g = grid_n1(cfg);
  const LambdaSignature sig = sig_n1(cfg);
  PipelineOptions opt;
  opt.jobs = jobs;
  opt.truncation_budget = cfg.tol("gaussian_truncation");
  require_budget(truncation_budget(g, sig, opt.truncation_budget));  // before the dense pairing

  std::vector<ScalarField> us, gs;
  for (int k = 0; k < 20; ++k) {
    us.push_back(random_field(g, rng));
    ScalarField v = random_field(g, rng);
    for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] = us.back().values[i] + 0.5 * v.values[i];
    gs.push_back(std::move(v));
  }
  const auto pairs = frequency_pairings(us, gs, sig);
  std::vector<double> err(us.size());
  for (std::size_t k = 0; k < us.size(); ++k) err[k] = rel(pairs[k], inner(scalar_pipeline_project(us[k], sig, opt), gs[k]));
  r.checks.push_back({"pairing_rel_err", max_of(err), cfg.tol("frequency_pairing")});

  // Direct quadrature with the closed-form kernel at several eps, extrapolated to eps = 0,
  // against the pipeline on a 9 x 9 spatial by (N + 1) vertical micro-grid.
  if ((g.spatial_points - 1) % 8 != 0) throw UsageError("direct route: spatial_points - 1 must be divisible by 8");
  DirectRouteOptions dopt;
  dopt.spatial_stride = (g.spatial_points - 1) / 8;
  dopt.jobs = jobs;
  WavePacketSpec p;
  p.alpha = {0};
  p.t_low = g.freq_max / 6.0;
  p.t_high = g.freq_max / 2.0;
  const ScalarField u = make_wave_packet(p, sig, g);
  const ScalarField pu = scalar_pipeline_project(u, sig, opt);
  const MicroGrid mg = micro_grid(g, dopt.spatial_stride);
  const std::vector<double> eps{0.6, 0.5, 0.4, 0.3, 0.2};
  std::vector<std::vector<cplx>> vals;
  for (double e : eps) vals.push_back(direct_kernel_project(u, sig, e, dopt));
  r.checks.push_back({"direct_rel_err", rel_norm_diff(extrapolate_to_zero(eps, vals), micro_samples(pu, mg)),
                      cfg.tol("direct_kernel")});
  return r;
}

inline FormField packet_form(int q, const GridSpec& g, const LambdaSignature& sig,
                             const std::vector<std::pair<MultiIndex, WavePacketSpec>>& parts) {
  FormField u(q, g);
  for (const auto& [J, p] : parts) u.set(J, make_wave_packet(p, sig, g));
  return u;
}

inline CriterionResult c10_forms(const RunConfig& cfg, Rng& rng, int jobs) {
  CriterionResult r{10, "form-projector", {}, {}};
  PipelineOptions opt;
  opt.jobs = jobs;
  opt.truncation_budget = cfg.tol("gaussian_truncation");
  const GridSpec& g = cfg.grid2;
  WavePacketSpec base;
  base.t_low = 0.3 * g.freq_max;
  base.t_high = g.freq_max;
  auto spec = [&](std::vector<int> alpha, std::vector<int> conj, int sign) {
    WavePacketSpec p = base;
    p.alpha = std::move(alpha);
    p.conjugated_axes = std::move(conj);
    p.sign = sign;
    return p;
  };
  double repro = 0.0;
  auto reproduce = [&](const FormField& u, const LambdaSignature& sig) {
    const FormField su = szego_project_form(u, sig, opt);
    for (const auto& [J, f] : u.components) repro = std::max(repro, norm(su.get(J) - f) / norm(f));
  };
  // lambda = (-1, 1), q = 1: both branches active, one packet per component
  const LambdaSignature mixed({-1.0, 1.0});
  reproduce(packet_form(1, g, mixed, {{MultiIndex{1}, spec({1, 0}, {1}, 1)}, {MultiIndex{2}, spec({0, 1}, {2}, -1)}}), mixed);
  // lambda = (-1, -1): q = 2 and q = 0 branches
  const LambdaSignature neg({-1.0, -1.0});
  reproduce(packet_form(2, g, neg, {{MultiIndex{1, 2}, spec({1, 1}, {1, 2}, 1)}}), neg);
  reproduce(packet_form(0, g, neg, {{MultiIndex{}, spec({0, 2}, {}, -1)}}), neg);
  r.checks.push_back({"component_reproduction", repro, cfg.tol("form_reproduction")});

  // Exact zeros: cross components at n = 3 and a degree outside {n_-, n_+}.
  double cross = 0.0;
  GridSpec g3;
  g3.n = 3;
  g3.spatial_radius = 5.0;
  g3.spatial_points = 9;
  g3.vertical_radius = 2.0 * pi;
  g3.vertical_points = 4;
  g3.freq_max = 0.5;
  const LambdaSignature s3({-1.0, 1.0, 1.0});
  const FormField u3 = random_form(1, g3, rng);
  const FormField su3 = szego_project_form(u3, s3, opt);
  for (const MultiIndex& J : {MultiIndex{2}, MultiIndex{3}})
    for (const cplx& v : su3.get(J).values) cross = std::max(cross, std::abs(v));
  const FormField u1 = random_form(1, g, rng);
  for (const auto& [J, f] : szego_project_form(u1, neg, opt).components)
    for (const cplx& v : f.values) cross = std::max(cross, std::abs(v));
  r.checks.push_back({"cross_component_max_abs", cross, 0.0});
  return r;
}

inline CriterionResult c11_vanishing(const RunConfig& cfg, int jobs) {
  CriterionResult r{11, "vanishing", {}, {}};
  int inconsistent = 0;
  // Infinite cases, keyed by the sorted (c_j, alpha_j) pairs that determine the integral.
  using Key = std::vector<std::pair<double, int>>;
  std::map<Key, std::pair<std::vector<int>, double>> divergent;  // key -> (alpha, eta) witness input
  std::map<Key, SignedWeightPattern> divergent_pattern;
  std::map<Key, std::pair<std::vector<int>, double>> finite;
  std::map<Key, SignedWeightPattern> finite_pattern;
  for (int n = 1; n <= 3; ++n) {
    int combos = 1;
    for (int j = 0; j < n; ++j) combos *= 3;
    for (int code = 0; code < combos; ++code) {
      std::vector<double> l(n);
      for (int j = 0, c = code; j < n; ++j, c /= 3) l[j] = static_cast<double>(c % 3) - 1.0;
      const LambdaSignature sig(l);
      for (int q = 0; q <= n; ++q) {
        const VanishingReport rep = vanishing_evidence(q, sig, 2);
        if (!rep.consistent()) ++inconsistent;
        const auto alphas = exponents_up_to(n, 2);
        for (const auto& J : all_multiindices(n, q))
          for (double eta : {1.0, -1.0})
            for (const auto& a : alphas) {
              const SignedWeightPattern pat{sig, J};
              Key key;
              for (int j = 0; j < n; ++j) key.emplace_back(2.0 * eta * pat.sign(j) * sig[j], a[j]);
              std::sort(key.begin(), key.end());
              if (monomial_integral(a, eta, pat).finite) {
                finite.emplace(key, std::make_pair(a, eta));
                finite_pattern.emplace(key, pat);
              } else {
                divergent.emplace(key, std::make_pair(a, eta));
                divergent_pattern.emplace(key, pat);
              }
            }
      }
    }
  }
  r.checks.push_back({"misclassified", static_cast<double>(inconsistent), 0.0});

  std::vector<Key> dkeys;
  for (const auto& [k, v] : divergent) dkeys.push_back(k);
  std::vector<double> ratio(dkeys.size());
  parallel_for(dkeys.size(), jobs, [&](std::size_t i) {
    const auto& [a, eta] = divergent.at(dkeys[i]);
    const auto& pat = divergent_pattern.at(dkeys[i]);
    const auto radii = default_witness_radii(a, eta, pat);
    const auto w = divergence_witness(a, eta, pat, {radii.front(), radii.back()});
    ratio[i] = w.back() / w.front();
  });
  double min_ratio = ratio.empty() ? 0.0 : ratio.front();
  for (double x : ratio) min_ratio = std::min(min_ratio, x);
  r.checks.push_back({"min_witness_ratio", min_ratio, cfg.tol("witness_ratio"), true});

  std::vector<Key> fkeys;
  for (const auto& [k, v] : finite) fkeys.push_back(k);
  std::vector<double> ferr(fkeys.size());
  parallel_for(fkeys.size(), jobs, [&](std::size_t i) {
    const auto& [a, eta] = finite.at(fkeys[i]);
    const auto& pat = finite_pattern.at(fkeys[i]);
    const double exact = monomial_integral(a, eta, pat).value;
    ferr[i] = std::abs(truncated_monomial_integral(a, eta, pat, 8.0) - exact) / exact;
  });
  r.checks.push_back({"finite_rel_err", max_of(ferr), cfg.tol("finite_quadrature")});
  return r;
}

inline GridSpec cr_grid(int points) {
  GridSpec g;
  g.n = 1;
  g.spatial_radius = 4.0;
  g.spatial_points = points;
  g.vertical_radius = 4.0 * pi / 3.0;  // dt = 0.75
  g.vertical_points = 16;
  g.freq_max = 1.0;  // one band node, t = 0.75
  return g;
}

inline double observed_order(const std::vector<double>& res) {
  double ord = 1e9;
  for (std::size_t k = 1; k < res.size(); ++k) ord = std::min(ord, std::log2(res[k - 1] / res[k]));
  return ord;
}

inline CriterionResult c12_cr(const RunConfig& cfg, Rng& rng, int jobs) {
  CriterionResult r{12, "cr-residual", {}, {}};
  PipelineOptions opt;
  opt.jobs = jobs;
  opt.truncation_budget = cfg.tol("gaussian_truncation");
  const LambdaSignature pos({1.0}), negl({-1.0});
  WavePacketSpec p;
  p.alpha = {1};
  p.t_low = 0.5;
  p.t_high = 1.0;
  WavePacketSpec pc = p;  // lambda = -1, component (1)
  pc.conjugated_axes = {1};
  // fixed random polynomial of degree <= 2 in (z, zbar) under e^{-|z|^2/2}, with vertical tones
  std::vector<cplx> coef(6), tone(3);
  for (auto& c : coef) c = gauss_c(rng);
  for (auto& c : tone) c = gauss_c(rng);

  std::vector<double> res_packet, res_conj, res_proj, res_freq, res_noise;
  for (int M : {17, 33, 65}) {
    const GridSpec g = cr_grid(M);
    const ScalarField u = make_wave_packet(p, pos, g);
    res_packet.push_back(cr_residual(u, MultiIndex{}, pos).relative);
    res_freq.push_back(frequency_cr_residual(partial_ft(u), MultiIndex{}, pos));
    res_conj.push_back(cr_residual(make_wave_packet(pc, negl, g), MultiIndex{1}, negl).relative);

    ScalarField f(g);
    const auto z = spatial_coordinates(g);
    const auto xv = g.vertical_nodes();
    for (std::size_t s = 0; s < g.spatial_size(); ++s) {
      const cplx zz = z[s], zb = std::conj(zz);
      const cplx poly = coef[0] + coef[1] * zz + coef[2] * zb + coef[3] * zz * zz + coef[4] * zz * zb + coef[5] * zb * zb;
      const cplx sp = poly * std::exp(-0.5 * std::norm(zz));
      for (int v = 0; v < g.vertical_points; ++v) {
        const double x = xv[v];
        f.at(s, v) = sp * (tone[0] * std::exp(cplx(0, -0.75 * x)) + tone[1] * std::exp(cplx(0, 0.75 * x)) + tone[2]);
      }
    }
    res_proj.push_back(cr_residual(scalar_pipeline_project(f, pos, opt), MultiIndex{}, pos).relative);
    res_noise.push_back(cr_residual(random_field(g, rng, 2.0), MultiIndex{}, pos).relative);
  }
  const double ord = std::min({observed_order(res_packet), observed_order(res_conj), observed_order(res_proj),
                               observed_order(res_freq)});
  const double fine = std::max({res_packet.back(), res_conj.back(), res_proj.back(), res_freq.back()});
  const double tol = cfg.tol("cr_residual");
  r.checks.push_back({"min_order", ord, cfg.tol("cr_order"), true});
  r.checks.push_back({"finest_residual", fine, tol});
  r.checks.push_back({"noise_over_tolerance", res_noise.back() / tol, cfg.tol("noise_factor"), true});
  return r;
}

/// Bytes of the outputs that depend on the worker count: pipeline slices, form
/// branches, direct-route rows and witness sweeps. Compared across job counts.
inline std::vector<cplx> determinism_probe(const RunConfig& cfg, int jobs) {
  Rng rng(cfg.seed ^ 0x5a5a5a5aULL);
  PipelineOptions opt;
  opt.jobs = jobs;
  opt.truncation_budget = cfg.tol("gaussian_truncation");
  std::vector<cplx> out;
  const GridSpec g1 = grid_n1(cfg);
  const LambdaSignature s1 = sig_n1(cfg);
  const ScalarField u = random_field(g1, rng);
  const auto pu = scalar_pipeline_project(u, s1, opt);
  out.insert(out.end(), pu.values.begin(), pu.values.end());
  const LambdaSignature mixed({-1.0, 1.0});
  const FormField f = random_form(1, cfg.grid2, rng);
  for (const auto& [J, c] : szego_project_form(f, mixed, opt).components) out.insert(out.end(), c.values.begin(), c.values.end());
  if ((g1.spatial_points - 1) % 8 == 0) {
    DirectRouteOptions d;
    d.spatial_stride = (g1.spatial_points - 1) / 8;
    d.jobs = jobs;
    d.vertical_upsample = 2;
    const auto dv = direct_kernel_project(u, s1, 0.5, d);
    out.insert(out.end(), dv.begin(), dv.end());
  }
  return out;
}

inline CriterionResult c13_determinism(const RunConfig& cfg, int jobs) {
  CriterionResult r{13, "determinism", {}, {}};
  const int other = jobs <= 1 ? 3 : 1;
  const auto a = determinism_probe(cfg, jobs);
  const auto c = determinism_probe(cfg, other);
  auto mismatches = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    if (x.size() != y.size()) return static_cast<double>(std::max(x.size(), y.size()));
    double m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) m += std::memcmp(&x[i], &y[i], sizeof(cplx)) != 0;
    return m;
  };
  r.checks.push_back({"jobs_mismatches", mismatches(a, c), 0.0});
  return r;
}

}  // namespace verify_detail

/// Runs every criterion. Each criterion draws from its own stream seeded by
/// (seed, criterion id), so one criterion's draws never shift another's.
inline Report run_verification(const RunConfig& cfg, int jobs, const std::function<void(const CriterionResult&)>& on_line = {}) {
  using namespace verify_detail;
  if (jobs <= 0) jobs = default_jobs();
  Report rep;
  auto run = [&](int id, const std::string& title, auto&& body) {
    CriterionResult c;
    Rng rng(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(id));
    try {
      c = body(rng);
    } catch (const std::exception& e) {
      c = CriterionResult{id, title, {}, e.what()};
    }
    c.id = id;
    c.title = title;
    rep.criteria.push_back(c);
    if (on_line) on_line(c);
  };
  run(1, "gamma-moment", [&](Rng& g) { return c01_gamma(cfg, g); });
  run(2, "closed-form-vs-fio", [&](Rng& g) { return c02_fio(cfg, g); });
  run(3, "phase-identities", [&](Rng& g) { return c03_phase(cfg, g); });
  run(4, "gaussian-reproducing", [&](Rng& g) { return c04_reproducing(cfg, g); });
  run(5, "bergman-slice", [&](Rng& g) { return c05_slice(cfg, g); });
  run(6, "parseval", [&](Rng& g) { return c06_parseval(cfg, g); });
  run(7, "hardy-reproduction", [&](Rng&) { return c07_hardy(cfg, jobs); });
  run(8, "projector-algebra", [&](Rng& g) { return c08_algebra(cfg, g, jobs); });
  run(9, "two-route", [&](Rng& g) { return c09_two_route(cfg, g, jobs); });
  run(10, "form-projector", [&](Rng& g) { return c10_forms(cfg, g, jobs); });
  run(11, "vanishing", [&](Rng&) { return c11_vanishing(cfg, jobs); });
  run(12, "cr-residual", [&](Rng& g) { return c12_cr(cfg, g, jobs); });
  run(13, "determinism", [&](Rng&) { return c13_determinism(cfg, jobs); });
  return rep;
}

}  // namespace szego
