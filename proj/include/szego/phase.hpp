#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"

namespace szego {

enum class PhaseChoice { minus, plus, hat };

inline std::string to_string(PhaseChoice c) {
  switch (c) {
    case PhaseChoice::minus: return "minus";
    case PhaseChoice::plus: return "plus";
    default: return "hat";
  }
}

namespace detail {
inline void check_dims(const HeisenbergPoint& x, const HeisenbergPoint& y, const LambdaSignature& sig) {
  if (x.n() != sig.n() || y.n() != sig.n())
    throw UsageError("dimension mismatch: points have n=" + std::to_string(x.n()) + "," + std::to_string(y.n()) +
                     ", signature has n=" + std::to_string(sig.n()));
}
}  // namespace detail

/// phi_-(x,y) = -x' + y' + i sum |l||z-w|^2 + i sum l (conj(z) w - z conj(w)),
/// phi_+ flips the vertical sign and the antisymmetric term, hat uses |l| in both.
inline cplx phase(PhaseChoice choice, const HeisenbergPoint& x, const HeisenbergPoint& y, const LambdaSignature& sig) {
  detail::check_dims(x, y, sig);
  double quad = 0.0;  // sum |l| |z-w|^2
  double anti = 0.0;  // sum l * 2 Im(conj(z) w); i l (zbar w - z wbar) = -2 l Im(zbar w)
  for (int j = 0; j < sig.n(); ++j) {
    const double l = choice == PhaseChoice::hat ? std::abs(sig[j]) : sig[j];
    quad += std::abs(sig[j]) * std::norm(x.z[j] - y.z[j]);
    anti += l * 2.0 * (std::conj(x.z[j]) * y.z[j]).imag();
  }
  const double dv = y.x_last - x.x_last;
  if (choice == PhaseChoice::plus) return cplx(-dv + anti, quad);
  return cplx(dv - anti, quad);
}

/// m! s^{-(m+1)}, principal branch.
inline cplx gamma_moment(int m, cplx s) {
  if (m < 0) throw UsageError("gamma_moment: m must be >= 0");
  if (!(s.real() > 0)) throw std::domain_error("gamma_moment: Re s must be > 0");
  return std::tgamma(m + 1.0) * std::pow(s, -(m + 1.0));
}

/// |l_1 ... l_n| / (2 pi^{n+1})
inline double szego_constant(const LambdaSignature& sig) {
  return sig.abs_product() / (2.0 * std::pow(pi, sig.n() + 1));
}

inline cplx szego_kernel_scalar(const HeisenbergPoint& x, const HeisenbergPoint& y, const LambdaSignature& sig,
                                PhaseChoice choice, double epsilon) {
  if (!(epsilon > 0)) throw UsageError("szego_kernel_scalar: epsilon must be > 0");
  if (sig.degenerate()) throw std::domain_error("szego_kernel_scalar: degenerate signature, the kernel vanishes");
  const cplx ph = phase(choice, x, y, sig);
  const int n = sig.n();
  return szego_constant(sig) * std::tgamma(n + 1.0) * std::pow(cplx(0, -1) * (ph + cplx(0, epsilon)), -(n + 1.0));
}

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1] in long double (Newton on P_m).
inline void gauss_legendre_ld(int m, std::vector<long double>& x, std::vector<long double>& w) {
  x.assign(m, 0.0L);
  w.assign(m, 0.0L);
  const long double pl = 3.141592653589793238462643383279502884L;
  for (int i = 0; i < (m + 1) / 2; ++i) {
    long double z = std::cos(pl * (i + 0.75L) / (m + 0.5L)), dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0L);
      const long double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-19L) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0L / ((1.0L - z * z) * dp * dp);
  }
}

}  // namespace detail

/// Composite Gauss-Legendre for int_0^T t^m e^{-s t} dt, panels of fixed order.
inline cplx laplace_moment_quadrature(int m, cplx s, double t_max, int t_points) {
  if (!(t_max > 0) || t_points < 1) throw UsageError("laplace_moment_quadrature: need t_max > 0 and t_points >= 1");
  constexpr int order = 16;
  const int panels = (t_points + order - 1) / order;
  std::vector<long double> rx, rw;
  detail::gauss_legendre_ld(order, rx, rw);
  // Long double throughout, including the reference rule and panel maps: for |Im s| >> Re s
  // the terms cancel by many orders of magnitude and node rounding at large t shows up as phase error.
  using lcplx = std::complex<long double>;
  const lcplx sl(s.real(), s.imag());
  const long double h = static_cast<long double>(t_max) / panels;
  lcplx acc = 0.0L;
  for (int p = 0; p < panels; ++p) {
    const long double mid = (p + 0.5L) * h;
    for (int i = 0; i < order; ++i) {
      const long double t = mid + 0.5L * h * rx[i];
      acc += 0.5L * h * rw[i] * std::pow(t, m) * std::exp(-sl * t);
    }
  }
  return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
}

/// Truncation length T with tail int_T^inf t^m e^{-a t} dt below 1e-16 of |m! s^{-(m+1)}|.
inline double laplace_truncation(int m, cplx s) {
  const double a = s.real();
  const double target = 1e-16 * std::tgamma(m + 1.0) * std::pow(std::abs(s), -(m + 1.0));
  double T = (8.0 + 2.0 * m) / a;
  for (int k = 0; k < 200 && std::pow(T, m) * std::exp(-a * T) / a * (1.0 + m / (a * T)) > target; ++k) T *= 1.1;
  return T;
}

/// int_0^inf t^m e^{-s t} dt along the ray t = r e^{-i arg s}, where the integrand
/// r^m e^{-|s| r} no longer oscillates (Cauchy; valid for Re s > 0). On the real axis
/// the same integral has condition number (|s| / Re s)^{m+1}.
inline cplx laplace_moment_ray(int m, cplx s) {
  if (m < 0) throw UsageError("laplace_moment_ray: m must be >= 0");
  if (!(s.real() > 0)) throw std::domain_error("laplace_moment_ray: Re s must be > 0");
  const double a = std::abs(s);
  const double R = laplace_truncation(m, cplx(a, 0.0));
  const cplx v = laplace_moment_quadrature(m, cplx(a, 0.0), R, 16 * (static_cast<int>(std::ceil(a * R / 4.0)) + 8));
  return v * std::exp(cplx(0.0, -(m + 1) * std::arg(s)));
}

/// Panel count that resolves the oscillation e^{-i Im(s) t} over [0, T].
inline int laplace_points(cplx s, double T) {
  const double periods = std::abs(s.imag()) * T / (2.0 * pi);
  const double decays = s.real() * T;
  const int panels = static_cast<int>(std::ceil(2.0 * periods + decays / 4.0)) + 8;
  return 16 * panels;
}

struct FioResult {
  cplx value;
  bool tail_warning = false;  // t_max (Im phi + eps) < 20
};

/// c0 int_0^{t_max} e^{i t phi} t^n e^{-eps t} dt by composite Gauss-Legendre.
inline FioResult fio_quadrature(const HeisenbergPoint& x, const HeisenbergPoint& y, const LambdaSignature& sig,
                                PhaseChoice choice, double epsilon, double t_max, int t_points) {
  if (!(epsilon > 0)) throw UsageError("fio_quadrature: epsilon must be > 0");
  const cplx ph = phase(choice, x, y, sig);
  const cplx s = cplx(epsilon, 0) - cplx(0, 1) * ph;  // e^{i t phi - eps t} = e^{-s t}
  FioResult r;
  r.value = szego_constant(sig) * laplace_moment_quadrature(sig.n(), s, t_max, t_points);
  r.tail_warning = t_max * s.real() < 20.0;
  return r;
}

/// fio_quadrature with t_max and node count chosen from the phase.
inline FioResult fio_quadrature(const HeisenbergPoint& x, const HeisenbergPoint& y, const LambdaSignature& sig,
                                PhaseChoice choice, double epsilon) {
  if (!(epsilon > 0)) throw UsageError("fio_quadrature: epsilon must be > 0");
  const cplx ph = phase(choice, x, y, sig);
  const cplx s = cplx(epsilon, 0) - cplx(0, 1) * ph;
  const double T = laplace_truncation(sig.n(), s);
  return fio_quadrature(x, y, sig, choice, epsilon, T, laplace_points(s, T));
}

}  // namespace szego
