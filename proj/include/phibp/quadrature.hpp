#pragma once
// One-dimensional adaptive Gauss-Kronrod quadrature plus a Cauchy-integral
// derivative rule.  Multi-dimensional integrals in this codebase are nested
// calls of the 1-D routine (the integrands are cheap smooth tensor products,
// so nesting is simpler and more predictable than a cubature scheme).

#include <complex>
#include <functional>

namespace phibp {

struct QuadratureOptions {
  double abs_tol = 1e-10;  // per-axis absolute tolerance
  int max_depth = 20;      // bisection levels before giving up

  // Substitution exponent for integrate_semi_infinite: the integral is
  // evaluated in t with x = t^power.  power > 1 flattens an integrable
  // x^(e-1) singularity at the origin (choose power >= 1/e); power = 1 is the
  // identity.
  double power = 1.0;

  // If true, failing to meet abs_tol within max_depth raises
  // std::runtime_error instead of returning the best-effort value.  Nested
  // (oracle) integrals keep the default: their inner noise floor would make
  // hard failure spurious.
  bool throw_on_max_depth = false;
};

// Integral of f over the finite interval [a, b] by adaptive bisection of the
// (7, 15) Gauss-Kronrod pair.  Interval halves are accepted when the
// Gauss/Kronrod discrepancy drops below the local tolerance share.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt = {});

// Integral of f over [0, inf), mapped to (0, 1) via u = t / (1 + t) after the
// optional power substitution x = t^power.  All Kronrod nodes are interior, so
// f is never evaluated at 0 or at infinity.
double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureOptions& opt = {});

// n-th derivative of an analytic function at `center` from the Cauchy integral
// formula, discretized by the M-point trapezoid rule on a circle of the given
// radius:
//
//   f^(n)(c) = n! / (M r^n) * sum_k Re[ F(c + r e^{i phi_k}) e^{-i n phi_k} ]
//
// The trapezoid rule on a periodic analytic integrand converges geometrically,
// so modest M (a few hundred) reaches near machine precision.  F must be
// analytic on the closed disk; the radius therefore has to stay inside the
// domain of analyticity (for Laplace exponents: r < c keeps Re(z) > 0).
double contour_derivative(
    const std::function<std::complex<double>(std::complex<double>)>& F,
    double center, int order, double radius, int points = 512);

}  // namespace phibp
