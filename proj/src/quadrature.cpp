#include "phibp/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace phibp {

namespace {

// (7, 15) Gauss-Kronrod abscissae and weights on [-1, 1] (positive half; the
// rule is symmetric).  Even-indexed abscissae carry the embedded 7-point Gauss
// rule.  These are the QUADPACK dqk15 constants.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
  double kronrod;
  double err;  // |kronrod - gauss|
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  const double fc = f(c);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double fl = f(c - h * kXgk[i]);
    const double fr = f(c + h * kXgk[i]);
    kron += kWgk[i] * (fl + fr);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fl + fr);
  }
  return {kron * h, std::abs(kron - gauss) * std::abs(h)};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth, const QuadratureOptions& opt) {
  const GkResult r = gk15(f, a, b);
  // The second acceptance clause is a machine-precision floor: halving the
  // tolerance share per level would otherwise demand err < eps eventually.
  if (r.err <= tol || r.err <= 1e-15 * std::abs(r.kronrod)) return r.kronrod;
  if (depth >= opt.max_depth) {
    if (opt.throw_on_max_depth)
      throw std::runtime_error(
          "integrate: tolerance not reached at max bisection depth");
    return r.kronrod;
  }
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, 0.5 * tol, depth + 1, opt) +
         adapt(f, m, b, 0.5 * tol, depth + 1, opt);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt) {
  if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
  if (a == b) return 0.0;
  return adapt(f, a, b, opt.abs_tol, 0, opt);
}

double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureOptions& opt) {
  if (!(opt.power >= 1.0))
    throw std::invalid_argument("integrate_semi_infinite: power must be >= 1");
  const double s = opt.power;
  // x = t^s, dx = s t^(s-1) dt; then t = u/(1-u), dt = du/(1-u)^2.
  auto g = [&](double u) {
    const double t = u / (1.0 - u);
    const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
    const double x = (s == 1.0) ? t : std::pow(t, s);
    const double pj = (s == 1.0) ? 1.0 : s * std::pow(t, s - 1.0);
    const double v = f(x) * pj * jac;
    return std::isfinite(v) ? v : 0.0;
  };
  return adapt(g, 0.0, 1.0, opt.abs_tol, 0, opt);
}

double contour_derivative(
    const std::function<std::complex<double>(std::complex<double>)>& F,
    double center, int order, double radius, int points) {
  if (radius <= 0.0 || points < 8)
    throw std::invalid_argument("contour_derivative: bad radius or node count");
  double acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const double phi = 2.0 * 3.14159265358979323846 * k / points;
    const std::complex<double> z{std::cos(phi), std::sin(phi)};
    const std::complex<double> val = F(center + radius * z);
    // Re[F(..) e^{-i n phi}]
    acc += val.real() * std::cos(order * phi) + val.imag() * std::sin(order * phi);
  }
  double nfac = 1.0;
  for (int i = 2; i <= order; ++i) nfac *= i;
  return nfac * acc / (points * std::pow(radius, order));
}

}  // namespace phibp
