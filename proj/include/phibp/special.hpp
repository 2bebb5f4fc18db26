#pragma once
// Scalar special functions and log-domain helpers used throughout the library.
// Everything here is deterministic, allocation-free, and safe to call from
// multiple threads.

#include <cstddef>
#include <limits>
#include <span>

namespace phibp {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double log_neg_inf =
    -std::numeric_limits<double>::infinity();  // identity element of log_add_exp

// Natural log of |Gamma(x)| via the Lanczos approximation (g = 7, 9 terms),
// with the reflection formula for x < 0.5.  Accurate to ~1e-13 relative over
// the ranges used here; throws std::invalid_argument at non-positive integers.
double log_gamma(double x);

// log(exp(a) + exp(b)) without overflow; -inf acts as zero.
double log_add_exp(double a, double b);

// log(sum_i exp(v_i)); returns -inf on an empty span.
double log_sum_exp(std::span<const double> v);

// log of the binomial coefficient C(n, k).
double log_choose(double n, double k);

// Rising factorial (a)_n = a (a+1) ... (a+n-1) as a plain product, valid for
// any real a (including negative) and small n.  (a)_0 = 1.
double rising_factorial(double a, int n);

// log of (a)_n for a > 0, via log-gamma differences (stable for large n).
double log_rising(double a, int n);

// Regularized lower/upper incomplete gamma functions P(a,x) and Q(a,x),
// P + Q = 1.  Series expansion for x < a+1, continued fraction otherwise.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with `dof` degrees of
// freedom: P(X > x).
double chi_square_sf(double x, double dof);

// Asymptotic Kolmogorov-Smirnov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1}
// exp(-2 k^2 lambda^2), used to turn sqrt(n)*D_n into an approximate p-value.
double kolmogorov_sf(double lambda);

// Neumaier-compensated accumulator for alternating or cancellation-prone sums.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace phibp
