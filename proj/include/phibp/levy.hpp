#pragma once
// Subordinator families and the exact quantities the rest of the library is
// built from: Laplace exponents psi, exponential cumulants psi^(c), partial
// Bell sums Xi^[n]_r, the mixed-truncated-Poisson count law, and total-mass
// samplers.
//
// Every family here is a special case of the generalized-gamma Levy density
//
//   tau(s) = theta * s^(-alpha-1) * exp(-zeta s) / Gamma(1-alpha),
//
// so internally a model is always the canonical triple (alpha, theta, zeta):
// Stable(alpha) = (alpha, alpha, 0) and Gamma(theta, zeta) = (0, theta, zeta).
// Probabilities and cumulants are handled in natural-log scale throughout;
// gamma-function ratios overflow doubles long before the sizes of interest.

#include <cstddef>
#include <span>
#include <vector>

#include "phibp/rng.hpp"

namespace phibp {

enum class Family { Stable, Gamma, GenGamma };

class LevyModel {
 public:
  static LevyModel stable(double alpha);                // 0 < alpha < 1
  static LevyModel gamma(double theta, double zeta);    // theta > 0, zeta > 0
  static LevyModel gen_gamma(double alpha, double theta, double zeta);

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double theta() const { return theta_; }
  double zeta() const { return zeta_; }

  // Same Levy density scaled by `factor` (theta -> factor * theta).
  LevyModel scaled(double factor) const;

  // Exponentially tilted density tau(s) * exp(-extra * s); stays in the
  // generalized-gamma class with zeta -> zeta + extra.
  LevyModel tilted(double extra) const;

 private:
  LevyModel(Family f, double a, double t, double z)
      : family_(f), alpha_(a), theta_(t), zeta_(z) {}
  Family family_;
  double alpha_, theta_, zeta_;
};

// Laplace exponent psi(g) = integral (1 - e^{-g s}) tau(s) ds:
//   alpha > 0: (theta/alpha) [(zeta+g)^alpha - zeta^alpha]
//   alpha = 0: theta log(1 + g/zeta)
double psi(const LevyModel& m, double g);

// log of the exponential cumulant psi^(c)(g) = integral s^c e^{-s g} tau(s) ds
//             = theta Gamma(c-alpha)/Gamma(1-alpha) (zeta+g)^(alpha-c),  c >= 1.
double psi_cumulant(const LevyModel& m, int c, double g);

// log tau(s).
double log_levy_density(const LevyModel& m, double s);

// Cumulants psi^(c)(g), c = 1..n_max, precomputed at one evaluation point.
class CumulantTable {
 public:
  CumulantTable(const LevyModel& m, double g, int n_max);
  double log_psi() const { return log_psi_; }
  double log_psi_c(int c) const;  // log psi^(c), 1 <= c <= n_max
  int n_max() const { return static_cast<int>(log_c_.size()); }
  double point() const { return g_; }
  const LevyModel& model() const { return model_; }

 private:
  LevyModel model_;
  double g_;
  double log_psi_;
  std::vector<double> log_c_;
};

// Partial Bell sums over the cumulants of one model at one point:
//
//   Xi^[n]_r(tau, g) = (n!/r!) * sum over ordered r-tuples (n_1..n_r),
//                      n_i >= 1, sum n_i = n, of prod_i psi^(n_i)(g)/n_i!
//
// computed through the triangular recurrence
//   A(n, r) = sum_{m=1}^{n-r+1} [psi^(m)/m!] A(n-m, r-1),   A(0,0) = 1,
//   Xi^[n]_r = (n!/r!) A(n, r),
// assembled with log-sum-exp.  Xi^[n]_r is the coefficient of lambda^r in
// Xi^[n](lambda tau, g), and
//
//   E[sigma(lambda)^n e^{-g sigma(lambda)}] = e^{-lambda psi(g)} Xi^[n](lambda tau, g).
class BellTable {
 public:
  BellTable(const LevyModel& m, double g, int n_max);

  double log_xi(int n, int r) const;  // log Xi^[n]_r, 1 <= r <= n <= n_max

  // log Xi^[n](lambda tau, g) = log sum_r lambda^r Xi^[n]_r; n = 0 gives 0.
  double log_xi_total(int n, double log_lambda = 0.0) const;

  const CumulantTable& cumulants() const { return cum_; }
  int n_max() const { return n_max_; }

 private:
  CumulantTable cum_;
  int n_max_;
  std::vector<double> log_a_;  // log A(n, r), row-major (n_max+1) x (n_max+1)
};

// Fills the Bell table up to order n at the point g.
BellTable xi_partial(const LevyModel& m, int n, double g);

// log E[sigma(lambda)^n e^{-g sigma(lambda)}]; n = 0 is -lambda psi(g).
double log_weighted_moment(const LevyModel& m, double lambda, int n, double g);

// Mixed truncated Poisson count law on c = 1, 2, ...:
//   P(c) = g^c psi^(c)(g) / (c! psi(g)).
// Stable models give the Sibuya(alpha) law (g drops out).
double mtp_pmf(const LevyModel& m, double g, long c);
double mtp_log_pmf(const LevyModel& m, double g, long c);

// Inverse-CDF sampler for the MtP law.  The pmf is tabulated by the ratio
// recurrence P(c+1)/P(c) = g (c - alpha) / ((c+1)(zeta+g)) until the captured
// mass reaches 1 - tail_eps or the table hits max_len (heavy Sibuya tails
// would otherwise need astronomically long tables), then renormalized.
class MtpSampler {
 public:
  MtpSampler(const LevyModel& m, double g, double tail_eps = 1e-12,
             std::size_t max_len = std::size_t{1} << 20);
  long draw(RngStream& rng) const;  // values >= 1
  std::span<const double> cdf() const { return cdf_; }

 private:
  std::vector<double> cdf_;
};

// One draw of the total mass sigma(lambda) (Laplace transform
// e^{-lambda psi(g)}).  Gamma family: exact Gamma(lambda theta, zeta).
// Stable: Kanter's positive-stable draw scaled by (lambda theta / alpha)^(1/alpha).
// Generalized gamma: rejection from the untilted stable draw with acceptance
// probability e^{-zeta s}; throws after max_attempts rejections (parameters
// with lambda theta zeta^alpha / alpha >> 1 are outside the intended range).
double sample_total_mass(const LevyModel& m, double lambda, RngStream& rng,
                         std::size_t max_attempts = 1000000);

}  // namespace phibp
