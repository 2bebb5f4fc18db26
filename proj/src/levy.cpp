#include "phibp/levy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "phibp/special.hpp"

namespace phibp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

LevyModel LevyModel::stable(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("LevyModel::stable: requires 0 < alpha < 1");
  return LevyModel(Family::Stable, alpha, alpha, 0.0);
}

LevyModel LevyModel::gamma(double theta, double zeta) {
  if (!(theta > 0.0) || !(zeta > 0.0))
    throw std::invalid_argument("LevyModel::gamma: requires theta > 0, zeta > 0");
  return LevyModel(Family::Gamma, 0.0, theta, zeta);
}

LevyModel LevyModel::gen_gamma(double alpha, double theta, double zeta) {
  if (!(alpha >= 0.0 && alpha < 1.0) || !(theta > 0.0) || !(zeta >= 0.0) ||
      (alpha == 0.0 && zeta == 0.0))
    throw std::invalid_argument(
        "LevyModel::gen_gamma: requires 0 <= alpha < 1, theta > 0, zeta >= 0, "
        "and not (alpha = 0 and zeta = 0)");
  return LevyModel(Family::GenGamma, alpha, theta, zeta);
}

LevyModel LevyModel::scaled(double factor) const {
  if (!(factor > 0.0))
    throw std::invalid_argument("LevyModel::scaled: factor must be positive");
  LevyModel m = *this;
  m.theta_ *= factor;
  if (m.family_ == Family::Stable && factor != 1.0) m.family_ = Family::GenGamma;
  return m;
}

LevyModel LevyModel::tilted(double extra) const {
  if (!(extra >= 0.0))
    throw std::invalid_argument("LevyModel::tilted: tilt must be nonnegative");
  LevyModel m = *this;
  m.zeta_ += extra;
  if (extra > 0.0 && m.family_ == Family::Stable) m.family_ = Family::GenGamma;
  return m;
}

double psi(const LevyModel& m, double g) {
  if (!(g > 0.0)) throw std::invalid_argument("psi: requires g > 0");
  const double a = m.alpha(), t = m.theta(), z = m.zeta();
  if (a == 0.0) return t * std::log1p(g / z);
  if (z == 0.0) return (t / a) * std::pow(g, a);
  // (t/a) z^a [ (1 + g/z)^a - 1 ], kept accurate for small g/z via expm1/log1p.
  return (t / a) * std::pow(z, a) * std::expm1(a * std::log1p(g / z));
}

double psi_cumulant(const LevyModel& m, int c, double g) {
  if (c < 1) throw std::invalid_argument("psi_cumulant: requires c >= 1");
  if (!(g > 0.0)) throw std::invalid_argument("psi_cumulant: requires g > 0");
  const double a = m.alpha();
  // theta Gamma(c - alpha)/Gamma(1 - alpha) (zeta + g)^(alpha - c); the
  // Gamma-ratio form covers alpha = 0 as Gamma(c).
  return std::log(m.theta()) + log_gamma(c - a) - log_gamma(1.0 - a) +
         (a - c) * std::log(m.zeta() + g);
}

double log_levy_density(const LevyModel& m, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("log_levy_density: requires s > 0");
  const double a = m.alpha();
  return std::log(m.theta()) - (a + 1.0) * std::log(s) - m.zeta() * s -
         log_gamma(1.0 - a);
}

CumulantTable::CumulantTable(const LevyModel& m, double g, int n_max)
    : model_(m), g_(g) {
  if (n_max < 0) throw std::invalid_argument("CumulantTable: n_max must be >= 0");
  log_psi_ = std::log(psi(m, g));
  log_c_.reserve(static_cast<std::size_t>(n_max));
  for (int c = 1; c <= n_max; ++c) log_c_.push_back(psi_cumulant(m, c, g));
}

double CumulantTable::log_psi_c(int c) const {
  if (c < 1 || c > n_max())
    throw std::out_of_range("CumulantTable::log_psi_c: c out of range");
  return log_c_[static_cast<std::size_t>(c - 1)];
}

BellTable::BellTable(const LevyModel& m, double g, int n_max)
    : cum_(m, g, n_max), n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("BellTable: n_max must be >= 0");
  const std::size_t dim = static_cast<std::size_t>(n_max) + 1;
  log_a_.assign(dim * dim, kNegInf);
  log_a_[0] = 0.0;  // A(0, 0) = 1
  // log a_m = log psi^(m) - log m!
  std::vector<double> log_am(dim, kNegInf);
  for (int mth = 1; mth <= n_max; ++mth)
    log_am[static_cast<std::size_t>(mth)] =
        cum_.log_psi_c(mth) - log_gamma(mth + 1.0);
  std::vector<double> terms;
  for (int n = 1; n <= n_max; ++n) {
    for (int r = 1; r <= n; ++r) {
      terms.clear();
      for (int mm = 1; mm <= n - r + 1; ++mm) {
        const double prev = log_a_[static_cast<std::size_t>(n - mm) * dim +
                                   static_cast<std::size_t>(r - 1)];
        if (prev != kNegInf)
          terms.push_back(log_am[static_cast<std::size_t>(mm)] + prev);
      }
      log_a_[static_cast<std::size_t>(n) * dim + static_cast<std::size_t>(r)] =
          log_sum_exp(terms);
    }
  }
}

double BellTable::log_xi(int n, int r) const {
  if (n < 1 || n > n_max_ || r < 1 || r > n)
    throw std::out_of_range("BellTable::log_xi: indices out of range");
  const std::size_t dim = static_cast<std::size_t>(n_max_) + 1;
  return log_gamma(n + 1.0) - log_gamma(r + 1.0) +
         log_a_[static_cast<std::size_t>(n) * dim + static_cast<std::size_t>(r)];
}

double BellTable::log_xi_total(int n, double log_lambda) const {
  if (n == 0) return 0.0;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) terms.push_back(r * log_lambda + log_xi(n, r));
  return log_sum_exp(terms);
}

BellTable xi_partial(const LevyModel& m, int n, double g) {
  if (n < 1) throw std::invalid_argument("xi_partial: requires n >= 1");
  return BellTable(m, g, n);
}

double log_weighted_moment(const LevyModel& m, double lambda, int n, double g) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("log_weighted_moment: requires lambda > 0");
  const double base = -lambda * psi(m, g);
  if (n == 0) return base;
  return base + BellTable(m, g, n).log_xi_total(n, std::log(lambda));
}

double mtp_log_pmf(const LevyModel& m, double g, long c) {
  if (c < 1) throw std::invalid_argument("mtp_log_pmf: requires c >= 1");
  // g^c psi^(c)(g) / (c! psi(g)); the cumulant is evaluated in closed form so
  // arbitrarily deep tail values cost O(1).
  const double a = m.alpha();
  const double cd = static_cast<double>(c);
  const double log_cum = std::log(m.theta()) + log_gamma(cd - a) -
                         log_gamma(1.0 - a) + (a - cd) * std::log(m.zeta() + g);
  return cd * std::log(g) + log_cum - log_gamma(cd + 1.0) - std::log(psi(m, g));
}

double mtp_pmf(const LevyModel& m, double g, long c) {
  return std::exp(mtp_log_pmf(m, g, c));
}

MtpSampler::MtpSampler(const LevyModel& m, double g, double tail_eps,
                       std::size_t max_len) {
  if (!(g > 0.0)) throw std::invalid_argument("MtpSampler: requires g > 0");
  if (max_len == 0) throw std::invalid_argument("MtpSampler: empty table");
  const double a = m.alpha(), z = m.zeta();
  double p = mtp_pmf(m, g, 1);
  double cum = 0.0;
  cdf_.reserve(1024);
  for (std::size_t c = 1; c <= max_len; ++c) {
    cum += p;
    cdf_.push_back(cum);
    if (cum >= 1.0 - tail_eps) break;
    p *= g * (static_cast<double>(c) - a) /
         ((static_cast<double>(c) + 1.0) * (z + g));
  }
  for (double& v : cdf_) v /= cum;  // renormalize the truncated table
}

long MtpSampler::draw(RngStream& rng) const {
  // Identical mapping u -> index as sample_from_cdf, but the bulk of the mass
  // sits on the first few values, so a short sequential scan beats a binary
  // search over the (possibly million-entry) table; the heavy tail falls back
  // to lower_bound.
  const double u = rng.uniform() * cdf_.back();
  const std::size_t head = std::min<std::size_t>(cdf_.size(), 32);
  for (std::size_t i = 0; i < head; ++i)
    if (cdf_[i] >= u) return static_cast<long>(i) + 1;
  const auto it = std::lower_bound(cdf_.begin() + static_cast<std::ptrdiff_t>(head),
                                   cdf_.end(), u);
  return static_cast<long>(std::min<std::ptrdiff_t>(
             it - cdf_.begin(),
             static_cast<std::ptrdiff_t>(cdf_.size()) - 1)) +
         1;
}

double sample_total_mass(const LevyModel& m, double lambda, RngStream& rng,
                         std::size_t max_attempts) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("sample_total_mass: requires lambda > 0");
  const double a = m.alpha(), t = m.theta(), z = m.zeta();
  if (a == 0.0) return rng.gamma(lambda * t, z);
  // Untilted case: sigma(lambda) = (lambda theta / alpha)^(1/alpha) S_alpha.
  const double scale = std::pow(lambda * t / a, 1.0 / a);
  if (z == 0.0) return scale * rng.positive_stable(a);
  for (std::size_t i = 0; i < max_attempts; ++i) {
    const double s = scale * rng.positive_stable(a);
    if (std::log(rng.uniform()) < -z * s) return s;
  }
  throw std::runtime_error(
      "sample_total_mass: tilt rejection exceeded the attempt cap");
}

}  // namespace phibp
