#include "phibp/laws.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "phibp/special.hpp"

namespace phibp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<int> group_totals(const NestedConfig& cfg) {
  std::vector<int> totals(static_cast<std::size_t>(cfg.groups()));
  for (int j = 0; j < cfg.groups(); ++j)
    totals[static_cast<std::size_t>(j)] = cfg.group_total(j);
  return totals;
}

void require_positive_totals(const NestedConfig& cfg) {
  for (int j = 0; j < cfg.groups(); ++j)
    if (cfg.group_total(j) < 1)
      throw std::invalid_argument(
          "conditional law: every group total must be >= 1");
}

// log of prod over all fine blocks of psi_j^(c_{j,k,l})(gamma_j).
double log_fine_block_product(const NestedConfig& cfg, const HierModel& hier) {
  double lp = 0.0;
  for (int j = 0; j < cfg.groups(); ++j)
    for (int l = 0; l < cfg.species(); ++l)
      for (int c : cfg.refinement[static_cast<std::size_t>(j)]
                                 [static_cast<std::size_t>(l)])
        lp += psi_cumulant(hier.taus[static_cast<std::size_t>(j)], c,
                           hier.gammas[static_cast<std::size_t>(j)]);
  return lp;
}

double log_joint_count(const HierModel& hier, std::span<const int> counts) {
  if (static_cast<int>(counts.size()) != hier.groups())
    throw std::invalid_argument("joint_count_pmf: count vector length != J");
  double lp = 0.0;
  for (int j = 0; j < hier.groups(); ++j) {
    const int n = counts[static_cast<std::size_t>(j)];
    if (n < 0) throw std::invalid_argument("joint_count_pmf: negative count");
    lp += n * std::log(hier.gammas[static_cast<std::size_t>(j)]) -
          log_gamma(n + 1.0);
  }
  return lp + hier_joint_moment(hier, counts);
}

}  // namespace

HierModel::HierModel(LevyModel base, std::vector<LevyModel> groups,
                     std::vector<double> times)
    : tau0(base), taus(std::move(groups)), gammas(std::move(times)) {
  if (taus.empty() || taus.size() != gammas.size())
    throw std::invalid_argument(
        "HierModel: need >= 1 group and matching gamma vector");
  for (double g : gammas)
    if (!(g > 0.0)) throw std::invalid_argument("HierModel: gammas must be > 0");
}

double HierModel::psi_j(int j) const {
  return psi(taus.at(static_cast<std::size_t>(j)),
             gammas.at(static_cast<std::size_t>(j)));
}

double HierModel::sum_psi() const {
  double s = 0.0;
  for (int j = 0; j < groups(); ++j) s += psi_j(j);
  return s;
}

std::vector<double> HierModel::allocation_probs() const {
  std::vector<double> q(taus.size());
  const double u = sum_psi();
  for (int j = 0; j < groups(); ++j) q[static_cast<std::size_t>(j)] = psi_j(j) / u;
  return q;
}

int NestedConfig::species() const {
  return counts.empty() ? 0 : static_cast<int>(counts.front().size());
}

int NestedConfig::fine_blocks(int j, int l) const {
  return static_cast<int>(
      refinement[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)].size());
}

int NestedConfig::group_fine_blocks(int j) const {
  int k = 0;
  for (int l = 0; l < species(); ++l) k += fine_blocks(j, l);
  return k;
}

int NestedConfig::total_fine_blocks() const {
  int k = 0;
  for (int j = 0; j < groups(); ++j) k += group_fine_blocks(j);
  return k;
}

int NestedConfig::species_fine_blocks(int l) const {
  int k = 0;
  for (int j = 0; j < groups(); ++j) k += fine_blocks(j, l);
  return k;
}

int NestedConfig::group_total(int j) const {
  int n = 0;
  for (int c : counts[static_cast<std::size_t>(j)]) n += c;
  return n;
}

int NestedConfig::species_total(int l) const {
  int n = 0;
  for (int j = 0; j < groups(); ++j)
    n += counts[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
  return n;
}

std::vector<int> NestedConfig::species_counts(int l) const {
  std::vector<int> v(static_cast<std::size_t>(groups()));
  for (int j = 0; j < groups(); ++j)
    v[static_cast<std::size_t>(j)] =
        counts[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
  return v;
}

void NestedConfig::validate() const {
  if (counts.empty()) throw std::invalid_argument("NestedConfig: no groups");
  if (refinement.size() != counts.size())
    throw std::invalid_argument("NestedConfig: refinement/count group mismatch");
  const std::size_t r = counts.front().size();
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j].size() != r || refinement[j].size() != r)
      throw std::invalid_argument("NestedConfig: ragged species dimension");
    for (std::size_t l = 0; l < r; ++l) {
      const int n = counts[j][l];
      if (n < 0) throw std::invalid_argument("NestedConfig: negative count");
      const auto& parts = refinement[j][l];
      if (n == 0) {
        if (!parts.empty())
          throw std::invalid_argument(
              "NestedConfig: refinement of an empty count must be empty");
        continue;
      }
      int sum = 0;
      for (int c : parts) {
        if (c < 1)
          throw std::invalid_argument("NestedConfig: fine blocks must be >= 1");
        sum += c;
      }
      if (parts.empty() || sum != n)
        throw std::invalid_argument(
            "NestedConfig: refinement must partition the count");
    }
  }
  for (std::size_t l = 0; l < r; ++l) {
    int seen = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) seen += counts[j][l];
    if (seen < 1)
      throw std::invalid_argument(
          "NestedConfig: every species must be observed in some group");
  }
}

namespace {

// DP over groups of the log-weights of the total inner block count
// s = sum_j r_j; acc[s] = log sum over (r_j) with that total of
// prod_j Xi^[counts_j]_{r_j}.  Groups with count 0 contribute r_j = 0.
std::vector<double> inner_block_weights(const HierModel& hier,
                                        std::span<const int> counts) {
  if (static_cast<int>(counts.size()) != hier.groups())
    throw std::invalid_argument("cumulant expansion: count vector length != J");
  std::vector<double> acc{0.0};
  for (int j = 0; j < hier.groups(); ++j) {
    const int n = counts[static_cast<std::size_t>(j)];
    if (n < 0) throw std::invalid_argument("cumulant expansion: negative count");
    if (n == 0) continue;
    BellTable bt(hier.taus[static_cast<std::size_t>(j)],
                 hier.gammas[static_cast<std::size_t>(j)], n);
    std::vector<double> nxt(acc.size() + static_cast<std::size_t>(n), kNegInf);
    for (std::size_t s = 0; s < acc.size(); ++s) {
      if (acc[s] == kNegInf) continue;
      for (int rr = 1; rr <= n; ++rr)
        nxt[s + static_cast<std::size_t>(rr)] = log_add_exp(
            nxt[s + static_cast<std::size_t>(rr)], acc[s] + bt.log_xi(n, rr));
    }
    acc = std::move(nxt);
  }
  return acc;
}

}  // namespace

double composed_cumulant(const HierModel& hier, std::span<const int> counts) {
  const int total = std::accumulate(counts.begin(), counts.end(), 0);
  if (total < 1)
    throw std::invalid_argument("composed_cumulant: needs a positive count");
  const std::vector<double> acc = inner_block_weights(hier, counts);
  const double u = hier.sum_psi();
  const CumulantTable base(hier.tau0, u, static_cast<int>(acc.size()) - 1);
  std::vector<double> terms;
  for (std::size_t s = 1; s < acc.size(); ++s)
    if (acc[s] != kNegInf)
      terms.push_back(acc[s] + base.log_psi_c(static_cast<int>(s)));
  return log_sum_exp(terms);
}

double hier_joint_moment(const HierModel& hier, std::span<const int> counts) {
  const double u = hier.sum_psi();
  const int total = std::accumulate(counts.begin(), counts.end(), 0);
  if (total == 0) {
    for (int c : counts)
      if (c < 0) throw std::invalid_argument("hier_joint_moment: negative count");
    return -psi(hier.tau0, u);
  }
  const std::vector<double> acc = inner_block_weights(hier, counts);
  const int s_max = static_cast<int>(acc.size()) - 1;
  const BellTable base(hier.tau0, u, s_max);
  std::vector<double> terms;
  for (std::size_t s = 1; s < acc.size(); ++s)
    if (acc[s] != kNegInf)
      terms.push_back(acc[s] + base.log_xi_total(static_cast<int>(s)));
  return -psi(hier.tau0, u) + log_sum_exp(terms);
}

double p_fine(const NestedConfig& config, const HierModel& hier) {
  config.validate();
  require_positive_totals(config);
  if (config.groups() != hier.groups())
    throw std::invalid_argument("p_fine: config/model group mismatch");
  const double u = hier.sum_psi();
  const std::vector<int> totals = group_totals(config);
  return log_weighted_moment(hier.tau0, 1.0, config.total_fine_blocks(), u) +
         log_fine_block_product(config, hier) - hier_joint_moment(hier, totals);
}

double p_coag(const NestedConfig& config, const HierModel& hier) {
  config.validate();
  if (config.groups() != hier.groups())
    throw std::invalid_argument("p_coag: config/model group mismatch");
  if (config.species() < 1)
    throw std::invalid_argument("p_coag: needs at least one species");
  const double u = hier.sum_psi();
  // Depends on the fine state only through (x-tilde_l) and K-tilde: this is
  // the coagulation kernel's Markov property through the allocation counts.
  double lp = -psi(hier.tau0, u);
  for (int l = 0; l < config.species(); ++l)
    lp += psi_cumulant(hier.tau0, config.species_fine_blocks(l), u);
  return lp -
         log_weighted_moment(hier.tau0, 1.0, config.total_fine_blocks(), u);
}

double p_frag(const NestedConfig& config, const HierModel& hier) {
  config.validate();
  if (config.groups() != hier.groups())
    throw std::invalid_argument("p_frag: config/model group mismatch");
  if (config.species() < 1)
    throw std::invalid_argument("p_frag: needs at least one species");
  const double u = hier.sum_psi();
  double lp = 0.0;
  for (int l = 0; l < config.species(); ++l) {
    lp += psi_cumulant(hier.tau0, config.species_fine_blocks(l), u);
    for (int j = 0; j < config.groups(); ++j)
      for (int c : config.refinement[static_cast<std::size_t>(j)]
                                    [static_cast<std::size_t>(l)])
        lp += psi_cumulant(hier.taus[static_cast<std::size_t>(j)], c,
                           hier.gammas[static_cast<std::size_t>(j)]);
    const std::vector<int> nl = config.species_counts(l);
    lp -= composed_cumulant(hier, nl);
  }
  return lp;
}

double p_coarse(const NestedConfig& config, const HierModel& hier) {
  config.validate();
  require_positive_totals(config);
  if (config.groups() != hier.groups())
    throw std::invalid_argument("p_coarse: config/model group mismatch");
  const double u = hier.sum_psi();
  double lp = -psi(hier.tau0, u);
  for (int l = 0; l < config.species(); ++l) {
    const std::vector<int> nl = config.species_counts(l);
    lp += composed_cumulant(hier, nl);
  }
  return lp - hier_joint_moment(hier, group_totals(config));
}

double duality_residual(const NestedConfig& config, const HierModel& hier) {
  return std::abs((p_coag(config, hier) + p_fine(config, hier)) -
                  (p_frag(config, hier) + p_coarse(config, hier)));
}

double joint_count_pmf(const HierModel& hier, std::span<const int> counts) {
  return std::exp(log_joint_count(hier, counts));
}

double allocation_pmf(const HierModel& hier, std::span<const int> ks) {
  if (static_cast<int>(ks.size()) != hier.groups())
    throw std::invalid_argument("allocation_pmf: count vector length != J");
  const double u = hier.sum_psi();
  double lp = 0.0;
  int k_tilde = 0;
  for (int j = 0; j < hier.groups(); ++j) {
    const int k = ks[static_cast<std::size_t>(j)];
    if (k < 0) throw std::invalid_argument("allocation_pmf: negative count");
    k_tilde += k;
    lp += k * std::log(hier.psi_j(j)) - log_gamma(k + 1.0);
  }
  return std::exp(lp + log_weighted_moment(hier.tau0, 1.0, k_tilde, u));
}

double fragment_count_pmf(const HierModel& hier, std::span<const int> counts) {
  const int total = std::accumulate(counts.begin(), counts.end(), 0);
  if (total < 1)
    throw std::invalid_argument("fragment_count_pmf: needs a positive count");
  double lp = 0.0;
  for (int j = 0; j < hier.groups(); ++j) {
    const int n = counts[static_cast<std::size_t>(j)];
    lp += n * std::log(hier.gammas[static_cast<std::size_t>(j)]) -
          log_gamma(n + 1.0);
  }
  const double u = hier.sum_psi();
  return std::exp(lp + composed_cumulant(hier, counts) -
                  std::log(psi(hier.tau0, u)));
}

double h_conditional_density(const HierModel& hier, std::span<const int> counts,
                             double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("h_conditional_density: requires lambda > 0");
  const int total = std::accumulate(counts.begin(), counts.end(), 0);
  if (total < 1)
    throw std::invalid_argument("h_conditional_density: needs a positive count");
  const double log_lambda = std::log(lambda);
  double lp = log_levy_density(hier.tau0, lambda) - lambda * hier.sum_psi();
  for (int j = 0; j < hier.groups(); ++j) {
    const int n = counts[static_cast<std::size_t>(j)];
    if (n == 0) continue;
    BellTable bt(hier.taus[static_cast<std::size_t>(j)],
                 hier.gammas[static_cast<std::size_t>(j)], n);
    lp += bt.log_xi_total(n, log_lambda);
  }
  return std::exp(lp - composed_cumulant(hier, counts));
}

double x_given_count_pmf(const HierModel& hier, int n, int x) {
  if (hier.groups() != 1)
    throw std::invalid_argument("x_given_count_pmf: defined for J = 1");
  if (n < 1 || x < 1 || x > n)
    throw std::invalid_argument("x_given_count_pmf: requires 1 <= x <= n");
  const double g = hier.gammas.front();
  const double u = hier.sum_psi();
  // pc[m] = P(C = m) for one fine-block count, m = 1..n.
  std::vector<double> pc(static_cast<std::size_t>(n) + 1, 0.0);
  for (int m = 1; m <= n; ++m)
    pc[static_cast<std::size_t>(m)] = mtp_pmf(hier.taus.front(), g, m);
  // conv[k][m] = P(C_1 + .. + C_k = m).
  std::vector<std::vector<double>> conv(
      static_cast<std::size_t>(n) + 1,
      std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
  conv[0][0] = 1.0;
  for (int k = 1; k <= n; ++k)
    for (int m = k; m <= n; ++m) {
      double s = 0.0;
      for (int i = 1; i <= m - k + 1; ++i)
        s += pc[static_cast<std::size_t>(i)] *
             conv[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m - i)];
      conv[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] = s;
    }
  const std::vector<int> nv{n};
  const double log_cc = composed_cumulant(hier, nv);
  std::vector<double> log_w(static_cast<std::size_t>(n), kNegInf);
  for (int xx = 1; xx <= n; ++xx) {
    const double cv =
        conv[static_cast<std::size_t>(xx)][static_cast<std::size_t>(n)];
    if (cv <= 0.0) continue;
    log_w[static_cast<std::size_t>(xx - 1)] =
        log_gamma(n + 1.0) + mtp_log_pmf(hier.tau0, u, xx) + std::log(cv) -
        log_cc;
  }
  // The raw weights total gamma^n / Psi_0(psi_1(gamma)); divide it out so the
  // result is the conditional pmf.
  const double log_total = log_sum_exp(log_w);
  return std::exp(log_w[static_cast<std::size_t>(x - 1)] - log_total);
}

std::vector<double> species_block_count_pmf(const HierModel& hier,
                                            std::span<const int> counts) {
  const int total = std::accumulate(counts.begin(), counts.end(), 0);
  if (total < 1)
    throw std::invalid_argument("species_block_count_pmf: needs a positive count");
  const std::vector<double> acc = inner_block_weights(hier, counts);
  const double u = hier.sum_psi();
  const CumulantTable base(hier.tau0, u, static_cast<int>(acc.size()) - 1);
  std::vector<double> log_w(acc.size(), kNegInf);
  for (std::size_t s = 1; s < acc.size(); ++s)
    if (acc[s] != kNegInf)
      log_w[s] = acc[s] + base.log_psi_c(static_cast<int>(s));
  const double norm = log_sum_exp(log_w);
  std::vector<double> pmf(acc.size(), 0.0);
  for (std::size_t s = 0; s < acc.size(); ++s)
    if (log_w[s] != kNegInf) pmf[s] = std::exp(log_w[s] - norm);
  return pmf;
}

double arrival_density(const HierModel& hier, std::span<const int> counts) {
  double lp = 0.0;
  for (int j = 0; j < hier.groups(); ++j) {
    const int n = counts[static_cast<std::size_t>(j)];
    if (n < 1)
      throw std::invalid_argument("arrival_density: requires all counts >= 1");
    lp += std::log(static_cast<double>(n)) -
          std::log(hier.gammas[static_cast<std::size_t>(j)]);
  }
  return std::exp(lp + log_joint_count(hier, counts));
}

double marginal_eppf(const NestedConfig& config, const LevyModel& tau0,
                     std::span<const LevyModel> taus, MarginalSide side,
                     const QuadratureOptions& opt) {
  config.validate();
  require_positive_totals(config);
  const int J = config.groups();
  if (static_cast<int>(taus.size()) != J)
    throw std::invalid_argument("marginal_eppf: config/model group mismatch");
  if (J > 3) throw std::invalid_argument("marginal_eppf: J <= 3 supported");

  // Substitution exponents: near gamma_j = 0 the integrand head is
  // gamma^(e_j - 1) with e_j the effective composite index; gamma = t^(1/e)
  // turns that into an integer-power head.
  const double base_index = (tau0.zeta() == 0.0) ? tau0.alpha() : 1.0;
  std::vector<double> powers(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    const LevyModel& m = taus[static_cast<std::size_t>(j)];
    double e = (m.zeta() == 0.0) ? m.alpha() : 1.0;
    if (J == 1) e *= base_index;
    powers[static_cast<std::size_t>(j)] = std::max(1.0, 1.0 / e);
  }

  std::vector<double> gv(static_cast<std::size_t>(J));
  auto integrand = [&]() {
    const HierModel hier(tau0, std::vector<LevyModel>(taus.begin(), taus.end()),
                         gv);
    const double u = hier.sum_psi();
    double lp = 0.0;
    for (int j = 0; j < J; ++j) {
      const int n = config.group_total(j);
      lp += (n - 1) * std::log(gv[static_cast<std::size_t>(j)]) - log_gamma(n);
    }
    switch (side) {
      case MarginalSide::Coarse:
        lp -= psi(tau0, u);
        for (int l = 0; l < config.species(); ++l) {
          const std::vector<int> nl = config.species_counts(l);
          lp += composed_cumulant(hier, nl);
        }
        break;
      case MarginalSide::Fine:
        lp += log_weighted_moment(tau0, 1.0, config.total_fine_blocks(), u);
        lp += log_fine_block_product(config, hier);
        break;
      case MarginalSide::Joint:
        lp -= psi(tau0, u);
        for (int l = 0; l < config.species(); ++l)
          lp += psi_cumulant(tau0, config.species_fine_blocks(l), u);
        lp += log_fine_block_product(config, hier);
        break;
    }
    return std::exp(lp);
  };

  std::function<double(int)> level = [&](int axis) -> double {
    QuadratureOptions o = opt;
    o.power = powers[static_cast<std::size_t>(axis)];
    // Only the outermost axis raises on non-convergence; inner axes feed a
    // noisy integrand to it and a hard failure there would be spurious.
    o.throw_on_max_depth = (axis == 0);
    return integrate_semi_infinite(
        [&](double g) {
          gv[static_cast<std::size_t>(axis)] = g;
          return (axis + 1 == J) ? integrand() : level(axis + 1);
        },
        o);
  };
  return level(0);
}

}  // namespace phibp
