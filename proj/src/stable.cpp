#include "phibp/stable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "phibp/partition.hpp"
#include "phibp/special.hpp"

namespace phibp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct FlatPartition {
  std::vector<int> species_totals;       // n_l
  std::vector<int> species_block_counts; // x_l
  std::vector<int> fine_blocks;          // all c's
  int n = 0;
  int k = 0;
  int r = 0;
};

FlatPartition flatten(const NestedConfig& config) {
  config.validate();
  if (config.groups() != 1)
    throw std::invalid_argument("stable duality: expects a one-group config");
  FlatPartition f;
  f.r = config.species();
  for (int l = 0; l < f.r; ++l) {
    f.species_totals.push_back(config.species_total(l));
    f.species_block_counts.push_back(config.species_fine_blocks(l));
    for (int c : config.refinement[0][static_cast<std::size_t>(l)])
      f.fine_blocks.push_back(c);
  }
  f.n = std::accumulate(f.species_totals.begin(), f.species_totals.end(), 0);
  f.k = static_cast<int>(f.fine_blocks.size());
  return f;
}

}  // namespace

void StableDualityParams::validate() const {
  if (!(beta > 0.0 && beta < alpha && alpha < 1.0))
    throw std::invalid_argument(
        "StableDualityParams: requires 0 < beta < alpha < 1");
  if (!(theta > -beta))
    throw std::invalid_argument("StableDualityParams: requires theta > -beta");
  if (!(zeta > 0.0))
    throw std::invalid_argument("StableDualityParams: requires zeta > 0");
}

NestedConfig single_group_config(
    const std::vector<std::vector<int>>& species_blocks) {
  NestedConfig cfg;
  cfg.counts.emplace_back();
  cfg.refinement.push_back(species_blocks);
  for (const auto& parts : species_blocks)
    cfg.counts[0].push_back(std::accumulate(parts.begin(), parts.end(), 0));
  cfg.validate();
  return cfg;
}

double log_gibbs_poly(double sigma, int m, double zeta) {
  if (m < 1) throw std::invalid_argument("log_gibbs_poly: requires m >= 1");
  if (!(zeta > 0.0)) throw std::invalid_argument("log_gibbs_poly: zeta > 0");
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k)
    terms.push_back(std::log(block_count_pmf(sigma, m, k)) +
                    k * std::log(zeta) - log_gamma(k));
  return log_sum_exp(terms);
}

double phi_weight_pd(double beta, double theta, int n, int r) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("phi_weight_pd: requires 0 < beta < 1");
  if (!(theta > -beta))
    throw std::invalid_argument("phi_weight_pd: requires theta > -beta");
  if (r < 1 || r > n) throw std::invalid_argument("phi_weight_pd: bad (n, r)");
  if (theta == 0.0) return 1.0;
  const double tb = theta / beta;
  return std::exp(log_gamma(n) + log_gamma(tb + r) + log_gamma(theta + 1.0) -
                  log_gamma(r) - log_gamma(tb + 1.0) - log_gamma(theta + n));
}

double gibbs_duality_residual(double alpha, double beta,
                              const NestedConfig& config, const PhiWeight& phi) {
  if (!(beta > 0.0 && beta < alpha && alpha < 1.0))
    throw std::invalid_argument(
        "gibbs_duality_residual: requires 0 < beta < alpha < 1");
  const FlatPartition f = flatten(config);
  const double ba = beta / alpha;
  // M = sum_j P_{b/a}^(K)(j) Phi(n, j)
  std::vector<double> terms;
  for (int j = 1; j <= f.k; ++j) {
    const double w = phi(f.n, j);
    if (!(w > 0.0))
      throw std::invalid_argument("gibbs_duality_residual: Phi must be > 0");
    terms.push_back(std::log(block_count_pmf(ba, f.k, j)) + std::log(w));
  }
  const double log_mix = log_sum_exp(terms);

  const double log_phi_r = std::log(phi(f.n, f.r));
  const double lhs = (pd_eppf(ba, f.species_block_counts) + log_phi_r - log_mix) +
                     (pd_eppf(alpha, f.fine_blocks) + log_mix);
  double rhs = pd_eppf(beta, f.species_totals) + log_phi_r;
  for (int l = 0; l < f.r; ++l)
    rhs += pd_theta_eppf(alpha, -beta, config.refinement[0][static_cast<std::size_t>(l)]);
  return std::abs(lhs - rhs);
}

double gibbs_mixing_residual(double alpha, double beta, double theta, int n,
                             int k) {
  if (!(beta > 0.0 && beta < alpha && alpha < 1.0))
    throw std::invalid_argument(
        "gibbs_mixing_residual: requires 0 < beta < alpha < 1");
  if (k < 1 || k > n)
    throw std::invalid_argument("gibbs_mixing_residual: bad (n, k)");
  std::vector<double> terms;
  for (int j = 1; j <= k; ++j)
    terms.push_back(std::log(block_count_pmf(beta / alpha, k, j)) +
                    std::log(phi_weight_pd(beta, theta, n, j)));
  const double lhs = log_sum_exp(terms);
  const double ta = theta / alpha;
  const double rhs = log_gamma(n) + log_gamma(ta + k) + log_gamma(theta + 1.0) -
                     log_gamma(k) - log_gamma(ta + 1.0) - log_gamma(theta + n);
  return std::abs(lhs - rhs);
}

MasterFactors master_factors(double alpha, double beta,
                             const NestedConfig& config, double zeta) {
  if (!(beta > 0.0 && beta < alpha && alpha < 1.0))
    throw std::invalid_argument("master_factors: requires 0 < beta < alpha < 1");
  if (!(zeta > 0.0)) throw std::invalid_argument("master_factors: zeta > 0");
  const FlatPartition f = flatten(config);
  const double ba = beta / alpha;
  const double log_dk = log_gibbs_poly(ba, f.k, zeta);
  const double log_dn = log_gibbs_poly(beta, f.n, zeta);
  const double log_zr = f.r * std::log(zeta) - log_gamma(f.r);

  MasterFactors out;
  out.log_coag = pd_eppf(ba, f.species_block_counts) + log_zr - log_dk;
  out.log_fine = pd_eppf(alpha, f.fine_blocks) + log_dk - log_dn;
  out.log_frag = 0.0;
  for (int l = 0; l < f.r; ++l)
    out.log_frag +=
        pd_theta_eppf(alpha, -beta, config.refinement[0][static_cast<std::size_t>(l)]);
  out.log_coarse = pd_eppf(beta, f.species_totals) + log_zr - log_dn;
  return out;
}

double master_duality_residual(const StableDualityParams& params,
                               const NestedConfig& config) {
  params.validate();
  const MasterFactors f =
      master_factors(params.alpha, params.beta, config, params.zeta);
  return std::abs((f.log_coag + f.log_fine) - (f.log_frag + f.log_coarse));
}

double stable_count_pmf(double beta, double zeta, int n) {
  if (n < 1) throw std::invalid_argument("stable_count_pmf: requires n >= 1");
  return std::exp(std::log(beta) + log_gamma(n) - log_gamma(n + 1.0) - zeta +
                  log_gibbs_poly(beta, n, zeta));
}

double stable_block_count_pmf(double alpha, double beta, double zeta, int k) {
  if (k < 1)
    throw std::invalid_argument("stable_block_count_pmf: requires k >= 1");
  const double ba = beta / alpha;
  return std::exp(std::log(ba) + log_gamma(k) - log_gamma(k + 1.0) - zeta +
                  log_gibbs_poly(ba, k, zeta));
}

std::pair<double, double> recover_pitman_by_quadrature(
    double alpha, double beta, double theta, const NestedConfig& config,
    const QuadratureOptions& opt) {
  if (!(beta > 0.0 && beta < alpha && alpha < 1.0))
    throw std::invalid_argument(
        "recover_pitman_by_quadrature: requires 0 < beta < alpha < 1");
  if (!(theta >= 0.0))
    throw std::invalid_argument("recover_pitman_by_quadrature: theta >= 0");
  const FlatPartition f = flatten(config);
  const int n = f.n;

  // Mixing density over the latent scalar.
  std::function<double(double)> mix;
  if (theta == 0.0) {
    mix = [beta, n](double z) {
      return std::exp(-z + log_gibbs_poly(beta, n, z)) / z;
    };
  } else {
    if (n > 8)
      throw std::invalid_argument(
          "recover_pitman_by_quadrature: theta > 0 needs n <= 8");
    // Block-count law of the (beta, theta) partition of [n], by summing the
    // EPPF over all set partitions.
    std::vector<double> pk(static_cast<std::size_t>(n) + 1, 0.0);
    for_each_set_partition(n, [&](const std::vector<std::vector<int>>& part) {
      std::vector<int> sizes;
      sizes.reserve(part.size());
      for (const auto& b : part) sizes.push_back(static_cast<int>(b.size()));
      pk[part.size()] += std::exp(pd_theta_eppf(beta, theta, sizes));
    });
    const double tb = theta / beta;
    mix = [pk = std::move(pk), tb](double z) {
      double s = 0.0;
      for (std::size_t k = 1; k < pk.size(); ++k) {
        const double a = tb + static_cast<double>(k);
        s += pk[k] * std::exp((a - 1.0) * std::log(z) - z - log_gamma(a));
      }
      return s;
    };
  }

  auto coag_path = [&](double z) {
    const MasterFactors mf = master_factors(alpha, beta, config, z);
    return std::exp(mf.log_coag + mf.log_fine) * mix(z);
  };
  auto frag_path = [&](double z) {
    const MasterFactors mf = master_factors(alpha, beta, config, z);
    return std::exp(mf.log_frag + mf.log_coarse) * mix(z);
  };
  return {integrate_semi_infinite(coag_path, opt),
          integrate_semi_infinite(frag_path, opt)};
}

double frag_invariance_check(double alpha, double beta,
                             std::span<const int> parts) {
  if (!(beta > 0.0 && beta < alpha && alpha < 1.0))
    throw std::invalid_argument(
        "frag_invariance_check: requires 0 < beta < alpha < 1");
  const std::vector<int> composition(parts.begin(), parts.end());
  const NestedConfig cfg = single_group_config({composition});
  // Arbitrary sampling time: the conditioned frag factor must not depend on it.
  const HierModel hier(LevyModel::stable(beta / alpha),
                       {LevyModel::stable(alpha)}, {1.3});
  return std::abs(p_frag(cfg, hier) - pd_theta_eppf(alpha, -beta, parts));
}

BridgeSample stable_bridge_sample(double alpha, int n, double scale,
                                  RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("stable_bridge_sample: requires 0 < alpha < 1");
  if (n < 0 || !(scale > 0.0))
    throw std::invalid_argument("stable_bridge_sample: bad n or scale");

  BridgeSample out;
  if (n > 0) {
    // Occupied-block count: P(K = r) proportional to P_alpha^(n)(r) scale^r / Gamma(r).
    std::vector<double> cdf(static_cast<std::size_t>(n));
    double cum = 0.0;
    for (int r = 1; r <= n; ++r) {
      cum += std::exp(std::log(block_count_pmf(alpha, n, r)) +
                      r * std::log(scale) - log_gamma(r));
      cdf[static_cast<std::size_t>(r - 1)] = cum;
    }
    const int k = static_cast<int>(sample_from_cdf(rng, cdf)) + 1;
    out.k = k;

    // Block sizes given K = k: sequential seating against the completion
    // weights C(m, j) = (number of ways m seated individuals in j blocks
    // extend to n individuals in exactly k blocks, weighted by the
    // (1 - alpha)-rising block factors):
    //   C(n, j) = [j == k],   C(m, j) = (m - j alpha) C(m+1, j) + C(m+1, j+1).
    // Kept in log scale; the table grows factorially in n.
    std::vector<std::vector<double>> logc(
        static_cast<std::size_t>(n) + 1,
        std::vector<double>(static_cast<std::size_t>(n) + 2, kNegInf));
    logc[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] = 0.0;
    for (int m = n - 1; m >= 1; --m)
      for (int j = 1; j <= std::min(m, k); ++j) {
        const double stay =
            std::log(m - j * alpha) +
            logc[static_cast<std::size_t>(m + 1)][static_cast<std::size_t>(j)];
        const double open =
            logc[static_cast<std::size_t>(m + 1)][static_cast<std::size_t>(j + 1)];
        logc[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)] =
            log_add_exp(stay, open);
      }

    std::vector<int>& sizes = out.block_sizes;
    sizes.assign(1, 1);
    int j = 1;
    for (int m = 1; m < n; ++m) {
      std::vector<double> logw;
      logw.reserve(sizes.size() + 1);
      const auto& next = logc[static_cast<std::size_t>(m + 1)];
      for (int size : sizes)
        logw.push_back(std::log(size - alpha) +
                       next[static_cast<std::size_t>(j)]);
      logw.push_back(next[static_cast<std::size_t>(j + 1)]);
      const double lse = log_sum_exp(logw);
      std::vector<double> wcdf(logw.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < logw.size(); ++i) {
        acc += std::exp(logw[i] - lse);
        wcdf[i] = acc;
      }
      const std::size_t pick = sample_from_cdf(rng, wcdf);
      if (pick < sizes.size()) {
        ++sizes[pick];
      } else {
        sizes.push_back(1);
        ++j;
      }
    }

    out.atom_masses.reserve(sizes.size());
    for (int size : sizes)
      out.atom_masses.push_back(rng.gamma(size - alpha, 1.0));
  }

  // Unoccupied part: exp-tilted stable total mass at the given scale.
  out.remainder =
      sample_total_mass(LevyModel::gen_gamma(alpha, alpha, 1.0), scale, rng);
  return out;
}

}  // namespace phibp
