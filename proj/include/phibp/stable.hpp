#pragma once
// Closed forms for the stable-in-stable specialization: with a base stable
// subordinator of index beta/alpha composed with group-stable index alpha, the
// composite is beta-stable, every law of laws.hpp collapses to Pitman-Yor
// style formulas in a single latent scalar zeta, and the coag/frag duality
// becomes an identity between products of classical EPPFs.  This module
// evaluates those collapsed factors directly (no Levy machinery), so the
// general-path and closed-form paths are genuinely independent.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "phibp/laws.hpp"
#include "phibp/quadrature.hpp"
#include "phibp/rng.hpp"

namespace phibp {

struct StableDualityParams {
  double alpha;        // fine index, 0 < beta < alpha < 1
  double beta;         // coarse index
  double theta = 0.0;  // tilt for the Pitman-Yor weight family, theta > -beta
  double zeta = 1.0;   // latent conditioning scalar, > 0

  void validate() const;
};

// One-group nested partition (coarse species refined into fine blocks),
// expressed as a NestedConfig with J = 1: species_blocks[l] holds the fine
// block sizes inside species l.
NestedConfig single_group_config(
    const std::vector<std::vector<int>>& species_blocks);

// log D_sigma^m(zeta) = log sum_{k=1}^m P_sigma^(m)(k) zeta^k / Gamma(k),
// the block-count generating polynomial that normalizes every zeta-conditional
// factor below.
double log_gibbs_poly(double sigma, int m, double zeta);

// Pitman-Yor weight  Phi^[beta]_{n,r} for the power tilt t^(-theta):
//   Gamma(n) Gamma(theta/beta + r) Gamma(theta+1) /
//   (Gamma(r) Gamma(theta/beta + 1) Gamma(theta + n)).
// Multiplying the one-parameter EPPF by this weight gives the (beta, theta)
// EPPF; theta = 0 gives 1.
double phi_weight_pd(double beta, double theta, int n, int r);

// Block-count weight function for the generic Gibbs duality below.
using PhiWeight = std::function<double(int n, int r)>;

// |log LHS - log RHS| of the weighted coag/frag identity
//   [p_{b/a}(x) Phi_{n,r} / M] * [p_a(c) M]  =  prod_l p_{a,-b}(c_l) *
//   p_b(n) Phi_{n,r},         M = sum_j P_{b/a}^(K)(j) Phi_{n,j},
// for an arbitrary positive weight table Phi.
double gibbs_duality_residual(double alpha, double beta,
                              const NestedConfig& config, const PhiWeight& phi);

// Residual of the mixing identity
//   sum_j P_{beta/alpha}^(K)(j) Phi^[beta]_{n,j} = Phi-like weight at level
//   alpha with (theta/alpha, K): Gamma(n)Gamma(theta/alpha+K)Gamma(theta+1) /
//   (Gamma(K)Gamma(theta/alpha+1)Gamma(theta+n)).
double gibbs_mixing_residual(double alpha, double beta, double theta, int n,
                             int k);

// The four zeta-conditional factors (log scale), with
//   c = all fine block sizes, x = per-species fine-block counts,
//   n = per-species totals, K fine blocks, r species:
//   coag   : p_{b/a}(x) (zeta^r/Gamma(r)) / D_{b/a}^K(zeta)
//   fine   : p_a(c) D_{b/a}^K(zeta) / D_b^n(zeta)
//   frag   : prod_l p_{a,-b}(c_l)            (zeta-free)
//   coarse : p_b(n) (zeta^r/Gamma(r)) / D_b^n(zeta)
struct MasterFactors {
  double log_coag;
  double log_fine;
  double log_frag;
  double log_coarse;
};

MasterFactors master_factors(double alpha, double beta,
                             const NestedConfig& config, double zeta);

// |log(coag * fine) - log(frag * coarse)| at params.zeta.
double master_duality_residual(const StableDualityParams& params,
                               const NestedConfig& config);

// Marginal count laws of the stable pair at latent zeta
// (zeta = gamma^beta under the time substitution):
//   P(group total = n)      = beta  Gamma(n)/n! e^-zeta D_beta^n(zeta)
//   P(fine-block count = K) = (beta/alpha) Gamma(K)/K! e^-zeta D_{beta/alpha}^K(zeta)
double stable_count_pmf(double beta, double zeta, int n);
double stable_block_count_pmf(double alpha, double beta, double zeta, int k);

// Integrates both factorizations of the zeta-conditional identity against the
// arrival-time mixing density and returns the pair (coag-path integral,
// frag-path integral).  theta = 0 mixes against e^-zeta D_b^n(zeta)/zeta;
// theta > 0 mixes against sum_k P(K_n = k) Gamma(theta/beta + k, 1) with the
// block-count law of the (beta, theta) partition obtained by summing its EPPF
// over all set partitions of [n] (n <= 8).  Both integrals reproduce the
// classical two-parameter duality products.
std::pair<double, double> recover_pitman_by_quadrature(
    double alpha, double beta, double theta, const NestedConfig& config,
    const QuadratureOptions& opt = {});

// |log frag factor - log p_{alpha,-beta}(parts)| for a single species with the
// given fine composition, evaluated through the general Levy-side machinery at
// an arbitrary gamma: checks that conditioned fragmentation is exactly the
// (alpha, -beta) partition law, independent of zeta.
double frag_invariance_check(double alpha, double beta,
                             std::span<const int> parts);

// One draw of the conditioned bridge: block structure of the n observed
// individuals plus the jump decomposition of the underlying random measure.
//   k            : number of occupied blocks
//   block_sizes  : sizes N_1..N_k (exchangeable order)
//   atom_masses  : un-normalized masses Gamma(N_i - alpha, 1) of the occupied
//                  atoms
//   remainder    : total mass of the unoccupied part, an exp-tilted stable
//                  total mass at the given scale
struct BridgeSample {
  int k = 0;
  std::vector<int> block_sizes;
  std::vector<double> atom_masses;
  double remainder = 0.0;
};

BridgeSample stable_bridge_sample(double alpha, int n, double scale,
                                  RngStream& rng);

}  // namespace phibp
