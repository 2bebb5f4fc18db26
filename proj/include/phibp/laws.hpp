#pragma once
// Exact conditional laws of the coupled J-group system.
//
// The generative picture: a base subordinator sigma_0 drives all groups; group
// j observes sigma_j run up to the base mass, sampled at time gamma_j.  A
// "species" is one jump of the base process seen by at least one group.  The
// state recorded after n_j observations in each group is a NestedConfig: a
// coarse partition of the individuals into r species, per-group counts
// n[j][l], and a fine refinement of each species' per-group count into blocks
// (one block per jump of the group subordinator).
//
// Four conditional laws describe the same joint object from either end:
//   p_coarse * p_frag  : law of the coarse partition, then the fine split
//   p_fine   * p_coag  : law of the fine partition, then the merge
// Their products are equal configuration by configuration; duality_residual
// measures the (rounding-level) difference of the two factorizations.
//
// All EPPF-style laws return natural logs; count pmfs and densities return
// linear-scale values.

#include <span>
#include <vector>

#include "phibp/levy.hpp"
#include "phibp/quadrature.hpp"

namespace phibp {

struct HierModel {
  LevyModel tau0;
  std::vector<LevyModel> taus;  // one per group
  std::vector<double> gammas;   // per-group sampling times, > 0

  HierModel(LevyModel base, std::vector<LevyModel> groups,
            std::vector<double> times);

  int groups() const { return static_cast<int>(taus.size()); }
  double psi_j(int j) const;  // psi_j(gamma_j)
  double sum_psi() const;     // sum_j psi_j(gamma_j)
  // Fine-block allocation probabilities q_j = psi_j(gamma_j) / sum_psi.
  std::vector<double> allocation_probs() const;
};

// Joint coarse/fine state over J groups and r species.
//   counts[j][l]      : individuals of group j in species l (n_{j,l} >= 0)
//   refinement[j][l]  : fine-block sizes refining counts[j][l]; empty iff the
//                       count is zero, otherwise parts >= 1 summing to it
struct NestedConfig {
  std::vector<std::vector<int>> counts;
  std::vector<std::vector<std::vector<int>>> refinement;

  int groups() const { return static_cast<int>(counts.size()); }
  int species() const;                     // r
  int fine_blocks(int j, int l) const;     // x_{j,l}
  int group_fine_blocks(int j) const;      // K_j
  int total_fine_blocks() const;           // K-tilde
  int species_fine_blocks(int l) const;    // x-tilde_l = sum_j x_{j,l}
  int group_total(int j) const;            // n_j
  int species_total(int l) const;          // sum_j n_{j,l}
  std::vector<int> species_counts(int l) const;  // (n_{1,l}, .., n_{J,l})

  // Throws std::invalid_argument if shapes or sums are inconsistent or some
  // species is observed nowhere.
  void validate() const;
};

// log of the composed cumulant (Psi_0 o sum_j psi_j)^(counts)(gammas): the
// mixed partial derivative of Psi_0(sum_j psi_j(gamma_j)) of order counts_j in
// -gamma_j, evaluated through the finite chain-rule expansion
//   sum over r_j in 1..counts_j (groups with counts_j > 0) of
//     [prod_j Xi^[counts_j]_{r_j}(tau_j, gamma_j)] * Psi_0^(sum r_j)(sum psi).
double composed_cumulant(const HierModel& hier, std::span<const int> counts);

// log E[prod_j sigma_j(sigma_0(1))^{n_j} e^{-sum_v sigma_v(..) gamma_v}], the
// normalizing moment of the conditioned system, by the double Bell expansion.
double hier_joint_moment(const HierModel& hier, std::span<const int> counts);

// The four conditional laws (log scale).  All require every group total >= 1
// (the laws are stated for the state seen at the per-group arrival times)
// except p_coag / p_frag which only need the config itself to be valid.
double p_fine(const NestedConfig& config, const HierModel& hier);
double p_coag(const NestedConfig& config, const HierModel& hier);
double p_frag(const NestedConfig& config, const HierModel& hier);
double p_coarse(const NestedConfig& config, const HierModel& hier);

// |log(p_coag p_fine) - log(p_frag p_coarse)|; algebraically zero.
double duality_residual(const NestedConfig& config, const HierModel& hier);

// P(group totals = counts); counts_j >= 0.
double joint_count_pmf(const HierModel& hier, std::span<const int> counts);

// P(per-group fine-block counts = ks); ks_j >= 0.
double allocation_pmf(const HierModel& hier, std::span<const int> ks);

// P(count vector of a single species = counts), counts not all zero.
double fragment_count_pmf(const HierModel& hier, std::span<const int> counts);

// Density at lambda of the base jump H_l behind a species with the given
// count vector.
double h_conditional_density(const HierModel& hier, std::span<const int> counts,
                             double lambda);

// J = 1 only: P(species fine-block count = x | species total = n).  The
// unnormalized weight is n! P(X = x) P(C_1 + .. + C_x = n) / composed
// cumulant; the weights are then normalized over x = 1..n (their raw sum is
// gamma^n / Psi_0(psi_1), not 1).
double x_given_count_pmf(const HierModel& hier, int n, int x);

// Any J: pmf of the total fine-block count of one species given its count
// vector, indexed s = 0..sum(counts), via the chain-rule expansion (the terms
// of composed_cumulant grouped by total inner order).  For J = 1 this must
// agree with x_given_count_pmf, which takes the independent convolution route.
std::vector<double> species_block_count_pmf(const HierModel& hier,
                                            std::span<const int> counts);

// Joint density of the per-group arrival times at hier.gammas, given totals:
// prod_j (n_j / gamma_j) * joint_count_pmf.
double arrival_density(const HierModel& hier, std::span<const int> counts);

enum class MarginalSide { Coarse, Fine, Joint };

// EPPF of the config after integrating out the arrival times: the integral
// over gamma in (0, inf)^J of [conditional EPPF] x [arrival-time density].
// Evaluated by nested adaptive quadrature; each axis is power-substituted so
// stable-index heads gamma^(e-1) become polynomial at the origin.  J <= 3.
double marginal_eppf(const NestedConfig& config, const LevyModel& tau0,
                     std::span<const LevyModel> taus, MarginalSide side,
                     const QuadratureOptions& opt = {});

}  // namespace phibp
