#pragma once
// Brute-force verification layer: exhaustive enumeration of nested
// configurations with exact integer multiplicities, normalization and duality
// sweeps over the enumeration, Monte-Carlo comparison of the coupled sampler
// against the exact count laws, and quadrature oracles that recompute moments
// from total-mass densities without touching the cumulant/Bell machinery.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phibp/laws.hpp"
#include "phibp/rng.hpp"

namespace phibp {

struct WeightedConfig {
  NestedConfig config;
  // Exact number of labeled nested states (joint partitions of the per-group
  // individuals) collapsing to this canonical configuration.
  std::uint64_t multiplicity = 1;
  double log_multiplicity = 0.0;
};

// Every canonical nested configuration with the given per-group totals, each
// exactly once, with its orbit size.  Canonical form: fine parts sorted
// descending within each (group, species) cell, species records sorted
// descending.  Cap: sum of totals <= 10.
std::vector<WeightedConfig> enumerate_nested_configs(
    std::span<const int> totals);

// Number of labeled single-group states for [n]: pairs (set partition,
// refinement of every block), via T(n) = sum_k C(n-1,k-1) Bell(k) T(n-k).
// The J = 1 enumeration's multiplicities must sum to this.
std::uint64_t labeled_config_count(int n);

// Both normalization identities over the full enumeration:
//   sum_configs multiplicity * p_coarse * p_frag = 1
//   sum_configs multiplicity * p_fine   * p_coag = 1
struct MassCheck {
  std::size_t config_count = 0;
  double coarse_frag_sum = 0.0;
  double fine_coag_sum = 0.0;
};

MassCheck total_mass_check(const HierModel& hier, std::span<const int> totals);

// One enumerated configuration evaluated under both factorizations.
struct DualityRow {
  std::size_t config_id = 0;
  int species = 0;      // r
  int fine_blocks = 0;  // K-tilde
  double log_lhs = 0.0; // log p_coag + log p_fine
  double log_rhs = 0.0; // log p_frag + log p_coarse
  double residual = 0.0;
};

struct DualitySweep {
  std::vector<DualityRow> rows;
  double max_residual = 0.0;
};

// Evaluates the duality residual on every enumerated configuration.  `jobs`
// splits the configuration list across threads; rows come back in enumeration
// order regardless of the split.
DualitySweep duality_sweep(const HierModel& hier, std::span<const int> totals,
                           int jobs = 1);

// One empirical histogram tested against an exact pmf.
struct McStatistic {
  std::string name;
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 0.0;
  double tv_distance = 0.0;  // on the binned (truncated) support
};

// Chi-square plus total-variation comparison of an empirical histogram
// against pmf(v); hist[i] counts occurrences of the value support_min + i.
// Bins with expected count < 5 are pooled into a tail bin, and at most
// max_head_bins individual values are kept before pooling (the exact pmfs
// cost up to O(n^3) per evaluation, so unbounded walks into a polynomial
// tail are unaffordable and add no power).  When total_count >= 0 it is
// taken as the number of observations and hist may cover only the low end
// of the support; everything past the span joins the pooled tail bin.
McStatistic compare_histogram(std::string name, std::span<const long> hist,
                              long support_min,
                              const std::function<double(long)>& pmf,
                              int max_head_bins = 200, long total_count = -1);

struct McComparison {
  long draws = 0;
  std::uint64_t seed = 0;
  std::vector<McStatistic> statistics;

  bool all_pass(double p_floor = 1e-3, double tv_max = 5e-3) const;
};

// Runs `draws` coupled draws and tests, per statistic family, the empirical
// law against the exact one: species count phi vs Poisson(Psi_0(sum psi)),
// per-species block totals vs MtP(tau_0, sum psi), per-group block sizes vs
// MtP(tau_j, gamma_j), per-group totals vs the single-group joint_count_pmf,
// and per-group block counts vs the single-group allocation_pmf.  Draw i uses
// the child stream seed->child(i), so results are independent of `jobs`.
McComparison mc_compare(const HierModel& hier, long draws, std::uint64_t seed,
                        int jobs = 1);

// Density of the positive alpha-stable law normalized by E[e^{-t S}] =
// exp(-t^alpha), computed from the angular integral representation behind
// Kanter's sampler.  Oracle building block; not used by any production path.
double positive_stable_density(double alpha, double x);

// E[sigma(lambda)^n e^{-g sigma(lambda)}] recomputed by direct integration
// against the total-mass density: the gamma family integrates the closed-form
// gamma density; stable / generalized-gamma families integrate the tilted
// scaled stable density, whose evaluation is itself an angular quadrature.
// Independent of psi / cumulants / Bell sums.
double weighted_moment_by_quadrature(const LevyModel& m, double lambda, int n,
                                     double g);

// J = 1 joint moment E[sigma_1(sigma_0(1))^n e^{-gamma sigma_1(sigma_0(1))}]
// by nested integration over (b, t): outer against the density of
// sigma_0(1), inner the weighted moment of sigma_1(b) by quadrature.
// Disagreement with hier_joint_moment beyond ~1e-7 relative indicates a bug
// in the Bell-expansion path.
double quadrature_oracle(const HierModel& hier, std::span<const int> counts);

}  // namespace phibp
