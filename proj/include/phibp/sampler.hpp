#pragma once
// Generative sampling of the coupled four-tier process: species arrive as a
// Poisson number of base jumps; each species carries a base jump size H, a
// fine-block count split multinomially across groups, and per-block individual
// counts; uniform tags place everything on [0,1] so the group processes can be
// read back as step functions.
//
// Determinism contract: every draw is a pure function of (model, seed).  Each
// species gets its own child RNG stream keyed by the species index, and each
// (group, block) its own grandchild stream, so the values are independent of
// evaluation order and of how work is scheduled across threads.

#include <cstdint>
#include <vector>

#include "phibp/laws.hpp"
#include "phibp/rng.hpp"

namespace phibp {

struct SubBlockDraw {
  long count = 0;   // individuals in this fine block, >= 1
  double tag = 0.0; // uniform label in (0,1)
};

struct SpeciesDraw {
  double tag = 0.0; // species label in (0,1)
  double h = 0.0;   // base jump size behind the species
  std::vector<std::vector<SubBlockDraw>> subblocks;  // [group][block]

  long fine_blocks(int j) const {  // X_j
    return static_cast<long>(subblocks[static_cast<std::size_t>(j)].size());
  }
  long total_fine_blocks() const;  // X-tilde
  long group_count(int j) const;   // sum of block counts in group j
};

struct CoupledDraw {
  long phi = 0;  // number of species
  std::vector<SpeciesDraw> species;

  long total_fine_blocks(int j) const;  // K_j
  long group_total(int j) const;        // n_j
};

// Reusable sampler for the full coupled state at the model's sampling times:
// phi ~ Poisson(Psi_0(sum psi)); per species, X-tilde from the mixed truncated
// Poisson of the base model at sum psi, H | X-tilde by gamma conjugacy, the
// group split Multinomial(q), and block counts from the per-group mixed
// truncated Poisson laws.  Construction tabulates the count laws once, so
// repeated draws are cheap.
class CoupledSampler {
 public:
  explicit CoupledSampler(HierModel hier);
  CoupledDraw draw(RngStream& rng) const;
  const HierModel& model() const { return hier_; }

 private:
  HierModel hier_;
  double sum_psi_;
  double species_mean_;  // Psi_0(sum psi)
  MtpSampler base_count_;
  std::vector<MtpSampler> block_count_;
  std::vector<double> split_cdf_;
};

CoupledDraw sample_coupled(const HierModel& hier, RngStream& rng);

// H | X-tilde = x: Gamma(x - alpha_0, zeta_0 + sum psi) (exact for the whole
// generalized-gamma class).
double sample_h_given_x(const HierModel& hier, int x, RngStream& rng);

// Exact conditional draw of the nested configuration given the group totals,
// by weighted selection over the complete enumeration (multiplicity x
// p_coarse x p_frag).  Envelope: sum of totals <= 10.
NestedConfig sample_conditional_given_totals(const HierModel& hier,
                                             std::span<const int> totals,
                                             RngStream& rng);

// Counting paths on [0,1] built from the tags of a draw.
class StepFunction {
 public:
  StepFunction() = default;
  explicit StepFunction(std::vector<std::pair<double, long>> jumps);
  long value_at(double y) const;  // sum of increments at locations <= y
  const std::vector<std::pair<double, long>>& jumps() const { return jumps_; }

 private:
  std::vector<std::pair<double, long>> jumps_;  // sorted by location
};

struct PathSet {
  std::vector<StepFunction> individuals;   // I_j: block counts at block tags
  std::vector<StepFunction> allocations;   // A_j: +1 per block at block tags
  std::vector<StepFunction> species_counts;  // Z_j: group count at species tags
  std::vector<std::vector<StepFunction>> per_species;  // F_{j,l} at block tags
};

PathSet materialize_paths(const CoupledDraw& draw, int groups);

// Posterior decomposition of one observed species: the base jump H, and per
// group the observed block masses S_k (size-biased gamma draws), the thinned
// remainder mass, and their total.
struct PosteriorSpecies {
  double h = 0.0;
  std::vector<std::vector<double>> block_masses;  // [group][block]
  std::vector<double> remainder;                  // [group]
  std::vector<double> group_mass;                 // [group] = sum blocks + rem
};

// For each species of the config: draws H from its count-conditional law
// (a gamma mixture over the latent block count, exact for the GG class), then
// given H = lambda the per-group masses: S_k ~ Gamma(c_k - alpha_j,
// zeta_j + gamma_j) for each observed block, plus the total mass of the
// tilted remainder subordinator (Levy density lambda e^{-gamma_j s} tau_j(s)).
std::vector<PosteriorSpecies> sample_posterior_observed(
    const HierModel& hier, const NestedConfig& config, RngStream& rng);

}  // namespace phibp
