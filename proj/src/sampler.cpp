#include "phibp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "phibp/special.hpp"
#include "phibp/verify.hpp"

namespace phibp {

long SpeciesDraw::total_fine_blocks() const {
  long t = 0;
  for (const auto& g : subblocks) t += static_cast<long>(g.size());
  return t;
}

long SpeciesDraw::group_count(int j) const {
  long t = 0;
  for (const SubBlockDraw& b : subblocks[static_cast<std::size_t>(j)])
    t += b.count;
  return t;
}

long CoupledDraw::total_fine_blocks(int j) const {
  long t = 0;
  for (const SpeciesDraw& s : species) t += s.fine_blocks(j);
  return t;
}

long CoupledDraw::group_total(int j) const {
  long t = 0;
  for (const SpeciesDraw& s : species) t += s.group_count(j);
  return t;
}

CoupledSampler::CoupledSampler(HierModel hier)
    : hier_(std::move(hier)),
      sum_psi_(hier_.sum_psi()),
      species_mean_(psi(hier_.tau0, sum_psi_)),
      // The base count is drawn once per species (cold path), so use a longer
      // table than the per-block samplers: for Sibuya-type tails this cuts the
      // truncated mass fourfold at negligible cost.
      base_count_(hier_.tau0, sum_psi_, 1e-12, 1 << 22) {
  block_count_.reserve(static_cast<std::size_t>(hier_.groups()));
  for (int j = 0; j < hier_.groups(); ++j)
    block_count_.emplace_back(hier_.taus[static_cast<std::size_t>(j)],
                              hier_.gammas[static_cast<std::size_t>(j)]);
  split_cdf_ = hier_.allocation_probs();
  for (std::size_t j = 1; j < split_cdf_.size(); ++j)
    split_cdf_[j] += split_cdf_[j - 1];
}

CoupledDraw CoupledSampler::draw(RngStream& rng) const {
  const int J = hier_.groups();
  const double alpha0 = hier_.tau0.alpha();
  const double zeta0 = hier_.tau0.zeta();

  CoupledDraw d;
  d.phi = rng.poisson(species_mean_);
  d.species.reserve(static_cast<std::size_t>(d.phi));
  for (long l = 0; l < d.phi; ++l) {
    // Per-species child stream: the draw is the same whatever order species
    // are realized in.
    RngStream s = rng.child(static_cast<std::uint64_t>(l));
    SpeciesDraw sp;
    sp.tag = s.uniform();
    const long x = base_count_.draw(s);
    sp.h = s.gamma(static_cast<double>(x) - alpha0, zeta0 + sum_psi_);
    // Count the multinomial split first so each group's block vector is one
    // exact-size allocation; x is heavy-tailed, and growth-by-doubling here
    // fragments the heap badly over many draws.
    std::vector<long> split(static_cast<std::size_t>(J), 0);
    for (long t = 0; t < x; ++t) ++split[sample_from_cdf(s, split_cdf_)];
    sp.subblocks.assign(static_cast<std::size_t>(J), {});
    for (int j = 0; j < J; ++j) {
      auto& blocks = sp.subblocks[static_cast<std::size_t>(j)];
      blocks.resize(static_cast<std::size_t>(split[static_cast<std::size_t>(j)]));
      const RngStream group_stream = s.child(static_cast<std::uint64_t>(1 + j));
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        RngStream b = group_stream.child(static_cast<std::uint64_t>(k));
        blocks[k].count = block_count_[static_cast<std::size_t>(j)].draw(b);
        blocks[k].tag = b.uniform();
      }
    }
    d.species.push_back(std::move(sp));
  }
  return d;
}

CoupledDraw sample_coupled(const HierModel& hier, RngStream& rng) {
  return CoupledSampler(hier).draw(rng);
}

double sample_h_given_x(const HierModel& hier, int x, RngStream& rng) {
  if (x < 1) throw std::invalid_argument("sample_h_given_x: x >= 1");
  return rng.gamma(static_cast<double>(x) - hier.tau0.alpha(),
                   hier.tau0.zeta() + hier.sum_psi());
}

NestedConfig sample_conditional_given_totals(const HierModel& hier,
                                             std::span<const int> totals,
                                             RngStream& rng) {
  if (static_cast<int>(totals.size()) != hier.groups())
    throw std::invalid_argument(
        "sample_conditional_given_totals: totals/groups mismatch");
  if (hier.groups() > 2)
    throw std::invalid_argument(
        "sample_conditional_given_totals: at most two groups");
  for (int n : totals)
    if (n < 1 || n > 8)
      throw std::invalid_argument(
          "sample_conditional_given_totals: group totals must lie in 1..8");

  const std::vector<WeightedConfig> configs = enumerate_nested_configs(totals);
  std::vector<double> logw(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i)
    logw[i] = configs[i].log_multiplicity +
              p_coarse(configs[i].config, hier) +
              p_frag(configs[i].config, hier);
  const double norm = log_sum_exp(logw);
  std::vector<double> cdf(configs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    acc += std::exp(logw[i] - norm);
    cdf[i] = acc;
  }
  cdf.back() = 1.0;
  return configs[sample_from_cdf(rng, cdf)].config;
}

StepFunction::StepFunction(std::vector<std::pair<double, long>> jumps)
    : jumps_(std::move(jumps)) {
  std::sort(jumps_.begin(), jumps_.end());
}

long StepFunction::value_at(double y) const {
  long v = 0;
  for (const auto& [loc, inc] : jumps_) {
    if (loc > y) break;
    v += inc;
  }
  return v;
}

PathSet materialize_paths(const CoupledDraw& draw, int groups) {
  if (groups < 1) throw std::invalid_argument("materialize_paths: groups >= 1");
  for (const SpeciesDraw& sp : draw.species)
    if (static_cast<int>(sp.subblocks.size()) != groups)
      throw std::invalid_argument(
          "materialize_paths: species group count mismatch");

  PathSet ps;
  ps.per_species.assign(static_cast<std::size_t>(groups), {});
  for (int j = 0; j < groups; ++j) {
    std::vector<std::pair<double, long>> ind;
    std::vector<std::pair<double, long>> alloc;
    std::vector<std::pair<double, long>> spc;
    auto& per_species_j = ps.per_species[static_cast<std::size_t>(j)];
    for (const SpeciesDraw& sp : draw.species) {
      std::vector<std::pair<double, long>> fine;
      for (const SubBlockDraw& b : sp.subblocks[static_cast<std::size_t>(j)]) {
        ind.emplace_back(b.tag, b.count);
        alloc.emplace_back(b.tag, 1);
        fine.emplace_back(b.tag, b.count);
      }
      const long c = sp.group_count(j);
      if (c > 0) spc.emplace_back(sp.tag, c);
      per_species_j.emplace_back(StepFunction(std::move(fine)));
    }
    ps.individuals.emplace_back(StepFunction(std::move(ind)));
    ps.allocations.emplace_back(StepFunction(std::move(alloc)));
    ps.species_counts.emplace_back(StepFunction(std::move(spc)));
    // The individual-count path and the species-count path record the same
    // individuals through different groupings; their totals must agree.
    if (ps.individuals[static_cast<std::size_t>(j)].value_at(1.0) !=
        ps.species_counts[static_cast<std::size_t>(j)].value_at(1.0))
      throw std::logic_error("materialize_paths: path totals disagree");
  }
  return ps;
}

std::vector<PosteriorSpecies> sample_posterior_observed(
    const HierModel& hier, const NestedConfig& config, RngStream& rng) {
  config.validate();
  if (config.groups() != hier.groups())
    throw std::invalid_argument(
        "sample_posterior_observed: config/model group mismatch");

  const int J = hier.groups();
  const double u = hier.sum_psi();
  const double alpha0 = hier.tau0.alpha();
  const double zeta0 = hier.tau0.zeta();

  std::vector<PosteriorSpecies> out;
  out.reserve(static_cast<std::size_t>(config.species()));
  for (int l = 0; l < config.species(); ++l) {
    const std::vector<int> counts = config.species_counts(l);
    // Latent total block count of the species, then H by gamma conjugacy --
    // together these integrate to the exact count-conditional density of H.
    const std::vector<double> pmf = species_block_count_pmf(hier, counts);
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (std::size_t s = 0; s < pmf.size(); ++s) {
      acc += pmf[s];
      cdf[s] = acc;
    }
    cdf.back() = 1.0;
    const auto s = static_cast<double>(sample_from_cdf(rng, cdf));

    PosteriorSpecies post;
    post.h = rng.gamma(s - alpha0, zeta0 + u);
    post.block_masses.assign(static_cast<std::size_t>(J), {});
    post.remainder.assign(static_cast<std::size_t>(J), 0.0);
    post.group_mass.assign(static_cast<std::size_t>(J), 0.0);
    for (int j = 0; j < J; ++j) {
      const LevyModel& tj = hier.taus[static_cast<std::size_t>(j)];
      const double gj = hier.gammas[static_cast<std::size_t>(j)];
      double mass = 0.0;
      for (int c : config.refinement[static_cast<std::size_t>(j)]
                                    [static_cast<std::size_t>(l)]) {
        const double m =
            rng.gamma(static_cast<double>(c) - tj.alpha(), tj.zeta() + gj);
        post.block_masses[static_cast<std::size_t>(j)].push_back(m);
        mass += m;
      }
      const double rem = sample_total_mass(tj.tilted(gj), post.h, rng);
      post.remainder[static_cast<std::size_t>(j)] = rem;
      post.group_mass[static_cast<std::size_t>(j)] = mass + rem;
    }
    out.push_back(std::move(post));
  }
  return out;
}

}  // namespace phibp
