#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "phibp/laws.hpp"
#include "phibp/levy.hpp"
#include "phibp/sampler.hpp"
#include "phibp/special.hpp"
#include "phibp/verify.hpp"

using namespace phibp;

namespace {

HierModel two_group_model() {
  return HierModel(LevyModel::gamma(1.0, 1.0),
                   {LevyModel::gamma(1.0, 1.0), LevyModel::gamma(2.0, 0.5)},
                   {1.0, 0.6});
}

bool same_draw(const CoupledDraw& a, const CoupledDraw& b) {
  if (a.phi != b.phi || a.species.size() != b.species.size()) return false;
  for (std::size_t l = 0; l < a.species.size(); ++l) {
    const SpeciesDraw& x = a.species[l];
    const SpeciesDraw& y = b.species[l];
    if (x.tag != y.tag || x.h != y.h) return false;
    if (x.subblocks.size() != y.subblocks.size()) return false;
    for (std::size_t j = 0; j < x.subblocks.size(); ++j) {
      if (x.subblocks[j].size() != y.subblocks[j].size()) return false;
      for (std::size_t k = 0; k < x.subblocks[j].size(); ++k)
        if (x.subblocks[j][k].count != y.subblocks[j][k].count ||
            x.subblocks[j][k].tag != y.subblocks[j][k].tag)
          return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("coupled draws are pure functions of the seed") {
  const HierModel h = two_group_model();
  RngStream r1(77), r2(77), r3(78);
  const CoupledDraw a = sample_coupled(h, r1);
  const CoupledDraw b = sample_coupled(h, r2);
  CHECK(same_draw(a, b));
  // A different seed changes the draw essentially surely.
  const CoupledDraw c = sample_coupled(h, r3);
  CHECK_FALSE(same_draw(a, c));
}

TEST_CASE("draw structure: block counts, tags, and totals") {
  const HierModel h = two_group_model();
  const CoupledSampler sampler(h);
  std::set<double> tags;
  for (int i = 0; i < 200; ++i) {
    RngStream rng = RngStream(900).child(static_cast<std::uint64_t>(i));
    const CoupledDraw d = sampler.draw(rng);
    REQUIRE(d.phi == static_cast<long>(d.species.size()));
    for (const SpeciesDraw& sp : d.species) {
      REQUIRE(sp.h > 0.0);
      REQUIRE(sp.total_fine_blocks() >= 1);
      tags.insert(sp.tag);
      long blocks = 0;
      for (int j = 0; j < h.groups(); ++j) {
        for (const SubBlockDraw& b :
             sp.subblocks[static_cast<std::size_t>(j)]) {
          REQUIRE(b.count >= 1);
          tags.insert(b.tag);
          ++blocks;
        }
      }
      CHECK(blocks == sp.total_fine_blocks());
    }
  }
  // Uniform tags collide with probability zero.
  std::size_t total_tags = 0;
  for (int i = 0; i < 200; ++i) {
    RngStream rng = RngStream(900).child(static_cast<std::uint64_t>(i));
    const CoupledDraw d = sampler.draw(rng);
    for (const SpeciesDraw& sp : d.species) {
      ++total_tags;
      for (int j = 0; j < h.groups(); ++j)
        total_tags += sp.subblocks[static_cast<std::size_t>(j)].size();
    }
  }
  CHECK(tags.size() == total_tags);
}

TEST_CASE("species count is Poisson with the composed mean") {
  const HierModel h = two_group_model();
  const CoupledSampler sampler(h);
  const double mean = psi(h.tau0, h.sum_psi());
  const int draws = 50000;
  double s = 0.0;
  for (int i = 0; i < draws; ++i) {
    RngStream rng = RngStream(31).child(static_cast<std::uint64_t>(i));
    s += static_cast<double>(sampler.draw(rng).phi);
  }
  CHECK(std::abs(s / draws - mean) < 4.0 * std::sqrt(mean / draws));
}

TEST_CASE("conditional jump draw follows the conjugate gamma law") {
  const HierModel h(LevyModel::gen_gamma(0.4, 1.0, 0.5),
                    {LevyModel::gamma(1.0, 1.0)}, {1.0});
  const double shape = 3.0 - 0.4;
  const double rate = 0.5 + h.sum_psi();
  RngStream rng(4);
  const int draws = 200000;
  double s = 0.0;
  for (int i = 0; i < draws; ++i) s += sample_h_given_x(h, 3, rng);
  const double mean = shape / rate;
  const double sd = std::sqrt(shape) / rate;
  CHECK(std::abs(s / draws - mean) < 4.0 * sd / std::sqrt(draws));
  CHECK_THROWS_AS(sample_h_given_x(h, 0, rng), std::invalid_argument);
}

TEST_CASE("conditional config sampling matches the exact enumeration law") {
  const HierModel h = two_group_model();
  const std::vector<int> totals = {2, 1};

  // Exact law: multiplicity x p_coarse x p_frag, normalized.
  const auto configs = enumerate_nested_configs(totals);
  std::vector<double> exact;
  double norm = 0.0;
  for (const auto& wc : configs) {
    const double w = wc.log_multiplicity + p_coarse(wc.config, h) +
                     p_frag(wc.config, h);
    exact.push_back(std::exp(w));
    norm += exact.back();
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));

  // Bucket sampled configs by (species count, total fine blocks); compare
  // bucketed frequencies  (enough to pin the law on this small state space).
  std::map<std::pair<int, int>, double> expected;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto key = std::make_pair(configs[i].config.species(),
                                    configs[i].config.total_fine_blocks());
    expected[key] += exact[i];
  }
  std::map<std::pair<int, int>, long> observed;
  const int draws = 20000;
  RngStream rng(555);
  for (int i = 0; i < draws; ++i) {
    const NestedConfig c = sample_conditional_given_totals(h, totals, rng);
    ++observed[{c.species(), c.total_fine_blocks()}];
  }
  for (const auto& [key, p] : expected) {
    const double freq = observed[key] / static_cast<double>(draws);
    CHECK(std::abs(freq - p) < 4.0 * std::sqrt(p * (1.0 - p) / draws));
  }
}

TEST_CASE("conditional config sampling: unique config and envelope errors") {
  const HierModel h = two_group_model();
  RngStream rng(1);
  const HierModel h1(LevyModel::gamma(1.0, 1.0), {LevyModel::gamma(1.0, 1.0)},
                     {1.0});
  const NestedConfig c =
      sample_conditional_given_totals(h1, std::vector<int>{1}, rng);
  CHECK(c.species() == 1);
  CHECK(c.counts == std::vector<std::vector<int>>{{1}});

  CHECK_THROWS_AS(
      sample_conditional_given_totals(h, std::vector<int>{9, 1}, rng),
      std::invalid_argument);
  CHECK_THROWS_AS(
      sample_conditional_given_totals(h, std::vector<int>{8, 8}, rng),
      std::invalid_argument);
  CHECK_THROWS_AS(
      sample_conditional_given_totals(h, std::vector<int>{0, 2}, rng),
      std::invalid_argument);
}

TEST_CASE("step functions evaluate prefix sums with inclusive locations") {
  StepFunction f({{0.2, 1}, {0.5, 3}, {0.9, 2}});
  CHECK(f.value_at(0.1) == 0);
  CHECK(f.value_at(0.2) == 1);
  CHECK(f.value_at(0.49) == 1);
  CHECK(f.value_at(0.5) == 4);
  CHECK(f.value_at(1.0) == 6);
  CHECK(StepFunction{}.value_at(1.0) == 0);
}

TEST_CASE("materialized paths reconcile fine and coarse totals") {
  const HierModel h = two_group_model();
  const CoupledSampler sampler(h);
  for (int i = 0; i < 50; ++i) {
    RngStream rng = RngStream(606).child(static_cast<std::uint64_t>(i));
    const CoupledDraw d = sampler.draw(rng);
    const PathSet paths = materialize_paths(d, h.groups());
    for (int j = 0; j < h.groups(); ++j) {
      const auto& ind = paths.individuals[static_cast<std::size_t>(j)];
      const auto& alloc = paths.allocations[static_cast<std::size_t>(j)];
      const auto& z = paths.species_counts[static_cast<std::size_t>(j)];
      CHECK(ind.value_at(1.0) == d.group_total(j));
      CHECK(alloc.value_at(1.0) == d.total_fine_blocks(j));
      CHECK(z.value_at(1.0) == d.group_total(j));
      long per_species = 0;
      for (const StepFunction& fl :
           paths.per_species[static_cast<std::size_t>(j)])
        per_species += fl.value_at(1.0);
      CHECK(per_species == ind.value_at(1.0));
    }
  }

  const PathSet empty = materialize_paths(CoupledDraw{}, 2);
  CHECK(empty.individuals[0].value_at(1.0) == 0);
  CHECK(empty.species_counts[1].value_at(1.0) == 0);
}

TEST_CASE("posterior masses: conjugate blocks and moment-ratio mean") {
  const HierModel h(LevyModel::gamma(1.0, 1.0),
                    {LevyModel::gen_gamma(0.0, 1.0, 1.0)}, {1.0});
  NestedConfig c;
  c.counts = {{3}};
  c.refinement = {{{2, 1}}};
  c.validate();

  const LevyModel& tau1 = h.taus[0];
  const double g1 = h.gammas[0];
  const int n = 3;

  // Mean of the observed block of size 2: Gamma(2 - alpha_1, zeta_1 + g_1).
  RngStream rng(808);
  const int draws = 20000;
  double block_sum = 0.0;
  double diff_sum = 0.0, diff_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto species = sample_posterior_observed(h, c, rng);
    REQUIRE(species.size() == 1);
    block_sum += species[0].block_masses[0][0];

    // Paired control variate: given H = h, the group mass has mean
    // E[sigma_1(h)^{n+1} e^{-g sigma}] / E[sigma_1(h)^n e^{-g sigma}].
    const double lambda = species[0].h;
    const double ratio =
        std::exp(log_weighted_moment(tau1, lambda, n + 1, g1) -
                 log_weighted_moment(tau1, lambda, n, g1));
    const double d = species[0].group_mass[0] - ratio;
    diff_sum += d;
    diff_sq += d * d;
  }
  const double block_mean = (2.0 - tau1.alpha()) / (tau1.zeta() + g1);
  const double block_sd = std::sqrt(2.0 - tau1.alpha()) / (tau1.zeta() + g1);
  CHECK(std::abs(block_sum / draws - block_mean) <
        4.0 * block_sd / std::sqrt(draws));

  const double dm = diff_sum / draws;
  const double dsd = std::sqrt((diff_sq / draws - dm * dm) / draws);
  CHECK(std::abs(dm) < 4.0 * dsd);
}
