#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "phibp/laws.hpp"
#include "phibp/partition.hpp"
#include "phibp/quadrature.hpp"
#include "phibp/special.hpp"
#include "phibp/verify.hpp"

using namespace phibp;

namespace {

HierModel gamma_gamma() {
  return HierModel(LevyModel::gamma(1.0, 1.0), {LevyModel::gamma(1.0, 1.0)},
                   {1.0});
}

// Stable base of index beta/alpha composed with a stable group of index
// alpha: the composite subordinator is beta-stable.
HierModel stable_stable(double alpha, double beta, double g) {
  return HierModel(LevyModel::stable(beta / alpha), {LevyModel::stable(alpha)},
                   {g});
}

NestedConfig one_species(std::vector<int> parts) {
  NestedConfig c;
  int n = 0;
  for (int p : parts) n += p;
  c.counts = {{n}};
  c.refinement = {{parts}};
  return c;
}

}  // namespace

TEST_CASE("model and config validation") {
  CHECK_THROWS_AS(HierModel(LevyModel::gamma(1, 1), {LevyModel::gamma(1, 1)},
                            {0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HierModel(LevyModel::gamma(1, 1), {}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HierModel(LevyModel::gamma(1, 1),
                            {LevyModel::gamma(1, 1), LevyModel::gamma(1, 1)},
                            {1.0}),
                  std::invalid_argument);

  NestedConfig bad;  // refinement does not sum to the count
  bad.counts = {{3}};
  bad.refinement = {{{2}}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  NestedConfig empty_species;  // species observed nowhere
  empty_species.counts = {{2, 0}};
  empty_species.refinement = {{{2}, {}}};
  CHECK_THROWS_AS(empty_species.validate(), std::invalid_argument);

  const NestedConfig ok = one_species({2, 1});
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.species() == 1);
  CHECK(ok.total_fine_blocks() == 2);
  CHECK(ok.species_total(0) == 3);
}

TEST_CASE("allocation probabilities form a probability vector") {
  const HierModel h(LevyModel::gamma(1.0, 1.0),
                    {LevyModel::gamma(2.0, 1.0), LevyModel::stable(0.5)},
                    {1.0, 0.8});
  const auto q = h.allocation_probs();
  REQUIRE(q.size() == 2);
  CHECK(q[0] + q[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(q[0] == doctest::Approx(h.psi_j(0) / h.sum_psi()).epsilon(1e-14));
}

TEST_CASE("composed cumulant: chain rule and stable collapse") {
  // J=1, n=1 is the plain chain rule Psi_0^(1)(psi_1(g)) psi_1^(1)(g).
  const HierModel h(LevyModel::gamma(1.0, 1.0),
                    {LevyModel::gen_gamma(0.4, 1.0, 0.5)}, {1.2});
  const double u = h.sum_psi();
  const std::vector<int> one = {1};
  CHECK(composed_cumulant(h, one) ==
        doctest::Approx(psi_cumulant(h.tau0, 1, u) +
                        psi_cumulant(h.taus[0], 1, 1.2))
            .epsilon(1e-13));

  // Stable-in-stable composes to the beta-stable exponent, so the n-th
  // cumulant is beta Gamma(n-beta)/Gamma(1-beta) g^(beta-n).
  const double alpha = 0.6, beta = 0.3;
  for (double g : {0.7, 1.3}) {
    const HierModel ss = stable_stable(alpha, beta, g);
    for (int n = 1; n <= 5; ++n) {
      const std::vector<int> counts = {n};
      const double expected = std::log(beta) + log_gamma(n - beta) -
                              log_gamma(1.0 - beta) +
                              (beta - n) * std::log(g);
      CHECK(composed_cumulant(ss, counts) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }

  // J=2 gamma/gamma at (1,1): the expansion has the single term
  // Psi_0^(2)(psi_1+psi_2) psi_1^(1) psi_2^(1).
  const HierModel h2(LevyModel::gamma(1.0, 1.0),
                     {LevyModel::gamma(1.0, 1.0), LevyModel::gamma(2.0, 0.5)},
                     {1.0, 0.6});
  const double u2 = h2.sum_psi();
  const std::vector<int> oo = {1, 1};
  CHECK(composed_cumulant(h2, oo) ==
        doctest::Approx(psi_cumulant(h2.tau0, 2, u2) +
                        psi_cumulant(h2.taus[0], 1, 1.0) +
                        psi_cumulant(h2.taus[1], 1, 0.6))
            .epsilon(1e-13));
}

TEST_CASE("joint moment: Laplace edge and contour-derivative cross-check") {
  const HierModel h = gamma_gamma();
  const double u = h.sum_psi();
  const std::vector<int> zero = {0};
  CHECK(hier_joint_moment(h, zero) ==
        doctest::Approx(-psi(h.tau0, u)).epsilon(1e-13));

  // Independent route: E[sigma_1(sigma_0(1))^n e^{-g .}] is (-1)^n times the
  // n-th derivative of F(g) = exp(-Psi_0(psi_1(g))), taken here by Cauchy
  // contour quadrature on the closed-form complex Laplace exponents.
  const auto F = [](std::complex<double> z) {
    const std::complex<double> psi1 = std::log(1.0 + z);   // Gamma(1,1)
    const std::complex<double> comp = std::log(1.0 + psi1);
    return std::exp(-comp);
  };
  for (int n = 1; n <= 4; ++n) {
    const double deriv = contour_derivative(F, 1.0, n, 0.6);
    const double expected = (n % 2 == 0 ? 1.0 : -1.0) *
                            std::exp(hier_joint_moment(h, std::vector<int>{n}));
    CHECK(deriv == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("count pmfs: closed edges and truncated normalization") {
  const HierModel h = gamma_gamma();
  const double log_p0 = -psi(h.tau0, h.sum_psi());
  CHECK(joint_count_pmf(h, std::vector<int>{0}) ==
        doctest::Approx(std::exp(log_p0)).epsilon(1e-13));
  CHECK(allocation_pmf(h, std::vector<int>{0}) ==
        doctest::Approx(std::exp(log_p0)).epsilon(1e-13));

  CompensatedSum counts_sum;
  for (int n = 0; n <= 80; ++n)
    counts_sum.add(joint_count_pmf(h, std::vector<int>{n}));
  CHECK(counts_sum.value() == doctest::Approx(1.0).epsilon(1e-8));

  CompensatedSum alloc_sum;
  for (int k = 0; k <= 80; ++k)
    alloc_sum.add(allocation_pmf(h, std::vector<int>{k}));
  CHECK(alloc_sum.value() == doctest::Approx(1.0).epsilon(1e-8));

  // Two groups, exponential tails: the double truncated sum still closes.
  const HierModel h2(LevyModel::gamma(1.0, 1.0),
                     {LevyModel::gamma(1.0, 2.0), LevyModel::gamma(0.5, 2.0)},
                     {0.5, 0.5});
  CompensatedSum joint2;
  for (int a = 0; a <= 40; ++a)
    for (int b = 0; b <= 40; ++b)
      joint2.add(joint_count_pmf(h2, std::vector<int>{a, b}));
  CHECK(joint2.value() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fragment count law: single-term edge and stable closed form") {
  const HierModel h2(LevyModel::gamma(1.0, 1.0),
                     {LevyModel::gamma(1.0, 1.0), LevyModel::gamma(2.0, 0.5)},
                     {1.0, 0.6});
  const double u = h2.sum_psi();
  const std::vector<int> e1 = {1, 0};
  const double expected =
      std::log(1.0) + psi_cumulant(h2.taus[0], 1, 1.0) +
      psi_cumulant(h2.tau0, 1, u) - std::log(psi(h2.tau0, u));
  CHECK(std::log(fragment_count_pmf(h2, e1)) ==
        doctest::Approx(expected).epsilon(1e-12));

  // Stable-in-stable: species totals are Sibuya(beta), independent of g.
  const double alpha = 0.6, beta = 0.3;
  for (double g : {0.7, 1.3}) {
    const HierModel ss = stable_stable(alpha, beta, g);
    for (int n = 1; n <= 6; ++n) {
      const double sibuya = std::exp(std::log(beta) + log_gamma(n - beta) -
                                     log_gamma(1.0 - beta) -
                                     log_gamma(n + 1.0));
      CHECK(fragment_count_pmf(ss, std::vector<int>{n}) ==
            doctest::Approx(sibuya).epsilon(1e-12));
    }
  }

  CompensatedSum s;
  for (int a = 0; a <= 60; ++a)
    for (int b = (a == 0 ? 1 : 0); b <= 60; ++b)
      s.add(fragment_count_pmf(h2, std::vector<int>{a, b}));
  CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("species jump density: normalization and mixture identity") {
  const HierModel h = gamma_gamma();
  const std::vector<int> two = {2};
  QuadratureOptions opt;
  opt.abs_tol = 1e-11;
  const double mass = integrate_semi_infinite(
      [&](double lambda) { return h_conditional_density(h, two, lambda); },
      opt);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));

  // Mixing the gamma conjugate density over the latent block count with
  // x_given_count weights reproduces the direct formula.
  const HierModel gg(LevyModel::gen_gamma(0.4, 1.0, 0.5),
                     {LevyModel::gamma(1.0, 1.0)}, {1.0});
  const double u = gg.sum_psi();
  const double a0 = gg.tau0.alpha(), z0 = gg.tau0.zeta();
  const int n = 4;
  for (double lambda : {0.3, 1.0, 2.5}) {
    double mix = 0.0;
    for (int x = 1; x <= n; ++x) {
      const double shape = x - a0, rate = z0 + u;
      const double dens = std::exp(shape * std::log(rate) - log_gamma(shape) +
                                   (shape - 1.0) * std::log(lambda) -
                                   rate * lambda);
      mix += x_given_count_pmf(gg, n, x) * dens;
    }
    CHECK(h_conditional_density(gg, std::vector<int>{n}, lambda) ==
          doctest::Approx(mix).epsilon(1e-10));
  }
}

TEST_CASE("latent block count: two independent routes agree") {
  // x_given_count_pmf convolves MtP blocks directly; species_block_count_pmf
  // regroups the chain-rule expansion. Same law, different algebra.
  const HierModel gg(LevyModel::gen_gamma(0.4, 1.0, 0.5),
                     {LevyModel::gen_gamma(0.6, 2.0, 0.1)}, {1.2});
  for (int n = 1; n <= 6; ++n) {
    const std::vector<int> counts = {n};
    const auto chain = species_block_count_pmf(gg, counts);
    REQUIRE(static_cast<int>(chain.size()) == n + 1);
    CHECK(chain[0] == 0.0);
    double total = 0.0;
    for (int x = 1; x <= n; ++x) {
      CHECK(chain[static_cast<std::size_t>(x)] ==
            doctest::Approx(x_given_count_pmf(gg, n, x)).epsilon(1e-11));
      total += chain[static_cast<std::size_t>(x)];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }

  // Stable-in-stable: the law collapses to the fragmentation block-count law.
  const HierModel ss = stable_stable(0.6, 0.3, 1.0);
  for (int n = 1; n <= 6; ++n)
    for (int x = 1; x <= n; ++x)
      CHECK(x_given_count_pmf(ss, n, x) ==
            doctest::Approx(frag_block_count_pmf(0.6, 0.3, n, x))
                .epsilon(1e-12));

  CHECK(x_given_count_pmf(ss, 1, 1) == doctest::Approx(1.0));
}

TEST_CASE("arrival-time density") {
  // Composite beta-stable at n=1: f(g) = beta g^(beta-1) exp(-g^beta), a
  // Weibull density; beta = 1/2, g = 1 gives exp(-1)/2.
  const HierModel ss = stable_stable(0.8, 0.5, 1.0);
  CHECK(arrival_density(ss, std::vector<int>{1}) ==
        doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));

  // Integrates to one over the sampling time.  The stable composite keeps
  // the arrival-time tail stretch-exponential; a gamma-driven composite mass
  // piles up near zero so hard that the n-th arrival has a 1/log tail, which
  // no quadrature reaches.
  QuadratureOptions opt;
  opt.abs_tol = 1e-11;
  opt.power = 2.0;  // integrand grows like g^(2 beta - 1) at the origin
  const double mass = integrate_semi_infinite(
      [&](double g) {
        const HierModel h(LevyModel::stable(0.5), {LevyModel::stable(0.8)},
                          {g});
        return arrival_density(h, std::vector<int>{2});
      },
      opt);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("four conditional laws: point masses at n=1") {
  const HierModel h(LevyModel::gen_gamma(0.4, 1.0, 0.5),
                    {LevyModel::gamma(1.0, 1.0)}, {1.0});
  const NestedConfig c = one_species({1});
  CHECK(p_fine(c, h) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p_coag(c, h) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p_frag(c, h) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p_coarse(c, h) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(duality_residual(c, h) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("coagulation law is Markov in the allocation counts") {
  // Same (x-tilde, K-tilde), different fine part sizes: p_coag identical.
  const HierModel h(LevyModel::gen_gamma(0.4, 1.0, 0.5),
                    {LevyModel::gamma(1.0, 1.0)}, {1.0});
  const NestedConfig a = one_species({2, 1});
  const NestedConfig b = one_species({1, 1});  // same two blocks, n differs
  CHECK(p_coag(a, h) == p_coag(b, h));

  NestedConfig two_species;
  two_species.counts = {{2, 2}};
  two_species.refinement = {{{1, 1}, {2}}};
  NestedConfig swapped;
  swapped.counts = {{3, 1}};
  swapped.refinement = {{{2, 1}, {1}}};
  CHECK(p_coag(two_species, h) == p_coag(swapped, h));
}

TEST_CASE("fragmentation law factorizes over species") {
  const HierModel h(LevyModel::gamma(1.0, 1.0),
                    {LevyModel::gen_gamma(0.5, 1.0, 0.3)}, {0.9});
  NestedConfig joint;
  joint.counts = {{3, 2}};
  joint.refinement = {{{2, 1}, {2}}};
  const double sum = p_frag(one_species({2, 1}), h) + p_frag(one_species({2}), h);
  CHECK(p_frag(joint, h) == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("laws are exchangeable in the species order") {
  const HierModel h(LevyModel::gamma(1.0, 1.0),
                    {LevyModel::gamma(1.0, 1.0), LevyModel::gamma(2.0, 0.5)},
                    {1.0, 0.6});
  NestedConfig c;
  c.counts = {{2, 1}, {0, 2}};
  c.refinement = {{{1, 1}, {1}}, {{}, {2}}};
  c.validate();
  NestedConfig perm;
  perm.counts = {{1, 2}, {2, 0}};
  perm.refinement = {{{1}, {1, 1}}, {{2}, {}}};
  perm.validate();
  CHECK(p_fine(c, h) == doctest::Approx(p_fine(perm, h)).epsilon(1e-13));
  CHECK(p_coag(c, h) == doctest::Approx(p_coag(perm, h)).epsilon(1e-13));
  CHECK(p_frag(c, h) == doctest::Approx(p_frag(perm, h)).epsilon(1e-13));
  CHECK(p_coarse(c, h) == doctest::Approx(p_coarse(perm, h)).epsilon(1e-13));
}

TEST_CASE("duality residual vanishes across mixed-family models") {
  const HierModel h(LevyModel::gen_gamma(0.4, 1.0, 0.5),
                    {LevyModel::gamma(1.2, 0.8), LevyModel::stable(0.55)},
                    {1.0, 1.5});
  for (const auto& wc : enumerate_nested_configs(std::vector<int>{2, 2}))
    CHECK(duality_residual(wc.config, h) < 1e-10);
}

TEST_CASE("laws require every group to be observed") {
  const HierModel h(LevyModel::gamma(1.0, 1.0),
                    {LevyModel::gamma(1.0, 1.0), LevyModel::gamma(1.0, 1.0)},
                    {1.0, 1.0});
  NestedConfig c;  // one species, seen only by group 1; group 2 empty overall
  c.counts = {{2}, {0}};
  c.refinement = {{{2}}, {{}}};
  c.validate();
  CHECK_THROWS_AS(p_fine(c, h), std::invalid_argument);
  CHECK_THROWS_AS(p_coarse(c, h), std::invalid_argument);
}

TEST_CASE("marginal EPPF collapses to classical laws for stable pairs") {
  const double alpha = 0.6, beta = 0.3;
  const LevyModel tau0 = LevyModel::stable(beta / alpha);
  const std::vector<LevyModel> taus = {LevyModel::stable(alpha)};

  NestedConfig c;
  c.counts = {{3, 2}};  // two species, totals 3 and 2
  c.refinement = {{{2, 1}, {2}}};
  c.validate();

  const double coarse =
      marginal_eppf(c, tau0, taus, MarginalSide::Coarse);
  CHECK(std::log(coarse) ==
        doctest::Approx(pd_eppf(beta, std::vector<int>{3, 2})).epsilon(1e-7));

  const double fine = marginal_eppf(c, tau0, taus, MarginalSide::Fine);
  CHECK(std::log(fine) ==
        doctest::Approx(pd_eppf(alpha, std::vector<int>{2, 1, 2}))
            .epsilon(1e-7));

  const double joint = marginal_eppf(c, tau0, taus, MarginalSide::Joint);
  CHECK(std::log(joint) ==
        doctest::Approx(pd_eppf(beta / alpha, std::vector<int>{2, 1}) +
                        pd_eppf(alpha, std::vector<int>{2, 1, 2}))
            .epsilon(1e-7));
}

TEST_CASE("marginal coarse EPPF normalizes over partitions") {
  // Stable pair: the arrival-time tail is stretch-exponential, so the
  // marginalizing integral is numerically complete (gamma-driven composites
  // have a 1/log arrival tail and do not finish).
  const LevyModel tau0 = LevyModel::stable(0.5);
  const std::vector<LevyModel> taus = {LevyModel::stable(0.8)};
  // Partitions of 3 with orbit sizes: (3):1, (2,1):3, (1,1,1):1.
  struct Row {
    std::vector<int> totals;
    double mult;
  };
  const std::vector<Row> rows = {{{3}, 1.0}, {{2, 1}, 3.0}, {{1, 1, 1}, 1.0}};
  CompensatedSum total;
  for (const Row& row : rows) {
    NestedConfig c;
    c.counts = {row.totals};
    c.refinement.resize(1);
    for (int n : row.totals) c.refinement[0].push_back(std::vector<int>{n});
    c.validate();
    total.add(row.mult * marginal_eppf(c, tau0, taus, MarginalSide::Coarse));
  }
  CHECK(total.value() == doctest::Approx(1.0).epsilon(1e-7));
}
