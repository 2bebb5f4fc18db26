#pragma once
// Classical exchangeable-partition combinatorics: two-parameter EPPFs,
// generalized Stirling numbers, block-count distributions, and set-partition
// enumeration.  EPPFs take block sizes only; callers that need labeled
// probabilities multiply by explicit orbit multiplicities themselves.

#include <functional>
#include <span>
#include <vector>

namespace phibp {

// log EPPF of the one-parameter family driven by a stable(beta) subordinator:
//   p_beta(n_1..n_r) = beta^(r-1) Gamma(r)/Gamma(n) prod_l (1-beta)_{n_l - 1}.
// beta = 0 degenerates to the single-block law (r >= 2 has probability 0).
double pd_eppf(double beta, std::span<const int> blocks);

// log EPPF of the two-parameter (beta, theta) family, theta > -beta.  Computed
// by the sequential-seating product
//   [prod_{i=1}^{r-1} (theta + i beta)] / (theta+1)_{n-1} * prod_l (1-beta)_{n_l-1},
// which is well defined at beta = 0 and at negative theta, where the
// Gamma-ratio form of the prefactor is indeterminate.
double pd_theta_eppf(double beta, double theta, std::span<const int> blocks);

// Generalized Stirling numbers S_alpha(n, k) in log scale, from the triangular
// recurrence S(n+1, k) = S(n, k-1) + (n - k alpha) S(n, k), S(1,1) = 1.
// All entries are positive for 0 <= alpha < 1, so log-space addition is exact.
class StirlingTable {
 public:
  StirlingTable(double alpha, int n_max);
  double log_s(int n, int k) const;  // 1 <= k <= n <= n_max
  int n_max() const { return n_max_; }
  double alpha() const { return alpha_; }

 private:
  double alpha_;
  int n_max_;
  std::vector<double> log_s_;  // row-major (n_max+1) x (n_max+1)
};

double gen_stirling(double alpha, int n, int k);  // log S_alpha(n, k)

// Block-count law of the one-parameter family:
//   P(K_n = k) = beta^(k-1) Gamma(k)/Gamma(n) S_beta(n, k).
double block_count_pmf(double beta, int n, int k);

// Block-count law of the (alpha, -beta) fragmentation family, 0 < beta < alpha:
//   P(k) = Gamma(n)Gamma(k - beta/alpha)Gamma(1-beta) /
//          (Gamma(k)Gamma(1 - beta/alpha)Gamma(n - beta)) * [alpha-family P(k)].
double frag_block_count_pmf(double alpha, double beta, int n, int k);

// All set partitions of {0, .., n-1} in least-element order: within a
// partition, blocks are ordered by their smallest member; partitions are
// produced in lexicographic order of their restricted-growth string.
// n is capped at 12 (Bell(12) = 4213597).
void for_each_set_partition(
    int n, const std::function<void(const std::vector<std::vector<int>>&)>& fn);

std::vector<std::vector<std::vector<int>>> enumerate_set_partitions(int n);

}  // namespace phibp
