#include "phibp/partition.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "phibp/special.hpp"

namespace phibp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_blocks(std::span<const int> blocks) {
  if (blocks.empty())
    throw std::invalid_argument("eppf: block list must be nonempty");
  for (int b : blocks)
    if (b < 1) throw std::invalid_argument("eppf: block sizes must be >= 1");
}

}  // namespace

double pd_eppf(double beta, std::span<const int> blocks) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("pd_eppf: requires 0 <= beta < 1");
  if (beta == 0.0) {
    // Degenerate single-block law; (0, 0) sits outside pd_theta_eppf's
    // parameter domain, so handle it here.
    check_blocks(blocks);
    return blocks.size() == 1 ? 0.0 : kNegInf;
  }
  return pd_theta_eppf(beta, 0.0, blocks);
}

double pd_theta_eppf(double beta, double theta, std::span<const int> blocks) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("pd_theta_eppf: requires 0 <= beta < 1");
  if (!(theta > -beta))
    throw std::invalid_argument("pd_theta_eppf: requires theta > -beta");
  check_blocks(blocks);
  const int r = static_cast<int>(blocks.size());
  const int n = std::accumulate(blocks.begin(), blocks.end(), 0);
  double lp = 0.0;
  // theta > -beta makes every seating factor theta + i beta positive.
  for (int i = 1; i < r; ++i) lp += std::log(theta + i * beta);
  lp -= log_rising(theta + 1.0, n - 1);
  for (int b : blocks) lp += log_rising(1.0 - beta, b - 1);
  return lp;
}

StirlingTable::StirlingTable(double alpha, int n_max)
    : alpha_(alpha), n_max_(n_max) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("StirlingTable: requires 0 <= alpha < 1");
  if (n_max < 1) throw std::invalid_argument("StirlingTable: requires n_max >= 1");
  const std::size_t dim = static_cast<std::size_t>(n_max) + 1;
  log_s_.assign(dim * dim, kNegInf);
  auto at = [&](int n, int k) -> double& {
    return log_s_[static_cast<std::size_t>(n) * dim + static_cast<std::size_t>(k)];
  };
  at(1, 1) = 0.0;
  for (int n = 1; n < n_max; ++n)
    for (int k = 1; k <= n + 1; ++k) {
      double v = (k > 1) ? at(n, k - 1) : kNegInf;
      if (k <= n) {
        const double coef = n - k * alpha;  // > 0 since k <= n and alpha < 1
        v = log_add_exp(v, std::log(coef) + at(n, k));
      }
      at(n + 1, k) = v;
    }
}

double StirlingTable::log_s(int n, int k) const {
  if (n < 1 || n > n_max_ || k < 1 || k > n)
    throw std::invalid_argument(
        "StirlingTable::log_s: requires 1 <= k <= n <= n_max");
  const std::size_t dim = static_cast<std::size_t>(n_max_) + 1;
  return log_s_[static_cast<std::size_t>(n) * dim + static_cast<std::size_t>(k)];
}

double gen_stirling(double alpha, int n, int k) {
  return StirlingTable(alpha, n).log_s(n, k);
}

double block_count_pmf(double beta, int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("block_count_pmf: bad (n, k)");
  return std::exp((k - 1) * std::log(beta) + log_gamma(k) - log_gamma(n) +
                  gen_stirling(beta, n, k));
}

double frag_block_count_pmf(double alpha, double beta, int n, int k) {
  if (!(beta > 0.0 && beta < alpha && alpha < 1.0))
    throw std::invalid_argument(
        "frag_block_count_pmf: requires 0 < beta < alpha < 1");
  if (k < 1 || k > n)
    throw std::invalid_argument("frag_block_count_pmf: bad (n, k)");
  const double ba = beta / alpha;
  const double log_w = log_gamma(n) + log_gamma(k - ba) + log_gamma(1.0 - beta) -
                       log_gamma(k) - log_gamma(1.0 - ba) - log_gamma(n - beta);
  return std::exp(log_w) * block_count_pmf(alpha, n, k);
}

namespace {

void walk_partitions(
    int n, int pos, std::vector<int>& assign, int used,
    std::vector<std::vector<int>>& blocks,
    const std::function<void(const std::vector<std::vector<int>>&)>& fn) {
  if (pos == n) {
    fn(blocks);
    return;
  }
  // Restricted growth: element `pos` joins an existing block or opens block
  // `used`; the recursion order yields lexicographic growth strings, and
  // blocks are automatically sorted by least element.
  for (int b = 0; b <= used; ++b) {
    const bool fresh = (b == used);
    if (fresh) blocks.emplace_back();
    blocks[static_cast<std::size_t>(b)].push_back(pos);
    assign[static_cast<std::size_t>(pos)] = b;
    walk_partitions(n, pos + 1, assign, used + (fresh ? 1 : 0), blocks, fn);
    blocks[static_cast<std::size_t>(b)].pop_back();
    if (fresh) blocks.pop_back();
  }
}

}  // namespace

void for_each_set_partition(
    int n, const std::function<void(const std::vector<std::vector<int>>&)>& fn) {
  if (n < 1 || n > 12)
    throw std::invalid_argument("for_each_set_partition: requires 1 <= n <= 12");
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> blocks;
  walk_partitions(n, 0, assign, 0, blocks, fn);
}

std::vector<std::vector<std::vector<int>>> enumerate_set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  for_each_set_partition(n, [&](const std::vector<std::vector<int>>& p) {
    out.push_back(p);
  });
  return out;
}

}  // namespace phibp
