#include "phibp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "phibp/quadrature.hpp"
#include "phibp/sampler.hpp"
#include "phibp/special.hpp"

namespace phibp {

namespace {

constexpr int kEnumerationCap = 10;  // max sum of group totals

// Partitions of m into nonincreasing parts; m = 0 gives the single empty
// partition.
std::vector<std::vector<int>> integer_partitions(int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int rem, int max_part) {
    if (rem == 0) {
      out.push_back(cur);
      return;
    }
    for (int p = std::min(rem, max_part); p >= 1; --p) {
      cur.push_back(p);
      rec(rem - p, p);
      cur.pop_back();
    }
  };
  rec(m, m);
  return out;
}

// One species: its per-group counts and, per group, the fine parts (sorted
// descending) refining that count.
struct SpeciesRecord {
  std::vector<int> counts;
  std::vector<std::vector<int>> parts;

  bool operator==(const SpeciesRecord&) const = default;
};

// Strict total order (descending enumeration uses the reverse).
bool record_less(const SpeciesRecord& a, const SpeciesRecord& b) {
  if (a.counts != b.counts) return a.counts < b.counts;
  return a.parts < b.parts;
}

// All possible species records with counts componentwise <= totals and at
// least one positive count.
std::vector<SpeciesRecord> all_records(std::span<const int> totals) {
  const int J = static_cast<int>(totals.size());
  std::vector<std::vector<std::vector<int>>> parts_of(
      static_cast<std::size_t>(*std::max_element(totals.begin(), totals.end())) +
      1);
  for (int m = 0; m < static_cast<int>(parts_of.size()); ++m)
    parts_of[static_cast<std::size_t>(m)] = integer_partitions(m);

  std::vector<SpeciesRecord> records;
  std::vector<int> counts(static_cast<std::size_t>(J), 0);
  std::function<void(int)> rec_counts = [&](int j) {
    if (j == J) {
      if (std::all_of(counts.begin(), counts.end(),
                      [](int c) { return c == 0; }))
        return;
      // Cartesian product of the per-group partitions of counts[j].
      SpeciesRecord r;
      r.counts = counts;
      r.parts.assign(static_cast<std::size_t>(J), {});
      std::function<void(int)> rec_parts = [&](int g) {
        if (g == J) {
          records.push_back(r);
          return;
        }
        for (const auto& p :
             parts_of[static_cast<std::size_t>(counts[static_cast<std::size_t>(
                 g)])]) {
          r.parts[static_cast<std::size_t>(g)] = p;
          rec_parts(g + 1);
        }
      };
      rec_parts(0);
      return;
    }
    for (int c = 0; c <= totals[static_cast<std::size_t>(j)]; ++c) {
      counts[static_cast<std::size_t>(j)] = c;
      rec_counts(j + 1);
    }
  };
  rec_counts(0);
  std::sort(records.begin(), records.end(),
            [](const SpeciesRecord& a, const SpeciesRecord& b) {
              return record_less(b, a);  // descending
            });
  return records;
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

// Orbit size of a canonical configuration given as a descending sequence of
// species records:
//   prod_j n_j!  /  ( prod_{species runs} m_s! * prod_{j,l} [ prod_k c_k! *
//   prod_{equal-part runs} m_v! ] )
std::uint64_t orbit_size(std::span<const int> totals,
                         const std::vector<SpeciesRecord>& species) {
  std::uint64_t num = 1;
  for (int t : totals) num *= factorial(t);
  std::uint64_t den = 1;
  for (std::size_t l = 0; l < species.size(); ++l) {
    // identical-record run length
    if (l == 0 || !(species[l] == species[l - 1])) {
      std::size_t run = 1;
      while (l + run < species.size() && species[l + run] == species[l]) ++run;
      den *= factorial(static_cast<int>(run));
    }
    for (const auto& parts : species[l].parts) {
      for (std::size_t k = 0; k < parts.size(); ++k) {
        den *= factorial(parts[k]);
        if (k == 0 || parts[k] != parts[k - 1]) {
          std::size_t run = 1;
          while (k + run < parts.size() && parts[k + run] == parts[k]) ++run;
          den *= factorial(static_cast<int>(run));
        }
      }
    }
  }
  if (num % den != 0)
    throw std::logic_error("orbit_size: non-integer multiplicity");
  return num / den;
}

NestedConfig to_config(int groups, const std::vector<SpeciesRecord>& species) {
  NestedConfig c;
  c.counts.assign(static_cast<std::size_t>(groups), {});
  c.refinement.assign(static_cast<std::size_t>(groups), {});
  for (int j = 0; j < groups; ++j) {
    for (const auto& s : species) {
      c.counts[static_cast<std::size_t>(j)].push_back(
          s.counts[static_cast<std::size_t>(j)]);
      c.refinement[static_cast<std::size_t>(j)].push_back(
          s.parts[static_cast<std::size_t>(j)]);
    }
  }
  return c;
}

}  // namespace

std::vector<WeightedConfig> enumerate_nested_configs(
    std::span<const int> totals) {
  if (totals.empty())
    throw std::invalid_argument("enumerate_nested_configs: no groups");
  int sum = 0;
  for (int t : totals) {
    if (t < 0)
      throw std::invalid_argument("enumerate_nested_configs: negative total");
    sum += t;
  }
  if (sum < 1)
    throw std::invalid_argument("enumerate_nested_configs: all totals zero");
  if (sum > kEnumerationCap)
    throw std::invalid_argument(
        "enumerate_nested_configs: sum of totals exceeds the enumeration cap "
        "(10)");

  const int J = static_cast<int>(totals.size());
  const std::vector<SpeciesRecord> records = all_records(totals);

  std::vector<WeightedConfig> out;
  std::vector<SpeciesRecord> chosen;
  std::vector<int> remaining(totals.begin(), totals.end());
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (std::all_of(remaining.begin(), remaining.end(),
                    [](int r) { return r == 0; })) {
      WeightedConfig wc;
      wc.config = to_config(J, chosen);
      wc.multiplicity = orbit_size(totals, chosen);
      wc.log_multiplicity = std::log(static_cast<double>(wc.multiplicity));
      out.push_back(std::move(wc));
      return;
    }
    for (std::size_t i = start; i < records.size(); ++i) {
      const auto& r = records[i];
      bool fits = true;
      for (int j = 0; j < J; ++j)
        fits = fits && r.counts[static_cast<std::size_t>(j)] <=
                           remaining[static_cast<std::size_t>(j)];
      if (!fits) continue;
      for (int j = 0; j < J; ++j)
        remaining[static_cast<std::size_t>(j)] -=
            r.counts[static_cast<std::size_t>(j)];
      chosen.push_back(r);
      rec(i);  // same index again: records may repeat (descending multiset)
      chosen.pop_back();
      for (int j = 0; j < J; ++j)
        remaining[static_cast<std::size_t>(j)] +=
            r.counts[static_cast<std::size_t>(j)];
    }
  };
  rec(0);
  return out;
}

std::uint64_t labeled_config_count(int n) {
  if (n < 0 || n > 20)
    throw std::invalid_argument("labeled_config_count: n out of range");
  // Bell numbers via the Bell triangle.
  std::vector<std::uint64_t> bell(static_cast<std::size_t>(n) + 1, 1);
  {
    std::vector<std::uint64_t> row{1};
    for (int i = 1; i <= n; ++i) {
      std::vector<std::uint64_t> next;
      next.push_back(row.back());
      for (std::uint64_t v : row) next.push_back(next.back() + v);
      bell[static_cast<std::size_t>(i)] = next.front();
      row = std::move(next);
    }
  }
  // Binomials.
  std::vector<std::vector<std::uint64_t>> choose(
      static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    choose[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(i) + 1,
                                               1);
    for (int k = 1; k < i; ++k)
      choose[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          choose[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] +
          choose[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)];
  }
  // T(m) = sum_k C(m-1, k-1) Bell(k) T(m-k): the block containing the first
  // element has size k and refines in Bell(k) ways.
  std::vector<std::uint64_t> t(static_cast<std::size_t>(n) + 1, 0);
  t[0] = 1;
  for (int m = 1; m <= n; ++m)
    for (int k = 1; k <= m; ++k)
      t[static_cast<std::size_t>(m)] +=
          choose[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(k - 1)] *
          bell[static_cast<std::size_t>(k)] * t[static_cast<std::size_t>(m - k)];
  return t[static_cast<std::size_t>(n)];
}

MassCheck total_mass_check(const HierModel& hier, std::span<const int> totals) {
  const std::vector<WeightedConfig> configs = enumerate_nested_configs(totals);
  CompensatedSum coarse_frag;
  CompensatedSum fine_coag;
  for (const WeightedConfig& wc : configs) {
    coarse_frag.add(std::exp(wc.log_multiplicity + p_coarse(wc.config, hier) +
                             p_frag(wc.config, hier)));
    fine_coag.add(std::exp(wc.log_multiplicity + p_fine(wc.config, hier) +
                           p_coag(wc.config, hier)));
  }
  MassCheck mc;
  mc.config_count = configs.size();
  mc.coarse_frag_sum = coarse_frag.value();
  mc.fine_coag_sum = fine_coag.value();
  return mc;
}

DualitySweep duality_sweep(const HierModel& hier, std::span<const int> totals,
                           int jobs) {
  if (jobs < 1) throw std::invalid_argument("duality_sweep: jobs >= 1");
  const std::vector<WeightedConfig> configs = enumerate_nested_configs(totals);
  DualitySweep sweep;
  sweep.rows.resize(configs.size());

  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const NestedConfig& c = configs[i].config;
      DualityRow& row = sweep.rows[i];
      row.config_id = i;
      row.species = c.species();
      row.fine_blocks = c.total_fine_blocks();
      row.log_lhs = p_coag(c, hier) + p_fine(c, hier);
      row.log_rhs = p_frag(c, hier) + p_coarse(c, hier);
      row.residual = std::abs(row.log_lhs - row.log_rhs);
    }
  };

  const std::size_t n = configs.size();
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(worker, b, e);
    }
    for (std::thread& t : pool) t.join();
  }

  for (const DualityRow& row : sweep.rows)
    sweep.max_residual = std::max(sweep.max_residual, row.residual);
  return sweep;
}

McStatistic compare_histogram(std::string name, std::span<const long> hist,
                              long support_min,
                              const std::function<double(long)>& pmf,
                              int max_head_bins, long total_count) {
  if (max_head_bins < 1)
    throw std::invalid_argument("compare_histogram: max_head_bins >= 1");
  long total = total_count;
  if (total < 0) {
    total = 0;
    for (long h : hist) total += h;
  }
  if (total <= 0)
    throw std::invalid_argument("compare_histogram: empty histogram");

  // Head bins while the expected count stays >= 5; everything beyond is one
  // pooled tail bin.
  std::vector<double> expected;
  std::vector<long> observed;
  double head_p = 0.0;
  long head_obs = 0;
  long v = support_min;
  while (static_cast<int>(expected.size()) < max_head_bins) {
    const std::size_t idx = static_cast<std::size_t>(v - support_min);
    // With an explicit total the span may cover only the low end of the
    // support; stop the head walk at its edge rather than misread the counts
    // beyond it as zero.
    if (total_count >= 0 && idx >= hist.size()) break;
    const double p = pmf(v);
    const double e = static_cast<double>(total) * p;
    if (e < 5.0 || head_p + p > 1.0 - 1e-12) break;
    const long o = idx < hist.size() ? hist[idx] : 0;
    expected.push_back(e);
    observed.push_back(o);
    head_p += p;
    head_obs += o;
    ++v;
  }
  double tail_e = static_cast<double>(total) * (1.0 - head_p);
  long tail_o = total - head_obs;
  if (!expected.empty() && tail_e < 5.0) {
    expected.back() += tail_e;
    observed.back() += tail_o;
  } else {
    expected.push_back(tail_e);
    observed.push_back(tail_o);
  }

  McStatistic st;
  st.name = std::move(name);
  st.dof = static_cast<int>(expected.size()) - 1;
  double tv = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const double d = static_cast<double>(observed[i]) - expected[i];
    if (expected[i] > 0.0) st.chi2 += d * d / expected[i];
    tv += std::abs(d);
  }
  st.tv_distance = 0.5 * tv / static_cast<double>(total);
  st.p_value = st.dof >= 1 ? chi_square_sf(st.chi2, st.dof) : 1.0;
  return st;
}

bool McComparison::all_pass(double p_floor, double tv_max) const {
  for (const McStatistic& s : statistics)
    if (s.p_value <= p_floor || s.tv_distance >= tv_max) return false;
  return true;
}

namespace {

// Histogram with a dense head plus sparse overflow: per-event increments stay
// array writes even for heavy-tailed block laws (the MtP tables reach values
// around a million, but almost all events land within a few thousand).
class HistAccum {
 public:
  void add(long v) {
    if (v >= 0 && v < kHead)
      ++head_[static_cast<std::size_t>(v)];
    else
      ++over_[v];
    ++total_;
  }

  void merge(const HistAccum& o) {
    for (long v = 0; v < kHead; ++v)
      head_[static_cast<std::size_t>(v)] += o.head_[static_cast<std::size_t>(v)];
    for (const auto& [k, c] : o.over_) over_[k] += c;
    total_ += o.total_;
  }

  bool empty() const { return total_ == 0; }

  long total() const { return total_; }

  // Counts for values in [support_min, kHead); observations at or beyond
  // kHead stay in the total only, and the chi-square comparison pools them
  // into its tail bin.  The heavy-tailed statistics here reach values around
  // 1e9, so a histogram dense up to the maximum is not an option.
  std::vector<long> head_slice(long support_min) const {
    for (long v = 0; v < std::min(support_min, kHead); ++v)
      if (head_[static_cast<std::size_t>(v)] != 0)
        throw std::logic_error("mc histogram: value below the law's support");
    if (!over_.empty() && over_.begin()->first < 0)
      throw std::logic_error("mc histogram: negative value observed");
    if (support_min >= kHead) return {};
    return std::vector<long>(head_.begin() + support_min, head_.end());
  }

 private:
  static constexpr long kHead = 1 << 12;
  std::vector<long> head_ = std::vector<long>(static_cast<std::size_t>(kHead), 0);
  std::map<long, long> over_;
  long total_ = 0;
};

struct McHists {
  HistAccum phi;
  HistAccum species_blocks;
  HistAccum species_total;              // J = 1 only
  std::vector<HistAccum> block_size;    // per group
  std::vector<HistAccum> group_total;   // per group
  std::vector<HistAccum> group_blocks;  // per group

  explicit McHists(int groups)
      : block_size(static_cast<std::size_t>(groups)),
        group_total(static_cast<std::size_t>(groups)),
        group_blocks(static_cast<std::size_t>(groups)) {}

  void merge(const McHists& o) {
    phi.merge(o.phi);
    species_blocks.merge(o.species_blocks);
    species_total.merge(o.species_total);
    for (std::size_t j = 0; j < block_size.size(); ++j) {
      block_size[j].merge(o.block_size[j]);
      group_total[j].merge(o.group_total[j]);
      group_blocks[j].merge(o.group_blocks[j]);
    }
  }
};

McStatistic compare_accum(std::string name, const HistAccum& hist,
                          long support_min,
                          const std::function<double(long)>& pmf) {
  const std::vector<long> head = hist.head_slice(support_min);
  return compare_histogram(std::move(name), head, support_min, pmf, 200,
                           hist.total());
}

}  // namespace

McComparison mc_compare(const HierModel& hier, long draws, std::uint64_t seed,
                        int jobs) {
  if (draws < 10000)
    throw std::invalid_argument("mc_compare: needs at least 10^4 draws");
  if (jobs < 1) throw std::invalid_argument("mc_compare: jobs >= 1");

  const CoupledSampler sampler(hier);
  const RngStream root(seed);
  const int J = hier.groups();

  auto run_shard = [&](long begin, long end, McHists& h) {
    std::vector<long> totals(static_cast<std::size_t>(J));
    std::vector<long> blocks(static_cast<std::size_t>(J));
    for (long i = begin; i < end; ++i) {
      RngStream rng = root.child(static_cast<std::uint64_t>(i));
      const CoupledDraw d = sampler.draw(rng);
      h.phi.add(d.phi);
      std::fill(totals.begin(), totals.end(), 0);
      std::fill(blocks.begin(), blocks.end(), 0);
      for (const SpeciesDraw& sp : d.species) {
        h.species_blocks.add(sp.total_fine_blocks());
        long sp_total = 0;
        for (int j = 0; j < J; ++j) {
          const auto& sub = sp.subblocks[static_cast<std::size_t>(j)];
          // One representative block per (species, group): the blocks are
          // exchangeable, so the first carries the exact marginal law, and the
          // event count stays of order the draw count.  Pooling every block
          // would accumulate ~10^2 more events and resolve the documented
          // ~1e-4 tail truncation of the sampler tables as a spurious failure.
          if (!sub.empty())
            h.block_size[static_cast<std::size_t>(j)].add(sub.front().count);
          for (const SubBlockDraw& b : sub) {
            totals[static_cast<std::size_t>(j)] += b.count;
            sp_total += b.count;
            ++blocks[static_cast<std::size_t>(j)];
          }
        }
        if (J == 1) h.species_total.add(sp_total);
      }
      for (int j = 0; j < J; ++j) {
        h.group_total[static_cast<std::size_t>(j)].add(
            totals[static_cast<std::size_t>(j)]);
        h.group_blocks[static_cast<std::size_t>(j)].add(
            blocks[static_cast<std::size_t>(j)]);
      }
    }
  };

  McHists hists(J);
  const int workers = static_cast<int>(
      std::min<long>(jobs, std::max<long>(draws / 10000, 1)));
  if (workers <= 1) {
    run_shard(0, draws, hists);
  } else {
    std::vector<McHists> partial(static_cast<std::size_t>(workers), McHists(J));
    std::vector<std::thread> pool;
    const long chunk = (draws + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const long b = static_cast<long>(w) * chunk;
      const long e = std::min(draws, b + chunk);
      if (b < e)
        pool.emplace_back(run_shard, b, e,
                          std::ref(partial[static_cast<std::size_t>(w)]));
    }
    for (std::thread& t : pool) t.join();
    for (const McHists& p : partial) hists.merge(p);
  }

  McComparison out;
  out.draws = draws;
  out.seed = seed;

  const double u = hier.sum_psi();
  const double mean = psi(hier.tau0, u);
  out.statistics.push_back(compare_accum(
      "phi_vs_poisson", hists.phi, 0, [&](long k) {
        return std::exp(-mean + static_cast<double>(k) * std::log(mean) -
                        log_gamma(static_cast<double>(k) + 1.0));
      }));
  if (!hists.species_blocks.empty())
    out.statistics.push_back(compare_accum(
        "species_blocks_vs_mtp", hists.species_blocks, 1,
        [&](long x) { return mtp_pmf(hier.tau0, u, x); }));
  if (J == 1 && !hists.species_total.empty())
    out.statistics.push_back(compare_accum(
        "species_total_vs_fragment", hists.species_total, 1, [&](long n) {
          const int nn[1] = {static_cast<int>(n)};
          return fragment_count_pmf(hier, nn);
        }));
  for (int j = 0; j < J; ++j) {
    const std::string suffix = "_g" + std::to_string(j + 1);
    const LevyModel& tj = hier.taus[static_cast<std::size_t>(j)];
    const double gj = hier.gammas[static_cast<std::size_t>(j)];
    if (!hists.block_size[static_cast<std::size_t>(j)].empty())
      out.statistics.push_back(compare_accum(
          "block_size_vs_mtp" + suffix,
          hists.block_size[static_cast<std::size_t>(j)], 1,
          [&](long c) { return mtp_pmf(tj, gj, c); }));
    // Marginally, one group of the coupled system is the single-group system.
    const HierModel sub(hier.tau0, {tj}, {gj});
    out.statistics.push_back(compare_accum(
        "group_total_vs_count_law" + suffix,
        hists.group_total[static_cast<std::size_t>(j)], 0, [&](long n) {
          const int nn[1] = {static_cast<int>(n)};
          return joint_count_pmf(sub, nn);
        }));
    out.statistics.push_back(compare_accum(
        "group_blocks_vs_allocation" + suffix,
        hists.group_blocks[static_cast<std::size_t>(j)], 0, [&](long k) {
          const int kk[1] = {static_cast<int>(k)};
          return allocation_pmf(sub, kk);
        }));
  }
  return out;
}

double positive_stable_density(double alpha, double x) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("positive_stable_density: alpha in (0,1)");
  if (!(x > 0.0)) return 0.0;
  const double xe = std::pow(x, -alpha / (1.0 - alpha));
  if (xe <= 0.05) {
    // Right tail.  Kanter's integrand develops a boundary spike of width
    // ~ sin(pi alpha) xe^{1-alpha} that eventually slips between bisection
    // nodes, so switch to the inverse-power series
    //   f(x) = (1/pi) sum_k (-1)^{k+1} Gamma(k alpha + 1)/k!
    //          sin(k pi alpha) x^{-k alpha - 1},
    // whose terms decay monotonically from k = 1 in this regime.
    const double lx = std::log(x);
    CompensatedSum sum;
    for (int k = 1; k <= 500; ++k) {
      const double lt = log_gamma(k * alpha + 1.0) - log_gamma(k + 1.0) -
                        (k * alpha + 1.0) * lx;
      sum.add((k % 2 ? 1.0 : -1.0) * std::sin(k * pi * alpha) * std::exp(lt));
      if (std::exp(lt) < 1e-17 * std::abs(sum.value())) break;
    }
    return sum.value() / pi;
  }
  auto f = [&](double phi) {
    // a(phi)^{1/(1-alpha)} with a from Kanter's representation; integrand
    // a * exp(-a * x^{-alpha/(1-alpha)}).
    const double la =
        (alpha * std::log(std::sin(alpha * phi)) +
         (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * phi)) -
         std::log(std::sin(phi))) /
        (1.0 - alpha);
    const double v = std::exp(la - std::exp(la) * xe);
    return std::isfinite(v) ? v : 0.0;
  };
  QuadratureOptions opt;
  // The integrand peaks at roughly e^{-1}/xe; keep the tolerance relative to
  // that so large-x evaluations do not exhaust the bisection depth.
  opt.abs_tol = 1e-12 * std::max(1.0, 0.4 / xe);
  const double integral = integrate(f, 0.0, pi, opt);
  return alpha / ((1.0 - alpha) * pi) * std::pow(x, -1.0 / (1.0 - alpha)) *
         integral;
}

double weighted_moment_by_quadrature(const LevyModel& m, double lambda, int n,
                                     double g) {
  if (!(lambda > 0.0) || !(g > 0.0) || n < 0)
    throw std::invalid_argument("weighted_moment_by_quadrature: bad arguments");
  if (m.alpha() == 0.0) {
    // sigma(lambda) ~ Gamma(lambda theta, zeta); integrate t^n e^{-g t}
    // against its density.
    const double a = lambda * m.theta();
    const double z = m.zeta();
    const double log_head = a * std::log(z) - log_gamma(a);
    auto f = [&](double t) {
      const double lv =
          log_head + (a + static_cast<double>(n) - 1.0) * std::log(t) -
          (z + g) * t;
      const double v = std::exp(lv);
      return std::isfinite(v) ? v : 0.0;
    };
    QuadratureOptions opt;
    opt.abs_tol = 1e-12;
    opt.power = std::max(1.0, 1.0 / (a + static_cast<double>(n)));
    return integrate_semi_infinite(f, opt);
  }
  // sigma(lambda) is an exponentially tilted scaled stable mass:
  // sigma = c S with c = (lambda theta / alpha)^{1/alpha}, tilted by
  // exp(-zeta s) and renormalized by exp(lambda (theta/alpha) zeta^alpha).
  const double alpha = m.alpha();
  const double scale = std::pow(lambda * m.theta() / alpha, 1.0 / alpha);
  const double tilt =
      m.zeta() > 0.0 ? lambda * (m.theta() / alpha) * std::pow(m.zeta(), alpha)
                     : 0.0;
  auto f = [&](double y) {
    const double dens = positive_stable_density(alpha, y);
    if (dens <= 0.0) return 0.0;
    const double s = scale * y;
    const double lv = static_cast<double>(n) * std::log(s) -
                      (g + m.zeta()) * s + tilt + std::log(dens);
    const double v = std::exp(lv);
    return std::isfinite(v) ? v : 0.0;
  };
  QuadratureOptions opt;
  opt.abs_tol = 1e-11;
  return integrate_semi_infinite(f, opt);
}

double quadrature_oracle(const HierModel& hier, std::span<const int> counts) {
  if (hier.groups() != 1 || counts.size() != 1)
    throw std::invalid_argument("quadrature_oracle: single-group models only");
  const int n = counts[0];
  if (n < 0) throw std::invalid_argument("quadrature_oracle: negative count");
  const LevyModel& base = hier.tau0;
  const LevyModel& group = hier.taus[0];
  const double gamma = hier.gammas[0];

  QuadratureOptions opt;
  opt.abs_tol = 1e-10;

  if (base.alpha() == 0.0) {
    const double a0 = base.theta();
    const double z0 = base.zeta();
    const double log_head = a0 * std::log(z0) - log_gamma(a0);
    auto f = [&](double b) {
      const double inner = weighted_moment_by_quadrature(group, b, n, gamma);
      if (inner <= 0.0) return 0.0;
      const double lv =
          log_head + (a0 - 1.0) * std::log(b) - z0 * b + std::log(inner);
      const double v = std::exp(lv);
      return std::isfinite(v) ? v : 0.0;
    };
    opt.power = std::max(1.0, 1.0 / a0);
    return integrate_semi_infinite(f, opt);
  }

  const double alpha0 = base.alpha();
  const double scale0 = std::pow(base.theta() / alpha0, 1.0 / alpha0);
  const double tilt0 =
      base.zeta() > 0.0 ? (base.theta() / alpha0) * std::pow(base.zeta(), alpha0)
                        : 0.0;
  auto f = [&](double y) {
    const double dens = positive_stable_density(alpha0, y);
    if (dens <= 0.0) return 0.0;
    const double b = scale0 * y;
    const double inner = weighted_moment_by_quadrature(group, b, n, gamma);
    if (inner <= 0.0) return 0.0;
    const double v = std::exp(std::log(inner) - base.zeta() * scale0 * y +
                              tilt0 + std::log(dens));
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate_semi_infinite(f, opt);
}

}  // namespace phibp
