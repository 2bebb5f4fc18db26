// Command-line front end: reads one JSON experiment config, runs the requested
// check or sampling task, and writes deterministic artifacts (report.json plus
// task-specific CSV/JSON tables) into --out.  Exit codes: 0 all checks passed,
// 1 a check failed or a computation did not converge, 2 the config or the
// command line is invalid.
//
// Reruns with the same config, seed, and build produce byte-identical
// artifacts; wall-clock timing is printed to stderr only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phibp/laws.hpp"
#include "phibp/levy.hpp"
#include "phibp/partition.hpp"
#include "phibp/report.hpp"
#include "phibp/sampler.hpp"
#include "phibp/stable.hpp"
#include "phibp/verify.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace phibp;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfigError = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

LevyModel parse_levy(const ordered_json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "stable") return LevyModel::stable(j.at("alpha").get<double>());
  if (family == "gamma")
    return LevyModel::gamma(j.at("theta").get<double>(),
                            j.at("zeta").get<double>());
  if (family == "gen_gamma")
    return LevyModel::gen_gamma(j.at("alpha").get<double>(),
                                j.at("theta").get<double>(),
                                j.at("zeta").get<double>());
  throw ConfigError("model: unknown family \"" + family + "\"");
}

std::vector<LevyModel> parse_groups(const ordered_json& j) {
  std::vector<LevyModel> groups;
  for (const auto& g : j.at("groups")) groups.push_back(parse_levy(g));
  if (groups.empty()) throw ConfigError("model: needs at least one group");
  return groups;
}

HierModel parse_model(const ordered_json& j) {
  return HierModel(parse_levy(j.at("base")), parse_groups(j),
                   j.at("gammas").get<std::vector<double>>());
}

NestedConfig parse_nested_config(const ordered_json& j) {
  NestedConfig c;
  c.counts = j.at("counts").get<std::vector<std::vector<int>>>();
  c.refinement =
      j.at("refinement").get<std::vector<std::vector<std::vector<int>>>>();
  c.validate();
  return c;
}

MarginalSide parse_side(const std::string& s) {
  if (s == "coarse") return MarginalSide::Coarse;
  if (s == "fine") return MarginalSide::Fine;
  if (s == "joint") return MarginalSide::Joint;
  throw ConfigError("side must be coarse, fine, or joint");
}

ordered_json base_report(const ordered_json& cfg, const std::string& task) {
  ordered_json rep;
  rep["schema_version"] = kReportSchemaVersion;
  rep["task"] = task;
  if (cfg.contains("model")) rep["model"] = cfg.at("model");
  if (cfg.contains("stable")) rep["stable"] = cfg.at("stable");
  return rep;
}

void write_report(const fs::path& out, const ordered_json& rep) {
  write_text_atomic(out / "report.json", rep.dump(2) + "\n");
}

// ---------------------------------------------------------------- task bodies

int run_verify_duality(const ordered_json& cfg, const fs::path& out, int jobs) {
  const HierModel hier = parse_model(cfg.at("model"));
  const std::vector<int> totals = cfg.at("totals").get<std::vector<int>>();
  const double tol = cfg.value("tolerance", 1e-10);

  const DualitySweep sweep = duality_sweep(hier, totals, jobs);
  write_text_atomic(out / "duality.csv", duality_csv(sweep));

  ordered_json rep = base_report(cfg, "verify-duality");
  rep["totals"] = totals;
  rep["results"] = {{"config_count", sweep.rows.size()},
                    {"max_residual", sweep.max_residual},
                    {"tolerance", tol}};
  const bool pass = sweep.max_residual <= tol;
  rep["pass"] = pass;
  write_report(out, rep);
  return pass ? kPass : kFail;
}

int run_normalize(const ordered_json& cfg, const fs::path& out) {
  const HierModel hier = parse_model(cfg.at("model"));
  const std::vector<int> totals = cfg.at("totals").get<std::vector<int>>();
  const double tol = cfg.value("tolerance", 1e-8);

  const MassCheck mc = total_mass_check(hier, totals);
  const std::vector<std::pair<std::string, double>> sums = {
      {"coarse_times_frag", mc.coarse_frag_sum},
      {"fine_times_coag", mc.fine_coag_sum}};
  write_text_atomic(out / "normalize.csv", normalize_csv(sums));

  ordered_json rep = base_report(cfg, "normalize");
  rep["totals"] = totals;
  rep["results"] = {{"config_count", mc.config_count},
                    {"coarse_times_frag", mc.coarse_frag_sum},
                    {"fine_times_coag", mc.fine_coag_sum},
                    {"tolerance", tol}};
  const bool pass = std::abs(mc.coarse_frag_sum - 1.0) <= tol &&
                    std::abs(mc.fine_coag_sum - 1.0) <= tol;
  rep["pass"] = pass;
  write_report(out, rep);
  return pass ? kPass : kFail;
}

int run_sample(const ordered_json& cfg, const fs::path& out,
               std::uint64_t seed) {
  const HierModel hier = parse_model(cfg.at("model"));
  const long draws = cfg.value("draws", 1L);
  if (draws < 1) throw ConfigError("sample: draws >= 1");

  const CoupledSampler sampler(hier);
  const RngStream root(seed);
  ordered_json all = ordered_json::array();
  for (long i = 0; i < draws; ++i) {
    RngStream rng = root.child(static_cast<std::uint64_t>(i));
    const CoupledDraw d = sampler.draw(rng);
    ordered_json jd;
    jd["phi"] = d.phi;
    ordered_json totals = ordered_json::array();
    ordered_json blocks = ordered_json::array();
    for (int j = 0; j < hier.groups(); ++j) {
      totals.push_back(d.group_total(j));
      blocks.push_back(d.total_fine_blocks(j));
    }
    jd["group_totals"] = std::move(totals);
    jd["fine_block_counts"] = std::move(blocks);
    ordered_json species = ordered_json::array();
    for (const SpeciesDraw& sp : d.species) {
      ordered_json js;
      js["tag"] = sp.tag;
      js["h"] = sp.h;
      ordered_json groups = ordered_json::array();
      for (const auto& g : sp.subblocks) {
        ordered_json jg = ordered_json::array();
        for (const SubBlockDraw& b : g)
          jg.push_back({{"count", b.count}, {"tag", b.tag}});
        groups.push_back(std::move(jg));
      }
      js["blocks"] = std::move(groups);
      species.push_back(std::move(js));
    }
    jd["species"] = std::move(species);
    all.push_back(std::move(jd));
  }
  write_text_atomic(out / "draws.json", all.dump(2) + "\n");

  ordered_json rep = base_report(cfg, "sample");
  rep["seed"] = seed;
  rep["results"] = {{"draws", draws}};
  rep["pass"] = true;
  write_report(out, rep);
  return kPass;
}

int run_mc_compare(const ordered_json& cfg, const fs::path& out,
                   std::uint64_t seed, int jobs) {
  const HierModel hier = parse_model(cfg.at("model"));
  const long draws = cfg.value("draws", 200000L);
  const double p_floor = cfg.value("p_floor", 1e-3);
  const double tv_max = cfg.value("tv_max", 5e-3);

  const McComparison mc = mc_compare(hier, draws, seed, jobs);
  write_text_atomic(out / "mc_compare.csv", mc_csv(mc));

  ordered_json rep = base_report(cfg, "mc-compare");
  rep["seed"] = seed;
  ordered_json stats = ordered_json::array();
  for (const McStatistic& s : mc.statistics)
    stats.push_back({{"statistic", s.name},
                     {"chi2", s.chi2},
                     {"dof", s.dof},
                     {"p_value", s.p_value},
                     {"tv_distance", s.tv_distance}});
  rep["results"] = {{"draws", draws},
                    {"p_floor", p_floor},
                    {"tv_max", tv_max},
                    {"statistics", std::move(stats)}};
  const bool pass = mc.all_pass(p_floor, tv_max);
  rep["pass"] = pass;
  write_report(out, rep);
  return pass ? kPass : kFail;
}

int run_stable_master(const ordered_json& cfg, const fs::path& out) {
  const ordered_json& sj = cfg.at("stable");
  const double alpha = sj.at("alpha").get<double>();
  const double beta = sj.at("beta").get<double>();
  const double theta = sj.value("theta", 0.0);
  std::vector<double> zetas =
      cfg.value("zetas", std::vector<double>{sj.value("zeta", 1.0)});
  const int n = cfg.at("n").get<int>();
  const double tol = cfg.value("tolerance", 1e-10);

  const int totals[1] = {n};
  const std::vector<WeightedConfig> configs = enumerate_nested_configs(totals);

  std::string csv = "# zeta,config_id,species,fine_blocks,log_lhs,log_rhs,residual\n";
  double max_residual = 0.0;
  for (double z : zetas) {
    StableDualityParams params{alpha, beta, theta, z};
    params.validate();
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const NestedConfig& c = configs[i].config;
      const MasterFactors mf = master_factors(alpha, beta, c, z);
      const double lhs = mf.log_coag + mf.log_fine;
      const double rhs = mf.log_frag + mf.log_coarse;
      const double res = std::abs(lhs - rhs);
      max_residual = std::max(max_residual, res);
      csv += format_double(z);
      csv += ',';
      csv += std::to_string(i);
      csv += ',';
      csv += std::to_string(c.species());
      csv += ',';
      csv += std::to_string(c.total_fine_blocks());
      csv += ',';
      csv += format_double(lhs);
      csv += ',';
      csv += format_double(rhs);
      csv += ',';
      csv += format_double(res);
      csv += '\n';
    }
  }
  write_text_atomic(out / "master.csv", csv);

  ordered_json rep = base_report(cfg, "stable-master");
  rep["results"] = {{"n", n},
                    {"zetas", zetas},
                    {"config_count", configs.size()},
                    {"max_residual", max_residual},
                    {"tolerance", tol}};
  const bool pass = max_residual <= tol;
  rep["pass"] = pass;
  write_report(out, rep);
  return pass ? kPass : kFail;
}

int run_recover_pitman(const ordered_json& cfg, const fs::path& out) {
  const ordered_json& sj = cfg.at("stable");
  const double alpha = sj.at("alpha").get<double>();
  const double beta = sj.at("beta").get<double>();
  const double theta = sj.value("theta", 0.0);
  const int n = cfg.at("n").get<int>();
  const double tol = cfg.value("tolerance", 1e-8);

  const int totals[1] = {n};
  const std::vector<WeightedConfig> configs = enumerate_nested_configs(totals);

  std::string csv =
      "# config_id,quad_coag,closed_coag,quad_frag,closed_frag,rel_error\n";
  double max_rel = 0.0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const NestedConfig& c = configs[i].config;
    const auto [quad_coag, quad_frag] =
        recover_pitman_by_quadrature(alpha, beta, theta, c);

    // Closed two-parameter products: fine EPPF x coagulating EPPF on the
    // blocks, and coarse EPPF x per-species fragmentation EPPFs.
    std::vector<int> species_totals;
    std::vector<int> species_blocks;
    std::vector<int> fine_parts;
    double log_frag_parts = 0.0;
    for (int l = 0; l < c.species(); ++l) {
      species_totals.push_back(c.species_total(l));
      species_blocks.push_back(c.species_fine_blocks(l));
      const auto& parts = c.refinement[0][static_cast<std::size_t>(l)];
      fine_parts.insert(fine_parts.end(), parts.begin(), parts.end());
      log_frag_parts += pd_theta_eppf(alpha, -beta, parts);
    }
    const double closed_coag =
        std::exp(pd_theta_eppf(beta / alpha, theta / alpha, species_blocks) +
                 pd_theta_eppf(alpha, theta, fine_parts));
    const double closed_frag =
        std::exp(pd_theta_eppf(beta, theta, species_totals) + log_frag_parts);
    const double rel =
        std::max(std::abs(quad_coag - closed_coag) / closed_coag,
                 std::abs(quad_frag - closed_frag) / closed_frag);
    max_rel = std::max(max_rel, rel);
    csv += std::to_string(i);
    csv += ',';
    csv += format_double(quad_coag);
    csv += ',';
    csv += format_double(closed_coag);
    csv += ',';
    csv += format_double(quad_frag);
    csv += ',';
    csv += format_double(closed_frag);
    csv += ',';
    csv += format_double(rel);
    csv += '\n';
  }
  write_text_atomic(out / "recover.csv", csv);

  ordered_json rep = base_report(cfg, "recover-pitman");
  rep["results"] = {{"n", n},
                    {"config_count", configs.size()},
                    {"max_rel_error", max_rel},
                    {"tolerance", tol}};
  const bool pass = max_rel <= tol;
  rep["pass"] = pass;
  write_report(out, rep);
  return pass ? kPass : kFail;
}

int run_marginalize(const ordered_json& cfg, const fs::path& out) {
  const ordered_json& mj = cfg.at("model");
  const LevyModel base = parse_levy(mj.at("base"));
  const std::vector<LevyModel> taus = parse_groups(mj);
  const NestedConfig config = parse_nested_config(cfg.at("config"));
  const MarginalSide side = parse_side(cfg.at("side").get<std::string>());

  // marginal_eppf reports on the linear scale (it is a quadrature result).
  const double value = marginal_eppf(config, base, taus, side);

  ordered_json rep = base_report(cfg, "marginalize");
  rep["results"] = {{"side", cfg.at("side")},
                    {"log_value", std::log(value)},
                    {"value", value}};
  rep["pass"] = true;
  write_report(out, rep);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exact and Monte-Carlo checks for coupled coagulation/fragmentation "
      "partition laws"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int jobs = 1;

  const std::vector<std::string> tasks = {
      "verify-duality", "normalize",      "sample",     "mc-compare",
      "stable-master",  "recover-pitman", "marginalize"};
  for (const std::string& t : tasks) {
    CLI::App* sub = app.add_subcommand(t);
    sub->add_option("--config", config_path, "JSON experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory for artifacts");
    sub->add_option("--seed", seed, "RNG seed (overrides the config's)");
    sub->add_option("--jobs", jobs, "worker threads")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfigError;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string task = sub->get_name();
  const bool seed_given = sub->get_option("--seed")->count() > 0;

  const auto started = std::chrono::steady_clock::now();
  int rc = kFail;
  try {
    ordered_json cfg;
    {
      std::ifstream in(config_path);
      cfg = ordered_json::parse(in);
    }
    const std::string cfg_task = cfg.at("task").get<std::string>();
    if (cfg_task != task)
      throw ConfigError("config task \"" + cfg_task +
                        "\" does not match subcommand \"" + task + "\"");
    if (!seed_given) seed = cfg.value("seed", std::uint64_t{1});

    const fs::path out(out_dir);
    fs::create_directories(out);

    if (task == "verify-duality") rc = run_verify_duality(cfg, out, jobs);
    else if (task == "normalize") rc = run_normalize(cfg, out);
    else if (task == "sample") rc = run_sample(cfg, out, seed);
    else if (task == "mc-compare") rc = run_mc_compare(cfg, out, seed, jobs);
    else if (task == "stable-master") rc = run_stable_master(cfg, out);
    else if (task == "recover-pitman") rc = run_recover_pitman(cfg, out);
    else if (task == "marginalize") rc = run_marginalize(cfg, out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFail;
  }

  const auto elapsed = std::chrono::duration<double, std::milli>(
      std::chrono::steady_clock::now() - started);
  std::fprintf(stderr, "[%s] %.1f ms\n", task.c_str(), elapsed.count());
  return rc;
}
