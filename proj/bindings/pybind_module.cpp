// Thin Python layer over the C++ core: every binding forwards to the library
// with std::vector shims for the span-taking entry points.  Log-scale
// conventions are unchanged from the headers.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phibp/laws.hpp"
#include "phibp/levy.hpp"
#include "phibp/partition.hpp"
#include "phibp/rng.hpp"
#include "phibp/sampler.hpp"
#include "phibp/stable.hpp"
#include "phibp/verify.hpp"

namespace py = pybind11;
using namespace phibp;

namespace {

using IntVec = std::vector<int>;

}  // namespace

PYBIND11_MODULE(_phibp, m) {
  m.doc() =
      "Exact laws, coag/frag duality checks, and coupled samplers for "
      "hierarchical subordinator partition models";

  // ------------------------------------------------------------ subordinators
  py::enum_<Family>(m, "Family")
      .value("Stable", Family::Stable)
      .value("Gamma", Family::Gamma)
      .value("GenGamma", Family::GenGamma);

  py::class_<LevyModel>(m, "LevyModel")
      .def_static("stable", &LevyModel::stable, py::arg("alpha"))
      .def_static("gamma", &LevyModel::gamma, py::arg("theta"),
                  py::arg("zeta"))
      .def_static("gen_gamma", &LevyModel::gen_gamma, py::arg("alpha"),
                  py::arg("theta"), py::arg("zeta"))
      .def_property_readonly("family", &LevyModel::family)
      .def_property_readonly("alpha", &LevyModel::alpha)
      .def_property_readonly("theta", &LevyModel::theta)
      .def_property_readonly("zeta", &LevyModel::zeta)
      .def("scaled", &LevyModel::scaled, py::arg("factor"))
      .def("tilted", &LevyModel::tilted, py::arg("extra"))
      .def("__repr__", [](const LevyModel& v) {
        return "LevyModel(alpha=" + std::to_string(v.alpha()) +
               ", theta=" + std::to_string(v.theta()) +
               ", zeta=" + std::to_string(v.zeta()) + ")";
      });

  m.def("psi", &psi, py::arg("model"), py::arg("g"));
  m.def("psi_cumulant", &psi_cumulant, py::arg("model"), py::arg("c"),
        py::arg("g"));
  m.def("log_levy_density", &log_levy_density, py::arg("model"), py::arg("s"));
  m.def("log_weighted_moment", &log_weighted_moment, py::arg("model"),
        py::arg("lam"), py::arg("n"), py::arg("g"));
  m.def("mtp_pmf", &mtp_pmf, py::arg("model"), py::arg("g"), py::arg("c"));
  m.def("mtp_log_pmf", &mtp_log_pmf, py::arg("model"), py::arg("g"),
        py::arg("c"));

  // ------------------------------------------------------------------- random
  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("child", &RngStream::child, py::arg("index"))
      .def("uniform", &RngStream::uniform)
      .def("exponential", &RngStream::exponential)
      .def("normal", &RngStream::normal)
      .def("gamma", &RngStream::gamma, py::arg("shape"), py::arg("rate") = 1.0)
      .def("poisson", &RngStream::poisson, py::arg("mean"))
      .def("positive_stable", &RngStream::positive_stable, py::arg("alpha"));

  m.def(
      "sample_total_mass",
      [](const LevyModel& v, double lam, RngStream& rng) {
        return sample_total_mass(v, lam, rng);
      },
      py::arg("model"), py::arg("lam"), py::arg("rng"));

  // ----------------------------------------------------------- model + config
  py::class_<HierModel>(m, "HierModel")
      .def(py::init<LevyModel, std::vector<LevyModel>, std::vector<double>>(),
           py::arg("base"), py::arg("groups"), py::arg("times"))
      .def_readonly("tau0", &HierModel::tau0)
      .def_readonly("taus", &HierModel::taus)
      .def_readonly("gammas", &HierModel::gammas)
      .def("groups", &HierModel::groups)
      .def("psi_j", &HierModel::psi_j, py::arg("j"))
      .def("sum_psi", &HierModel::sum_psi)
      .def("allocation_probs", &HierModel::allocation_probs);

  py::class_<NestedConfig>(m, "NestedConfig")
      .def(py::init<>())
      .def(py::init([](std::vector<std::vector<int>> counts,
                       std::vector<std::vector<std::vector<int>>> refinement) {
             NestedConfig c;
             c.counts = std::move(counts);
             c.refinement = std::move(refinement);
             c.validate();
             return c;
           }),
           py::arg("counts"), py::arg("refinement"))
      .def_readwrite("counts", &NestedConfig::counts)
      .def_readwrite("refinement", &NestedConfig::refinement)
      .def("groups", &NestedConfig::groups)
      .def("species", &NestedConfig::species)
      .def("total_fine_blocks", &NestedConfig::total_fine_blocks)
      .def("group_total", &NestedConfig::group_total, py::arg("j"))
      .def("species_total", &NestedConfig::species_total, py::arg("l"))
      .def("species_counts", &NestedConfig::species_counts, py::arg("l"))
      .def("validate", &NestedConfig::validate);

  // ------------------------------------------------------------ exact laws
  m.def(
      "composed_cumulant",
      [](const HierModel& h, const IntVec& c) { return composed_cumulant(h, c); },
      py::arg("hier"), py::arg("counts"));
  m.def(
      "hier_joint_moment",
      [](const HierModel& h, const IntVec& c) { return hier_joint_moment(h, c); },
      py::arg("hier"), py::arg("counts"));
  m.def("p_fine", &p_fine, py::arg("config"), py::arg("hier"));
  m.def("p_coag", &p_coag, py::arg("config"), py::arg("hier"));
  m.def("p_frag", &p_frag, py::arg("config"), py::arg("hier"));
  m.def("p_coarse", &p_coarse, py::arg("config"), py::arg("hier"));
  m.def("duality_residual", &duality_residual, py::arg("config"),
        py::arg("hier"));
  m.def(
      "joint_count_pmf",
      [](const HierModel& h, const IntVec& c) { return joint_count_pmf(h, c); },
      py::arg("hier"), py::arg("counts"));
  m.def(
      "allocation_pmf",
      [](const HierModel& h, const IntVec& ks) { return allocation_pmf(h, ks); },
      py::arg("hier"), py::arg("ks"));
  m.def(
      "fragment_count_pmf",
      [](const HierModel& h, const IntVec& c) {
        return fragment_count_pmf(h, c);
      },
      py::arg("hier"), py::arg("counts"));
  m.def(
      "h_conditional_density",
      [](const HierModel& h, const IntVec& c, double lam) {
        return h_conditional_density(h, c, lam);
      },
      py::arg("hier"), py::arg("counts"), py::arg("lam"));
  m.def("x_given_count_pmf", &x_given_count_pmf, py::arg("hier"), py::arg("n"),
        py::arg("x"));
  m.def(
      "species_block_count_pmf",
      [](const HierModel& h, const IntVec& c) {
        return species_block_count_pmf(h, c);
      },
      py::arg("hier"), py::arg("counts"));
  m.def(
      "arrival_density",
      [](const HierModel& h, const IntVec& c) { return arrival_density(h, c); },
      py::arg("hier"), py::arg("counts"));

  py::enum_<MarginalSide>(m, "MarginalSide")
      .value("Coarse", MarginalSide::Coarse)
      .value("Fine", MarginalSide::Fine)
      .value("Joint", MarginalSide::Joint);

  m.def(
      "marginal_eppf",
      [](const NestedConfig& c, const LevyModel& tau0,
         const std::vector<LevyModel>& taus, MarginalSide side) {
        return marginal_eppf(c, tau0, taus, side);
      },
      py::arg("config"), py::arg("tau0"), py::arg("taus"), py::arg("side"));

  // --------------------------------------------------- partition combinatorics
  m.def(
      "pd_eppf",
      [](double beta, const IntVec& blocks) { return pd_eppf(beta, blocks); },
      py::arg("beta"), py::arg("blocks"));
  m.def(
      "pd_theta_eppf",
      [](double beta, double theta, const IntVec& blocks) {
        return pd_theta_eppf(beta, theta, blocks);
      },
      py::arg("beta"), py::arg("theta"), py::arg("blocks"));
  m.def("gen_stirling", &gen_stirling, py::arg("alpha"), py::arg("n"),
        py::arg("k"));
  m.def("block_count_pmf", &block_count_pmf, py::arg("beta"), py::arg("n"),
        py::arg("k"));
  m.def("frag_block_count_pmf", &frag_block_count_pmf, py::arg("alpha"),
        py::arg("beta"), py::arg("n"), py::arg("k"));
  m.def("enumerate_set_partitions", &enumerate_set_partitions, py::arg("n"));

  // ------------------------------------------------------- stable closed forms
  py::class_<StableDualityParams>(m, "StableDualityParams")
      .def(py::init([](double alpha, double beta, double theta, double zeta) {
             StableDualityParams p{alpha, beta, theta, zeta};
             p.validate();
             return p;
           }),
           py::arg("alpha"), py::arg("beta"), py::arg("theta") = 0.0,
           py::arg("zeta") = 1.0)
      .def_readwrite("alpha", &StableDualityParams::alpha)
      .def_readwrite("beta", &StableDualityParams::beta)
      .def_readwrite("theta", &StableDualityParams::theta)
      .def_readwrite("zeta", &StableDualityParams::zeta);

  m.def("single_group_config", &single_group_config, py::arg("species_blocks"));
  m.def("log_gibbs_poly", &log_gibbs_poly, py::arg("sigma"), py::arg("m"),
        py::arg("zeta"));
  m.def("phi_weight_pd", &phi_weight_pd, py::arg("beta"), py::arg("theta"),
        py::arg("n"), py::arg("r"));
  m.def("gibbs_duality_residual", &gibbs_duality_residual, py::arg("alpha"),
        py::arg("beta"), py::arg("config"), py::arg("phi"));
  m.def("gibbs_mixing_residual", &gibbs_mixing_residual, py::arg("alpha"),
        py::arg("beta"), py::arg("theta"), py::arg("n"), py::arg("k"));

  py::class_<MasterFactors>(m, "MasterFactors")
      .def_readonly("log_coag", &MasterFactors::log_coag)
      .def_readonly("log_fine", &MasterFactors::log_fine)
      .def_readonly("log_frag", &MasterFactors::log_frag)
      .def_readonly("log_coarse", &MasterFactors::log_coarse);

  m.def("master_factors", &master_factors, py::arg("alpha"), py::arg("beta"),
        py::arg("config"), py::arg("zeta"));
  m.def("master_duality_residual", &master_duality_residual, py::arg("params"),
        py::arg("config"));
  m.def("stable_count_pmf", &stable_count_pmf, py::arg("beta"),
        py::arg("zeta"), py::arg("n"));
  m.def("stable_block_count_pmf", &stable_block_count_pmf, py::arg("alpha"),
        py::arg("beta"), py::arg("zeta"), py::arg("k"));
  m.def(
      "recover_pitman_by_quadrature",
      [](double alpha, double beta, double theta, const NestedConfig& c) {
        return recover_pitman_by_quadrature(alpha, beta, theta, c);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("theta"), py::arg("config"));
  m.def(
      "frag_invariance_check",
      [](double alpha, double beta, const IntVec& parts) {
        return frag_invariance_check(alpha, beta, parts);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("parts"));

  py::class_<BridgeSample>(m, "BridgeSample")
      .def_readonly("k", &BridgeSample::k)
      .def_readonly("block_sizes", &BridgeSample::block_sizes)
      .def_readonly("atom_masses", &BridgeSample::atom_masses)
      .def_readonly("remainder", &BridgeSample::remainder);

  m.def("stable_bridge_sample", &stable_bridge_sample, py::arg("alpha"),
        py::arg("n"), py::arg("scale"), py::arg("rng"));

  // ------------------------------------------------------------- verification
  py::class_<WeightedConfig>(m, "WeightedConfig")
      .def_readonly("config", &WeightedConfig::config)
      .def_readonly("multiplicity", &WeightedConfig::multiplicity)
      .def_readonly("log_multiplicity", &WeightedConfig::log_multiplicity);

  m.def(
      "enumerate_nested_configs",
      [](const IntVec& totals) { return enumerate_nested_configs(totals); },
      py::arg("totals"));
  m.def("labeled_config_count", &labeled_config_count, py::arg("n"));

  py::class_<MassCheck>(m, "MassCheck")
      .def_readonly("config_count", &MassCheck::config_count)
      .def_readonly("coarse_frag_sum", &MassCheck::coarse_frag_sum)
      .def_readonly("fine_coag_sum", &MassCheck::fine_coag_sum);

  m.def(
      "total_mass_check",
      [](const HierModel& h, const IntVec& totals) {
        return total_mass_check(h, totals);
      },
      py::arg("hier"), py::arg("totals"));

  py::class_<DualityRow>(m, "DualityRow")
      .def_readonly("config_id", &DualityRow::config_id)
      .def_readonly("species", &DualityRow::species)
      .def_readonly("fine_blocks", &DualityRow::fine_blocks)
      .def_readonly("log_lhs", &DualityRow::log_lhs)
      .def_readonly("log_rhs", &DualityRow::log_rhs)
      .def_readonly("residual", &DualityRow::residual);

  py::class_<DualitySweep>(m, "DualitySweep")
      .def_readonly("rows", &DualitySweep::rows)
      .def_readonly("max_residual", &DualitySweep::max_residual);

  m.def(
      "duality_sweep",
      [](const HierModel& h, const IntVec& totals, int jobs) {
        return duality_sweep(h, totals, jobs);
      },
      py::arg("hier"), py::arg("totals"), py::arg("jobs") = 1);

  py::class_<McStatistic>(m, "McStatistic")
      .def_readonly("name", &McStatistic::name)
      .def_readonly("chi2", &McStatistic::chi2)
      .def_readonly("dof", &McStatistic::dof)
      .def_readonly("p_value", &McStatistic::p_value)
      .def_readonly("tv_distance", &McStatistic::tv_distance);

  py::class_<McComparison>(m, "McComparison")
      .def_readonly("draws", &McComparison::draws)
      .def_readonly("seed", &McComparison::seed)
      .def_readonly("statistics", &McComparison::statistics)
      .def("all_pass", &McComparison::all_pass, py::arg("p_floor") = 1e-3,
           py::arg("tv_max") = 5e-3);

  m.def("mc_compare", &mc_compare, py::arg("hier"), py::arg("draws"),
        py::arg("seed"), py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());

  m.def("positive_stable_density", &positive_stable_density, py::arg("alpha"),
        py::arg("x"));
  m.def("weighted_moment_by_quadrature", &weighted_moment_by_quadrature,
        py::arg("model"), py::arg("lam"), py::arg("n"), py::arg("g"));
  m.def(
      "quadrature_oracle",
      [](const HierModel& h, const IntVec& c) { return quadrature_oracle(h, c); },
      py::arg("hier"), py::arg("counts"));

  // ----------------------------------------------------------------- sampling
  py::class_<SubBlockDraw>(m, "SubBlockDraw")
      .def_readonly("count", &SubBlockDraw::count)
      .def_readonly("tag", &SubBlockDraw::tag);

  py::class_<SpeciesDraw>(m, "SpeciesDraw")
      .def_readonly("tag", &SpeciesDraw::tag)
      .def_readonly("h", &SpeciesDraw::h)
      .def_readonly("subblocks", &SpeciesDraw::subblocks)
      .def("fine_blocks", &SpeciesDraw::fine_blocks, py::arg("j"))
      .def("total_fine_blocks", &SpeciesDraw::total_fine_blocks)
      .def("group_count", &SpeciesDraw::group_count, py::arg("j"));

  py::class_<CoupledDraw>(m, "CoupledDraw")
      .def_readonly("phi", &CoupledDraw::phi)
      .def_readonly("species", &CoupledDraw::species)
      .def("total_fine_blocks", &CoupledDraw::total_fine_blocks, py::arg("j"))
      .def("group_total", &CoupledDraw::group_total, py::arg("j"));

  py::class_<CoupledSampler>(m, "CoupledSampler")
      .def(py::init<HierModel>(), py::arg("hier"))
      .def("draw", &CoupledSampler::draw, py::arg("rng"))
      .def_property_readonly("model", &CoupledSampler::model);

  m.def("sample_coupled", &sample_coupled, py::arg("hier"), py::arg("rng"));
  m.def("sample_h_given_x", &sample_h_given_x, py::arg("hier"), py::arg("x"),
        py::arg("rng"));
  m.def(
      "sample_conditional_given_totals",
      [](const HierModel& h, const IntVec& totals, RngStream& rng) {
        return sample_conditional_given_totals(h, totals, rng);
      },
      py::arg("hier"), py::arg("totals"), py::arg("rng"));

  py::class_<StepFunction>(m, "StepFunction")
      .def("value_at", &StepFunction::value_at, py::arg("y"))
      .def_property_readonly("jumps", &StepFunction::jumps);

  py::class_<PathSet>(m, "PathSet")
      .def_readonly("individuals", &PathSet::individuals)
      .def_readonly("allocations", &PathSet::allocations)
      .def_readonly("species_counts", &PathSet::species_counts)
      .def_readonly("per_species", &PathSet::per_species);

  m.def("materialize_paths", &materialize_paths, py::arg("draw"),
        py::arg("groups"));

  py::class_<PosteriorSpecies>(m, "PosteriorSpecies")
      .def_readonly("h", &PosteriorSpecies::h)
      .def_readonly("block_masses", &PosteriorSpecies::block_masses)
      .def_readonly("remainder", &PosteriorSpecies::remainder)
      .def_readonly("group_mass", &PosteriorSpecies::group_mass);

  m.def("sample_posterior_observed", &sample_posterior_observed,
        py::arg("hier"), py::arg("config"), py::arg("rng"));
}
