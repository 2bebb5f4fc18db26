"""Smoke tests for the Python bindings: one probe per surface, exact numbers
are the C++ suite's job."""

import json
import math
import subprocess

import pytest

import phibp


def gg_model():
    base = phibp.LevyModel.gen_gamma(0.4, 1.0, 0.5)
    g1 = phibp.LevyModel.gen_gamma(0.3, 1.0, 0.2)
    g2 = phibp.LevyModel.gen_gamma(0.6, 2.0, 0.1)
    return phibp.HierModel(base, [g1, g2], [1.0, 1.5])


def stable_model():
    return phibp.HierModel(
        phibp.LevyModel.stable(0.5), [phibp.LevyModel.stable(0.6)], [1.0]
    )


def test_duality_identity_over_enumeration():
    sweep = phibp.duality_sweep(gg_model(), [3, 2], jobs=2)
    assert len(sweep.rows) == 45
    assert sweep.max_residual < 1e-10


def test_both_factorizations_normalize():
    check = phibp.total_mass_check(gg_model(), [2, 2])
    assert check.coarse_frag_sum == pytest.approx(1.0, abs=1e-9)
    assert check.fine_coag_sum == pytest.approx(1.0, abs=1e-9)


def test_single_config_factorizations_agree():
    hier = gg_model()
    config = phibp.NestedConfig(
        counts=[[2, 1], [1, 1]], refinement=[[[1, 1], [1]], [[1], [1]]]
    )
    lhs = phibp.p_coag(config, hier) + phibp.p_fine(config, hier)
    rhs = phibp.p_frag(config, hier) + phibp.p_coarse(config, hier)
    assert lhs == pytest.approx(rhs, abs=1e-10)
    assert phibp.duality_residual(config, hier) < 1e-10


def test_invalid_config_raises():
    with pytest.raises(ValueError):
        phibp.NestedConfig(counts=[[2]], refinement=[[[3]]])


def test_stable_master_identity():
    config = phibp.single_group_config([[2, 1], [2]])
    params = phibp.StableDualityParams(alpha=0.6, beta=0.3, zeta=1.4)
    assert phibp.master_duality_residual(params, config) < 1e-12
    f = phibp.master_factors(0.6, 0.3, config, 1.4)
    assert f.log_coag + f.log_fine == pytest.approx(
        f.log_frag + f.log_coarse, abs=1e-12
    )


def test_recover_pitman_paths_agree():
    config = phibp.single_group_config([[1, 1], [2]])
    coag, frag = phibp.recover_pitman_by_quadrature(0.6, 0.3, 0.5, config)
    assert coag == pytest.approx(frag, rel=1e-8)


def test_eppf_degenerate_and_tilted():
    assert phibp.pd_eppf(0.0, [4]) == 0.0
    assert math.isinf(phibp.pd_eppf(0.0, [2, 2]))
    # theta = 0 tilt reduces to the one-parameter law.
    assert phibp.pd_theta_eppf(0.4, 0.0, [3, 1]) == pytest.approx(
        phibp.pd_eppf(0.4, [3, 1]), abs=1e-14
    )


def test_marginal_eppf_is_a_probability():
    config = phibp.NestedConfig(counts=[[2, 1]], refinement=[[[1, 1], [1]]])
    value = phibp.marginal_eppf(
        config,
        phibp.LevyModel.stable(0.5),
        [phibp.LevyModel.stable(0.6)],
        phibp.MarginalSide.Coarse,
    )
    assert 0.0 < value < 1.0


def test_sampler_is_deterministic():
    hier = stable_model()
    a = phibp.sample_coupled(hier, phibp.RngStream(7))
    b = phibp.sample_coupled(hier, phibp.RngStream(7))
    assert a.phi == b.phi == len(a.species)
    assert [s.tag for s in a.species] == [s.tag for s in b.species]
    assert all(s.h > 0 for s in a.species)


def test_mc_compare_smoke():
    rep = phibp.mc_compare(stable_model(), 20000, seed=11)
    assert len(rep.statistics) == 6
    # TV scales like 1/sqrt(draws); keep the bound loose at 2e4 draws.
    assert rep.all_pass(p_floor=1e-4, tv_max=0.05)


def test_cli_normalize_roundtrip(tmp_path):
    cli = phibp.cli_path()
    assert cli is not None, "bundled CLI missing from the install"
    cfg = {
        "task": "normalize",
        "model": {
            "base": {"family": "gamma", "theta": 1.0, "zeta": 1.0},
            "groups": [{"family": "gamma", "theta": 0.8, "zeta": 0.6}],
            "gammas": [1.0],
        },
        "totals": [3],
    }
    cfg_path = tmp_path / "normalize.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    res = subprocess.run(
        [cli, "normalize", "--config", str(cfg_path), "--out", str(out)],
        capture_output=True,
    )
    assert res.returncode == 0, res.stderr.decode()
    report = json.loads((out / "report.json").read_text())
    assert report["pass"] is True
