import numpy as np
import pytest

from nodalqmc.nodal import ExactTripletNode, LiRHFNode
from nodalqmc.qmc import (
    DMCParams,
    EnergyEstimate,
    PopulationError,
    SamplingError,
    VMCParams,
    blocking_error,
    dmc_fixed_node,
    dmc_ladder,
    format_energy,
    timestep_extrapolate,
    vmc_run,
)
from nodalqmc.wavefunction import build_be_hf, build_hydrogenic, build_li_rhf, with_jastrow, JastrowFactor

HE_TRIPLET_EXACT = -2.17522937823679


def test_blocking_iid():
    x = np.random.default_rng(1).standard_normal(2**14)
    b = blocking_error(x)
    assert b.error == pytest.approx(2**-7, rel=0.2)
    assert b.plateau


def test_blocking_ar1():
    rng = np.random.default_rng(2)
    phi, n = 0.9, 2**16
    x = np.empty(n)
    x[0] = 0.0
    eps = rng.standard_normal(n)
    for i in range(1, n):
        x[i] = phi * x[i - 1] + eps[i]
    var = 1.0 / (1 - phi**2)
    expected = np.sqrt(var / n * (1 + phi) / (1 - phi))
    b = blocking_error(x)
    assert b.error == pytest.approx(expected, rel=0.3)
    assert b.error > 2 * np.sqrt(var / n)


def test_blocking_constant_and_short():
    assert blocking_error(np.full(100, -7.5)).error == 0.0
    with pytest.raises(ValueError):
        blocking_error(np.zeros(10))


def test_extrapolation_exact_line():
    pts = [(0.01, EnergyEstimate(-2.0 + 0.005, 1e-4)), (0.005, EnergyEstimate(-2.0 + 0.0025, 1e-4))]
    e = timestep_extrapolate(pts)
    assert e.mean == pytest.approx(-2.0, abs=1e-12)
    assert e.tau == 0.0


def test_extrapolation_needs_two_points():
    with pytest.raises(ValueError):
        timestep_extrapolate([(0.01, EnergyEstimate(-2.0, 1e-3))])
    with pytest.raises(ValueError):
        timestep_extrapolate([(0.01, EnergyEstimate(-2.0, 1e-3)), (0.01, EnergyEstimate(-2.1, 1e-3))])


def test_extrapolation_noisy():
    rng = np.random.default_rng(4)
    hits = 0
    for _ in range(50):
        taus = np.array([0.01, 0.005, 0.0025])
        sig = 5e-4
        pts = [(t, EnergyEstimate(-7.478 + 0.3 * t + sig * rng.standard_normal(), sig)) for t in taus]
        e = timestep_extrapolate(pts)
        hits += abs(e.mean + 7.478) < 3 * e.error
    assert hits >= 47


def test_format_energy():
    assert format_energy(-7.47803, 0.00005) == "-7.47803(5)"
    assert format_energy(-14.6576, 0.0004) == "-14.6576(4)"
    assert format_energy(-0.5, 0.0) == "-0.50000000"


def test_vmc_hydrogen_exact():
    wf = build_hydrogenic(1)
    r = vmc_run(wf, VMCParams(n_steps=400, n_walkers=200, step_size=1.0, burn_in=200, record_stream=True))
    assert r.estimate.mean == pytest.approx(-0.5, abs=1e-12)
    assert r.variance == pytest.approx(0.0, abs=1e-10)
    radii = np.linalg.norm(r.stream[:, :, 0], axis=-1).mean(axis=1)
    b = blocking_error(radii)
    assert abs(b.mean - 1.5) < 3 * b.error


def test_vmc_he_triplet_bound(he_triplet):
    r = vmc_run(he_triplet, VMCParams(n_steps=400, n_walkers=100, step_size=0.5, burn_in=300))
    assert r.estimate.mean > HE_TRIPLET_EXACT - 3 * r.estimate.error
    assert r.estimate.mean < -2.17


def test_vmc_be_hf_above_exact(be_hf):
    r = vmc_run(be_hf, VMCParams(n_steps=300, n_walkers=100, step_size=0.25, burn_in=500))
    assert r.estimate.mean > -14.6673 + 0.01


def test_jastrow_lowers_variance():
    base = build_li_rhf(3.0, 1.0)
    jas = with_jastrow(base, JastrowFactor(0.5, 0.5))
    p = VMCParams(n_steps=300, n_walkers=100, step_size=0.25, burn_in=800)
    assert vmc_run(jas, p).variance < vmc_run(base, p).variance


def test_vmc_deterministic_across_workers(li_rhf):
    p = VMCParams(n_steps=80, n_walkers=60, step_size=0.25, burn_in=50)
    a, b = vmc_run(li_rhf, p, workers=1), vmc_run(li_rhf, p, workers=3)
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.positions, b.positions)


def test_vmc_no_acceptance():
    with pytest.raises(SamplingError):
        vmc_run(build_hydrogenic(1), VMCParams(n_steps=20, n_walkers=5, step_size=1e6, burn_in=0))


def test_params_validation():
    with pytest.raises(ValueError):
        VMCParams(step_size=0.0)
    with pytest.raises(ValueError):
        DMCParams(tau=-0.1)
    with pytest.raises(ValueError):
        DMCParams(target_population=10)
    with pytest.raises(ValueError):
        DMCParams(measurement_steps=10)


SMALL = DMCParams(tau=0.01, target_population=200, equilibration_steps=100, measurement_steps=200, seed=5,
                  vmc_burn_in=200, vmc_step_size=0.25)


def test_dmc_hydrogen_exact():
    r = dmc_fixed_node(build_hydrogenic(1), None, SMALL)
    assert r.estimate.mean == pytest.approx(-0.5, abs=1e-10)


def test_dmc_bitwise_deterministic_across_workers(li_rhf):
    a = dmc_fixed_node(li_rhf, LiRHFNode(), SMALL, workers=1)
    b = dmc_fixed_node(li_rhf, LiRHFNode(), SMALL, workers=4)
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.populations, b.populations)
    assert a.estimate.mean == b.estimate.mean


def test_dmc_seed_changes_result(li_rhf):
    from dataclasses import replace
    a = dmc_fixed_node(li_rhf, LiRHFNode(), SMALL)
    b = dmc_fixed_node(li_rhf, LiRHFNode(), replace(SMALL, seed=6))
    assert not np.array_equal(a.energies, b.energies)


def test_dmc_he_fixed_node_bound(he_triplet):
    r = dmc_fixed_node(he_triplet, ExactTripletNode(), SMALL)
    assert r.estimate.mean > HE_TRIPLET_EXACT - 3 * r.estimate.error - 1e-4
    s = r.summary(system="he_triplet")
    assert {"tau", "population", "steps", "energy", "error", "acceptance", "seed", "system"} <= set(s)


def test_dmc_ladder_extrapolates(li_rhf):
    lad = dmc_ladder(li_rhf, LiRHFNode(), SMALL, taus=(0.02, 0.01))
    assert len(lad.runs) == 2
    assert lad.extrapolated.tau == 0.0
    assert "extrapolated" in lad.summary()


def test_population_collapse():
    # a grossly wrong trial energy drives the population out of its band
    wf = build_hydrogenic(1, zeta=0.2)
    p = DMCParams(tau=0.2, target_population=100, equilibration_steps=50, measurement_steps=64,
                  population_relaxation=100000, population_bounds=(0.9, 1.1), vmc_burn_in=10)
    with pytest.raises(PopulationError) as info:
        dmc_fixed_node(wf, None, p)
    assert "population" in info.value.diagnostics


def test_dmc_rejects_node_crossing_moves(be_hf):
    from nodalqmc.nodal import ProductNode
    r = dmc_fixed_node(be_hf, ProductNode(), SMALL)
    assert r.node_rejections >= 0
    assert 0.9 < r.acceptance <= 1.0
