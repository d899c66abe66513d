import io
import json

import numpy as np
import pytest

from nodalqmc.configuration import DOWN, UP, ElectronConfiguration
from nodalqmc.nodal import (
    ConjecturedBeNode,
    CrossSectionSpec,
    ExactTripletNode,
    LiRHFNode,
    ProductNode,
    bisect_crossing,
    crossing_coincidence,
    factorization_positivity,
    make_node,
    node_sign,
    random_spec,
    scan_cross_section,
)
from nodalqmc.qmc import VMCParams, vmc_run
from nodalqmc.rng import derive_rng
from nodalqmc.wavefunction import NodeError, build_be_hf, build_be_two_config, build_li_rhf

from conftest import sample_positions

BE = (UP, UP, DOWN, DOWN)


def be_config(t1, t2, m=1.0):
    rays = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0.6, 0.8, 0]])
    r = np.array([m + t1 / 2, m - t1 / 2, m + t2 / 2, m - t2 / 2])
    return ElectronConfiguration(r[:, None] * rays, BE, 4)


def test_product_node_quadrant_signs():
    node = ProductNode()
    assert node_sign(node, be_config(0.4, 0.3)) == 1
    assert node_sign(node, be_config(0.4, -0.3)) == -1
    assert node_sign(node, be_config(-0.4, -0.3)) == 1
    assert node_sign(node, be_config(0.0, -0.3)) == 0


def test_conjectured_node_at_zero_equals_product(rng):
    pos = sample_positions(rng, 4, 10_000)
    a, b = ConjecturedBeNode(0.0), ProductNode()
    assert np.array_equal(a.value(pos), b.value(pos))
    assert np.array_equal(a.sign(pos), b.sign(pos))


def test_node_antisymmetry(rng):
    pos = sample_positions(rng, 4, 100)
    for node in (ProductNode(), ConjecturedBeNode(0.3)):
        v = node.value(pos)
        np.testing.assert_allclose(node.value(pos[:, [1, 0, 2, 3]]), -v, atol=1e-14)
        np.testing.assert_allclose(node.value(pos[:, [0, 1, 3, 2]]), -v, atol=1e-14)
    he = sample_positions(rng, 2, 100)
    np.testing.assert_allclose(ExactTripletNode().value(he[:, [1, 0]]), -ExactTripletNode().value(he))


def test_li_node_zero():
    pos = np.array([[1.2, 0, 0], [0.1, 0.5, 0.3], [0, 0, 1.2]])
    assert node_sign(LiRHFNode(), ElectronConfiguration(pos, (UP, DOWN, UP), 3)) == 0


def test_node_layout_checked():
    with pytest.raises(ValueError):
        node_sign(LiRHFNode(), be_config(0.1, 0.1))


def test_make_node():
    assert make_node("conjectured_be", a=0.2).a == 0.2
    with pytest.raises(ValueError):
        make_node("spherical")


def test_bisect_he_triplet(he_triplet):
    a = np.array([[0.8, 0, 0], [0, 1.5, 0.2]])
    b = np.array([[1.7, 0.1, 0], [0, 1.1, 0.0]])
    rec = bisect_crossing(he_triplet, a, b, tol=1e-12)
    r = np.linalg.norm(rec.configuration, axis=1)
    assert abs(r[0] - r[1]) < 1e-8
    assert 0 < rec.t < 1
    assert bisect_crossing(he_triplet, a, a * 1.01) is None


def test_bisect_li_crossing_lies_on_r1_equals_r3(li_rhf, rng):
    found = 0
    for _ in range(40):
        a, b = sample_positions(rng, 3, 2)
        rec = bisect_crossing(li_rhf, a, b)
        if rec is None:
            continue
        found += 1
        r = np.linalg.norm(rec.configuration, axis=1)
        assert abs(r[0] - r[2]) < 1e-8
        sa, sb = np.sign(li_rhf.value(np.stack([a, b])))
        assert sa != sb
    assert found > 5


def test_bisect_rejects_endpoint_on_node():
    a = np.array([[1.0, 0, 0], [0, 1.0, 0]])
    with pytest.raises(NodeError):
        bisect_crossing(ExactTripletNode(), a, a * [[1.0], [2.0]])


def test_positivity_he(he_triplet):
    rep = factorization_positivity(he_triplet, ExactTripletNode(), n_samples=100_000)
    assert rep.fraction_positive == 1.0


def test_positivity_be_hf():
    rep = factorization_positivity(build_be_hf(4.0, 1.4), ProductNode(), n_samples=20_000)
    assert rep.fraction_positive == 1.0


def test_positivity_be_two_config_below_one():
    rep = factorization_positivity(build_be_two_config(0.2, 4.0, 1.4, 1.2), ProductNode(), n_samples=20_000)
    assert rep.fraction_positive < 1.0
    assert rep.worst_violation < 0


def _walk(wf, seed, steps=300, walkers=40, step=0.3):
    p = VMCParams(n_steps=steps, n_walkers=walkers, step_size=step, burn_in=300, seed=seed,
                  measure_energy=False, record_stream=True)
    return vmc_run(wf, p).stream


def test_coincidence_li_rhf_self(li_rhf):
    rep = crossing_coincidence(li_rhf, LiRHFNode(), _walk(li_rhf, 4))
    assert rep.total > 0
    assert rep.non_coincident == 0
    assert rep.records == []


def test_coincidence_he_self(he_triplet):
    rep = crossing_coincidence(he_triplet, ExactTripletNode(), _walk(he_triplet, 5, step=0.5))
    assert rep.total > 0 and rep.non_coincident == 0


def test_coincidence_records_for_different_node():
    wf = build_be_two_config(0.3, 4.0, 1.4, 1.2)
    rep = crossing_coincidence(wf, ProductNode(), _walk(wf, 6, steps=200))
    assert rep.non_coincident > 0
    buf = io.StringIO()
    rep.to_jsonl(buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == rep.non_coincident
    rec = json.loads(lines[0])
    assert {"walker", "step", "t", "crossing", "start", "end", "coincidence"} <= set(rec)
    s = rep.summary()
    assert s["non_coincident_fraction"] == pytest.approx(rep.non_coincident / rep.total)


def test_coincidence_independent_of_workers(li_rhf):
    walk = _walk(li_rhf, 9, steps=100)
    a = crossing_coincidence(li_rhf, ConjecturedNodeLi(), walk, workers=1)
    b = crossing_coincidence(li_rhf, ConjecturedNodeLi(), walk, workers=3)
    assert a.summary() == b.summary()


class ConjecturedNodeLi(LiRHFNode):
    """r1 - 1.05 r3: deliberately displaced from the true Li node."""

    name = "displaced"

    def derivatives(self, pos):
        pos = np.asarray(pos, dtype=float)
        r1 = np.linalg.norm(pos[:, 0], axis=-1)
        r3 = np.linalg.norm(pos[:, 2], axis=-1)
        v = r1 - 1.05 * r3
        return v, np.zeros_like(pos), np.zeros(len(pos))


def test_spec_validation():
    rays = np.eye(4, 3) + 0.1
    with pytest.raises(ValueError):
        CrossSectionSpec(rays, (1.0, 1.0), resolution=1)
    with pytest.raises(ValueError):
        CrossSectionSpec(rays, (0.3, 1.0), t_range=0.8)
    with pytest.raises(ValueError):
        CrossSectionSpec(rays, (1.0, 1.0), mode="diagonal")
    spec = CrossSectionSpec(rays, (1.0, 1.0), resolution=17)
    t1, t2 = spec.axes()
    np.testing.assert_allclose(t1, -t1[::-1])
    assert spec.positions().shape == (17 * 17, 4, 3)


def test_be_hf_checkerboard():
    wf = build_be_hf(4.0, 1.4)
    for k in range(5):
        spec = random_spec(derive_rng(11, "draw", k))
        cs = scan_cross_section(wf, spec)
        expect = np.sign(np.outer(cs.t1, cs.t2)).astype(int)
        assert np.array_equal(cs.signs, expect)
        assert not cs.quadrant_connected(1) and not cs.quadrant_connected(-1)


def test_be_two_config_quadrants_open():
    wf = build_be_two_config(0.1, 4.0, 1.4, 1.2)
    rays = np.array([[1, 0, 0], [0, 1, 0], [1, 0.3, 0], [0.2, 1, 0]], dtype=float)
    spec = CrossSectionSpec(rays, (1.0, 1.0), 0.8, 41)
    r12 = rays[0] / np.linalg.norm(rays[0]) - rays[1] / np.linalg.norm(rays[1])
    r34 = rays[2] / np.linalg.norm(rays[2]) - rays[3] / np.linalg.norm(rays[3])
    assert abs(np.dot(r12, r34)) > 0.1
    cs = scan_cross_section(wf, spec)
    assert cs.quadrant_connected(1) or cs.quadrant_connected(-1)


def test_he_pair_distance_zero_line(he_triplet):
    spec = CrossSectionSpec(np.array([[1, 0, 0], [0, 1, 0]], dtype=float), (1.5,), t_range=0.6, resolution=21,
                            mode="pair_distance", r12_range=(0.7, 2.5))
    cs = scan_cross_section(he_triplet, spec)
    mid = len(cs.t1) // 2
    assert np.all(cs.signs[mid] == 0)
    assert np.all(cs.signs[mid + 1:] == cs.signs[-1, 0])
    assert np.all(cs.signs[:mid] == -cs.signs[-1, 0])


def test_scan_csv_deterministic():
    wf = build_be_hf(4.0, 1.4)
    spec = random_spec(derive_rng(3, "x"))
    a = scan_cross_section(wf, spec).to_csv()
    b = scan_cross_section(wf, spec).to_csv()
    assert a == b
    assert a.splitlines()[0] == "t1,t2,sign,value"
    assert len(a.splitlines()) == 1 + 33 * 33


def test_scan_layout_mismatch():
    spec = random_spec(derive_rng(1, "x"))
    with pytest.raises(ValueError):
        scan_cross_section(build_li_rhf(), spec)
