from __future__ import annotations

import json

import numpy as np
import pytest

from cribmac.channels import (
    AuxLaw,
    JointLaw,
    MacChannel,
    Scenario,
    TargetOutput,
    WiretapMac,
    and_mac,
    full_joint,
    induced_output,
    law_from_json,
    load_channel,
    matches_target,
    xor_mac,
)
from cribmac.errors import DimensionMismatch, InvalidDistribution
from cribmac.probability import ProbVector

UNIFORM = JointLaw.product([0.5, 0.5], [0.5, 0.5])


def _random_mac(rng, z=2):
    return MacChannel(rng.dirichlet(np.ones(z), size=(2, 2)))


def test_induced_output_examples():
    q = np.array([0.2, 0.8])
    const = MacChannel(np.broadcast_to(q, (2, 2, 2)).copy())
    assert np.allclose(induced_output(const, UNIFORM).probs, q, atol=1e-12)
    assert np.allclose(induced_output(xor_mac(), UNIFORM).probs, [0.5, 0.5], atol=1e-12)
    assert np.allclose(induced_output(and_mac(), UNIFORM).probs, [0.75, 0.25], atol=1e-12)


def test_induced_output_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(10):
        mac = _random_mac(rng, 3)
        p = rng.dirichlet(np.ones(4)).reshape(2, 2)
        expect = np.zeros(3)
        for a in range(2):
            for b in range(2):
                expect += p[a, b] * mac.w[a, b]
        assert np.allclose(induced_output(mac, JointLaw(p)).probs, expect, atol=1e-12)


def test_dimension_mismatch():
    mac = MacChannel(np.full((3, 2, 2), 0.5))
    with pytest.raises(DimensionMismatch):
        induced_output(mac, UNIFORM)


def test_full_joint_examples():
    jt = full_joint(xor_mac(), UNIFORM)
    assert jt.probs.size == 8
    assert jt.probs.sum() == pytest.approx(1.0, abs=1e-12)
    aux = full_joint(xor_mac(), AuxLaw.independent([0.5, 0.5], [0.5, 0.5]))
    assert np.allclose(aux.marginal("X1", "X2", "Z").probs, jt.probs, atol=1e-15)
    rng = np.random.default_rng(1)
    for _ in range(10):
        mac = _random_mac(rng)
        law = AuxLaw(rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(2), 3),
                     rng.dirichlet(np.ones(2), 3))
        z = full_joint(mac, law).vector("Z").probs
        assert np.allclose(z, induced_output(mac, law).probs, atol=1e-12)
        assert np.allclose(induced_output(mac, law.to_joint()).probs, z, atol=1e-12)


def test_matches_target_boundary():
    mac = xor_mac(0.1)
    q = induced_output(mac, UNIFORM)
    assert matches_target(mac, UNIFORM, TargetOutput(q), 1e-9)
    point = MacChannel(np.broadcast_to([1.0, 0.0], (2, 2, 2)).copy())
    assert not matches_target(point, UNIFORM, TargetOutput(ProbVector([0.5, 0.5])), 1e-9)
    skew = JointLaw.product([0.5, 0.5], [0.75, 0.25])
    q_skew = induced_output(xor_mac(), skew).probs
    shifted = ProbVector([q_skew[0] + 0.125, q_skew[1] - 0.125])
    assert matches_target(xor_mac(), skew, shifted, 0.125)
    assert not matches_target(xor_mac(), skew, shifted, 0.12)


def test_wiretap_components_roundtrip():
    wm = WiretapMac.from_components(xor_mac(), and_mac())
    assert np.allclose(wm.legitimate.w, xor_mac().w)
    assert np.allclose(wm.eavesdropper.w, and_mac().w)
    jt = full_joint(wm, UNIFORM)
    assert jt.axes == ("X1", "X2", "Y", "Z")


def test_scenario_parse_aliases():
    assert Scenario.parse("strictly-causal") is Scenario.STRICTLY_CAUSAL
    assert Scenario.parse(Scenario.CAUSAL) is Scenario.CAUSAL
    with pytest.raises(ValueError):
        Scenario.parse("telepathic")


def test_load_channel_json(tmp_path):
    path = tmp_path / "xor.json"
    path.write_text(json.dumps(xor_mac().to_json()))
    assert np.allclose(load_channel(path).w, xor_mac().w)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"x1_size": 2, "x2_size": 2, "z_size": 2,
                               "w": [[0.7, 0.7], [0, 1], [0, 1], [1, 0]]}))
    with pytest.raises(InvalidDistribution):
        load_channel(bad)
    with pytest.raises(InvalidDistribution):
        load_channel({"x1_size": 2})
    wm = WiretapMac.from_components(xor_mac(), and_mac())
    assert np.allclose(load_channel(wm.to_json()).wyz, wm.wyz)


def test_law_from_json_variants():
    assert isinstance(law_from_json({"joint": [[0.25, 0.25], [0.25, 0.25]]}), JointLaw)
    assert isinstance(law_from_json({"p_x1": [0.5, 0.5], "p_x2": [0.5, 0.5], "aux": True}), AuxLaw)
    with pytest.raises(InvalidDistribution):
        law_from_json({"nothing": 1})
