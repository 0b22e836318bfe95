from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cribmac.errors import AbsoluteContinuityViolation, AxisError, InvalidDistribution, LengthMismatch
from cribmac.probability import (
    JointTable,
    Kernel,
    ProbVector,
    TypicalityParams,
    chain_decomposition,
    entropy,
    is_jointly_typical,
    is_strongly_typical,
    kl_divergence,
    mutual_information,
    pinsker_and_lemma1_bounds,
    variational_distance,
)

from oracles import cond_mi, h, kl, table_from_array


def _pmf(draw_floats):
    arr = np.asarray(draw_floats, dtype=float) + 1e-3
    return arr / arr.sum()


pmfs = st.lists(st.floats(0, 1), min_size=2, max_size=6).map(_pmf)


def test_entropy_examples():
    assert entropy(ProbVector([0.5, 0.5])) == pytest.approx(1.0, abs=1e-12)
    assert entropy(ProbVector.point_mass(3, 1)) == 0.0
    assert entropy(ProbVector([0.75, 0.25])) == pytest.approx(0.8112781245, abs=1e-10)
    assert entropy(ProbVector([0.75, 0.25])) == pytest.approx(h([0.75, 0.25]), abs=1e-12)


def test_prob_vector_rejects_invalid():
    with pytest.raises(InvalidDistribution):
        ProbVector([0.5, 0.6])
    with pytest.raises(InvalidDistribution):
        ProbVector([1.2, -0.2])
    with pytest.raises(InvalidDistribution):
        Kernel([[0.5, 0.5], [0.9, 0.2]])


def test_kl_examples():
    p = ProbVector([0.5, 0.5])
    assert kl_divergence(p, p) == 0.0
    assert kl_divergence(p, ProbVector([0.25, 0.75])) == pytest.approx(0.2075187496, abs=1e-10)
    with pytest.raises(AbsoluteContinuityViolation):
        kl_divergence(p, ProbVector([1.0, 0.0]))


def test_variational_examples():
    p = ProbVector([0.5, 0.5])
    assert variational_distance(p, p) == 0.0
    assert variational_distance(ProbVector.point_mass(2, 0), ProbVector.point_mass(2, 1)) == 2.0
    assert variational_distance(p, ProbVector([0.25, 0.75])) == pytest.approx(0.5, abs=1e-12)


def test_mutual_information_examples():
    indep = JointTable(np.full((2, 2), 0.25), ("A", "B"))
    assert mutual_information(indep, "A", "B") == pytest.approx(0.0, abs=1e-12)
    same = JointTable(np.diag([0.5, 0.5]), ("A", "B"))
    assert mutual_information(same, "A", "B") == pytest.approx(1.0, abs=1e-12)
    xor = np.zeros((2, 2, 2))
    for a in range(2):
        for b in range(2):
            xor[a, b, a ^ b] = 0.25
    jt = JointTable(xor, ("A", "B", "C"))
    assert mutual_information(jt, "A", "C") == pytest.approx(0.0, abs=1e-12)
    assert mutual_information(jt, ("A", "B"), "C") == pytest.approx(1.0, abs=1e-12)


def test_mutual_information_axis_errors():
    jt = JointTable(np.full((2, 2), 0.25), ("A", "B"))
    with pytest.raises(AxisError):
        mutual_information(jt, "A", "Q")
    with pytest.raises(AxisError):
        mutual_information(jt, "A", "A")


def test_mutual_information_matches_loop_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        arr = rng.dirichlet(np.ones(12)).reshape(2, 3, 2)
        jt = JointTable(arr, ("A", "B", "C"))
        table = table_from_array(arr)
        assert mutual_information(jt, "A", "B", "C") == pytest.approx(
            cond_mi(table, (0,), (1,), (2,)), abs=1e-12)
        assert mutual_information(jt, ("A", "C"), "B") == pytest.approx(
            cond_mi(table, (0, 2), (1,)), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(pmfs, st.integers(0, 10_000))
def test_kl_nonnegative_and_pinsker(p, seed):
    q = np.random.default_rng(seed).dirichlet(np.ones(p.size))
    d = kl_divergence(p, q)
    assert d >= 0.0
    assert d == pytest.approx(kl(p, q), abs=1e-12)
    v, bound = pinsker_and_lemma1_bounds(p, q)
    assert v**2 / (2 * np.log(2)) <= d + 1e-12
    assert d <= bound + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_mi_symmetric_and_nonnegative(seed):
    arr = np.random.default_rng(seed).dirichlet(np.ones(8)).reshape(2, 2, 2)
    jt = JointTable(arr, ("A", "B", "C"))
    assert mutual_information(jt, "A", "B") == pytest.approx(mutual_information(jt, "B", "A"),
                                                             abs=1e-12)
    assert mutual_information(jt, "A", "B", "C") >= 0.0


def test_variational_and_divergence_bound_examples():
    p = ProbVector([0.5, 0.5])
    assert pinsker_and_lemma1_bounds(p, p) == (0.0, 0.0)
    v, bound = pinsker_and_lemma1_bounds(p, ProbVector([0.25, 0.75]))
    assert v == pytest.approx(0.5)
    assert bound == pytest.approx(1.0)


def test_strong_typicality_examples():
    assert is_strongly_typical([1, 1, 1], ProbVector.point_mass(2, 1), TypicalityParams(0.1, 3))
    assert is_strongly_typical([0, 1, 0, 1], ProbVector([0.5, 0.5]), TypicalityParams(0.1, 4))
    assert not is_strongly_typical([0, 0, 0, 1], ProbVector([0.5, 0.5]), TypicalityParams(0.1, 4))
    with pytest.raises(LengthMismatch):
        is_strongly_typical([0, 1], ProbVector([0.5, 0.5]), TypicalityParams(0.1, 4))
    with pytest.raises(ValueError):
        TypicalityParams(1.5, 4)


def test_joint_typicality():
    jt = JointTable(np.diag([0.5, 0.5]), ("A", "B"))
    params = TypicalityParams(0.1, 4)
    assert is_jointly_typical([[0, 1, 0, 1], [0, 1, 0, 1]], jt, params)
    assert not is_jointly_typical([[0, 1, 0, 1], [1, 1, 0, 1]], jt, params)


def test_chain_decomposition_identity():
    rng = np.random.default_rng(11)
    q = np.array([0.3, 0.7])
    for _ in range(20):
        arr = rng.dirichlet(np.ones(16)).reshape(2, 2, 2, 2)
        jt = JointTable(arr.reshape(4, 4), ("Z1", "Z2"))
        out = chain_decomposition(jt, ("Z1", "Z2"), np.multiply.outer(q, q).ravel())
        assert out["total"] == pytest.approx(sum(out["per_block"]) + sum(out["cross"]), abs=1e-9)
