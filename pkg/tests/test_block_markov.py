from __future__ import annotations

import numpy as np
import pytest

from cribmac.block_markov import (
    BlockConfig,
    RecyclingPlan,
    RhoAllocation,
    build_block_codebooks,
    causal_region_via_strategy,
    default_allocation,
    effective_rates,
    sample_chain,
    simulate_chain,
)
from cribmac.channels import AuxLaw, JointLaw, MacChannel, and_mac, full_joint, xor_mac
from cribmac.errors import InfeasibleLaw
from cribmac.probability import ProbVector
from cribmac.regions import information_terms, resolvability_thresholds, same_constraints

TRIVIAL_U = AuxLaw.independent([0.5, 0.5], [0.5, 0.5])
Q = ProbVector([0.5, 0.5])


def _xor_alloc(eps=0.05, gamma=1.0):
    return default_allocation(full_joint(xor_mac(), TRIVIAL_U), eps, gamma)


def test_default_allocation_xor_closed_form():
    eps = 0.05
    a = _xor_alloc(eps)
    assert a.rho0 == pytest.approx(eps, abs=1e-12)
    assert a.rho1 == pytest.approx(eps, abs=1e-12)
    assert a.rho2 == pytest.approx(1 - 2 * eps, abs=1e-12)
    assert a.rho3 == pytest.approx(1 + eps, abs=1e-12)


def test_default_allocation_infeasible():
    sees_x1 = MacChannel.deterministic(lambda a, b: a, 2, 2, 2)
    with pytest.raises(InfeasibleLaw):
        default_allocation(full_joint(sees_x1, TRIVIAL_U), 0.01)


def test_default_allocation_margins_random():
    rng = np.random.default_rng(6)
    checked = 0
    for _ in range(40):
        mac = MacChannel(rng.dirichlet(np.ones(2), size=(2, 2)))
        law = AuxLaw(rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(2), 2),
                     rng.dirichlet(np.ones(2), 2))
        jt = full_joint(mac, law)
        eps = 0.01
        try:
            a = default_allocation(jt, eps)
        except InfeasibleLaw:
            continue
        margins = a.margins(information_terms(jt))
        for key, val in margins.items():
            if key != "recycling":
                assert val >= eps - 1e-9, key
        checked += 1
    assert checked > 5


def test_effective_rates_corners_and_invariance():
    a = RhoAllocation(0.1, 0.2, 0.6, 0.9, gamma=1.0)
    r = effective_rates(a)
    assert (r.r1, r.r2) == (0.2 + 0.1, 0.9)
    b = RhoAllocation(0.1, 0.2, 0.6, 0.9, gamma=0.0)
    r0 = effective_rates(b)
    assert (r0.r1, r0.r2) == (0.2 + 0.6, 0.9 - 0.6 + 0.1)
    for g in np.linspace(0, 1, 5):
        rg = effective_rates(RhoAllocation(0.1, 0.2, 0.6, 0.9, gamma=float(g)))
        assert rg.r1 + rg.r2 == pytest.approx(0.2 + 0.6 + 0.9 - 0.5, abs=1e-15)


def test_codebook_structure():
    cfg = BlockConfig(3, 1, _xor_alloc(), TRIVIAL_U, seed=2)
    books = build_block_codebooks(cfg)
    s = cfg.sizes
    assert s == {"m0": 2, "m1p": 2, "m1pp": 7, "m2": 9}
    assert books.u[0].shape == (2, 3) and np.all(books.u[0] == 0)
    assert books.x1[0].shape == (2, 2, 7, 3) and books.x2[0].shape == (2, 9, 3)
    again = build_block_codebooks(cfg)
    assert np.array_equal(books.x1[0], again.x1[0])


def test_recycling_plan_budget():
    cfg = BlockConfig(2, 2, _xor_alloc(), TRIVIAL_U)
    plan = RecyclingPlan.from_config(cfg)
    assert plan.w0 + plan.w1 + plan.w2 <= int(np.log2(cfg.sizes["m1pp"]))
    assert plan.w1 + plan.w2 <= cfg.r * (cfg.alloc.rho2 - cfg.alloc.rho0) + 1e-9
    assert plan.residue_bits >= 0


def test_chain_input_independent_channel():
    const = MacChannel(np.full((2, 2, 2), 0.5))
    res = simulate_chain(BlockConfig(2, 2, _xor_alloc(), TRIVIAL_U), const, Q)
    d = res.diagnostics
    assert max(abs(v) for v in d["per_block_kl"] + d["cross_mi"]) <= 1e-12


@pytest.mark.parametrize("coupling", ["ideal", "estimated"])
def test_chain_decomposition_and_markov_bound(coupling):
    for mac in (xor_mac(), xor_mac(0.1)):
        res = simulate_chain(BlockConfig(2, 2, _xor_alloc(), TRIVIAL_U, seed=1), mac, Q, coupling)
        d = res.diagnostics
        assert abs(d["decomposition_residual"]) <= 1e-9
        assert all(m["holds"] for m in d["markov_bound"])
        if coupling == "estimated":
            assert all(c["holds"] for c in d["coupling_check"])
        else:
            assert d["crib_error"] == [0.0, 0.0]


def test_link_secrecy_term_decreases_with_block_length():
    """Exact D(P-bar_{Z_b, M1''} || Q^r P-bar_{M1''}) over r in {1, 2, 3} at B = 2."""
    law = TRIVIAL_U
    alloc = default_allocation(full_joint(xor_mac(), law), 0.2)
    values = [simulate_chain(BlockConfig(r, 2, alloc, law, seed=0), xor_mac(), Q)
              .diagnostics["link_secrecy_kl"] for r in (1, 2, 3)]
    for b in range(2):
        seq = [v[b] for v in values]
        assert all(later <= earlier + 1e-9 for earlier, later in zip(seq, seq[1:])), seq


def test_sample_chain_bookkeeping():
    cfg = BlockConfig(2, 3, _xor_alloc(), TRIVIAL_U, seed=4)
    out = sample_chain(cfg, xor_mac(), 20, coupling="ideal")
    plan = RecyclingPlan.from_config(cfg)
    assert out["estimate"] is True
    for st in out["states"]:
        for b in range(1, 3):
            assert st.m0[b] == int(plan.cloud(st.m1pp[b - 1]))
            assert st.m1p[b] & ((1 << plan.w1) - 1) == int(plan.to_m1p(st.m1pp[b - 1]))


def test_causal_region_via_strategy_examples():
    uni = JointLaw.product([0.5, 0.5], [0.5, 0.5])
    for mac in (xor_mac(), and_mac()):
        assert same_constraints(causal_region_via_strategy(mac, uni),
                                resolvability_thresholds(mac, uni, "non-causal"), 1e-12)
    pair = MacChannel.deterministic(lambda a, b: 2 * a + b, 2, 2, 4)
    spec = causal_region_via_strategy(pair, uni)
    assert "extremal-branch" in spec.flags
    assert same_constraints(spec, resolvability_thresholds(pair, uni, "non-causal"), 1e-12)
    assert "extremal-branch" not in causal_region_via_strategy(xor_mac(), uni).flags
