from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from cribmac.channels import AuxLaw, JointLaw, MacChannel, xor_mac
from cribmac.errors import AbsoluteContinuityViolation, GuardExceeded, UnsupportedScenario
from cribmac.probability import ProbVector, kl_divergence
from cribmac.resolvability import (
    CodebookConfig,
    exact_leakage,
    expected_conditional_kl,
    induced_n_letter_output,
    mc_expected_kl,
    message_count,
    resolvability_kl,
    sample_codebook,
    trial_config,
)

UNIFORM = JointLaw.product([0.5, 0.5], [0.5, 0.5])
Q = ProbVector([0.5, 0.5])


def _const_mac():
    return MacChannel(np.broadcast_to([0.3, 0.7], (2, 2, 2)).copy())


def _brute_output(cb, mac):
    """Per-message enumeration with explicit loops over z^n."""
    n = cb.n
    out = {}
    pairs = list(zip(*cb.word_pairs()))
    for z in itertools.product(range(mac.z_size), repeat=n):
        total = 0.0
        for x1, x2 in pairs:
            total += math.prod(mac.w[x1[i], x2[i], z[i]] for i in range(n))
        out[z] = total / len(pairs)
    return np.array([out[z] for z in sorted(out)])


def test_message_count_ceiling():
    assert message_count(4, 0.0) == 1
    assert message_count(4, 0.5) == 4
    assert message_count(3, 0.5) == 3
    assert message_count(2, 1.0) == 4


def test_zero_rates_single_pair_and_determinism():
    cb = sample_codebook(CodebookConfig("degraded", 5, 0.0, 0.0, UNIFORM, seed=1))
    x1, x2 = cb.word_pairs()
    assert x1.shape == (1, 5) and x2.shape == (1, 5)
    a = sample_codebook(CodebookConfig("degraded", 6, 0.5, 0.5, UNIFORM, seed=42))
    b = sample_codebook(CodebookConfig("degraded", 6, 0.5, 0.5, UNIFORM, seed=42))
    assert np.array_equal(a.x1_words, b.x1_words) and np.array_equal(a.x2_words, b.x2_words)


def test_codeword_frequencies_match_law():
    law = JointLaw.product([0.2, 0.8], [0.5, 0.5])
    words = np.concatenate([sample_codebook(CodebookConfig("degraded", 4, 0.5, 0.0, law, seed=s))
                            .x1_words for s in range(10_000)])
    assert words.shape[1] == 4
    assert words.mean() == pytest.approx(0.8, abs=0.01)


def test_non_causal_shares_sub_codebooks():
    law = JointLaw(np.array([[0.4, 0.1], [0.1, 0.4]]))
    for seed in range(30):
        cb = sample_codebook(CodebookConfig("non-causal", 2, 1.0, 0.5, law, seed=seed))
        words = [tuple(w) for w in cb.x1_words]
        for i, j in itertools.combinations(range(len(words)), 2):
            if words[i] == words[j]:
                assert np.array_equal(cb.x2_for(i), cb.x2_for(j))
                return
    pytest.fail("no x1 collision found to exercise the shared sub-codebook")


def test_unsupported_and_guard():
    with pytest.raises(UnsupportedScenario):
        CodebookConfig("strictly-causal", 2, 0.5, 0.5, UNIFORM)
    with pytest.raises(GuardExceeded):
        sample_codebook(CodebookConfig("degraded", 20, 1.0, 1.0, UNIFORM))
    cfg = CodebookConfig("non-cooperating", 3, 0.5, 0.5, AuxLaw.independent([0.5, 0.5], [0.5, 0.5]))
    assert sample_codebook(cfg).x2_words.shape == (3, 3)


def test_induced_output_examples():
    cb = sample_codebook(CodebookConfig("degraded", 3, 0.5, 0.5, UNIFORM, seed=3))
    const = _const_mac()
    out = induced_n_letter_output(cb, const)
    assert np.allclose(out.probs, ProbVector([0.3, 0.7]).power(3).probs, atol=1e-15)
    assert resolvability_kl(cb, const, ProbVector([0.3, 0.7])) == pytest.approx(0.0, abs=1e-12)
    single = sample_codebook(CodebookConfig("degraded", 3, 0.0, 0.0, UNIFORM, seed=3))
    out = induced_n_letter_output(single, xor_mac()).probs
    assert out.max() == 1.0


@pytest.mark.parametrize("scenario", ["degraded", "non-causal", "causal"])
def test_induced_output_matches_brute_force(scenario):
    law = JointLaw(np.array([[0.3, 0.2], [0.1, 0.4]]))
    for seed in range(3):
        cb = sample_codebook(CodebookConfig(scenario, 2, 0.5, 0.5, law, seed=seed))
        for mac in (xor_mac(), xor_mac(0.2)):
            assert np.allclose(induced_n_letter_output(cb, mac).probs, _brute_output(cb, mac),
                               atol=1e-12)


def test_kl_cross_path_and_support_bound():
    cb = sample_codebook(CodebookConfig("degraded", 4, 0.5, 0.5, UNIFORM, seed=0))
    direct = kl_divergence(induced_n_letter_output(cb, xor_mac(0.1)), Q.power(4))
    assert resolvability_kl(cb, xor_mac(0.1), Q) == pytest.approx(direct, abs=1e-12)
    n = 8
    cb = sample_codebook(CodebookConfig("degraded", n, 0.25, 0.25, UNIFORM, seed=0))
    support_bits = math.log2(cb.m1_count * cb.m2_count)
    assert resolvability_kl(cb, xor_mac(), Q) >= n - support_bits - 1e-9


def test_target_support_violation():
    cb = sample_codebook(CodebookConfig("degraded", 2, 0.5, 0.5, UNIFORM, seed=0))
    with pytest.raises(AbsoluteContinuityViolation):
        resolvability_kl(cb, xor_mac(), ProbVector([1.0, 0.0]))


def test_mc_expected_kl_examples():
    cfg = CodebookConfig("degraded", 3, 0.5, 0.5, UNIFORM, seed=5)
    rep = mc_expected_kl(cfg, _const_mac(), ProbVector([0.3, 0.7]), 5)
    assert rep.mean == pytest.approx(0.0, abs=1e-12) and rep.stderr == pytest.approx(0.0, abs=1e-12)
    one = mc_expected_kl(cfg, xor_mac(), Q, 1)
    assert one.mean == resolvability_kl(sample_codebook(trial_config(cfg, 0)), xor_mac(), Q)
    again = mc_expected_kl(cfg, xor_mac(), Q, 1)
    assert again.per_trial == one.per_trial


def test_exact_leakage_examples():
    cb = sample_codebook(CodebookConfig("degraded", 3, 0.0, 0.0, UNIFORM, seed=0))
    assert exact_leakage(cb, xor_mac(0.1)) == pytest.approx(0.0, abs=1e-12)
    noiseless = MacChannel.deterministic(lambda a, b: 2 * a + b, 2, 2, 4)
    for seed in range(50):
        cb = sample_codebook(CodebookConfig("degraded", 3, 0.5, 0.3, UNIFORM, seed=seed))
        x1, x2 = cb.word_pairs()
        images = {tuple(2 * a + b) for a, b in zip(x1, x2)}
        if len(images) == len(x1):
            assert exact_leakage(cb, noiseless) == pytest.approx(math.log2(len(x1)), abs=1e-12)
            return
    pytest.fail("no codebook with distinct images found")


def test_leakage_bounded_by_conditional_divergence():
    rng = np.random.default_rng(0)
    for seed in range(30):
        mac = MacChannel(rng.dirichlet(np.ones(2), size=(2, 2)))
        law = JointLaw(rng.dirichlet(np.ones(4)).reshape(2, 2))
        cb = sample_codebook(CodebookConfig("degraded", 3, 0.4, 0.4, law, seed=seed))
        q = ProbVector(rng.dirichlet(np.ones(2)))
        assert exact_leakage(cb, mac) <= expected_conditional_kl(cb, mac, q) + 1e-9
