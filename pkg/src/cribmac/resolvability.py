"""Random-codebook resolvability experiments with exact n-letter output laws.

For small n the output law P_{Z^n} of a realized codebook is a mixture of
product distributions and is computed exactly; the divergence to the i.i.d.
target then needs no sampling. Randomness only enters through the codebook
draw, which is fully determined by the configured seed.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import AuxLaw, JointLaw, MacChannel, Scenario, TargetOutput, WiretapMac
from .errors import AbsoluteContinuityViolation, GuardExceeded, LawVariantError, UnsupportedScenario
from .probability import ProbVector, entropy, kl_divergence
from .strategies import shannon_strategy_decompose, strategy_table

GUARD_LOG2_STATES = 26
_TAG_X1, _TAG_X2, _TAG_STRATEGY = 1, 2, 3


def message_count(n: int, rate: float) -> int:
    """ceil(2^(n R)), robust to floating-point noise in n R."""
    if rate < 0:
        raise ValueError(f"rate must be nonnegative, got {rate}")
    return max(1, math.ceil(2.0 ** (n * rate) - 1e-9))


def check_output_guard(z_size: int, n: int) -> None:
    if n * math.log2(z_size) > GUARD_LOG2_STATES + 1e-12:
        raise GuardExceeded(
            f"|Z|^n = {z_size}^{n} exceeds the enumeration budget of 2^{GUARD_LOG2_STATES} states")


def derive_seed(*parts: int) -> int:
    """A 64-bit seed derived from integers via numpy's SeedSequence."""
    words = np.random.SeedSequence([int(p) & (2**64 - 1) for p in parts]).generate_state(
        2, np.uint32)
    return int(words[0]) << 32 | int(words[1])


def draw_words(rng: np.random.Generator, probs: np.ndarray, shape) -> np.ndarray:
    """i.i.d. symbols from ``probs`` by inverse-CDF sampling."""
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(shape), side="right").astype(np.int64)


def draw_conditional(rng: np.random.Generator, kernel: np.ndarray, given: np.ndarray) -> np.ndarray:
    """One symbol per entry of ``given`` from the row ``kernel[given]``."""
    cdf = np.cumsum(kernel, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(given.shape)
    return (u[..., None] >= cdf[given]).sum(axis=-1).astype(np.int64)


def _conditional_x2(law: JointLaw) -> np.ndarray:
    p = law.p
    px1 = p.sum(axis=1, keepdims=True)
    uniform = np.full_like(p, 1.0 / p.shape[1])
    return np.where(px1 > 0, p / np.where(px1 > 0, px1, 1.0), uniform)


def word_index(word: np.ndarray, base: int) -> int:
    out = 0
    for s in word:
        out = out * base + int(s)
    return out


@dataclass(frozen=True)
class CodebookConfig:
    scenario: Scenario
    n: int
    r1: float
    r2: float
    law: JointLaw | AuxLaw
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "scenario", Scenario.parse(self.scenario))
        if self.n < 1:
            raise ValueError("block length n must be >= 1")
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError("rates must be nonnegative")
        sc = self.scenario
        if sc is Scenario.STRICTLY_CAUSAL:
            raise UnsupportedScenario("strictly-causal codes are built by the block_markov module")
        if sc is Scenario.NON_COOPERATING:
            if not isinstance(self.law, AuxLaw):
                raise LawVariantError("non-cooperating codes need an AuxLaw")
            if self.law.u_size != 1:
                raise UnsupportedScenario("non-cooperating codes support |U| = 1 only")
        elif not isinstance(self.law, JointLaw):
            raise LawVariantError(f"{sc.value} codes need a JointLaw")

    @property
    def m1_count(self) -> int:
        return message_count(self.n, self.r1)

    @property
    def m2_count(self) -> int:
        return message_count(self.n, self.r2)

    @property
    def realized_rates(self) -> tuple[float, float]:
        return math.log2(self.m1_count) / self.n, math.log2(self.m2_count) / self.n

    def echo(self) -> dict:
        return {"scenario": self.scenario.value, "n": self.n, "r1": self.r1, "r2": self.r2,
                "seed": self.seed, "m1_count": self.m1_count, "m2_count": self.m2_count,
                "realized_r1": self.realized_rates[0], "realized_r2": self.realized_rates[1],
                "law": self.law.to_json()}


@dataclass(frozen=True, eq=False)
class Codebook:
    """A realized code.

    ``x2_words`` depends on the scenario: shape (M1, M2, n) for degraded message
    sets; a dict from realized x1-word (tuple) to an (M2, n) sub-codebook for
    non-causal cribbing; (M2, n) for non-cooperating encoders; and (M2, n)
    strategy indices for causal cribbing, with ``strategies`` mapping them to maps
    from X1 to X2.
    """

    config: CodebookConfig
    x1_words: np.ndarray
    x2_words: np.ndarray | dict
    strategies: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def m1_count(self) -> int:
        return self.x1_words.shape[0]

    @property
    def m2_count(self) -> int:
        return self.config.m2_count

    def x2_for(self, m1: int) -> np.ndarray:
        """The (M2, n) Encoder-2 words used alongside message m1."""
        sc = self.config.scenario
        if sc is Scenario.DEGRADED:
            return self.x2_words[m1]
        if sc in (Scenario.NON_CAUSAL,):
            return self.x2_words[tuple(int(s) for s in self.x1_words[m1])]
        if sc is Scenario.CAUSAL:
            return self.strategies[self.x2_words, self.x1_words[m1][None, :]]
        return self.x2_words

    def word_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """(X1, X2) words for every message pair, m1-major, each (M1*M2, n)."""
        m2 = self.m2_count
        x1 = np.repeat(self.x1_words, m2, axis=0)
        x2 = np.concatenate([self.x2_for(m) for m in range(self.m1_count)], axis=0)
        return x1, x2


def sample_codebook(cfg: CodebookConfig) -> Codebook:
    m1, m2, n = cfg.m1_count, cfg.m2_count, cfg.n
    if math.log2(m1) + math.log2(m2) > GUARD_LOG2_STATES + 1e-12:
        raise GuardExceeded(f"{m1} x {m2} message pairs exceed the budget of 2^{GUARD_LOG2_STATES}")
    sc = cfg.scenario
    law = cfg.law
    if sc is Scenario.NON_COOPERATING:
        rng1 = np.random.default_rng([cfg.seed, _TAG_X1])
        rng2 = np.random.default_rng([cfg.seed, _TAG_X2])
        x1 = draw_words(rng1, law.p_x1_given_u[0], (m1, n))
        x2 = draw_words(rng2, law.p_x2_given_u[0], (m2, n))
        return Codebook(cfg, x1, x2)
    if sc is Scenario.CAUSAL:
        p_x1, p_t = shannon_strategy_decompose(law, restrict_to_support=True)
        rng1 = np.random.default_rng([cfg.seed, _TAG_X1])
        rng2 = np.random.default_rng([cfg.seed, _TAG_STRATEGY])
        x1 = draw_words(rng1, p_x1.probs, (m1, n))
        t = draw_words(rng2, p_t.probs, (m2, n))
        return Codebook(cfg, x1, t, strategy_table(*law.shape))
    rng1 = np.random.default_rng([cfg.seed, _TAG_X1])
    x1 = draw_words(rng1, law.p.sum(axis=1), (m1, n))
    kernel = _conditional_x2(law)
    if sc is Scenario.DEGRADED:
        rng2 = np.random.default_rng([cfg.seed, _TAG_X2])
        x2 = draw_conditional(rng2, kernel, np.broadcast_to(x1[:, None, :], (m1, m2, n)))
        return Codebook(cfg, x1, x2)
    books: dict[tuple[int, ...], np.ndarray] = {}
    for word in x1:
        key = tuple(int(s) for s in word)
        if key not in books:
            rng = np.random.default_rng([cfg.seed, _TAG_X2, word_index(word, law.shape[0]), n])
            books[key] = draw_conditional(rng, kernel, np.broadcast_to(word, (m2, n)))
    return Codebook(cfg, x1, books)


def _pair_rows(mac: MacChannel, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    return mac.w[x1, x2]  # (..., n, |Z|)


def product_mixture(rows: np.ndarray, weights: np.ndarray | None = None,
                    chunk_states: int = 1 << 22) -> np.ndarray:
    """sum_m w_m prod_i rows[m, i, z_i] over all z^n, first symbol most significant.

    ``rows`` has shape (M, n, |Z|); weights default to uniform.
    """
    m, n, k = rows.shape
    check_output_guard(k, n)
    w = np.full(m, 1.0 / m) if weights is None else np.asarray(weights, dtype=float)
    size = k**n
    out = np.zeros(size)
    step = max(1, chunk_states // size)
    for start in range(0, m, step):
        block = rows[start:start + step]
        acc = w[start:start + step, None].copy()
        for i in range(n):
            acc = (acc[:, :, None] * block[:, i, None, :]).reshape(acc.shape[0], -1)
        out += acc.sum(axis=0)
    return out


def _dedupe(x1: np.ndarray, x2: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    stacked = np.concatenate([x1, x2], axis=1)
    uniq, counts = np.unique(stacked, axis=0, return_counts=True)
    n = x1.shape[1]
    return uniq[:, :n], uniq[:, n:], counts / counts.sum()


def induced_n_letter_output(cb: Codebook, mac: MacChannel | WiretapMac) -> ProbVector:
    """Exact P_{Z^n} with uniform messages."""
    if isinstance(mac, WiretapMac):
        mac = mac.eavesdropper
    check_output_guard(mac.z_size, cb.n)
    x1, x2, w = _dedupe(*cb.word_pairs())
    p = product_mixture(_pair_rows(mac, x1, x2), w)
    return ProbVector(p, tol=1e-9)


def _target_vector(target) -> ProbVector:
    q = target.q_z if isinstance(target, TargetOutput) else target
    return q if isinstance(q, ProbVector) else ProbVector(q)


def check_target_support(cb: Codebook, mac: MacChannel, q: ProbVector) -> None:
    x1, x2 = cb.word_pairs()
    reach = mac.w[x1.ravel(), x2.ravel()].sum(axis=0) > 0
    bad = np.flatnonzero(reach & (q.probs <= 0))
    if bad.size:
        raise AbsoluteContinuityViolation(
            f"target puts zero mass on reachable output symbol(s) {bad.tolist()}")


def resolvability_kl(cb: Codebook, mac: MacChannel | WiretapMac, target) -> float:
    """D(P_{Z^n} || Q^{n}) in bits, computed exactly."""
    if isinstance(mac, WiretapMac):
        mac = mac.eavesdropper
    q = _target_vector(target)
    check_target_support(cb, mac, q)
    check_output_guard(mac.z_size, cb.n)
    p = induced_n_letter_output(cb, mac)
    return kl_divergence(p, q.power(cb.n))


@dataclass(frozen=True)
class SimReport:
    mean: float
    stderr: float
    per_trial: tuple[float, ...]
    config: dict = field(default_factory=dict)

    @property
    def kl_bits(self) -> float:
        return self.mean

    def to_json(self) -> dict:
        return {"kl_bits": self.mean, "mean": self.mean, "stderr": self.stderr,
                "per_trial": list(self.per_trial), "config": self.config}


def trial_config(cfg: CodebookConfig, trial: int) -> CodebookConfig:
    """The codebook configuration of one Monte Carlo trial."""
    return dataclasses.replace(cfg, seed=derive_seed(cfg.seed, trial))


def mc_expected_kl(cfg: CodebookConfig, mac: MacChannel | WiretapMac, target,
                   trials: int) -> SimReport:
    """Average exact divergence over independently drawn codebooks."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    values = [resolvability_kl(sample_codebook(trial_config(cfg, t)), mac, target)
              for t in range(trials)]
    arr = np.array(values)
    stderr = float(arr.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    echo = cfg.echo() | {"trials": trials}
    return SimReport(float(arr.mean()), stderr, tuple(values), echo)


def _message_terms(cb: Codebook, mac: MacChannel, q: np.ndarray | None):
    """Per-message-pair conditional entropies and divergences of product outputs."""
    x1, x2 = cb.word_pairs()
    rows = _pair_rows(mac, x1, x2)  # (M, n, |Z|)
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(rows > 0, rows * np.log2(np.where(rows > 0, rows, 1.0)), 0.0)
    h = -plogp.sum(axis=(1, 2))
    if q is None:
        return h, None
    logq = np.log2(np.where(q > 0, q, 1.0))
    cross = -(rows * logq).sum(axis=(1, 2))
    return h, cross - h


def exact_leakage(cb: Codebook, mac: MacChannel | WiretapMac) -> float:
    """I(M1, M2; Z^n) with uniform messages: H(Z^n) - average H(Z^n | m)."""
    if isinstance(mac, WiretapMac):
        mac = mac.eavesdropper
    h_z = entropy(induced_n_letter_output(cb, mac))
    h_cond, _ = _message_terms(cb, mac, None)
    return max(h_z - float(h_cond.mean()), 0.0)


def expected_conditional_kl(cb: Codebook, mac: MacChannel | WiretapMac, target) -> float:
    """E_M[D(P_{Z^n|M} || Q^n)]; each conditional law is a product, so this is closed form."""
    if isinstance(mac, WiretapMac):
        mac = mac.eavesdropper
    q = _target_vector(target)
    check_target_support(cb, mac, q)
    _, d = _message_terms(cb, mac, q.probs)
    return max(float(d.mean()), 0.0)
