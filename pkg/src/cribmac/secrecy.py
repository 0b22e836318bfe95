"""Wiretap codes for the cribbing MAC: exact error probability and leakage.

Secret messages are uniform and every encoder adds a uniform dither index.
The leakage I(M; Z^n) and the resolvability-side quantity
E_M[D(P_{Z^n|M} || Q^n)] are computed exactly by enumerating messages,
dithers and eavesdropper outputs. The legitimate decoder uses strong joint
typicality and declares an error unless exactly one candidate survives.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .channels import AuxLaw, JointLaw, Scenario, WiretapMac, full_joint
from .errors import BoundViolation, GuardExceeded, LawVariantError, UnsupportedScenario
from .probability import JointTable, TypicalityParams, entropy, is_jointly_typical
from .regions import (
    PreEliminationSystem,
    RatePoint,
    information_terms,
    pre_elimination_system,
    secrecy_region,
)
from .resolvability import (
    GUARD_LOG2_STATES,
    check_output_guard,
    derive_seed,
    draw_conditional,
    draw_words,
    message_count,
    word_index,
)
from .strategies import shannon_strategy_decompose, strategy_table

_TAG_X1, _TAG_X2, _TAG_U = 21, 22, 23


@dataclass(frozen=True)
class SecrecyCodeConfig:
    """Rates in bits per channel use.

    One-shot scenarios use ``n`` with dither rates ``r1p`` and ``r2p``. The
    strictly-causal code uses ``r`` and ``B`` with dither rates ``rho1p``,
    ``rho1pp`` (Encoder 1) and ``rho2`` (Encoder 2).
    """

    scenario: Scenario
    r1: float
    r2: float
    law: JointLaw | AuxLaw
    seed: int = 0
    epsilon: float = 0.5
    n: int | None = None
    r1p: float = 0.0
    r2p: float = 0.0
    r: int | None = None
    B: int | None = None
    rho1p: float = 0.0
    rho1pp: float = 0.0
    rho2: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "scenario", Scenario.parse(self.scenario))
        sc = self.scenario
        rates = (self.r1, self.r2, self.r1p, self.r2p, self.rho1p, self.rho1pp, self.rho2)
        if any(x < 0 for x in rates):
            raise ValueError("all rates must be nonnegative")
        if sc is Scenario.NON_COOPERATING:
            raise UnsupportedScenario("no secrecy code is defined for non-cooperating encoders")
        if sc is Scenario.STRICTLY_CAUSAL:
            if not isinstance(self.law, AuxLaw):
                raise LawVariantError("strictly-causal codes need an AuxLaw")
            if self.r is None or self.B is None or self.r < 1 or self.B < 2:
                raise ValueError("strictly-causal codes need r >= 1 and B >= 2")
            TypicalityParams(self.epsilon, self.r)
        else:
            if not isinstance(self.law, JointLaw):
                raise LawVariantError(f"{sc.value} codes need a JointLaw")
            if self.n is None or self.n < 1:
                raise ValueError("block length n must be >= 1")
            TypicalityParams(self.epsilon, self.n)

    @property
    def length(self) -> int:
        return self.r * self.B if self.scenario is Scenario.STRICTLY_CAUSAL else self.n

    @property
    def counts(self) -> dict[str, int]:
        if self.scenario is Scenario.STRICTLY_CAUSAL:
            r = self.r
            return {"m1": message_count(r, self.r1), "m1p": message_count(r, self.rho1p),
                    "m1pp": message_count(r, self.rho1pp), "m2": message_count(r, self.r2),
                    "m2p": message_count(r, self.rho2)}
        n = self.n
        return {"m1": message_count(n, self.r1), "m1p": message_count(n, self.r1p),
                "m2": message_count(n, self.r2), "m2p": message_count(n, self.r2p)}

    def echo(self) -> dict:
        out = {"scenario": self.scenario.value, "r1": self.r1, "r2": self.r2, "seed": self.seed,
               "epsilon": self.epsilon, "law": self.law.to_json(), "counts": self.counts}
        if self.scenario is Scenario.STRICTLY_CAUSAL:
            out |= {"r": self.r, "B": self.B, "rho1p": self.rho1p, "rho1pp": self.rho1pp,
                    "rho2": self.rho2}
        else:
            out |= {"n": self.n, "r1p": self.r1p, "r2p": self.r2p}
        return out


@dataclass(frozen=True, eq=False)
class SecrecyCodebook:
    """A realized wiretap code.

    One-shot codes: ``x1`` has shape (M1, L1, n) and ``x2`` maps every
    (m1, m1') to an (M2, L2, n) array (degraded: indexed by the pair, non-causal:
    shared by equal x1 words, causal: strategy words applied to x1).

    Strictly-causal codes: per block, ``u`` is (K, r), ``x1`` is (K, K, r) and
    ``x2`` is (K, M2*L2, r) where K = M1*L1'*L1'' indexes the tuple
    (m1, m1', m1'') flattened with m1 outermost. The cloud index of block b+1 is
    the satellite tuple of block b.
    """

    config: SecrecyCodeConfig
    x1: object
    x2: object
    u: object = None
    strategies: np.ndarray | None = None

    def x2_for(self, m1: int, m1p: int) -> np.ndarray:
        sc = self.config.scenario
        if sc is Scenario.DEGRADED:
            return self.x2[m1, m1p]
        if sc is Scenario.NON_CAUSAL:
            return self.x2[tuple(int(s) for s in self.x1[m1, m1p])]
        if sc is Scenario.CAUSAL:
            return self.strategies[self.x2, self.x1[m1, m1p][None, None, :]]
        raise UnsupportedScenario("x2_for applies to one-shot codes")

    def cloud_tuple(self, index: int) -> tuple[int, int, int]:
        c = self.config.counts
        return tuple(int(v) for v in np.unravel_index(index, (c["m1"], c["m1p"], c["m1pp"])))


def _conditional_x2(law: JointLaw) -> np.ndarray:
    p = law.p
    px1 = p.sum(axis=1, keepdims=True)
    return np.where(px1 > 0, p / np.where(px1 > 0, px1, 1.0), 1.0 / p.shape[1])


def chain_transmission(cb: SecrecyCodebook, cloud1: int, satellites, m2_tuples):
    """Clouds and channel inputs of a strictly-causal transmission.

    ``satellites[b]`` is the flattened (m1, m1', m1'') tuple of block b and
    ``m2_tuples[b]`` the flattened (m2, m2') tuple. The cloud of block b+1 is the
    satellite tuple of block b; ``cloud1`` is shared randomness.
    """
    cfg = cb.config
    if cfg.scenario is not Scenario.STRICTLY_CAUSAL:
        raise UnsupportedScenario("chain_transmission applies to strictly-causal codes")
    if len(satellites) != cfg.B or len(m2_tuples) != cfg.B:
        raise ValueError("one satellite tuple and one Encoder-2 tuple per block are needed")
    clouds = [int(cloud1)] + [int(s) for s in satellites[:-1]]
    x1 = np.concatenate([cb.x1[b][clouds[b], satellites[b]] for b in range(cfg.B)])
    x2 = np.concatenate([cb.x2[b][clouds[b], m2_tuples[b]] for b in range(cfg.B)])
    return clouds, x1, x2


def build_secrecy_codebook(cfg: SecrecyCodeConfig) -> SecrecyCodebook:
    c, sc = cfg.counts, cfg.scenario
    total = math.prod(c.values())
    if sc is Scenario.STRICTLY_CAUSAL:
        k = c["m1"] * c["m1p"] * c["m1pp"]
        total = k * max(k, c["m2"] * c["m2p"]) * cfg.r * cfg.B
    if math.log2(max(total, 1)) > GUARD_LOG2_STATES:
        raise GuardExceeded(f"codebook with {total} entries exceeds the budget")
    if sc is Scenario.STRICTLY_CAUSAL:
        return _build_block_code(cfg)
    n, law = cfg.n, cfg.law
    shape1 = (c["m1"], c["m1p"], n)
    rng1 = np.random.default_rng([cfg.seed, _TAG_X1])
    if sc is Scenario.CAUSAL:
        p_x1, p_t = shannon_strategy_decompose(law, restrict_to_support=True)
        x1 = draw_words(rng1, p_x1.probs, shape1)
        t = draw_words(np.random.default_rng([cfg.seed, _TAG_X2]), p_t.probs,
                       (c["m2"], c["m2p"], n))
        return SecrecyCodebook(cfg, x1, t, strategies=strategy_table(*law.shape))
    x1 = draw_words(rng1, law.p.sum(axis=1), shape1)
    kernel = _conditional_x2(law)
    if sc is Scenario.DEGRADED:
        rng2 = np.random.default_rng([cfg.seed, _TAG_X2])
        given = np.broadcast_to(x1[:, :, None, None, :], (c["m1"], c["m1p"], c["m2"], c["m2p"], n))
        return SecrecyCodebook(cfg, x1, draw_conditional(rng2, kernel, given))
    books: dict[tuple[int, ...], np.ndarray] = {}
    for word in x1.reshape(-1, n):
        key = tuple(int(s) for s in word)
        if key not in books:
            rng = np.random.default_rng([cfg.seed, _TAG_X2, word_index(word, law.shape[0]), n])
            books[key] = draw_conditional(rng, kernel,
                                          np.broadcast_to(word, (c["m2"], c["m2p"], n)))
    return SecrecyCodebook(cfg, x1, books)


def _build_block_code(cfg: SecrecyCodeConfig) -> SecrecyCodebook:
    c, r, law = cfg.counts, cfg.r, cfg.law
    k = c["m1"] * c["m1p"] * c["m1pp"]
    k2 = c["m2"] * c["m2p"]
    us, x1s, x2s = [], [], []
    for b in range(cfg.B):
        u = draw_words(np.random.default_rng([cfg.seed, b, _TAG_U]), law.p_u, (k, r))
        x1 = draw_conditional(np.random.default_rng([cfg.seed, b, _TAG_X1]), law.p_x1_given_u,
                              np.broadcast_to(u[:, None, :], (k, k, r)))
        x2 = draw_conditional(np.random.default_rng([cfg.seed, b, _TAG_X2]), law.p_x2_given_u,
                              np.broadcast_to(u[:, None, :], (k, k2, r)))
        us.append(u)
        x1s.append(x1)
        x2s.append(x2)
    return SecrecyCodebook(cfg, tuple(x1s), tuple(x2s), tuple(us))


@dataclass(frozen=True)
class SecrecyReport:
    p_error: float
    leakage_bits: float
    resolvability_bound_bits: float
    message_entropy_bits: float
    config: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"p_error": self.p_error, "leakage_bits": self.leakage_bits,
                "resolvability_bound_bits": self.resolvability_bound_bits,
                "message_entropy_bits": self.message_entropy_bits, "config": self.config,
                "extras": self.extras}


def _all_words(size: int, n: int) -> np.ndarray:
    return np.array(np.unravel_index(np.arange(size**n), (size,) * n), dtype=np.int64).T.reshape(
        size**n, n)


def _products(rows: np.ndarray) -> np.ndarray:
    """Per-row product laws: (T, n, k) -> (T, k**n), first symbol most significant."""
    acc = np.ones((rows.shape[0], 1))
    for i in range(rows.shape[1]):
        acc = (acc[:, :, None] * rows[:, i, None, :]).reshape(rows.shape[0], -1)
    return acc


def _typical(sym: np.ndarray, y_words: np.ndarray, y_size: int, p: np.ndarray,
             eps: float) -> np.ndarray:
    """typical[t, j] for candidate symbol words ``sym`` (T, n) against y words (Ny, n).

    ``p`` is the joint law flattened with y innermost.
    """
    t_count, n = sym.shape
    k = p.size
    out = np.zeros((t_count, y_words.shape[0]), dtype=bool)
    step = max(1, (1 << 22) // max(1, y_words.shape[0] * n * k))
    eye = np.eye(k)
    for start in range(0, t_count, step):
        joint = sym[start:start + step, None, :] * y_size + y_words[None, :, :]
        counts = eye[joint].sum(axis=2)
        out[start:start + step] = np.all(np.abs(counts / n - p) <= eps * p + 1e-12, axis=-1)
    return out


def _leakage(cond_z: np.ndarray, q_n: np.ndarray) -> tuple[float, float]:
    """(I(M; Z^n), E_M D(P_{Z|M} || Q^n)) for uniform messages; rows of cond_z are P(z|m)."""
    p_z = cond_z.mean(axis=0)
    h_cond = np.mean([entropy(row) for row in cond_z])
    leak = max(entropy(p_z) - float(h_cond), 0.0)
    if np.any((cond_z > 0) & (q_n[None, :] <= 0)):
        return leak, math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(cond_z > 0, cond_z * np.log2(cond_z / np.where(q_n > 0, q_n, 1.0)), 0.0)
    return leak, max(float(terms.sum(axis=1).mean()), 0.0)


def simulate_secrecy(cfg: SecrecyCodeConfig, wmac: WiretapMac,
                     codebook: SecrecyCodebook | None = None) -> SecrecyReport:
    """Exact error probability and leakage of one realized code."""
    if not isinstance(wmac, WiretapMac):
        raise TypeError("simulate_secrecy needs a WiretapMac")
    check_output_guard(max(wmac.y_size, wmac.z_size), cfg.length)
    cb = codebook if codebook is not None else build_secrecy_codebook(cfg)
    if cfg.scenario is Scenario.STRICTLY_CAUSAL:
        return _simulate_block(cfg, cb, wmac)
    return _simulate_one_shot(cfg, cb, wmac)


def _simulate_one_shot(cfg: SecrecyCodeConfig, cb: SecrecyCodebook, wmac: WiretapMac):
    c, n = cfg.counts, cfg.n
    legit, eve = wmac.legitimate, wmac.eavesdropper
    jt = full_joint(wmac, cfg.law)
    # Every (m1, m1', m2, m2') tuple with its codeword pair, m1 outermost.
    x1s, x2s, msg = [], [], []
    for m1, m1p in itertools.product(range(c["m1"]), range(c["m1p"])):
        x2 = cb.x2_for(m1, m1p).reshape(-1, n)
        x1s.append(np.broadcast_to(cb.x1[m1, m1p], x2.shape))
        x2s.append(x2)
        msg += [m1 * c["m2"] + m2 for m2 in range(c["m2"]) for _ in range(c["m2p"])]
    x1 = np.concatenate(x1s)
    x2 = np.concatenate(x2s)
    msg = np.array(msg)
    # Eavesdropper side.
    pz = _products(eve.w[x1, x2])
    n_msgs = c["m1"] * c["m2"]
    cond = np.zeros((n_msgs, pz.shape[1]))
    np.add.at(cond, msg, pz)
    cond /= c["m1p"] * c["m2p"]
    q_n = jt.vector("Z").power(n).probs
    leak, bound = _leakage(cond, q_n)
    # Legitimate receiver: unique surviving message pair.
    y_words = _all_words(wmac.y_size, n)
    py = _products(legit.w[x1, x2])
    p_xy = jt.marginal("X1", "X2", "Y").probs.ravel()
    typ = _typical(x1 * wmac.x2_size + x2, y_words, wmac.y_size, p_xy, cfg.epsilon)
    ok = np.zeros_like(typ)
    for j in range(y_words.shape[0]):
        hits = np.unique(msg[typ[:, j]])
        if hits.size == 1:
            ok[:, j] = msg == hits[0]
    p_err = float(1.0 - (py * ok).sum(axis=1).mean())
    report = SecrecyReport(max(p_err, 0.0), leak, bound, math.log2(n_msgs), cfg.echo())
    _check_bound(report)
    return report


def _check_bound(report: SecrecyReport) -> None:
    if report.leakage_bits > report.resolvability_bound_bits + 1e-9:
        raise BoundViolation(
            f"leakage {report.leakage_bits!r} exceeds E_M D = {report.resolvability_bound_bits!r}")
    if report.leakage_bits > report.message_entropy_bits + 1e-9:
        raise BoundViolation("leakage exceeds the message entropy")


def _simulate_block(cfg: SecrecyCodeConfig, cb: SecrecyCodebook, wmac: WiretapMac):
    c, r, B = cfg.counts, cfg.r, cfg.B
    k = c["m1"] * c["m1p"] * c["m1pp"]
    k2 = c["m2"] * c["m2p"]
    law = cfg.law
    jt = full_joint(wmac, law)
    legit, eve = wmac.legitimate, wmac.eavesdropper
    # Backward decoding in the ideal coupling: block b succeeds when the unique
    # typical (cloud, Encoder-2 tuple) is the transmitted one, given the
    # satellite tuple recovered from block b+1 (or shared for the last block).
    y_words = _all_words(wmac.y_size, r)
    p_uxy = jt.marginal("U", "X1", "X2", "Y").probs.ravel()
    nx1, nx2 = wmac.x1_size, wmac.x2_size
    success = np.ones((1, 1))
    block_success = []
    for b in range(B):
        f = np.zeros((k, k))  # f[cloud, satellite]
        for s in range(k):
            cand_cloud = np.repeat(np.arange(k), k2)
            cand_m2 = np.tile(np.arange(k2), k)
            u = cb.u[b][cand_cloud]
            x1 = cb.x1[b][cand_cloud, s]
            x2 = cb.x2[b][cand_cloud, cand_m2]
            sym = (u * nx1 + x1) * nx2 + x2
            typ = _typical(sym, y_words, wmac.y_size, p_uxy, cfg.epsilon)
            py = _products(legit.w[x1, x2])
            for cl in range(k):
                rows = slice(cl * k2, (cl + 1) * k2)
                pool = typ[rows] if b == 0 else typ
                own = np.arange(k2) if b == 0 else np.arange(cl * k2, (cl + 1) * k2)
                unique = pool.sum(axis=0) == 1
                good = typ[own] & unique[None, :]
                f[cl, s] = float((py[rows] * good).sum(axis=1).mean())
        block_success.append(float(f.mean()))
        success = success @ f / k if b else np.full((1, k), 1.0 / k) @ f / k
        success = success.reshape(1, -1)
    p_error = max(1.0 - float(success.sum()), 0.0)

    # Leakage in the ideal coupling; secret messages live in blocks 1..B-1.
    shape_sat = (c["m1"], c["m1p"], c["m1pp"])
    secrets = list(itertools.product(range(c["m1"]), range(c["m2"]), repeat=B - 1))
    q_n = jt.vector("Z").power(r * B).probs
    pz_block = [_products(eve.w[cb.x1[b][:, :, None, :].repeat(k2, axis=2),
                                cb.x2[b][:, None, :, :].repeat(k, axis=1)].reshape(-1, r, wmac.z_size))
                .reshape(k, k, k2, -1) for b in range(B)]
    zr = wmac.z_size**r
    cond = np.zeros((len(secrets), zr**B))
    dith1 = list(itertools.product(range(c["m1p"]), range(c["m1pp"])))
    for i, sec in enumerate(secrets):
        m1s, m2s = sec[0::2], sec[1::2]
        # Distribution over (cloud of next block) and z so far.
        state = np.full((k, 1), 1.0 / k)  # cloud of block 1, empty z prefix
        for b in range(B):
            new = np.zeros((k, state.shape[1] * zr))
            if b < B - 1:
                sats = [np.ravel_multi_index((m1s[b], a, bb), shape_sat) for a, bb in dith1]
                m2t = [m2s[b] * c["m2p"] + d for d in range(c["m2p"])]
            else:
                sats = list(range(k))
                m2t = list(range(k2))
            w = 1.0 / (len(sats) * len(m2t))
            for cl in range(k):
                if not state[cl].any():
                    continue
                for s in sats:
                    pz = pz_block[b][cl, s, m2t].sum(axis=0) * w
                    new[s] += np.outer(state[cl], pz).ravel()
            state = new
        cond[i] = state.sum(axis=0)
    leak, bound = _leakage(cond, q_n)

    # Cribbing errors under the real coupling, per block, for the correction term.
    crib_err = []
    p_ux1 = JointTable(law.p_u[:, None] * law.p_x1_given_u, ("U", "X1"))
    params = TypicalityParams(cfg.epsilon, r)
    for b in range(B - 1):
        errs = 0
        for cl in range(k):
            words = cb.x1[b][cl]
            for s in range(k):
                hits = np.flatnonzero(np.all(words == words[s], axis=-1))
                typical = [h for h in hits if is_jointly_typical([cb.u[b][cl], words[s]], p_ux1,
                                                                 params)]
                errs += not (len(typical) == 1 and typical[0] == s)
        crib_err.append(errs / (k * k))
    extras = {"block_success": block_success, "crib_error": crib_err,
              "coupling_correction_variational": 2.0 * sum(crib_err),
              "secret_blocks": B - 1, "leakage_law": "ideal-coupling"}
    report = SecrecyReport(p_error, leak, bound, (B - 1) * math.log2(c["m1"] * c["m2"]),
                           cfg.echo(), extras)
    _check_bound(report)
    return report


def mc_leakage(cfg: SecrecyCodeConfig, wmac: WiretapMac, trials: int) -> dict:
    """Mean and standard error of the exact leakage over independently drawn codes."""
    from dataclasses import replace

    vals = [simulate_secrecy(replace(cfg, seed=derive_seed(cfg.seed, t)), wmac).leakage_bits
            for t in range(trials)]
    arr = np.array(vals)
    se = float(arr.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return {"mean": float(arr.mean()), "stderr": se, "per_trial": vals}


@dataclass(frozen=True)
class Witness:
    """Auxiliary rates making every pre-elimination inequality strict."""

    names: tuple[str, ...]
    values: tuple[float, ...]
    source: str
    min_slack: float

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))


def strictly_causal_corners(wmac: WiretapMac, law: AuxLaw, epsilon: float) -> dict:
    """The two corner assignments (rho1'', rho1', rho2, R1, R2) for the current case."""
    t = information_terms(full_joint(wmac, law))
    case_hi = t["H(X1|U)"] > t["I(UX1;Y)"]
    e = epsilon
    corner_a = {
        "rho1pp": t["I(U;Z)"] + e,
        "rho1p": t["I(X1;Z|U)"] + e,
        "rho2": t["I(X2;Z|UX1)"] + e,
        "R1": t["H(X1|U)"] - t["I(UX1;Z)"] - 2 * e,
    }
    corner_b = {
        "rho1pp": t["I(UX2;Z)"] + e,
        "rho1p": t["I(X1X2;Z)"] - t["I(UX2;Z)"] + e,
        "rho2": e,
        "R2": t["I(X2;Y|UX1)"] - e,
    }
    if case_hi:
        corner_a["R2"] = t["I(X1X2;Y)"] - t["I(X2;Z|UX1)"] - t["H(X1|U)"] - e
        corner_b["R1"] = t["I(X1X2;Y)"] - t["I(X2;Y|UX1)"] - t["I(X1X2;Z)"] - 2 * e
    else:
        corner_a["R2"] = t["I(X2;Y|UX1)"] - t["I(X2;Z|UX1)"] - e
        corner_b["R1"] = t["H(X1|U)"] - t["I(X1X2;Z)"] - 2 * e
    return {"case": "H(X1|U)>I(UX1;Y)" if case_hi else "H(X1|U)<=I(UX1;Y)",
            "A": corner_a, "B": corner_b, "terms": t}


def _lp_witness(system: PreEliminationSystem, r1: float, r2: float) -> tuple[np.ndarray, float]:
    """Maximize the smallest slack over nonnegative auxiliary rates."""
    k = len(system.aux_names)
    a_aux = system.coef[:, 2:]
    base = system.coef[:, 0] * r1 + system.coef[:, 1] * r2
    # slack_i = rhs - base - a.x (upper) or base + a.x - rhs (lower); require slack_i >= t.
    sign = np.where(system.upper, 1.0, -1.0)
    a_ub = np.hstack([sign[:, None] * a_aux, np.ones((len(sign), 1))])
    b_ub = sign * (system.rhs - base)
    cost = np.zeros(k + 1)
    cost[-1] = -1.0
    bounds = [(0, None)] * k + [(None, 10.0)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        return np.zeros(k), -math.inf
    return res.x[:k], float(res.x[-1])


def proposition_witness(wmac: WiretapMac, law, scenario, pt: RatePoint,
                        delta: float = 1e-9, epsilon: float | None = None) -> Witness | None:
    """Explicit auxiliary rates certifying ``pt``, or None when ``pt`` is not strictly inside.

    For strictly-causal cribbing the two corner assignments are tried first
    (with ``epsilon`` defaulting to a quarter of the smallest region margin);
    otherwise, and for the other scenarios, the auxiliary rates maximizing the
    smallest slack are found by linear programming. Every returned witness has
    been substituted back into the strict inequalities.
    """
    scenario = Scenario.parse(scenario)
    if pt.r1 < 0 or pt.r2 < 0:
        return None
    region = secrecy_region(wmac, law, scenario)
    margins = [c.margin(pt.r1, pt.r2) for c in region.constraints]
    if not region.feasible or min(margins) <= delta:
        return None
    system = pre_elimination_system(wmac, law, scenario)
    if scenario is Scenario.STRICTLY_CAUSAL:
        eps = epsilon if epsilon is not None else min(margins) / 4
        corners = strictly_causal_corners(wmac, law, eps)
        for name in ("A", "B"):
            cor = corners[name]
            if pt.r1 > cor["R1"] + 1e-15 or pt.r2 > cor["R2"] + 1e-15:
                continue
            aux = np.array([cor["rho1p"], cor["rho1pp"], cor["rho2"]])
            if system.satisfied(pt.r1, pt.r2, aux):
                slack = float(system.slacks(pt.r1, pt.r2, aux).min())
                return Witness(system.aux_names, tuple(aux.tolist()), f"corner-{name}", slack)
    aux, best = _lp_witness(system, pt.r1, pt.r2)
    if best <= 0 or not system.satisfied(pt.r1, pt.r2, aux):
        return None
    slack = float(system.slacks(pt.r1, pt.r2, aux).min())
    return Witness(system.aux_names, tuple(float(v) for v in aux), "lp", slack)
