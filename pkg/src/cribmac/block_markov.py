"""Block-Markov resolvability codes for strictly-causal cribbing.

Each block carries a cloud index m0 shared by both encoders, Encoder-1
indices (m1', m1'') and an Encoder-2 index m2. Encoder 2 cribs the x1 word of
block b, recovers m1'' and derives the next cloud index from it, so m1''
is the only link between blocks. Part of m1'' is also recycled as randomness
for the next block's m1' and m2, split by ``gamma``.

The chain is analysed exactly by carrying the pair (m1'', estimate of m1'')
from one block to the next as a finite state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import AuxLaw, JointLaw, MacChannel, Scenario, TargetOutput, WiretapMac, full_joint
from .errors import GuardExceeded, InfeasibleLaw, LawVariantError
from .probability import (
    JointTable,
    ProbVector,
    TypicalityParams,
    chain_decomposition,
    conditional_entropy,
    is_jointly_typical,
    kl_divergence,
    mutual_information,
    variational_distance,
)
from .regions import Constraint, RatePoint, RegionSpec, information_terms
from .resolvability import (
    GUARD_LOG2_STATES,
    check_output_guard,
    draw_conditional,
    draw_words,
    message_count,
)
from .strategies import reconstruct, shannon_strategy_decompose, strategy_channel, strategy_table

__all__ = [
    "BlockCodebooks",
    "BlockConfig",
    "ChainResult",
    "ChainState",
    "RecyclingPlan",
    "RhoAllocation",
    "build_block_codebooks",
    "causal_region_via_strategy",
    "default_allocation",
    "effective_rates",
    "reconstruct",
    "sample_chain",
    "shannon_strategy_decompose",
    "simulate_chain",
    "strategy_table",
]

_TAG_U, _TAG_X1, _TAG_X2, _TAG_FRESH = 11, 12, 13, 14


@dataclass(frozen=True)
class RhoAllocation:
    rho0: float
    rho1: float
    rho2: float
    rho3: float
    gamma: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        for name in ("rho0", "rho1", "rho2", "rho3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")

    def margins(self, terms: dict[str, float]) -> dict[str, float]:
        """Slack of every constraint on the allocation; all must be positive."""
        return {
            "decodability": terms["H(X1|U)"] - (self.rho1 + self.rho2),
            "rho0>I(U;Z)": self.rho0 - terms["I(U;Z)"],
            "rho0+rho1>I(UX1;Z)": self.rho0 + self.rho1 - terms["I(UX1;Z)"],
            "rho0+rho1+rho3>I(X1X2;Z)": self.rho0 + self.rho1 + self.rho3 - terms["I(X1X2;Z)"],
            "rho0+rho3>I(UX2;Z)": self.rho0 + self.rho3 - terms["I(UX2;Z)"],
            "recycling": self.rho2 - self.rho0,
        }

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in ("rho0", "rho1", "rho2", "rho3", "gamma", "epsilon")}


def default_allocation(joint: JointTable, epsilon: float, gamma: float = 1.0) -> RhoAllocation:
    """rho0 = I(U;Z)+e, rho1 = I(X1;Z|U)+e, rho2 = H(X1|U)-I(X1;Z|U)-2e, rho3 = I(X2;Z|UX1)+e.

    Recycling needs rho2 > rho0, i.e. H(X1|U) - I(U,X1;Z) > 3e; otherwise
    :class:`InfeasibleLaw` is raised.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if "U" not in joint.axes:
        raise LawVariantError("the allocation needs a joint table with a U axis")
    t = information_terms(joint)
    margin = t["H(X1|U)"] - t["I(UX1;Z)"]
    if margin <= 3 * epsilon + 1e-9:
        raise InfeasibleLaw(
            f"H(X1|U) - I(U,X1;Z) = {margin:.6g} does not exceed 3*epsilon = {3 * epsilon:.6g}")
    alloc = RhoAllocation(
        rho0=t["I(U;Z)"] + epsilon,
        rho1=t["I(X1;Z|U)"] + epsilon,
        rho2=t["H(X1|U)"] - t["I(X1;Z|U)"] - 2 * epsilon,
        rho3=t["I(X2;Z|UX1)"] + epsilon,
        gamma=gamma,
        epsilon=epsilon,
    )
    # I(U X1 X2; Z) = I(X1 X2; Z) because U - (X1, X2) - Z.
    assert abs(mutual_information(joint, ("U", "X1", "X2"), "Z") - t["I(X1X2;Z)"]) < 1e-9
    bad = {k: v for k, v in alloc.margins(t).items() if v <= 0}
    if bad:
        raise InfeasibleLaw(f"allocation violates {sorted(bad)}")
    return alloc


def effective_rates(alloc: RhoAllocation) -> RatePoint:
    """Fresh randomness per channel use after recycling."""
    g = alloc.gamma
    return RatePoint(alloc.rho1 + (1 - g) * alloc.rho2 + g * alloc.rho0,
                     alloc.rho3 - (1 - g) * (alloc.rho2 - alloc.rho0))


@dataclass(frozen=True)
class BlockConfig:
    r: int
    B: int
    alloc: RhoAllocation
    law: AuxLaw
    seed: int = 0
    crib_epsilon: float = 0.5

    def __post_init__(self) -> None:
        if self.r < 1 or self.B < 1:
            raise ValueError("r and B must be >= 1")
        if not isinstance(self.law, AuxLaw):
            raise LawVariantError("block-Markov codes need an AuxLaw")
        TypicalityParams(self.crib_epsilon, self.r)

    @property
    def sizes(self) -> dict[str, int]:
        a, r = self.alloc, self.r
        return {"m0": message_count(r, a.rho0), "m1p": message_count(r, a.rho1),
                "m1pp": message_count(r, a.rho2), "m2": message_count(r, a.rho3)}

    def echo(self) -> dict:
        return {"r": self.r, "B": self.B, "alloc": self.alloc.to_json(), "law": self.law.to_json(),
                "seed": self.seed, "crib_epsilon": self.crib_epsilon, "sizes": self.sizes}


@dataclass(frozen=True)
class RecyclingPlan:
    """Bit fields of m1'' reused in the next block.

    The low ``w0`` bits of m1'' become the next cloud index, the following
    ``w1`` bits the low bits of the next m1', and the following ``w2`` bits the
    low bits of the next m2. The remaining high bits of m1' and m2 are fresh.
    ``residue_bits`` is the part of r*(rho2 - rho0) lost to rounding widths down.
    """

    w0: int
    w1: int
    w2: int
    fresh_m1p: int
    fresh_m2: int
    residue_bits: float

    @classmethod
    def from_config(cls, cfg: BlockConfig) -> RecyclingPlan:
        s, a, r = cfg.sizes, cfg.alloc, cfg.r
        avail = int(math.floor(math.log2(s["m1pp"]) + 1e-12))
        w0 = min(int(math.floor(math.log2(s["m0"]) + 1e-12)), avail)
        extra = max(r * (a.rho2 - a.rho0), 0.0)
        w1 = min(int(math.floor(a.gamma * extra + 1e-9)),
                 int(math.floor(math.log2(s["m1p"]) + 1e-12)), avail - w0)
        w2 = min(int(math.floor((1 - a.gamma) * extra + 1e-9)),
                 int(math.floor(math.log2(s["m2"]) + 1e-12)), avail - w0 - w1)
        residue = extra - w1 - w2
        return cls(w0, w1, w2, max(1, s["m1p"] >> w1), max(1, s["m2"] >> w2), residue)

    def cloud(self, m1pp):
        return np.asarray(m1pp) & ((1 << self.w0) - 1)

    def to_m1p(self, m1pp):
        return (np.asarray(m1pp) >> self.w0) & ((1 << self.w1) - 1)

    def to_m2(self, m1pp):
        return (np.asarray(m1pp) >> (self.w0 + self.w1)) & ((1 << self.w2) - 1)

    def to_json(self) -> dict:
        return {"w0": self.w0, "w1": self.w1, "w2": self.w2, "fresh_m1p": self.fresh_m1p,
                "fresh_m2": self.fresh_m2, "residue_bits": self.residue_bits}


@dataclass(frozen=True, eq=False)
class BlockCodebooks:
    """Per-block codebooks: u (K0, r), x1 (K0, K1, K2, r) and x2 (K0, K3, r)."""

    config: BlockConfig
    u: tuple[np.ndarray, ...]
    x1: tuple[np.ndarray, ...]
    x2: tuple[np.ndarray, ...]
    plan: RecyclingPlan
    shared_m0_seed: int


def build_block_codebooks(cfg: BlockConfig) -> BlockCodebooks:
    s, r, law = cfg.sizes, cfg.r, cfg.law
    entries = s["m0"] * max(s["m1p"] * s["m1pp"], s["m2"]) * r
    if math.log2(entries) > GUARD_LOG2_STATES:
        raise GuardExceeded(f"block codebook with {entries} symbols exceeds the budget")
    us, x1s, x2s = [], [], []
    for b in range(cfg.B):
        u = draw_words(np.random.default_rng([cfg.seed, b, _TAG_U]), law.p_u, (s["m0"], r))
        rng1 = np.random.default_rng([cfg.seed, b, _TAG_X1])
        x1 = draw_conditional(rng1, law.p_x1_given_u,
                              np.broadcast_to(u[:, None, None, :], (s["m0"], s["m1p"], s["m1pp"], r)))
        rng2 = np.random.default_rng([cfg.seed, b, _TAG_X2])
        x2 = draw_conditional(rng2, law.p_x2_given_u,
                              np.broadcast_to(u[:, None, :], (s["m0"], s["m2"], r)))
        us.append(u)
        x1s.append(x1)
        x2s.append(x2)
    return BlockCodebooks(cfg, tuple(us), tuple(x1s), tuple(x2s), RecyclingPlan.from_config(cfg),
                          shared_m0_seed=cfg.seed)


def crib_decode(books: BlockCodebooks, b: int, m0hat: int, x1_obs: np.ndarray) -> int | None:
    """Encoder-2 estimate of m1'' from the cribbed x1 word; None on failure.

    Candidates are index pairs whose codeword equals the observation and whose
    (u, x1) pair is strongly typical; only a unique candidate is accepted.
    """
    cfg = books.config
    words = books.x1[b][m0hat]
    hits = np.argwhere(np.all(words == x1_obs, axis=-1))
    params = TypicalityParams(cfg.crib_epsilon, cfg.r)
    p_ux1 = JointTable(cfg.law.p_u[:, None] * cfg.law.p_x1_given_u, ("U", "X1"))
    u = books.u[b][m0hat]
    found = [int(c) for _, c in hits if is_jointly_typical([u, x1_obs], p_ux1, params)]
    return found[0] if len(found) == 1 else None


def _block_kernel(books: BlockCodebooks, mac: MacChannel, b: int, ideal: bool,
                  prev: np.ndarray | None) -> np.ndarray:
    """T[s, z, m1pp, m1pp_hat] for block b given the previous link state s.

    ``prev`` lists the previous (m1'', m1''-hat) pairs; None means block 1,
    where the cloud index comes from shared randomness uniform over 2^w0.
    """
    cfg, plan = books.config, books.plan
    s = cfg.sizes
    k2, zr = s["m1pp"], mac.z_size ** cfg.r
    rows_z = _word_output_table(mac, cfg.r)
    if prev is None:
        states = [(m0, m0, None, None) for m0 in range(1 << plan.w0)]
    else:
        states = [(int(plan.cloud(m)), int(plan.cloud(mh)), m, mh) for m, mh in prev]
    out = np.zeros((len(states), zr, k2, k2))
    cache: dict[tuple[int, int], int] = {}
    for i, (m0, m0h, m, mh) in enumerate(states):
        if m is None:
            m1p_all = np.arange(s["m1p"])
            m2_all = np.arange(s["m2"])
        else:
            m1p_all = int(plan.to_m1p(m)) | (np.arange(plan.fresh_m1p) << plan.w1)
            m2_all = int(plan.to_m2(mh)) | (np.arange(plan.fresh_m2) << plan.w2)
        weight = 1.0 / (len(m1p_all) * k2 * len(m2_all))
        for m1p in m1p_all:
            for m1pp in range(k2):
                x1 = books.x1[b][m0, m1p, m1pp]
                if ideal:
                    est = m1pp
                else:
                    key = (m0h, _word_key(x1, mac.x1_size))
                    if key not in cache:
                        dec = crib_decode(books, b, m0h, x1)
                        cache[key] = -1 if dec is None else dec
                    est = cache[key]
                    est = 0 if est < 0 else est
                x2s = books.x2[b][m0h, m2_all]  # (len(m2_all), r)
                idx = _pair_word_index(x1[None, :], x2s, mac)
                out[i, :, m1pp, est] += weight * rows_z[idx].sum(axis=0)
    return out


def _word_key(word: np.ndarray, base: int) -> int:
    k = 0
    for s in word:
        k = k * base + int(s)
    return k


def _pair_word_index(x1: np.ndarray, x2: np.ndarray, mac: MacChannel) -> np.ndarray:
    """Index of each (x1 word, x2 word) pair in the table of :func:`_word_output_table`."""
    pair = np.broadcast_to(x1, x2.shape) * mac.x2_size + x2
    base = mac.x1_size * mac.x2_size
    idx = np.zeros(pair.shape[0], dtype=np.int64)
    for i in range(pair.shape[1]):
        idx = idx * base + pair[:, i]
    return idx


_OUTPUT_CACHE: dict[tuple, np.ndarray] = {}


def _word_output_table(mac: MacChannel, r: int) -> np.ndarray:
    """Row k is P(z^r | input-pair word k) over all |Z|^r outputs."""
    key = (mac.w.shape, mac.w.tobytes(), r)
    hit = _OUTPUT_CACHE.get(key)
    if hit is not None:
        return hit
    w = mac.w.reshape(-1, mac.z_size)
    table = np.ones((1, 1))
    for _ in range(r):
        table = np.einsum("az,bk->abzk", table, w).reshape(table.shape[0] * w.shape[0], -1)
    _OUTPUT_CACHE.clear()
    _OUTPUT_CACHE[key] = table
    return table


@dataclass(frozen=True, eq=False)
class ChainResult:
    joint: JointTable
    diagnostics: dict
    coupling: str
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"coupling": self.coupling, "config": self.config, "diagnostics": self.diagnostics}


def _chain_joint(books: BlockCodebooks, mac: MacChannel, ideal: bool) -> np.ndarray:
    """Dense array over (M1pp_1, M1pphat_1, Z_1, ..., M1pp_B, M1pphat_B, Z_B)."""
    cfg = books.config
    k2 = cfg.sizes["m1pp"]
    zr = mac.z_size ** cfg.r
    prev_states = [(m, mh) for m in range(k2) for mh in range(k2)]
    t1 = _block_kernel(books, mac, 0, ideal, None)  # (n0, z, k2, k2)
    init = np.full(t1.shape[0], 1.0 / t1.shape[0])
    joint = np.einsum("s,szab->abz", init, t1)  # (k2, k2, z)
    for b in range(1, cfg.B):
        tb = _block_kernel(books, mac, b, ideal, prev_states)  # (k2*k2, z, k2, k2)
        tb = tb.reshape(k2, k2, zr, k2, k2)
        lead = joint.shape[:-3]
        j = joint.reshape(-1, k2, k2, zr)
        new = np.einsum("iabz,abwcd->iabzcdw", j, tb)
        joint = new.reshape(lead + (k2, k2, zr, k2, k2, zr))
    return joint


def _axes(B: int) -> tuple[str, ...]:
    out: list[str] = []
    for b in range(1, B + 1):
        out += [f"M1pp_{b}", f"M1pphat_{b}", f"Z_{b}"]
    return tuple(out)


def simulate_chain(cfg: BlockConfig, mac: MacChannel | WiretapMac, target,
                   coupling: str = "ideal") -> ChainResult:
    """Exact law of the chained code and the block decomposition diagnostics.

    ``coupling="ideal"`` lets Encoder 2 use the true m1'' (the law called P-bar);
    ``"estimated"`` uses the cribbing decoder and additionally reports the
    distance to the ideal law against twice the cribbing error probability.
    """
    if coupling not in ("ideal", "estimated"):
        raise ValueError("coupling must be 'ideal' or 'estimated'")
    if isinstance(mac, WiretapMac):
        mac = mac.eavesdropper
    check_output_guard(mac.z_size, cfg.r * cfg.B)
    q = target.q_z if isinstance(target, TargetOutput) else target
    q = q if isinstance(q, ProbVector) else ProbVector(q)
    k2 = cfg.sizes["m1pp"]
    cells = (k2 * k2 * mac.z_size**cfg.r) ** cfg.B
    if math.log2(cells) > GUARD_LOG2_STATES:
        raise GuardExceeded(f"exact chain table with {cells} cells exceeds the budget; "
                            "use sample_chain for estimates")
    books = build_block_codebooks(cfg)
    arr = _chain_joint(books, mac, coupling == "ideal")
    joint = JointTable(arr, _axes(cfg.B), tol=1e-9)
    diag = _diagnostics(joint, cfg, q)
    diag["recycling"] = books.plan.to_json()
    diag["block1_common_randomness"] = {"option": "a", "m0_values": 1 << books.plan.w0,
                                        "seed": books.shared_m0_seed}
    if coupling == "estimated":
        ideal = JointTable(_chain_joint(books, mac, True), _axes(cfg.B), tol=1e-9)
        diag["coupling_check"] = _coupling_check(joint, ideal, cfg.B)
    return ChainResult(joint, diag, coupling, cfg.echo())


def _diagnostics(joint: JointTable, cfg: BlockConfig, q: ProbVector) -> dict:
    B = cfg.B
    zs = [f"Z_{b}" for b in range(1, B + 1)]
    qr = q.power(cfg.r)
    dec = chain_decomposition(joint, zs, qr)
    residual = dec["total"] - sum(dec["per_block"]) - sum(dec["cross"])
    markov = []
    for b in range(1, B):
        lhs = dec["cross"][b - 1]
        rhs = mutual_information(joint, f"Z_{b}", (f"M1pp_{b}", f"M1pphat_{b}"))
        markov.append({"block": b, "cross_mi": lhs, "link_mi": rhs, "holds": lhs <= rhs + 1e-9})
    secrecy_terms = []
    p_err = []
    for b in range(1, B + 1):
        pm = joint.marginal(f"M1pp_{b}", f"Z_{b}").probs
        ref = np.outer(pm.sum(axis=1), qr.probs)
        secrecy_terms.append(kl_divergence(pm.ravel(), ref.ravel()))
        mm = joint.marginal(f"M1pp_{b}", f"M1pphat_{b}").probs
        p_err.append(max(float(1.0 - np.trace(mm)), 0.0))
    return {
        "total_kl": dec["total"],
        "per_block_kl": dec["per_block"],
        "cross_mi": dec["cross"],
        "decomposition_residual": residual,
        "decomposition_holds": abs(residual) <= 1e-9,
        "markov_bound": markov,
        "link_secrecy_kl": secrecy_terms,
        "crib_error": p_err,
    }


def _coupling_check(real: JointTable, ideal: JointTable, B: int) -> list[dict]:
    rows = []
    for b in range(1, B + 1):
        p = real.vector(f"M1pp_{b}", f"Z_{b}")
        pbar = ideal.vector(f"M1pp_{b}", f"Z_{b}")
        v = variational_distance(p, pbar)
        if b == 1:
            bound = 0.0
        else:
            mm = real.marginal(f"M1pp_{b - 1}", f"M1pphat_{b - 1}").probs
            bound = 2.0 * max(float(1.0 - np.trace(mm)), 0.0)
        rows.append({"block": b, "variational": v, "bound": bound, "holds": v <= bound + 1e-9})
    return rows


@dataclass
class ChainState:
    """Message tuples of one sampled trajectory, one entry per block."""

    m0: list[int] = field(default_factory=list)
    m0_hat: list[int] = field(default_factory=list)
    m1p: list[int] = field(default_factory=list)
    m1pp: list[int] = field(default_factory=list)
    m1pp_hat: list[int] = field(default_factory=list)
    m2: list[int] = field(default_factory=list)
    z: list[tuple[int, ...]] = field(default_factory=list)


def sample_chain(cfg: BlockConfig, mac: MacChannel | WiretapMac, trajectories: int,
                 coupling: str = "estimated") -> dict:
    """Monte Carlo trajectories for chains too large for exact analysis.

    Returns sampled states plus plug-in estimates (flagged as such) of the
    per-block cribbing error rate.
    """
    if isinstance(mac, WiretapMac):
        mac = mac.eavesdropper
    books = build_block_codebooks(cfg)
    plan, s = books.plan, cfg.sizes
    rng = np.random.default_rng([cfg.seed, _TAG_FRESH])
    states = []
    errors = np.zeros(cfg.B)
    for _ in range(trajectories):
        st = ChainState()
        m1pp_prev = m1pp_hat_prev = None
        for b in range(cfg.B):
            if m1pp_prev is None:
                m0 = m0h = int(rng.integers(1 << plan.w0))
                m1p = int(rng.integers(s["m1p"]))
                m2 = int(rng.integers(s["m2"]))
            else:
                m0, m0h = int(plan.cloud(m1pp_prev)), int(plan.cloud(m1pp_hat_prev))
                m1p = int(plan.to_m1p(m1pp_prev)) | int(rng.integers(plan.fresh_m1p)) << plan.w1
                m2 = int(plan.to_m2(m1pp_hat_prev)) | int(rng.integers(plan.fresh_m2)) << plan.w2
            m1pp = int(rng.integers(s["m1pp"]))
            x1 = books.x1[b][m0, m1p, m1pp]
            x2 = books.x2[b][m0h, m2]
            z = draw_conditional(rng, mac.w.reshape(-1, mac.z_size), x1 * mac.x2_size + x2)
            if coupling == "ideal":
                est = m1pp
            else:
                dec = crib_decode(books, b, m0h, x1)
                est = 0 if dec is None else dec
            errors[b] += est != m1pp
            for name, val in (("m0", m0), ("m0_hat", m0h), ("m1p", m1p), ("m1pp", m1pp),
                              ("m1pp_hat", est), ("m2", m2)):
                getattr(st, name).append(val)
            st.z.append(tuple(int(v) for v in z))
            m1pp_prev, m1pp_hat_prev = m1pp, est
        states.append(st)
    return {"estimate": True, "trajectories": trajectories, "states": states,
            "crib_error_rate": (errors / trajectories).tolist(), "recycling": plan.to_json()}


def causal_region_via_strategy(mac: MacChannel, law: JointLaw) -> RegionSpec:
    """Causal-cribbing thresholds through the strategy channel W+(z|x1,t) = W(z|x1,t(x1)).

    The strictly-causal formulas are applied to the product law P(x1) P(t) with
    a trivial auxiliary. When H(X1|Z) = 0 the strict constraint of the
    strictly-causal inner bound cannot hold and the extremal scheme is needed;
    this is reported through the ``"extremal-branch"`` flag.
    """
    if not isinstance(law, JointLaw):
        raise LawVariantError("causal_region_via_strategy needs a JointLaw")
    if isinstance(mac, WiretapMac):
        mac = mac.eavesdropper
    p_x1, p_t = shannon_strategy_decompose(law, restrict_to_support=True)
    wplus = strategy_channel(mac)
    aux = AuxLaw.independent(p_x1.probs, p_t.probs)
    jt = full_joint(wplus, aux)
    t = information_terms(jt)
    cons = (
        Constraint(1, 0, t["I(UX1;Z)"], ">=", "R1"),
        Constraint(0, 1, t["I(X1X2;Z)"] - t["H(X1|U)"], ">=", "R2"),
        Constraint(1, 1, t["I(X1X2;Z)"], ">=", "sum"),
    )
    h_x1_given_z = conditional_entropy(jt, "X1", "Z")
    flags = frozenset({"extremal-branch"}) if h_x1_given_z <= 1e-12 else frozenset()
    info = {"terms": t, "H(X1|Z)": h_x1_given_z, "strategies": int(len(p_t))}
    return RegionSpec(cons, "resolvability", Scenario.CAUSAL, "exact", True, info, flags)
