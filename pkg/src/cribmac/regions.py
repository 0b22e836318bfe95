"""Resolvability and secrecy rate regions as explicit half-space systems.

A region for one input law is a list of constraints ``a1*R1 + a2*R2 (>= | <=) b``.
Resolvability regions are upper sets (lower bounds on the randomness rates);
secrecy regions are polytopes containing the origin when nonempty. Membership
always adds ``R1, R2 >= 0``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .channels import (
    AuxLaw,
    JointLaw,
    MacChannel,
    Scenario,
    TargetOutput,
    WiretapMac,
    full_joint,
    induced_output,
    matches_target,
)
from .errors import (
    LawVariantError,
    NoFeasibleLaw,
    TargetMismatch,
    UnsupportedScenario,
)
from .probability import JointTable, ProbVector, conditional_entropy, mutual_information

FEASIBILITY_MARGIN = 1e-9

_JOINT_SCENARIOS = (Scenario.DEGRADED, Scenario.NON_CAUSAL, Scenario.CAUSAL)
_AUX_SCENARIOS = (Scenario.STRICTLY_CAUSAL, Scenario.NON_COOPERATING)


@dataclass(frozen=True)
class RatePoint:
    r1: float
    r2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r1) and math.isfinite(self.r2)):
            raise ValueError(f"rate pair must be finite, got ({self.r1}, {self.r2})")


@dataclass(frozen=True)
class Constraint:
    a1: float
    a2: float
    b: float
    sense: str  # ">=" or "<="
    label: str

    def __post_init__(self) -> None:
        if self.sense not in (">=", "<="):
            raise ValueError(f"sense must be '>=' or '<=', got {self.sense!r}")
        if not math.isfinite(self.b):
            raise ValueError(f"threshold for {self.label} is not finite")

    def margin(self, r1: float, r2: float) -> float:
        """Signed distance to violation; negative means violated."""
        lhs = self.a1 * r1 + self.a2 * r2
        return lhs - self.b if self.sense == ">=" else self.b - lhs


@dataclass(frozen=True, eq=False)
class RegionSpec:
    constraints: tuple[Constraint, ...]
    kind: str  # "resolvability" or "secrecy"
    scenario: Scenario
    bound: str = "exact"  # "inner", "outer" or "exact"
    feasible: bool = True
    info: dict = field(default_factory=dict)
    flags: frozenset = frozenset()

    def threshold(self, label: str) -> float:
        for c in self.constraints:
            if c.label == label:
                return c.b
        raise KeyError(label)

    @property
    def thresholds(self) -> dict[str, float]:
        return {c.label: c.b for c in self.constraints}

    def contains(self, pt: RatePoint | tuple[float, float], slack: float = 1e-9) -> bool:
        return contains(self, pt, slack)

    def vertices(self) -> list[RatePoint]:
        """Extreme points of the region intersected with the nonnegative quadrant."""
        if not self.feasible:
            return []
        lines = [(c.a1, c.a2, c.b) for c in self.constraints] + [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]
        pts: list[tuple[float, float]] = []
        for (a1, a2, b), (c1, c2, d) in itertools.combinations(lines, 2):
            det = a1 * c2 - a2 * c1
            if abs(det) < 1e-15:
                continue
            r1 = (b * c2 - a2 * d) / det
            r2 = (a1 * d - b * c1) / det
            if contains(self, (r1, r2), 1e-12):
                pts.append((max(r1, 0.0), max(r2, 0.0)))
        unique = sorted({(round(a, 12), round(b, 12)) for a, b in pts})
        return [RatePoint(a, b) for a, b in unique]

    def frontier(self) -> list[RatePoint]:
        """Pareto corners: minimal for resolvability, maximal for secrecy."""
        sign = 1.0 if self.kind == "resolvability" else -1.0
        return [RatePoint(*p) for p in pareto([(v.r1, v.r2) for v in self.vertices()], sign)]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "scenario": self.scenario.value,
            "bound": self.bound,
            "feasible": self.feasible,
            "constraints": [
                {"a1": c.a1, "a2": c.a2, "b": c.b, "sense": c.sense, "label": c.label}
                for c in self.constraints
            ],
            "info": self.info,
            "flags": sorted(self.flags),
        }


def contains(region: RegionSpec, pt, slack: float = 1e-9) -> bool:
    """Membership within ``slack``; infeasible regions contain nothing."""
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    r1, r2 = (pt.r1, pt.r2) if isinstance(pt, RatePoint) else (float(pt[0]), float(pt[1]))
    if not region.feasible:
        return False
    if r1 < -slack or r2 < -slack:
        return False
    return all(c.margin(r1, r2) >= -slack for c in region.constraints)


def pareto(points: Sequence[tuple[float, float]], sign: float = 1.0,
           tol: float = 1e-12) -> list[tuple[float, float]]:
    """Non-dominated points; ``sign=1`` keeps minima, ``sign=-1`` keeps maxima."""
    out = []
    for i, p in enumerate(points):
        dominated = False
        for j, q in enumerate(points):
            if i == j:
                continue
            le = sign * (q[0] - p[0]) <= tol and sign * (q[1] - p[1]) <= tol
            strict = sign * (q[0] - p[0]) < -tol or sign * (q[1] - p[1]) < -tol
            if le and (strict or j < i):
                dominated = True
                break
        if not dominated:
            out.append(p)
    return out


def same_constraints(a: RegionSpec, b: RegionSpec, tol: float = 1e-12) -> bool:
    if len(a.constraints) != len(b.constraints) or a.feasible != b.feasible:
        return False
    for c, d in zip(a.constraints, b.constraints):
        if (c.a1, c.a2, c.sense, c.label) != (d.a1, d.a2, d.sense, d.label):
            return False
        if abs(c.b - d.b) > tol:
            return False
    return True


def _require(law, scenario: Scenario) -> None:
    if scenario in _AUX_SCENARIOS and not isinstance(law, AuxLaw):
        raise LawVariantError(f"{scenario.value} needs an AuxLaw, got {type(law).__name__}")
    if scenario in _JOINT_SCENARIOS and not isinstance(law, JointLaw):
        raise LawVariantError(f"{scenario.value} needs a JointLaw, got {type(law).__name__}")


def information_terms(joint: JointTable) -> dict[str, float]:
    """Every mutual information and entropy term used by the region formulas."""
    axes = set(joint.axes)
    t: dict[str, float] = {}
    has_u = "U" in axes
    for out in ("Z", "Y"):
        if out not in axes:
            continue
        t[f"I(X1;{out})"] = mutual_information(joint, "X1", out)
        t[f"I(X1X2;{out})"] = mutual_information(joint, ("X1", "X2"), out)
        t[f"I(X2;{out}|X1)"] = mutual_information(joint, "X2", out, "X1")
        if has_u:
            t[f"I(U;{out})"] = mutual_information(joint, "U", out)
            t[f"I(UX1;{out})"] = mutual_information(joint, ("U", "X1"), out)
            t[f"I(UX2;{out})"] = mutual_information(joint, ("U", "X2"), out)
            t[f"I(X1;{out}|U)"] = mutual_information(joint, "X1", out, "U")
            t[f"I(X2;{out}|U)"] = mutual_information(joint, "X2", out, "U")
            t[f"I(X1X2;{out}|U)"] = mutual_information(joint, ("X1", "X2"), out, "U")
            t[f"I(X2;{out}|UX1)"] = mutual_information(joint, "X2", out, ("U", "X1"))
    t["H(X1)"] = joint.entropy("X1")
    if has_u:
        t["H(X1|U)"] = conditional_entropy(joint, "X1", "U")
    return t


def resolvability_thresholds(mac: MacChannel, law, scenario, bound: str = "inner") -> RegionSpec:
    """Lower bounds on (R1, R2) for one input law.

    ``bound`` only matters for the strictly-causal scenario: the inner bound
    additionally requires H(X1|U) > I(U,X1;Z) (margin 1e-9, ties infeasible).
    """
    scenario = Scenario.parse(scenario)
    _require(law, scenario)
    if isinstance(mac, WiretapMac):
        mac = mac.eavesdropper
    t = information_terms(full_joint(mac, law))
    info = {"terms": t, "q_z": induced_output(mac, law).probs.tolist(), "u_size": law.u_size}
    feasible = True
    kind_bound = "exact"
    if scenario is Scenario.NON_COOPERATING:
        cons = (
            Constraint(1, 0, t["I(X1;Z|U)"], ">=", "R1"),
            Constraint(0, 1, t["I(X2;Z|U)"], ">=", "R2"),
            Constraint(1, 1, t["I(X1X2;Z|U)"], ">=", "sum"),
        )
    elif scenario is Scenario.DEGRADED:
        cons = (
            Constraint(1, 0, t["I(X1;Z)"], ">=", "R1"),
            Constraint(1, 1, t["I(X1X2;Z)"], ">=", "sum"),
        )
    elif scenario in (Scenario.NON_CAUSAL, Scenario.CAUSAL):
        cons = (
            Constraint(1, 0, t["I(X1;Z)"], ">=", "R1"),
            Constraint(0, 1, t["I(X1X2;Z)"] - t["H(X1)"], ">=", "R2"),
            Constraint(1, 1, t["I(X1X2;Z)"], ">=", "sum"),
        )
    else:
        if bound not in ("inner", "outer"):
            raise ValueError(f"bound must be 'inner' or 'outer', got {bound!r}")
        kind_bound = bound
        cons = (
            Constraint(1, 0, t["I(UX1;Z)"], ">=", "R1"),
            Constraint(0, 1, t["I(X1X2;Z)"] - t["H(X1|U)"], ">=", "R2"),
            Constraint(1, 1, t["I(X1X2;Z)"], ">=", "sum"),
        )
        margin = t["H(X1|U)"] - t["I(UX1;Z)"]
        info["feasibility_margin"] = margin
        if bound == "inner":
            feasible = margin > FEASIBILITY_MARGIN
    return RegionSpec(cons, "resolvability", scenario, kind_bound, feasible, info)


def secrecy_region(wmac: WiretapMac, law, scenario) -> RegionSpec:
    """Achievable strong-secrecy region (upper bounds on R1, R2) for one law."""
    scenario = Scenario.parse(scenario)
    if scenario is Scenario.NON_COOPERATING:
        raise UnsupportedScenario("no secrecy region is defined for non-cooperating encoders")
    _require(law, scenario)
    t = information_terms(full_joint(wmac, law))
    info = {"terms": t, "u_size": law.u_size}
    sum_bound = t["I(X1X2;Y)"] - t["I(X1X2;Z)"]
    if scenario is Scenario.DEGRADED:
        cons = (
            Constraint(0, 1, t["I(X2;Y|X1)"], "<=", "R2"),
            Constraint(1, 1, sum_bound, "<=", "sum"),
        )
    elif scenario in (Scenario.NON_CAUSAL, Scenario.CAUSAL):
        cons = (
            Constraint(1, 0, t["H(X1)"] - t["I(X1;Z)"], "<=", "R1"),
            Constraint(0, 1, t["I(X2;Y|X1)"], "<=", "R2"),
            Constraint(1, 1, sum_bound, "<=", "sum"),
        )
    else:
        cons = (
            Constraint(1, 0, t["H(X1|U)"] - t["I(UX1;Z)"], "<=", "R1"),
            Constraint(0, 1, t["I(X2;Y|UX1)"], "<=", "R2"),
            Constraint(1, 1, t["H(X1|U)"] + t["I(X2;Y|UX1)"] - t["I(X1X2;Z)"], "<=", "sum-crib"),
            Constraint(1, 1, sum_bound, "<=", "sum"),
        )
    feasible = all(c.b >= -1e-12 for c in cons)
    return RegionSpec(cons, "secrecy", scenario, "inner", feasible, info)


# ---------------------------------------------------------------------------
# Distribution search


@dataclass(frozen=True)
class DistributionSearchConfig:
    mode: str = "target-Q"
    grid_steps: int = 10
    samples: int = 64
    u_cardinality_cap: int | None = None
    target_tol: float = 1e-9
    seed: int = 0
    bound: str = "inner"

    def __post_init__(self) -> None:
        if self.mode not in ("target-Q", "induced-Q"):
            raise ValueError(f"mode must be 'target-Q' or 'induced-Q', got {self.mode!r}")
        if self.grid_steps < 2:
            raise ValueError("grid resolution must be >= 2")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.u_cardinality_cap is not None and self.u_cardinality_cap < 1:
            raise ValueError("u_cardinality_cap must be >= 1")

    def cap_for(self, x1_size: int, x2_size: int) -> int:
        return self.u_cardinality_cap or x1_size * x2_size


@dataclass(frozen=True)
class FrontierPoint:
    r1: float
    r2: float
    law_id: int


@dataclass(frozen=True, eq=False)
class UnionEstimate:
    laws: list
    regions: list[RegionSpec]
    frontier: list[FrontierPoint]
    config: DistributionSearchConfig
    u_cardinality_cap: int
    mode: str

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "u_cardinality_cap": self.u_cardinality_cap,
            "config": {k: getattr(self.config, k) for k in self.config.__dataclass_fields__},
            "laws": [
                {"law_id": i, "law": law.to_json(), "region": reg.to_json()}
                for i, (law, reg) in enumerate(zip(self.laws, self.regions))
            ],
            "frontier": [{"r1": p.r1, "r2": p.r2, "law_id": p.law_id} for p in self.frontier],
        }


def simplex_grid(k: int, steps: int) -> Iterator[np.ndarray]:
    """All pmfs on k symbols with entries in multiples of 1/steps."""
    for bars in itertools.combinations(range(steps + k - 1), k - 1):
        edges = (-1,) + bars + (steps + k - 1,)
        yield np.array([edges[i + 1] - edges[i] - 1 for i in range(k)], dtype=float) / steps


def _candidate_laws(x1: int, x2: int, aux: bool, cfg: DistributionSearchConfig) -> list:
    laws: list = []
    if aux:
        for p1 in simplex_grid(x1, cfg.grid_steps):
            for p2 in simplex_grid(x2, cfg.grid_steps):
                laws.append(AuxLaw.independent(p1, p2))
    else:
        for p in simplex_grid(x1 * x2, cfg.grid_steps):
            laws.append(JointLaw(p.reshape(x1, x2)))
    rng = np.random.default_rng(cfg.seed)
    cap = cfg.cap_for(x1, x2)
    for _ in range(cfg.samples):
        if aux:
            u = int(rng.integers(1, cap + 1))
            laws.append(AuxLaw(rng.dirichlet(np.ones(u)), rng.dirichlet(np.ones(x1), size=u),
                               rng.dirichlet(np.ones(x2), size=u)))
        else:
            laws.append(JointLaw(rng.dirichlet(np.ones(x1 * x2)).reshape(x1, x2)))
    return laws


def _clean(p: np.ndarray) -> np.ndarray | None:
    if p.min() < -1e-10:
        return None
    p = np.clip(p, 0.0, None)
    return p


def _rows_to_simplex(arr: np.ndarray) -> np.ndarray:
    """Renormalize each row (or a single vector); all-zero rows become uniform."""
    rows = np.atleast_2d(arr)
    sums = rows.sum(axis=1, keepdims=True)
    safe = np.where(sums > 0, sums, 1.0)
    out = np.where(sums > 0, rows / safe, 1.0 / rows.shape[1])
    return out.reshape(arr.shape)


def project_joint(mac: MacChannel, law: JointLaw, q: np.ndarray) -> JointLaw | None:
    """Nearest joint law (Euclidean) inducing ``q``, or None if none is found."""
    a = mac.w.reshape(-1, mac.z_size).T  # (z, pairs)
    p0 = law.p.ravel()
    res = minimize(lambda p: float(((p - p0) ** 2).sum()), p0, jac=lambda p: 2 * (p - p0),
                   method="SLSQP", bounds=[(0.0, 1.0)] * p0.size,
                   constraints=[{"type": "eq", "fun": lambda p: a @ p - q, "jac": lambda p: a},
                                {"type": "eq", "fun": lambda p: p.sum() - 1.0,
                                 "jac": lambda p: np.ones_like(p)}],
                   options={"ftol": 1e-14, "maxiter": 300})
    p = np.clip(res.x, 0.0, None)
    sup = p > 1e-10
    p = np.where(sup, p, 0.0)
    rows = np.vstack([a[:, sup], np.ones((1, int(sup.sum())))])
    rhs = np.concatenate([q, [1.0]]) - rows @ p[sup]
    p[sup] += np.linalg.lstsq(rows, rhs, rcond=None)[0]
    p = _clean(p)
    if p is None or abs(p.sum() - 1.0) > 1e-12:
        return None
    return JointLaw(p.reshape(law.shape))


def project_aux(mac: MacChannel, law: AuxLaw, q: np.ndarray) -> AuxLaw | None:
    """Nearby factorized law inducing ``q``; the last step is exact in P(x2|u)."""
    nu, (n1, n2) = law.u_size, law.shape
    sizes = (nu, nu * n1, nu * n2)

    def unpack(th):
        pu = th[: sizes[0]]
        k1 = th[sizes[0]: sizes[0] + sizes[1]].reshape(nu, n1)
        k2 = th[sizes[0] + sizes[1]:].reshape(nu, n2)
        return pu, k1, k2

    def out(th):
        pu, k1, k2 = unpack(th)
        return np.einsum("u,ua,ub,abz->z", pu, k1, k2, mac.w)

    th0 = np.concatenate([law.p_u, law.p_x1_given_u.ravel(), law.p_x2_given_u.ravel()])
    cons = [{"type": "eq", "fun": lambda th: out(th) - q},
            {"type": "eq", "fun": lambda th: unpack(th)[0].sum() - 1.0},
            {"type": "eq", "fun": lambda th: unpack(th)[1].sum(axis=1) - 1.0},
            {"type": "eq", "fun": lambda th: unpack(th)[2].sum(axis=1) - 1.0}]
    res = minimize(lambda th: float(((th - th0) ** 2).sum()), th0, jac=lambda th: 2 * (th - th0),
                   method="SLSQP", bounds=[(0.0, 1.0)] * th0.size, constraints=cons,
                   options={"ftol": 1e-14, "maxiter": 300})
    pu, k1, k2 = (_rows_to_simplex(np.clip(x, 0.0, None)) for x in unpack(res.x))
    # Output is linear in P(x2|u) once P(u) and P(x1|u) are fixed.
    coef = np.einsum("u,ua,abz->zub", pu, k1, mac.w).reshape(mac.z_size, -1)
    sup = (k2 > 1e-10).ravel()
    flat = np.where(sup, k2.ravel(), 0.0)
    live = [u for u in range(nu) if pu[u] > 0]
    rowsum = np.zeros((len(live), nu * n2))
    for i, u in enumerate(live):
        rowsum[i, u * n2:(u + 1) * n2] = 1.0
    mat = np.vstack([coef, rowsum])[:, sup]
    rhs = np.concatenate([q, np.ones(len(live))]) - np.vstack([coef, rowsum]) @ flat
    flat[sup] += np.linalg.lstsq(mat, rhs, rcond=None)[0]
    flat = _clean(flat)
    if flat is None:
        return None
    k2 = flat.reshape(nu, n2)
    for u in range(nu):
        if pu[u] == 0:
            k2[u] = law.p_x2_given_u[u]
    try:
        return AuxLaw(pu, k1, k2)
    except ValueError:
        return None


def _law_key(law) -> tuple:
    arrs = [law.p] if isinstance(law, JointLaw) else [law.p_u, law.p_x1_given_u, law.p_x2_given_u]
    return tuple(np.round(np.concatenate([a.ravel() for a in arrs]), 11).tolist())


def union_region_estimate(channel: MacChannel | WiretapMac, scenario,
                          target: TargetOutput | ProbVector | None,
                          cfg: DistributionSearchConfig, kind: str = "resolvability") -> UnionEstimate:
    """Sweep input laws and return per-law regions and the union's Pareto frontier.

    Candidates are a deterministic simplex grid (independent marginals for the
    auxiliary-variable scenarios) followed by ``cfg.samples`` seeded random
    draws taken sequentially from one generator, so a larger sample count
    extends a smaller one. In target-Q mode every candidate is projected onto
    the laws inducing the target and kept only if it passes
    :func:`matches_target` at ``cfg.target_tol``.
    """
    scenario = Scenario.parse(scenario)
    if kind not in ("resolvability", "secrecy"):
        raise ValueError(f"kind must be 'resolvability' or 'secrecy', got {kind!r}")
    mac = channel.eavesdropper if isinstance(channel, WiretapMac) else channel
    if kind == "secrecy" and not isinstance(channel, WiretapMac):
        raise TypeError("secrecy regions need a WiretapMac")
    aux = scenario in _AUX_SCENARIOS
    if cfg.mode == "target-Q" and target is None:
        raise ValueError("target-Q mode needs a target output")
    q = None
    if cfg.mode == "target-Q":
        q = target.q_z if isinstance(target, TargetOutput) else target
        q = q if isinstance(q, ProbVector) else ProbVector(q)
    laws, regions, seen = [], [], set()
    for cand in _candidate_laws(mac.x1_size, mac.x2_size, aux, cfg):
        law = cand
        if q is not None:
            if not matches_target(mac, law, q, cfg.target_tol):
                law = (project_aux if aux else project_joint)(mac, law, q.probs)
            if law is None or not matches_target(mac, law, q, cfg.target_tol):
                continue
        key = _law_key(law)
        if key in seen:
            continue
        seen.add(key)
        if kind == "resolvability":
            reg = resolvability_thresholds(mac, law, scenario, cfg.bound)
        else:
            reg = secrecy_region(channel, law, scenario)
        laws.append(law)
        regions.append(reg)
    if not laws:
        raise NoFeasibleLaw("no candidate law induces the target output within tolerance")
    tagged = [((v.r1, v.r2), i) for i, reg in enumerate(regions) for v in reg.vertices()]
    sign = 1.0 if kind == "resolvability" else -1.0
    keep = pareto([p for p, _ in tagged], sign)
    frontier, used = [], set()
    for p, i in tagged:
        if p in keep and p not in used:
            used.add(p)
            frontier.append(FrontierPoint(p[0], p[1], i))
    frontier.sort(key=lambda f: (f.r1, f.r2))
    return UnionEstimate(laws, regions, frontier, cfg, cfg.cap_for(mac.x1_size, mac.x2_size),
                         cfg.mode)


def frontier_contained(small: Sequence[FrontierPoint], large: Sequence[FrontierPoint],
                       kind: str = "resolvability", tol: float = 1e-12) -> bool:
    """True when every point of ``small`` is weakly dominated by one of ``large``."""
    sign = 1.0 if kind == "resolvability" else -1.0
    return all(any(sign * (q.r1 - p.r1) <= tol and sign * (q.r2 - p.r2) <= tol for q in large)
               for p in small)


# ---------------------------------------------------------------------------
# Convexity


@dataclass(frozen=True)
class ConvexityReport:
    scenario: Scenario
    lam: float
    mixture: dict[str, float]
    combination: dict[str, float]
    max_excess: float
    holds: bool
    feasibility_preserved: bool | None


def mixture_law(scenario, law_a, law_b, lam: float):
    """The mixture law used to show convexity.

    For joint-law scenarios the joint laws are mixed directly; with a shared
    output marginal this is the same as mixing the posteriors P(x1,x2|z). For
    auxiliary-variable scenarios the new auxiliary is (U, Q) with Q a
    time-sharing flag independent of everything else.
    """
    scenario = Scenario.parse(scenario)
    if scenario in _AUX_SCENARIOS:
        return AuxLaw(
            np.concatenate([lam * law_a.p_u, (1.0 - lam) * law_b.p_u]),
            np.vstack([law_a.p_x1_given_u, law_b.p_x1_given_u]),
            np.vstack([law_a.p_x2_given_u, law_b.p_x2_given_u]),
        )
    return JointLaw(lam * law_a.p + (1.0 - lam) * law_b.p)


def convexity_check(mac: MacChannel, scenario, law_a, law_b, lam: float,
                    tol: float = 1e-9) -> ConvexityReport:
    scenario = Scenario.parse(scenario)
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    _require(law_a, scenario)
    _require(law_b, scenario)
    qa, qb = induced_output(mac, law_a).probs, induced_output(mac, law_b).probs
    if np.abs(qa - qb).max() > 1e-9:
        raise TargetMismatch("the two laws induce different output marginals")
    ra = resolvability_thresholds(mac, law_a, scenario)
    rb = resolvability_thresholds(mac, law_b, scenario)
    rm = resolvability_thresholds(mac, mixture_law(scenario, law_a, law_b, lam), scenario)
    mix = rm.thresholds
    combo = {k: lam * ra.thresholds[k] + (1.0 - lam) * rb.thresholds[k] for k in mix}
    excess = max(mix[k] - combo[k] for k in mix)
    feas = None
    if scenario is Scenario.STRICTLY_CAUSAL:
        feas = rm.feasible if (ra.feasible and rb.feasible) else True
    holds = excess <= tol and feas is not False
    return ConvexityReport(scenario, lam, mix, combo, excess, holds, feas)


# ---------------------------------------------------------------------------
# Pre-elimination systems and the Fourier-Motzkin cross-check


@dataclass(frozen=True, eq=False)
class PreEliminationSystem:
    """Strict inequalities over (R1, R2, aux...) before auxiliary rates are eliminated.

    Row ``i`` reads ``coef[i] . v < rhs[i]`` when ``upper[i]`` and ``> rhs[i]``
    otherwise. Auxiliary rates are additionally nonnegative.
    """

    aux_names: tuple[str, ...]
    coef: np.ndarray
    rhs: np.ndarray
    upper: np.ndarray
    labels: tuple[str, ...]

    def slacks(self, r1, r2, aux) -> np.ndarray:
        """Positive slack means the strict inequality holds; broadcasts over leading axes."""
        aux = np.asarray(aux, dtype=float)
        r1 = np.asarray(r1, dtype=float)
        r2 = np.asarray(r2, dtype=float)
        lhs = (r1[..., None] * self.coef[:, 0] + r2[..., None] * self.coef[:, 1]
               + aux @ self.coef[:, 2:].T)
        return np.where(self.upper, self.rhs - lhs, lhs - self.rhs)

    def satisfied(self, r1: float, r2: float, aux, margin: float = 0.0) -> bool:
        aux = np.asarray(aux, dtype=float)
        return bool(np.all(aux >= 0.0) and np.all(self.slacks(r1, r2, aux) > margin))


def pre_elimination_system(wmac: WiretapMac, law, scenario) -> PreEliminationSystem:
    """Reliability and resolvability constraints on the secret and dither rates."""
    scenario = Scenario.parse(scenario)
    _require(law, scenario)
    t = information_terms(full_joint(wmac, law))
    rows: list[tuple[list[float], float, bool, str]] = []
    if scenario in (Scenario.DEGRADED, Scenario.NON_CAUSAL, Scenario.CAUSAL):
        names = ("R1p", "R2p")
        if scenario is not Scenario.DEGRADED:
            rows.append(([1, 0, 1, 0], t["H(X1)"], True, "crib"))
        rows += [
            ([0, 1, 0, 1], t["I(X2;Y|X1)"], True, "err-2"),
            ([1, 1, 1, 1], t["I(X1X2;Y)"], True, "err-sum"),
            ([0, 0, 1, 0], t["I(X1;Z)"], False, "res-1"),
            ([0, 0, 1, 1], t["I(X1X2;Z)"], False, "res-sum"),
        ]
        if scenario is not Scenario.DEGRADED:
            rows.append(([0, 0, 0, 1], t["I(X1X2;Z)"] - t["H(X1)"], False, "res-2"))
    elif scenario is Scenario.STRICTLY_CAUSAL:
        names = ("rho1p", "rho1pp", "rho2")
        rows = [
            ([1, 0, 1, 1, 0], t["H(X1|U)"], True, "crib"),
            ([0, 1, 0, 0, 1], t["I(X2;Y|UX1)"], True, "err-2"),
            ([1, 1, 1, 1, 1], t["I(X1X2;Y)"], True, "err-sum"),
            ([0, 0, 0, 1, 0], t["I(U;Z)"], False, "res-u"),
            ([0, 0, 1, 1, 0], t["I(UX1;Z)"], False, "res-ux1"),
            ([0, 0, 1, 1, 1], t["I(X1X2;Z)"], False, "res-sum"),
            ([0, 0, 0, 1, 1], t["I(UX2;Z)"], False, "res-ux2"),
        ]
    else:
        raise UnsupportedScenario(f"no pre-elimination system for {scenario.value}")
    return PreEliminationSystem(
        names,
        np.array([r[0] for r in rows], dtype=float),
        np.array([r[1] for r in rows], dtype=float),
        np.array([r[2] for r in rows], dtype=bool),
        tuple(r[3] for r in rows),
    )


@dataclass(frozen=True)
class FmeReport:
    holds: bool
    grid_points: int
    in_region: int
    with_witness: int
    mismatches: tuple[tuple[float, float, str], ...]

    def __bool__(self) -> bool:
        return self.holds


def fme_cross_check(wmac: WiretapMac, law, scenario, grid: float = 0.05,
                    aux_step: float = 0.01) -> FmeReport:
    """Compare the closed-form secrecy region with the un-eliminated system.

    On every (R1, R2) grid point: membership implies an auxiliary-grid witness
    when the strict inequalities are relaxed by one auxiliary step, and a strict
    witness implies membership within one auxiliary step.
    """
    scenario = Scenario.parse(scenario)
    if scenario not in (Scenario.DEGRADED, Scenario.NON_CAUSAL, Scenario.CAUSAL):
        raise UnsupportedScenario(f"no closed-form elimination for {scenario.value}")
    region = secrecy_region(wmac, law, scenario)
    system = pre_elimination_system(wmac, law, scenario)
    t = region.info["terms"]
    top = t["I(X1X2;Y)"] + 2 * grid
    aux_axis = np.arange(0.0, top + aux_step / 2, aux_step)
    a1, a2 = np.meshgrid(aux_axis, aux_axis, indexing="ij")
    aux = np.stack([a1.ravel(), a2.ravel()], axis=1)
    r_axis = np.arange(0.0, top + grid / 2, grid)
    mismatches = []
    n_in = n_wit = 0
    for r1 in r_axis:
        for r2 in r_axis:
            s = system.slacks(np.full(len(aux), r1), np.full(len(aux), r2), aux)
            relaxed = bool(np.any(np.all(s > -aux_step, axis=1)))
            strict = bool(np.any(np.all(s > 1e-12, axis=1)))
            inside = region.contains((r1, r2), 1e-12)
            n_in += inside
            n_wit += strict
            if inside and not relaxed:
                mismatches.append((float(r1), float(r2), "member without witness"))
            if strict and not region.contains((r1, r2), aux_step):
                mismatches.append((float(r1), float(r2), "witness outside region"))
    return FmeReport(not mismatches, len(r_axis) ** 2, n_in, n_wit, tuple(mismatches))
