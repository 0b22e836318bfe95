"""Exact information measures over finite alphabets.

Everything is in bits. Distributions are validated once at construction
(nonnegative, summing to one within ``PROB_TOL``) and are never renormalized
behind the caller's back; the measure functions then assume validity.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AbsoluteContinuityViolation,
    AxisError,
    BoundViolation,
    DimensionMismatch,
    InvalidDistribution,
    LengthMismatch,
)

PROB_TOL = 1e-12
MI_NEG_TOL = 1e-12


def _check_probs(arr: np.ndarray, tol: float, what: str) -> None:
    if arr.size == 0:
        raise InvalidDistribution(f"{what}: empty alphabet")
    if not np.all(np.isfinite(arr)):
        raise InvalidDistribution(f"{what}: non-finite entry")
    if arr.min() < 0.0:
        raise InvalidDistribution(f"{what}: negative entry {arr.min():.3g}")
    total = float(arr.sum())
    if abs(total - 1.0) > tol:
        raise InvalidDistribution(f"{what}: sums to {total!r}, not 1")


def _frozen(values, ndim: int | None = None) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise InvalidDistribution(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbVector:
    """A pmf over ``{0, ..., k-1}``."""

    probs: np.ndarray
    tol: float = field(default=PROB_TOL, repr=False)

    def __post_init__(self) -> None:
        arr = _frozen(self.probs, ndim=1)
        _check_probs(arr, self.tol, "ProbVector")
        object.__setattr__(self, "probs", arr)

    @classmethod
    def uniform(cls, k: int) -> ProbVector:
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def point_mass(cls, k: int, at: int) -> ProbVector:
        p = np.zeros(k)
        p[at] = 1.0
        return cls(p)

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, i):
        return self.probs[i]

    @property
    def min_positive(self) -> float:
        return float(self.probs[self.probs > 0].min())

    def power(self, n: int) -> ProbVector:
        """The i.i.d. law on length-``n`` strings, first symbol most significant."""
        return ProbVector(tensor_power(self.probs, n), tol=max(self.tol, n * 1e-15))

    def allclose(self, other: ProbVector, atol: float = 1e-12) -> bool:
        return self.probs.shape == other.probs.shape and bool(
            np.allclose(self.probs, other.probs, rtol=0.0, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class Kernel:
    """A conditional law: row ``i`` is the output pmf given input symbol ``i``."""

    rows: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen(self.rows, ndim=2)
        for i, row in enumerate(arr):
            _check_probs(row, PROB_TOL, f"Kernel row {i}")
        object.__setattr__(self, "rows", arr)

    @property
    def n_inputs(self) -> int:
        return self.rows.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.rows.shape[1]

    def row(self, i: int) -> ProbVector:
        return ProbVector(self.rows[i])


def tensor_power(p: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(1)
    for _ in range(n):
        out = np.multiply.outer(out, p).ravel()
    return out


def _axis_tuple(axes) -> tuple[str, ...]:
    if axes is None:
        return ()
    if isinstance(axes, str):
        return (axes,)
    return tuple(axes)


@dataclass(frozen=True, eq=False)
class JointTable:
    """A dense joint pmf with one named axis per coordinate."""

    probs: np.ndarray
    axes: tuple[str, ...]
    tol: float = field(default=PROB_TOL, repr=False)

    def __post_init__(self) -> None:
        arr = _frozen(self.probs)
        axes = tuple(self.axes)
        if arr.ndim != len(axes):
            raise AxisError(f"{arr.ndim}-d table but {len(axes)} axis labels")
        if len(set(axes)) != len(axes):
            raise AxisError(f"duplicate axis labels {axes}")
        _check_probs(arr, self.tol, "JointTable")
        object.__setattr__(self, "probs", arr)
        object.__setattr__(self, "axes", axes)

    @property
    def shape(self) -> dict[str, int]:
        return dict(zip(self.axes, self.probs.shape))

    def _positions(self, axes: Sequence[str]) -> list[int]:
        try:
            return [self.axes.index(a) for a in axes]
        except ValueError:
            missing = [a for a in axes if a not in self.axes]
            raise AxisError(f"unknown axes {missing}; table has {self.axes}") from None

    def marginal(self, *axes: str) -> JointTable:
        """Marginal over ``axes``, returned with the axes in the order given."""
        axes = tuple(a for group in axes for a in _axis_tuple(group))
        if len(set(axes)) != len(axes):
            raise AxisError(f"duplicate axes in {axes}")
        pos = self._positions(axes)
        drop = tuple(i for i in range(len(self.axes)) if i not in pos)
        arr = self.probs.sum(axis=drop) if drop else self.probs
        kept = [i for i in range(len(self.axes)) if i in pos]
        arr = np.transpose(arr, [kept.index(i) for i in pos]) if axes else np.array(arr)
        return JointTable(arr, axes, tol=self.tol)

    def vector(self, *axes: str) -> ProbVector:
        """Flattened (row-major) marginal over ``axes`` as a ProbVector."""
        sub = self.marginal(*axes) if axes else self
        return ProbVector(sub.probs.ravel(), tol=self.tol)

    def entropy(self, *axes: str) -> float:
        return entropy(self.vector(*axes))


def _raw(p) -> np.ndarray:
    if isinstance(p, ProbVector):
        return p.probs
    if isinstance(p, JointTable):
        return p.probs.ravel()
    return ProbVector(p).probs


def entropy(p) -> float:
    """Shannon entropy in bits with 0 log 0 = 0."""
    a = _raw(p)
    nz = a[a > 0]
    return float(-(nz * np.log2(nz)).sum()) + 0.0


def _kl_bits(p: np.ndarray, q: np.ndarray) -> float:
    sup = p > 0
    if np.any(q[sup] <= 0):
        bad = int(np.flatnonzero(sup & (q <= 0))[0])
        raise AbsoluteContinuityViolation(f"p({bad}) > 0 but q({bad}) = 0")
    ps = p[sup]
    return max(float((ps * np.log2(ps / q[sup])).sum()), 0.0)


def kl_divergence(p, q) -> float:
    """D(p||q) in bits; raises when p is not absolutely continuous w.r.t. q."""
    a, b = _raw(p), _raw(q)
    if a.shape != b.shape:
        raise DimensionMismatch(f"alphabet sizes differ: {a.shape} vs {b.shape}")
    return _kl_bits(a, b)


def variational_distance(p, q) -> float:
    """Sum of absolute differences, in [0, 2] (no factor 1/2)."""
    a, b = _raw(p), _raw(q)
    if a.shape != b.shape:
        raise DimensionMismatch(f"alphabet sizes differ: {a.shape} vs {b.shape}")
    return float(np.abs(a - b).sum())


def mutual_information(joint: JointTable, axes_a, axes_b, axes_cond=()) -> float:
    """I(A;B|C) in bits from exact marginals of ``joint``.

    Each argument is an axis label or a collection of labels. Values in
    [-1e-12, 0) are clamped to zero; anything more negative is a bug.
    """
    a, b, c = _axis_tuple(axes_a), _axis_tuple(axes_b), _axis_tuple(axes_cond)
    if not a or not b:
        raise AxisError("both mutual-information arguments need at least one axis")
    every = a + b + c
    if len(set(every)) != len(every):
        raise AxisError(f"axis sets overlap: {a} / {b} / {c}")
    sub = joint.marginal(*every)
    shp = sub.probs.shape
    na = int(np.prod(shp[: len(a)]))
    nb = int(np.prod(shp[len(a) : len(a) + len(b)]))
    p = sub.probs.reshape(na, nb, -1)
    p_ac = p.sum(axis=1, keepdims=True)
    p_bc = p.sum(axis=0, keepdims=True)
    p_c = p.sum(axis=(0, 1), keepdims=True)
    sup = p > 0
    num = (p * p_c)[sup]
    den = np.broadcast_to(p_ac * p_bc, p.shape)[sup]
    value = float((p[sup] * np.log2(num / den)).sum())
    if value < 0.0:
        if value < -MI_NEG_TOL:
            raise BoundViolation(f"mutual information {value!r} < 0")
        return 0.0
    return value


def conditional_entropy(joint: JointTable, axes_a, axes_cond=()) -> float:
    a, c = _axis_tuple(axes_a), _axis_tuple(axes_cond)
    if set(a) & set(c):
        raise AxisError(f"axis sets overlap: {a} / {c}")
    h = joint.entropy(*(a + c)) - (joint.entropy(*c) if c else 0.0)
    return max(h, 0.0)


def pinsker_and_lemma1_bounds(p, q) -> tuple[float, float]:
    """Return ``(V(p,q), log2(1/mu) * V(p,q))`` with mu the least positive q mass.

    The second value upper-bounds D(p||q); the inequality is checked and a
    :class:`BoundViolation` is raised if it ever fails.
    """
    a, b = _raw(p), _raw(q)
    d = kl_divergence(a, b)
    v = variational_distance(a, b)
    mu = float(b[b > 0].min())
    bound = math.log2(1.0 / mu) * v
    if d > bound + 1e-12:
        raise BoundViolation(f"D={d!r} exceeds log(1/mu)*V={bound!r}")
    return v, bound


@dataclass(frozen=True)
class TypicalityParams:
    epsilon: float
    n: int

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


def _typical_counts(counts: np.ndarray, p: np.ndarray, n: int, eps: float) -> bool:
    return bool(np.all(np.abs(counts / n - p) <= eps * p + 1e-12))


def is_strongly_typical(seq: Sequence[int], p, params: TypicalityParams) -> bool:
    """Test |N(a|x^n)/n - p(a)| <= eps * p(a) for every symbol a."""
    probs = _raw(p)
    s = np.asarray(seq, dtype=int)
    if s.size != params.n:
        raise LengthMismatch(f"sequence length {s.size} != n={params.n}")
    if s.size and (s.min() < 0 or s.max() >= probs.size):
        raise DimensionMismatch("sequence symbol outside the alphabet")
    counts = np.bincount(s, minlength=probs.size)
    return _typical_counts(counts, probs, params.n, params.epsilon)


def is_jointly_typical(seqs: Sequence[Sequence[int]], joint: JointTable,
                       params: TypicalityParams) -> bool:
    """Strong typicality of aligned sequences, one per axis of ``joint``."""
    if len(seqs) != len(joint.axes):
        raise AxisError(f"{len(seqs)} sequences for {len(joint.axes)} axes")
    arrs = [np.asarray(s, dtype=int) for s in seqs]
    if any(s.size != params.n for s in arrs):
        raise LengthMismatch(f"every sequence must have length n={params.n}")
    flat = np.ravel_multi_index(arrs, joint.probs.shape)
    counts = np.bincount(flat, minlength=joint.probs.size)
    return _typical_counts(counts, joint.probs.ravel(), params.n, params.epsilon)


def chain_decomposition(joint: JointTable, block_axes: Iterable[str], q_block) -> dict:
    """Split D(P || Q x ... x Q) over ordered blocks.

    Returns the directly computed total divergence together with the per-block
    divergences D(P_b || Q) and the look-ahead terms I(Z_b; Z_{b+1..B}); the
    total equals the sum of both lists.
    """
    blocks = tuple(block_axes)
    q = _raw(q_block)
    sub = joint.marginal(*blocks)
    ref = np.ones(1)
    for _ in blocks:
        ref = np.multiply.outer(ref, q).ravel()
    total = kl_divergence(sub.probs.ravel(), ref)
    per_block = [kl_divergence(sub.vector(b), q) for b in blocks]
    cross = [
        mutual_information(sub, b, blocks[i + 1 :]) if i + 1 < len(blocks) else 0.0
        for i, b in enumerate(blocks)
    ]
    return {"total": total, "per_block": per_block, "cross": cross}
