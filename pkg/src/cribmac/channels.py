"""Problem instances: the two-user MAC, its wiretap extension and input laws.

Input pairs are flattened row-major with ``x1`` outer, so row ``x1 * |X2| + x2``
of a serialized kernel is W(.|x1, x2). For the wiretap channel each row is a
pmf over ``(y, z)`` flattened with ``y`` outer.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InvalidDistribution, LawVariantError
from .probability import PROB_TOL, JointTable, Kernel, ProbVector, _check_probs


class Scenario(str, enum.Enum):
    NON_COOPERATING = "non-cooperating"
    DEGRADED = "degraded"
    NON_CAUSAL = "non-causal"
    STRICTLY_CAUSAL = "strictly-causal"
    CAUSAL = "causal"

    @classmethod
    def parse(cls, value: str | Scenario) -> Scenario:
        if isinstance(value, Scenario):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"degraded-message-sets": "degraded", "noncausal": "non-causal",
                   "strictly causal": "strictly-causal", "non-cooperative": "non-cooperating"}
        return cls(aliases.get(key, key))


def _conditional(arr: np.ndarray, what: str) -> np.ndarray:
    rows = arr.reshape(-1, arr.shape[-1])
    for i, row in enumerate(rows):
        _check_probs(row, PROB_TOL, f"{what} row {i}")
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MacChannel:
    """W(z | x1, x2) stored as an array of shape ``(|X1|, |X2|, |Z|)``."""

    w: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.w, dtype=float)
        if arr.ndim != 3:
            raise DimensionMismatch(f"MAC kernel must be 3-d (x1, x2, z), got {arr.shape}")
        object.__setattr__(self, "w", _conditional(arr, "MacChannel"))

    @classmethod
    def from_rows(cls, x1_size: int, x2_size: int, z_size: int, rows) -> MacChannel:
        arr = np.asarray(rows, dtype=float)
        if arr.shape != (x1_size * x2_size, z_size):
            raise DimensionMismatch(
                f"expected {x1_size * x2_size} rows of length {z_size}, got {arr.shape}")
        return cls(arr.reshape(x1_size, x2_size, z_size))

    @classmethod
    def deterministic(cls, fn, x1_size: int, x2_size: int, z_size: int) -> MacChannel:
        w = np.zeros((x1_size, x2_size, z_size))
        for a in range(x1_size):
            for b in range(x2_size):
                w[a, b, fn(a, b)] = 1.0
        return cls(w)

    @property
    def x1_size(self) -> int:
        return self.w.shape[0]

    @property
    def x2_size(self) -> int:
        return self.w.shape[1]

    @property
    def z_size(self) -> int:
        return self.w.shape[2]

    @property
    def kernel(self) -> Kernel:
        return Kernel(self.w.reshape(-1, self.z_size))

    def to_json(self) -> dict:
        return {"x1_size": self.x1_size, "x2_size": self.x2_size, "z_size": self.z_size,
                "w": self.w.reshape(-1, self.z_size).tolist()}


@dataclass(frozen=True, eq=False)
class WiretapMac:
    """W(y, z | x1, x2) stored with shape ``(|X1|, |X2|, |Y|, |Z|)``."""

    wyz: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.wyz, dtype=float)
        if arr.ndim != 4:
            raise DimensionMismatch(f"wiretap kernel must be 4-d, got {arr.shape}")
        flat = _conditional(arr.reshape(arr.shape[0], arr.shape[1], -1), "WiretapMac")
        full = flat.reshape(arr.shape)
        full.setflags(write=False)
        object.__setattr__(self, "wyz", full)

    @classmethod
    def from_rows(cls, x1_size, x2_size, y_size, z_size, rows) -> WiretapMac:
        arr = np.asarray(rows, dtype=float)
        if arr.shape != (x1_size * x2_size, y_size * z_size):
            raise DimensionMismatch(
                f"expected {x1_size * x2_size} rows of length {y_size * z_size}, got {arr.shape}")
        return cls(arr.reshape(x1_size, x2_size, y_size, z_size))

    @classmethod
    def from_components(cls, legit: MacChannel, eve: MacChannel) -> WiretapMac:
        """Outputs conditionally independent given the inputs."""
        if legit.w.shape[:2] != eve.w.shape[:2]:
            raise DimensionMismatch("legitimate and eavesdropper input alphabets differ")
        return cls(legit.w[:, :, :, None] * eve.w[:, :, None, :])

    @property
    def x1_size(self) -> int:
        return self.wyz.shape[0]

    @property
    def x2_size(self) -> int:
        return self.wyz.shape[1]

    @property
    def y_size(self) -> int:
        return self.wyz.shape[2]

    @property
    def z_size(self) -> int:
        return self.wyz.shape[3]

    @property
    def legitimate(self) -> MacChannel:
        return MacChannel(self.wyz.sum(axis=3))

    @property
    def eavesdropper(self) -> MacChannel:
        return MacChannel(self.wyz.sum(axis=2))

    def to_json(self) -> dict:
        return {"x1_size": self.x1_size, "x2_size": self.x2_size, "y_size": self.y_size,
                "z_size": self.z_size,
                "wyz": self.wyz.reshape(self.x1_size * self.x2_size, -1).tolist()}


@dataclass(frozen=True, eq=False)
class JointLaw:
    """An unrestricted input law P(x1, x2)."""

    p: np.ndarray

    def __post_init__(self) -> None:
        table = JointTable(self.p, ("X1", "X2"))
        object.__setattr__(self, "p", table.probs)

    @classmethod
    def product(cls, p_x1, p_x2) -> JointLaw:
        return cls(np.outer(np.asarray(p_x1, float), np.asarray(p_x2, float)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.p.shape

    @property
    def u_size(self) -> int:
        return 1

    def p_x1x2(self) -> np.ndarray:
        return self.p

    def p_ux1x2(self) -> np.ndarray:
        return self.p[None]

    def to_json(self) -> dict:
        return {"joint": self.p.tolist()}


@dataclass(frozen=True, eq=False)
class AuxLaw:
    """P(u) P(x1|u) P(x2|u) with U the shared cooperative auxiliary."""

    p_u: np.ndarray
    p_x1_given_u: np.ndarray
    p_x2_given_u: np.ndarray

    def __post_init__(self) -> None:
        pu = ProbVector(self.p_u).probs
        k1 = Kernel(self.p_x1_given_u).rows
        k2 = Kernel(self.p_x2_given_u).rows
        if k1.shape[0] != pu.size or k2.shape[0] != pu.size:
            raise DimensionMismatch("conditional kernels need one row per u symbol")
        object.__setattr__(self, "p_u", pu)
        object.__setattr__(self, "p_x1_given_u", k1)
        object.__setattr__(self, "p_x2_given_u", k2)

    @classmethod
    def independent(cls, p_x1, p_x2) -> AuxLaw:
        """The degenerate |U| = 1 law P(x1) P(x2)."""
        return cls(np.ones(1), np.asarray(p_x1, float)[None], np.asarray(p_x2, float)[None])

    @property
    def u_size(self) -> int:
        return self.p_u.size

    @property
    def shape(self) -> tuple[int, int]:
        return self.p_x1_given_u.shape[1], self.p_x2_given_u.shape[1]

    def p_ux1x2(self) -> np.ndarray:
        return (self.p_u[:, None, None] * self.p_x1_given_u[:, :, None]
                * self.p_x2_given_u[:, None, :])

    def p_x1x2(self) -> np.ndarray:
        return self.p_ux1x2().sum(axis=0)

    def to_joint(self) -> JointLaw:
        return JointLaw(self.p_x1x2())

    def to_json(self) -> dict:
        return {"p_u": self.p_u.tolist(), "p_x1_given_u": self.p_x1_given_u.tolist(),
                "p_x2_given_u": self.p_x2_given_u.tolist()}


InputLaw = JointLaw | AuxLaw


@dataclass(frozen=True, eq=False)
class TargetOutput:
    q_z: ProbVector

    def __post_init__(self) -> None:
        if not isinstance(self.q_z, ProbVector):
            object.__setattr__(self, "q_z", ProbVector(self.q_z))


def _check_sizes(x1: int, x2: int, law) -> None:
    if law.shape != (x1, x2):
        raise DimensionMismatch(f"law is over {law.shape} but channel inputs are {(x1, x2)}")


def induced_output(mac: MacChannel, law) -> ProbVector:
    """Q(z) = sum over (x1, x2) of P(x1, x2) W(z | x1, x2)."""
    _check_sizes(mac.x1_size, mac.x2_size, law)
    return ProbVector(np.einsum("ab,abz->z", law.p_x1x2(), mac.w))


def full_joint(channel: MacChannel | WiretapMac, law) -> JointTable:
    """Exact joint over (U,) X1, X2 and the outputs.

    A :class:`JointLaw` yields axes ``X1, X2, Z`` (plus ``Y`` before ``Z`` for a
    wiretap channel); an :class:`AuxLaw` prepends ``U``.
    """
    _check_sizes(channel.x1_size, channel.x2_size, law)
    if isinstance(channel, WiretapMac):
        kern, out_axes, spec = channel.wyz, ("Y", "Z"), "uab,abyz->uabyz"
    else:
        kern, out_axes, spec = channel.w, ("Z",), "uab,abz->uabz"
    arr = np.einsum(spec, law.p_ux1x2(), kern)
    if isinstance(law, AuxLaw):
        return JointTable(arr, ("U", "X1", "X2") + out_axes)
    if isinstance(law, JointLaw):
        return JointTable(arr[0], ("X1", "X2") + out_axes)
    raise LawVariantError(f"unknown law type {type(law).__name__}")


def matches_target(mac: MacChannel, law, target: TargetOutput | ProbVector, tol: float) -> bool:
    """True iff max |Q_law(z) - Q_target(z)| <= tol (boundary accepted)."""
    q = target.q_z if isinstance(target, TargetOutput) else target
    got = induced_output(mac, law)
    if len(q) != len(got):
        raise DimensionMismatch(f"target over {len(q)} symbols, channel output over {len(got)}")
    return float(np.abs(got.probs - q.probs).max()) <= tol


def load_channel(source: str | Path | dict) -> MacChannel | WiretapMac:
    """Load a channel from a JSON file path or an already-parsed mapping.

    Objects carrying ``wyz`` and ``y_size`` load as a :class:`WiretapMac`;
    objects carrying ``w`` load as a :class:`MacChannel`.
    """
    data = source if isinstance(source, dict) else json.loads(Path(source).read_text())
    try:
        if "wyz" in data:
            return WiretapMac.from_rows(int(data["x1_size"]), int(data["x2_size"]),
                                        int(data["y_size"]), int(data["z_size"]), data["wyz"])
        return MacChannel.from_rows(int(data["x1_size"]), int(data["x2_size"]),
                                    int(data["z_size"]), data["w"])
    except KeyError as exc:
        raise InvalidDistribution(f"channel JSON missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (InvalidDistribution, DimensionMismatch)):
            raise
        raise InvalidDistribution(f"malformed channel JSON: {exc}") from None


def law_from_json(data: dict):
    if "joint" in data:
        return JointLaw(np.asarray(data["joint"], dtype=float))
    if "p_u" in data:
        return AuxLaw(np.asarray(data["p_u"], float), np.asarray(data["p_x1_given_u"], float),
                      np.asarray(data["p_x2_given_u"], float))
    if "p_x1" in data and "p_x2" in data:
        if data.get("aux", False):
            return AuxLaw.independent(data["p_x1"], data["p_x2"])
        return JointLaw.product(data["p_x1"], data["p_x2"])
    raise InvalidDistribution("law JSON needs 'joint', 'p_u'/... or 'p_x1'/'p_x2'")


def xor_mac(noise: float = 0.0) -> MacChannel:
    """Binary XOR MAC followed by a BSC(noise)."""
    w = np.zeros((2, 2, 2))
    for a in range(2):
        for b in range(2):
            w[a, b, a ^ b] = 1.0 - noise
            w[a, b, 1 - (a ^ b)] += noise
    return MacChannel(w)


def and_mac() -> MacChannel:
    return MacChannel.deterministic(lambda a, b: a & b, 2, 2, 2)
