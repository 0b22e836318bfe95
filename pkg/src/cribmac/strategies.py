"""Shannon strategies: maps t from X1 to X2 used as Encoder-2 inputs under causal cribbing."""

from __future__ import annotations

import itertools

import numpy as np

from .channels import JointLaw, MacChannel, WiretapMac
from .errors import ZeroMarginal
from .probability import ProbVector


def strategy_table(x1_size: int, x2_size: int) -> np.ndarray:
    """Row ``t`` lists (t(0), ..., t(|X1|-1)); rows follow ``itertools.product`` order."""
    return np.array(list(itertools.product(range(x2_size), repeat=x1_size)), dtype=int).reshape(
        -1, x1_size)


def shannon_strategy_decompose(pstar, restrict_to_support: bool = False):
    """Split P*(x1, x2) into a product law P(x1) P(t).

    P(t) = prod over x1 of P*(x1, t(x1)) / P(x1), so that
    P*(x1, x2) = P(x1) * sum over {t : t(x1) = x2} of P(t).

    When some P(x1) = 0 the product formula is undefined and
    :class:`ZeroMarginal` is raised, unless ``restrict_to_support`` is set; the
    strategy is then taken to map every unused x1 to symbol 0.
    """
    p = pstar.p if isinstance(pstar, JointLaw) else np.asarray(
        getattr(pstar, "probs", pstar), dtype=float)
    n1, n2 = p.shape
    px1 = p.sum(axis=1)
    if np.any(px1 <= 0):
        if not restrict_to_support:
            raise ZeroMarginal("some x1 has zero probability; strategy law undefined")
    cond = np.zeros_like(p)
    for a in range(n1):
        if px1[a] > 0:
            cond[a] = p[a] / px1[a]
        else:
            cond[a, 0] = 1.0
    table = strategy_table(n1, n2)
    pt = np.prod(cond[np.arange(n1), table], axis=1)
    return ProbVector(px1), ProbVector(pt / pt.sum())


def reconstruct(p_x1: ProbVector, p_t: ProbVector, x2_size: int) -> np.ndarray:
    """P(x1, x2) = P(x1) * P(t(x1) = x2) from a product strategy law."""
    n1 = len(p_x1)
    table = strategy_table(n1, x2_size)
    out = np.zeros((n1, x2_size))
    for a in range(n1):
        out[a] = p_x1.probs[a] * np.bincount(table[:, a], weights=p_t.probs, minlength=x2_size)
    return out


def strategy_channel(channel: MacChannel | WiretapMac):
    """W+(. | x1, t) = W(. | x1, t(x1)) with strategies as Encoder-2 inputs."""
    if isinstance(channel, WiretapMac):
        table = strategy_table(channel.x1_size, channel.x2_size)
        w = np.stack([channel.wyz[a, table[:, a]] for a in range(channel.x1_size)])
        return WiretapMac(w)
    table = strategy_table(channel.x1_size, channel.x2_size)
    w = np.stack([channel.w[a, table[:, a]] for a in range(channel.x1_size)])
    return MacChannel(w)
