"""Resolvability and strong-secrecy rate regions of the cribbing multiple-access channel."""

from __future__ import annotations

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
from .probability import (
    JointTable,
    Kernel,
    ProbVector,
    TypicalityParams,
    entropy,
    kl_divergence,
    mutual_information,
    variational_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AuxLaw",
    "JointLaw",
    "JointTable",
    "Kernel",
    "MacChannel",
    "ProbVector",
    "Scenario",
    "TargetOutput",
    "TypicalityParams",
    "WiretapMac",
    "entropy",
    "full_joint",
    "induced_output",
    "kl_divergence",
    "matches_target",
    "mutual_information",
    "variational_distance",
]
