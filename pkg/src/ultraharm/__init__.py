"""Harmonic analysis on compact p-adic Lie groups truncated at finite level."""

from .padic import DualScalar, PadicError, PadicInt, PrecisionError
from .group import GroupDescriptor, GroupElement, GroupError, abelian, engel, g52, heisenberg
from .dual import DualError, Irrep, dual, irrep_from_id

__version__ = "0.1.0"

__all__ = [
    "DualScalar",
    "PadicError",
    "PadicInt",
    "PrecisionError",
    "GroupDescriptor",
    "GroupElement",
    "GroupError",
    "abelian",
    "engel",
    "g52",
    "heisenberg",
    "DualError",
    "Irrep",
    "dual",
    "irrep_from_id",
]
