"""Quantum higher-order Fourier analysis on qudit systems.

Weyl operators, quantum derivatives, the uniformity measures Q^k, classical
Gowers norms, a stabilizer/Clifford hierarchy classifier, and convolutions.
"""

from .errors import (
    CapabilityError,
    DegenerateInput,
    DimensionError,
    DomainError,
    EnumerationTooLarge,
    PreconditionError,
    QhofaError,
    SpecError,
)
from .operators import DenseOperator, StateOperator
from .phase_space import PhasePoint, QuditParams

__all__ = [
    "CapabilityError",
    "DegenerateInput",
    "DenseOperator",
    "DimensionError",
    "DomainError",
    "EnumerationTooLarge",
    "PhasePoint",
    "PreconditionError",
    "QhofaError",
    "QuditParams",
    "SpecError",
    "StateOperator",
]
