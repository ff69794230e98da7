"""Builders for the example families."""

from .cubic import CubicExample, coboundary_certificate, f243_cubic_example, polarization_identity_holds
from .finite_field import GF, FiniteFieldElement, smallest_irreducible
from .heisenberg import Heisenberg, heisenberg
from .mcc import MCC, cyclic_triform, mcc_group, validate_triform
from .symplectic import (
    ASp,
    MetaplecticLift,
    QuadraticExample,
    asp,
    metaplectic_lift,
    quadratic_example,
    transvection_identity_holds,
)

__all__ = [
    "ASp",
    "CubicExample",
    "FiniteFieldElement",
    "GF",
    "Heisenberg",
    "MCC",
    "MetaplecticLift",
    "QuadraticExample",
    "asp",
    "coboundary_certificate",
    "cyclic_triform",
    "f243_cubic_example",
    "heisenberg",
    "mcc_group",
    "metaplectic_lift",
    "polarization_identity_holds",
    "quadratic_example",
    "smallest_irreducible",
    "transvection_identity_holds",
    "validate_triform",
]
