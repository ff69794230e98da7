"""Extraspecial groups of order p^3 as unipotent 3x3 matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..abelian import AbelianStructure, PairingForm
from ..groups import FiniteGroup, Subgroup, closure_indices, matrix_group
from ..twists import FormTwist, twist_from_form


@dataclass
class Heisenberg:
    group: FiniteGroup
    p: int
    x: int
    y: int
    c: int  # x y x^-1 y^-1, central

    def structure(self, g: int) -> AbelianStructure:
        """<g, c> with basis (g, c)."""
        H = self.group
        sub = Subgroup(H, closure_indices(H, [g, self.c]))
        return AbelianStructure.from_basis(sub, [g, self.c], [self.p, self.p])

    def form(self, g: int, k: int = 1) -> PairingForm:
        """beta(g^i c^s, g^j c^t) = eps^(k(it - js))."""
        M = np.array([[0, k], [-k, 0]], dtype=np.int64) % self.p
        return PairingForm(self.structure(g), M)

    def twist(self, g: int, k: int = 1) -> FormTwist:
        F = self.form(g, k)
        return twist_from_form(F.structure.subgroup, F)

    @property
    def twist_x(self) -> FormTwist:
        return self.twist(self.x)

    @property
    def twist_y(self) -> FormTwist:
        return self.twist(self.y)


def heisenberg(p: int, *, materialize_below: int = 4096) -> Heisenberg:
    if p == 2 or p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"heisenberg needs an odd prime, got {p}")
    X = [[1, 1, 0], [0, 1, 0], [0, 0, 1]]
    Y = [[1, 0, 0], [0, 1, 1], [0, 0, 1]]
    H = matrix_group([X, Y], p, name=f"H({p})", spec=f"builtin heisenberg p={p}",
                     materialize_below=materialize_below)
    x, y = (H.element(np.asarray(m).ravel()) for m in (X, Y))
    c = int(H.commutator(x, y))
    return Heisenberg(H, p, x, y, c)


__all__ = ["Heisenberg", "heisenberg"]
