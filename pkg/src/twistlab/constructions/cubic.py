"""The cubic form on F_243 and its automorphism group of order 7920."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..groups import FiniteGroup, matrix_group
from ..linalg import inverse_mod_p, rank_mod_p
from .finite_field import GF


@dataclass
class CubicExample:
    field: GF
    eps: int
    basis: list[int]  # eps, eps^3, eps^4, eps^5, eps^9
    r: np.ndarray
    s: np.ndarray
    t: np.ndarray
    c_values: np.ndarray  # c(v) = Tr(v^11) for every code v
    group: FiniteGroup  # <r, s, t>
    subgroup: FiniteGroup  # <r^2, s, t>
    checks: dict = field(default_factory=dict)

    def tau(self, x, y, z) -> np.ndarray:
        return tau(self.field, x, y, z)

    def apply(self, M: np.ndarray, v) -> np.ndarray:
        F = self.field
        return F.from_vec((F.to_vec(v) @ M.T) % F.p)


def tau(F: GF, x, y, z) -> np.ndarray:
    """Tr(x y z^9 + x y^9 z + x^9 y z)."""
    x, y, z = (np.asarray(a, dtype=np.int64) for a in (x, y, z))
    m, f = F.mul, F.frobenius
    s = F.add(F.add(m(m(x, y), f(z, 2)), m(m(x, f(y, 2)), z)), m(m(f(x, 2), y), z))
    return F.trace(s)


def cubic_c(F: GF, x) -> np.ndarray:
    return F.trace(F.power(x, 11))


def find_eps(F: GF) -> int:
    """Least code of an element of order 11 with trace -1."""
    for a in range(1, F.order):
        if F.element_order(a) == 11 and int(F.trace(a)) == F.p - 1:
            return a
    raise ArithmeticError("no element of order 11 with trace -1")


def preserves_tau(F: GF, M: np.ndarray) -> bool:
    """tau(Mx, My, Mz) = tau(x, y, z) on all basis triples (tau is trilinear)."""
    e = F.p ** np.arange(F.d)
    i, j, k = (a.ravel() for a in np.meshgrid(e, e, e, indexing="ij"))

    def ap(v):
        return F.from_vec((F.to_vec(v) @ M.T) % F.p)

    return bool(np.array_equal(tau(F, ap(i), ap(j), ap(k)), tau(F, i, j, k)))


def f243_cubic_example(*, closure_cap: int = 20_000) -> CubicExample:
    F = GF.build(3, 5)
    eps = find_eps(F)
    basis = [int(F.power(eps, k)) for k in (1, 3, 4, 5, 9)]
    B = F.to_vec(np.array(basis)).T % 3  # columns: coordinates of the basis vectors
    checks: dict = {"polynomial": F.polynomial_string(), "eps": eps, "basis_rank": rank_mod_p(B, 3)}
    if checks["basis_rank"] != 5:
        raise ArithmeticError("eps, eps^3, eps^4, eps^5, eps^9 do not span")
    # r in the eps-basis: eps -> -eps, eps^3 -> -eps^9, eps^4 -> -eps^5, eps^5 -> -eps^3, eps^9 -> -eps^4
    Rb = np.zeros((5, 5), dtype=np.int64)
    for src, dst in {0: 0, 1: 4, 2: 3, 3: 1, 4: 2}.items():
        Rb[dst, src] = -1
    R = (B @ Rb % 3) @ inverse_mod_p(B, 3) % 3
    S = F.matrix_of(lambda v: F.mul(eps, v))
    T = F.matrix_of(lambda v: F.frobenius(v))
    checks["preserve_tau"] = {name: preserves_tau(F, M) for name, M in (("r", R), ("s", S), ("t", T))}
    allv = np.arange(F.order)
    checks["tau_vvv_zero"] = bool(np.all(tau(F, allv, allv, allv) == 0))
    c = cubic_c(F, allv)
    R2 = R @ R % 3
    checks["stabilize_c"] = {}
    for name, M in (("r^2", R2), ("s", S), ("t", T), ("r", R)):
        img = F.from_vec((F.to_vec(allv) @ M.T) % 3)
        checks["stabilize_c"][name] = bool(np.array_equal(c[img], c))
    G = matrix_group([R, S, T], 3, cap=closure_cap, name="Aut(V,tau)", spec="builtin m11cubic")
    H = matrix_group([R2, S, T], 3, cap=closure_cap, name="<r^2,s,t>")
    return CubicExample(F, eps, basis, R, S, T, c, G, H, checks)


def polarization_identity_holds(ex: CubicExample) -> bool:
    """c(u+v) - c(u) - c(v) = tau(u,u,v) + tau(u,v,v) for all u, v."""
    F = ex.field
    u, v = (a.ravel() for a in np.meshgrid(np.arange(F.order), np.arange(F.order), indexing="ij"))
    c = ex.c_values
    lhs = (c[F.add(u, v)] - c[u] - c[v]) % 3
    rhs = (tau(F, u, u, v) + tau(F, u, v, v)) % 3
    return bool(np.array_equal(lhs, rhs))


def coboundary_certificate(ex: CubicExample) -> dict:
    """Why psi(g)(v) = c(v) - c(g v) is not a coboundary l(v) - l(g v).

    Writing l(v) = Tr(lambda v), the generator s fixes c, so l must be
    s-invariant; only lambda = 0 qualifies.  Then c itself would be fixed by
    every generator, and r moves it at the returned witness.
    """
    F = ex.field
    allv = np.arange(F.order)
    sv = ex.apply(ex.s, allv)
    lam = allv[:, None]
    l_v = F.trace(F.mul(lam, allv[None, :]))
    l_sv = F.trace(F.mul(lam, sv[None, :]))
    invariant = [int(x) for x in allv[np.all(l_v == l_sv, axis=1)]]
    c = ex.c_values
    rv = ex.apply(ex.r, allv)
    moved = np.flatnonzero(c != c[rv])
    witness = int(moved[0]) if moved.size else None
    return {
        "s_fixes_c": bool(np.array_equal(c[sv], c)),
        "s_invariant_lambdas": invariant,
        "witness_v": witness,
        "c_v": None if witness is None else int(c[witness]),
        "c_rv": None if witness is None else int(c[rv[witness]]),
        "non_coboundary_certified": bool(np.array_equal(c[sv], c)) and invariant == [0] and witness is not None,
    }


__all__ = [
    "CubicExample",
    "coboundary_certificate",
    "cubic_c",
    "f243_cubic_example",
    "find_eps",
    "polarization_identity_holds",
    "preserves_tau",
    "tau",
]
