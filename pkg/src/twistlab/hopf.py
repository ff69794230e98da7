"""Twist axioms, invariance and gauge operations on k[G] (x) k[G]."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fourier
from .abelian import Character
from .algebra import (
    GroupRingElement,
    NotAUnit,
    flatten_keys,
    one_tensor,
)
from .cyclotomic import CyclotomicNumber
from .groups import FiniteGroup, Subgroup, closure_indices

TRIPLE_TENSOR_CAP = 125


@dataclass
class DrinfeldReport:
    invertible: bool
    counital: bool
    cocycle: str  # "pass", "fail" or "unchecked"
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.invertible and self.counital and self.cocycle == "pass"

    def as_dict(self) -> dict:
        return {"invertible": self.invertible, "counital": self.counital, "cocycle": self.cocycle, **self.details}


def support_subgroup(F: GroupRingElement) -> Subgroup:
    """Subgroup generated by every group element occurring in any slot of F."""
    G = F.group
    return Subgroup(G, closure_indices(G, np.unique(F.keys) if F.nnz else []))


def _cocycle_sides(F: GroupRingElement):
    G = F.group
    one = GroupRingElement.one(G, 1, F.conductor)
    left = F.tensor(one), F.comultiply(0)
    right = one.tensor(F), F.comultiply(1)
    return left, right


def _sampled_cocycle(F: GroupRingElement, samples: int, seed: int) -> bool:
    """Compare both cocycle sides at random output keys without forming the products.

    Keys are drawn from (support of first factor) x (support of second factor)
    so that the sampled coefficients are generically nonzero.
    """
    G = F.group
    rng = np.random.default_rng(seed)
    (a1, b1), (a2, b2) = _cocycle_sides(F)

    def coeff(P, Q, key):
        # sum over p in supp P of P[p] Q[p^-1 key]
        pk = P.keys
        need = G.mul(G.inv(pk), key[None, :])
        nf = flatten_keys(G.order, need)
        pos = np.searchsorted(Q.flat, nf)
        pos = np.minimum(pos, max(Q.nnz - 1, 0))
        hit = Q.flat[pos] == nf if Q.nnz else np.zeros(len(nf), bool)
        acc = CyclotomicNumber(P.conductor)
        for i in np.flatnonzero(hit):
            acc = acc + CyclotomicNumber.from_row(P.conductor, P.num[i], P.den) * \
                CyclotomicNumber.from_row(Q.conductor, Q.num[pos[i]], Q.den)
        return acc

    for _ in range(samples):
        i = rng.integers(a1.nnz)
        j = rng.integers(b1.nnz)
        key = G.mul(a1.keys[i], b1.keys[j])
        if coeff(a1, b1, key) != coeff(a2, b2, key):
            return False
    return True


def drinfeld_conditions_check(F: GroupRingElement, *, cap: int = TRIPLE_TENSOR_CAP,
                              samples: int = 200, seed: int = 0) -> DrinfeldReport:
    """Invertibility, counit and 2-cocycle conditions for F, all exact.

    The cocycle identity is materialised on the support subgroup of F when that
    subgroup has at most ``cap`` elements.  Above the cap it is evaluated at
    ``samples`` random output coefficients when ``samples`` > 0, otherwise it is
    reported as unchecked.
    """
    G = F.group
    try:
        F.inverse()
        invertible = True
    except NotAUnit:
        invertible = False
    one = GroupRingElement.one(G, 1, F.conductor)
    counital = F.counit(0) == one and F.counit(1) == one
    S = support_subgroup(F)
    details = {"support_order": S.order}
    if S.order <= cap:
        (a1, b1), (a2, b2) = _cocycle_sides(F)
        cocycle = "pass" if a1 * b1 == a2 * b2 else "fail"
        details["cocycle_mode"] = "exact"
    elif samples > 0:
        cocycle = "pass" if _sampled_cocycle(F, samples, seed) else "fail"
        details["cocycle_mode"] = f"sampled({samples})"
    else:
        cocycle = "unchecked"
        details["cocycle_mode"] = "skipped"
    return DrinfeldReport(invertible, counital, cocycle, details)


def conjugate_by(F: GroupRingElement, g: int) -> GroupRingElement:
    """(g (x) ... (x) g) F (g^-1 (x) ... (x) g^-1)."""
    G = F.group
    return F.remap(lambda k: G.conj(g, k))


def invariance_check(F: GroupRingElement, G: FiniteGroup | None = None, generators=None) -> bool:
    """(g (x) g) F = F (g (x) g) for every generator g."""
    G = G or F.group
    gens = G.generators if generators is None else generators
    return all(conjugate_by(F, int(g)) == F for g in gens)


def gauge_transform(F: GroupRingElement, a: GroupRingElement) -> GroupRingElement:
    """(a (x) a) F Delta(a)^-1."""
    ainv = a.inverse()
    return a.tensor(a) * F * ainv.comultiply(0)


def coboundary_of_unit(a: GroupRingElement) -> GroupRingElement:
    """(a (x) a) Delta(a)^-1."""
    ainv = a.inverse()
    return a.tensor(a) * ainv.comultiply(0)


def idempotent_of_character(chi: Character, conductor: int | None = None) -> GroupRingElement:
    """p_chi = 1/|A| sum_a chi(a)^-1 a."""
    return fourier.idempotent(chi.structure, chi.exponents, conductor)


def character_pair_evaluate(chi: Character, psi: Character, R: GroupRingElement) -> CyclotomicNumber:
    """sum_{a,b} R[a, b] chi(a) psi(b); R must be supported on A x A'."""
    return fourier.evaluate_pair(R, [chi.exponents, psi.exponents], [chi.structure, psi.structure])


def opposite_comultiply(a: GroupRingElement) -> GroupRingElement:
    """Delta' = flip o Delta, which equals Delta on a group algebra."""
    return a.comultiply(0).flip()


__all__ = [
    "DrinfeldReport",
    "TRIPLE_TENSOR_CAP",
    "character_pair_evaluate",
    "coboundary_of_unit",
    "conjugate_by",
    "drinfeld_conditions_check",
    "gauge_transform",
    "idempotent_of_character",
    "invariance_check",
    "one_tensor",
    "opposite_comultiply",
    "support_subgroup",
]
