"""Character transforms over products of abelian subgroups.

For x in k[S_1] (x) ... (x) k[S_m] with each S_i abelian, the transform is the
table of (chi_1 (x) ... (x) chi_m)(x) over all character tuples.  It turns
products into entrywise products, so inversion, idempotent expansions and
form read-off all go through here.  The transform is applied one axis at a
time, which keeps the cost at |S|^(m+1) instead of |S|^(2m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels as K
from .abelian import AbelianStructure, abelian_invariants
from .algebra import GroupRingElement, NotAUnit, _zeros, flatten_keys
from .cyclotomic import (
    CyclotomicNumber,
    lift_rows,
    reduce_rows,
    reduction_matrix,
    shrink,
    totient,
)
from .groups import Subgroup


@dataclass
class DualArray:
    """Dense table over character tuples; values num / den in Q(zeta_L)."""

    structures: tuple
    num: np.ndarray  # shape (|S_1|, ..., |S_m|, L)
    den: int
    conductor: int

    @property
    def shape(self):
        return self.num.shape[:-1]

    def value(self, idx) -> CyclotomicNumber:
        return CyclotomicNumber.from_row(self.conductor, self.num[tuple(idx)], self.den)

    def root_exponents(self) -> np.ndarray | None:
        """Exponent table k with entry = zeta_L^k, or None if some entry is not a root of unity."""
        L = self.conductor
        R = reduction_matrix(L)
        lookup = {}
        for k in range(L):
            row = np.asarray(R[k], dtype=object) * self.den
            lookup[tuple(int(v) for v in row)] = k
        flat = self.num.reshape(-1, L)
        out = np.empty(len(flat), dtype=np.int64)
        cache: dict = {}
        for i, row in enumerate(flat):
            key = row.tobytes() if row.dtype != object else tuple(int(v) for v in row)
            if key not in cache:
                cache[key] = lookup.get(tuple(int(v) for v in row), -1)
            out[i] = cache[key]
        if np.any(out < 0):
            return None
        return out.reshape(self.shape)

    def equals(self, other: "DualArray") -> bool:
        L = math.lcm(self.conductor, other.conductor)
        a = _lift(self.num, self.conductor, L)
        b = _lift(other.num, other.conductor, L)
        return bool(np.array_equal(np.asarray(a, dtype=object) * other.den, np.asarray(b, dtype=object) * self.den))

    def multiply(self, other: "DualArray") -> "DualArray":
        """Entrywise product."""
        L = math.lcm(self.conductor, other.conductor)
        a = _lift(self.num, self.conductor, L).reshape(-1, L)
        b = _lift(other.num, other.conductor, L).reshape(-1, L)
        idx = np.arange(len(a))
        if a.dtype == object or b.dtype == object or _overflow(a, b):
            a, b = a.astype(object), b.astype(object)
        out = K.pair_convolve(a, b, idx, idx, idx, len(a))
        out = reduce_rows(out, L).reshape(self.shape + (L,))
        return DualArray(self.structures, out, self.den * other.den, L)


def _overflow(a, b) -> bool:
    from .cyclotomic import INT64_SAFE, _max_abs

    return _max_abs(a) * _max_abs(b) * a.shape[1] >= INT64_SAFE


def _lift(num, n, L):
    if n == L:
        return num
    shape = num.shape[:-1]
    return lift_rows(num.reshape(-1, n), n, L).reshape(shape + (L,))


def structures_for(x: GroupRingElement) -> list[AbelianStructure]:
    """Abelian structures on the subgroup generated by each slot's support."""
    from .groups import closure_indices

    G = x.group
    out = []
    for c in range(x.degree):
        s = closure_indices(G, np.unique(x.keys[:, c]) if x.nnz else [])
        out.append(abelian_invariants(Subgroup(G, s)))
    return out


def _conductor_for(structures, base: int) -> int:
    return math.lcm(base, *[S.exponent for S in structures])


def _axis_apply(X: np.ndarray, axis: int, shift: np.ndarray, L: int) -> np.ndarray:
    Xm = np.moveaxis(X, axis, 0)
    S = Xm.shape[0]
    rest = Xm.shape[1:-1]
    flat = Xm.reshape(S, -1, L)
    if flat.dtype != object:
        from .cyclotomic import INT64_SAFE, _max_abs

        if _max_abs(flat) * S * L >= INT64_SAFE:
            flat = flat.astype(object)
    Y = K.axis_transform(np.ascontiguousarray(flat), shift)
    C = Y.shape[0]
    Y = reduce_rows(Y.reshape(-1, L), L).reshape((C,) + rest + (L,))
    return np.moveaxis(Y, 0, axis)


def transform(x: GroupRingElement, structures: Sequence[AbelianStructure] | None = None,
              conductor: int | None = None) -> DualArray:
    """Table of (chi_1 (x) ... (x) chi_m)(x) over all character tuples."""
    if structures is None:
        structures = structures_for(x)
    structures = tuple(structures)
    L = conductor or _conductor_for(structures, x.conductor)
    shape = tuple(S.order for S in structures)
    X = _zeros(shape + (L,), x.num.dtype)
    if x.nnz:
        keys = x.keys
        pos = tuple(S.local(keys[:, c]) for c, S in enumerate(structures))
        X[pos] = lift_rows(x.num, x.conductor, L) if x.conductor != L else x.num
    for c, S in enumerate(structures):
        shift = S.char_table * (L // S.exponent)
        X = _axis_apply(X, c, shift, L)
    return DualArray(structures, shrink(X) if X.dtype == object else X, x.den, L)


def inverse_transform(Y: DualArray, group) -> GroupRingElement:
    """The element whose transform is Y."""
    L = Y.conductor
    X = Y.num
    total = 1
    for c, S in enumerate(Y.structures):
        shift = (-S.char_table.T * (L // S.exponent)) % L
        X = _axis_apply(X, c, shift, L)
        total *= S.order
    grids = np.indices(Y.shape).reshape(len(Y.shape), -1).T
    keys = np.stack([S.elements[grids[:, c]] for c, S in enumerate(Y.structures)], axis=1)
    flat = flatten_keys(group.order, keys)
    order = np.argsort(flat)
    rows = X.reshape(-1, L)[order]
    return GroupRingElement.build(group, len(Y.structures), flat[order], rows, Y.den * total, L, reduced=True)


def from_exponent_table(structures: Sequence[AbelianStructure], exps: np.ndarray, root_order: int,
                        conductor: int | None = None, weights: np.ndarray | None = None) -> DualArray:
    """DualArray with entries weights * zeta_root_order^exps (weights default 1)."""
    structures = tuple(structures)
    L = conductor or _conductor_for(structures, root_order)
    if L % root_order:
        L = math.lcm(L, root_order)
    exps = np.asarray(exps, dtype=np.int64) % root_order
    raw = np.zeros(exps.shape + (L,), dtype=np.int64)
    w = np.ones(exps.shape, dtype=np.int64) if weights is None else np.asarray(weights, dtype=np.int64)
    idx = np.indices(exps.shape)
    raw[tuple(idx) + ((exps * (L // root_order)),)] = w
    num = reduce_rows(raw.reshape(-1, L), L).reshape(exps.shape + (L,))
    return DualArray(structures, num, 1, L)


def invert_entries(Y: DualArray) -> DualArray:
    """Entrywise inverse; NotAUnit if an entry vanishes."""
    L = Y.conductor
    flat = Y.num.reshape(-1, L)
    phi = totient(L)
    cache: dict = {}
    inv = []
    for row in flat:
        key = tuple(int(v) for v in row[:phi])
        if key not in cache:
            c = CyclotomicNumber(L, [Fraction(v, Y.den) for v in key])
            if c.is_zero():
                raise NotAUnit("character value vanishes")
            cache[key] = c.inverse().coeffs
        inv.append(cache[key])
    D = math.lcm(*[f.denominator for row in cache.values() for f in row]) if cache else 1
    out = np.zeros((len(flat), L), dtype=object)
    out[...] = 0
    for i, row in enumerate(inv):
        out[i, :phi] = [int(f * D) for f in row]
    return DualArray(Y.structures, shrink(out).reshape(Y.shape + (L,)), D, L)


def invert_abelian(x: GroupRingElement, subs) -> GroupRingElement:
    structures = [abelian_invariants(Subgroup(x.group, s)) for s in subs]
    Y = transform(x, structures)
    return inverse_transform(invert_entries(Y), x.group)


def idempotent(structure: AbelianStructure, k, conductor: int | None = None) -> GroupRingElement:
    """p_chi = 1/|A| sum_a chi(a)^-1 a for chi with exponent vector k."""
    shape = (structure.order,)
    exps = np.zeros(shape, dtype=np.int64)
    weights = np.zeros(shape, dtype=np.int64)
    weights[int(structure.local_of_coords(np.asarray(k)))] = 1
    Y = from_exponent_table([structure], exps, 1, conductor or structure.exponent, weights)
    return inverse_transform(Y, structure.parent)


def diagonal_element(structures: Sequence[AbelianStructure], exps: np.ndarray, root_order: int,
                     conductor: int | None = None) -> GroupRingElement:
    """sum over character tuples of zeta^exps[chi] p_chi1 (x) ... (x) p_chim."""
    structures = list(structures)
    Y = from_exponent_table(structures, exps, root_order, conductor)
    return inverse_transform(Y, structures[0].parent)


def evaluate_pair(R: GroupRingElement, chars: Sequence, structures: Sequence[AbelianStructure]) -> CyclotomicNumber:
    """sum_keys R[key] prod_c chi_c(key_c), for characters given by exponent vectors."""
    keys = R.keys
    L = _conductor_for(structures, R.conductor)
    total = np.zeros(R.nnz, dtype=np.int64)
    for c, (S, k) in enumerate(zip(structures, chars)):
        mask = S.subgroup.mask[keys[:, c]]
        if not mask.all():
            raise ValueError("support is not inside the given abelian subgroups")
        total = total + S.char_exponents(np.asarray(k), S.coords(keys[:, c])) * (L // S.exponent)
    total %= L
    num = lift_rows(R.num, R.conductor, L) if R.conductor != L else R.num
    acc = [0] * L
    for row, t in zip(num, total):
        t = int(t)
        for i, v in enumerate(row):
            v = int(v)
            if v:
                acc[(i + t) % L] += v
    return CyclotomicNumber.from_power_sum(L, [Fraction(v, R.den) for v in acc])


__all__ = [
    "DualArray",
    "diagonal_element",
    "evaluate_pair",
    "from_exponent_table",
    "idempotent",
    "inverse_transform",
    "invert_abelian",
    "invert_entries",
    "structures_for",
    "transform",
]
