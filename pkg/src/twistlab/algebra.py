"""Exact elements of k[G], k[G] (x) k[G] and higher tensor powers.

An element of degree m is a sparse map from G^m to Q(zeta_N).  Keys are
flattened to one int64 (mixed radix |G|); values are integer rows of length N
in the canonical cyclotomic basis sharing one positive denominator.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .cyclotomic import (
    CyclotomicNumber,
    INT64_SAFE,
    _max_abs,
    array_gcd,
    lift_rows,
    reduce_rows,
    shrink,
    totient,
)
from .groups import FiniteGroup, closure_indices

PAIR_CHUNK = 1 << 20


class NotAUnit(ArithmeticError):
    pass


class TripleTensorCap(RuntimeError):
    pass


def _zeros(shape, dtype):
    z = np.zeros(shape, dtype=dtype)
    if dtype == object:
        z[...] = 0
    return z


def _as_frac_row(c, N: int):
    """Integer row of width N and denominator for a scalar at conductor N."""
    if not isinstance(c, CyclotomicNumber):
        c = CyclotomicNumber.from_int(Fraction(c), 1)
    m = math.lcm(N, c.conductor)
    c = c.lift(m)
    den = math.lcm(*[x.denominator for x in c.coeffs]) if c.coeffs else 1
    row = [int(x * den) for x in c.coeffs] + [0] * (m - len(c.coeffs))
    arr = np.array(row, dtype=object)
    return shrink(arr), den, m


class GroupRingElement:
    """Sparse element of k[G^m]; immutable."""

    __slots__ = ("group", "degree", "flat", "num", "den", "conductor")

    def __init__(self, group: FiniteGroup, degree: int, flat, num, den: int, conductor: int):
        self.group = group
        self.degree = degree
        self.flat = flat
        self.num = num
        self.den = den
        self.conductor = conductor

    # -- construction -------------------------------------------------------

    @staticmethod
    def _cls(degree: int):
        return {1: AlgebraElement, 2: TensorElement}.get(degree, GroupRingElement)

    @classmethod
    def build(cls, group, degree, flat, rows, den, conductor, *, reduced=False):
        """Coalesce duplicate keys, reduce, drop zeros and normalise the denominator."""
        flat = np.asarray(flat, dtype=np.int64)
        if not reduced:
            rows = reduce_rows(rows, conductor)
        if len(flat) > 1 and not np.all(flat[1:] > flat[:-1]):
            uniq, inv = np.unique(flat, return_inverse=True)
            rows = K.scatter_add(rows, inv, len(uniq))
            flat = uniq
        keep = rows.any(axis=1)
        if not keep.all():
            flat = flat[keep]
            rows = rows[keep]
        den = int(den)
        if den < 0:
            den, rows = -den, -rows
        g = math.gcd(array_gcd(rows), den) if len(flat) else den
        if g > 1:
            rows = rows // g
            den //= g
        if not len(flat):
            den = 1
        rows = shrink(rows)
        return cls._cls(degree)(group, degree, flat, rows, den, conductor)

    @classmethod
    def zero(cls, group, degree=1, conductor=1):
        return cls.build(group, degree, np.zeros(0, np.int64), _zeros((0, conductor), np.int64), 1,
                         conductor, reduced=True)

    @classmethod
    def one(cls, group, degree=1, conductor=1):
        return cls.basis(group, [group.identity] * degree, conductor=conductor)

    @classmethod
    def basis(cls, group, key: Sequence[int], coeff=1, conductor=1):
        row, den, N = _as_frac_row(coeff, conductor)
        flat = np.array([flatten_key(group.order, key)], dtype=np.int64)
        return cls.build(group, len(key), flat, row[None, :], den, N)

    @classmethod
    def from_terms(cls, group, keys, exps, root_order: int, *, weights=None, den: int = 1, conductor=None):
        """sum_t weights[t] * zeta_e^exps[t] * key_t / den."""
        keys = np.asarray(keys, dtype=np.int64)
        if keys.ndim == 1:
            keys = keys[:, None]
        m = keys.shape[1]
        N = conductor or root_order
        if N % root_order:
            raise ValueError("conductor must be a multiple of the root order")
        exps = np.asarray(exps, dtype=np.int64) % root_order
        n = len(keys)
        rows = np.zeros((n, N), dtype=np.int64)
        w = np.ones(n, dtype=np.int64) if weights is None else np.asarray(weights, dtype=np.int64)
        rows[np.arange(n), exps * (N // root_order)] = w
        flat = flatten_keys(group.order, keys)
        return cls.build(group, m, flat, rows, den, N)

    @classmethod
    def from_dict(cls, group, degree, coeffs: dict):
        if not coeffs:
            return cls.zero(group, degree)
        items = list(coeffs.items())
        N = math.lcm(*[c.conductor if isinstance(c, CyclotomicNumber) else 1 for _, c in items])
        rows, dens = [], []
        for _, c in items:
            r, d, _ = _as_frac_row(c, N)
            rows.append(r)
            dens.append(d)
        D = math.lcm(*dens)
        mat = np.array([np.asarray(r, dtype=object) * (D // d) for r, d in zip(rows, dens)], dtype=object)
        keys = np.array([k if isinstance(k, (tuple, list)) else (k,) for k, _ in items], dtype=np.int64)
        return cls.build(group, degree, flatten_keys(group.order, keys), shrink(mat), D, N, reduced=True)

    # -- basic views ----------------------------------------------------------

    @property
    def nnz(self) -> int:
        return len(self.flat)

    @property
    def keys(self) -> np.ndarray:
        return unflatten_keys(self.group.order, self.degree, self.flat)

    def is_zero(self) -> bool:
        return self.nnz == 0

    def coefficient(self, key) -> CyclotomicNumber:
        if isinstance(key, (int, np.integer)):
            key = (int(key),)
        f = flatten_key(self.group.order, key)
        pos = np.searchsorted(self.flat, f)
        if pos < self.nnz and self.flat[pos] == f:
            return CyclotomicNumber.from_row(self.conductor, self.num[pos], self.den)
        return CyclotomicNumber(self.conductor)

    def items(self):
        for key, row in zip(self.keys, self.num):
            yield tuple(int(k) for k in key), CyclotomicNumber.from_row(self.conductor, row, self.den)

    def support(self, slot: int | None = None) -> np.ndarray:
        k = self.keys
        return np.unique(k if slot is None else k[:, slot])

    def at_conductor(self, M: int) -> "GroupRingElement":
        if M == self.conductor:
            return self
        rows = lift_rows(self.num, self.conductor, M)
        return type(self)(self.group, self.degree, self.flat, shrink(rows), self.den, M)

    def _check(self, other):
        if not isinstance(other, GroupRingElement):
            raise TypeError("expected a group-ring element")
        if other.group is not self.group:
            raise ValueError("elements live over different groups")
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def _align(self, other):
        M = math.lcm(self.conductor, other.conductor)
        return self.at_conductor(M), other.at_conductor(M), M

    # -- linear structure -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, GroupRingElement):
            return self + self.scalar(other)
        self._check(other)
        a, b, M = self._align(other)
        D = math.lcm(a.den, b.den)
        ra, rb = _scale_rows(a.num, D // a.den), _scale_rows(b.num, D // b.den)
        rows = _concat(ra, rb)
        return self.build(self.group, self.degree, np.concatenate([a.flat, b.flat]), rows, D, M, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return type(self)(self.group, self.degree, self.flat, -self.num, self.den, self.conductor)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scalar(self, c) -> "GroupRingElement":
        """c times the identity of this algebra."""
        return GroupRingElement.basis(self.group, [self.group.identity] * self.degree, c, self.conductor)

    def scale(self, c) -> "GroupRingElement":
        row, den, M = _as_frac_row(c, self.conductor)
        a = self.at_conductor(M)
        idx = np.arange(a.nnz)
        out = K.pair_convolve(*_guard(a.num, row[None, :], 1), idx, np.zeros(a.nnz, np.int64), idx, a.nnz)
        return self.build(self.group, self.degree, a.flat, out, a.den * den, M)

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            return self.product(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(CyclotomicNumber.from_int(1) / other if not isinstance(other, CyclotomicNumber)
                          else other.inverse())

    # -- algebra structure --------------------------------------------------------

    def product(self, other: "GroupRingElement") -> "GroupRingElement":
        """Product in k[G^m] (componentwise group multiplication of keys)."""
        self._check(other)
        a, b, M = self._align(other)
        n, m = self.group.order, self.degree
        if a.nnz == 0 or b.nnz == 0:
            return self.zero(self.group, m, M)
        na_, nb_ = _guard(a.num, b.num, min(a.nnz, b.nnz))
        ka, kb = a.keys, b.keys
        flats, parts = [], []
        step = max(1, PAIR_CHUNK // b.nnz)
        for s in range(0, a.nnz, step):
            sl = slice(s, min(s + step, a.nnz))
            f = np.zeros((sl.stop - sl.start, b.nnz), dtype=np.int64)
            for c in range(m):
                f = f * n + self.group.mul(ka[sl, c][:, None], kb[None, :, c])
            uniq, inv = np.unique(f.ravel(), return_inverse=True)
            ia = np.repeat(np.arange(sl.start, sl.stop), b.nnz)
            ib = np.tile(np.arange(b.nnz), sl.stop - sl.start)
            parts.append(K.pair_convolve(na_, nb_, ia, ib, inv, len(uniq)))
            flats.append(uniq)
        rows = parts[0] if len(parts) == 1 else _concat(*parts)
        return self.build(self.group, m, np.concatenate(flats), rows, a.den * b.den, M)

    def tensor(self, other: "GroupRingElement") -> "GroupRingElement":
        """self (x) other, of degree self.degree + other.degree."""
        if other.group is not self.group:
            raise ValueError("elements live over different groups")
        a, b, M = self._align(other)
        n = self.group.order
        shift = n**other.degree
        if n ** (self.degree + other.degree) >= 1 << 62:
            raise OverflowError("tensor degree too large for flat keys")
        flat = (a.flat[:, None] * shift + b.flat[None, :]).ravel()
        ia = np.repeat(np.arange(a.nnz), b.nnz)
        ib = np.tile(np.arange(b.nnz), a.nnz)
        na_, nb_ = _guard(a.num, b.num, 1)
        rows = K.pair_convolve(na_, nb_, ia, ib, np.arange(len(flat)), len(flat))
        return self.build(self.group, self.degree + other.degree, flat, rows, a.den * b.den, M)

    def remap(self, fn, degree=None) -> "GroupRingElement":
        """Apply ``fn`` to the (nnz, m) key array, coalescing collisions."""
        keys = fn(self.keys)
        d = keys.shape[1] if degree is None else degree
        return self.build(self.group, d, flatten_keys(self.group.order, keys), self.num, self.den,
                          self.conductor, reduced=True)

    def flip(self) -> "GroupRingElement":
        if self.degree != 2:
            raise ValueError("flip needs a tensor of degree 2")
        return self.remap(lambda k: k[:, ::-1])

    def comultiply(self, slot: int = 0) -> "GroupRingElement":
        """Apply Delta on one tensor slot (degree m -> m+1)."""
        return self.remap(lambda k: np.insert(k, slot, k[:, slot], axis=1))

    def counit(self, slot: int = 0):
        """Apply epsilon on one slot; degree 1 returns a scalar."""
        if self.degree == 1:
            total = _zeros((1, self.conductor), self.num.dtype)
            if self.nnz:
                total = self.num.sum(axis=0, keepdims=True)
            return CyclotomicNumber.from_row(self.conductor, total[0], self.den)
        return self.remap(lambda k: np.delete(k, slot, axis=1))

    def antipode(self) -> "GroupRingElement":
        g = self.group
        return self.remap(lambda k: g.inv(k))

    def apply_morphism(self, images: np.ndarray) -> "GroupRingElement":
        images = np.asarray(images)
        return self.remap(lambda k: images[k])

    # -- comparisons --------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            if self.degree and not isinstance(other, GroupRingElement):
                try:
                    return self == self.scalar(other)
                except TypeError:
                    return NotImplemented
            return NotImplemented
        if other.group is not self.group or other.degree != self.degree:
            return False
        a, b, _ = self._align(other)
        if not np.array_equal(a.flat, b.flat):
            return False
        return bool(np.array_equal(_scale_rows(a.num, b.den), _scale_rows(b.num, a.den)))

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}(degree={self.degree}, nnz={self.nnz}, N={self.conductor})"

    def is_one(self) -> bool:
        return self == self.one(self.group, self.degree, self.conductor)

    def serialize(self) -> list[str]:
        """Sparse triplets ``(i, j, cyc)`` sorted lexicographically by key."""
        out = []
        for key, c in self.items():
            out.append("(" + ", ".join(str(k) for k in key) + ", " + c.serialize() + ")")
        return out

    # -- inversion ----------------------------------------------------------------

    def inverse(self, *, dense_cap: int = 1024) -> "GroupRingElement":
        if self.nnz == 0:
            raise NotAUnit("zero is not a unit")
        G = self.group
        keys = self.keys
        if self.nnz == 1:
            c = CyclotomicNumber.from_row(self.conductor, self.num[0], self.den)
            if c.is_zero():
                raise NotAUnit("zero coefficient")
            return GroupRingElement.basis(G, G.inv(keys[0]).tolist(), c.inverse(), self.conductor)
        subs = [closure_indices(G, np.unique(keys[:, c])) for c in range(self.degree)]
        abelian = all(_commutes(G, s) for s in subs)
        if abelian:
            from .fourier import invert_abelian

            return invert_abelian(self, subs)
        return _invert_modular(self, subs, dense_cap)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.one(self.group, self.degree, self.conductor)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result


class AlgebraElement(GroupRingElement):
    """Element of k[G]."""

    __slots__ = ()


class TensorElement(GroupRingElement):
    """Element of k[G] (x) k[G] = k[G x G]."""

    __slots__ = ()


# --- helpers -------------------------------------------------------------------


def flatten_key(n: int, key: Sequence[int]) -> int:
    f = 0
    for k in key:
        f = f * n + int(k)
    return f


def flatten_keys(n: int, keys: np.ndarray) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    f = np.zeros(len(keys), dtype=np.int64)
    for c in range(keys.shape[1]):
        f = f * n + keys[:, c]
    return f


def unflatten_keys(n: int, m: int, flat: np.ndarray) -> np.ndarray:
    out = np.empty((len(flat), m), dtype=np.int64)
    f = flat.copy()
    for c in range(m - 1, -1, -1):
        out[:, c] = f % n
        f //= n
    return out


def _scale_rows(rows, k: int):
    if k == 1:
        return rows
    if rows.dtype != object and _max_abs(rows) * k < INT64_SAFE:
        return rows * k
    return rows.astype(object) * k


def _concat(*arrays):
    if any(a.dtype == object for a in arrays):
        return np.concatenate([a.astype(object) for a in arrays])
    return np.concatenate(arrays)


def _guard(a, b, mult: int):
    """Cast to object dtype when an int64 convolution could overflow."""
    if a.dtype == object or b.dtype == object:
        return a.astype(object), b.astype(object)
    N = a.shape[1]
    if _max_abs(a) * _max_abs(b) * N * max(mult, 1) >= INT64_SAFE:
        return a.astype(object), b.astype(object)
    return a, b


def _commutes(G: FiniteGroup, members: np.ndarray) -> bool:
    if len(members) > 4096:
        return False
    m = members
    return bool(np.all(G.mul(m[:, None], m[None, :]) == G.mul(m[None, :], m[:, None])))


def element(G: FiniteGroup, g: int, coeff=1) -> AlgebraElement:
    return GroupRingElement.basis(G, [g], coeff)


def pure_tensor(G: FiniteGroup, g: int, h: int, coeff=1) -> TensorElement:
    return GroupRingElement.basis(G, [g, h], coeff)


def delta(a: GroupRingElement) -> GroupRingElement:
    """Delta on k[G] (g -> g (x) g); on tensors acts on the first slot."""
    return a.comultiply(0)


def counit(a: GroupRingElement):
    return a.counit(0)


def antipode(a: GroupRingElement) -> GroupRingElement:
    return a.antipode()


def ts_flip(F: GroupRingElement) -> GroupRingElement:
    return F.flip()


def ts_invert(F: GroupRingElement) -> GroupRingElement:
    return F.inverse()


def ts_mul(F: GroupRingElement, H: GroupRingElement) -> GroupRingElement:
    return F * H


def apply_delta_left(F: GroupRingElement, cap: int | None = None) -> GroupRingElement:
    """(Delta (x) id)(F)."""
    _triple_cap(F, cap)
    return F.comultiply(0)


def apply_delta_right(F: GroupRingElement, cap: int | None = None) -> GroupRingElement:
    """(id (x) Delta)(F)."""
    _triple_cap(F, cap)
    return F.comultiply(F.degree - 1)


def counit_left(F: GroupRingElement):
    return F.counit(0)


def counit_right(F: GroupRingElement):
    return F.counit(F.degree - 1)


def _triple_cap(F, cap):
    if cap is not None and F.group.order > cap:
        raise TripleTensorCap(f"|G| = {F.group.order} exceeds triple tensor cap {cap}")


def one_tensor(G: FiniteGroup, conductor: int = 1) -> TensorElement:
    return GroupRingElement.one(G, 2, conductor)


def sum_elements(items: Iterable[GroupRingElement]) -> GroupRingElement:
    items = list(items)
    if not items:
        raise ValueError("empty sum")
    G, m = items[0].group, items[0].degree
    M = math.lcm(*[x.conductor for x in items])
    D = math.lcm(*[x.den for x in items])
    rows = _concat(*[_scale_rows(x.at_conductor(M).num, D // x.den) for x in items])
    flat = np.concatenate([x.flat for x in items])
    return GroupRingElement.build(G, m, flat, rows, D, M, reduced=True)


# --- multi-modular solve for non-abelian supports --------------------------------


def _primes_1_mod(N: int, start: int = (1 << 26)):
    q = start - (start % N) + 1
    while True:
        q -= N
        if q < 3:
            raise RuntimeError("ran out of primes")
        if _is_prime(q):
            yield q


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if q % p == 0:
            return q == p
    d, s = q - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, q)
        if x in (1, q - 1):
            continue
        for _ in range(s - 1):
            x = x * x % q
            if x == q - 1:
                break
        else:
            return False
    return True


def _primitive_root_of_order(N: int, q: int) -> int:
    for g in range(2, q):
        r = pow(g, (q - 1) // N, q)
        if all(pow(r, N // p, q) != 1 for p in _prime_factors(N)):
            return r
    raise RuntimeError("no root of unity found")


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _solve_mod(L: np.ndarray, rhs: np.ndarray, q: int) -> np.ndarray | None:
    """Gauss-Jordan over F_q (q < 2^31); returns None when singular."""
    n = L.shape[0]
    A = np.concatenate([L % q, rhs[:, None] % q], axis=1).astype(np.int64)
    for col in range(n):
        piv = np.flatnonzero(A[col:, col])
        if piv.size == 0:
            return None
        p = col + piv[0]
        if p != col:
            A[[col, p]] = A[[p, col]]
        inv = pow(int(A[col, col]), -1, q)
        A[col] = (A[col] * inv) % q
        f = A[:, col].copy()
        f[col] = 0
        nz = np.flatnonzero(f)
        if nz.size:
            A[nz] = (A[nz] - (f[nz, None] * A[col][None, :]) % q) % q
    return A[:, n]


def _rational_reconstruct(a: int, m: int):
    """Fraction p/q with p/q = a mod m and |p|, q <= sqrt(m/2), or None."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        qq = r0 // r1
        r0, r1 = r1, r0 - qq * r1
        s0, s1 = s1, s0 - qq * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    return Fraction(r1, s1)


def _invert_modular(a: GroupRingElement, subs: list[np.ndarray], dense_cap: int) -> GroupRingElement:
    G = a.group
    n = G.order
    m = a.degree
    sizes = [len(s) for s in subs]
    h = math.prod(sizes)
    if h > dense_cap:
        raise NotAUnit(f"inversion space of dimension {h} exceeds dense cap {dense_cap}")
    # basis of k[H_0 x ... x H_{m-1}] in flat-key order
    grid = np.indices(sizes).reshape(m, -1).T
    bkeys = np.stack([subs[c][grid[:, c]] for c in range(m)], axis=1)
    bflat = flatten_keys(n, bkeys)
    order = np.argsort(bflat)
    bkeys, bflat = bkeys[order], bflat[order]
    ak = a.keys
    prod = np.zeros((a.nnz, h), dtype=np.int64)
    for c in range(m):
        prod = prod * n + G.mul(ak[:, c][:, None], bkeys[None, :, c])
    rowpos = np.searchsorted(bflat, prod)
    colpos = np.broadcast_to(np.arange(h), rowpos.shape)
    target = int(np.searchsorted(bflat, flatten_key(n, [G.identity] * m)))
    N = a.conductor
    phi = totient(N)
    residues: list[np.ndarray] = []
    modulus = 1
    singular = 0
    for q in _primes_1_mod(N):
        if a.den % q == 0:
            continue
        r = _primitive_root_of_order(N, q) if N > 1 else 1
        roots = [pow(r, j, q) for j in range(1, N + 1) if math.gcd(j, N) == 1] if N > 1 else [1]
        xs = []
        dinv = pow(a.den, -1, q)
        ok = True
        for rho in roots:
            pw = np.array([pow(rho, i, q) for i in range(N)], dtype=np.int64)
            num = a.num.astype(object) % q if a.num.dtype == object else a.num % q
            vals = (np.asarray(num, dtype=np.int64) @ pw) % q if N < 64 else np.array(
                [sum(int(v) * int(p) for v, p in zip(row, pw)) % q for row in num], dtype=np.int64)
            vals = (vals * dinv) % q
            L = np.zeros((h, h), dtype=np.int64)
            np.add.at(L, (rowpos.ravel(), colpos.ravel()), np.repeat(vals, h))
            L %= q
            rhs = np.zeros(h, dtype=np.int64)
            rhs[target] = 1
            x = _solve_mod(L, rhs, q)
            if x is None:
                ok = False
                break
            xs.append(x)
        if not ok:
            singular += 1
            if singular >= 3:
                raise NotAUnit("element is singular modulo several primes")
            continue
        # back to power-basis coefficients: V c = x with V[j, i] = rho_j^i
        V = np.array([[pow(rho, i, q) for i in range(phi)] for rho in roots], dtype=np.int64)
        Vinv = _mat_inv_mod(V, q)
        X = np.stack(xs)  # (phi, h)
        C = (Vinv.astype(object) @ X.astype(object)) % q  # (phi, h)
        residues.append((C, q))
        # CRT
        if len(residues) == 1:
            acc = C.astype(object)
            modulus = q
        else:
            inv = pow(modulus, -1, q)
            acc = acc + modulus * (((C - acc) % q) * inv % q)
            modulus *= q
        if len(residues) < 2:
            continue
        fr = [_rational_reconstruct(int(v), modulus) for v in acc.ravel()]
        if any(f is None for f in fr):
            continue
        D = math.lcm(*[f.denominator for f in fr])
        ints = np.array([int(f * D) for f in fr], dtype=object).reshape(phi, h).T
        rows = _zeros((h, N), object)
        rows[:, :phi] = ints
        cand = GroupRingElement.build(G, m, bflat, shrink(rows), D, N, reduced=True)
        if (a * cand).is_one():
            return cand
        if len(residues) > 40:
            break
    raise NotAUnit("modular inversion did not converge")


def _mat_inv_mod(V: np.ndarray, q: int) -> np.ndarray:
    n = V.shape[0]
    cols = []
    for i in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[i] = 1
        x = _solve_mod(V, e, q)
        if x is None:
            raise ArithmeticError("singular Vandermonde")
        cols.append(x)
    return np.stack(cols, axis=1)
