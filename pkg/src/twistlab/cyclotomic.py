"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Scalars are :class:`CyclotomicNumber` objects holding rational coefficients
over the power basis 1, z, ..., z^(phi(N)-1).  Vectorised code elsewhere keeps
integer rows of length N in Z[x]/(x^N - 1) and calls :func:`reduce_rows` to
bring them to the same canonical basis.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "CyclotomicNumber",
    "NoCanonicalRoot",
    "as_root_exponent",
    "cyclotomic_polynomial",
    "mth_root_in_mu",
    "parse_cyclotomic",
    "reduction_matrix",
    "reduce_rows",
    "root_of_unity",
    "totient",
]

INT64_SAFE = 1 << 62


class NoCanonicalRoot(ValueError):
    """Raised when an m-th root inside mu_d is not canonical (gcd(m, d) != 1)."""


# --- integer polynomials (low-to-high coefficient lists) -------------------


def _poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], lead)
        if r:
            raise ArithmeticError("inexact polynomial division")
        out[i] = q
        if q:
            for j, d in enumerate(den):
                num[i + j] -= q * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (constant term first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def totient(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def reduction_matrix(n: int) -> np.ndarray:
    """Integer matrix R with row i = x^i mod Phi_n, padded to width n."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    R = np.zeros((n, n), dtype=np.int64)
    cur = [0] * deg
    if deg:
        cur[0] = 1
    for i in range(n):
        R[i, :deg] = cur
        # multiply by x and reduce
        top = cur[-1] if deg else 0
        nxt = [0] + cur[:-1]
        if top:
            nxt = [c - top * p for c, p in zip(nxt, phi[:-1])]
        cur = nxt
    if n == 1:
        R[0, 0] = 1  # Phi_1 = x - 1, basis {1}, x -> 1
    R.setflags(write=False)
    return R


@lru_cache(maxsize=None)
def _reduction_colnorm(n: int) -> int:
    return int(np.abs(reduction_matrix(n)).sum(axis=0).max())


def _max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a.flat)
    return int(np.abs(a).max())


def shrink(a: np.ndarray) -> np.ndarray:
    """Return an int64 copy of an object array when every entry fits."""
    if a.dtype != object:
        return a
    if _max_abs(a) < INT64_SAFE:
        return a.astype(np.int64)
    return a


def reduce_rows(v: np.ndarray, n: int) -> np.ndarray:
    """Map rows in Z[x]/(x^n-1) to canonical coefficients mod Phi_n (width n)."""
    R = reduction_matrix(n)
    if v.dtype != object and _max_abs(v) * _reduction_colnorm(n) < INT64_SAFE:
        return v @ R
    return shrink(v.astype(object) @ R.astype(object))


def lift_rows(v: np.ndarray, n: int, m: int) -> np.ndarray:
    """Re-express rows at conductor n as rows at conductor m (n | m)."""
    if n == m:
        return v
    if m % n:
        raise ValueError(f"cannot lift conductor {n} to {m}")
    out = np.zeros(v.shape[:-1] + (m,), dtype=v.dtype)
    if out.dtype == object:
        out[...] = 0
    out[..., :: m // n] = v
    return reduce_rows(out.reshape(-1, m), m).reshape(out.shape)


def gcd_of(values: Iterable[int]) -> int:
    return reduce(math.gcd, (int(v) for v in values), 0)


def array_gcd(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return gcd_of(a.flat)
    return int(np.gcd.reduce(np.abs(a).ravel()))


# --- scalar field elements --------------------------------------------------


def _fracs(seq) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in seq)


def _poly_mod(a: list[Fraction], n: int) -> list[Fraction]:
    """Reduce a rational polynomial modulo Phi_n, returning phi(n) coefficients."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    a = list(a)
    for i in range(len(a) - 1, deg - 1, -1):
        t = a[i]
        if t:
            for j in range(deg):
                a[i - deg + j] -= t * phi[j]
        a[i] = Fraction(0)
    a = a[:deg] + [Fraction(0)] * (deg - len(a))
    return a


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        f = a[-1] / b[-1]
        q[k] = f
        for j, c in enumerate(b):
            a[k + j] -= f * c
        _trim(a)
    return q, a


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


class CyclotomicNumber:
    """Exact element of Q(zeta_N) in the reduced power basis."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Sequence = ()):
        if conductor < 1:
            raise ValueError("conductor must be positive")
        deg = totient(conductor)
        c = list(_fracs(coeffs))
        if len(c) > deg:
            c = _poly_mod(c, conductor)
        c += [Fraction(0)] * (deg - len(c))
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("CyclotomicNumber is immutable")

    # constructors
    @classmethod
    def from_int(cls, value, conductor: int = 1) -> "CyclotomicNumber":
        return cls(conductor, [Fraction(value)])

    @classmethod
    def from_power_sum(cls, conductor: int, seq: Sequence) -> "CyclotomicNumber":
        """Interpret seq[i] as the coefficient of zeta_N^i (any length, wraps mod N)."""
        acc = [Fraction(0)] * conductor
        for i, c in enumerate(seq):
            acc[i % conductor] += Fraction(c)
        return cls(conductor, _poly_mod(acc, conductor))

    @classmethod
    def from_row(cls, conductor: int, row, den: int = 1) -> "CyclotomicNumber":
        deg = totient(conductor)
        return cls(conductor, [Fraction(int(row[i]), den) for i in range(deg)])

    # lifting
    def lift(self, m: int) -> "CyclotomicNumber":
        n = self.conductor
        if m == n:
            return self
        if m % n:
            raise ValueError(f"cannot lift conductor {n} to {m}")
        step = m // n
        seq = [Fraction(0)] * m
        for i, c in enumerate(self.coeffs):
            seq[i * step] = c
        return CyclotomicNumber(m, _poly_mod(seq, m))

    def _common(self, other):
        if not isinstance(other, CyclotomicNumber):
            other = CyclotomicNumber.from_int(Fraction(other), self.conductor)
        m = math.lcm(self.conductor, other.conductor)
        return self.lift(m), other.lift(m), m

    # arithmetic
    def __add__(self, other):
        try:
            a, b, m = self._common(other)
        except TypeError:
            return NotImplemented
        return CyclotomicNumber(m, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.conductor, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_coerce(other, self.conductor))

    def __rsub__(self, other):
        return _coerce(other, self.conductor) + (-self)

    def __mul__(self, other):
        try:
            a, b, m = self._common(other)
        except TypeError:
            return NotImplemented
        return CyclotomicNumber(m, _poly_mod(_poly_mul(list(a.coeffs), list(b.coeffs)), m))

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        """Inverse by extended Euclid modulo Phi_N."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_N)")
        n = self.conductor
        r0 = [Fraction(c) for c in cyclotomic_polynomial(n)]
        r1 = _trim(list(self.coeffs))
        s0: list[Fraction] = []
        s1 = [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _trim(_poly_sub(s0, _poly_mul(q, s1)))
        # r1 is a nonzero constant
        c = r1[0]
        return CyclotomicNumber(n, _poly_mod([x / c for x in s1], n) if s1 else [])

    def __truediv__(self, other):
        return self * _coerce(other, self.conductor).inverse()

    def __rtruediv__(self, other):
        return _coerce(other, self.conductor) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CyclotomicNumber.from_int(1, self.conductor)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # predicates
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __eq__(self, other):
        if not isinstance(other, CyclotomicNumber):
            try:
                other = CyclotomicNumber.from_int(Fraction(other), self.conductor)
            except (TypeError, ValueError):
                return NotImplemented
        a, b, _ = self._common(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # equality crosses conductors, so no cheap consistent hash

    def __complex__(self):
        z = complex(math.cos(2 * math.pi / self.conductor), math.sin(2 * math.pi / self.conductor))
        return sum(float(c) * z**i for i, c in enumerate(self.coeffs))

    def serialize(self) -> str:
        return f"cyc({self.conductor})[" + ",".join(str(c) for c in self.coeffs) + "]"

    def __repr__(self):
        return self.serialize()


def _coerce(x, conductor: int) -> CyclotomicNumber:
    if isinstance(x, CyclotomicNumber):
        return x
    return CyclotomicNumber.from_int(Fraction(x), conductor)


_CYC_RE = re.compile(r"^\s*cyc\((\d+)\)\[(.*)\]\s*$")


def parse_cyclotomic(text: str) -> CyclotomicNumber:
    m = _CYC_RE.match(text)
    if not m:
        raise ValueError(f"not a cyclotomic literal: {text!r}")
    n = int(m.group(1))
    body = m.group(2).strip()
    coeffs = [Fraction(t.strip()) for t in body.split(",")] if body else []
    if len(coeffs) != totient(n):
        raise ValueError(f"expected {totient(n)} coefficients for conductor {n}")
    return CyclotomicNumber(n, coeffs)


def root_of_unity(n: int, k: int = 1) -> CyclotomicNumber:
    seq = [0] * n
    seq[k % n] = 1
    return CyclotomicNumber.from_power_sum(n, seq)


def as_root_exponent(z: CyclotomicNumber, n: int) -> int | None:
    """Return k with z == zeta_n^k, or None when z is not such a root."""
    m = math.lcm(n, z.conductor)
    zl = z.lift(m)
    for k in range(n):
        if root_of_unity(m, k * (m // n)).coeffs == zl.coeffs:
            return k
    return None


def root_order(z: CyclotomicNumber) -> int | None:
    """Multiplicative order of a root of unity z (None if z is not one)."""
    n = z.conductor
    full = n if n % 2 == 0 else 2 * n
    k = as_root_exponent(z, full)
    if k is None:
        return None
    return full // math.gcd(k, full)


def mth_root_in_mu(z: CyclotomicNumber, m: int) -> CyclotomicNumber:
    """The unique m-th root of z inside mu_d, d = order(z), needing gcd(m, d) = 1."""
    d = root_order(z)
    if d is None:
        raise ValueError("argument is not a root of unity")
    if math.gcd(m, d) != 1:
        raise NoCanonicalRoot(f"no canonical {m}-th root: gcd({m}, {d}) != 1")
    return z ** pow(m, -1, d) if d > 1 else z
