"""Small prime-power fields GF(p^d) with table arithmetic.

Elements are integers 0..p^d-1 whose base-p digits are the coefficients of a
polynomial in x modulo a fixed monic irreducible f (lowest degree first).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from sympy import Poly, symbols

_X = symbols("x")


def smallest_irreducible(p: int, d: int) -> tuple[int, ...]:
    """Coefficients (a_0, ..., a_{d-1}) of the first monic irreducible x^d + a_{d-1} x^{d-1} + ... + a_0,
    scanning (a_{d-1}, ..., a_0) in lexicographic order."""
    for tail in itertools.product(range(p), repeat=d):
        coeffs = [1, *tail]  # highest degree first
        if Poly(coeffs, _X, modulus=p).is_irreducible:
            return tuple(reversed(tail))
    raise ArithmeticError(f"no irreducible polynomial of degree {d} over F_{p}")


@dataclass(eq=False)
class GF:
    p: int
    d: int
    modulus: tuple  # a_0..a_{d-1} of the monic defining polynomial

    @classmethod
    def build(cls, p: int, d: int) -> "GF":
        return cls(p, d, smallest_irreducible(p, d))

    @property
    def order(self) -> int:
        return self.p ** self.d

    @cached_property
    def _weights(self) -> np.ndarray:
        return self.p ** np.arange(self.d, dtype=np.int64)

    def to_vec(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._weights) % self.p

    def from_vec(self, v) -> np.ndarray:
        return (np.asarray(v, dtype=np.int64) % self.p) @ self._weights

    def _polymul(self, a: int, b: int) -> int:
        p, d = self.p, self.d
        va, vb = self.to_vec(a), self.to_vec(b)
        prod = np.zeros(2 * d - 1, dtype=np.int64)
        for i in range(d):
            prod[i:i + d] += va[i] * vb
        f = np.asarray(self.modulus, dtype=np.int64)
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k] % p
            if c:
                prod[k - d:k] -= c * f
            prod[k] = 0
        return int(self.from_vec(prod[:d] % p))

    @cached_property
    def _logs(self):
        """(generator, exp table, log table) for a primitive element."""
        q = self.order
        for g in range(2, q):
            exp = np.zeros(q - 1, dtype=np.int64)
            exp[0] = 1
            for k in range(1, q - 1):
                exp[k] = self._polymul(int(exp[k - 1]), g)
            if len(np.unique(exp)) == q - 1:
                log = np.full(q, -1, dtype=np.int64)
                log[exp] = np.arange(q - 1)
                return g, exp, log
        raise ArithmeticError("no primitive element")

    @property
    def primitive(self) -> int:
        return self._logs[0]

    # vectorised arithmetic on integer codes
    def add(self, a, b):
        return self.from_vec(self.to_vec(a) + self.to_vec(b))

    def neg(self, a):
        return self.from_vec(-self.to_vec(a))

    def sub(self, a, b):
        return self.from_vec(self.to_vec(a) - self.to_vec(b))

    def scale(self, k: int, a):
        return self.from_vec(k * self.to_vec(a))

    def mul(self, a, b):
        _, exp, log = self._logs
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        zero = (a == 0) | (b == 0)
        la, lb = np.where(a == 0, 0, log[a]), np.where(b == 0, 0, log[b])
        return np.where(zero, 0, exp[(la + lb) % (self.order - 1)])

    def power(self, a, k: int):
        _, exp, log = self._logs
        a = np.asarray(a, dtype=np.int64)
        if k == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, exp[(np.where(a == 0, 0, log[a]) * k) % (self.order - 1)])

    def inverse(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("0 has no inverse")
        return self.power(a, self.order - 2)

    def frobenius(self, a, times: int = 1):
        return self.power(a, self.p ** times)

    def trace(self, a) -> np.ndarray:
        """Tr(a) = sum a^(p^i), returned as an element of F_p."""
        acc = np.zeros(np.shape(a), dtype=np.int64)
        for i in range(self.d):
            acc = self.add(acc, self.frobenius(a, i))
        v = self.to_vec(acc)
        if np.any(v[..., 1:]):
            raise ArithmeticError("trace left the prime field")
        return v[..., 0]

    def element_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("0 has no multiplicative order")
        _, _, log = self._logs
        from math import gcd

        return (self.order - 1) // gcd(int(log[a]), self.order - 1)

    def matrix_of(self, fn) -> np.ndarray:
        """Matrix over F_p of an F_p-linear map on codes (columns are images of x^i)."""
        basis = self._weights
        return self.to_vec(fn(basis)).T.copy() % self.p

    def polynomial_string(self) -> str:
        terms = [f"x^{self.d}"]
        for i in range(self.d - 1, -1, -1):
            c = self.modulus[i]
            if c:
                terms.append(f"{c if c != 1 or i == 0 else ''}{'x' if i else ''}{'^' + str(i) if i > 1 else ''}")
        return " + ".join(terms)


@dataclass(frozen=True)
class FiniteFieldElement:
    field: GF
    code: int

    def __add__(self, other):
        return FiniteFieldElement(self.field, int(self.field.add(self.code, other.code)))

    def __sub__(self, other):
        return FiniteFieldElement(self.field, int(self.field.sub(self.code, other.code)))

    def __neg__(self):
        return FiniteFieldElement(self.field, int(self.field.neg(self.code)))

    def __mul__(self, other):
        return FiniteFieldElement(self.field, int(self.field.mul(self.code, other.code)))

    def __pow__(self, k: int):
        if k < 0:
            return FiniteFieldElement(self.field, int(self.field.inverse(self.code))) ** (-k)
        return FiniteFieldElement(self.field, int(self.field.power(self.code, k)))

    def trace(self) -> int:
        return int(self.field.trace(self.code))

    def frobenius(self) -> "FiniteFieldElement":
        return FiniteFieldElement(self.field, int(self.field.frobenius(self.code)))


__all__ = ["FiniteFieldElement", "GF", "smallest_irreducible"]
