"""Exact linear algebra over F_p and Q, delegated to sympy's DomainMatrix."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from sympy import GF, QQ
from sympy.polys.matrices import DomainMatrix


def _dm_mod(M, p: int) -> DomainMatrix:
    M = np.asarray(M, dtype=np.int64) % p
    K = GF(p)
    rows, cols = M.shape
    return DomainMatrix([[K(int(v)) for v in row] for row in M], (rows, cols), K)


def _ints(dm: DomainMatrix, p: int) -> np.ndarray:
    rows, cols = dm.shape
    out = np.zeros((rows, cols), dtype=np.int64)
    for i, row in enumerate(dm.to_list()):
        for j, v in enumerate(row):
            out[i, j] = int(v) % p
    return out


def rank_mod_p(M, p: int) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return _dm_mod(M, p).rank()


def nullspace_mod_p(M, p: int) -> np.ndarray:
    """Rows spanning {x : M x = 0} over F_p."""
    M = np.asarray(M)
    if M.shape[0] == 0:
        return np.eye(M.shape[1], dtype=np.int64)
    ns = _dm_mod(M, p).nullspace()
    if ns.shape[0] == 0 or ns.shape[1] == 0:
        return np.zeros((0, M.shape[1]), dtype=np.int64)
    return _ints(ns, p)


def solve_mod_p(M, b, p: int) -> np.ndarray | None:
    """One solution of M x = b over F_p, or None when the system is inconsistent."""
    M = np.asarray(M, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    aug = np.hstack([M, b])
    if rank_mod_p(aug, p) != rank_mod_p(M, p):
        return None
    R, pivots = _dm_mod(aug, p).rref()
    R = _ints(R, p)
    x = np.zeros(M.shape[1], dtype=np.int64)
    for i, c in enumerate(pivots):
        if c < M.shape[1]:
            x[c] = R[i, -1]
    return x


def inverse_mod_p(M, p: int) -> np.ndarray:
    return _ints(_dm_mod(M, p).inv(), p)


def rational_nullspace(M) -> list[list[Fraction]]:
    """Basis of {x : M x = 0} over Q for an integer matrix."""
    M = np.asarray(M, dtype=np.int64)
    rows, cols = M.shape
    dm = DomainMatrix([[QQ(int(v)) for v in row] for row in M], (rows, cols), QQ)
    ns = dm.nullspace()
    out = []
    for row in ns.to_list():
        out.append([Fraction(int(v.numerator), int(v.denominator)) for v in row])
    return out


__all__ = ["inverse_mod_p", "nullspace_mod_p", "rank_mod_p", "rational_nullspace", "solve_mod_p"]
