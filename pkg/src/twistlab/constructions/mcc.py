"""The groups M(C, c) on C + C + C-hat built from a symmetric trimultiplicative map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..abelian import AbelianStructure, PairingForm
from ..groups import FiniteGroup, Subgroup, abelian_group, closure_indices, table_group
from ..twists import FormTwist, twist_from_form


def cyclic_triform(n: int) -> np.ndarray:
    """c(x, y, z) = zeta_n^(xyz) on Z/n, as an exponent table."""
    a = np.arange(n)
    return (a[:, None, None] * a[None, :, None] * a[None, None, :]) % n


def validate_triform(C: AbelianStructure, table: np.ndarray) -> dict:
    """Symmetry and multiplicativity in each slot, exhaustively."""
    e = C.exponent
    T = np.asarray(table, dtype=np.int64) % e
    n = C.order
    add = C.local_of_coords(C.grid[:, None, :] + C.grid[None, :, :])
    sym = all(np.array_equal(T, T.transpose(p)) for p in [(1, 0, 2), (0, 2, 1), (2, 1, 0)])
    # c(x x', y, z) = c(x, y, z) c(x', y, z); the other slots follow by symmetry
    mult = bool(np.array_equal(T[add] % e, (T[:, None] + T[None, :]) % e)) if n ** 4 <= 2_000_000 else None
    return {"symmetric": sym, "trimultiplicative": mult}


@dataclass
class MCC:
    group: FiniteGroup
    C: AbelianStructure
    table: np.ndarray  # c exponents mod e over C^3
    A1: Subgroup
    A2: Subgroup
    beta1: PairingForm
    beta2: PairingForm
    Q: list | None = None

    def element(self, x, y, chi, q: int = 0) -> int:
        n = self.C.order
        return int(((q * n + x) * n + y) * n + chi)

    @property
    def twist1(self) -> FormTwist:
        return twist_from_form(self.A1, self.beta1, ambient=self.group)

    @property
    def twist2(self) -> FormTwist:
        return twist_from_form(self.A2, self.beta2, ambient=self.group)


def _closure_of_matrices(mats, divisors) -> list[np.ndarray]:
    r = len(divisors)
    d = np.asarray(divisors)
    out = [np.eye(r, dtype=np.int64)]
    seen = {out[0].tobytes()}
    frontier = list(out)
    while frontier:
        nxt = []
        for A in frontier:
            for M in mats:
                P = (np.asarray(M) @ A) % d[:, None]
                if P.tobytes() not in seen:
                    seen.add(P.tobytes())
                    out.append(P)
                    nxt.append(P)
        frontier = nxt
    return out


def mcc_group(divisors, table: np.ndarray | None = None, *, Q=None, table_cap: int = 4096) -> MCC:
    """M(C, c) with (x1,y1,chi1)(x2,y2,chi2) = (x1+x2, y1+y2, chi1 chi2 c(x1, y2, -)).

    ``Q`` is an optional list of integer matrices acting on coordinates of C and
    preserving c; the result is then the semidirect product with the group
    they generate, acting by (x, y, chi) -> (q x, q y, chi o q^-1).
    """
    base = abelian_group(divisors)
    C = AbelianStructure(base.whole, tuple(base.generators), tuple(int(d) for d in divisors),
                         np.arange(base.order))
    n, e = C.order, C.exponent
    if table is None and C.rank > 1:
        raise ValueError("the default c = zeta^(xyz) needs a cyclic C; pass a table")
    T = cyclic_triform(n) if table is None else np.asarray(table, dtype=np.int64) % e
    flags = validate_triform(C, T)
    if not flags["symmetric"] or flags["trimultiplicative"] is False:
        raise ValueError(f"c is not a symmetric trimultiplicative map: {flags}")
    E = C.char_table  # E[chi, a]
    row_of = {tuple(int(v) for v in row): i for i, row in enumerate(E)}
    # c(x, y, -) as a character index
    cchar = np.empty((n, n), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            key = tuple(int(v) for v in T[x, y])
            if key not in row_of:
                raise ValueError("c(x, y, -) is not a character")
            cchar[x, y] = row_of[key]
    add = C.local_of_coords(C.grid[:, None, :] + C.grid[None, :, :])
    qs = _closure_of_matrices(Q, divisors) if Q else [np.eye(C.rank, dtype=np.int64)]
    for q in qs:
        qa = C.local_of_coords(C.grid @ q.T)
        if not np.array_equal(T[qa[:, None, None], qa[None, :, None], qa[None, None, :]], T):
            raise ValueError("Q does not preserve c")
    nq = len(qs)
    order = nq * n ** 3
    if order > table_cap:
        raise ValueError(f"M(C,c) has order {order}, above the table cap {table_cap}")
    # action of q on points and on characters (chi o q^-1)
    qpt = np.stack([C.local_of_coords(C.grid @ q.T) for q in qs])
    qchr = np.empty_like(qpt)
    for i in range(nq):
        inv = np.argsort(qpt[i])
        qchr[i] = [row_of[tuple(int(v) for v in E[chi][inv])] for chi in range(n)]
    qkey = {q.tobytes(): i for i, q in enumerate(qs)}
    qmul = np.array([[qkey[((a @ b) % np.asarray(divisors)[:, None]).tobytes()] for b in qs] for a in qs])
    idx = np.arange(order)
    qi, rest = np.divmod(idx, n ** 3)
    x, rest = np.divmod(rest, n * n)
    y, chi = np.divmod(rest, n)
    # (m1, q1)(m2, q2) = (m1 . q1(m2), q1 q2)
    q1, q2 = qi[:, None], qi[None, :]
    x2, y2, c2 = qpt[q1, x[None, :]], qpt[q1, y[None, :]], qchr[q1, chi[None, :]]
    X = add[x[:, None], x2]
    Y = add[y[:, None], y2]
    Ch = add[add[chi[:, None], c2], cchar[x[:, None], y2]]
    Qp = qmul[q1, q2]
    tab = ((Qp * n + X) * n + Y) * n + Ch
    name = "M(C,c)" if nq == 1 else "M(C,c):Q"
    G = table_group(tab, name=name)
    G.spec = f"builtin mcc divisors={','.join(map(str, divisors))}" + (f" q={nq}" if nq > 1 else "")
    zero = 0
    a1 = np.array([((0 * n + xx) * n + zero) * n + cc for xx in range(n) for cc in range(n)])
    a2 = np.array([((0 * n + zero) * n + yy) * n + cc for yy in range(n) for cc in range(n)])
    A1 = Subgroup(G, closure_indices(G, a1))
    A2 = Subgroup(G, closure_indices(G, a2))
    r = C.rank
    gx = [int(((0 * n + int(C.local_of_coords(np.eye(r, dtype=np.int64)[i][None, :])[0])) * n) * n)
          for i in range(r)]
    gy = [int((0 * n) * n + C.local_of_coords(np.eye(r, dtype=np.int64)[i][None, :])[0]) * n for i in range(r)]
    gc = [int(C.local_of_coords(np.eye(r, dtype=np.int64)[i][None, :])[0]) for i in range(r)]
    S1 = AbelianStructure.from_basis(A1, gx + gc, list(divisors) * 2)
    S2 = AbelianStructure.from_basis(A2, gy + gc, list(divisors) * 2)
    # beta((x, chi), (x', chi')) = chi'(x) / chi(x')
    M = np.zeros((2 * r, 2 * r), dtype=np.int64)
    w = C.weights
    for i in range(r):
        M[i, r + i] = w[i] % e
        M[r + i, i] = (-w[i]) % e
    return MCC(G, C, T, A1, A2, PairingForm(S1, M), PairingForm(S2, M.copy()), qs if Q else None)


__all__ = ["MCC", "cyclic_triform", "mcc_group", "validate_triform"]
