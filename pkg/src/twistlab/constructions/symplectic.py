"""Affine symplectic groups over F_2, the metaplectic lift and the quadratic example."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .. import fourier
from ..abelian import (
    AbelianStructure,
    PairingForm,
    trivialize_symmetric_cocycle,
)
from ..algebra import GroupRingElement
from ..groups import FiniteGroup, MulRule, Subgroup, matrix_group
from ..linalg import solve_mod_p
from ..twists import InternalConsistencyError, TwistedHomomorphism, idempotent_twist


def standard_symplectic(n: int) -> np.ndarray:
    """J with (x, y) = sum x_2i y_2i+1 + x_2i+1 y_2i over F_2."""
    J = np.zeros((n, n), dtype=np.int64)
    for i in range(0, n, 2):
        J[i, i + 1] = J[i + 1, i] = 1
    return J


def transvection(v, J) -> np.ndarray:
    """tau_v(u) = u + (v, u) v."""
    v = np.asarray(v, dtype=np.int64)
    return (np.eye(len(v), dtype=np.int64) + np.outer(v, v @ J)) % 2


def _vectors(n: int) -> np.ndarray:
    return np.array(list(itertools.product([0, 1], repeat=n)), dtype=np.int64)[:, ::-1]


@dataclass
class ASp:
    group: FiniteGroup
    n: int
    J: np.ndarray
    m: np.ndarray  # m(x, y) - m(y, x) = (x, y)
    A: Subgroup  # translations, the copy of V*
    structure: AbelianStructure
    beta: PairingForm  # (-1)^m on A

    def linear_part(self, g) -> np.ndarray:
        n = self.n
        M = self.group.codes[np.asarray(g)].reshape(np.shape(g) + (n + 1, n + 1))
        return M[..., :n, :n]

    def translation(self, a) -> int:
        n = self.n
        M = np.eye(n + 1, dtype=np.int64)
        M[:n, n] = np.asarray(a) % 2
        return self.group.element(M.ravel())

    def affine(self, g, a=None) -> int:
        n = self.n
        M = np.eye(n + 1, dtype=np.int64)
        M[:n, :n] = np.asarray(g) % 2
        if a is not None:
            M[:n, n] = np.asarray(a) % 2
        return self.group.element(M.ravel())

    @property
    def transvection_generators(self) -> list[int]:
        return [self.affine(transvection(v, self.J)) for v in _vectors(self.n)[1:]]

    @property
    def dual_beta(self) -> PairingForm:
        """The same exponent matrix read as a form on the character group."""
        return PairingForm(self.structure.dual, self.m.copy())


def asp(n: int, *, closure_cap: int = 20_000, materialize_below: int = 512) -> ASp:
    """ASp(n, 2) = Sp(n, 2) acting on column vectors, as (n+1)x(n+1) affine matrices."""
    if n % 2 or n < 2 or n > 4:
        raise ValueError("asp needs n in {2, 4}")
    J = standard_symplectic(n)
    gens = []
    for v in _vectors(n)[1:]:
        M = np.eye(n + 1, dtype=np.int64)
        M[:n, :n] = transvection(v, J)
        gens.append(M)
    for i in range(n):
        M = np.eye(n + 1, dtype=np.int64)
        M[i, n] = 1
        gens.append(M)
    G = matrix_group(gens, 2, cap=closure_cap, name=f"ASp({n},2)", spec=f"builtin asp n={n}",
                     materialize_below=materialize_below)
    codes = G.codes.reshape(-1, n + 1, n + 1)
    lin = codes[:, :n, :n]
    is_trans = np.all(lin.reshape(len(codes), -1) == np.eye(n, dtype=np.int64).ravel(), axis=1)
    A = Subgroup(G, np.flatnonzero(is_trans))
    basis = []
    for i in range(n):
        M = np.eye(n + 1, dtype=np.int64)
        M[i, n] = 1
        basis.append(G.element(M.ravel()))
    S = AbelianStructure.from_basis(A, basis, [2] * n)
    m = np.zeros((n, n), dtype=np.int64)
    for i in range(0, n, 2):
        m[i, i + 1] = 1
    return ASp(G, n, J, m, A, S, PairingForm(S, m))


# --- metaplectic lift ---------------------------------------------------------------


class _LiftRule(MulRule):
    """Elements of tilde G / K, coded by (coset representative r, a in A) -> r * |A| + a."""

    def __init__(self, lift: "MetaplecticLift"):
        self.lift = lift
        self.width = 1
        self.radix = lift.order

    def mul(self, x, y):
        return self.lift._mul_codes(x[..., 0], y[..., 0])[..., None]

    def identity(self):
        return np.array([self.lift._identity_code()], dtype=np.int64)

    def label(self, code):
        return self.lift.label_code(int(np.asarray(code).ravel()[0]))

    def key(self):
        return f"lift{self.lift.base.spec}|{self.lift.beta.serialize()}"


@dataclass
class MetaplecticLift:
    base: FiniteGroup
    structure: AbelianStructure
    beta: PairingForm  # on the character group of A
    modulus: int
    reps: np.ndarray  # coset representatives of G/A (least element of each coset)
    rep_of: np.ndarray  # g -> index of its representative
    perms: np.ndarray  # per representative: chi -> r.chi
    inv_perms: np.ndarray
    c_rep: np.ndarray  # per representative: exponents of c_r mod modulus
    ev: np.ndarray  # a local -> exponents of chi -> chi(a) mod modulus
    group: FiniteGroup | None = None
    symmetric_witness: tuple | None = None
    info: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.reps) * self.structure.order

    def _identity_code(self) -> int:
        G = self.base
        return self._reduce(np.array([G.identity]), np.zeros((1, self.structure.order), np.int64))[0]

    def _reduce(self, g: np.ndarray, c: np.ndarray) -> np.ndarray:
        """Canonical code of the class of (g, c)."""
        G, S = self.base, self.structure
        ri = self.rep_of[g]
        r = self.reps[ri]
        a0 = G.mul(G.inv(g), r)  # (g, c)(a0, c_a0^-1) = (r, c - ev(a0))
        c = (c - self.ev[S.local(a0)]) % self.modulus
        diff = (c - self.c_rep[ri]) % self.modulus
        a = self._character_point(diff)
        return ri * S.order + a

    def _character_point(self, diff: np.ndarray) -> np.ndarray:
        """a with ev(a) = diff; every row must be an evaluation character."""
        S = self.structure
        M = self.modulus
        gen_loc = S.dual.local_of_coords(np.eye(S.rank, dtype=np.int64)) if S.rank else np.zeros(0, int)
        scale = np.array([M // d for d in S.divisors], dtype=np.int64)
        vals = diff[:, gen_loc]
        if np.any(vals % scale):
            raise InternalConsistencyError("product leaves tilde G")
        a = S.local_of_coords(vals // scale)
        if not np.array_equal(self.ev[a], diff):
            raise InternalConsistencyError("product leaves tilde G")
        return a

    def decode(self, code):
        S = self.structure
        code = np.asarray(code)
        ri, a = np.divmod(code, S.order)
        return self.reps[ri], (self.c_rep[ri] + self.ev[a]) % self.modulus

    def _mul_codes(self, x, y):
        G = self.base
        shape = np.shape(x)
        x, y = np.ravel(x), np.ravel(y)
        g1, c1 = self.decode(x)
        g2, c2 = self.decode(y)
        # c1^g2 (chi) = c1(g2 . chi), the action used in beta_g; g2 and its
        # representative act alike since A acts trivially on its characters
        c1g = np.take_along_axis(c1, self.perms[self.rep_of[g2]], axis=1)
        out = self._reduce(G.mul(g1, g2), (c1g + c2) % self.modulus)
        return out.reshape(shape)

    def label_code(self, code: int) -> str:
        g, c = self.decode(np.array([code]))
        return f"({self.base.label(int(g[0]))},{''.join(str(int(v)) for v in c[0])})"

    def image(self, i: int) -> GroupRingElement:
        """f(g, c) = g sum_chi c(chi) p_chi."""
        code = int(self.group.codes[i, 0])
        g, c = self.decode(np.array([code]))
        x = fourier.diagonal_element([self.structure], c[0], self.modulus)
        gel = GroupRingElement.basis(self.base, [int(g[0])], conductor=x.conductor)
        return gel * x

    def twisted_homomorphism(self) -> TwistedHomomorphism:
        F = idempotent_twist(self.beta, self.structure)
        return TwistedHomomorphism(self.group, self.base, self.image, F)

    def lift_elements(self, gs) -> np.ndarray:
        """Indices in the lift of the classes of (g, c_g)."""
        gs = np.atleast_1d(np.asarray(gs, dtype=np.int64))
        codes = self._reduce(gs, self.c_rep[self.rep_of[gs]])
        return self.group.lookup(codes[:, None])

    def a_copy(self) -> Subgroup:
        """The classes of (a, 1)."""
        G, S = self.base, self.structure
        codes = self._reduce(S.elements, np.zeros((S.order, S.order), np.int64))
        return Subgroup(self.group, self.group.lookup(codes[:, None]))

    def quotient_action_matches(self) -> bool:
        """The action of lift(g) on the A-copy matches conjugation in G, for generators g."""
        G, S, L = self.base, self.structure, self.group
        Acopy = self._reduce(S.elements, np.zeros((S.order, S.order), np.int64))
        Aidx = L.lookup(Acopy[:, None])
        for g in G.generators:
            lg = L.lookup(self._reduce(np.array([g]), self.c_rep[self.rep_of[[g]]])[:, None])[0]
            lhs = L.conj(lg, Aidx)
            want = self._reduce(G.conj(g, S.elements), np.zeros((S.order, S.order), np.int64))
            if not np.array_equal(lhs, L.lookup(want[:, None])):
                return False
        return True


def metaplectic_lift(G: FiniteGroup, structure: AbelianStructure, beta: PairingForm, *,
                     materialize_below: int = 512) -> MetaplecticLift:
    """overline G = tilde G / K for a form beta on the dual of a normal abelian A.

    Each beta_g(chi, xi) = beta(g chi, g xi) / beta(chi, xi) must be symmetric;
    c_g is a solution of beta_g = c(chi) c(xi) / c(chi xi), and every element of
    tilde G over g is c_g times an evaluation character.
    """
    S = structure
    D = S.dual
    if beta.structure.divisors != D.divisors:
        raise ValueError("beta must live on the character group of A")
    if not S.subgroup.is_normal:
        raise ValueError("A must be normal")
    nA = S.order
    e = beta.exponent
    cosets = G.mul(np.arange(G.order)[:, None], S.elements[None, :])
    least = cosets.min(axis=1)
    reps, rep_of = np.unique(least, return_inverse=True)
    base_table = beta.table % e
    perms, tables = [], []
    witness = None
    for r in reps:
        p = S.dual_permutation(int(r))
        perms.append(p)
        bg = (base_table[p[:, None], p[None, :]] - base_table) % e
        if witness is None and np.any((bg - bg.T) % e):
            i, j = np.argwhere((bg - bg.T) % e)[0]
            witness = (int(r), tuple(int(v) for v in D.grid[i]), tuple(int(v) for v in D.grid[j]))
        tables.append(bg)
    if witness is not None:
        raise ValueError(f"beta_g is not symmetric: g={G.label(witness[0])}, chi={witness[1]}, xi={witness[2]}")
    sols = []
    for bg in tables:
        # beta_g = c(chi) + c(xi) - c(chi xi)  <=>  c(chi xi) = -beta_g + c(chi) + c(xi)
        sols.append(trivialize_symmetric_cocycle(D.divisors, (-bg) % e, e))
    M = math.lcm(e, S.exponent, *[s.modulus for s in sols])
    c_rep = np.stack([(s.u * (M // s.modulus)) % M for s in sols])
    perms = np.stack(perms)
    inv_perms = np.argsort(perms, axis=1)
    ev = (S.char_table.T * (M // S.exponent)) % M  # ev[a, chi] = chi(a)
    lift = MetaplecticLift(G, S, beta, M, reps, rep_of, perms, inv_perms, c_rep, ev)
    rule = _LiftRule(lift)
    codes = np.arange(lift.order, dtype=np.int64)[:, None]
    gen_codes = [lift._reduce(np.array([g]), c_rep[rep_of[[g]]])[0] for g in G.generators]
    Lg = FiniteGroup(lift.order, codes=codes, rule=rule, name=f"lift({G.name})",
                     spec=f"lift {G.spec}", generators=gen_codes)
    if Lg.order <= materialize_below:
        Lg = Lg.materialize(materialize_below)
    lift.group = Lg
    lift.info = {"modulus": M, "coset_reps": len(reps)}
    return lift


def _bounded_closure(H: FiniteGroup, gens, cap: int) -> int | None:
    seen = np.array([H.identity])
    frontier = seen
    g = np.asarray(gens, dtype=np.int64)
    while frontier.size:
        new = np.unique(H.mul(frontier[:, None], g[None, :]))
        frontier = np.setdiff1d(new, seen)
        seen = np.union1d(seen, frontier)
        if seen.size > cap:
            return None
    return int(seen.size)


def quotient_generators(H: FiniteGroup, N: np.ndarray, *, count: int = 2, seed: int = 0,
                        attempts: int = 2000) -> list[int]:
    """A few elements generating H modulo the normal subgroup N (random search)."""
    from ..groups import closure_indices

    target = H.order // len(N)
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        g = [int(v) for v in rng.integers(H.order, size=count)]
        if len(closure_indices(H, g + [int(a) for a in N])) == H.order:
            return g
    raise RuntimeError(f"no {count} elements generate the quotient of order {target}")


def has_complement(H: FiniteGroup, N: np.ndarray, quotient_gens) -> bool:
    """Does some choice of lifts (within the N-cosets) generate a complement to N?"""
    N = np.asarray(N, dtype=np.int64)
    target = H.order // len(N)
    for combo in itertools.product(range(len(N)), repeat=len(quotient_gens)):
        lifts = [int(H.mul(g, N[k])) for g, k in zip(quotient_gens, combo)]
        if _bounded_closure(H, lifts, target) == target:
            return True
    return False


# --- quadratic example --------------------------------------------------------------------


@dataclass
class QuadraticExample:
    asp: ASp
    b: np.ndarray  # the symplectic form on V (character coordinates)
    q: np.ndarray  # q(v) for v in local order of the character group
    x: GroupRingElement
    psi: np.ndarray  # g -> element of A
    coboundary_feasible: bool

    def psi_values(self, g: int) -> np.ndarray:
        """v -> psi(g)(v) = q(v) - q(g v) over F_2, where g v = v o Ad_g so that psi(g) = [x, g]."""
        S = self.asp.structure
        p = S.dual_permutation(int(self.asp.group.inv(int(g))))
        return (self.q - self.q[p]) % 2


def quadratic_form_values(structure: AbelianStructure) -> np.ndarray:
    """q(u, l) = l(u) with V = U + U* interleaved: q(v) = sum v_2i v_2i+1."""
    V = structure.dual.grid
    return (V[:, 0::2] * V[:, 1::2]).sum(axis=1) % 2


def transvection_identity_holds(n: int) -> bool:
    """q(tau_(u,l)(v,m)) - q(v,m) = (m(u) + l(v))(l(u) + 1) for all (u,l), (v,m)."""
    J = standard_symplectic(n)
    V = _vectors(n)

    def q(v):
        return int((v[0::2] * v[1::2]).sum() % 2)

    for w in V:
        u, lw = w[0::2], w[1::2]
        T = transvection(w, J)
        for z in V:
            v, mz = z[0::2], z[1::2]
            lhs = (q(T @ z % 2) - q(z)) % 2
            rhs = ((int(mz @ u) + int(lw @ v)) * (int(lw @ u) + 1)) % 2
            if lhs != rhs:
                return False
    return True


def quadratic_example(n: int, G: ASp | None = None) -> QuadraticExample:
    """x = sum (-1)^q(v) p_v in k[V*] and its cocycle psi(g) = [x, g]."""
    Ga = G or asp(n)
    S = Ga.structure
    grp = Ga.group
    q = quadratic_form_values(S)
    x = fourier.diagonal_element([S], q, 2)
    # psi(g) as an element of A: the point a with chi_v(a) = q(v) - q(g v)
    psi = np.empty(grp.order, dtype=np.int64)
    D = S.dual
    gen_loc = D.local_of_coords(np.eye(S.rank, dtype=np.int64))
    for g in range(grp.order):
        vals = (q - q[S.dual_permutation(int(grp.inv(g)))]) % 2
        a_local = S.local_of_coords(vals[gen_loc][None, :])[0]
        if not np.array_equal(S.char_table[:, a_local] % 2, vals):
            raise InternalConsistencyError("psi(g) is not linear")
        psi[g] = S.elements[a_local]
    feasible = coboundary_feasible(Ga, q)
    return QuadraticExample(Ga, Ga.J.copy(), q, x, psi, feasible)


def coboundary_feasible(G: ASp, q: np.ndarray) -> bool:
    """Is there l in V* with l(v) - l(g v) = q(v) - q(g v) for all generators g?

    Unknowns are the coordinates of l; one equation per (generator, basis vector v).
    """
    S = G.structure
    D = S.dual
    n = S.rank
    rows, rhs = [], []
    for g in G.group.generators:
        p = S.dual_permutation(int(G.group.inv(int(g))))
        for i in range(n):
            v = np.eye(n, dtype=np.int64)[i]
            vi = int(D.local_of_coords(v[None, :])[0])
            gv = D.grid[p[vi]]
            rows.append((v - gv) % 2)
            rhs.append((q[vi] - q[p[vi]]) % 2)
    return solve_mod_p(np.array(rows), np.array(rhs), 2) is not None


__all__ = [
    "ASp",
    "MetaplecticLift",
    "QuadraticExample",
    "asp",
    "coboundary_feasible",
    "has_complement",
    "quotient_generators",
    "metaplectic_lift",
    "quadratic_example",
    "quadratic_form_values",
    "standard_symplectic",
    "transvection",
    "transvection_identity_holds",
]
