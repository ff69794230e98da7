"""Class-preserving automorphisms: conjugators in k[G], symmetric twists and the H^1 detector."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import fourier
from .abelian import AbelianStructure, abelian_invariants
from .algebra import GroupRingElement, NotAUnit, element
from .groups import CapExceeded, FiniteGroup, GroupMorphism, Subgroup
from .hopf import coboundary_of_unit, invariance_check
from .twists import InternalConsistencyError


class NoConjugator(RuntimeError):
    pass


# --- conjugators ----------------------------------------------------------------------


def conjugator_space(phi: GroupMorphism, support: Subgroup | None = None) -> list[np.ndarray]:
    """Basis of {x : phi(g) x = x g for all g}, as member arrays of the orbit indicators.

    The equations only permute coefficients (x(phi(g)^-1 k) = x(k g^-1)), so the
    solution space is spanned by indicators of orbits of k -> phi(g) k g^-1.
    """
    G = phi.source
    n = G.order
    gens = np.asarray(G.generators, dtype=np.int64)
    k = np.arange(n)
    rows = np.concatenate([np.full(n, 0, dtype=np.int64) + k for _ in gens])
    cols = np.concatenate([G.mul(G.mul(phi.images[g], k), G.inv(g)) for g in gens])
    adj = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, labels = connected_components(adj, directed=True, connection="weak")
    orbits = [np.flatnonzero(labels == c) for c in np.unique(labels)]
    if support is not None:
        orbits = [o for o in orbits if support.mask[o].all()]
    return sorted(orbits, key=lambda o: int(o[0]))


def is_conjugator(phi: GroupMorphism, x: GroupRingElement, elements=None) -> bool:
    G = phi.source
    els = range(G.order) if elements is None else elements
    return all(element(G, int(phi.images[g])) * x == x * element(G, int(g)) for g in els)


def find_conjugator(phi: GroupMorphism, *, support: Subgroup | None = None, seed: int = 0,
                    attempts: int = 50) -> GroupRingElement:
    """An invertible x in k[G] with phi(g) = x g x^-1 for every g."""
    G = phi.source
    orbits = conjugator_space(phi, support)
    if not orbits:
        raise NoConjugator("empty solution space")
    rng = np.random.default_rng(seed)
    for t in range(attempts):
        # first try the plain sum of orbit sums, then random small integer weights
        w = np.ones(len(orbits), dtype=np.int64) if t == 0 else rng.integers(1, 8, size=len(orbits))
        keys = np.concatenate(orbits)
        weights = np.concatenate([np.full(len(o), c) for o, c in zip(orbits, w)])
        x = GroupRingElement.from_terms(G, keys, np.zeros(len(keys), np.int64), 1, weights=weights)
        try:
            x.inverse()
        except (NotAUnit, ZeroDivisionError, ArithmeticError):
            continue
        if not is_conjugator(phi, x):
            raise InternalConsistencyError("orbit solution fails the conjugation equation")
        return x
    raise NoConjugator(f"no invertible solution after {attempts} attempts")


def symmetric_twist_of(phi: GroupMorphism | None = None, *, x: GroupRingElement | None = None,
                       seed: int = 0) -> GroupRingElement:
    """(x (x) x) Delta(x)^-1 for a conjugator x of phi, checked invariant and flip-fixed."""
    if x is None:
        x = find_conjugator(phi, seed=seed)
    F = coboundary_of_unit(x)
    if not invariance_check(F):
        raise InternalConsistencyError("coboundary of a conjugator is not invariant")
    if F.flip() != F:
        raise InternalConsistencyError("coboundary of a conjugator is not symmetric")
    return F


def automorphism_from_unit(G: FiniteGroup, x: GroupRingElement) -> GroupMorphism | None:
    """g -> x g x^-1 when this permutes G, else None."""
    xi = x.inverse()
    imgs = np.empty(G.order, dtype=np.int64)
    for g in range(G.order):
        y = x * element(G, g) * xi
        if y.nnz != 1 or y.coefficient(tuple(y.keys[0])) != 1:
            return None
        imgs[g] = y.keys[0, 0]
    return GroupMorphism(G, G, imgs)


# --- H^1 detector ---------------------------------------------------------------------


def _spanning_tree(G: FiniteGroup, gens: np.ndarray) -> list[tuple[np.ndarray, np.ndarray, int]]:
    """BFS steps (nodes, parents, generator index) with nodes = parents * gens[s]."""
    seen = np.zeros(G.order, dtype=bool)
    seen[G.identity] = True
    frontier = np.array([G.identity])
    steps = []
    while frontier.size:
        nxt = []
        for si, s in enumerate(gens):
            h = G.mul(frontier, s)
            new = ~seen[h]
            h_new, first = np.unique(h[new], return_index=True)
            if h_new.size:
                seen[h_new] = True
                steps.append((h_new, frontier[new][first], si))
                nxt.append(h_new)
        frontier = np.concatenate(nxt) if nxt else np.zeros(0, dtype=np.int64)
    if not seen.all():
        raise ValueError("the given elements do not generate G")
    return steps


@dataclass
class _LocalA:
    """A in local indices: addition, negation, conjugation by every g, dual action."""
    S: AbelianStructure
    add: np.ndarray
    neg: np.ndarray
    conj: np.ndarray  # conj[g, a] = local(g a g^-1)
    perms: np.ndarray  # perms[g, chi] = g.chi with (g.chi)(a) = chi(g^-1 a g)

    @classmethod
    def build(cls, G: FiniteGroup, S: AbelianStructure) -> "_LocalA":
        add = S.local_of_coords(S.grid[:, None, :] + S.grid[None, :, :])
        neg = S.local_of_coords(-S.grid)
        allg = np.arange(G.order)
        conj = S.local(G.conj(allg[:, None], S.elements[None, :]))
        E = S.char_table
        e = S.exponent
        gl = S.local(np.asarray(S.generators, dtype=np.int64))
        radix = e ** np.arange(len(gl), dtype=np.int64)
        codes = E[:, gl] @ radix
        order = np.argsort(codes)
        # values of g.chi on the basis: chi(g^-1 b g)
        back = conj[G.inv(allg)][:, gl]  # (|G|, r)
        vals = E[:, back]  # (nA, |G|, r)
        perms = order[np.searchsorted(codes[order], vals @ radix)].T.copy()
        return cls(S, add, neg, conj, perms)


def _extend_cocycles(L: _LocalA, gens: np.ndarray, mul_s: np.ndarray, images: np.ndarray, steps):
    """psi on G (local A indices) from generator images via psi(g s) = psi(g) + g.psi(s), plus a validity flag."""
    m = images.shape[0]
    n = L.conj.shape[0]
    psi = np.zeros((m, n), dtype=np.int64)
    for nodes, parents, si in steps:
        psi[:, nodes] = L.add[psi[:, parents], L.conj[parents[None, :], images[:, si][:, None]]]
    ok = np.ones(m, dtype=bool)
    g = np.arange(n)
    for si in range(len(gens)):
        rhs = L.add[psi, L.conj[g[None, :], images[:, si][:, None]]]
        ok &= np.all(psi[:, mul_s[si]] == rhs, axis=1)
    return psi, ok


@dataclass
class H1Class:
    generator_images: tuple  # psi(s) for each generator s
    psi: np.ndarray  # psi(g) for all g, as elements of G
    is_trivial: bool
    x: GroupRingElement | None = None
    x_exponents: np.ndarray | None = None  # x = sum zeta^k(chi) p_chi
    commutators_ok: bool | None = None
    commutators_checked: int = 0
    twist_invariant: bool | None = None


@dataclass
class H1Result:
    A: Subgroup
    structure: AbelianStructure
    generators: tuple
    cocycles: int  # |Z^1|
    coboundaries: int  # |B^1|
    admissible: int  # cocycles passing the character condition
    classes: list[H1Class] = field(default_factory=list)

    @property
    def h1_order(self) -> int:
        return self.cocycles // self.coboundaries

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def nontrivial(self) -> list[H1Class]:
        return [c for c in self.classes if not c.is_trivial]

    def find(self, psi_on_generators) -> H1Class:
        """The class containing the cocycle with the given generator images."""
        G = self.A.parent
        gens = np.asarray(self.generators)
        B = _coboundary_rows(G, self.structure, gens)
        target = np.asarray(psi_on_generators, dtype=np.int64)
        for c in self.classes:
            if any(np.array_equal(G.mul(np.asarray(c.generator_images), b), target) for b in B):
                return c
        raise KeyError("cocycle not among the admissible classes")


def _coboundary_rows(G: FiniteGroup, S: AbelianStructure, gens: np.ndarray) -> np.ndarray:
    """psi_a(s) = a (s a s^-1)^-1 on generators, one row per a in A (deduplicated)."""
    a = S.elements[:, None]
    rows = G.mul(a, G.inv(G.conj(gens[None, :], a)))
    return np.unique(rows, axis=0)


def _character_condition(L: _LocalA, psi: np.ndarray) -> np.ndarray:
    """chi(psi(s)) = 1 for every chi and every s with s.chi = chi; one flag per row of psi."""
    E = L.S.char_table
    g_idx, chi_idx = np.nonzero(L.perms == np.arange(L.S.order)[None, :])
    return np.all(E[chi_idx[None, :], psi[:, g_idx]] == 0, axis=1)


def reconstruct_x(L: _LocalA, psi: np.ndarray, gens: np.ndarray) -> np.ndarray:
    """Exponents k(chi) with x = sum zeta^k(chi) p_chi and x(g.chi) = x(chi) (g.chi)(psi(g))."""
    S = L.S
    E = S.char_table
    e = S.exponent
    k = np.full(S.order, -1, dtype=np.int64)
    for root in range(S.order):
        if k[root] >= 0:
            continue
        k[root] = 0
        stack = [root]
        while stack:
            chi = stack.pop()
            for s in gens:
                t = int(L.perms[s, chi])
                val = (k[chi] + E[t, psi[s]]) % e
                if k[t] < 0:
                    k[t] = val
                    stack.append(t)
                elif k[t] != val:
                    raise InternalConsistencyError(
                        f"transport along the orbit of character {root} is inconsistent")
    return k


def h1_detector(G: FiniteGroup, A: Subgroup, *, generators=None, cap: int = 10 ** 6,
                chunk: int | None = None, reconstruct: bool = True, exhaustive_below: int = 2048,
                samples: int = 64, seed: int = 0) -> H1Result:
    """Classes of 1-cocycles psi: G -> A with chi(psi(s)) = 1 on stabilizers, modulo coboundaries.

    Convention psi(gh) = psi(g) g psi(h) g^-1, matching psi(g) = x g x^-1 g^-1.  The
    reconstructed x is checked against psi for every g on the character side, and
    in k[G] for every g (or for generators plus a sample above ``exhaustive_below``).
    """
    if not A.is_normal or not A.is_abelian:
        raise ValueError("A must be normal and abelian")
    S = abelian_invariants(A)
    gens = np.asarray(G.generators if generators is None else generators, dtype=np.int64)
    nA = S.order
    total = nA ** len(gens)
    if total > cap:
        raise CapExceeded(f"{total} generator images exceed the cap {cap}")
    steps = _spanning_tree(G, gens)
    L = _LocalA.build(G, S)
    mul_s = np.stack([G.mul(np.arange(G.order), s) for s in gens])
    chunk = chunk or max(1, (1 << 22) // G.order)
    cocycles = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        images = np.stack([(idx // nA ** i) % nA for i in range(len(gens))], axis=1)
        psi, ok = _extend_cocycles(L, gens, mul_s, images, steps)
        cocycles.append(psi[ok])
    Z = np.concatenate(cocycles)
    a = np.arange(nA)[:, None]
    B = np.unique(L.add[a, L.neg[L.conj[gens[None, :], a]]], axis=0)
    adm = Z[_character_condition(L, Z)]
    # canonical representative of psi B^1: lexicographically least generator-image row
    reps: dict[bytes, np.ndarray] = {}
    for row in adm:
        coset = L.add[row[gens][None, :], B]
        key = coset[np.lexsort(coset.T[::-1])[0]].tobytes()
        reps.setdefault(key, row)
    zero = np.zeros(len(gens), dtype=np.int64)
    rng = np.random.default_rng(seed)
    E = S.char_table
    e = S.exponent
    allg = np.arange(G.order)
    classes = []
    for row in reps.values():
        trivial = bool(any(np.array_equal(L.add[row[gens], b], zero) for b in B))
        c = H1Class(tuple(int(v) for v in S.elements[row[gens]]), S.elements[row], trivial)
        if reconstruct:
            k = reconstruct_x(L, row, gens)
            # x(chi) / x(g^-1.chi) = chi(psi(g)) for all g and chi
            back = L.perms[G.inv(allg)]
            if not np.array_equal((k[None, :] - k[back]) % e, E[:, row].T % e):
                raise InternalConsistencyError("reconstructed x fails on the character side")
            c.x_exponents = k
            c.x = fourier.diagonal_element([S], k, e)
            xi = c.x.inverse()
            if G.order <= exhaustive_below:
                check = allg
            else:
                check = np.unique(np.concatenate([gens, rng.integers(G.order, size=samples)]))
            c.commutators_ok = all(
                c.x * element(G, int(g)) * xi * element(G, int(G.inv(int(g)))) == element(G, int(c.psi[g]))
                for g in check)
            c.commutators_checked = len(check)
            if not c.commutators_ok:
                raise InternalConsistencyError("reconstructed x does not realize psi")
            c.twist_invariant = invariance_check(coboundary_of_unit(c.x), G, generators=gens)
        classes.append(c)
    classes.sort(key=lambda c: (not c.is_trivial, c.generator_images))
    return H1Result(A, S, tuple(int(g) for g in gens), len(Z), len(B), len(adm), classes)


def h1_brute_force(G: FiniteGroup, A: Subgroup, *, generators=None, character_condition: bool = True) -> dict:
    """Independent count: generator images define a cocycle iff <(psi(s), s)> in A x| G has order |G|."""
    S = abelian_invariants(A)
    gens = [int(g) for g in (G.generators if generators is None else generators)]
    members = [int(a) for a in S.elements]
    perms = np.stack([S.dual_permutation(g) for g in range(G.order)])
    E = S.char_table

    def mul(p, q):
        (a, g), (b, h) = p, q
        return int(G.mul(a, G.conj(g, b))), int(G.mul(g, h))

    good = 0
    for imgs in itertools.product(members, repeat=len(gens)):
        gs = [(a, s) for a, s in zip(imgs, gens)]
        seen = {(G.identity, G.identity)}
        frontier = list(seen)
        graph: dict[int, int] = {G.identity: G.identity}
        bad = False
        while frontier and not bad:
            nxt = []
            for p in frontier:
                for q in gs:
                    r = mul(p, q)
                    if r in seen:
                        continue
                    if r[1] in graph:
                        bad = True
                        break
                    seen.add(r)
                    graph[r[1]] = r[0]
                    nxt.append(r)
                if bad:
                    break
            frontier = nxt
        if bad or len(graph) != G.order:
            continue
        if character_condition:
            ok = all(E[chi, S.local(graph[g])] == 0
                     for g in range(G.order) for chi in range(S.order) if perms[g][chi] == chi)
            if not ok:
                continue
        good += 1
    cob = {tuple(int(G.mul(a, G.inv(G.conj(s, a)))) for s in gens) for a in members}
    return {"cocycles": good, "coboundaries": len(cob), "classes": good // len(cob)}


__all__ = [
    "H1Class",
    "H1Result",
    "NoConjugator",
    "automorphism_from_unit",
    "conjugator_space",
    "find_conjugator",
    "h1_brute_force",
    "h1_detector",
    "is_conjugator",
    "reconstruct_x",
    "symmetric_twist_of",
]
