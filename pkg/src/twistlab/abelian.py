"""Finite abelian groups, characters and bimultiplicative forms.

A structure fixes generators g_1..g_r of orders d_1..d_r, so every element
has a coordinate vector.  Characters are exponent vectors k with
chi_k(a) = zeta_e^(sum k_i a_i e/d_i).  Forms store beta(g_i, g_j) =
zeta_e^(m_ij); all values are handled as exponents modulo e.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .cyclotomic import CyclotomicNumber, root_of_unity
from .groups import FiniteGroup, Subgroup, abelian_group, closure_indices

DEFAULT_ENUM_CAP = 10_000


class DegenerateForm(ValueError):
    pass


class ExtensionObstruction(ValueError):
    pass


class NotLagrangian(ValueError):
    pass


# --- structure ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AbelianStructure:
    """Coordinates on an abelian subgroup from a chosen basis."""

    subgroup: Subgroup
    generators: tuple
    divisors: tuple
    elements: np.ndarray = field(repr=False)  # local index -> parent element

    @classmethod
    def from_basis(cls, subgroup: Subgroup, generators: Sequence[int], divisors: Sequence[int]) -> "AbelianStructure":
        G = subgroup.parent
        gens = [int(g) for g in generators]
        divs = [int(d) for d in divisors]
        n = math.prod(divs)
        grid = np.indices(divs).reshape(len(divs), -1).T if divs else np.zeros((1, 0), dtype=np.int64)
        elems = np.full(len(grid), G.identity, dtype=np.int64)
        for i, g in enumerate(gens):
            elems = G.mul(elems, G.power(np.full(len(grid), g), grid[:, i]))
        if len(np.unique(elems)) != n or n != subgroup.order or not subgroup.mask[elems].all():
            raise ValueError("generators do not form a basis of the subgroup")
        return cls(subgroup, tuple(gens), tuple(divs), elems)

    @property
    def parent(self) -> FiniteGroup:
        return self.subgroup.parent

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.divisors) if self.divisors else 1

    @cached_property
    def grid(self) -> np.ndarray:
        """(order, rank) coordinates in local-index order."""
        if not self.divisors:
            return np.zeros((1, 0), dtype=np.int64)
        return np.indices(self.divisors).reshape(self.rank, -1).T.astype(np.int64)

    @cached_property
    def _local_of(self) -> np.ndarray:
        m = np.full(self.parent.order, -1, dtype=np.int64)
        m[self.elements] = np.arange(self.order)
        return m

    def local(self, elems) -> np.ndarray:
        out = self._local_of[np.asarray(elems)]
        if np.any(out < 0):
            raise ValueError("element outside the abelian subgroup")
        return out

    def coords(self, elems) -> np.ndarray:
        return self.grid[self.local(elems)]

    def local_of_coords(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64) % np.asarray(self.divisors, dtype=np.int64)
        if not self.divisors:
            return np.zeros(coords.shape[:-1], dtype=np.int64)
        return np.ravel_multi_index(tuple(np.moveaxis(coords, -1, 0)), self.divisors)

    def element(self, coords) -> np.ndarray:
        return self.elements[self.local_of_coords(coords)]

    @cached_property
    def weights(self) -> np.ndarray:
        """e / d_i, the exponent scale of each coordinate."""
        return np.array([self.exponent // d for d in self.divisors], dtype=np.int64)

    # characters
    def char_exponents(self, k, coords) -> np.ndarray:
        """Exponent (mod e) of chi_k at the given coordinates; broadcasts."""
        k = np.asarray(k, dtype=np.int64)
        coords = np.asarray(coords, dtype=np.int64)
        if k.ndim == 1:
            return (coords * (k * self.weights)).sum(-1) % self.exponent
        return (k[..., None, :] * self.weights * coords[None, ...]).sum(-1) % self.exponent

    @cached_property
    def char_table(self) -> np.ndarray:
        """E[chi, a] in local indices, exponents mod e."""
        g = self.grid
        return ((g * self.weights) @ g.T) % self.exponent

    def character(self, k) -> "Character":
        return Character(self, tuple(int(v) % d for v, d in zip(k, self.divisors)))

    def characters(self) -> list["Character"]:
        return [Character(self, tuple(int(v) for v in row)) for row in self.grid]

    @cached_property
    def dual(self) -> "AbelianStructure":
        """The character group, realised as an abelian group with the same divisors."""
        D = abelian_group(self.divisors, name="dual")
        gens = [int(D.element(np.eye(self.rank, dtype=np.int64)[i])) for i in range(self.rank)]
        return AbelianStructure(D.whole, tuple(gens), self.divisors, np.arange(D.order))

    # actions
    def conjugation_matrix(self, g: int) -> np.ndarray:
        """P with coords(g a g^-1) = P @ coords(a) (mod divisors)."""
        G = self.parent
        imgs = G.conj(g, np.asarray(self.generators, dtype=np.int64))
        return self.coords(imgs).T.copy() if self.rank else np.zeros((0, 0), dtype=np.int64)

    def dual_action_matrix(self, g: int) -> np.ndarray:
        """D with k(g.chi) = D @ k(chi), where (g.chi)(a) = chi(g^-1 a g)."""
        G = self.parent
        P = self.conjugation_matrix(int(G.inv(g)))
        e = self.exponent
        w = self.weights
        D = np.zeros((self.rank, self.rank), dtype=np.int64)
        for i in range(self.rank):
            # value of g.chi_{e_i} on generator j: chi_{e_i}(P[:, j]) = P_ij * w_i
            for j in range(self.rank):
                v = (P[i, j] * w[i]) % e
                D[j, i] = (v // w[j]) % self.divisors[j]
        return D

    def dual_permutation(self, g: int) -> np.ndarray:
        """Local-index permutation chi -> g.chi of the character group."""
        D = self.dual_action_matrix(g)
        return self.local_of_coords(self.grid @ D.T)


def abelian_invariants(S: Subgroup) -> AbelianStructure:
    """Basis by repeatedly splitting off a maximal-order element modulo the span so far."""
    if not S.is_abelian:
        raise ValueError("subgroup is not abelian")
    G = S.parent
    members = S.members
    gens: list[int] = []
    divs: list[int] = []
    inside = np.zeros(G.order, dtype=bool)
    inside[G.identity] = True
    while not inside[members].all():
        # order of each member modulo the current span
        ords = np.zeros(len(members), dtype=np.int64)
        cur = members.copy()
        k = 1
        todo = np.arange(len(members))
        while todo.size:
            hit = inside[cur]
            ords[todo[hit]] = k
            todo, cur = todo[~hit], cur[~hit]
            if todo.size:
                cur = G.mul(cur, members[todo])
                k += 1
        kmax = int(ords.max())
        x = int(members[np.flatnonzero(ords == kmax)[0]])
        span = np.flatnonzero(inside)
        coset = np.sort(G.mul(x, span))
        good = coset[G.element_orders[coset] == kmax]
        if good.size == 0:
            raise ArithmeticError("splitting failed; group law inconsistent")
        y = int(good[0])
        gens.append(y)
        divs.append(kmax)
        inside[:] = False
        inside[closure_indices(G, gens)] = True
    # normalise to ascending divisors d_1 | d_2 | ...
    order = sorted(range(len(gens)), key=lambda i: (divs[i], gens[i]))
    gens = [gens[i] for i in order]
    divs = [divs[i] for i in order]
    return AbelianStructure.from_basis(S, gens, divs)


@dataclass(frozen=True, eq=False)
class Character:
    structure: AbelianStructure
    exponents: tuple

    def exponent_at(self, elems) -> np.ndarray:
        return self.structure.char_exponents(np.asarray(self.exponents), self.structure.coords(elems))

    def __call__(self, elem: int) -> CyclotomicNumber:
        return root_of_unity(self.structure.exponent, int(self.exponent_at(np.array([elem]))[0]))

    @property
    def local_index(self) -> int:
        return int(self.structure.local_of_coords(np.asarray(self.exponents)))

    def __eq__(self, other):
        return isinstance(other, Character) and other.structure is self.structure and other.exponents == self.exponents

    def __hash__(self):
        return hash((id(self.structure), self.exponents))


# --- forms ---------------------------------------------------------------------


def _entry_step(structure: AbelianStructure, i: int, j: int) -> int:
    """Admissible m_ij are multiples of e / gcd(d_i, d_j)."""
    return structure.exponent // math.gcd(structure.divisors[i], structure.divisors[j])


@dataclass(frozen=True, eq=False)
class PairingForm:
    """beta(g_i, g_j) = zeta_e^(m_ij) on an abelian structure."""

    structure: AbelianStructure
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int64).reshape(self.structure.rank, self.structure.rank)
        m = m % max(self.structure.exponent, 1)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if not self.well_defined():
            raise ValueError("form is not well defined on the given divisors")

    @property
    def exponent(self) -> int:
        return self.structure.exponent

    def well_defined(self) -> bool:
        S = self.structure
        for i in range(S.rank):
            for j in range(S.rank):
                if self.matrix[i, j] % _entry_step(S, i, j):
                    return False
        return True

    def exps(self, a_coords, b_coords) -> np.ndarray:
        """Exponent of beta(a, b) from coordinate arrays; broadcasts over leading axes."""
        a = np.asarray(a_coords, dtype=np.int64)
        b = np.asarray(b_coords, dtype=np.int64)
        return np.einsum("...i,ij,...j->...", a, self.matrix, b) % self.exponent

    @cached_property
    def table(self) -> np.ndarray:
        """Full exponent table in local indices."""
        g = self.structure.grid
        return (g @ self.matrix @ g.T) % self.exponent

    def value(self, a: int, b: int) -> CyclotomicNumber:
        S = self.structure
        return root_of_unity(self.exponent, int(self.exps(S.coords(a), S.coords(b))))

    def transpose(self) -> "PairingForm":
        return PairingForm(self.structure, self.matrix.T)

    def power(self, k: int) -> "PairingForm":
        return PairingForm(self.structure, self.matrix * k)

    def inverse(self) -> "PairingForm":
        return self.power(-1)

    def times(self, other: "PairingForm") -> "PairingForm":
        if other.structure is not self.structure:
            raise ValueError("forms live on different structures")
        return PairingForm(self.structure, self.matrix + other.matrix)

    def __eq__(self, other):
        return (isinstance(other, PairingForm) and other.structure is self.structure
                and np.array_equal(other.matrix, self.matrix))

    def __hash__(self):
        return hash((id(self.structure), self.matrix.tobytes()))

    def serialize(self) -> str:
        divs = ",".join(str(d) for d in self.structure.divisors)
        rows = ",".join("[" + ",".join(str(int(v)) for v in r) + "]" for r in self.matrix)
        return f"form[{divs}][{rows}]"

    def is_trivial(self) -> bool:
        return not self.matrix.any()


def trivial_form(structure: AbelianStructure) -> PairingForm:
    return PairingForm(structure, np.zeros((structure.rank, structure.rank), dtype=np.int64))


@dataclass(frozen=True)
class FormFlags:
    bimultiplicative: bool
    alternating: bool
    skew_symmetric: bool
    nondegenerate: bool
    invariant: bool | None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("bimultiplicative", "alternating", "skew_symmetric", "nondegenerate", "invariant")}


def is_alternating(beta: PairingForm) -> bool:
    M = beta.matrix
    e = beta.exponent
    return bool(np.all(np.diag(M) % e == 0) and np.all((M + M.T) % e == 0))


def is_skew_symmetric(beta: PairingForm) -> bool:
    M = beta.matrix
    return bool(np.all((M + M.T) % beta.exponent == 0))


def left_kernel(beta: PairingForm) -> np.ndarray:
    """Local indices x with beta(x, -) trivial."""
    S = beta.structure
    vals = (S.grid @ beta.matrix) % beta.exponent  # beta(x, g_j)
    return np.flatnonzero(~vals.any(axis=1)) if S.rank else np.array([0])


def is_nondegenerate(beta: PairingForm) -> bool:
    return len(left_kernel(beta)) == 1


def _action_matrices(beta: PairingForm, ambient) -> list[np.ndarray]:
    S = beta.structure
    if ambient is None:
        return []
    if isinstance(ambient, FiniteGroup):
        if S.parent is not ambient:
            raise ValueError("ambient group must be the parent of the structure")
        return [S.conjugation_matrix(g) for g in ambient.generators]
    return [np.asarray(P, dtype=np.int64) for P in ambient]


def is_invariant(beta: PairingForm, ambient) -> bool:
    """beta(g a g^-1, g b g^-1) = beta(a, b) on generator pairs, for each acting matrix."""
    M = beta.matrix
    e = beta.exponent
    for P in _action_matrices(beta, ambient):
        if np.any((P.T @ M @ P - M) % e):
            return False
    return True


def validate_form(beta: PairingForm, ambient=None) -> FormFlags:
    """``ambient`` is a FiniteGroup (conjugation) or a list of coordinate action matrices."""
    return FormFlags(
        bimultiplicative=beta.well_defined(),
        alternating=is_alternating(beta),
        skew_symmetric=is_skew_symmetric(beta),
        nondegenerate=is_nondegenerate(beta),
        invariant=None if ambient is None else is_invariant(beta, ambient),
    )


def form_from_table(structure: AbelianStructure, table: np.ndarray, modulus: int) -> PairingForm:
    """Read a bimultiplicative form off a full exponent table (values zeta_modulus^t)."""
    e = structure.exponent
    gl = structure.local(np.asarray(structure.generators, dtype=np.int64)) if structure.rank else np.zeros(0, int)
    sub = np.asarray(table)[np.ix_(gl, gl)] % modulus
    scaled = sub * e
    if np.any(scaled % modulus):
        raise ValueError("table values are not e-th roots of unity")
    beta = PairingForm(structure, scaled // modulus)
    if not np.array_equal((beta.table * modulus) % (e * modulus), (np.asarray(table) % modulus) * e):
        raise ValueError("table is not bimultiplicative")
    return beta


def alternation(beta) -> PairingForm:
    """Alt(beta)(s, t) = beta(s, t) beta(t, s)^-1.

    ``beta`` is a PairingForm or a tuple (structure, exponent table, modulus)
    describing a 2-cocycle on the structure.
    """
    if isinstance(beta, PairingForm):
        return PairingForm(beta.structure, beta.matrix - beta.matrix.T)
    structure, table, modulus = beta
    table = np.asarray(table) % modulus
    return form_from_table(structure, (table - table.T) % modulus, modulus)


def alt_inverse_odd(alpha: PairingForm) -> PairingForm:
    """beta = alpha^((e+1)/2), so Alt(beta) = alpha when alpha is alternating of odd exponent."""
    e = alpha.exponent
    if e % 2 == 0:
        raise ValueError("alt_inverse_odd needs odd exponent")
    return alpha.power((e + 1) // 2)


def _solve_left(beta: PairingForm, targets: np.ndarray) -> np.ndarray:
    """For each target character exponent row, the local index x with beta(x, -) = chi."""
    S = beta.structure
    vals = (S.grid @ beta.matrix) % beta.exponent  # beta(x, g_j) exponents
    # chi_k(g_j) exponent = k_j * e / d_j
    want = (np.asarray(targets, dtype=np.int64) * S.weights) % beta.exponent
    keys_x = S.local_of_coords((vals // S.weights) % np.asarray(S.divisors)) if S.rank else np.zeros(1, int)
    lookup = np.full(S.order, -1, dtype=np.int64)
    lookup[keys_x] = np.arange(S.order)
    k = S.local_of_coords(want // S.weights) if S.rank else np.zeros(len(targets), int)
    out = lookup[k]
    if np.any(out < 0):
        raise DegenerateForm("form is degenerate")
    return out


def adjoint_dual_form(beta: PairingForm) -> PairingForm:
    """b on the dual with b(chi, psi) = psi(x) where beta(x, -) = chi."""
    if not is_nondegenerate(beta):
        raise DegenerateForm("adjoint needs a nondegenerate form")
    S = beta.structure
    D = S.dual
    r = S.rank
    xs = _solve_left(beta, np.eye(r, dtype=np.int64))  # x_i for chi = e_i
    xc = S.grid[xs]  # coords of x_i
    B = (xc * S.weights[None, :]) % S.exponent  # b(chi_i, chi_j) = chi_j(x_i)
    return PairingForm(D, B)


def adjoint_back(b: PairingForm, structure: AbelianStructure) -> PairingForm:
    """Inverse of adjoint_dual_form, identifying the double dual with ``structure``."""
    a = adjoint_dual_form(b)
    return PairingForm(structure, a.matrix)


def presentation_dual_form(beta: PairingForm) -> PairingForm:
    """The b making sum_{chi,psi} b(chi,psi) p_chi (x) p_psi equal the group-sum twist of beta."""
    flipped = PairingForm(beta.structure, -beta.matrix.T)
    return adjoint_dual_form(flipped)


def enumerate_invariant_forms(
    structure: AbelianStructure,
    ambient=None,
    require: Sequence[str] = ("alternating", "nondegenerate"),
    cap: int = DEFAULT_ENUM_CAP,
) -> list[PairingForm]:
    """All forms meeting the flags, in lexicographic matrix order."""
    S = structure
    r = S.rank
    req = set(require)
    skewish = bool(req & {"alternating", "skew_symmetric"})
    slots = []
    for i in range(r):
        for j in range(r):
            if skewish and j < i:
                continue
            if "alternating" in req and i == j:
                continue
            slots.append((i, j))
    sizes = []
    for i, j in slots:
        step = _entry_step(S, i, j)
        n = S.exponent // step
        if skewish and i == j:
            # 2 m_ii = 0 mod e
            n = len([v for v in range(0, S.exponent, step) if (2 * v) % S.exponent == 0])
        sizes.append(n)
    total = math.prod(sizes) if sizes else 1
    if total > cap:
        raise OverflowError(f"{total} candidate forms exceed enumeration cap {cap}")
    actions = _action_matrices(trivial_form(S), ambient) if ambient is not None else []
    out = []
    for combo in itertools.product(*[range(n) for n in sizes]):
        M = np.zeros((r, r), dtype=np.int64)
        for (i, j), c in zip(slots, combo):
            step = _entry_step(S, i, j)
            if skewish and i == j:
                vals = [v for v in range(0, S.exponent, step) if (2 * v) % S.exponent == 0]
                M[i, j] = vals[c]
            else:
                M[i, j] = c * step
                if skewish:
                    M[j, i] = -c * step
        beta = PairingForm(S, M)
        if "alternating" in req and not is_alternating(beta):
            continue
        if "skew_symmetric" in req and not is_skew_symmetric(beta):
            continue
        if "nondegenerate" in req and not is_nondegenerate(beta):
            continue
        if actions and any(np.any((P.T @ beta.matrix @ P - beta.matrix) % S.exponent) for P in actions):
            continue
        out.append(beta)
    return out


# --- orthogonality and Lagrangians ------------------------------------------------


def orthogonal_complement(B: Subgroup, beta: PairingForm) -> Subgroup:
    S = beta.structure
    if not S.subgroup.mask[B.members].all():
        raise ValueError("B is not inside the form's group")
    bg = np.asarray(B.generators, dtype=np.int64)
    if bg.size == 0:
        return S.subgroup
    vals = (S.grid @ beta.matrix @ S.coords(bg).T) % beta.exponent
    keep = ~vals.any(axis=1)
    return Subgroup(S.parent, S.elements[keep])


def is_isotropic(B: Subgroup, beta: PairingForm) -> bool:
    perp = orthogonal_complement(B, beta)
    return bool(perp.mask[B.members].all())


def is_lagrangian(B: Subgroup, beta: PairingForm) -> bool:
    return orthogonal_complement(B, beta) == B


@dataclass
class LagrangianDecomposition:
    B: Subgroup
    B_structure: AbelianStructure
    complement_generators: tuple
    section: np.ndarray  # local index of chi in B-hat -> element of A
    verified: bool

    def element(self, x: int, chi_local: int) -> int:
        return int(self.B.parent.mul(x, self.section[chi_local]))


def lagrangian_decomposition(beta: PairingForm, *, exhaustive_cap: int = 10_000) -> LagrangianDecomposition:
    """Split A = B + s(B-hat) with beta((x,chi),(y,psi)) = chi(y) psi(x)^-1."""
    if not is_alternating(beta) or not is_nondegenerate(beta):
        raise ValueError("lagrangian_decomposition needs an alternating nondegenerate form")
    S = beta.structure
    G = S.parent
    e = beta.exponent
    rem = np.ones(S.order, dtype=bool)  # local mask of the remaining orthogonal piece
    a_list, ap_list, divs = [], [], []
    orders = G.element_orders[S.elements]
    while rem.sum() > 1:
        cand = np.flatnonzero(rem)
        a = int(cand[np.lexsort((cand, -orders[cand]))[0]])
        d = int(orders[a])
        # a' with beta(a', a) of order d
        vals = beta.exps(S.grid[cand], S.grid[a][None, :])
        val_order = e // np.gcd(vals, e)
        hit = cand[val_order == d]
        if hit.size == 0:
            raise ArithmeticError("no partner of full order; form not nondegenerate on the piece")
        ap = int(hit[0])
        t = int(beta.exps(S.grid[ap], S.grid[a]))
        u = (t // (e // d)) % d
        ap_elem = int(G.power(np.array([S.elements[ap]]), np.array([pow(u, -1, d)]))[0])
        a_list.append(int(S.elements[a]))
        ap_list.append(ap_elem)
        divs.append(d)
        # restrict to the orthogonal complement of <a, a'>
        pair = S.coords(np.array([S.elements[a], ap_elem]))
        vals = (S.grid @ beta.matrix @ pair.T) % e
        rem &= ~vals.any(axis=1)
    Bsub = Subgroup(G, closure_indices(G, a_list))
    Bst = AbelianStructure.from_basis(Bsub, a_list, divs)
    # section chi_k -> prod a'_i^k_i
    sec = np.full(Bst.order, G.identity, dtype=np.int64)
    for i, ap in enumerate(ap_list):
        sec = G.mul(sec, G.power(np.full(Bst.order, ap), Bst.grid[:, i]))
    dec = LagrangianDecomposition(Bsub, Bst, tuple(ap_list), sec, False)
    dec.verified = verify_lagrangian_decomposition(beta, dec, cap=exhaustive_cap)
    return dec


def verify_lagrangian_decomposition(beta: PairingForm, dec: LagrangianDecomposition, cap: int = 10_000) -> bool:
    """Check beta(x s(chi), y s(psi)) = chi(y) psi(x)^-1 on all pairs (or generators above cap)."""
    S = beta.structure
    G = S.parent
    Bst = dec.B_structure
    if Bst.order**2 != S.order:
        return False
    nB = Bst.order
    xs = np.repeat(np.arange(nB), nB)
    cs = np.tile(np.arange(nB), nB)
    elems = G.mul(Bst.elements[xs], dec.section[cs])
    if len(np.unique(elems)) != S.order:
        return False
    if S.order > cap:
        idx = np.random.default_rng(0).choice(len(elems), size=2000, replace=False)
    else:
        idx = np.arange(len(elems))
    ca = S.coords(elems[idx])
    lhs = beta.exps(ca[:, None, :], ca[None, :, :])
    eB = Bst.exponent
    x_c, chi_c = Bst.grid[xs[idx]], Bst.grid[cs[idx]]
    # chi(y) psi(x)^-1 in mu_eB, rescaled to mu_e
    chi_y = Bst.char_exponents(chi_c, x_c)  # [i, j] = chi_i(y_j)
    psi_x = chi_y.T
    rhs = ((chi_y - psi_x) % eB) * (beta.exponent // eB)
    return bool(np.array_equal(lhs, rhs % beta.exponent))


@dataclass
class SectionCocycle:
    B_structure: AbelianStructure
    section: np.ndarray  # B-hat local index -> element of A
    gamma: np.ndarray  # (|B|, |B|) -> element of B
    beta_bar: np.ndarray  # (|B|, |B|) exponents mod e
    cocycle_ok: bool

    def is_trivial(self) -> bool:
        return bool(np.all(self.gamma == self.B_structure.parent.identity))


def section_with_cocycle(beta: PairingForm, B: Subgroup) -> SectionCocycle:
    """Greedy set-theoretic section of A -> B-hat, its cocycle Gamma and beta-bar."""
    if not is_lagrangian(B, beta):
        raise NotLagrangian("B is not Lagrangian")
    S = beta.structure
    G = S.parent
    e = beta.exponent
    Bst = abelian_invariants(B)
    eB = Bst.exponent
    # restriction of beta(a, -) to B, as a character exponent row on B's basis
    vals = (S.grid @ beta.matrix @ S.coords(np.asarray(Bst.generators, dtype=np.int64)).T) % e
    # chi_k(b_j) = zeta_eB^(k_j eB/d_j) = zeta_e^(k_j e/d_j)
    wB = np.array([e // d for d in Bst.divisors], dtype=np.int64)
    kvec = (vals // wB) % np.asarray(Bst.divisors) if Bst.rank else np.zeros((S.order, 0), int)
    chi_of = Bst.local_of_coords(kvec) if Bst.rank else np.zeros(S.order, int)
    section = np.full(Bst.order, -1, dtype=np.int64)
    for loc in range(S.order):  # least local index first
        c = chi_of[loc]
        if section[c] < 0:
            section[c] = S.elements[loc]
    section[0] = G.identity
    n = Bst.order
    add = Bst.local_of_coords(Bst.grid[:, None, :] + Bst.grid[None, :, :])
    s1 = section[:, None]
    s2 = section[None, :]
    gamma = G.mul(G.mul(G.inv(s1), G.inv(s2)), section[add])
    if not B.mask[gamma].all():
        raise ArithmeticError("section cocycle leaves B")
    sc = S.coords(section)
    beta_bar = beta.exps(sc[:, None, :], sc[None, :, :])
    # cocycle identity Gamma(x,y)Gamma(xy,z) = Gamma(y,z)Gamma(x,yz)
    ok = True
    if n**3 <= 2_000_000:
        i, j, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        lhs = G.mul(gamma[i, j], gamma[add[i, j], k])
        rhs = G.mul(gamma[j, k], gamma[i, add[j, k]])
        ok = bool(np.array_equal(lhs, rhs))
    return SectionCocycle(Bst, section, gamma, beta_bar, ok)


def splitting_section(beta: PairingForm, B: Subgroup):
    """A homomorphic section of A -> B-hat if one exists, else None."""
    S = beta.structure
    G = S.parent
    Bst = abelian_invariants(B)
    e = beta.exponent
    vals = (S.grid @ beta.matrix @ S.coords(np.asarray(Bst.generators, dtype=np.int64)).T) % e
    wB = np.array([e // d for d in Bst.divisors], dtype=np.int64)
    kvec = (vals // wB) % np.asarray(Bst.divisors)
    images = []
    for i, d in enumerate(Bst.divisors):
        target = np.zeros(Bst.rank, dtype=np.int64)
        target[i] = 1
        fiber = S.elements[np.all(kvec == target, axis=1)]
        ok = fiber[G.element_orders[fiber] <= d]
        ok = ok[d % G.element_orders[ok] == 0]
        if ok.size == 0:
            return None
        images.append(int(ok[0]))
    return images


# --- symmetric cocycles -------------------------------------------------------------


@dataclass
class Trivialization:
    u: np.ndarray  # exponents mod modulus, local indices of D
    modulus: int


def trivialize_symmetric_cocycle(
    divisors: Sequence[int], table: np.ndarray, modulus: int, *, enlarge: bool = True, check: bool = True
) -> Trivialization:
    """Solve u(x+y) = e(x,y) + u(x) + u(y) (exponents mod ``modulus``) on Z/d_1+...+Z/d_r.

    ``table`` is indexed by mixed-radix local indices.  When a d-th root is
    missing in mu_modulus and ``enlarge`` is set, the modulus is multiplied up.
    """
    divs = [int(d) for d in divisors]
    n = math.prod(divs)
    T = np.asarray(table, dtype=np.int64) % modulus
    if T.shape != (n, n):
        raise ValueError("table shape does not match divisors")
    if np.any((T - T.T) % modulus):
        raise ValueError("cocycle is not symmetric")
    grid = np.indices(divs).reshape(len(divs), -1).T if divs else np.zeros((1, 0), int)

    def loc(c):
        return np.ravel_multi_index(tuple(np.moveaxis(np.asarray(c) % divs, -1, 0)), divs) if divs else 0

    add = loc(grid[:, None, :] + grid[None, :, :]) if divs else np.zeros((1, 1), int)
    if check and n**3 <= 4_000_000:
        i, j, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        if np.any((T[i, j] + T[add[i, j], k] - T[j, k] - T[i, add[j, k]]) % modulus):
            raise ValueError("table is not a 2-cocycle")
    M = modulus
    u = np.full(n, -1, dtype=np.int64)
    zero = loc(np.zeros(len(divs), int)) if divs else 0
    u[zero] = (-T[zero, zero]) % M
    known = [zero]
    for gi, d in enumerate(divs):
        delta = np.zeros(len(divs), dtype=np.int64)
        delta[gi] = 1
        dl = int(loc(delta))
        # u(k delta) = k t + S_k
        Sk = [0, 0]
        for k in range(1, d):
            kl = int(loc(delta * k))
            Sk.append((Sk[-1] + T[kl, dl]) % M)
        rhs = (u[zero] - Sk[d]) % M
        g = math.gcd(d, M)
        if rhs % g:
            if not enlarge:
                raise ExtensionObstruction(f"no {d}-th root available in mu_{M}")
            u = np.where(u >= 0, u * d, u)
            T = T * d
            Sk = [s * d for s in Sk]
            M *= d
            rhs = (u[zero] - Sk[d]) % M
            g = math.gcd(d, M)
        t = (rhs // g) * pow(d // g, -1, M // g) % (M // g)
        powers = {0: int(u[zero])}
        for k in range(1, d):
            powers[k] = (k * t + Sk[k]) % M
        # extend: u(x + k delta) = T(x, k delta) + u(x) + u(k delta)
        new_known = []
        for x in known:
            for k in range(1, d):
                kl = int(loc(delta * k))
                y = int(add[x, kl])
                if u[y] < 0:
                    u[y] = (T[x, kl] + u[x] + powers[k]) % M
                    new_known.append(y)
        known = known + new_known
    lhs = u[add] % M
    rhs = (T + u[:, None] + u[None, :]) % M
    if not np.array_equal(lhs, rhs):
        raise ArithmeticError("trivialization failed the defining identity")
    return Trivialization(u % M, M)
