"""Form twists F_(A, beta) and the calculus of invariant twists.

A FormTwist stores the group-sum form: F = 1/|A| sum beta(a1, a2) a1 (x) a2.
The idempotent presentation sum b(chi, psi) p_chi (x) p_psi of the same
element uses b = presentation_dual_form(beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import fourier
from .abelian import (
    AbelianStructure,
    DegenerateForm,
    PairingForm,
    abelian_invariants,
    adjoint_back,
    enumerate_invariant_forms,
    form_from_table,
    is_alternating,
    is_nondegenerate,
    presentation_dual_form,
    section_with_cocycle,
    trivial_form,
    trivialize_symmetric_cocycle,
    validate_form,
)
from .algebra import GroupRingElement, NotAUnit
from .cyclotomic import CyclotomicNumber
from .groups import (
    FiniteGroup,
    Subgroup,
    closure_indices,
    commutator_subgroup,
    enumerate_normal_abelian_subgroups,
)
from .hopf import coboundary_of_unit, invariance_check, support_subgroup


class NotAFormTwist(ValueError):
    pass


class InternalConsistencyError(RuntimeError):
    """A computation contradicts a structural lemma; indicates a bug or bad input."""


class NotSeparable(ValueError):
    pass


# --- building twists -------------------------------------------------------------


def group_sum_twist(beta: PairingForm, conductor: int | None = None) -> GroupRingElement:
    """1/|A| sum_{a1,a2} beta(a1, a2) a1 (x) a2."""
    S = beta.structure
    n = S.order
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    keys = np.stack([S.elements[i.ravel()], S.elements[j.ravel()]], axis=1)
    e = beta.exponent
    N = conductor or e
    return GroupRingElement.from_terms(S.parent, keys, beta.table.ravel(), e, den=n,
                                       conductor=math.lcm(N, e))


def idempotent_twist(b: PairingForm, structure: AbelianStructure) -> GroupRingElement:
    """sum_{chi,psi} b(chi, psi) p_chi (x) p_psi, with b a form on the dual of ``structure``."""
    return fourier.diagonal_element([structure, structure], b.table, b.exponent)


@dataclass(frozen=True, eq=False)
class FormTwist:
    """The twist F_(A, beta) of a bimultiplicative form on an abelian subgroup."""

    ambient: FiniteGroup
    form: PairingForm

    @property
    def structure(self) -> AbelianStructure:
        return self.form.structure

    @property
    def support(self) -> Subgroup:
        return self.form.structure.subgroup

    @cached_property
    def realized(self) -> GroupRingElement:
        return group_sum_twist(self.form)

    @cached_property
    def dual_form(self) -> PairingForm:
        return presentation_dual_form(self.form)

    def realized_idempotent(self) -> GroupRingElement:
        return idempotent_twist(self.dual_form, self.structure)

    def flags(self):
        return validate_form(self.form, self.ambient)

    def power(self, k: int) -> "FormTwist":
        """Twist of the form beta^k (not the k-th power of the element)."""
        return FormTwist(self.ambient, self.form.power(k))

    def is_trivial(self) -> bool:
        return self.support.order == 1

    def serialize(self) -> dict:
        return {
            "group": self.ambient.spec,
            "subgroup": [int(m) for m in self.support.members],
            "form": self.form.serialize(),
        }


def _structure_of(A, G: FiniteGroup | None = None) -> AbelianStructure:
    if isinstance(A, AbelianStructure):
        return A
    if isinstance(A, Subgroup):
        if not A.is_abelian:
            raise ValueError("support subgroup is not abelian")
        return abelian_invariants(A)
    if G is None:
        raise TypeError("need a Subgroup or AbelianStructure")
    return abelian_invariants(Subgroup(G, closure_indices(G, A)))


def twist_from_form(A, beta, *, ambient: FiniteGroup | None = None, presentation: str = "group-sum",
                    check_normal: bool = True) -> FormTwist:
    """F_(A, beta) realised in the requested presentation.

    ``beta`` is a PairingForm on A or an exponent matrix on the generators of
    the structure of A.  Both presentations give the same element.
    """
    if isinstance(beta, PairingForm):
        S = beta.structure
    else:
        S = _structure_of(A, ambient)
        beta = PairingForm(S, np.asarray(beta))
    G = ambient or S.parent
    if not S.subgroup.is_abelian:
        raise ValueError("support subgroup is not abelian")
    if check_normal and not S.subgroup.is_normal:
        raise ValueError("support subgroup is not normal in the ambient group")
    T = FormTwist(G, beta)
    if presentation == "idempotent":
        T.__dict__["realized"] = T.realized_idempotent()
    elif presentation != "group-sum":
        raise ValueError(f"unknown presentation {presentation!r}")
    return T


def trivial_twist(G: FiniteGroup) -> FormTwist:
    return FormTwist(G, trivial_form(abelian_invariants(G.trivial)))


# --- reading forms off twists -----------------------------------------------------


def twist_support(F: GroupRingElement) -> Subgroup:
    return support_subgroup(F)


def dual_table(F: GroupRingElement, S: AbelianStructure) -> fourier.DualArray:
    try:
        return fourier.transform(F, [S, S])
    except ValueError as exc:
        raise NotAFormTwist("twist is not supported on A x A") from exc


def form_from_twist(F: GroupRingElement, A=None) -> PairingForm:
    """The group-sum form beta with F = F_(A, beta)."""
    S = _structure_of(A if A is not None else twist_support(F), F.group)
    Y = dual_table(F, S)
    exps = Y.root_exponents()
    if exps is None:
        raise NotAFormTwist("twist is not diagonal with root-of-unity entries over A")
    try:
        b = form_from_table(S.dual, exps, Y.conductor)
        flipped = adjoint_back(b, S)
    except (ValueError, DegenerateForm) as exc:
        raise NotAFormTwist(str(exc)) from exc
    beta = PairingForm(S, -flipped.matrix.T)
    if group_sum_twist(beta) != F:
        raise NotAFormTwist("round trip through the form failed")
    return beta


def is_antisymmetric(F: GroupRingElement) -> bool:
    """flip(F) F = 1 (x) 1."""
    return (F.flip() * F).is_one()


def is_symmetric(F: GroupRingElement) -> bool:
    return F.flip() == F


# --- square roots and the circ law ------------------------------------------------------


def sqrt_form_twist(T: FormTwist) -> FormTwist:
    """The form twist Y with Y * Y = T.realized, for odd exponent.

    In the group-sum presentation F_gamma * F_gamma = F_(gamma^(1/2)), so the
    root has form beta^2.
    """
    e = T.form.exponent
    if e % 2 == 0:
        raise ValueError("square root needs odd exponent")
    if not is_nondegenerate(T.form):
        raise ValueError("square root needs a nondegenerate form")
    return FormTwist(T.ambient, T.form.power(2))


@dataclass
class CircData:
    twist: FormTwist
    intersection: np.ndarray
    kernel: np.ndarray
    product_order: int
    factorization_samples: int
    flags: object
    pointwise_bimultiplicative: bool


def _form_exps(T: FormTwist, a, b, L: int) -> np.ndarray:
    S = T.structure
    return (T.form.table[S.local(a), S.local(b)] * (L // T.form.exponent)) % L


def circ_data(T1: FormTwist, T2: FormTwist, *, samples: int = 100, seed: int = 0) -> CircData:
    """Support and form of F1 o F2.

    A = ker(pi) inside A1 A2 with pi(a1 a2)(c) = alpha1(a1, c) / alpha2(a2, c)
    for c in K.  Each u in A is written u = u1 u2 with the pair (u1, u2) in
    ker(Pi), Pi being the same formula over all of A1 meet A2; the value
    alpha1(u1, v1) alpha2(u2, v2) is checked to be independent of that choice.
    The returned form is the bimultiplicative form taking these values on a
    basis of A.
    """
    G = T1.ambient
    if G.order % 2 == 0:
        raise ValueError("circ needs an ambient group of odd order")
    for T in (T1, T2):
        if not is_alternating(T.form):
            raise ValueError("circ needs alternating forms")
    A1, A2 = T1.support, T2.support
    L = math.lcm(T1.form.exponent, T2.form.exponent)
    inter = np.flatnonzero(A1.mask & A2.mask)
    ex = _form_exps(T1, inter[:, None], inter[None, :], L) + _form_exps(T2, inter[:, None], inter[None, :], L)
    K = inter[~np.any(ex % L, axis=0)]
    a1, a2 = (m.ravel() for m in np.meshgrid(A1.members, A2.members, indexing="ij"))
    prods = G.mul(a1, a2)
    # pi on K is well defined on A1 A2
    pi = (_form_exps(T1, a1[:, None], K[None, :], L) - _form_exps(T2, a2[:, None], K[None, :], L)) % L
    in_A = ~np.any(pi, axis=1)
    A = np.unique(prods[in_A])
    sub = Subgroup(G, A)
    if not sub.is_closed() or not sub.is_abelian:
        raise InternalConsistencyError("ker(pi) is not an abelian subgroup")
    Pi = (_form_exps(T1, a1[:, None], inter[None, :], L) - _form_exps(T2, a2[:, None], inter[None, :], L)) % L
    valid = np.flatnonzero(~np.any(Pi, axis=1))
    vp = prods[valid]
    order = np.argsort(vp, kind="stable")
    valid, vp = valid[order], vp[order]
    starts = np.searchsorted(vp, A)
    ends = np.searchsorted(vp, A, side="right")
    if not np.array_equal(np.unique(vp), A) or np.any(ends <= starts):
        raise InternalConsistencyError("ker(Pi) does not map onto ker(pi)")
    u1, u2 = a1[valid[starts]], a2[valid[starts]]
    pointwise = (_form_exps(T1, u1[:, None], u1[None, :], L) + _form_exps(T2, u2[:, None], u2[None, :], L)) % L
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        i, j = rng.integers(len(A), size=2)
        fi = valid[rng.integers(starts[i], ends[i])]
        fj = valid[rng.integers(starts[j], ends[j])]
        v = (_form_exps(T1, a1[fi], a1[fj], L) + _form_exps(T2, a2[fi], a2[fj], L)) % L
        if v != pointwise[i, j]:
            raise InternalConsistencyError("alpha depends on the factorisation")
    # alpha is the bimultiplicative form agreeing with the factor formula on a basis of A
    S = abelian_invariants(sub)
    e = S.exponent
    pos = np.searchsorted(A, np.asarray(S.generators, dtype=np.int64))
    gen_vals = pointwise[np.ix_(pos, pos)]
    if np.any((gen_vals * e) % L):
        raise InternalConsistencyError("circ form values leave mu_e")
    alpha = PairingForm(S, gen_vals * e // L)
    loc = S.local(A)
    bimult = bool(np.array_equal((alpha.table[np.ix_(loc, loc)] * (L // e)) % L, pointwise))
    flags = validate_form(alpha, G)
    if not (flags.alternating and flags.nondegenerate and flags.invariant):
        raise InternalConsistencyError(f"circ form flags failed: {flags.as_dict()}")
    return CircData(FormTwist(G, alpha), inter, K, len(np.unique(prods)), samples, flags, bimult)


def circ(T1: FormTwist, T2: FormTwist, *, samples: int = 100, seed: int = 0) -> FormTwist:
    return circ_data(T1, T2, samples=samples, seed=seed).twist


def transported_twist(alpha: PairingForm, k: int) -> GroupRingElement:
    """sum_{u,v} alpha(u, v)^k p_(chi_u) (x) p_(chi_v) with chi_u = alpha(u, -)."""
    S = alpha.structure
    e = alpha.exponent
    gl = S.local(np.asarray(S.generators, dtype=np.int64)) if S.rank else np.zeros(0, int)
    vals = alpha.table[:, gl]  # alpha(u, g_j)
    chars = S.local_of_coords(vals // S.weights) if S.rank else np.zeros(S.order, int)
    if len(np.unique(chars)) != S.order:
        raise DegenerateForm("alpha is degenerate")
    table = np.zeros((S.order, S.order), dtype=np.int64)
    table[np.ix_(chars, chars)] = k * alpha.table
    return fourier.diagonal_element([S, S], table, e)


def diagonal_gauge(Q: GroupRingElement, S: AbelianStructure):
    """u = sum u(chi) p_chi on k[S] with coboundary_of_unit(u) = Q, or None."""
    try:
        Y = fourier.transform(Q, [S, S])
    except ValueError:
        return None
    exps = Y.root_exponents()
    if exps is None:
        return None
    try:
        triv = trivialize_symmetric_cocycle(S.divisors, -exps, Y.conductor)
    except (ValueError, ArithmeticError):
        return None
    u = fourier.inverse_transform(
        fourier.from_exponent_table([S], triv.u, triv.modulus), S.parent)
    if coboundary_of_unit(u) != Q:
        return None
    return u


def circ_square_verify(T1: FormTwist, T2: FormTwist, T12: FormTwist) -> dict:
    """Compare R = F1 F2^2 F1 with the candidate squares of F_(A, alpha)."""
    F1, F2 = T1.realized, T2.realized
    R = F1 * F2 * F2 * F1
    alpha = T12.form
    cands = {
        "idempotent alpha^2": transported_twist(alpha, 2),
        "idempotent alpha^-2": transported_twist(alpha, -2),
        "group-sum alpha^2": group_sum_twist(alpha.power(2)),
        "group-sum alpha^-2": group_sum_twist(alpha.power(-2)),
        "square of realized": T12.realized * T12.realized,
    }
    exact = {name: bool(C == R) for name, C in cands.items()}
    gauge = {}
    for name, C in cands.items():
        if exact[name]:
            gauge[name] = True
            continue
        try:
            Q = R * C.inverse()
        except NotAUnit:
            gauge[name] = False
            continue
        gauge[name] = diagonal_gauge(Q, T12.structure) is not None
    branch = next((n for n in ("idempotent alpha^2", "idempotent alpha^-2", "group-sum alpha^2",
                               "group-sum alpha^-2") if exact[n]), None)
    if branch is None:
        status = "gauge-equal" if any(gauge.values()) else "neither"
    else:
        status = "exact-equal"
    return {"status": status, "branch": branch, "exact": exact, "gauge": gauge}


# --- commutators and the triform invariant ----------------------------------------------


def _realized(T) -> GroupRingElement:
    return T.realized if isinstance(T, FormTwist) else T


def commutator_twist(T1, T2) -> GroupRingElement:
    """F1 F2 F1^-1 F2^-1."""
    F1, F2 = _realized(T1), _realized(T2)
    return F1 * F2 * F1.inverse() * F2.inverse()


@dataclass
class TriformInvariant:
    """c(chi1, chi2, chi3) = zeta_modulus^table[chi1, chi2, chi3] over the dual of B."""

    base: AbelianStructure
    table: np.ndarray
    modulus: int
    lifts: tuple = field(default=(), repr=False)

    def value(self, i: int, j: int, k: int) -> CyclotomicNumber:
        from .cyclotomic import root_of_unity

        return root_of_unity(self.modulus, int(self.table[i, j, k]))

    def is_symmetric(self) -> bool:
        t = self.table % self.modulus
        return all(np.array_equal(t, t.transpose(p)) for p in [(1, 0, 2), (0, 2, 1), (2, 1, 0)])

    def is_trimultiplicative(self) -> bool:
        S = self.base
        n = S.order
        add = S.local_of_coords(S.grid[:, None, :] + S.grid[None, :, :]) if S.rank else np.zeros((1, 1), int)
        t = self.table % self.modulus
        i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        # slot 0 (symmetry covers the rest)
        lhs = t[add[i, j]]
        rhs = t[i] + t[j]
        return bool(np.all((lhs - rhs) % self.modulus == 0))

    def is_trivial(self) -> bool:
        return not np.any(self.table % self.modulus)


class TriformError(ValueError):
    pass


def _lift_characters(T: FormTwist, S: AbelianStructure, L: int) -> np.ndarray:
    """For each character chi of B (local index) some x in A with beta(x, b) = chi(b) on B."""
    A = T.support.members
    gens = np.asarray(S.generators, dtype=np.int64)
    if S.rank == 0:
        return np.array([T.ambient.identity])
    vals = _form_exps(T, A[:, None], gens[None, :], L)  # beta(x, g_j) scaled to L
    w = S.weights * (L // S.exponent)
    if np.any(vals % w):
        raise TriformError("form values on B are not characters of B")
    chars = S.local_of_coords(vals // w)
    out = np.full(S.order, -1, dtype=np.int64)
    for x, ch in zip(A[::-1], chars[::-1]):
        out[ch] = x  # least member wins
    missing = np.flatnonzero(out < 0)
    if missing.size:
        raise TriformError(f"no x in A with b(x, -) = chi for chi = {tuple(S.grid[missing[0]])}")
    return out


def triform_c(T1: FormTwist, T2: FormTwist) -> TriformInvariant:
    """c(chi1, chi2, chi3) = chi3([x1, x2]) with b_i(x_i, -) = chi_i on B = [A1, A2]."""
    G = T1.ambient
    B = commutator_subgroup(G, T1.support, T2.support)
    S = abelian_invariants(B)
    e = S.exponent
    L = math.lcm(e, T1.form.exponent, T2.form.exponent)
    x1 = _lift_characters(T1, S, L)
    x2 = _lift_characters(T2, S, L)
    comm = G.commutator(x1[:, None], x2[None, :])  # (|B|, |B|)
    coords = S.coords(comm)  # (|B|, |B|, r)
    table = S.char_exponents(S.grid, coords.reshape(-1, S.rank)) if S.rank else np.zeros((1, 1), int)
    # char_exponents gives (chars, points); reorder to [chi1, chi2, chi3]
    table = np.asarray(table).reshape(S.order, S.order, S.order).transpose(1, 2, 0) if S.rank else \
        np.zeros((1, 1, 1), dtype=np.int64)
    c = TriformInvariant(S, table % max(e, 1), max(e, 1), (x1, x2))
    if not c.is_symmetric():
        raise InternalConsistencyError("triform invariant is not symmetric")
    if not c.is_trimultiplicative():
        raise InternalConsistencyError("triform invariant is not trimultiplicative")
    return c


def commutator_formula_exponents(c: TriformInvariant) -> np.ndarray:
    """Table over (psi, chi) of the exponent of c(chi, chi, psi) c(chi, psi, psi)."""
    n = c.base.order
    psi, chi = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return (c.table[chi, chi, psi] + c.table[chi, psi, psi]) % c.modulus


def commutator_formula_element(c: TriformInvariant) -> GroupRingElement:
    """sum_{psi, chi} c(chi, chi, psi) c(chi, psi, psi) p_psi (x) p_chi."""
    return fourier.diagonal_element([c.base, c.base], commutator_formula_exponents(c), c.modulus)


def commutator_formula_check(T1: FormTwist, T2: FormTwist) -> bool:
    c = triform_c(T1, T2)
    return commutator_twist(T1, T2) == commutator_formula_element(c)


@dataclass
class SolveU:
    element: GroupRingElement
    exponents: np.ndarray  # u(chi) = zeta_modulus^exponents[chi]
    modulus: int
    triform: TriformInvariant


def solve_u(c: TriformInvariant) -> SolveU:
    """u = sum u(chi) p_chi with coboundary_of_unit(u) equal to the commutator.

    u(chi) is the unique cube root of c(chi, chi, chi)^-1 inside mu_e.  The
    inverse is what makes (u (x) u) Delta(u)^-1 reproduce
    sum c(chi, chi, psi) c(chi, psi, psi) p_psi (x) p_chi.
    """
    S = c.base
    if S.order % 3 == 0:
        raise ValueError("solve_u needs |B| prime to 3 (the group order must not be divisible by 2 and 3)")
    e = c.modulus
    n = S.order
    diag = c.table[np.arange(n), np.arange(n), np.arange(n)]
    inv3 = pow(3, -1, e) if e > 1 else 0
    exps = (-diag * inv3) % e
    u = fourier.inverse_transform(fourier.from_exponent_table([S], exps, e), S.parent)
    return SolveU(u, exps, e, c)


def pair_identity(sol: SolveU, sign: int = -1) -> bool:
    """u(chi psi) = (c(chi,chi,psi) c(chi,psi,psi))^sign u(chi) u(psi) for all pairs."""
    S = sol.triform.base
    n = S.order
    add = S.local_of_coords(S.grid[:, None, :] + S.grid[None, :, :]) if S.rank else np.zeros((1, 1), int)
    chi, psi = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    t = sol.triform.table
    cc = t[chi, chi, psi] + t[chi, psi, psi]
    u = sol.exponents
    return bool(np.all((u[add] - sign * cc - u[chi] - u[psi]) % sol.modulus == 0))


def verify_solve_u(sol: SolveU, T1: FormTwist, T2: FormTwist) -> dict:
    u = sol.element
    G = T1.ambient
    comm = commutator_twist(T1, T2)
    central = all(u * GroupRingElement.basis(G, [g]) == GroupRingElement.basis(G, [g]) * u
                  for g in G.generators)
    return {
        "pair_identity": pair_identity(sol, -1),
        "pair_identity_literal": pair_identity(sol, +1),
        "coboundary_equals_commutator": coboundary_of_unit(u) == comm,
        "invariant": central,
    }


# --- separation -------------------------------------------------------------------------


@dataclass
class Separation:
    symmetric: GroupRingElement
    antisymmetric: FormTwist


def separate_symmetric_antisymmetric(F: GroupRingElement) -> Separation:
    """F = s Y with flip(s) = s and Y an anti-symmetric form twist.

    P = flip(F)^-1 F equals Y^2, so Y is the square root of the form twist read
    off P.  When P = 1 the twist is already symmetric.
    """
    G = F.group
    try:
        P = F.flip().inverse() * F
    except NotAUnit as exc:
        raise NotSeparable("twist is not invertible") from exc
    if P.is_one():
        Y = trivial_twist(G)
        return Separation(F, Y)
    try:
        beta = form_from_twist(P)
    except NotAFormTwist as exc:
        raise NotSeparable(f"not separable by this procedure: {exc}") from exc
    if beta.exponent % 2 == 0:
        raise NotSeparable("not separable by this procedure: even exponent has no canonical square root")
    Y = sqrt_form_twist(FormTwist(G, beta))
    s = F * Y.realized.inverse()
    if not is_symmetric(s):
        raise NotSeparable("not separable by this procedure: remainder is not symmetric")
    return Separation(s, Y)


# --- skew group algebra -------------------------------------------------------------------


def skew_group_algebra_iso_check(beta: PairingForm, F: GroupRingElement | None = None) -> dict:
    """Check l_chi *_F l_psi = b(chi, psi) l_(chi psi) in (k(A), *_F) for all pairs.

    k[A] acts on functions by (x.f)(a) = f(a x); the twisted product is
    (f *_F g)(a) = sum F[x, y] f(a x) g(a y).  b is the idempotent-presentation
    form of F, and l_chi = sum_a chi(a) delta_a.
    """
    S = beta.structure
    G = S.parent
    F = group_sum_twist(beta) if F is None else F
    b = presentation_dual_form(beta)
    n = S.order
    e = S.exponent
    N = math.lcm(F.conductor, e)
    Fe = F.at_conductor(N)
    keys = Fe.keys
    xs, ys = S.local(keys[:, 0]), S.local(keys[:, 1])
    add = S.local_of_coords(S.grid[:, None, :] + S.grid[None, :, :])
    chars = S.char_table  # [chi, a] exponents mod e
    scale = N // e
    num = np.asarray(Fe.num, dtype=object) if Fe.num.dtype == object else Fe.num
    # result[chi, psi, a, :] accumulated over terms
    acc = np.zeros((n, n, n, N), dtype=object if num.dtype == object else np.int64)
    chi, psi, a = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    for t in range(Fe.nnz):
        shift = (chars[chi, add[a, xs[t]]] + chars[psi, add[a, ys[t]]]) * scale % N
        row = num[t]
        for k in np.flatnonzero(row):
            np.add.at(acc, (chi, psi, a, (shift + k) % N), row[k])
    from .cyclotomic import reduce_rows

    got = reduce_rows(acc.reshape(-1, N), N)
    # expected b(chi, psi) l_(chi psi)(a) times F.den
    prod_char = add  # characters share the grid of A
    exp_shift = (b.table[chi, psi] + chars[prod_char[chi, psi], a]) * scale % N
    raw = np.zeros((n * n * n, N), dtype=np.int64)
    raw[np.arange(n ** 3), exp_shift.ravel()] = 1
    want = reduce_rows(raw, N).astype(object) * Fe.den
    bad = np.flatnonzero(np.any(np.asarray(got, dtype=object) != want, axis=1))
    failures = []
    for idx in bad[:5]:
        c_, p_, _ = np.unravel_index(idx, (n, n, n))
        failures.append((tuple(int(v) for v in S.grid[c_]), tuple(int(v) for v in S.grid[p_])))
    return {"pairs": n * n, "ok": bad.size == 0, "failures": failures, "b": b.serialize()}


# --- Lagrangian presentation ------------------------------------------------------------


def lagrangian_twist(beta: PairingForm, B) -> GroupRingElement:
    """sum_{chi,psi} bbar(chi, psi) p_psi s(chi) (x) p_chi^-1 s(psi) for a Lagrangian B.

    Built from the greedy section of A -> B-hat; it agrees with the group-sum
    twist of beta whenever beta is alternating.
    """
    S = beta.structure
    G = S.parent
    sc = section_with_cocycle(beta, B)
    Bst = sc.B_structure
    n = Bst.order
    e = beta.exponent
    scale = e // Bst.exponent
    x, chi, y, psi = (m.ravel() for m in np.meshgrid(*[np.arange(n)] * 4, indexing="ij"))
    k1 = G.mul(Bst.elements[x], sc.section[chi])
    k2 = G.mul(Bst.elements[y], sc.section[psi])
    # coefficient bbar(chi, psi) psi(x)^-1 chi(y) / |A|
    ce = Bst.char_table
    exps = (sc.beta_bar[chi, psi] + scale * (ce[chi, y] - ce[psi, x])) % e
    return GroupRingElement.from_terms(G, np.stack([k1, k2], axis=1), exps, e, den=n * n)


# --- triangular structures ---------------------------------------------------------------


def enumerate_triangular_structures(G: FiniteGroup, *, cap: int = 512, enum_cap: int = 10_000):
    """Pairs (A, alpha): A normal abelian, alpha skew-symmetric nondegenerate G-invariant."""
    out = []
    for A in enumerate_normal_abelian_subgroups(G, cap=cap):
        S = abelian_invariants(A)
        if A.order == 1:
            out.append((A, trivial_form(S)))
            continue
        for alpha in enumerate_invariant_forms(S, G, require=("skew_symmetric", "nondegenerate"), cap=enum_cap):
            out.append((A, alpha))
    return out


# --- twisted homomorphisms -------------------------------------------------------------


@dataclass
class TwistedHomomorphism:
    """Algebra map f: k[source] -> k[target] on group elements, plus a twist F over target."""

    source: FiniteGroup
    target: FiniteGroup
    image: Callable[[int], GroupRingElement]
    twist: GroupRingElement


def twisted_homomorphism_check(T: TwistedHomomorphism, *, elements=None, pairs: int = 200,
                               seed: int = 0, exhaustive_below: int = 512) -> dict:
    """Multiplicativity of f, invertibility of F and Delta'(f(g)) F = F (f(g) (x) f(g))."""
    src = T.source
    rng = np.random.default_rng(seed)
    if elements is None:
        elements = np.arange(src.order) if src.order <= exhaustive_below else \
            rng.choice(src.order, size=min(1000, src.order), replace=False)
    F = T.twist
    try:
        F.inverse()
        invertible = True
    except NotAUnit:
        invertible = False
    failures = []
    cache = {}

    def img(g):
        g = int(g)
        if g not in cache:
            cache[g] = T.image(g)
        return cache[g]

    for g in elements:
        fg = img(g)
        lhs = fg.comultiply(0).flip() * F
        rhs = F * fg.tensor(fg)
        if lhs != rhs:
            failures.append(src.label(int(g)))
    if src.order <= exhaustive_below and src.order <= 64:
        pair_list = [(a, b) for a in range(src.order) for b in range(src.order)]
    else:
        pair_list = [tuple(rng.integers(src.order, size=2)) for _ in range(pairs)]
    mult_fail = []
    for a, b in pair_list:
        if img(src.mul(a, b)) != img(a) * img(b):
            mult_fail.append((src.label(int(a)), src.label(int(b))))
    return {
        "elements_checked": len(elements),
        "pairs_checked": len(pair_list),
        "invertible": invertible,
        "intertwining": not failures,
        "multiplicative": not mult_fail,
        "failures": failures[:10],
        "multiplicative_failures": mult_fail[:10],
        "ok": invertible and not failures and not mult_fail,
    }


__all__ = [
    "CircData",
    "FormTwist",
    "InternalConsistencyError",
    "NotAFormTwist",
    "NotSeparable",
    "Separation",
    "SolveU",
    "TriformError",
    "TriformInvariant",
    "TwistedHomomorphism",
    "circ",
    "circ_data",
    "circ_square_verify",
    "commutator_formula_check",
    "commutator_formula_element",
    "commutator_twist",
    "diagonal_gauge",
    "enumerate_triangular_structures",
    "form_from_twist",
    "group_sum_twist",
    "idempotent_twist",
    "invariance_check",
    "lagrangian_twist",
    "is_antisymmetric",
    "is_symmetric",
    "pair_identity",
    "separate_symmetric_antisymmetric",
    "skew_group_algebra_iso_check",
    "solve_u",
    "sqrt_form_twist",
    "transported_twist",
    "triform_c",
    "trivial_twist",
    "twist_from_form",
    "twist_support",
    "twisted_homomorphism_check",
    "verify_solve_u",
]
