import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import Poly, symbols
from sympy.combinatorics import Permutation, PermutationGroup

from twistlab import constructions as C
from twistlab import twists as T
from twistlab.abelian import AbelianStructure, PairingForm, abelian_invariants
from twistlab.algebra import element
from twistlab.constructions.finite_field import GF, smallest_irreducible
from twistlab.constructions.mcc import cyclic_triform, validate_triform
from twistlab.constructions.symplectic import quadratic_form_values, standard_symplectic, transvection
from twistlab.groups import (
    Subgroup,
    center,
    closure_indices,
    cyclic_group,
    fingerprint,
    fingerprints_differ,
    permutation_group,
)

X = symbols("x")


def sp_order(n):
    m = n // 2
    return 2 ** (m * m) * int(np.prod([2 ** (2 * i) - 1 for i in range(1, m + 1)]))


def affine_permutations(n):
    """ASp(n, 2) acting on the 2^n points of F_2^n, as sympy permutations."""
    J = standard_symplectic(n)
    pts = [np.array(v) for v in itertools.product([0, 1], repeat=n)]
    index = {tuple(v): i for i, v in enumerate(pts)}
    gens = []
    for w in pts[1:]:
        M = transvection(w, J)
        gens.append(Permutation([index[tuple(M @ v % 2)] for v in pts]))
    e0 = np.eye(n, dtype=int)[0]
    gens.append(Permutation([index[tuple((v + e0) % 2)] for v in pts]))
    return PermutationGroup(gens)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_heisenberg_basics(p):
    H = C.heisenberg(p)
    assert H.group.order == p ** 3
    Z = center(H.group)
    assert Z.order == p and Z.mask[H.c]
    assert all(H.group.element_orders[g] in (1, p) for g in range(H.group.order))


@pytest.mark.parametrize("p", [2, 4, 9, 1])
def test_heisenberg_needs_odd_prime(p):
    with pytest.raises(ValueError):
        C.heisenberg(p)


def test_asp2_matches_permutation_oracle():
    A = C.asp(2)
    assert A.group.order == affine_permutations(2).order() == 2 ** 2 * sp_order(2) == 24
    assert A.A.order == 4 and A.A.is_normal and A.A.is_abelian


@pytest.mark.slow
def test_asp4_matches_permutation_oracle():
    A = C.asp(4)
    assert A.group.order == affine_permutations(4).order() == 2 ** 4 * sp_order(4)
    assert A.A.order == 16 and A.A.is_normal


def test_transvections_preserve_the_form():
    for n in (2, 4):
        J = standard_symplectic(n)
        for v in itertools.product([0, 1], repeat=n):
            M = transvection(np.array(v), J)
            assert np.array_equal(M.T @ J @ M % 2, J % 2)


@pytest.mark.parametrize("n", [2, 4])
def test_transvection_identity(n):
    assert C.transvection_identity_holds(n)


def test_metaplectic_lift_at_n2():
    A = C.asp(2)
    L = C.metaplectic_lift(A.group, A.structure, A.dual_beta)
    assert L.group.order == 24
    assert L.a_copy().is_normal and L.quotient_action_matches()
    r = T.twisted_homomorphism_check(L.twisted_homomorphism())
    assert r["ok"] and r["elements_checked"] == 24
    assert not fingerprints_differ(fingerprint(A.group), fingerprint(L.group))


def test_metaplectic_lift_rejects_non_normal():
    S3 = permutation_group([[1, 2, 0], [1, 0, 2]], 3)
    t = int(np.flatnonzero(S3.element_orders == 2)[0])
    S = abelian_invariants(Subgroup(S3, closure_indices(S3, [t])))
    with pytest.raises(ValueError):
        C.metaplectic_lift(S3, S, PairingForm(S.dual, np.array([[1]])))


def test_quadratic_example_n2():
    A = C.asp(2)
    Q = C.quadratic_example(2, A)
    G = A.group
    xi = Q.x.inverse()
    for g in A.transvection_generators:
        assert Q.x * element(G, g) * xi * element(G, int(G.inv(g))) == element(G, int(Q.psi[g]))
    # psi is a 1-cocycle: psi(gh) = psi(g) g psi(h) g^-1
    for g in range(G.order):
        for h in range(G.order):
            assert Q.psi[G.mul(g, h)] == G.mul(Q.psi[g], G.conj(g, Q.psi[h]))
    assert Q.coboundary_feasible


def test_quadratic_values_are_the_hyperbolic_form():
    A = C.asp(4)
    q = quadratic_form_values(A.structure)
    V = A.structure.dual.grid
    assert np.array_equal(q, (V[:, 0] * V[:, 1] + V[:, 2] * V[:, 3]) % 2)


@pytest.mark.parametrize("p,d", [(2, 3), (3, 2), (3, 5), (5, 2)])
def test_smallest_irreducible_is_irreducible_and_first(p, d):
    a = smallest_irreducible(p, d)
    assert Poly([1, *reversed(a)], X, modulus=p).is_irreducible
    for tail in itertools.product(range(p), repeat=d):
        if tuple(reversed(tail)) == a:
            break
        assert not Poly([1, *tail], X, modulus=p).is_irreducible


F243 = GF.build(3, 5)


def _sympy_mul(F, a, b):
    f = Poly([1, *reversed(F.modulus)], X, modulus=F.p)
    pa = Poly(list(reversed(F.to_vec(a).tolist())), X, modulus=F.p)
    pb = Poly(list(reversed(F.to_vec(b).tolist())), X, modulus=F.p)
    r = (pa * pb).rem(f)
    coeffs = [int(c) % F.p for c in reversed(r.all_coeffs())]
    return int(F.from_vec(np.array(coeffs + [0] * (F.d - len(coeffs)))))


@given(st.integers(0, 242), st.integers(0, 242))
def test_gf243_multiplication_matches_sympy(a, b):
    assert int(F243.mul(a, b)) == _sympy_mul(F243, a, b)


@given(st.integers(1, 242))
def test_gf243_inverse_and_frobenius(a):
    assert int(F243.mul(a, F243.inverse(a))) == 1
    assert int(F243.frobenius(a, 5)) == a
    assert 242 % F243.element_order(a) == 0


def test_gf243_trace_is_linear_and_onto():
    a = np.arange(243)
    tr = F243.trace(a)
    assert set(tr.tolist()) == {0, 1, 2}
    assert np.array_equal(F243.trace(F243.add(a, a[::-1])), (tr + tr[::-1]) % 3)


@pytest.mark.slow
def test_m11_cubic_example():
    ex = C.f243_cubic_example()
    ch = ex.checks
    assert ex.group.order == 7920 and ex.subgroup.order == 660
    assert all(ch["preserve_tau"].values()) and ch["tau_vvv_zero"]
    assert ch["stabilize_c"] == {"r^2": True, "s": True, "t": True, "r": False}
    assert C.polarization_identity_holds(ex)
    cert = C.coboundary_certificate(ex)
    assert cert["non_coboundary_certified"] and cert["s_invariant_lambdas"] == [0]
    v = cert["witness_v"]
    assert ex.c_values[v] != ex.c_values[int(ex.apply(ex.r, v))]


@pytest.mark.parametrize("n", [3, 5, 7])
def test_cyclic_triform_is_valid(n):
    Z = cyclic_group(n)
    S = AbelianStructure.from_basis(Z.whole, [1], [n])
    assert validate_triform(S, cyclic_triform(n)) == {"symmetric": True, "trimultiplicative": True}


@pytest.mark.parametrize("n", [5, 7])
def test_mcc_order(n):
    assert C.mcc_group([n]).group.order == n ** 3


def test_mcc5():
    M = C.mcc_group([5])
    assert M.A1.is_normal and M.A2.is_normal and M.A1.is_abelian and M.A2.is_abelian
    assert T.commutator_formula_check(M.twist1, M.twist2)
    sol = T.solve_u(T.triform_c(M.twist1, M.twist2))
    ver = T.verify_solve_u(sol, M.twist1, M.twist2)
    assert ver["pair_identity"] and ver["coboundary_equals_commutator"] and ver["invariant"]


def test_mcc_default_needs_cyclic():
    with pytest.raises(ValueError):
        C.mcc_group([5, 5])
