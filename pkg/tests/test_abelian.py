import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from twistlab.abelian import (
    AbelianStructure,
    DegenerateForm,
    PairingForm,
    abelian_invariants,
    adjoint_back,
    adjoint_dual_form,
    alt_inverse_odd,
    alternation,
    enumerate_invariant_forms,
    is_alternating,
    is_invariant,
    is_lagrangian,
    is_nondegenerate,
    lagrangian_decomposition,
    orthogonal_complement,
    section_with_cocycle,
    splitting_section,
    trivialize_symmetric_cocycle,
    validate_form,
)
from twistlab.groups import Subgroup, abelian_group, closure_indices, permutation_group

small_divs = st.lists(st.sampled_from([2, 3, 4, 5, 6, 9]), min_size=1, max_size=3).filter(
    lambda d: int(np.prod(d)) <= 200)


def structure(divs):
    A = abelian_group(divs)
    return AbelianStructure.from_basis(A.whole, A.generators if len(A.generators) == len(divs) else
                                       [int(A.element(np.eye(len(divs), dtype=int)[i])) for i in range(len(divs))],
                                       divs)


def std_structure(divs):
    A = abelian_group(divs)
    gens = [int(A.element(np.eye(len(divs), dtype=int)[i])) for i in range(len(divs))]
    return AbelianStructure.from_basis(A.whole, gens, divs)


@given(small_divs)
def test_invariants_match_smith_normal_form(divs):
    A = abelian_group(divs)
    S = abelian_invariants(A.whole)
    snf = smith_normal_form(Matrix.diag(*divs), domain=ZZ)
    ref = sorted(abs(int(snf[i, i])) for i in range(len(divs)) if abs(int(snf[i, i])) != 1)
    assert sorted(S.divisors) == ref
    assert all(b % a == 0 for a, b in zip(S.divisors, S.divisors[1:]))
    assert S.order == A.order


@given(small_divs, st.data())
def test_characters_are_homomorphisms(divs, data):
    S = std_structure(divs)
    E = S.char_table
    add = S.local_of_coords(S.grid[:, None, :] + S.grid[None, :, :])
    k = data.draw(st.integers(0, S.order - 1))
    assert np.array_equal(E[k][add] % S.exponent, (E[k][:, None] + E[k][None, :]) % S.exponent)
    # the table is symmetric: chi_a(b) = chi_b(a) in this identification
    assert np.array_equal(E, E.T)


@given(small_divs, st.data())
def test_forms_are_bimultiplicative(divs, data):
    S = std_structure(divs)
    r = S.rank
    M = np.zeros((r, r), dtype=np.int64)
    for i in range(r):
        for j in range(r):
            step = S.exponent // np.gcd(S.divisors[i], S.divisors[j])
            M[i, j] = step * data.draw(st.integers(0, S.exponent // step - 1))
    b = PairingForm(S, M)
    T = b.table
    add = S.local_of_coords(S.grid[:, None, :] + S.grid[None, :, :])
    e = S.exponent
    assert np.array_equal(T[add, :] % e, (T[:, None, :] + T[None, :, :]) % e)
    assert np.array_equal(T[:, add] % e, (T[:, :, None] + T[:, None, :]) % e)
    assert alternation(b).matrix.tolist() == ((M - M.T) % e).tolist()


def test_ill_defined_form_is_rejected():
    S = std_structure([2, 4])
    with pytest.raises(ValueError):
        PairingForm(S, np.array([[0, 1], [0, 0]]))


def test_enumerated_forms_match_brute_force():
    S = std_structure([5, 5])
    forms = enumerate_invariant_forms(S, None, require=("alternating", "nondegenerate"))
    assert [f.matrix[0, 1] for f in forms] == [1, 2, 3, 4]
    # brute force over every matrix
    brute = 0
    for m in itertools.product(range(5), repeat=4):
        b = PairingForm(S, np.array(m).reshape(2, 2))
        brute += is_alternating(b) and is_nondegenerate(b)
    assert brute == 4
    assert enumerate_invariant_forms(std_structure([5]), None) == []
    assert enumerate_invariant_forms(std_structure([3, 3, 3]), None) == []


def test_invariance_under_conjugation():
    # S4 acting on the Klein four-group: the nondegenerate alternating form is invariant
    G = permutation_group([[1, 2, 3, 0], [1, 0, 2, 3]], 4, materialize_below=512)
    V = [g for g in range(G.order) if G.element_orders[g] == 2 and
         sorted(G.codes[g].tolist()) == [0, 1, 2, 3] and all(G.codes[g][i] != i for i in range(4))]
    A = Subgroup(G, closure_indices(G, V))
    S = abelian_invariants(A)
    b = PairingForm(S, np.array([[0, 1], [1, 0]]))
    assert A.order == 4 and is_invariant(b, G)
    assert not is_invariant(PairingForm(S, np.array([[1, 0], [0, 0]])), G)
    flags = validate_form(b, G)
    assert flags.alternating and flags.nondegenerate and flags.invariant


def test_dual_action_matches_definition():
    G = permutation_group([[1, 2, 3, 0], [1, 0, 2, 3]], 4, materialize_below=512)
    V = [g for g in range(G.order) if G.element_orders[g] == 2 and all(G.codes[g][i] != i for i in range(4))]
    S = abelian_invariants(Subgroup(G, closure_indices(G, V)))
    E = S.char_table
    for g in range(G.order):
        p = S.dual_permutation(g)
        # (g.chi)(a) = chi(g^-1 a g)
        moved = S.local(G.conj(int(G.inv(g)), S.elements))
        assert np.array_equal(E[p][:, np.arange(S.order)], E[:, moved])


def test_adjoint_round_trip():
    S = std_structure([5, 25])
    b = PairingForm(S, np.array([[5, 0], [0, 1]]))
    assert is_nondegenerate(b)
    assert not is_nondegenerate(PairingForm(S, np.array([[0, 5], [-5, 0]])))
    back = adjoint_back(adjoint_dual_form(b), S)
    assert np.array_equal(back.matrix, b.matrix)
    with pytest.raises(DegenerateForm):
        adjoint_dual_form(PairingForm(S, np.zeros((2, 2), dtype=int)))


def test_alt_inverse_odd():
    S = std_structure([5, 5])
    a = PairingForm(S, np.array([[0, 2], [3, 0]]))
    assert alternation(alt_inverse_odd(a)) == a
    with pytest.raises(ValueError):
        alt_inverse_odd(PairingForm(std_structure([2, 2]), np.array([[0, 1], [1, 0]])))


def test_lagrangian_subgroups_of_z5_squared():
    S = std_structure([5, 5])
    b = PairingForm(S, np.array([[0, 1], [-1, 0]]))
    G = S.parent
    lines = {tuple(closure_indices(G, [g]).tolist()) for g in range(1, 25)}
    assert len(lines) == 6
    assert all(is_lagrangian(Subgroup(G, np.array(m)), b) for m in lines)
    assert orthogonal_complement(G.trivial, b).order == 25
    dec = lagrangian_decomposition(b)
    assert dec.verified and dec.B.order == 5


def test_section_cocycle_and_splitting_on_z25_squared():
    S = std_structure([25, 25])
    G = S.parent
    b = PairingForm(S, np.array([[0, 1], [-1, 0]]))
    B = Subgroup(G, np.unique(G.power(np.arange(G.order), 5)))
    assert B.order == 25 and is_lagrangian(B, b)
    sc = section_with_cocycle(b, B)
    assert sc.cocycle_ok and not sc.is_trivial()
    assert splitting_section(b, B) is None


@given(st.lists(st.sampled_from([2, 3, 4, 5]), min_size=1, max_size=2), st.data())
def test_trivialize_coboundaries(divs, data):
    n = int(np.prod(divs))
    M = int(np.lcm.reduce(divs))
    u0 = np.array(data.draw(st.lists(st.integers(0, M - 1), min_size=n, max_size=n)))
    u0[0] = 0
    grid = np.indices(divs).reshape(len(divs), -1).T
    add = np.ravel_multi_index(tuple(np.moveaxis((grid[:, None, :] + grid[None, :, :]) % divs, -1, 0)), divs)
    T = (u0[add] - u0[:, None] - u0[None, :]) % M
    sol = trivialize_symmetric_cocycle(divs, T, M)
    k = sol.modulus // M
    assert np.array_equal(sol.u[add] % sol.modulus, (T * k + sol.u[:, None] + sol.u[None, :]) % sol.modulus)


def test_trivialize_enlarges_modulus_for_the_carry_cocycle():
    # the carry cocycle on Z/2 is symmetric but needs a square root of -1
    T = np.array([[0, 0], [0, 1]])
    with pytest.raises(ValueError):
        trivialize_symmetric_cocycle([2], T, 2, enlarge=False)
    sol = trivialize_symmetric_cocycle([2], T, 2)
    assert sol.modulus == 4
    add = np.array([[0, 1], [1, 0]])
    assert np.array_equal(sol.u[add] % 4, (2 * T + sol.u[:, None] + sol.u[None, :]) % 4)
