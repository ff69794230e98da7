import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from twistlab import hopf
from twistlab import twists as T
from twistlab.abelian import AbelianStructure, PairingForm, is_nondegenerate, validate_form
from twistlab.algebra import GroupRingElement, element
from twistlab.constructions import heisenberg
from twistlab.groups import Subgroup, abelian_group, closure_indices


def std_structure(divs):
    A = abelian_group(divs)
    gens = [int(A.element(np.eye(len(divs), dtype=int)[i])) for i in range(len(divs))]
    return AbelianStructure.from_basis(A.whole, gens, divs)


H3 = heisenberg(3)
Z5x5 = std_structure([5, 5])
Z3x9 = std_structure([3, 9])


def naive_group_sum(beta):
    """1/|A| sum beta(a, b) a (x) b, one basis element at a time."""
    S = beta.structure
    out = GroupRingElement.zero(S.parent, 2, beta.exponent)
    for i, a in enumerate(S.elements):
        for j, b in enumerate(S.elements):
            out = out + GroupRingElement.basis(S.parent, [int(a), int(b)], 1, beta.exponent).scale(
                _root(beta.exponent, int(beta.table[i, j])))
    return out.scale(_frac(1, S.order))


def _root(n, k):
    from twistlab.cyclotomic import root_of_unity

    return root_of_unity(n, k)


def _frac(a, b):
    from fractions import Fraction

    return Fraction(a, b)


forms_on = st.sampled_from([Z5x5, Z3x9]).flatmap(
    lambda S: st.tuples(st.just(S), st.lists(st.integers(0, 8), min_size=4, max_size=4)))


def _form(S, entries):
    # entry (i, j) must be a multiple of e / gcd(d_i, d_j) to be well defined
    e = S.exponent
    step = np.array([[e // np.gcd(a, b) for b in S.divisors] for a in S.divisors])
    return PairingForm(S, np.array(entries).reshape(2, 2) * step)


@given(forms_on)
def test_group_sum_twist_matches_naive_sum(arg):
    beta = _form(*arg)
    assert T.group_sum_twist(beta) == naive_group_sum(beta)


@given(forms_on)
def test_form_twists_are_twists_and_read_back(arg):
    beta = _form(*arg)
    assume(is_nondegenerate(beta))
    F = T.group_sum_twist(beta)
    rep = hopf.drinfeld_conditions_check(F)
    assert rep.ok
    assert T.form_from_twist(F, beta.structure) == beta


@given(forms_on)
def test_presentations_agree(arg):
    beta = _form(*arg)
    assume(is_nondegenerate(beta))
    F = T.twist_from_form(beta.structure.subgroup, beta)
    G = T.twist_from_form(beta.structure.subgroup, beta, presentation="idempotent")
    assert F.realized == G.realized


def test_degenerate_form_gives_no_twist():
    F = T.group_sum_twist(PairingForm(Z5x5, np.array([[1, 0], [0, 0]])))
    assert not hopf.drinfeld_conditions_check(F).invertible


def test_scaled_twist_fails_counit():
    F = H3.twist_x.realized.scale(2)
    rep = hopf.drinfeld_conditions_check(F)
    assert rep.invertible and not rep.counital and not rep.ok


def test_non_cocycle_is_rejected():
    G = Z5x5.parent
    g = int(Z5x5.generators[0])
    # 1 (x) 1 + (g (x) 1 - 1 (x) 1)/2 is invertible and counital on the right only
    one = GroupRingElement.one(G, 2)
    F = one + (GroupRingElement.basis(G, [g, G.identity]) - one).scale(_frac(1, 2))
    rep = hopf.drinfeld_conditions_check(F)
    assert not rep.ok


def test_cocycle_check_above_cap_is_sampled_or_skipped():
    F = heisenberg(5).twist_x.realized
    assert hopf.drinfeld_conditions_check(F, cap=10).details["cocycle_mode"].startswith("sampled")
    assert hopf.drinfeld_conditions_check(F, cap=10, samples=0).cocycle == "unchecked"


def test_heisenberg_twists_are_invariant_and_antisymmetric():
    for F in (H3.twist_x, H3.twist_y):
        assert hopf.invariance_check(F.realized)
        assert T.is_antisymmetric(F.realized)
        assert F.flags().alternating and F.flags().nondegenerate and F.flags().invariant


def test_non_normal_support_is_not_invariant():
    G = H3.group
    x = element(G, H3.x)
    # a coboundary of a non-central unit is a twist but not an invariant one
    a = GroupRingElement.one(G, 1).scale(2) - x
    F = hopf.coboundary_of_unit(a)
    assert hopf.drinfeld_conditions_check(F, cap=27).ok
    assert not hopf.invariance_check(F)


def test_gauge_transform_of_trivial_twist_is_coboundary():
    G = H3.group
    a = GroupRingElement.one(G, 1).scale(3) + element(G, H3.c)
    one = GroupRingElement.one(G, 2)
    assert hopf.gauge_transform(one, a) == hopf.coboundary_of_unit(a)
    # a central unit gives a symmetric invariant twist
    s = hopf.coboundary_of_unit(a)
    assert T.is_symmetric(s) and hopf.invariance_check(s)


def test_conjugate_by_identity_is_identity():
    F = H3.twist_x.realized
    assert hopf.conjugate_by(F, H3.group.identity) == F


@given(st.lists(st.integers(0, 4), min_size=4, max_size=4))
def test_square_root_squares_back(entries):
    M = np.array(entries).reshape(2, 2)
    assume(round(np.linalg.det(M)) % 5)
    Tw = T.FormTwist(Z5x5.parent, PairingForm(Z5x5, M))
    Y = T.sqrt_form_twist(Tw)
    assert Y.realized * Y.realized == Tw.realized


def test_square_root_needs_nondegenerate_form():
    with pytest.raises(ValueError):
        T.sqrt_form_twist(T.FormTwist(Z5x5.parent, PairingForm(Z5x5, np.array([[1, 0], [0, 0]]))))


def test_square_root_needs_odd_exponent():
    S = std_structure([2, 2])
    with pytest.raises(ValueError):
        T.sqrt_form_twist(T.FormTwist(S.parent, PairingForm(S, np.array([[0, 1], [1, 0]]))))


def test_commutator_formula_on_heisenberg3():
    assert T.commutator_formula_check(H3.twist_x, H3.twist_y)
    # cube roots are not unique in mu_3
    with pytest.raises(ValueError):
        T.solve_u(T.triform_c(H3.twist_x, H3.twist_y))


def test_triform_invariant_is_symmetric_and_trimultiplicative():
    c = T.triform_c(H3.twist_x, H3.twist_y)
    assert c.is_symmetric() and c.is_trimultiplicative() and not c.is_trivial()


def test_circ_on_heisenberg3():
    cd = T.circ_data(H3.twist_x, H3.twist_y, samples=50)
    f = cd.twist.flags()
    assert f.alternating and f.nondegenerate and f.invariant
    sq = T.circ_square_verify(H3.twist_x, H3.twist_y, cd.twist)
    assert sq["status"] == "exact-equal" and sq["branch"] is not None


def test_circ_rejects_even_order():
    S = std_structure([2, 2])
    F = T.FormTwist(S.parent, PairingForm(S, np.array([[0, 1], [1, 0]])))
    with pytest.raises(ValueError):
        T.circ(F, F)


def test_separation_recovers_factors_on_heisenberg3():
    G = H3.group
    s = hopf.coboundary_of_unit(GroupRingElement.one(G, 1).scale(2) - element(G, H3.c))
    Fx = H3.twist_x
    sep = T.separate_symmetric_antisymmetric(s * Fx.realized)
    assert sep.symmetric == s
    assert sep.antisymmetric.realized == Fx.realized


def test_separation_of_symmetric_twist():
    G = H3.group
    s = hopf.coboundary_of_unit(GroupRingElement.one(G, 1).scale(2) - element(G, H3.c))
    sep = T.separate_symmetric_antisymmetric(s)
    assert sep.symmetric == s and sep.antisymmetric.is_trivial()


def test_skew_group_algebra_rule():
    for M in ([[0, 1], [-1, 0]], [[1, 2], [3, 4]]):
        assert T.skew_group_algebra_iso_check(PairingForm(Z5x5, np.array(M)))["ok"]
    assert T.skew_group_algebra_iso_check(_form(Z3x9, [1, 0, 2, 5]))["ok"]


def test_triangular_structures_of_heisenberg3():
    # trivial pair, plus four order-9 normal subgroups <g, c> each carrying
    # the two nondegenerate alternating forms; the centre carries none
    tri = T.enumerate_triangular_structures(H3.group)
    assert len(tri) == 1 + 4 * 2
    assert all(validate_form(a, H3.group).invariant for _, a in tri)


def test_lagrangian_twist_matches_group_sum():
    S = std_structure([5, 5])
    b = PairingForm(S, np.array([[0, 1], [-1, 0]]))
    G = S.parent
    B = Subgroup(G, closure_indices(G, [int(S.generators[0])]))
    assert T.lagrangian_twist(b, B) == T.group_sum_twist(b)


def test_twisted_homomorphism_with_identity_map():
    G = H3.group
    ident = T.TwistedHomomorphism(G, G, lambda g: element(G, g), H3.twist_x.realized)
    assert T.twisted_homomorphism_check(ident)["ok"]
    bad = hopf.coboundary_of_unit(GroupRingElement.one(G, 1) + element(G, H3.x))
    r = T.twisted_homomorphism_check(T.TwistedHomomorphism(G, G, lambda g: element(G, g), bad))
    assert r["multiplicative"] and not r["intertwining"]
