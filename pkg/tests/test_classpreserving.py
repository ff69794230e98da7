import numpy as np
import pytest

from twistlab import constructions as C
from twistlab import fourier, hopf
from twistlab import twists as T
from twistlab.algebra import element
from twistlab.classpreserving import (
    NoConjugator,
    automorphism_from_unit,
    conjugator_space,
    find_conjugator,
    h1_brute_force,
    h1_detector,
    is_conjugator,
    symmetric_twist_of,
)
from twistlab.groups import GroupMorphism, closure_indices, permutation_group

S4 = permutation_group([[1, 2, 3, 0], [1, 0, 2, 3]], 4)
Q8 = permutation_group([[1, 2, 3, 0, 5, 6, 7, 4], [4, 7, 6, 5, 2, 1, 0, 3]], 8)


@pytest.mark.parametrize("G", [S4, Q8], ids=["S4", "Q8"])
def test_conjugator_space_of_inner_is_class_sums(G):
    for h in (G.identity, int(G.generators[0])):
        orbits = conjugator_space(GroupMorphism.inner(G, h))
        assert len(orbits) == len(G.classes)


@pytest.mark.parametrize("G", [S4, Q8], ids=["S4", "Q8"])
def test_find_conjugator_for_inner(G):
    g = int(G.generators[1])
    phi = GroupMorphism.inner(G, g)
    x = find_conjugator(phi)
    assert is_conjugator(phi, x)
    F = symmetric_twist_of(x=x)
    assert hopf.invariance_check(F) and T.is_symmetric(F)
    assert hopf.drinfeld_conditions_check(F).cocycle == "pass"


def test_non_class_preserving_has_no_conjugator():
    # the outer automorphism of Z/3 (inversion) moves classes
    G = permutation_group([[1, 2, 0]], 3)
    phi = GroupMorphism(G, G, G.inv(np.arange(3)))
    with pytest.raises(NoConjugator):
        find_conjugator(phi, attempts=5)


def test_automorphism_from_unit():
    g = int(S4.generators[0])
    phi = automorphism_from_unit(S4, element(S4, g))
    assert phi == GroupMorphism.inner(S4, g)


def test_quadratic_symmetric_twist_is_the_sign_of_the_form():
    A = C.asp(2)
    Q = C.quadratic_example(2, A)
    s0 = symmetric_twist_of(x=Q.x)
    S = A.structure
    V = S.dual.grid
    # (x (x) x) Delta(x)^-1 = sum (-1)^(q(v) + q(w) - q(v + w)) p_v (x) p_w
    b = (V[:, None, 0] * V[None, :, 1] + V[:, None, 1] * V[None, :, 0]) % 2
    assert s0 == fourier.diagonal_element([S, S], b, 2)
    assert not s0.is_one()
    phi = automorphism_from_unit(A.group, Q.x)
    assert phi is not None and np.array_equal(A.group.class_index[phi.images], A.group.class_index)


def test_h1_detector_order24_matches_brute_force():
    A = C.asp(2)
    Q = C.quadratic_example(2, A)
    R = h1_detector(A.group, A.A)
    bf = h1_brute_force(A.group, A.A)
    assert R.class_count == bf["classes"]
    assert R.coboundaries == A.A.order  # no nonzero point of A is fixed by G
    assert all(c.commutators_ok and c.twist_invariant for c in R.classes)
    assert R.find(Q.psi[np.asarray(R.generators)]).is_trivial


def test_h1_detector_trivial_action():
    # G = (Z/3)^2 acting trivially on itself: Z^1 = Hom(G, G) has 3^4 elements,
    # B^1 is trivial, and the character condition on the whole stabilizer kills all but psi = 1
    G = permutation_group([[1, 2, 0, 3, 4, 5], [0, 1, 2, 4, 5, 3]], 6)
    A = G.whole
    R = h1_detector(G, A, reconstruct=False)
    bf = h1_brute_force(G, A)
    assert R.coboundaries == 1 and R.cocycles == 81
    assert R.admissible == 1 and R.class_count == bf["classes"] == 1


def _two_generators(G, seed=0):
    rng = np.random.default_rng(seed)
    while True:
        g = [int(v) for v in rng.integers(G.order, size=2)]
        if len(closure_indices(G, g)) == G.order:
            return g


@pytest.mark.slow
def test_h1_detector_order11520():
    A = C.asp(4)
    Q = C.quadratic_example(4, A)
    R = h1_detector(A.group, A.A, generators=_two_generators(A.group))
    assert R.coboundaries == A.A.order
    assert R.cocycles == 64 and R.admissible == 32 and R.class_count == 2
    cls = R.find(Q.psi[np.asarray(R.generators)])
    assert not cls.is_trivial and cls.commutators_ok and cls.twist_invariant
