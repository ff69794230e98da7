import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy.combinatorics import Permutation, PermutationGroup

from twistlab import groups as grp
from twistlab.groups import (
    CapExceeded,
    ClosureTooLarge,
    abelian_group,
    automorphism_group,
    center,
    check_axioms,
    class_preserving_filter,
    closure_indices,
    cycle_notation,
    derived_subgroup,
    enumerate_normal_abelian_subgroups,
    fingerprint,
    fingerprints_differ,
    matrix_group,
    permutation_group,
    table_group,
)


def s4():
    return permutation_group([[1, 2, 3, 0], [1, 0, 2, 3]], 4, materialize_below=512)


def q8():
    # quaternion group as 2x2 matrices over F_3
    return matrix_group([[[0, 2], [1, 0]], [[1, 1], [1, 2]]], 3, materialize_below=512)


def d4():
    return permutation_group([[1, 2, 3, 0], [3, 2, 1, 0]], 4, materialize_below=512)


perm_gens = st.lists(st.permutations(list(range(5))), min_size=1, max_size=3)


@given(perm_gens)
def test_closure_order_agrees_with_sympy(gens):
    G = permutation_group(gens, 5)
    ref = PermutationGroup([Permutation(list(g)) for g in gens]).order()
    assert G.order == ref


@given(perm_gens)
def test_axioms_hold_for_both_backends(gens):
    G = permutation_group(gens, 5)
    check_axioms(G, samples=500)
    if G.order <= 512:
        T = G.materialize(512)
        check_axioms(T)
        a = np.arange(G.order)
        assert np.array_equal(T.mul(a[:, None], a[None, :]), G.mul(a[:, None], a[None, :]))


def test_basic_invariants_of_small_groups():
    G = s4()
    assert (G.order, len(G.classes), center(G).order, derived_subgroup(G).order) == (24, 5, 1, 12)
    Q = q8()
    assert (Q.order, len(Q.classes), center(Q).order) == (8, 5, 2)
    assert sorted(np.bincount(Q.element_orders)[1:].tolist()) == [0, 1, 1, 6]


def test_classes_partition_the_group():
    G = s4()
    allm = np.sort(np.concatenate(G.classes))
    assert np.array_equal(allm, np.arange(24))
    assert [int(c[0]) for c in G.classes] == sorted(int(c[0]) for c in G.classes)
    for c in G.classes:
        img = np.unique(G.conj(np.arange(24)[:, None], c[None, :]))
        assert np.array_equal(img, c)


def test_cycle_notation():
    assert cycle_notation([1, 2, 0, 3]) == "(0 1 2)"
    assert cycle_notation([0, 1]) == "()"
    assert cycle_notation([1, 0, 3, 2]) == "(0 1)(2 3)"


def test_table_group_checks_its_input():
    with pytest.raises((ValueError, AssertionError)):
        table_group(np.array([[0, 1], [1, 1]]))
    Z3 = table_group(np.array([[0, 1, 2], [1, 2, 0], [2, 0, 1]]))
    assert Z3.order == 3 and Z3.exponent == 3


def test_abelian_group_indices_are_mixed_radix():
    A = abelian_group([2, 3])
    assert A.order == 6 and A.exponent == 6
    idx = np.arange(6)
    assert np.all(A.mul(idx[:, None], idx[None, :]) == A.mul(idx[None, :], idx[:, None]))


def test_closure_cap_is_enforced():
    with pytest.raises(ClosureTooLarge):
        permutation_group([[1, 2, 3, 4, 5, 0], [1, 0, 2, 3, 4, 5]], 6, cap=100)


def test_automorphism_counts():
    # |Aut(S3)| = 6, |Aut(D4)| = 8, |Aut(Q8)| = 24, |Aut(Z/5 x Z/5)| = |GL(2,5)| = 480
    S3 = permutation_group([[1, 2, 0], [1, 0, 2]], 3, materialize_below=512)
    assert len(automorphism_group(S3)) == 6
    assert len(automorphism_group(d4())) == 8
    auts = automorphism_group(q8())
    assert len(auts) == 24 and all(a.is_homomorphism() and a.is_bijective() for a in auts)
    assert len(automorphism_group(abelian_group([5, 5]), cap=512)) == 480
    with pytest.raises(CapExceeded):
        automorphism_group(s4(), cap=10)


def test_class_preserving_filter():
    for G, out in ((s4(), 1), (q8(), 1), (d4(), 1)):
        info = class_preserving_filter(automorphism_group(G), G)
        assert info.out_cl_order == out
        assert info.inn_order == G.order // center(G).order


def test_normal_abelian_subgroups():
    subs = enumerate_normal_abelian_subgroups(s4())
    assert [A.order for A in subs] == [1, 4]
    assert all(A.is_normal and A.is_abelian for A in subs)
    # D4: 1, center, two Klein four-groups, the cyclic rotation subgroup
    assert sorted(A.order for A in enumerate_normal_abelian_subgroups(d4())) == [1, 2, 4, 4, 4]


def test_normal_abelian_brute_force_on_d4():
    G = d4()
    found = {tuple(A.members.tolist()) for A in enumerate_normal_abelian_subgroups(G)}
    brute = set()
    for r in range(0, 4):
        for gens in itertools.combinations(range(G.order), r):
            S = grp.Subgroup(G, closure_indices(G, gens))
            if S.is_normal and S.is_abelian:
                brute.add(tuple(S.members.tolist()))
    assert found == brute


def test_fingerprints():
    assert fingerprints_differ(fingerprint(q8()), fingerprint(d4()))
    assert not fingerprints_differ(fingerprint(s4()), fingerprint(s4()))
    assert fingerprint(q8()).abelianization == (2, 2)
    assert sorted(fingerprint(abelian_group([4, 2])).abelianization) == [2, 4]


class _MemoryCache:
    def __init__(self):
        self.data, self.loads = {}, 0

    def load(self, key):
        self.loads += 1
        return self.data.get(key)

    def store(self, key, arr):
        self.data[key] = arr


def test_closure_cache_hook():
    c = _MemoryCache()
    grp.set_closure_cache(c)
    try:
        a = permutation_group([[1, 2, 3, 0], [1, 0, 2, 3]], 4)
        assert len(c.data) == 1
        b = permutation_group([[1, 2, 3, 0], [1, 0, 2, 3]], 4)
        assert np.array_equal(a.codes, b.codes) and c.loads == 2
    finally:
        grp.set_closure_cache(None)
