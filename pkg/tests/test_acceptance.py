"""One test per acceptance criterion, all in exact cyclotomic arithmetic.

Each test prints a ``criterion N (...): PASS/FAIL`` line; the lines are also
collected into the terminal summary.  Parts that do not hold as stated are
kept as strict xfails so that a change in behaviour is noticed.
"""

import time

import numpy as np
import pytest

from twistlab import constructions as C
from twistlab import fourier, hopf
from twistlab import twists as T
from twistlab.abelian import (
    AbelianStructure,
    PairingForm,
    is_lagrangian,
    lagrangian_decomposition,
    section_with_cocycle,
    splitting_section,
    validate_form,
    verify_lagrangian_decomposition,
)
from twistlab.algebra import element
from twistlab.classpreserving import h1_brute_force, h1_detector, symmetric_twist_of
from twistlab.cyclotomic import as_root_exponent, mth_root_in_mu, root_of_unity
from twistlab.groups import Subgroup, abelian_group, closure_indices, fingerprint, fingerprints_differ


def std_structure(divs):
    A = abelian_group(divs)
    gens = [int(A.element(np.eye(len(divs), dtype=int)[i])) for i in range(len(divs))]
    return AbelianStructure.from_basis(A.whole, gens, divs)


@pytest.fixture(scope="module")
def H5():
    return C.heisenberg(5)


@pytest.fixture(scope="module")
def asp2():
    return C.asp(2)


@pytest.fixture(scope="module")
def quad2(asp2):
    return C.quadratic_example(2, asp2)


@pytest.fixture(scope="module")
def asp4():
    return C.asp(4)


# --- 1 -------------------------------------------------------------------------------------


def test_c1_heisenberg_twist_axioms(H5, verdict):
    t = time.perf_counter()
    F = H5.twist_x.realized
    rep = hopf.drinfeld_conditions_check(F)
    inv = hopf.invariance_check(F)
    dt = time.perf_counter() - t
    ok = rep.invertible and rep.counital and rep.cocycle == "pass" and inv and dt < 60
    verdict(1, "Heisenberg(5) F_x axioms", ok,
            f"cocycle={rep.details['cocycle_mode']} invariant={inv} {dt:.1f}s")


# --- 2 -------------------------------------------------------------------------------------


def test_c2_presentations_agree(H5, verdict):
    pairs = [H5.twist_x, H5.twist_y, H5.twist(H5.x, 2), H5.twist(H5.group.mul(H5.x, H5.y), 3)]
    S = std_structure([5, 5])
    for M in ([[0, 1], [-1, 0]], [[1, 2], [3, 4]], [[2, 0], [0, 3]]):
        pairs.append(T.twist_from_form(S.subgroup, PairingForm(S, np.array(M))))
    agree = [F.realized == F.realized_idempotent() for F in pairs]
    verdict(2, "group-sum = idempotent presentation", all(agree), f"{sum(agree)}/{len(agree)} pairs")


# --- 3 -------------------------------------------------------------------------------------


def _heisenberg_commutator_parts(H):
    """The commutator, the centre as a structure, and a builder for diagonal elements on it."""
    G, p = H.group, H.p
    comm = T.commutator_twist(H.twist_x, H.twist_y)
    B = AbelianStructure.from_basis(Subgroup(G, closure_indices(G, [H.c])), [H.c], [p])
    loc = B.local_of_coords(np.arange(p)[:, None])  # k -> local index of the character chi_k(c) = eps^k
    return comm, B, loc


def test_c3_commutator_display(H5, verdict):
    comm, B, loc = _heisenberg_commutator_parts(H5)
    p = H5.p
    i, j = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    E = np.zeros((p, p), dtype=np.int64)
    E[loc[j], loc[i]] = (i * i * j + j * j * i) % p  # b(x, y) = 1 for the standard twists
    ok = comm == fourier.diagonal_element([B, B], E, p)
    verdict(3, "[F_x, F_y] = sum eps^((i^2 j + j^2 i) b) p_j (x) p_i", ok)


def _u_from_exponents(H, exps):
    _, B, loc = _heisenberg_commutator_parts(H)
    ex = np.zeros(H.p, dtype=np.int64)
    ex[loc] = exps % H.p
    return fourier.diagonal_element([B], ex, H.p)


def test_c3_u_with_cubed_exponent(H5, verdict):
    comm, _, _ = _heisenberg_commutator_parts(H5)
    eta = mth_root_in_mu(root_of_unity(5, 1), 3)
    h = as_root_exponent(eta, 5)
    k = np.arange(5)
    ok = hopf.coboundary_of_unit(_u_from_exponents(H5, -h * k ** 3)) == comm
    verdict(3, "coboundary of u = sum eta^(-k^3 b) p_k", ok, f"eta = zeta_5^{h}")


@pytest.mark.xfail(strict=True, reason="with exponent -k b the coboundary of u is the trivial twist")
def test_c3_u_literal_exponent(H5, verdict):
    comm, _, _ = _heisenberg_commutator_parts(H5)
    eta = mth_root_in_mu(root_of_unity(5, 1), 3)
    h = as_root_exponent(eta, 5)
    k = np.arange(5)
    u = _u_from_exponents(H5, -h * k)
    verdict(3, "coboundary of u = sum eta^(-k b) p_k [literal, expected FAIL]",
            hopf.coboundary_of_unit(u) == comm)


def test_c3_solve_u(H5, verdict):
    sol = T.solve_u(T.triform_c(H5.twist_x, H5.twist_y))
    ver = T.verify_solve_u(sol, H5.twist_x, H5.twist_y)
    verdict(3, "solve_u on Heisenberg(5)", ver["coboundary_equals_commutator"] and ver["invariant"])


# --- 4 -------------------------------------------------------------------------------------


def test_c4_circ_law(H5, verdict):
    cd = T.circ_data(H5.twist_x, H5.twist_y, samples=100)
    f = validate_form(cd.twist.form, H5.group)
    flags_ok = f.bimultiplicative and f.alternating and f.nondegenerate and f.invariant
    sq = T.circ_square_verify(H5.twist_x, H5.twist_y, cd.twist)
    alpha_branch = sq["branch"] is not None and "alpha" in sq["branch"]
    ok = flags_ok and sq["status"] == "exact-equal" and alpha_branch and cd.factorization_samples == 100
    verdict(4, "circ on Heisenberg(5)", ok, f"|A| = {cd.twist.support.order}, branch = {sq['branch']}")


# --- 5 -------------------------------------------------------------------------------------


def test_c5_metaplectic_n2(asp2, verdict):
    L = C.metaplectic_lift(asp2.group, asp2.structure, asp2.dual_beta)
    r = T.twisted_homomorphism_check(L.twisted_homomorphism())
    ok = L.group.order == 24 and r["ok"] and r["elements_checked"] == 24
    verdict(5, "metaplectic lift of ASp(2,2)", ok)


@pytest.mark.slow
def test_c5_metaplectic_n4(asp4, verdict):
    t = time.perf_counter()
    L = C.metaplectic_lift(asp4.group, asp4.structure, asp4.dual_beta)
    els = np.random.default_rng(0).choice(L.group.order, size=1000, replace=False)
    r = T.twisted_homomorphism_check(L.twisted_homomorphism(), elements=els)
    differ = fingerprints_differ(fingerprint(asp4.group), fingerprint(L.group))
    dt = time.perf_counter() - t
    ok = L.group.order == 11520 and r["ok"] and r["elements_checked"] == 1000 and differ and dt < 600
    verdict(5, "metaplectic lift of ASp(4,2)", ok, f"fingerprints differ = {differ}, {dt:.1f}s")


# --- 6 -------------------------------------------------------------------------------------


def _quadratic_checks(A, Q):
    G = A.group
    xi = Q.x.inverse()
    realize = all(Q.x * element(G, g) * xi * element(G, int(G.inv(g))) == element(G, int(Q.psi[g]))
                  for g in A.transvection_generators)
    # psi(g) evaluated on characters is q(v) - q(g v)
    S = A.structure
    values = all(np.array_equal(S.char_table[:, S.local(np.array([Q.psi[g]]))[0]] % 2, Q.psi_values(g))
                 for g in A.transvection_generators)
    return realize and values and C.transvection_identity_holds(A.n)


def test_c6_quadratic_n2_commutators(asp2, quad2, verdict):
    verdict(6, "n=2: [x, g] = psi(g) and the transvection formula", _quadratic_checks(asp2, quad2))


@pytest.mark.xfail(strict=True, reason="at n=2 the linear system is solvable (Out_cl of the order-24 group is trivial)")
def test_c6_quadratic_n2_infeasible(quad2, verdict):
    verdict(6, "n=2: coboundary system infeasible [expected FAIL]", not quad2.coboundary_feasible)


@pytest.mark.slow
def test_c6_quadratic_n4(asp4, verdict):
    Q = C.quadratic_example(4, asp4)
    ok = _quadratic_checks(asp4, Q) and not Q.coboundary_feasible
    verdict(6, "n=4: commutators, transvection formula, infeasible system", ok)


# --- 7 -------------------------------------------------------------------------------------


@pytest.mark.slow
def test_c7_m11_cubic(verdict):
    t = time.perf_counter()
    ex = C.f243_cubic_example()
    ch = ex.checks
    cert = C.coboundary_certificate(ex)
    dt = time.perf_counter() - t
    v = cert["witness_v"]
    ok = (all(ch["preserve_tau"].values()) and ex.group.order == 7920 and ex.subgroup.order == 660
          and all(ch["stabilize_c"][k] for k in ("r^2", "s", "t"))
          and cert["s_fixes_c"] and cert["s_invariant_lambdas"] == [0]
          and v is not None and ex.c_values[v] != ex.c_values[int(ex.apply(ex.r, v))] and dt < 300)
    verdict(7, "cubic M11 example", ok, f"witness v = {v}, {dt:.1f}s")


# --- 8 -------------------------------------------------------------------------------------


def test_c8_detector_order24(asp2, quad2, verdict):
    R = h1_detector(asp2.group, asp2.A)
    bf = h1_brute_force(asp2.group, asp2.A)
    cls = R.find(quad2.psi[np.asarray(R.generators)])
    ok = (R.class_count == bf["classes"] and cls.commutators_ok and cls.twist_invariant
          and cls.commutators_checked == asp2.group.order)
    verdict(8, "order 24: x reconstructed, invariant, brute force agrees", ok,
            f"classes = {R.class_count}, brute force = {bf['classes']}")


@pytest.mark.xfail(strict=True, reason="the class of psi is trivial on the order-24 group")
def test_c8_nontrivial_class_order24(asp2, quad2, verdict):
    R = h1_detector(asp2.group, asp2.A)
    cls = R.find(quad2.psi[np.asarray(R.generators)])
    verdict(8, "order 24: class of psi nontrivial [expected FAIL]", not cls.is_trivial)


@pytest.mark.slow
def test_c8_nontrivial_class_order11520(asp4, verdict):
    from twistlab.groups import closure_indices as ci

    G = asp4.group
    rng = np.random.default_rng(0)
    while True:
        gens = [int(v) for v in rng.integers(G.order, size=2)]
        if len(ci(G, gens)) == G.order:
            break
    Q = C.quadratic_example(4, asp4)
    R = h1_detector(G, asp4.A, generators=gens)
    cls = R.find(Q.psi[np.asarray(R.generators)])
    ok = not cls.is_trivial and cls.commutators_ok and cls.twist_invariant
    verdict(8, "order 11520: class of psi nontrivial and realized", ok, f"classes = {R.class_count}")


# --- 9 -------------------------------------------------------------------------------------


def test_c9_lagrangian_z25(verdict):
    S = std_structure([25, 25])
    G = S.parent
    b = PairingForm(S, np.array([[0, 1], [-1, 0]]))
    B = Subgroup(G, np.unique(G.power(np.arange(G.order), 5)))
    sc = section_with_cocycle(b, B)
    dec = lagrangian_decomposition(b)
    ok = (is_lagrangian(B, b) and splitting_section(b, B) is None and sc.cocycle_ok and not sc.is_trivial()
          and dec.verified and verify_lagrangian_decomposition(b, dec)
          and T.lagrangian_twist(b, B) == T.group_sum_twist(b))
    verdict(9, "(Z/25)^2 Lagrangian machinery", ok)


# --- 10 ------------------------------------------------------------------------------------


def test_c10_mcc5(verdict):
    M = C.mcc_group([5])
    formula = T.commutator_formula_check(M.twist1, M.twist2)
    ver = T.verify_solve_u(T.solve_u(T.triform_c(M.twist1, M.twist2)), M.twist1, M.twist2)
    ok = formula and ver["pair_identity"] and ver["coboundary_equals_commutator"] and ver["invariant"]
    verdict(10, "M(Z/5, zeta^(xyz))", ok)


# --- 11 ------------------------------------------------------------------------------------


def test_c11_heisenberg_trivial_symmetric_part(H5, verdict):
    F = H5.twist_x
    sep = T.separate_symmetric_antisymmetric(F.realized)
    verdict(11, "Heisenberg(5), s0 = 1", sep.symmetric.is_one() and sep.antisymmetric.realized == F.realized)


def test_c11_order24_trivial_alpha(quad2, verdict):
    s0 = symmetric_twist_of(x=quad2.x)
    sep = T.separate_symmetric_antisymmetric(s0)
    verdict(11, "order 24, s0 with trivial alpha", sep.symmetric == s0 and sep.antisymmetric.is_trivial())


@pytest.mark.xfail(strict=True, reason="every invariant alternating form on the order-24 group has exponent 2, "
                                       "so F_alpha is itself symmetric and the factors are not unique")
def test_c11_order24_nontrivial_alpha(asp2, quad2, verdict):
    s0 = symmetric_twist_of(x=quad2.x)
    F = T.FormTwist(asp2.group, PairingForm(asp2.structure, np.array([[0, 1], [1, 0]])))
    sep = T.separate_symmetric_antisymmetric(s0 * F.realized)
    verdict(11, "order 24, s0 * F_alpha with alpha nontrivial [expected FAIL]",
            sep.symmetric == s0 and sep.antisymmetric.realized == F.realized)


# --- 12 ------------------------------------------------------------------------------------


def test_c12_skew_group_algebra(H5, verdict):
    S = std_structure([5, 5])
    r1 = T.skew_group_algebra_iso_check(PairingForm(S, np.array([[0, 1], [-1, 0]])))
    r2 = T.skew_group_algebra_iso_check(H5.twist_x.form)
    ok = r1["ok"] and r2["ok"] and r1["pairs"] == r2["pairs"] == 625
    verdict(12, "l_chi *_F l_psi = b(chi, psi) l_(chi psi)", ok, f"{r1['pairs']} + {r2['pairs']} pairs")
