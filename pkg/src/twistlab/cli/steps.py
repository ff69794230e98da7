"""Named scenario operations and the builtin scenarios.

An operation takes the run context, the config and keyword arguments, and
returns a flat-ish dict of JSON leaves.  Objects later steps need are kept
in the context under fixed names.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .. import constructions as C
from .. import fourier, hopf
from .. import twists as T
from ..abelian import AbelianStructure
from ..algebra import GroupRingElement, element
from ..classpreserving import h1_brute_force, h1_detector
from ..cyclotomic import as_root_exponent, mth_root_in_mu, root_of_unity
from ..groups import Subgroup, center, closure_indices, commutator_subgroup, fingerprint, fingerprints_differ

OPS: dict[str, Callable] = {}


def op(name: str):
    def deco(fn):
        OPS[name] = fn
        return fn

    return deco


class StepError(RuntimeError):
    pass


def _need(ctx, key):
    if key not in ctx:
        raise StepError(f"step needs {key!r} from an earlier step")
    return ctx[key]


# --- Heisenberg ---------------------------------------------------------------------------


@op("heisenberg.build")
def heisenberg_build(ctx, cfg, p: int = 5):
    H = C.heisenberg(int(p))
    ctx["H"] = H
    ctx["G"] = H.group
    return {"order": H.group.order, "center_order": center(H.group).order,
            "classes": len(H.group.classes), "commutator_central": bool(center(H.group).mask[H.c])}


def _twist(ctx, which: str) -> T.FormTwist:
    H = _need(ctx, "H")
    return {"x": H.twist_x, "y": H.twist_y}[which]


@op("twist.axioms")
def twist_axioms(ctx, cfg, which: str = "x"):
    F = _twist(ctx, which)
    rep = hopf.drinfeld_conditions_check(F.realized, cap=cfg.triple_tensor_cap)
    return {**rep.as_dict(), "invariant": hopf.invariance_check(F.realized),
            "antisymmetric": T.is_antisymmetric(F.realized), **F.flags().as_dict()}


@op("twist.presentations")
def twist_presentations(ctx, cfg):
    out = {}
    for w in ("x", "y"):
        F = _twist(ctx, w)
        out[w] = F.realized == F.realized_idempotent()
    return out


@op("heisenberg.commutator")
def heisenberg_commutator(ctx, cfg):
    H = _need(ctx, "H")
    G, p = H.group, H.p
    Fx, Fy = H.twist_x, H.twist_y
    comm = T.commutator_twist(Fx, Fy)
    B = AbelianStructure.from_basis(Subgroup(G, closure_indices(G, [H.c])), [H.c], [p])
    loc = B.local_of_coords(np.arange(p)[:, None])
    # sum eps^(i^2 j + j^2 i) p_j (x) p_i, with p_k the idempotent of chi(c) = eps^k
    E = np.zeros((p, p), dtype=np.int64)
    i, j = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    E[loc[j], loc[i]] = (i * i * j + j * j * i) % p
    display = comm == fourier.diagonal_element([B, B], E, p)
    eta = mth_root_in_mu(root_of_unity(p, 1), 3)
    h = as_root_exponent(eta, p)
    k = np.arange(p)

    def u_with(exps):
        ex = np.zeros(p, dtype=np.int64)
        ex[loc] = exps % p
        return fourier.diagonal_element([B], ex, p)

    c = T.triform_c(Fx, Fy)
    sol = T.solve_u(c)
    ver = T.verify_solve_u(sol, Fx, Fy)
    return {
        "display": display,
        "formula": comm == T.commutator_formula_element(c),
        "eta_exponent": h,
        "u_eta_cubed": hopf.coboundary_of_unit(u_with(-h * k ** 3)) == comm,
        "u_eta_linear": hopf.coboundary_of_unit(u_with(-h * k)) == comm,
        **ver,
    }


@op("twist.circ")
def twist_circ(ctx, cfg, samples: int = 100):
    Fx, Fy = _twist(ctx, "x"), _twist(ctx, "y")
    cd = T.circ_data(Fx, Fy, samples=int(samples), seed=cfg.seed)
    sq = T.circ_square_verify(Fx, Fy, cd.twist)
    return {"support_order": cd.twist.support.order, **cd.flags.as_dict(),
            "factorization_samples": cd.factorization_samples, "square_status": sq["status"],
            "branch": sq["branch"], "alpha": cd.twist.form.serialize()}


@op("twist.skew")
def twist_skew(ctx, cfg):
    r = T.skew_group_algebra_iso_check(_twist(ctx, "x").form)
    return {"pairs": r["pairs"], "ok": r["ok"]}


@op("twist.triangular")
def twist_triangular(ctx, cfg):
    G = _need(ctx, "G")
    tri = T.enumerate_triangular_structures(G, cap=max(cfg.table_cap, G.order), enum_cap=cfg.enum_cap)
    return {"count": len(tri), "by_order": {str(o): sum(1 for A, _ in tri if A.order == o)
                                            for o in sorted({A.order for A, _ in tri})}}


@op("twist.separation")
def twist_separation(ctx, cfg):
    F = _twist(ctx, "x")
    sep = T.separate_symmetric_antisymmetric(F.realized)
    return {"symmetric_is_one": sep.symmetric.is_one(),
            "antisymmetric_matches": sep.antisymmetric.realized == F.realized}


# --- affine symplectic, metaplectic ---------------------------------------------------------


@op("asp.build")
def asp_build(ctx, cfg, n: int = 2):
    A = C.asp(int(n), closure_cap=cfg.closure_cap, materialize_below=cfg.table_cap)
    ctx["asp"] = A
    ctx["G"] = A.group
    return {"order": A.group.order, "A_order": A.A.order, "A_normal": A.A.is_normal,
            "A_abelian": A.A.is_abelian}


@op("metaplectic.lift")
def metaplectic_lift(ctx, cfg):
    A = _need(ctx, "asp")
    L = C.metaplectic_lift(A.group, A.structure, A.dual_beta, materialize_below=cfg.table_cap)
    ctx["lift"] = L
    return {"order": L.group.order, "modulus": L.modulus, "a_copy_normal": L.a_copy().is_normal,
            "quotient_action_matches": L.quotient_action_matches()}


@op("metaplectic.twisted_hom")
def metaplectic_twisted_hom(ctx, cfg, sample: int = 1000):
    L = _need(ctx, "lift")
    n = L.group.order
    els = None
    if n > 512:
        els = np.random.default_rng(cfg.seed).choice(n, size=min(int(sample), n), replace=False)
    r = T.twisted_homomorphism_check(L.twisted_homomorphism(), elements=els, seed=cfg.seed)
    return {k: r[k] for k in ("elements_checked", "pairs_checked", "invertible", "intertwining",
                              "multiplicative", "ok")}


@op("metaplectic.compare")
def metaplectic_compare(ctx, cfg):
    from ..constructions.symplectic import has_complement, quotient_generators

    A, L = _need(ctx, "asp"), _need(ctx, "lift")
    f1, f2 = fingerprint(A.group), fingerprint(L.group)
    qg = quotient_generators(A.group, A.structure.elements, seed=cfg.seed)
    lq = [int(v) for v in L.lift_elements(qg)]
    return {"fingerprints_differ": fingerprints_differ(f1, f2),
            "asp_splits": has_complement(A.group, A.structure.elements, qg),
            "lift_splits": has_complement(L.group, L.a_copy().members, lq)}


# --- quadratic example ------------------------------------------------------------------------


@op("quadratic.build")
def quadratic_build(ctx, cfg, n: int = 2):
    A = ctx.get("asp")
    if A is None or A.n != int(n):
        A = C.asp(int(n), closure_cap=cfg.closure_cap, materialize_below=cfg.table_cap)
        ctx["asp"] = A
    Q = C.quadratic_example(int(n), A)
    ctx["quad"] = Q
    G = A.group
    ok = True
    for g in A.transvection_generators:
        gg = element(G, g)
        ok &= Q.x * gg * Q.x.inverse() * gg.inverse() == element(G, int(Q.psi[g]))
    return {"transvection_identity": C.transvection_identity_holds(int(n)),
            "commutators_realize_psi": bool(ok), "coboundary_feasible": Q.coboundary_feasible}


@op("quadratic.h1")
def quadratic_h1(ctx, cfg, brute_force: bool = True):
    from ..constructions.symplectic import quotient_generators

    Q = _need(ctx, "quad")
    A = Q.asp
    G = A.group
    if G.order <= 512:
        gens = None
    else:
        # two elements that generate G outright keep the search at |A|^2 candidates
        rng = np.random.default_rng(cfg.seed)
        gens = None
        for _ in range(500):
            g = [int(v) for v in rng.integers(G.order, size=2)]
            if len(closure_indices(G, g)) == G.order:
                gens = g
                break
        if gens is None:
            gens = quotient_generators(G, A.structure.elements, seed=cfg.seed) + [int(A.structure.generators[0])]
    R = h1_detector(G, A.A, generators=gens, seed=cfg.seed)
    gl = np.asarray(R.generators)
    cls = R.find(Q.psi[gl])
    out = {"cocycles": R.cocycles, "coboundaries": R.coboundaries, "admissible": R.admissible,
           "classes": R.class_count, "nontrivial_classes": len(R.nontrivial()),
           "psi_class_trivial": cls.is_trivial, "commutators_ok": all(c.commutators_ok for c in R.classes),
           "twists_invariant": all(c.twist_invariant for c in R.classes)}
    if brute_force and G.order <= 512:
        bf = h1_brute_force(G, A.A)
        out["brute_force_classes"] = bf["classes"]
    return out


# --- cubic example ------------------------------------------------------------------------------


@op("cubic.build")
def cubic_build(ctx, cfg):
    ex = C.f243_cubic_example(closure_cap=cfg.closure_cap)
    ctx["cubic"] = ex
    ch = ex.checks
    return {"polynomial": ch["polynomial"], "eps": ch["eps"], "basis_rank": ch["basis_rank"],
            "preserve_tau": all(ch["preserve_tau"].values()), "tau_vvv_zero": ch["tau_vvv_zero"],
            "stabilize_c": {k: v for k, v in ch["stabilize_c"].items()},
            "closure_order": ex.group.order, "subgroup_order": ex.subgroup.order}


@op("cubic.certificate")
def cubic_certificate(ctx, cfg):
    ex = _need(ctx, "cubic")
    cert = C.coboundary_certificate(ex)
    return {"polarization_identity": C.polarization_identity_holds(ex), **cert}


# --- M(C, c) ---------------------------------------------------------------------------------


@op("mcc.build")
def mcc_build(ctx, cfg, divisors: str = "5"):
    divs = [int(d) for d in str(divisors).split(",")]
    M = C.mcc_group(divs, table_cap=max(cfg.table_cap, 4096))
    ctx["mcc"] = M
    ctx["G"] = M.group
    G = M.group
    B = commutator_subgroup(G, M.A1, M.A2)
    n = M.C.order
    chi_part = sorted(M.element(0, 0, c) for c in range(n))
    return {"order": G.order, "A1_normal": M.A1.is_normal, "A2_normal": M.A2.is_normal,
            "commutator_is_chat": B.members.tolist() == chi_part,
            "metabelian": commutator_subgroup(G, *(commutator_subgroup(G, G.whole, G.whole),) * 2).order == 1}


@op("mcc.commutator")
def mcc_commutator(ctx, cfg):
    M = _need(ctx, "mcc")
    F1, F2 = M.twist1, M.twist2
    c = T.triform_c(F1, F2)
    sol = T.solve_u(c)
    ver = T.verify_solve_u(sol, F1, F2)
    return {"formula": T.commutator_formula_check(F1, F2),
            "triform_equals_input": bool(np.array_equal(c.table % c.modulus, M.table % c.modulus)),
            **{k: ver[k] for k in ("pair_identity", "coboundary_equals_commutator", "invariant")}}


# --- builtin scenarios ---------------------------------------------------------------------------

ALL_TRUE = object()  # marker: every boolean value must be true


def _heisenberg(params):
    p = int(params.get("p", 5))
    steps = [
        ("heisenberg.build", {"p": p}, {"order": p ** 3, "center_order": p, "commutator_central": True}),
        ("twist.axioms", {"which": "x"}, {"invertible": True, "counital": True, "cocycle": "pass",
                                          "invariant": True, "antisymmetric": True}),
        ("twist.presentations", {}, {"x": True, "y": True}),
        ("heisenberg.commutator", {}, {"display": True, "formula": True, "u_eta_cubed": True,
                                        "coboundary_equals_commutator": True, "invariant": True,
                                        "pair_identity": True}),
        ("twist.circ", {"samples": 100}, {"alternating": True, "nondegenerate": True, "invariant": True,
                                          "square_status": "exact-equal"}),
        ("twist.skew", {}, {"ok": True}),
        ("twist.separation", {}, {"symmetric_is_one": True, "antisymmetric_matches": True}),
    ]
    if p == 5:
        steps.insert(6, ("twist.triangular", {}, {"count": 25}))
    return {"p": p}, steps


def _asp(params):
    n = int(params.get("n", 2))
    order = {2: 24, 4: 11520}.get(n)
    return {"n": n}, [("asp.build", {"n": n}, {"order": order, "A_order": 2 ** n, "A_normal": True,
                                              "A_abelian": True})]


def _metaplectic(params):
    n = int(params.get("n", 2))
    order = {2: 24, 4: 11520}.get(n)
    differ = n > 2
    return {"n": n}, [
        ("asp.build", {"n": n}, {"order": order}),
        ("metaplectic.lift", {}, {"order": order, "a_copy_normal": True, "quotient_action_matches": True}),
        ("metaplectic.twisted_hom", {"sample": 1000}, {"ok": True}),
        ("metaplectic.compare", {}, {"fingerprints_differ": differ, "asp_splits": True, "lift_splits": not differ}),
    ]


def _quadratic(params):
    n = int(params.get("n", 2))
    # at n = 2 the cocycle is a coboundary (Out_cl of the order-24 group is trivial)
    feasible = n == 2
    return {"n": n}, [
        ("quadratic.build", {"n": n}, {"transvection_identity": True, "commutators_realize_psi": True,
                                       "coboundary_feasible": feasible}),
        ("quadratic.h1", {}, {"psi_class_trivial": feasible, "commutators_ok": True, "twists_invariant": True}),
    ]


def _m11cubic(params):
    return {}, [
        ("cubic.build", {}, {"basis_rank": 5, "preserve_tau": True, "tau_vvv_zero": True,
                             "stabilize_c": {"r^2": True, "s": True, "t": True, "r": False},
                             "closure_order": 7920, "subgroup_order": 660}),
        ("cubic.certificate", {}, {"polarization_identity": True, "non_coboundary_certified": True}),
    ]


def _mcc(params):
    divs = str(params.get("divisors", "5"))
    order = math.prod(int(d) for d in divs.split(",")) ** 3
    return {"divisors": divs}, [
        ("mcc.build", {"divisors": divs}, {"order": order, "A1_normal": True, "A2_normal": True,
                                           "commutator_is_chat": True, "metabelian": True}),
        ("mcc.commutator", {}, {"formula": True, "triform_equals_input": True, "pair_identity": True,
                                "coboundary_equals_commutator": True, "invariant": True}),
    ]


BUILTINS = {
    "heisenberg": _heisenberg,
    "asp": _asp,
    "metaplectic": _metaplectic,
    "quadratic": _quadratic,
    "m11cubic": _m11cubic,
    "mcc": _mcc,
}
