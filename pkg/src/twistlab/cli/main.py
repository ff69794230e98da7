"""The ``twistlab`` command.

Exit codes: 0 pass, 1 expectation failure, 2 internal-consistency error,
3 usage, parse or cap error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .. import hopf
from .. import twists as T
from ..abelian import abelian_invariants, enumerate_invariant_forms
from ..algebra import TripleTensorCap
from ..classpreserving import NoConjugator, find_conjugator, symmetric_twist_of
from ..groups import (
    CapExceeded,
    ClosureTooLarge,
    GroupMorphism,
    automorphism_group,
    class_preserving_filter,
    enumerate_normal_abelian_subgroups,
    fingerprint,
    set_closure_cache,
)
from ..specfile import SpecError, format_twist, load_group, load_twist
from .cache import ArrayCache
from .config import ConfigError, load_config
from .report import Report, Step, plain, render
from .scenario import ScenarioError, apply_params, builtin_scenario, parse_scenario, run_scenario

log = logging.getLogger("twistlab")

EXIT_PASS, EXIT_FAIL, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", help="INI file with a [twistlab] section")
    g.add_argument("--no-cache", action="store_true", help="neither read nor write the on-disk cache")
    g.add_argument("--cache-dir")
    for key in ("table-cap", "closure-cap", "aut-cap", "enum-cap", "triple-tensor-cap", "seed",
                "conductor-multiplier"):
        g.add_argument(f"--{key}", type=int, default=None)
    fmt = g.add_mutually_exclusive_group()
    fmt.add_argument("--machine", dest="fmt", action="store_const", const="machine")
    fmt.add_argument("--human", dest="fmt", action="store_const", const="human")
    g.add_argument("-o", "--output", help="write the report here instead of stdout")
    g.add_argument("--timings", action="store_true", help="record wall-clock time per step")
    g.add_argument("-v", "--verbose", action="store_true", help="log cache activity to stderr")

    ap = argparse.ArgumentParser(prog="twistlab",
                                 description="Invariant twists of finite group algebras: scenarios and checks.")
    sub = ap.add_subparsers(dest="verb", required=True)
    r = sub.add_parser("run", parents=[common], help="run a builtin scenario or a scenario file")
    r.add_argument("scenario")
    r.add_argument("--p", type=int)
    r.add_argument("--n", type=int)
    r.add_argument("--divisors")
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a scenario parameter")
    e = sub.add_parser("enumerate", parents=[common], help="list objects attached to a group")
    e.add_argument("groupfile")
    e.add_argument("what", choices=["normal-abelian", "forms", "triangular", "twists"])
    v = sub.add_parser("verify-twist", parents=[common], help="check a twist file against its group")
    v.add_argument("groupfile")
    v.add_argument("twistfile")
    for name in ("compose", "commutator"):
        c = sub.add_parser(name, parents=[common], help=f"{name} of two twists on one group")
        c.add_argument("twist1")
        c.add_argument("twist2")
        c.add_argument("--group", help="group file, when the twist files carry none")
    cp = sub.add_parser("classpreserving", parents=[common], help="class-preserving automorphisms and their twists")
    cp.add_argument("groupfile")
    rp = sub.add_parser("report", parents=[common], help="re-render a machine-readable report")
    rp.add_argument("file")
    return ap


def _config(args):
    overrides = {k: getattr(args, k, None) for k in ("table_cap", "closure_cap", "aut_cap", "enum_cap",
                                                      "triple_tensor_cap", "seed", "conductor_multiplier",
                                                      "cache_dir")}
    return load_config(args.config, overrides)


def _single(name: str, cfg, values: dict, *, ok: bool | None = None, params=None) -> Report:
    st = Step(name, status="unchecked" if ok is None else ("pass" if ok else "fail"), values=plain(values))
    return Report(name, cfg.snapshot(), [st], params=params or {}, exit_code=0 if ok is not False else 1)


# --- verbs ----------------------------------------------------------------------------


def cmd_run(args, cfg) -> Report:
    overrides = {k: getattr(args, k) for k in ("p", "n", "divisors") if getattr(args, k) is not None}
    for item in args.set:
        k, eq, v = item.partition("=")
        if not eq:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[k] = v
    path = Path(args.scenario)
    if path.is_file():
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise UsageError(f"{path}: cannot read scenario: {exc}") from None
        sc = apply_params(parse_scenario(text, source=str(path)), overrides)
    else:
        sc = builtin_scenario(args.scenario, overrides)
    return run_scenario(sc, cfg, timings=args.timings)


def _structure_row(A) -> dict:
    S = abelian_invariants(A)
    return {"order": A.order, "invariants": list(S.divisors), "members": A.members.tolist()}


def cmd_enumerate(args, cfg) -> Report:
    gs = load_group(args.groupfile, cfg.caps())
    G = gs.group
    if G.table is None:
        G = G.materialize(cfg.table_cap)
    what = args.what
    if what == "normal-abelian":
        subs = enumerate_normal_abelian_subgroups(G, cap=cfg.table_cap)
        values = {"count": len(subs), "subgroups": [_structure_row(A) for A in subs]}
    elif what == "forms":
        rows = []
        for A in enumerate_normal_abelian_subgroups(G, cap=cfg.table_cap):
            if A.order == 1:
                continue
            S = abelian_invariants(A)
            for b in enumerate_invariant_forms(S, G, require=("alternating", "nondegenerate"), cap=cfg.enum_cap):
                rows.append({"subgroup": A.members.tolist(), "form": b.serialize()})
        values = {"count": len(rows), "forms": rows}
    else:
        tri = T.enumerate_triangular_structures(G, cap=cfg.table_cap, enum_cap=cfg.enum_cap)
        if what == "triangular":
            rows = [{"subgroup": A.members.tolist(), "form": a.serialize()} for A, a in tri]
            values = {"count": len(rows), "structures": rows}
        else:
            rows = []
            for A, alpha in tri:
                if A.order == 1:
                    continue
                F = T.FormTwist(G, alpha)
                rows.append({**F.serialize(), "group": gs.text, "twist_file": format_twist(F)})
            values = {"count": len(rows), "twists": rows}
    return _single(f"enumerate {what}", cfg, values, params={"group": gs.text})


def _verify(F: T.FormTwist, cfg) -> dict:
    R = F.realized
    rep = hopf.drinfeld_conditions_check(R, cap=cfg.triple_tensor_cap, seed=cfg.seed)
    flags = F.flags().as_dict()
    e = F.form.exponent
    # the realized element does not depend on the ambient cyclotomic field
    wide = T.group_sum_twist(F.form, conductor=e * cfg.conductor_multiplier)
    return {
        "twist": F.serialize(),
        "flags": flags,
        "drinfeld": rep.as_dict(),
        "invariant": hopf.invariance_check(R),
        "conductor_independent": wide == R,
        "ok": rep.ok and flags.get("bimultiplicative", True) and hopf.invariance_check(R),
    }


def cmd_verify_twist(args, cfg) -> Report:
    gs = load_group(args.groupfile, cfg.caps())
    _, F = load_twist(args.twistfile, gs, cfg.caps())
    values = _verify(F, cfg)
    return _single("verify-twist", cfg, values, ok=bool(values["ok"]), params={"group": gs.text})


def _two_twists(args, cfg):
    gs = load_group(args.group, cfg.caps()) if args.group else None
    gs, F1 = load_twist(args.twist1, gs, cfg.caps())
    gs, F2 = load_twist(args.twist2, gs, cfg.caps())
    return gs, F1, F2


def cmd_compose(args, cfg) -> Report:
    gs, F1, F2 = _two_twists(args, cfg)
    cd = T.circ_data(F1, F2, seed=cfg.seed)
    values = {"twist": cd.twist.serialize(), "twist_file": format_twist(cd.twist, gs),
              "product_order": cd.product_order, "flags": cd.flags.as_dict(),
              "pointwise_bimultiplicative": cd.pointwise_bimultiplicative,
              "factorization_samples": cd.factorization_samples}
    if F1.ambient.order <= cfg.table_cap:
        sq = T.circ_square_verify(F1, F2, cd.twist)
        values["square"] = {"status": sq["status"], "branch": sq["branch"]}
    return _single("compose", cfg, values, params={"group": gs.text})


def cmd_commutator(args, cfg) -> Report:
    gs, F1, F2 = _two_twists(args, cfg)
    comm = T.commutator_twist(F1, F2)
    values: dict = {"commutator_nnz": comm.nnz, "is_one": comm.is_one()}
    ok = True
    try:
        c = T.triform_c(F1, F2)
    except T.TriformError as exc:
        values["triform"] = f"unavailable: {exc}"
    else:
        values["triform"] = {"modulus": c.modulus, "table": c.table.tolist(), "symmetric": c.is_symmetric(),
                             "trimultiplicative": c.is_trimultiplicative()}
        values["formula"] = T.commutator_formula_check(F1, F2)
        ok = bool(values["formula"])
        try:
            sol = T.solve_u(c)
        except ValueError as exc:
            values["solve_u"] = f"unavailable: {exc}"
        else:
            ver = T.verify_solve_u(sol, F1, F2)
            values["solve_u"] = {"exponents": sol.exponents.tolist(), "modulus": sol.modulus, **ver}
            ok &= bool(ver["coboundary_equals_commutator"])
    return _single("commutator", cfg, values, ok=ok, params={"group": gs.text})


def _automorphisms(G, cfg, cache: ArrayCache | None):
    if G.table is None:
        G = G.materialize(cfg.aut_cap)
    key = f"aut|{G.order}|{hashlib.sha256(np.ascontiguousarray(G.table).tobytes()).hexdigest()}|{cfg.aut_cap}"
    rows = cache.load(key) if cache is not None else None
    if rows is None:
        rows = np.array([a.images for a in automorphism_group(G, cap=cfg.aut_cap)], dtype=np.int64)
        if cache is not None:
            cache.store(key, rows)
    return G, [GroupMorphism(G, G, r) for r in rows]


def cmd_classpreserving(args, cfg, cache) -> Report:
    gs = load_group(args.groupfile, cfg.caps())
    G, auts = _automorphisms(gs.group, cfg, cache)
    info = class_preserving_filter(auts, G)
    inner = {a.images.tobytes() for a in info.inner}
    # one representative per coset phi Inn(G), the least in lexicographic order
    reps, covered = [], set()
    for phi in sorted(info.class_preserving, key=lambda a: a.images.tolist()):
        if phi.images.tobytes() in covered:
            continue
        coset = {phi.compose(i).images.tobytes() for i in info.inner}
        covered |= coset
        if phi.images.tobytes() not in inner:
            reps.append(phi)
    outer = []
    for phi in reps:
        row: dict = {"images_of_generators": [int(phi.images[g]) for g in G.generators]}
        try:
            x = find_conjugator(phi, seed=cfg.seed)
        except NoConjugator as exc:
            row["conjugator"] = f"none: {exc}"
        else:
            F = symmetric_twist_of(x=x)
            row["conjugator_nnz"] = x.nnz
            row["symmetric_twist_nnz"] = F.nnz
            row["symmetric_twist_trivial"] = F.is_one()
        outer.append(row)
    values = {"automorphisms": len(auts), "class_preserving": info.aut_cl_order, "inner": info.inn_order,
              "outer_class_preserving": info.out_cl_order, "outer_representatives": outer,
              "fingerprint": fingerprint(G).as_dict()}
    return _single("classpreserving", cfg, values, params={"group": gs.text})


def cmd_report(args) -> dict:
    try:
        doc = json.loads(Path(args.file).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"{args.file}: cannot read report: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.file}:{exc.lineno}: not a machine-readable report: {exc.msg}") from None
    if not isinstance(doc, dict) or "steps" not in doc:
        raise UsageError(f"{args.file}: not a twistlab report")
    return doc


# --- entry point ----------------------------------------------------------------------------


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    handler = None
    if args.verbose:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        log.addHandler(handler)
        log.setLevel(logging.INFO)
    try:
        return _dispatch(args)
    finally:
        if handler is not None:
            log.removeHandler(handler)


def _dispatch(args) -> int:
    fmt = args.fmt or "human"
    try:
        if args.verb == "report":
            doc = cmd_report(args)
            _emit(render(doc, fmt), args.output)
            return int(doc.get("exit_code", 0))
        cfg = _config(args)
        cache = None if args.no_cache else ArrayCache(cfg.cache_dir, "v1")
        set_closure_cache(cache)
        t0 = time.perf_counter()
        try:
            if args.verb == "run":
                rep = cmd_run(args, cfg)
            elif args.verb == "enumerate":
                rep = cmd_enumerate(args, cfg)
            elif args.verb == "verify-twist":
                rep = cmd_verify_twist(args, cfg)
            elif args.verb == "compose":
                rep = cmd_compose(args, cfg)
            elif args.verb == "commutator":
                rep = cmd_commutator(args, cfg)
            else:
                rep = cmd_classpreserving(args, cfg, cache)
        finally:
            set_closure_cache(None)
        if args.timings:
            rep.timings = rep.timings or {}
            rep.timings["total"] = round(time.perf_counter() - t0, 3)
        if cache is not None:
            log.info("cache hits=%d misses=%d", cache.hits, cache.misses)
        _emit(render(rep.as_dict(), fmt), args.output)
        if rep.exit_code == EXIT_INTERNAL:
            print("twistlab: INTERNAL CONSISTENCY ERROR, see the report", file=sys.stderr)
        return rep.exit_code
    except T.InternalConsistencyError as exc:
        print(f"twistlab: INTERNAL CONSISTENCY ERROR: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UsageError, ScenarioError, SpecError, ConfigError) as exc:
        print(f"twistlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapExceeded, ClosureTooLarge, TripleTensorCap, OverflowError) as exc:
        print(f"twistlab: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"twistlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
