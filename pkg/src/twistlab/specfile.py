"""Text formats for groups and twists.

A group file is UTF-8 text, one directive per line, ``#`` starts a comment::

    group S3
    perm (0 1 2)
    perm (0 1)

Other forms: ``builtin heisenberg p=5``, ``builtin asp n=2``,
``builtin metaplectic n=2``, ``builtin mcc divisors=5``, ``builtin m11``,
``abelian 5 5`` and ``table <n>`` followed by n rows of n indices.
Permutation points are 0-based.

A twist file is an optional group section, a line ``twist``, then::

    basis x c        # element indices or builtin names, or: subgroup <members>
    form
    0 1
    4 0

The form rows are exponents of zeta_e (e the exponent of the subgroup) on
the basis, as in PairingForm.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .abelian import AbelianStructure, PairingForm, abelian_invariants
from .groups import (
    DEFAULT_CLOSURE_CAP,
    FiniteGroup,
    Subgroup,
    abelian_group,
    closure_indices,
    permutation_group,
    table_group,
)
from .twists import FormTwist, twist_from_form


class SpecError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<input>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass
class GroupSpec:
    group: FiniteGroup
    text: str  # canonical text that reproduces the group
    names: dict = field(default_factory=dict)  # builtin element names
    builtin: object = None  # the construction object, when builtin

    def resolve(self, token: str, line: int | None = None, source: str = "<input>") -> int:
        if token in self.names:
            return int(self.names[token])
        try:
            g = int(token)
        except ValueError:
            raise SpecError(f"unknown element {token!r}", line, source) from None
        if not 0 <= g < self.group.order:
            raise SpecError(f"element {g} out of range 0..{self.group.order - 1}", line, source)
        return g


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _params(tokens, no, source) -> dict:
    out = {}
    for t in tokens:
        if "=" not in t:
            raise SpecError(f"expected key=value, got {t!r}", no, source)
        k, v = t.split("=", 1)
        out[k] = v
    return out


def _int(v: str, what: str, no, source) -> int:
    try:
        return int(v)
    except ValueError:
        raise SpecError(f"{what} must be an integer, got {v!r}", no, source) from None


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, no=None, source="<input>") -> list[list[int]]:
    rest = _CYCLE.sub("", text).strip()
    if rest:
        raise SpecError(f"bad cycle notation near {rest!r}", no, source)
    cycles = []
    for body in _CYCLE.findall(text):
        pts = [_int(t, "point", no, source) for t in body.replace(",", " ").split()]
        if len(set(pts)) != len(pts) or any(p < 0 for p in pts):
            raise SpecError(f"bad cycle ({body})", no, source)
        cycles.append(pts)
    return cycles


def _perm_from_cycles(cycles, degree: int) -> list[int]:
    p = list(range(degree))
    for c in cycles:
        for i, a in enumerate(c):
            p[a] = c[(i + 1) % len(c)]
    return p


def _builtin(kind: str, params: dict, no, source, caps: dict) -> GroupSpec:
    from . import constructions as C

    closure_cap = caps.get("closure_cap", DEFAULT_CLOSURE_CAP)
    table_cap = caps.get("table_cap", 512)
    if kind == "heisenberg":
        p = _int(params.get("p", "5"), "p", no, source)
        try:
            H = C.heisenberg(p, materialize_below=max(table_cap, 4096))
        except ValueError as exc:
            raise SpecError(str(exc), no, source) from None
        return GroupSpec(H.group, f"builtin heisenberg p={p}", {"x": H.x, "y": H.y, "c": H.c}, H)
    if kind in ("asp", "metaplectic"):
        n = _int(params.get("n", "2"), "n", no, source)
        try:
            A = C.asp(n, closure_cap=closure_cap, materialize_below=table_cap)
        except ValueError as exc:
            raise SpecError(str(exc), no, source) from None
        if kind == "asp":
            return GroupSpec(A.group, f"builtin asp n={n}", {}, A)
        L = C.metaplectic_lift(A.group, A.structure, A.dual_beta, materialize_below=table_cap)
        L.group.spec = f"builtin metaplectic n={n}"
        return GroupSpec(L.group, L.group.spec, {}, L)
    if kind == "mcc":
        divs = [_int(d, "divisor", no, source) for d in params.get("divisors", "5").split(",")]
        try:
            M = C.mcc_group(divs, table_cap=max(table_cap, 4096))
        except ValueError as exc:
            raise SpecError(str(exc), no, source) from None
        return GroupSpec(M.group, M.group.spec, {}, M)
    if kind == "m11":
        ex = C.f243_cubic_example(closure_cap=closure_cap)
        ex.group.spec = "builtin m11"
        return GroupSpec(ex.group, "builtin m11", {}, ex)
    raise SpecError(f"unknown builtin {kind!r}", no, source)


def parse_group(text: str, *, source: str = "<input>", caps: dict | None = None) -> GroupSpec:
    caps = caps or {}
    name = None
    perms: list[tuple[int, list]] = []
    result: GroupSpec | None = None
    lines = list(_lines(text))
    i = 0
    while i < len(lines):
        no, line = lines[i]
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "group":
            if not rest:
                raise SpecError("group needs a name", no, source)
            name = rest
        elif word == "perm":
            perms.append((no, parse_cycles(rest, no, source)))
        elif word == "builtin":
            toks = rest.split()
            if not toks:
                raise SpecError("builtin needs a kind", no, source)
            result = _builtin(toks[0], _params(toks[1:], no, source), no, source, caps)
        elif word == "abelian":
            divs = [_int(t, "divisor", no, source) for t in rest.split()]
            if any(d < 1 for d in divs):
                raise SpecError("divisors must be positive", no, source)
            G = abelian_group(divs)
            result = GroupSpec(G, "abelian " + " ".join(map(str, divs)))
        elif word == "table":
            n = _int(rest, "table size", no, source)
            if len(lines) < i + 1 + n:
                raise SpecError(f"table {n} needs {n} rows", no, source)
            rows = []
            for r in range(n):
                rno, rline = lines[i + 1 + r]
                row = [_int(t, "table entry", rno, source) for t in rline.split()]
                if len(row) != n:
                    raise SpecError(f"row has {len(row)} entries, expected {n}", rno, source)
                rows.append(row)
            i += n
            try:
                G = table_group(np.array(rows), name=name or "G")
            except (ValueError, AssertionError) as exc:
                raise SpecError(f"not a group table: {exc}", no, source) from None
            body = "\n".join(" ".join(map(str, r)) for r in rows)
            result = GroupSpec(G, f"table {n}\n{body}")
        else:
            raise SpecError(f"unknown directive {word!r}", no, source)
        i += 1
    if perms:
        if result is not None:
            raise SpecError("perm lines cannot be combined with another group form", perms[0][0], source)
        degree = 1 + max((p for _, cs in perms for c in cs for p in c), default=0)
        gens = [_perm_from_cycles(cs, degree) for _, cs in perms]
        text_out = "\n".join(f"perm {''.join('(' + ' '.join(map(str, c)) + ')' for c in cs) or '()'}"
                             for _, cs in perms)
        G = permutation_group(gens, degree, cap=caps.get("closure_cap", DEFAULT_CLOSURE_CAP),
                              name=name or "G", spec=text_out,
                              materialize_below=caps.get("table_cap", 512))
        result = GroupSpec(G, text_out)
    if result is None:
        raise SpecError("no group given", None, source)
    if name:
        result.group.name = name
    return result


def load_group(path, caps: dict | None = None) -> GroupSpec:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read: {exc.strerror}", None, str(p)) from None
    return parse_group(text, source=str(p), caps=caps)


# --- twists ---------------------------------------------------------------------------


def _split_twist(text: str):
    lines = text.splitlines()
    for k, raw in enumerate(lines):
        if raw.split("#", 1)[0].strip() == "twist":
            return "\n".join(lines[:k]), k + 1, lines[k + 1:]
    return "", 0, lines


def parse_twist(text: str, group: GroupSpec | None = None, *, source: str = "<input>",
                caps: dict | None = None) -> tuple[GroupSpec, FormTwist]:
    head, offset, body = _split_twist(text)
    if head.strip():
        own = parse_group(head, source=source, caps=caps)
        if group is not None and own.text != group.text:
            raise SpecError("twist file names a different group than the one given", None, source)
        group = group or own
    if group is None:
        raise SpecError("no group: give a group file or a group section before 'twist'", None, source)
    G = group.group
    basis = members = None
    rows: list[list[int]] = []
    in_form = False
    form_line = None
    for no, line in _lines("\n".join(body)):
        no += offset
        word, _, rest = line.partition(" ")
        if word == "basis":
            basis = [group.resolve(t, no, source) for t in rest.split()]
            in_form = False
        elif word == "subgroup":
            members = [group.resolve(t, no, source) for t in rest.split()]
            in_form = False
        elif word == "form":
            in_form, form_line = True, no
        elif in_form:
            rows.append([_int(t, "form entry", no, source) for t in line.split()])
        else:
            raise SpecError(f"unknown directive {word!r}", no, source)
    if basis is None and members is None:
        raise SpecError("twist needs a basis or subgroup line", None, source)
    if basis is not None:
        A = Subgroup(G, closure_indices(G, basis))
        if not A.is_abelian:
            raise SpecError("basis elements do not commute", None, source)
        divs = [int(G.element_orders[g]) for g in basis]
        S = AbelianStructure.from_basis(A, basis, divs)
        if S.order != A.order:
            raise SpecError("basis is not independent", None, source)
    else:
        A = Subgroup(G, closure_indices(G, members))
        if not A.is_abelian:
            raise SpecError("subgroup is not abelian", None, source)
        S = abelian_invariants(A)
    r = S.rank
    if len(rows) != r or any(len(x) != r for x in rows):
        raise SpecError(f"form must be {r}x{r} on the basis", form_line, source)
    try:
        beta = PairingForm(S, np.array(rows, dtype=np.int64).reshape(r, r))
        T = twist_from_form(A, beta, ambient=G)
    except ValueError as exc:
        raise SpecError(str(exc), form_line, source) from None
    return group, T


def load_twist(path, group: GroupSpec | None = None, caps: dict | None = None):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read: {exc.strerror}", None, str(p)) from None
    return parse_twist(text, group, source=str(p), caps=caps)


def format_twist(T: FormTwist, group: GroupSpec | None = None) -> str:
    """Twist file text; the group section is included when known."""
    S = T.structure
    out = []
    if group is not None:
        out += [group.text, "twist"]
    else:
        out.append("twist")
    out.append("basis " + " ".join(str(int(g)) for g in S.generators))
    out.append("form")
    out += [" ".join(str(int(v)) for v in row) for row in T.form.matrix]
    return "\n".join(out) + "\n"


__all__ = [
    "GroupSpec",
    "SpecError",
    "format_twist",
    "load_group",
    "load_twist",
    "parse_cycles",
    "parse_group",
    "parse_twist",
]
