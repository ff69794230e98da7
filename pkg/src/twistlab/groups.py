"""Finite groups on element indices, with table and structured backends.

Elements are integers ``0..order-1`` ordered lexicographically by their
encoding.  A structured group keeps an integer code per element plus a
batched multiplication rule; a table group additionally keeps the full
Cayley table.  Every algorithm below works on index arrays and vectorises
over elements.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

DEFAULT_TABLE_CAP = 512
DEFAULT_CLOSURE_CAP = 20_000
DEFAULT_AUT_CAP = 512


class ClosureTooLarge(RuntimeError):
    def __init__(self, cap: int, found: int):
        super().__init__(f"closure too large: more than {cap} elements (found {found} so far)")
        self.cap = cap
        self.found = found


class CapExceeded(RuntimeError):
    pass


# --- multiplication rules ---------------------------------------------------


class MulRule:
    """Batched multiplication of integer codes, shape (..., width)."""

    width: int
    radix: int

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def identity(self) -> np.ndarray:
        raise NotImplementedError

    def label(self, code: np.ndarray) -> str:
        return "(" + ",".join(str(int(c)) for c in code) + ")"

    def key(self) -> str:
        """Stable description used for cache keys."""
        return type(self).__name__


class PermutationRule(MulRule):
    """Permutations of 0..n-1 as image arrays; (a*b)(i) = a(b(i))."""

    def __init__(self, degree: int):
        self.width = degree
        self.radix = degree

    def mul(self, x, y):
        return np.take_along_axis(x, y, axis=-1)

    def identity(self):
        return np.arange(self.width, dtype=np.int64)

    def label(self, code):
        return cycle_notation(code)

    def key(self):
        return f"perm{self.width}"


class MatrixRule(MulRule):
    """d x d matrices over F_p, flattened row-major."""

    def __init__(self, p: int, d: int):
        self.p = p
        self.d = d
        self.width = d * d
        self.radix = p

    def mul(self, x, y):
        d = self.d
        shape = x.shape
        a = x.reshape(-1, d, d)
        b = y.reshape(-1, d, d)
        return (np.matmul(a, b) % self.p).reshape(shape)

    def identity(self):
        return np.eye(self.d, dtype=np.int64).ravel()

    def label(self, code):
        rows = np.asarray(code).reshape(self.d, self.d)
        return "[" + ";".join(" ".join(str(int(v)) for v in r) for r in rows) + "]"

    def key(self):
        return f"mat{self.p}x{self.d}"


class AdditiveRule(MulRule):
    """Direct sum of cyclic groups Z/d_1 + ... + Z/d_r in coordinates."""

    def __init__(self, divisors: Sequence[int]):
        self.divisors = np.asarray(divisors, dtype=np.int64)
        self.width = len(divisors)
        self.radix = int(max(divisors)) if len(divisors) else 1

    def mul(self, x, y):
        return (x + y) % self.divisors

    def identity(self):
        return np.zeros(self.width, dtype=np.int64)

    def key(self):
        return "add" + "x".join(str(int(d)) for d in self.divisors)


def cycle_notation(perm: Sequence[int]) -> str:
    perm = [int(v) for v in perm]
    seen = [False] * len(perm)
    parts = []
    for i in range(len(perm)):
        if seen[i] or perm[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = perm[j]
        parts.append("(" + " ".join(str(c) for c in cyc) + ")")
    return "".join(parts) or "()"


# --- key packing ------------------------------------------------------------


def _packer(radix: int, width: int):
    big = radix**width >= (1 << 63)
    weights = [radix ** (width - 1 - i) for i in range(width)]

    def pack(codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes)
        flat = codes.reshape(-1, width)
        if big:
            out = np.zeros(flat.shape[0], dtype=object)
            for i, w in enumerate(weights):
                out = out + flat[:, i].astype(object) * w
        else:
            out = np.zeros(flat.shape[0], dtype=np.int64)
            for i, w in enumerate(weights):
                out += flat[:, i].astype(np.int64) * np.int64(w)
        return out.reshape(codes.shape[:-1])

    return pack


# --- the group --------------------------------------------------------------


class FiniteGroup:
    """A finite group on indices 0..order-1."""

    def __init__(
        self,
        order: int,
        *,
        table: np.ndarray | None = None,
        codes: np.ndarray | None = None,
        rule: MulRule | None = None,
        identity: int | None = None,
        generators: Sequence[int] | None = None,
        name: str = "G",
        labels: Sequence[str] | None = None,
        spec: str | None = None,
    ):
        if table is None and (codes is None or rule is None):
            raise ValueError("need a table or codes plus a rule")
        self.order = int(order)
        self.name = name
        self.spec = spec or name
        self.rule = rule
        self.codes = None if codes is None else np.asarray(codes, dtype=np.int64)
        self._labels = list(labels) if labels is not None else None
        if self.codes is not None:
            self._pack = _packer(rule.radix, rule.width)
            self._keys = self._pack(self.codes)
            if len(self._keys) > 1 and not np.all(self._keys[1:] > self._keys[:-1]):
                raise ValueError("codes must be sorted and distinct")
        if table is not None:
            table = np.asarray(table)
            dt = np.int16 if self.order < (1 << 15) else np.int32
            self.table = table.astype(dt)
            self.table.setflags(write=False)
        else:
            self.table = None
        if identity is None:
            identity = self._find_identity()
        self.identity = int(identity)
        if generators is None:
            generators = greedy_generators(self, np.arange(self.order))
        self.generators = tuple(int(g) for g in generators)

    # basic structure
    @property
    def backend(self) -> str:
        return "table" if self.table is not None else "structured"

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order}, backend={self.backend})"

    def _find_identity(self) -> int:
        if self.codes is not None:
            return int(self.lookup(self.rule.identity()[None, :])[0])
        idx = np.arange(self.order)
        for e in range(self.order):
            if np.array_equal(self.table[e], idx):
                return e
        raise ValueError("table has no identity")

    def lookup(self, codes: np.ndarray) -> np.ndarray:
        """Element indices of the given codes; KeyError if a code is foreign."""
        keys = self._pack(codes)
        pos = np.searchsorted(self._keys, keys)
        pos = np.minimum(pos, self.order - 1)
        if not np.all(self._keys[pos] == keys):
            raise KeyError("code not in group")
        return pos.astype(np.int64)

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a)
        b = np.asarray(b)
        if self.table is not None:
            return self.table[a, b].astype(np.int64)
        a, b = np.broadcast_arrays(a, b)
        shape = a.shape
        prod = self.rule.mul(self.codes[a.ravel()], self.codes[b.ravel()])
        return self.lookup(prod).reshape(shape)

    @cached_property
    def inverses(self) -> np.ndarray:
        if self.table is not None:
            e = self.identity
            rows, cols = np.nonzero(self.table == e)
            inv = np.empty(self.order, dtype=np.int64)
            inv[rows] = cols
            return inv
        orders = self.element_orders
        return self.power(np.arange(self.order), orders - 1)

    def inv(self, a) -> np.ndarray:
        return self.inverses[np.asarray(a)]

    def power(self, a, k) -> np.ndarray:
        """Vectorised a**k for index arrays a and non-negative exponent arrays k."""
        a = np.asarray(a, dtype=np.int64)
        k = np.broadcast_to(np.asarray(k, dtype=np.int64), a.shape).copy()
        if np.any(k < 0):
            neg = k < 0
            a = a.copy()
            a[neg] = self.inv(a[neg])
            k[neg] = -k[neg]
        result = np.full(a.shape, self.identity, dtype=np.int64)
        base = a.copy()
        while np.any(k > 0):
            m = (k & 1).astype(bool)
            if m.any():
                result[m] = self.mul(result[m], base[m])
            k >>= 1
            live = k > 0
            if live.any():
                base[live] = self.mul(base[live], base[live])
        return result

    def conj(self, g, a) -> np.ndarray:
        """g a g^-1."""
        return self.mul(self.mul(g, a), self.inv(g))

    def commutator(self, a, b) -> np.ndarray:
        """a b a^-1 b^-1."""
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))

    def label(self, i: int) -> str:
        if self._labels is not None:
            return self._labels[i]
        if self.codes is not None:
            return self.rule.label(self.codes[i])
        return str(i)

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        base = np.arange(n, dtype=np.int64)
        cur = base.copy()
        k = 1
        todo = np.arange(n)
        while todo.size:
            hit = cur == self.identity
            orders[todo[hit]] = k
            todo = todo[~hit]
            cur = cur[~hit]
            if todo.size == 0:
                break
            cur = self.mul(cur, base[todo])
            k += 1
            if k > n:
                raise ValueError("element order exceeds group order; bad multiplication")
        return orders

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.element_orders))

    def materialize(self, cap: int = DEFAULT_TABLE_CAP) -> "FiniteGroup":
        """Return a table-backed copy (same element order)."""
        if self.table is not None:
            return self
        if self.order > cap:
            raise CapExceeded(f"order {self.order} exceeds table cap {cap}")
        idx = np.arange(self.order)
        table = self.mul(idx[:, None], idx[None, :])
        return FiniteGroup(
            self.order,
            table=table,
            codes=self.codes,
            rule=self.rule,
            identity=self.identity,
            generators=self.generators,
            name=self.name,
            labels=self._labels,
            spec=self.spec,
        )

    def element(self, code) -> int:
        return int(self.lookup(np.asarray(code, dtype=np.int64)[None, :])[0])

    # cached structural data
    @cached_property
    def classes(self) -> list[np.ndarray]:
        return conjugacy_classes(self)

    @cached_property
    def class_index(self) -> np.ndarray:
        idx = np.empty(self.order, dtype=np.int64)
        for i, c in enumerate(self.classes):
            idx[c] = i
        return idx

    @cached_property
    def class_sizes(self) -> np.ndarray:
        sizes = np.array([len(c) for c in self.classes], dtype=np.int64)
        return sizes[self.class_index]

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, np.arange(self.order), self.generators)

    @cached_property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, np.array([self.identity]), ())


# --- construction -----------------------------------------------------------


_closure_cache = None


def set_closure_cache(cache) -> None:
    """Install an object with ``load(key)`` / ``store(key, array)`` used by closure_codes."""
    global _closure_cache
    _closure_cache = cache


def closure_codes(gens: np.ndarray, rule: MulRule, cap: int = DEFAULT_CLOSURE_CAP) -> np.ndarray:
    """All products of the generator codes, sorted lexicographically."""
    gens = np.asarray(gens, dtype=np.int64).reshape(-1, rule.width)
    if _closure_cache is None:
        return _closure_codes(gens, rule, cap)
    key = f"closure|{rule.key()}|{cap}|{gens.shape}|{gens.tobytes().hex()}"
    codes = _closure_cache.load(key)
    if codes is None:
        codes = _closure_codes(gens, rule, cap)
        _closure_cache.store(key, codes)
    return codes


def _closure_codes(gens: np.ndarray, rule: MulRule, cap: int) -> np.ndarray:
    pack = _packer(rule.radix, rule.width)
    ident = rule.identity()[None, :]
    known = pack(ident)
    all_codes = [ident]
    frontier = ident
    ng = len(gens)
    while len(frontier):
        a = np.repeat(frontier, ng, axis=0)
        b = np.tile(gens, (len(frontier), 1))
        prod = rule.mul(a, b)
        keys = pack(prod)
        keys, first = np.unique(keys, return_index=True)
        fresh = ~np.isin(keys, known)
        frontier = prod[first[fresh]]
        if len(frontier):
            known = np.union1d(known, keys[fresh])
            all_codes.append(frontier)
            if len(known) > cap:
                raise ClosureTooLarge(cap, len(known))
    codes = np.concatenate(all_codes)
    order = np.argsort(pack(codes), kind="stable")
    return codes[order]


def group_from_generators(
    generators: Sequence,
    rule: MulRule,
    *,
    cap: int = DEFAULT_CLOSURE_CAP,
    name: str = "G",
    spec: str | None = None,
    materialize_below: int | None = None,
) -> FiniteGroup:
    """Closure of permutation or matrix generators under ``rule``."""
    gens = np.array([np.asarray(g, dtype=np.int64).ravel() for g in generators], dtype=np.int64)
    if gens.size == 0:
        gens = rule.identity()[None, :]
    codes = closure_codes(gens, rule, cap)
    G0 = FiniteGroup(len(codes), codes=codes, rule=rule, name=name, spec=spec, generators=[0])
    gen_idx = G0.lookup(gens)
    G = FiniteGroup(len(codes), codes=codes, rule=rule, name=name, spec=spec,
                    generators=list(dict.fromkeys(int(g) for g in gen_idx)))
    if materialize_below is not None and G.order <= materialize_below:
        G = G.materialize(materialize_below)
    return G


def permutation_group(perms: Sequence[Sequence[int]], degree: int | None = None, **kw) -> FiniteGroup:
    if degree is None:
        degree = max((len(p) for p in perms), default=1)
    full = []
    for p in perms:
        p = list(p) + list(range(len(p), degree))
        if sorted(p) != list(range(degree)):
            raise ValueError(f"not a permutation: {p}")
        full.append(p)
    return group_from_generators(full, PermutationRule(degree), **kw)


def matrix_group(mats: Sequence, p: int, **kw) -> FiniteGroup:
    mats = [np.asarray(m, dtype=np.int64) % p for m in mats]
    d = mats[0].shape[0]
    return group_from_generators(mats, MatrixRule(p, d), **kw)


def abelian_group(divisors: Sequence[int], *, name: str | None = None, table_cap: int = 4096) -> FiniteGroup:
    """Z/d_1 + ... + Z/d_r; element index = mixed-radix coordinate index."""
    divisors = [int(d) for d in divisors]
    n = math.prod(divisors)
    rule = AdditiveRule(divisors if divisors else [1])
    grids = np.indices(divisors if divisors else [1]).reshape(len(divisors) or 1, -1).T
    codes = grids.astype(np.int64)
    gens = []
    for i, d in enumerate(divisors):
        if d > 1:
            e = np.zeros(len(divisors), dtype=np.int64)
            e[i] = 1
            gens.append(e)
    label = name or ("Z" + "xZ".join(f"/{d}" for d in divisors) if divisors else "1")
    G = FiniteGroup(n, codes=codes, rule=rule, name=label, spec=f"abelian {' '.join(map(str, divisors))}",
                    generators=[0])
    gidx = [int(G.lookup(g[None, :])[0]) for g in gens]
    G = FiniteGroup(n, codes=codes, rule=rule, name=label, spec=G.spec, generators=gidx)
    if n <= table_cap:
        G = G.materialize(table_cap)
    return G


def cyclic_group(n: int) -> FiniteGroup:
    return abelian_group([n], name=f"Z/{n}")


def table_group(table, *, name: str = "G", labels=None, check: bool = True) -> FiniteGroup:
    table = np.asarray(table, dtype=np.int64)
    n = table.shape[0]
    if table.shape != (n, n):
        raise ValueError("table must be square")
    if check:
        for row in table:
            if sorted(row.tolist()) != list(range(n)):
                raise ValueError("table rows must be permutations")
    G = FiniteGroup(n, table=table, name=name, labels=labels, spec=f"table {n}")
    if check:
        check_axioms(G)
    return G


def direct_product(G: FiniteGroup, H: FiniteGroup, cap: int = DEFAULT_TABLE_CAP) -> FiniteGroup:
    """G x H with index g*|H| + h (table backend)."""
    n = G.order * H.order
    if n > cap:
        raise CapExceeded(f"direct product of order {n} exceeds cap {cap}")
    gi = np.arange(n) // H.order
    hi = np.arange(n) % H.order
    table = G.mul(gi[:, None], gi[None, :]) * H.order + H.mul(hi[:, None], hi[None, :])
    gens = [g * H.order + H.identity for g in G.generators] + [G.identity * H.order + h for h in H.generators]
    return FiniteGroup(n, table=table, generators=gens, name=f"{G.name}x{H.name}",
                       identity=G.identity * H.order + H.identity)


def check_axioms(G: FiniteGroup, *, samples: int = 10_000, seed: int = 0) -> None:
    """Associativity (exhaustive up to 512, sampled above), identity, inverses."""
    n = G.order
    idx = np.arange(n)
    e = G.identity
    if not (np.all(G.mul(e, idx) == idx) and np.all(G.mul(idx, e) == idx)):
        raise ValueError("identity axiom fails")
    inv = G.inv(idx)
    if not (np.all(G.mul(idx, inv) == e) and np.all(G.mul(inv, idx) == e)):
        raise ValueError("inverse axiom fails")
    if n <= DEFAULT_TABLE_CAP and G.table is not None:
        T = G.table.astype(np.int64)
        for a in range(n):
            left = T[T[a][:, None], idx[None, :]]  # (ab)c
            right = T[a][T]  # a(bc)
            if not np.array_equal(left, right):
                raise ValueError("associativity fails")
    else:
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, n, size=(3, samples))
        if not np.array_equal(G.mul(G.mul(a, b), c), G.mul(a, G.mul(b, c))):
            raise ValueError("associativity fails")


# --- subgroups --------------------------------------------------------------


def closure_indices(G: FiniteGroup, gens: Iterable[int], start: Iterable[int] | None = None) -> np.ndarray:
    """Sorted members of the subgroup generated by ``gens`` (and ``start``)."""
    gens = np.unique(np.asarray(list(gens), dtype=np.int64))
    seed = np.unique(np.asarray([G.identity] + list(start or []), dtype=np.int64))
    if gens.size == 0:
        return seed if seed.size == 1 else closure_indices(G, seed)
    known = np.zeros(G.order, dtype=bool)
    known[seed] = True
    frontier = seed
    while frontier.size:
        prod = G.mul(frontier[:, None], gens[None, :]).ravel()
        prod = np.unique(prod)
        fresh = prod[~known[prod]]
        known[fresh] = True
        frontier = fresh
    return np.nonzero(known)[0]


def greedy_generators(G: FiniteGroup, members: np.ndarray) -> list[int]:
    """Small generating set: repeatedly add the highest-order missing element."""
    members = np.asarray(members, dtype=np.int64)
    if len(members) <= 1:
        return []
    orders = G.element_orders[members]
    order_list = members[np.lexsort((members, -orders))]
    gens: list[int] = []
    inside = np.zeros(G.order, dtype=bool)
    inside[G.identity] = True
    for m in order_list:
        if inside[m]:
            continue
        gens.append(int(m))
        inside[:] = False
        inside[closure_indices(G, gens)] = True
        if inside[members].all():
            break
    return gens


@dataclass(frozen=True, eq=False)
class Subgroup:
    """Sorted member set inside a parent group."""

    parent: FiniteGroup
    members: np.ndarray
    generators: tuple = field(default=None)

    def __post_init__(self):
        m = np.unique(np.asarray(self.members, dtype=np.int64))
        object.__setattr__(self, "members", m)
        m.setflags(write=False)
        if self.generators is None:
            object.__setattr__(self, "generators", tuple(greedy_generators(self.parent, m)))
        else:
            object.__setattr__(self, "generators", tuple(int(g) for g in self.generators))

    @classmethod
    def generated(cls, G: FiniteGroup, gens: Iterable[int]) -> "Subgroup":
        gens = [int(g) for g in gens]
        return cls(G, closure_indices(G, gens))

    @property
    def order(self) -> int:
        return len(self.members)

    def __len__(self):
        return self.order

    def __contains__(self, g) -> bool:
        return bool(self.mask[int(g)])

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[self.members] = True
        return m

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and other.parent is self.parent
            and np.array_equal(other.members, self.members)
        )

    def __hash__(self):
        return hash((id(self.parent), self.members.tobytes()))

    def __repr__(self):
        return f"Subgroup(order={self.order} in {self.parent.name})"

    def is_closed(self) -> bool:
        a = self.members
        prod = self.parent.mul(a[:, None], a[None, :])
        return bool(self.mask[prod].all() and self.mask[self.parent.inv(a)].all())

    @cached_property
    def is_normal(self) -> bool:
        G = self.parent
        for g in G.generators:
            if not self.mask[G.conj(g, self.members)].all():
                return False
        return True

    @cached_property
    def is_abelian(self) -> bool:
        G = self.parent
        gens = np.asarray(self.generators, dtype=np.int64)
        if gens.size < 2:
            return True
        return bool(np.all(G.mul(gens[:, None], gens[None, :]) == G.mul(gens[None, :], gens[:, None])))


# --- structural algorithms ---------------------------------------------------


def conjugacy_classes(G: FiniteGroup) -> list[np.ndarray]:
    """Orbits of conjugation, ordered by least member; members sorted."""
    n = G.order
    idx = np.arange(n)
    rows, cols = [], []
    for g in G.generators:
        rows.append(idx)
        cols.append(G.conj(g, idx))
    if not rows:
        return [np.array([i]) for i in idx]
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    classes = [np.sort(part) for part in np.split(order, bounds)]
    classes.sort(key=lambda c: int(c[0]))
    return classes


def center(G: FiniteGroup) -> Subgroup:
    idx = np.arange(G.order)
    ok = np.ones(G.order, dtype=bool)
    for g in G.generators:
        ok &= G.mul(g, idx) == G.mul(idx, g)
    return Subgroup(G, idx[ok])


def normal_closure(G: FiniteGroup, elems: Iterable[int]) -> Subgroup:
    members = closure_indices(G, list(elems))
    while True:
        conj = np.unique(np.concatenate([G.conj(g, members) for g in G.generators] + [members]))
        if len(conj) == len(members):
            return Subgroup(G, members)
        members = closure_indices(G, conj)


def commutator_subgroup(G: FiniteGroup, H: Subgroup, K: Subgroup) -> Subgroup:
    """[H, K], generated by commutators of members (normal if H, K are)."""
    comms = G.commutator(H.members[:, None], K.members[None, :]).ravel()
    return Subgroup(G, closure_indices(G, np.unique(comms)))


def derived_subgroup(G: FiniteGroup) -> Subgroup:
    gens = np.asarray(G.generators, dtype=np.int64)
    if gens.size == 0:
        return G.trivial
    comms = G.commutator(gens[:, None], gens[None, :]).ravel()
    return normal_closure(G, np.unique(comms))


def enumerate_normal_abelian_subgroups(G: FiniteGroup, cap: int = DEFAULT_TABLE_CAP) -> list[Subgroup]:
    """Every normal abelian subgroup exactly once, sorted by (order, members)."""
    if G.table is None:
        raise CapExceeded("enumerate_normal_abelian_subgroups needs the table backend; materialize first")
    if G.order > cap:
        raise CapExceeded(f"order {G.order} exceeds cap {cap}")
    classes = G.classes
    # classes whose members commute pairwise
    good = []
    for i, c in enumerate(classes):
        r = c[0]
        if np.all(G.mul(r, c) == G.mul(c, r)):
            good.append(i)
    cls_mask = [np.zeros(G.order, dtype=bool) for _ in classes]
    for i, c in enumerate(classes):
        cls_mask[i][c] = True
    start = G.trivial
    seen = {start.members.tobytes(): start}
    stack = [start]
    while stack:
        H = stack.pop()
        for i in good:
            c = classes[i]
            if H.mask[c[0]]:
                continue
            # everything new must commute with H and with itself
            if not np.all(G.mul(c[:, None], H.members[None, :]) == G.mul(H.members[None, :], c[:, None])):
                continue
            members = closure_indices(G, list(H.generators) + c.tolist())
            key = members.tobytes()
            if key in seen:
                continue
            S = Subgroup(G, members)
            if not S.is_abelian:
                continue
            seen[key] = S
            stack.append(S)
    out = list(seen.values())
    out.sort(key=lambda S: (S.order, S.members.tolist()))
    return out


@dataclass(frozen=True, eq=False)
class GroupMorphism:
    source: FiniteGroup
    target: FiniteGroup
    images: np.ndarray

    def __post_init__(self):
        im = np.asarray(self.images, dtype=np.int64)
        im.setflags(write=False)
        object.__setattr__(self, "images", im)

    def __call__(self, g):
        return self.images[np.asarray(g)]

    def __eq__(self, other):
        return isinstance(other, GroupMorphism) and np.array_equal(self.images, other.images)

    def __hash__(self):
        return hash(self.images.tobytes())

    def is_homomorphism(self, *, samples: int = 10_000, seed: int = 0) -> bool:
        S, T = self.source, self.target
        n = S.order
        if n <= DEFAULT_TABLE_CAP:
            a = np.arange(n)
            return bool(np.all(self.images[S.mul(a[:, None], a[None, :])]
                               == T.mul(self.images[:, None], self.images[None, :])))
        rng = np.random.default_rng(seed)
        a, b = rng.integers(0, n, size=(2, samples))
        return bool(np.all(self.images[S.mul(a, b)] == T.mul(self.images[a], self.images[b])))

    def is_bijective(self) -> bool:
        return self.source.order == self.target.order and len(np.unique(self.images)) == self.target.order

    def compose(self, other: "GroupMorphism") -> "GroupMorphism":
        """self o other."""
        return GroupMorphism(other.source, self.target, self.images[other.images])

    def inverse(self) -> "GroupMorphism":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(len(self.images))
        return GroupMorphism(self.target, self.source, inv)

    @classmethod
    def identity(cls, G: FiniteGroup) -> "GroupMorphism":
        return cls(G, G, np.arange(G.order))

    @classmethod
    def inner(cls, G: FiniteGroup, g: int) -> "GroupMorphism":
        return cls(G, G, G.conj(g, np.arange(G.order)))


def _bfs_words(G: FiniteGroup, gens: Sequence[int]):
    """BFS tree of <gens>: elements, parent positions and generator slots."""
    elems = [G.identity]
    parent = [-1]
    slot = [-1]
    pos = {G.identity: 0}
    i = 0
    while i < len(elems):
        for j, s in enumerate(gens):
            h = int(G.mul(elems[i], s))
            if h not in pos:
                pos[h] = len(elems)
                elems.append(h)
                parent.append(i)
                slot.append(j)
        i += 1
    return np.array(elems), np.array(parent), np.array(slot), pos


def automorphism_group(G: FiniteGroup, cap: int = DEFAULT_AUT_CAP, max_candidates: int = 4_000_000) -> list[GroupMorphism]:
    """All automorphisms by level-wise backtracking on generator images."""
    if G.order > cap:
        raise CapExceeded(f"order {G.order} exceeds automorphism cap {cap}; supply automorphisms explicitly")
    if G.table is None:
        G = G.materialize(cap)
    orders = G.element_orders
    csize = G.class_sizes
    gens = sorted(G.generators, key=lambda g: (-orders[g], g))
    imgs = np.zeros((1, 0), dtype=np.int64)  # candidate images of gens so far
    for k in range(len(gens)):
        g = gens[k]
        cand = np.flatnonzero((orders == orders[g]) & (csize == csize[g]))
        if len(imgs) * len(cand) > max_candidates:
            raise CapExceeded("automorphism search space too large")
        imgs = np.concatenate(
            [np.repeat(imgs, len(cand), axis=0), np.tile(cand, len(imgs))[:, None]], axis=1
        )
        sub = gens[: k + 1]
        elems, parent, slot, pos = _bfs_words(G, sub)
        m = len(elems)
        full = np.empty((len(imgs), m), dtype=np.int64)
        full[:, 0] = G.identity
        for i in range(1, m):
            full[:, i] = G.mul(full[:, parent[i]], imgs[:, slot[i]])
        ok = np.ones(len(imgs), dtype=bool)
        for j, s in enumerate(sub):
            nxt = np.array([pos[int(h)] for h in G.mul(elems, s)])
            ok &= np.all(full[:, nxt] == G.mul(full, imgs[:, j : j + 1]), axis=1)
        srt = np.sort(full, axis=1)
        ok &= np.all(srt[:, 1:] != srt[:, :-1], axis=1) if m > 1 else True
        imgs = imgs[ok]
    # extend to all elements
    elems, parent, slot, pos = _bfs_words(G, gens)
    full = np.empty((len(imgs), G.order), dtype=np.int64)
    full[:, elems[0]] = G.identity
    for i in range(1, len(elems)):
        full[:, elems[i]] = G.mul(full[:, elems[parent[i]]], imgs[:, slot[i]])
    order = np.lexsort(full.T[::-1])
    return [GroupMorphism(G, G, row) for row in full[order]]


@dataclass
class ClassPreservingInfo:
    class_preserving: list
    inner: list
    aut_cl_order: int
    inn_order: int

    @property
    def out_cl_order(self) -> int:
        return self.aut_cl_order // self.inn_order


def inner_automorphisms(G: FiniteGroup) -> list[GroupMorphism]:
    idx = np.arange(G.order)
    rows = G.conj(idx[:, None], idx[None, :])
    rows = np.unique(rows, axis=0)
    return [GroupMorphism(G, G, r) for r in rows]


def class_preserving_filter(automorphisms: Sequence[GroupMorphism], G: FiniteGroup) -> ClassPreservingInfo:
    cls = G.class_index
    kept = [phi for phi in automorphisms if np.array_equal(cls[phi.images], cls)]
    inn = inner_automorphisms(G)
    return ClassPreservingInfo(kept, inn, len(kept), len(inn))


# --- fingerprints -----------------------------------------------------------


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariants_from_order_counts(counts: dict[int, int]) -> list[int]:
    """Invariant factors d_1 | d_2 | ... of an abelian group from its element orders."""
    n = sum(counts.values())
    if n == 1:
        return []
    elementary: list[list[int]] = []
    for p, _ in _factor(n).items():
        # number of elements killed by p^k, as a power of p
        logs = [0]
        k = 1
        while True:
            killed = sum(c for o, c in counts.items() if (p**k) % o == 0)
            e = round(math.log(killed, p))
            logs.append(e)
            if e == logs[-2]:
                break
            k += 1
        # cyclic factors of order >= p^k: logs[k] - logs[k-1]
        ge = [logs[i] - logs[i - 1] for i in range(1, len(logs))]
        parts = []
        for i in range(len(ge)):
            exact = ge[i] - (ge[i + 1] if i + 1 < len(ge) else 0)
            parts += [p ** (i + 1)] * exact
        elementary.append(sorted(parts, reverse=True))
    width = max(len(e) for e in elementary)
    inv = []
    for i in range(width):
        inv.append(math.prod(e[i] for e in elementary if i < len(e)))
    return sorted(inv)


@dataclass(frozen=True)
class GroupFingerprint:
    order: int
    element_orders: tuple
    class_sizes: tuple
    center_order: int
    abelianization: tuple
    order_class_sizes: tuple = ()  # multiset of (element order, class size)

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "element_orders": {str(k): v for k, v in self.element_orders},
            "class_sizes": {str(k): v for k, v in self.class_sizes},
            "center_order": self.center_order,
            "abelianization": list(self.abelianization),
            "order_class_sizes": {f"{o}:{c}": v for (o, c), v in self.order_class_sizes},
        }


def abelianization_invariants(G: FiniteGroup) -> list[int]:
    D = derived_subgroup(G)
    n = G.order
    # left cosets gD as components of g ~ g*d for generators d of D
    idx = np.arange(n)
    dg = D.generators
    if not dg:
        coset = idx
    else:
        r = np.concatenate([idx] * len(dg))
        c = np.concatenate([G.mul(idx, d) for d in dg])
        graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(n, n))
        _, coset = connected_components(graph, directed=True, connection="weak")
    reps = np.unique(coset, return_index=True)[1]
    home = coset[G.identity]
    counts: Counter = Counter()
    cur = reps.copy()
    order = np.zeros(len(reps), dtype=np.int64)
    k = 1
    todo = np.arange(len(reps))
    while todo.size:
        hit = coset[cur] == home
        order[todo[hit]] = k
        todo, cur = todo[~hit], cur[~hit]
        if todo.size:
            cur = G.mul(cur, reps[todo])
            k += 1
    counts.update(order.tolist())
    return invariants_from_order_counts(dict(counts))


def fingerprint(G: FiniteGroup) -> GroupFingerprint:
    eo = Counter(G.element_orders.tolist())
    cs = Counter(len(c) for c in G.classes)
    joint = Counter(zip(G.element_orders.tolist(), G.class_sizes.tolist()))
    return GroupFingerprint(
        order=G.order,
        element_orders=tuple(sorted(eo.items())),
        class_sizes=tuple(sorted(cs.items())),
        center_order=center(G).order,
        abelianization=tuple(abelianization_invariants(G)),
        order_class_sizes=tuple(sorted(joint.items())),
    )


def fingerprints_differ(a: GroupFingerprint, b: GroupFingerprint) -> bool:
    """True proves non-isomorphism; False is inconclusive."""
    return a != b
