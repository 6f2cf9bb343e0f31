"""Decorated graphs and the nine elementary actions.

A graph keeps a *universe* of node names.  The active nodes are the
nodes of the graph proper; the others are reserved: unlabeled, without
edges, and available as targets of ``add_N`` and ``cl``.  Actions never
change the universe, so node names keep denoting the same element
before and after an action.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import (ActionError, InactiveEndpoint, LdgError, NodeNotReserved,
                     NonBasicLabel, UnknownEdge, UnknownNode)

RESERVED_NAMES = frozenset({"top", "bot", "Self", "U", "Active"})

_DIGITS = re.compile(r"(\d+)")


def id_key(name: str):
    """Natural order on identifiers: ``n2`` < ``n10``."""
    parts = _DIGITS.split(name)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts)


def sort_ids(names: Iterable[str]) -> list[str]:
    return sorted(names, key=id_key)


@dataclass(frozen=True)
class Alphabet:
    concepts: frozenset = frozenset()
    roles: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "concepts", frozenset(self.concepts))
        object.__setattr__(self, "roles", frozenset(self.roles))
        for name in self.concepts | self.roles:
            if not name or name in RESERVED_NAMES:
                raise NonBasicLabel(f"illegal alphabet name {name!r}")

    def union(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(self.concepts | other.concepts, self.roles | other.roles)


# --------------------------------------------------------------------------
# actions


@dataclass(frozen=True)
class CloneParams:
    r_in: frozenset = frozenset()
    r_out: frozenset = frozenset()
    r_l_in: frozenset = frozenset()
    r_l_out: frozenset = frozenset()
    r_l_l: frozenset = frozenset()

    def __post_init__(self):
        for f in ("r_in", "r_out", "r_l_in", "r_l_out", "r_l_l"):
            object.__setattr__(self, f, frozenset(getattr(self, f)))

    def sets(self):
        return (self.r_in, self.r_out, self.r_l_in, self.r_l_out, self.r_l_l)


def _fmt_set(roles) -> str:
    return "{" + ",".join(sorted(roles)) + "}"


class Action:
    """Base class of elementary actions.  Node arguments are names."""

    kind = "?"

    def node_args(self) -> tuple:
        raise NotImplementedError

    def rename(self, mapping: Mapping) -> "Action":
        """Replace node arguments through ``mapping`` (missing names kept)."""
        raise NotImplementedError


def _m(mapping, x):
    return mapping.get(x, x)


@dataclass(frozen=True)
class AddN(Action):
    i: object
    kind = "add_N"

    def node_args(self):
        return (self.i,)

    def rename(self, mapping):
        return AddN(_m(mapping, self.i))

    def __str__(self):
        return f"add_N({self.i})"


@dataclass(frozen=True)
class DelN(Action):
    i: object
    kind = "del_N"

    def node_args(self):
        return (self.i,)

    def rename(self, mapping):
        return DelN(_m(mapping, self.i))

    def __str__(self):
        return f"del_N({self.i})"


@dataclass(frozen=True)
class AddC(Action):
    i: object
    c: str
    kind = "add_C"

    def node_args(self):
        return (self.i,)

    def rename(self, mapping):
        return AddC(_m(mapping, self.i), self.c)

    def __str__(self):
        return f"add_C({self.i},{self.c})"


@dataclass(frozen=True)
class DelC(Action):
    i: object
    c: str
    kind = "del_C"

    def node_args(self):
        return (self.i,)

    def rename(self, mapping):
        return DelC(_m(mapping, self.i), self.c)

    def __str__(self):
        return f"del_C({self.i},{self.c})"


@dataclass(frozen=True)
class AddE(Action):
    i: object
    j: object
    r: str
    eid: str | None = None
    kind = "add_E"

    def node_args(self):
        return (self.i, self.j)

    def rename(self, mapping):
        return AddE(_m(mapping, self.i), _m(mapping, self.j), self.r, self.eid)

    def __str__(self):
        if self.eid is not None:
            return f"add_E({self.eid},{self.i},{self.j},{self.r})"
        return f"add_E({self.i},{self.j},{self.r})"


@dataclass(frozen=True)
class DelE(Action):
    """Deletes every edge with the given source, target and role."""

    i: object
    j: object
    r: str
    kind = "del_E"

    def node_args(self):
        return (self.i, self.j)

    def rename(self, mapping):
        return DelE(_m(mapping, self.i), _m(mapping, self.j), self.r)

    def __str__(self):
        return f"del_E({self.i},{self.j},{self.r})"


@dataclass(frozen=True)
class DelEdge(Action):
    """Deletes one edge given by its id."""

    eid: str
    kind = "del_E"

    def node_args(self):
        return ()

    def rename(self, mapping):
        return self

    def __str__(self):
        return f"del_E({self.eid})"


@dataclass(frozen=True)
class Redirect(Action):
    i: object
    j: object
    kind = "redirect"

    def node_args(self):
        return (self.i, self.j)

    def rename(self, mapping):
        return Redirect(_m(mapping, self.i), _m(mapping, self.j))

    def __str__(self):
        return f"{self.i} >> {self.j}"


@dataclass(frozen=True)
class Mrg(Action):
    i: object
    j: object
    kind = "mrg"

    def node_args(self):
        return (self.i, self.j)

    def rename(self, mapping):
        return Mrg(_m(mapping, self.i), _m(mapping, self.j))

    def __str__(self):
        return f"mrg({self.i},{self.j})"


@dataclass(frozen=True)
class Cl(Action):
    i: object
    j: object
    params: CloneParams = field(default_factory=CloneParams)
    kind = "cl"

    def node_args(self):
        return (self.i, self.j)

    def rename(self, mapping):
        return Cl(_m(mapping, self.i), _m(mapping, self.j), self.params)

    def __str__(self):
        sets = ",".join(_fmt_set(s) for s in self.params.sets())
        return f"cl({self.i},{self.j},{sets})"


ACTION_KINDS = ("add_N", "del_N", "add_C", "del_C", "add_E", "del_E",
                "redirect", "mrg", "cl")


def format_sequence(actions: Iterable[Action]) -> str:
    return "; ".join(str(a) for a in actions)


# --------------------------------------------------------------------------
# graphs


class GraphIndex:
    """Bitmask view of a graph used by the evaluators.

    Bit ``k`` stands for ``nodes[k]``.  ``succ[r][k]`` is the mask of
    r-successors of node ``k``; ``pred`` likewise for predecessors.
    """

    def __init__(self, g: "LDGraph"):
        self.nodes = g.universe
        self.pos = {n: k for k, n in enumerate(self.nodes)}
        size = len(self.nodes)
        self.size = size
        self.full = (1 << size) - 1
        self.active = 0
        for n in g.active:
            self.active |= 1 << self.pos[n]
        self.labels: dict[str, int] = {}
        for n, labs in g.labels.items():
            for c in labs:
                self.labels[c] = self.labels.get(c, 0) | (1 << self.pos[n])
        self.succ: dict[str, list[int]] = {}
        self.pred: dict[str, list[int]] = {}
        self.loops: dict[str, int] = {}
        for s, t, r in g.edges.values():
            if r not in self.succ:
                self.succ[r] = [0] * size
                self.pred[r] = [0] * size
                self.loops[r] = 0
            ps, pt = self.pos[s], self.pos[t]
            self.succ[r][ps] |= 1 << pt
            self.pred[r][pt] |= 1 << ps
            if ps == pt:
                self.loops[r] |= 1 << ps
        self._zero = [0] * size

    def bit(self, node) -> int:
        return 1 << self.pos[node]

    def successors(self, role: str) -> list[int]:
        return self.succ.get(role, self._zero)

    def predecessors(self, role: str) -> list[int]:
        return self.pred.get(role, self._zero)

    def mask_to_nodes(self, mask: int) -> list[str]:
        return [n for k, n in enumerate(self.nodes) if mask >> k & 1]


class LDGraph:
    """Immutable decorated graph.

    ``labels`` maps every active node to its frozenset of concept names;
    ``edges`` maps edge ids to ``(src, tgt, role)``.
    """

    __slots__ = ("alphabet", "universe", "active", "labels", "edges",
                 "_key", "_hash", "_index")

    def __init__(self, alphabet: Alphabet, universe: Iterable[str],
                 active: Iterable[str], labels: Mapping[str, Iterable[str]] | None = None,
                 edges: Mapping[str, tuple] | None = None, check: bool = True):
        self.alphabet = alphabet
        self.universe = tuple(sort_ids(set(universe)))
        self.active = frozenset(active)
        labels = labels or {}
        self.labels = {n: frozenset(labels.get(n, ())) for n in sort_ids(self.active)}
        edges = edges or {}
        self.edges = {e: tuple(edges[e]) for e in sort_ids(edges)}
        self._key = None
        self._hash = None
        self._index = None
        if check:
            self.validate()

    def validate(self):
        uni = set(self.universe)
        for n in self.active:
            if n not in uni:
                raise UnknownNode(f"active node {n!r} not in universe")
        for n, labs in self.labels.items():
            for c in labs:
                if c not in self.alphabet.concepts:
                    raise NonBasicLabel(f"label {c!r} of {n!r} not a basic concept")
        for e, (s, t, r) in self.edges.items():
            if r not in self.alphabet.roles:
                raise NonBasicLabel(f"role {r!r} of edge {e!r} not a basic role")
            for x in (s, t):
                if x not in uni:
                    raise UnknownNode(f"edge {e!r} endpoint {x!r} unknown")
                if x not in self.active:
                    raise InactiveEndpoint(f"edge {e!r} endpoint {x!r} inactive")

    # -- value semantics
    def key(self):
        if self._key is None:
            self._key = (self.alphabet.concepts, self.alphabet.roles, self.universe,
                         self.active,
                         tuple((n, l) for n, l in self.labels.items()),
                         tuple(self.edges.items()))
        return self._key

    def __eq__(self, other):
        return isinstance(other, LDGraph) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return (f"LDGraph(active={sort_ids(self.active)}, "
                f"reserved={self.reserved()}, edges={self.edges})")

    def index(self) -> GraphIndex:
        if self._index is None:
            self._index = GraphIndex(self)
        return self._index

    # -- queries
    def reserved(self) -> list[str]:
        return [n for n in self.universe if n not in self.active]

    def edge_triples(self) -> set:
        return set(self.edges.values())

    def has_edge(self, s, t, r) -> bool:
        return (s, t, r) in self.edge_triples()

    def replace(self, **kw) -> "LDGraph":
        args = dict(alphabet=self.alphabet, universe=self.universe,
                    active=self.active, labels=self.labels, edges=self.edges)
        args.update(kw)
        return LDGraph(check=False, **args)

    def with_alphabet(self, alphabet: Alphabet) -> "LDGraph":
        return LDGraph(self.alphabet.union(alphabet), self.universe, self.active,
                       self.labels, self.edges)

    def fresh_edge_ids(self, count: int) -> list[str]:
        top = -1
        for e in self.edges:
            m = re.fullmatch(r"e(\d+)", e)
            if m:
                top = max(top, int(m.group(1)))
        return [f"e{top + 1 + k}" for k in range(count)]


def empty_graph(alphabet: Alphabet | None = None) -> LDGraph:
    return LDGraph(alphabet or Alphabet(), (), ())


def make_graph(concepts=(), roles=(), nodes=(), labels=None, edges=(), reserved=()):
    """Convenience builder.  ``edges`` is a list of ``(src, tgt, role)``
    or ``(eid, src, tgt, role)`` tuples; ids default to ``e0, e1, ...``."""
    emap = {}
    for k, e in enumerate(edges):
        if len(e) == 4:
            emap[e[0]] = tuple(e[1:])
        else:
            emap[f"e{k}"] = tuple(e)
    return LDGraph(Alphabet(concepts, roles), list(nodes) + list(reserved), nodes,
                   labels or {}, emap)


def reserve_fresh(g: LDGraph) -> tuple[LDGraph, str]:
    """Add one reserved node named ``n<k>`` with the least unused ``k``."""
    used = set(g.universe)
    k = 0
    while f"n{k}" in used:
        k += 1
    name = f"n{k}"
    return g.replace(universe=g.universe + (name,)), name


def pad(g: LDGraph, count: int) -> LDGraph:
    """Ensure at least ``count`` reserved nodes exist."""
    missing = count - len(g.reserved())
    for _ in range(max(0, missing)):
        g, _ = reserve_fresh(g)
    return g


# --------------------------------------------------------------------------
# operational semantics


def _need_node(g: LDGraph, n):
    if not isinstance(n, str) or n not in g.universe:
        raise UnknownNode(f"unknown node {n!r}")


def _need_active(g: LDGraph, n):
    _need_node(g, n)
    if n not in g.active:
        raise InactiveEndpoint(f"node {n!r} is not active")


def _need_reserved(g: LDGraph, n):
    _need_node(g, n)
    if n in g.active:
        raise NodeNotReserved(f"node {n!r} is already active")


def _need_concept(g: LDGraph, c):
    if c not in g.alphabet.concepts:
        raise NonBasicLabel(f"{c!r} is not a basic concept")


def _need_role(g: LDGraph, r):
    if r not in g.alphabet.roles:
        raise NonBasicLabel(f"{r!r} is not a basic role")


def apply_elementary(g: LDGraph, a: Action) -> LDGraph:
    """Return ``G[a]``; ``g`` is left untouched."""
    if isinstance(a, AddN):
        _need_reserved(g, a.i)
        labels = dict(g.labels)
        labels[a.i] = frozenset()
        return g.replace(active=g.active | {a.i}, labels=labels)
    if isinstance(a, DelN):
        _need_active(g, a.i)
        labels = {n: l for n, l in g.labels.items() if n != a.i}
        edges = {e: v for e, v in g.edges.items() if a.i not in (v[0], v[1])}
        return g.replace(active=g.active - {a.i}, labels=labels, edges=edges)
    if isinstance(a, (AddC, DelC)):
        _need_active(g, a.i)
        _need_concept(g, a.c)
        labels = dict(g.labels)
        if isinstance(a, AddC):
            labels[a.i] = labels[a.i] | {a.c}
        else:
            labels[a.i] = labels[a.i] - {a.c}
        return g.replace(labels=labels)
    if isinstance(a, AddE):
        _need_active(g, a.i)
        _need_active(g, a.j)
        _need_role(g, a.r)
        eid = a.eid if a.eid is not None else g.fresh_edge_ids(1)[0]
        if eid in g.edges:
            raise UnknownEdge(f"edge id {eid!r} already used")
        edges = dict(g.edges)
        edges[eid] = (a.i, a.j, a.r)
        return g.replace(edges=edges)
    if isinstance(a, DelE):
        _need_active(g, a.i)
        _need_active(g, a.j)
        _need_role(g, a.r)
        triple = (a.i, a.j, a.r)
        return g.replace(edges={e: v for e, v in g.edges.items() if v != triple})
    if isinstance(a, DelEdge):
        if a.eid not in g.edges:
            raise UnknownEdge(f"unknown edge {a.eid!r}")
        return g.replace(edges={e: v for e, v in g.edges.items() if e != a.eid})
    if isinstance(a, Redirect):
        _need_active(g, a.i)
        _need_active(g, a.j)
        edges = {e: (s, a.j if t == a.i else t, r) for e, (s, t, r) in g.edges.items()}
        return g.replace(edges=edges)
    if isinstance(a, Mrg):
        _need_active(g, a.i)
        _need_active(g, a.j)
        if a.i == a.j:
            return g
        i, j = a.i, a.j
        edges = {e: (i if s == j else s, i if t == j else t, r)
                 for e, (s, t, r) in g.edges.items()}
        labels = {n: l for n, l in g.labels.items() if n != j}
        labels[i] = g.labels[i] | g.labels[j]
        return g.replace(active=g.active - {j}, labels=labels, edges=edges)
    if isinstance(a, Cl):
        return _clone(g, a)
    raise LdgError(f"unknown action {a!r}")


def clone_families(g: LDGraph, a: Cl) -> list[list[tuple]]:
    """The five families of copied edges, in allocation order.

    Each entry is ``(source edge id, new src, new tgt, role)``.
    """
    i, j, p = a.i, a.j, a.params
    fam = [[], [], [], [], []]
    for e, (s, t, r) in g.edges.items():
        if t == i and s != i and r in p.r_in:
            fam[0].append((e, s, j, r))
        if s == i and t != i and r in p.r_out:
            fam[1].append((e, j, t, r))
        if s == i and t == i:
            if r in p.r_l_in:
                fam[2].append((e, i, j, r))
            if r in p.r_l_out:
                fam[3].append((e, j, i, r))
            if r in p.r_l_l:
                fam[4].append((e, j, j, r))
    for f in fam:
        f.sort(key=lambda x: id_key(x[0]))
    return fam


def _clone(g: LDGraph, a: Cl) -> LDGraph:
    _need_active(g, a.i)
    _need_reserved(g, a.j)
    for roles in a.params.sets():
        for r in roles:
            _need_role(g, r)
    fam = clone_families(g, a)
    new = [x for f in fam for x in f]
    ids = g.fresh_edge_ids(len(new))
    edges = dict(g.edges)
    for eid, (_, s, t, r) in zip(ids, new):
        edges[eid] = (s, t, r)
    labels = dict(g.labels)
    labels[a.j] = g.labels[a.i] & g.alphabet.concepts
    return g.replace(active=g.active | {a.j}, labels=labels, edges=edges)


def apply_sequence(g: LDGraph, actions: Iterable[Action]) -> LDGraph:
    for k, a in enumerate(actions):
        try:
            g = apply_elementary(g, a)
        except LdgError as exc:
            raise ActionError(k, exc) from exc
    return g
