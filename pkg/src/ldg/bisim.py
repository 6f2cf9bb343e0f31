"""ALCQUO and ALCQUOSelf bisimulations between finite interpretations.

An interpretation is a graph (its active nodes form the domain) together
with the nodes named by the nominals of the signature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
from networkx.algorithms import bipartite

from .errors import DomainMismatch
from .graph import LDGraph, apply_elementary, make_graph, Mrg, sort_ids
from .logic import holds_at, Not, Lt, Top, Atom, basic


@dataclass(frozen=True)
class Features:
    """Optional conditions; ALC_1 to ALC_4 always apply."""
    O: bool = True
    Q: bool = True
    Self: bool = True
    U: bool = True

    @classmethod
    def parse(cls, text: str) -> "Features":
        """Flags from a string such as ``QUOSelf`` or ``QUO``."""
        rest = text
        flags = {}
        if "Self" in rest:
            flags["Self"] = True
            rest = rest.replace("Self", "")
        for ch in rest:
            if ch not in "OQU":
                raise ValueError(f"unknown feature {ch!r} in {text!r}")
            flags[ch] = True
        return cls(**{k: flags.get(k, False) for k in ("O", "Q", "Self", "U")})

    def __str__(self):
        return "ALC" + "".join(k for k in ("Q", "U", "O", "Self") if getattr(self, k))


@dataclass
class Interp:
    graph: LDGraph
    nominals: dict = field(default_factory=dict)   # nominal -> node

    @property
    def domain(self) -> list:
        return sort_ids(self.graph.active)

    def succ(self, d, r) -> set:
        return {t for s, t, rr in self.graph.edges.values() if s == d and rr == r}

    def has(self, d, c) -> bool:
        return c in self.graph.labels.get(d, ())

    def loop(self, d, r) -> bool:
        return self.graph.has_edge(d, d, r)


def _signature(i: Interp, j: Interp):
    if set(i.nominals) != set(j.nominals):
        raise DomainMismatch("the interpretations name different nominals")
    for side in (i, j):
        for n, d in side.nominals.items():
            if d not in side.graph.active:
                raise DomainMismatch(f"nominal {n} names {d!r}, which is not in the domain")
    concepts = sorted(i.graph.alphabet.concepts | j.graph.alphabet.concepts)
    roles = sorted(i.graph.alphabet.roles | j.graph.alphabet.roles)
    return concepts, roles, sorted(i.nominals)


def _bijection(z: set, left: set, right: set) -> bool:
    """Is there a bijection between ``left`` and ``right`` inside ``z``?"""
    if len(left) != len(right):
        return False
    if not left:
        return True
    g = nx.Graph()
    lk = [("l", x) for x in left]
    g.add_nodes_from(lk, bipartite=0)
    g.add_nodes_from((("r", y) for y in right), bipartite=1)
    g.add_edges_from((("l", x), ("r", y)) for x in left for y in right if (x, y) in z)
    match = bipartite.hopcroft_karp_matching(g, top_nodes=lk)
    return len(match) // 2 == len(left)


def _local(i, j, z, pair, f, concepts, roles, nominals) -> str | None:
    """Name of the first pair condition that fails, or ``None``."""
    d1, d2 = pair
    for c in concepts:
        if i.has(d1, c) != j.has(d2, c):
            return f"ALC_1: {d1} and {d2} disagree on {c}"
    if f.O:
        for n in nominals:
            if (d1 == i.nominals[n]) != (d2 == j.nominals[n]):
                return f"O: exactly one of {d1}, {d2} is named {n}"
    for r in roles:
        s1, s2 = i.succ(d1, r), j.succ(d2, r)
        for e1 in sorted(s1):
            if not any((e1, e2) in z for e2 in s2):
                return f"ALC_2: {d1} -{r}-> {e1} has no partner from {d2}"
        for e2 in sorted(s2):
            if not any((e1, e2) in z for e1 in s1):
                return f"ALC_3: {d2} -{r}-> {e2} has no partner from {d1}"
        if f.Q and not _bijection(z, s1, s2):
            return f"Q: no bijection between the {r}-successors of {d1} and {d2}"
        if f.Self and i.loop(d1, r) != j.loop(d2, r):
            return f"Self: {d1} and {d2} disagree on an {r}-loop"
    return None


def _global(i, j, z, f, nominals) -> list[str]:
    out = []
    for n in nominals:
        if (i.nominals[n], j.nominals[n]) not in z:
            out.append(f"ALC_4: nominal {n} is not related to itself")
    if f.U:
        left = {a for a, _ in z}
        right = {b for _, b in z}
        out += [f"U_1: {d} is unrelated" for d in i.domain if d not in left]
        out += [f"U_2: {d} is unrelated" for d in j.domain if d not in right]
    return out


def is_bisimulation(i: Interp, j: Interp, z, f: Features = Features()):
    """``(ok, violations)`` for relation ``z`` under the features ``f``."""
    concepts, roles, nominals = _signature(i, j)
    z = set(map(tuple, z))
    if not z:
        return False, ["Z is empty"]
    for a, b in sorted(z):
        if a not in i.graph.active or b not in j.graph.active:
            raise DomainMismatch(f"pair ({a}, {b}) leaves the domains")
    out = []
    for pair in sorted(z):
        why = _local(i, j, z, pair, f, concepts, roles, nominals)
        if why:
            out.append(why)
    out += _global(i, j, z, f, nominals)
    return not out, out


def largest_bisimulation(i: Interp, j: Interp, f: Features = Features()):
    """Greatest relation satisfying the pair conditions, if it also meets
    ALC_4 and U_1/U_2 and is non-empty; otherwise ``None``."""
    concepts, roles, nominals = _signature(i, j)
    z = {(a, b) for a in i.domain for b in j.domain}
    z = {p for p in z if _local(i, j, {p}, p, Features(O=f.O, Q=False, Self=f.Self, U=False),
                                 concepts, [], nominals) is None}
    changed = True
    while changed:
        changed = False
        for p in sorted(z):
            if _local(i, j, z, p, f, concepts, roles, nominals) is not None:
                z.discard(p)
                changed = True
    if not z or _global(i, j, z, f, nominals):
        return None
    return z


# ---------------------------------------------------------------- the witness


def nonclosure_fixture():
    """The two bisimilar interpretations and the relation Z of the witness."""
    gi = make_graph(["C"], ["R"], ["d1", "d2", "d3", "d4"],
                    {"d3": ["C"], "d4": ["C"]},
                    [("d1", "d3", "R"), ("d2", "d4", "R")])
    gj = make_graph(["C"], ["R"], ["d1'", "d2'", "d3'"], {"d3'": ["C"]},
                    [("d1'", "d3'", "R"), ("d2'", "d3'", "R")])
    i = Interp(gi, {"i": "d1", "j": "d2"})
    j = Interp(gj, {"i": "d1'", "j": "d2'"})
    z = {("d1", "d1'"), ("d2", "d2'"), ("d3", "d3'"), ("d4", "d3'")}
    return i, j, z


AT_LEAST_2_R_C = Not(Lt(2, basic("R"), Atom("C")))


@dataclass
class Report:
    steps: list = field(default_factory=list)   # (description, passed, detail)

    @property
    def ok(self) -> bool:
        return all(p for _, p, _ in self.steps)

    def lines(self) -> list[str]:
        return [f"[{'PASS' if p else 'FAIL'}] {d}" + (f": {x}" if x else "")
                for d, p, x in self.steps]


def demonstrate_non_closure(fixture=None) -> Report:
    i, j, z = fixture or nonclosure_fixture()
    rep = Report()
    ok, why = is_bisimulation(i, j, z, Features.parse("QUOSelf"))
    rep.steps.append(("Z is an ALCQUOSelf-bisimulation before the merge", ok, "; ".join(why)))
    gi = apply_elementary(i.graph, Mrg(i.nominals["i"], i.nominals["j"]))
    gj = apply_elementary(j.graph, Mrg(j.nominals["i"], j.nominals["j"]))
    d1, e1 = i.nominals["i"], j.nominals["i"]
    at_i = holds_at(gi, d1, AT_LEAST_2_R_C)
    at_j = holds_at(gj, e1, AT_LEAST_2_R_C)
    rep.steps.append((f"after mrg(i,j), (>= 2 R C) holds at {d1} and fails at {e1}",
                      at_i and not at_j, f"{d1}: {at_i}, {e1}: {at_j}"))
    rep.steps.append(("(>= 2 R C)[mrg(i,j)] separates bisimilar elements, so it has no "
                      "ALCQUO or ALCQUOSelf equivalent",
                      ok and at_i and not at_j, ""))
    return rep
