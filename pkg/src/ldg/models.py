"""Explicit enumeration of small graphs, up to isomorphism."""

from __future__ import annotations

from itertools import combinations_with_replacement, permutations, product
from typing import Iterator

from .errors import BudgetExceeded
from .graph import Alphabet, LDGraph


def _subsets(items):
    items = sorted(items)
    return [frozenset(x for k, x in enumerate(items) if m >> k & 1)
            for m in range(1 << len(items))]


def canonical_key(k: int, labels: tuple, edges: dict) -> tuple:
    """Least encoding over all node permutations. ``labels`` holds one
    frozenset per node, ``edges`` maps ``(s, t, r)`` to a multiplicity."""
    best = None
    for perm in permutations(range(k)):
        inv = [0] * k
        for new, old in enumerate(perm):
            inv[old] = new
        labs = tuple(tuple(sorted(labels[old])) for old in perm)
        es = tuple(sorted((inv[s], inv[t], r, m) for (s, t, r), m in edges.items()))
        key = (labs, es)
        if best is None or key < best:
            best = key
    return (k,) + best


def build(alphabet: Alphabet, k: int, labels, edges: dict, pad: int = 0) -> LDGraph:
    names = [f"n{x}" for x in range(k + pad)]
    emap, e = {}, 0
    for (s, t, r), m in sorted(edges.items()):
        for _ in range(m):
            emap[f"e{e}"] = (names[s], names[t], r)
            e += 1
    return LDGraph(alphabet, names, names[:k],
                   {names[x]: set(labels[x]) for x in range(k)}, emap)


def enumerate_graphs(alphabet: Alphabet, max_nodes: int, max_parallel: int = 1,
                     pad: int = 0, min_nodes: int = 0, budget: int | None = None,
                     canonical: bool = True) -> Iterator[LDGraph]:
    """Every graph with ``min_nodes..max_nodes`` active nodes, at most
    ``max_parallel`` parallel edges per triple and ``pad`` reserved nodes,
    one per isomorphism class. ``budget`` caps the graphs examined."""
    label_sets = _subsets(alphabet.concepts)
    roles = sorted(alphabet.roles)
    seen = set()
    examined = 0
    for k in range(min_nodes, max_nodes + 1):
        slots = [(s, t, r) for s in range(k) for t in range(k) for r in roles]
        # sorted label tuples lose nothing: permuting nodes sorts any tuple
        label_iter = (combinations_with_replacement(range(len(label_sets)), k)
                      if canonical else product(range(len(label_sets)), repeat=k))
        for lab_idx in label_iter:
            labels = tuple(label_sets[x] for x in lab_idx)
            for mults in product(range(max_parallel + 1), repeat=len(slots)):
                examined += 1
                if budget is not None and examined > budget:
                    raise BudgetExceeded(f"more than {budget} graphs to enumerate")
                edges = {sl: m for sl, m in zip(slots, mults) if m}
                if canonical:
                    key = canonical_key(k, labels, edges)
                    if key in seen:
                        continue
                    seen.add(key)
                yield build(alphabet, k, labels, edges, pad)


def graph_key(g: LDGraph) -> tuple:
    """Canonical key of an arbitrary graph (reserved nodes ignored)."""
    act = sorted(g.active)
    pos = {n: x for x, n in enumerate(act)}
    labels = tuple(frozenset(g.labels.get(n, ())) for n in act)
    edges: dict = {}
    for s, t, r in g.edges.values():
        edges[(pos[s], pos[t], r)] = edges.get((pos[s], pos[t], r), 0) + 1
    return canonical_key(len(act), labels, edges)


def count_graphs(alphabet: Alphabet, k: int, max_parallel: int = 1) -> int:
    """Number of labelled (not iso-reduced) graphs on exactly ``k`` nodes."""
    return (2 ** len(alphabet.concepts)) ** k * \
        (max_parallel + 1) ** (k * k * len(alphabet.roles))
