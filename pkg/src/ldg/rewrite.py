"""Rules, matches, rule application and the applicability formulas."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Mapping

from .errors import (AlphabetMismatch, InexpressibleLabel, InputError, NotATree)
from .graph import (Action, AddN, Cl, LDGraph, apply_sequence, id_key, reserve_fresh,
                    sort_ids)
from .logic import (ACTIVE, FTRUE, TOP, U, Atom, Concept, Const, Eq, Exists, FExists,
                    Fol, Nominal, Not, Or, Pred, Rel, Some, Top, Var, at, basic,
                    concept_mask, concept_names, conj, exists, fexists, land, lor,
                    match_and, neg, nom, role_names)


@dataclass(eq=False)
class Rule:
    """``name``: LHS ``nodes``, ``labels`` (node -> concepts), ``edges``
    as ``(eid, src, tgt, role)``, and the RHS action sequence."""

    name: str
    nodes: tuple
    labels: dict
    edges: tuple
    rhs: tuple
    fresh: tuple = field(init=False)

    def __post_init__(self):
        self.nodes = tuple(self.nodes)
        self.labels = {n: tuple(self.labels.get(n, ())) for n in self.nodes}
        self.edges = tuple(tuple(e) for e in self.edges)
        self.rhs = tuple(self.rhs)
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise InputError(f"rule {self.name}: duplicate LHS node")
        for eid, s, t, r in self.edges:
            if s not in known or t not in known:
                raise InputError(f"rule {self.name}: edge {eid} uses an unknown node")
        fresh = []
        for a in self.rhs:
            for x in a.node_args():
                if x not in known and x not in fresh:
                    if not ((isinstance(a, AddN) and a.i == x) or (isinstance(a, Cl) and a.j == x)):
                        raise InputError(
                            f"rule {self.name}: {x!r} is used by {a} before it is created")
                    fresh.append(x)
        self.fresh = tuple(fresh)

    def __eq__(self, other):
        return isinstance(other, Rule) and self.key() == other.key()

    def __hash__(self):
        return hash((self.name, self.nodes, self.edges, self.rhs))

    def key(self):
        return (self.name, self.nodes, tuple(self.labels.items()), self.edges, self.rhs)

    def names(self) -> tuple[set, set]:
        """Concept and role names used by the rule."""
        concepts, roles = set(), set()
        for labs in self.labels.values():
            for c in labs:
                concepts |= concept_names(c)
                roles |= role_names(c)
        for _, _, _, r in self.edges:
            roles.add(r)
        for a in self.rhs:
            if hasattr(a, "c"):
                concepts.add(a.c)
            if hasattr(a, "r"):
                roles.add(a.r)
            if isinstance(a, Cl):
                for s in a.params.sets():
                    roles |= set(s)
        return concepts, roles


@dataclass(frozen=True)
class Match:
    nodes: tuple   # ((lhs node, host node), ...) in LHS order
    edges: tuple   # ((lhs edge, host edge), ...)

    @property
    def node_map(self) -> dict:
        return dict(self.nodes)

    @property
    def edge_map(self) -> dict:
        return dict(self.edges)


def check_alphabet(g: LDGraph, rule: Rule):
    concepts, roles = rule.names()
    missing = (concepts - g.alphabet.concepts) | (roles - g.alphabet.roles)
    if missing:
        raise AlphabetMismatch(
            f"rule {rule.name} uses names outside the graph alphabet: {sorted(missing)}")


def _matches(g: LDGraph, rule: Rule, injective: bool = False) -> Iterator[Match]:
    check_alphabet(g, rule)
    idx = g.index()
    order = sort_ids(rule.nodes)
    cand = {}
    for n in order:
        mask = idx.active
        for c in rule.labels[n]:
            mask &= concept_mask(g, c)
        cand[n] = idx.mask_to_nodes(mask)
    by_triple: dict[tuple, list] = {}
    for e, trip in g.edges.items():
        by_triple.setdefault(trip, []).append(e)
    edges_of = {n: [] for n in order}
    pos = {n: k for k, n in enumerate(order)}
    for eid, s, t, r in rule.edges:
        # check each edge once both ends are bound
        edges_of[order[max(pos[s], pos[t])]].append((s, t, r))
    lhs_edges = sorted(rule.edges, key=lambda e: id_key(e[0]))

    def extend(k, h):
        if k == len(order):
            yield dict(h)
            return
        n = order[k]
        for x in cand[n]:
            if injective and x in h.values():
                continue
            h[n] = x
            if all((h[s], h[t], r) in by_triple for s, t, r in edges_of[n]):
                yield from extend(k + 1, h)
            del h[n]

    for h in extend(0, {}):
        choices = [by_triple[(h[s], h[t], r)] for _, s, t, r in lhs_edges]
        for pick in product(*choices):
            if injective and len(set(pick)) < len(pick):
                continue
            yield Match(tuple((n, h[n]) for n in order),
                        tuple((e[0], x) for e, x in zip(lhs_edges, pick)))


def find_matches(g: LDGraph, rule: Rule, injective: bool = False) -> list[Match]:
    """All matches, ordered by the host ids of the sorted LHS nodes."""
    return list(_matches(g, rule, injective))


def applicable(g: LDGraph, rule: Rule, injective: bool = False) -> bool:
    return next(_matches(g, rule, injective), None) is not None


def is_match(g: LDGraph, rule: Rule, m: Match) -> bool:
    """Re-check the four match conditions."""
    h, he = m.node_map, m.edge_map
    if set(h) != set(rule.nodes) or set(he) != {e[0] for e in rule.edges}:
        return False
    for n in rule.nodes:
        if h[n] not in g.active:
            return False
        for c in rule.labels[n]:
            if not concept_mask(g, c) & g.index().bit(h[n]):
                return False
    for eid, s, t, r in rule.edges:
        host = g.edges.get(he[eid])
        if host is None or host != (h[s], h[t], r):
            return False
    return True


def instantiate(g: LDGraph, rule: Rule, m: Match) -> tuple[LDGraph, list[Action]]:
    """Bind fresh names to the lowest reserved nodes (adding some if needed)
    and return the padded graph with the instantiated RHS."""
    mapping = m.node_map
    spare = g.reserved()
    while len(spare) < len(rule.fresh):
        g, name = reserve_fresh(g)
        spare.append(name)
    for f, x in zip(rule.fresh, spare):
        mapping[f] = x
    return g, [a.rename(mapping) for a in rule.rhs]


def apply_rule(g: LDGraph, rule: Rule, m: Match) -> LDGraph:
    g, actions = instantiate(g, rule, m)
    return apply_sequence(g, actions)


# --------------------------------------------------------------------------
# applicability formulas


def concept_to_fol(c: Concept, x, fresh=None) -> Fol:
    """First-order translation of a label at term ``x``."""
    counter = fresh if fresh is not None else [0]

    def var():
        counter[0] += 1
        return f"y{counter[0]}"

    def go(c, x):
        if isinstance(c, Top):
            return FTRUE
        if isinstance(c, Atom):
            return Pred(c.name, x)
        if isinstance(c, Nominal):
            return Eq(x, Const(c.name))
        if isinstance(c, Not):
            return neg(go(c.args[0], x))
        if isinstance(c, Or):
            return lor(go(c.args[0], x), go(c.args[1], x))
        if isinstance(c, Exists):
            role, body = c.args
            y = var()
            inner = go(body, Var(y))
            if role.is_universal:
                return fexists(y, inner)
            if role.is_inverse:
                return fexists(y, land(Rel(role.name, Var(y), x), inner))
            return fexists(y, land(Rel(role.name, x, Var(y)), inner))
        raise InexpressibleLabel(f"label construct {type(c).__name__} has no first-order "
                                 "translation here")

    return go(c, x)


def app_formula_fol(rule: Rule) -> Fol:
    """``exists x_n ... . Active(x_n) and labels and edges``."""
    return _fol_body(rule, {n: Var(n) for n in rule.nodes}, closed=True)


def _fol_body(rule: Rule, term: Mapping, closed: bool, fresh_terms=()) -> Fol:
    counter = [0]
    parts = []
    for n in rule.nodes:
        parts.append(Pred(ACTIVE, term[n]))
        for c in rule.labels[n]:
            parts.append(concept_to_fol(c, term[n], counter))
    for _, s, t, r in rule.edges:
        parts.append(Rel(r, term[s], term[t]))
    for k, f in enumerate(fresh_terms):
        parts.append(neg(Pred(ACTIVE, f)))
        for g in fresh_terms[:k]:
            parts.append(neg(Eq(g, f)))
    body = conj(parts, "fol")
    if closed:
        for n in reversed(rule.nodes):
            body = FExists(n, body)
    return body


def app_bound_fol(rule: Rule, term: Mapping, fresh_terms) -> Fol:
    """Match condition on given terms, with the fresh names unused and distinct."""
    return _fol_body(rule, term, closed=False, fresh_terms=fresh_terms)


def _tree_root(name, nodes, edges):
    incoming = {n: 0 for n in nodes}
    for _, s, t, r in edges:
        incoming[t] += 1
    roots = [n for n in nodes if incoming[n] == 0]
    if len(roots) != 1 or any(v > 1 for v in incoming.values()) \
            or len(edges) != len(nodes) - 1:
        raise NotATree(f"rule {name}: left-hand side is not a rooted tree")
    return roots[0]


def tree_root(rule: Rule):
    """The root if the LHS is a rooted tree (edges point away from it)."""
    if not rule.nodes:
        raise NotATree(f"rule {rule.name} has an empty left-hand side")
    return _tree_root(rule.name, rule.nodes, rule.edges)


def _has_positive_atom(c: Concept) -> bool:
    if isinstance(c, Atom):
        return True
    pair = match_and(c)
    if pair is not None:
        return _has_positive_atom(pair[0]) or _has_positive_atom(pair[1])
    return False


def _tree_formula(rule: Rule, root) -> Concept:
    children = {n: [] for n in rule.nodes}
    for _, s, t, r in sorted(rule.edges, key=lambda e: id_key(e[0])):
        children[s].append((r, t))

    def psi(n):
        parts = list(rule.labels[n])
        for r, m in children[n]:
            parts.append(Exists(basic(r), psi(m)))
        if not parts:
            return TOP
        out = parts[0]
        for p in parts[1:]:
            out = Not(Or(Not(out), Not(p)))
        return out

    body = psi(root)
    # an edge or a basic label already forces the root to be active
    if not children[root] and not any(_has_positive_atom(c) for c in rule.labels[root]):
        body = land(Atom(ACTIVE), body) if body is not TOP else Atom(ACTIVE)
    return Exists(U, body)


def app_formula_alcu(rule: Rule) -> Concept:
    """``exists U . psi(root)`` for a tree-shaped left-hand side."""
    return _tree_formula(rule, tree_root(rule))


def components(rule: Rule) -> list[tuple]:
    """Weakly connected components of the LHS as ``(nodes, edges)``."""
    owner = {n: n for n in rule.nodes}

    def find(n):
        while owner[n] != n:
            owner[n] = owner[owner[n]]
            n = owner[n]
        return n

    for _, s, t, _ in rule.edges:
        owner[find(s)] = find(t)
    groups: dict = {}
    for n in rule.nodes:
        groups.setdefault(find(n), []).append(n)
    out = []
    for nodes in groups.values():
        keep = set(nodes)
        out.append((tuple(nodes), tuple(e for e in rule.edges if e[1] in keep)))
    return out


def app_formula_forest(rule: Rule) -> Concept:
    """Conjunction of the tree formulas of the components. Matches need not
    be injective, so the components can be matched independently."""
    parts = []
    for nodes, edges in components(rule):
        parts.append(_tree_formula(rule, _tree_root(rule.name, nodes, edges)))
    out = parts[0]
    for p in parts[1:]:
        out = Not(Or(Not(out), Not(p)))
    return out


def app_bound_dl(rule: Rule, names: Mapping, fresh_names=()) -> Concept:
    """Global concept: the LHS nodes named by ``names`` form a match and the
    fresh names denote distinct unused nodes."""
    parts = []
    for n in rule.nodes:
        parts.append(at(names[n], conj([Atom(ACTIVE)] + list(rule.labels[n]))))
    for _, s, t, r in rule.edges:
        parts.append(at(names[s], exists(basic(r), nom(names[t]))))
    for k, f in enumerate(fresh_names):
        parts.append(at(f, neg(Atom(ACTIVE))))
        for g in fresh_names[:k]:
            parts.append(neg(at(g, nom(f))))
    return conj(parts)


def app_formula_dl(rule: Rule) -> Concept:
    """Closed applicability concept: the forest form when possible, otherwise
    a parameter binder over the LHS nodes."""
    if not rule.nodes:
        return TOP
    try:
        return app_formula_forest(rule)
    except NotATree:
        pass
    params = tuple(f"{n}@0" for n in rule.nodes)
    body = app_bound_dl(rule, dict(zip(rule.nodes, params)))
    return Some(params, body)
