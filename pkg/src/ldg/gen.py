"""Random graphs, formulas and actions for property tests and fuzzing."""

from __future__ import annotations

import random
from itertools import product

from .graph import (AddC, AddE, AddN, Alphabet, Cl, CloneParams, DelC, DelE, DelN,
                    LDGraph, Mrg, Redirect, sort_ids)
from .logic import (ACTIVE, BOT, TOP, U, Atom, Const, Eq, Exists, FExists, FNot, FOr,
                    FTop, Lt, Nominal, Not, Or, Pred, Rel, SelfR, Top, Var, basic, inv)

CONCEPTS = ("A", "B")
ROLES = ("r", "s")
KINDS = ("add_N", "del_N", "add_C", "del_C", "add_E", "del_E", "redirect", "mrg", "cl")


def random_graph(rng: random.Random, max_active: int = 5, max_edges: int = 8,
                 concepts=CONCEPTS, roles=ROLES, reserved: int = 2,
                 min_active: int = 0) -> LDGraph:
    k = rng.randint(min_active, max_active)
    nodes = [f"n{t}" for t in range(k)]
    spare = [f"n{k + t}" for t in range(reserved)]
    labels = {n: {c for c in concepts if rng.random() < 0.4} for n in nodes}
    edges = {}
    if nodes and roles:
        for e in range(rng.randint(0, max_edges)):
            edges[f"e{e}"] = (rng.choice(nodes), rng.choice(nodes), rng.choice(roles))
    return LDGraph(Alphabet(concepts, roles), nodes + spare, nodes, labels, edges)


def _role(rng, roles, inverse=True, universal=True):
    x = rng.random()
    if universal and x < 0.15:
        return U
    name = rng.choice(roles)
    if inverse and x > 0.7:
        return inv(name)
    return basic(name)


def random_concept(rng: random.Random, depth: int = 4, names=(), concepts=CONCEPTS,
                   roles=ROLES, max_n: int = 3, inverse: bool = True,
                   counting: bool = True, self_: bool = True, active: bool = True):
    """A random substitution-free concept of depth at most ``depth``."""
    concepts, roles, names = sorted(concepts), sorted(roles), list(names)

    def leaf():
        pool = ["top", "atom", "atom"]
        if names:
            pool.append("nominal")
        if active:
            pool.append("active")
        if self_ and roles:
            pool.append("self")
        pick = rng.choice(pool)
        if pick == "top":
            return TOP
        if pick == "atom":
            return Atom(rng.choice(concepts)) if concepts else TOP
        if pick == "active":
            return Atom(ACTIVE)
        if pick == "nominal":
            return Nominal(rng.choice(names))
        return SelfR(_role(rng, roles, inverse, universal=False))

    def go(d):
        if d <= 1 or rng.random() < 0.2:
            return leaf()
        pick = rng.choice(["not", "or", "and", "exists", "exists", "lt"] if roles
                          else ["not", "or", "and"])
        if pick == "not":
            return Not(go(d - 1))
        if pick == "or":
            return Or(go(d - 1), go(d - 1))
        if pick == "and":
            return Not(Or(Not(go(d - 1)), Not(go(d - 1))))
        if pick == "exists" or not counting:
            return Exists(_role(rng, roles, inverse), go(d - 1))
        return Lt(rng.randint(1, max_n), _role(rng, roles, inverse), go(d - 1))

    return go(depth)


def random_fol(rng: random.Random, depth: int = 4, consts=(), concepts=CONCEPTS,
               roles=ROLES, free=(), active: bool = True):
    """A random first-order formula whose free variables lie in ``free``."""
    concepts, roles, consts = sorted(concepts), sorted(roles), list(consts)

    def term(scope):
        pool = [Var(v) for v in scope] + [Const(c) for c in consts]
        if not pool:
            return None
        return rng.choice(pool)

    def leaf(scope):
        pick = rng.choice(["top", "pred", "pred", "rel", "rel", "eq"])
        if pick == "top":
            return FTop()
        a = term(scope)
        if a is None:
            return FTop()
        if pick == "pred":
            pool = list(concepts) + ([ACTIVE] if active else [])
            return Pred(rng.choice(pool), a) if pool else FTop()
        b = term(scope)
        if pick == "eq":
            return Eq(a, b)
        return Rel(rng.choice(roles), a, b) if roles else FTop()

    def go(d, scope):
        if d <= 1 or rng.random() < 0.15:
            return leaf(scope)
        pick = rng.choice(["not", "or", "and", "exists", "exists"])
        if pick == "not":
            return FNot(go(d - 1, scope))
        if pick == "or":
            return FOr(go(d - 1, scope), go(d - 1, scope))
        if pick == "and":
            return FNot(FOr(FNot(go(d - 1, scope)), FNot(go(d - 1, scope))))
        v = f"x{len(scope)}" if rng.random() < 0.8 or not scope else rng.choice(scope)
        inner = scope if v in scope else scope + (v,)
        return FExists(v, go(d - 1, inner))

    return go(depth, tuple(free))


def random_clone_params(rng: random.Random, roles=ROLES) -> CloneParams:
    pick = lambda: frozenset(r for r in roles if rng.random() < 0.5)
    return CloneParams(pick(), pick(), pick(), pick(), pick())


def all_clone_params(roles=("r",)):
    """Every combination of the five role sets (32 for one role)."""
    subsets = [frozenset(c) for c in _powerset(roles)]
    for combo in product(subsets, repeat=5):
        yield CloneParams(*combo)


def _powerset(items):
    items = list(items)
    for mask in range(1 << len(items)):
        yield [x for k, x in enumerate(items) if mask >> k & 1]


def random_action(rng: random.Random, g: LDGraph, kind: str | None = None):
    """A random action of ``kind`` applicable to ``g``, or ``None``."""
    kind = kind or rng.choice(KINDS)
    act = sort_ids(g.active)
    res = g.reserved()
    concepts = sorted(g.alphabet.concepts)
    roles = sorted(g.alphabet.roles)
    if kind == "add_N":
        return AddN(rng.choice(res)) if res else None
    if kind == "cl":
        if not act or not res:
            return None
        return Cl(rng.choice(act), rng.choice(res), random_clone_params(rng, roles))
    if not act:
        return None
    i = rng.choice(act)
    j = rng.choice(act)
    if kind == "del_N":
        return DelN(i)
    if kind in ("add_C", "del_C"):
        if not concepts:
            return None
        c = rng.choice(concepts)
        return AddC(i, c) if kind == "add_C" else DelC(i, c)
    if kind in ("add_E", "del_E"):
        if not roles:
            return None
        if kind == "del_E" and g.edges and rng.random() < 0.7:
            s, t, r = rng.choice(list(g.edges.values()))
            return DelE(s, t, r)
        r = rng.choice(roles)
        return AddE(i, j, r) if kind == "add_E" else DelE(i, j, r)
    if kind == "redirect":
        return Redirect(i, j)
    if kind == "mrg":
        return Mrg(i, j)
    raise ValueError(f"unknown action kind {kind!r}")


def random_actions(rng: random.Random, g: LDGraph, length: int):
    """A random applicable sequence; returns (actions, final graph)."""
    from .graph import apply_elementary

    out = []
    for _ in range(length):
        for _ in range(10):
            a = random_action(rng, g)
            if a is not None:
                break
        else:
            break
        out.append(a)
        g = apply_elementary(g, a)
    return out, g


def random_strategy(rng: random.Random, names, depth: int = 4, invariant=None):
    """A random strategy over rule ``names`` with at most ``depth`` levels.
    Closures are annotated by ``invariant(rng)`` (default ``top``)."""
    from .strategy_ast import Choice, Eps, Must, RuleRef, Seq, Star, Try

    names = list(names)
    invariant = invariant or (lambda rng: TOP)

    def leaf():
        pick = rng.choice(["eps", "rule", "rule", "try", "must"])
        if pick == "eps":
            return Eps()
        name = rng.choice(names)
        return {"rule": RuleRef, "try": Try, "must": Must}[pick](name)

    def go(d):
        if d <= 1 or rng.random() < 0.25:
            return leaf()
        pick = rng.choice(["seq", "choice", "star"])
        if pick == "seq":
            return Seq(go(d - 1), go(d - 1))
        if pick == "choice":
            return Choice(go(d - 1), go(d - 1))
        return Star(go(d - 1), invariant(rng))

    return go(depth)
