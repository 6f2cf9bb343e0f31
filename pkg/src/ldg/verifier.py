"""Weakest preconditions, verification conditions and correctness checking.

Pre- and postconditions and invariants are read at the graph level. A DL
concept ``C`` stands for ``forall U . (Active => C)`` unless it is already
global; a first-order formula has its quantifiers restricted to active
nodes. Both readings are applied before any substitution is introduced,
because actions change ``Active``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .errors import InexpressibleApp, InexpressibleLabel, MissingInvariant
from .graph import Alphabet, LDGraph, apply_sequence, pad
from .logic import (ACTIVE, BOT, FFALSE, FTRUE, TOP, U, Atom, Eq, Every, Exists,
                    FExists, FNot, FOr, FSubst, FTop, Formula, Lt, Not, Or, Some, Subst,
                    Var, concept_mask, eval_fol, exists, fexists, feq, free_names,
                    is_global, lor, lt, neg, raw_and, raw_implies, relativize_active,
                    walk)
from .rewrite import (Rule, app_bound_dl, app_bound_fol, app_formula_dl,
                      app_formula_fol)
from .strategy import Graph, derivations, BOUND, ANY, FAILURE
from .strategy_ast import Choice, Eps, Must, RuleRef, Seq, Star, Strategy, Try
from .substitution import eliminate


@dataclass
class Specification:
    pre: Formula
    rules: dict
    strategy: Strategy
    post: Formula
    logic: str = "dl"
    bound_nodes: int = 4
    max_parallel: int = 1
    alphabet: Alphabet | None = None
    rules_file: str | None = None


@dataclass
class Counterexample:
    graph: LDGraph
    formula_value: bool = False
    trace: object = None


# ------------------------------------------------------------------ helpers


def family_of(logic: str) -> str:
    return "fol" if logic == "fol" else "dl"


def top_of(logic: str) -> Formula:
    return FTRUE if logic == "fol" else TOP


def glob(phi: Formula) -> Formula:
    """Graph-level reading of a user formula."""
    if phi.family == "fol":
        return relativize_active(phi)
    if is_global(phi):
        return phi
    return Not(Exists(U, Not(raw_implies(Atom(ACTIVE), phi))))


def fold(x: Formula) -> Formula:
    """Constant folding with the smart constructors."""
    memo: dict = {}
    for node in walk(x):
        args = [memo.get(a, a) if isinstance(a, Formula) else a for a in node.args]
        if isinstance(node, (Not, FNot)):
            out = neg(args[0])
        elif isinstance(node, (Or, FOr)):
            out = lor(args[0], args[1])
        elif isinstance(node, Exists):
            out = exists(args[0], args[1])
        elif isinstance(node, Lt):
            out = lt(*args)
        elif isinstance(node, FExists):
            out = fexists(args[0], args[1])
        elif isinstance(node, Eq):
            out = feq(args[0], args[1])
        elif isinstance(node, (Every, Some)) and args[1] in (TOP, BOT):
            out = args[1]
        elif isinstance(node, (Subst, FSubst)):
            out = type(node)(args[0], args[1])
        elif any(a is not b for a, b in zip(args, node.args)):
            out = type(node)(*args)
        else:
            out = node
        memo[node] = out
    return memo[x]


_LEVEL = re.compile(r"@(\d+)$")


def next_level(q: Formula) -> int:
    """One more than the largest ``@k`` suffix of a binder in ``q``."""
    top = -1
    for node in walk(q):
        names = ()
        if isinstance(node, (Every, Some)):
            names = node.args[0]
        elif isinstance(node, FExists):
            names = (node.args[0],)
        for n in names:
            m = _LEVEL.search(n)
            if m:
                top = max(top, int(m.group(1)))
    return top + 1


def wp_action(actions, q: Formula) -> Formula:
    """``q`` under the substitutions of ``actions``, last action innermost."""
    wrap = FSubst if q.family == "fol" else Subst
    for a in reversed(list(actions)):
        q = wrap(q, a)
    return q


def app_rule(rule: Rule, logic: str) -> Formula:
    if logic == "fol":
        try:
            return app_formula_fol(rule)
        except InexpressibleLabel as exc:
            raise InexpressibleApp(f"App({rule.name}) in first-order logic: {exc}") from exc
    return app_formula_dl(rule)


def rule_post(rule: Rule, q: Formula, logic: str) -> Formula:
    """``wp(alpha_rho, q)`` for every match: the LHS names and the fresh names
    become parameters ``name@k`` and the RHS is applied to them."""
    k = next_level(q)
    names = list(rule.nodes) + list(rule.fresh)
    params = {n: f"{n}@{k}" for n in names}
    if logic == "fol":
        terms = {n: Var(p) for n, p in params.items()}
        acts = [a.rename(terms) for a in rule.rhs]
        m = app_bound_fol(rule, terms, [terms[f] for f in rule.fresh])
        body = raw_implies(m, wp_action(acts, q))
        for n in reversed(names):
            body = FNot(FExists(params[n], FNot(body)))
        return body
    acts = [a.rename(params) for a in rule.rhs]
    m = app_bound_dl(rule, params, [params[f] for f in rule.fresh])
    body = raw_implies(m, wp_action(acts, q))
    if not names:
        return body
    return Every(tuple(params[n] for n in names), body)


def _rule(rules, name):
    from .errors import UnknownRule
    if name not in rules:
        raise UnknownRule(f"unknown rule {name!r}")
    return rules[name]


def wp_strategy(s: Strategy, q: Formula, rules: Mapping[str, Rule], logic: str = "dl"):
    if isinstance(s, Eps):
        return q
    if isinstance(s, (RuleRef, Must, Try)):
        rule = _rule(rules, s.name)
        app = app_rule(rule, logic)
        w = rule_post(rule, q, logic)
        if isinstance(s, RuleRef):
            return raw_implies(app, w)
        if isinstance(s, Must):
            return raw_and(app, w)
        return raw_and(raw_implies(app, w), raw_implies(Not(app) if logic == "dl"
                                                         else FNot(app), q))
    if isinstance(s, Seq):
        return wp_strategy(s.first, wp_strategy(s.second, q, rules, logic), rules, logic)
    if isinstance(s, Choice):
        return raw_and(wp_strategy(s.left, q, rules, logic),
                       wp_strategy(s.right, q, rules, logic))
    if isinstance(s, Star):
        return invariant(s, logic)
    raise TypeError(f"not a strategy: {s!r}")


def invariant(s: Star, logic: str) -> Formula:
    if s.inv is None:
        raise MissingInvariant("every closure needs an invariant {inv: ...}")
    return glob(s.inv)


def app_strategy(s: Strategy, rules: Mapping[str, Rule], logic: str = "dl") -> Formula:
    if isinstance(s, (RuleRef, Must)):
        return app_rule(_rule(rules, s.name), logic)
    if isinstance(s, (Eps, Try, Star)):
        return top_of(logic)
    if isinstance(s, Choice):
        return (FOr if logic == "fol" else Or)(app_strategy(s.left, rules, logic),
                                               app_strategy(s.right, rules, logic))
    if isinstance(s, Seq):
        return app_strategy(s.first, rules, logic)
    raise TypeError(f"not a strategy: {s!r}")


def vc_strategy(s: Strategy, q: Formula, rules: Mapping[str, Rule], logic: str = "dl"):
    if isinstance(s, (Eps, RuleRef, Must, Try)):
        if isinstance(s, (RuleRef, Must, Try)):
            _rule(rules, s.name)
        return top_of(logic)
    if isinstance(s, Seq):
        return raw_and(vc_strategy(s.first, wp_strategy(s.second, q, rules, logic),
                                   rules, logic),
                       vc_strategy(s.second, q, rules, logic))
    if isinstance(s, Choice):
        return raw_and(vc_strategy(s.left, q, rules, logic),
                       vc_strategy(s.right, q, rules, logic))
    if isinstance(s, Star):
        inv = invariant(s, logic)
        app = app_strategy(s.body, rules, logic)
        not_ = FNot if logic == "fol" else Not
        return raw_and(raw_and(vc_strategy(s.body, q, rules, logic),
                               raw_implies(raw_and(inv, app),
                                           wp_strategy(s.body, inv, rules, logic))),
                       raw_implies(raw_and(inv, not_(app)), q))
    raise TypeError(f"not a strategy: {s!r}")


def correctness_raw(sp: Specification) -> Formula:
    """``(Pre => wp(s, Post)) and vc(s, Post)`` exactly as in the figures."""
    pre, post = glob(sp.pre), glob(sp.post)
    return raw_and(raw_implies(pre, wp_strategy(sp.strategy, post, sp.rules, sp.logic)),
                   vc_strategy(sp.strategy, post, sp.rules, sp.logic))


def correctness_formula(sp: Specification, expand: bool = True) -> Formula:
    """The correctness formula, constant-folded and, when ``expand``,
    free of substitutions."""
    phi = fold(correctness_raw(sp))
    if expand:
        phi = fold(eliminate(phi))
    return phi


def fresh_demand(s: Strategy, rules: Mapping[str, Rule]) -> int:
    """Reserved nodes that make every fresh-name binder satisfiable."""
    if isinstance(s, (RuleRef, Must, Try)):
        return len(_rule(rules, s.name).fresh)
    if isinstance(s, Seq):
        return fresh_demand(s.first, rules) + fresh_demand(s.second, rules)
    if isinstance(s, Choice):
        return max(fresh_demand(s.left, rules), fresh_demand(s.right, rules))
    if isinstance(s, Star):
        return fresh_demand(s.body, rules)
    return 0


# ------------------------------------------------------------------ checking


def check_on_graph(g: LDGraph, phi: Formula, closed: bool | None = None) -> bool:
    """``g |= phi``. A global concept must hold on the whole universe, any
    other concept on every active node; first-order formulas are sentences."""
    if phi.family == "fol":
        return eval_fol(g, phi)
    idx = g.index()
    m = concept_mask(g, phi)
    if closed is None:
        closed = is_global(phi)
    if closed:
        return m == idx.full
    return idx.active & ~m == 0


def bounded_validity(phi: Formula, alphabet: Alphabet, max_nodes: int = 4,
                     max_parallel: int = 1, pad_nodes: int = 0, method: str = "z3",
                     budget: int | None = 2_000_000, closed: bool | None = None,
                     timeout_ms: int | None = None) -> Counterexample | None:
    """First graph with at most ``max_nodes`` active nodes (and ``pad_nodes``
    reserved ones) violating ``phi``, or ``None``: no counterexample up to
    that size. ``method`` is ``z3`` or ``enum`` (explicit enumeration).
    Both methods use a universe of ``max_nodes + pad_nodes`` nodes; the
    positions beyond the active ones are reserved."""
    if closed is None:
        closed = phi.family == "fol" or is_global(phi)
    if method == "enum":
        from .models import enumerate_graphs
        # the universe always has max_nodes + pad_nodes positions, as in z3
        for k in range(max_nodes + 1):
            for g in enumerate_graphs(alphabet, k, max_parallel, max_nodes - k + pad_nodes,
                                      min_nodes=k, budget=budget):
                if not check_on_graph(g, phi, closed):
                    return Counterexample(g, False)
        return None
    if method != "z3":
        raise ValueError(f"unknown method {method!r}")
    from .symbolic import find_counterexample
    g = find_counterexample(phi, alphabet, max_nodes, pad_nodes, closed, timeout_ms)
    if g is None:
        return None
    if check_on_graph(g, phi, closed):
        raise AssertionError("solver model does not falsify the formula")
    return Counterexample(g, False)


def verify(sp: Specification, max_nodes: int | None = None, method: str = "z3",
           timeout_ms: int | None = None):
    """Bounded validity of the correctness formula; returns (formula, cex)."""
    phi = correctness_formula(sp)
    alphabet = sp.alphabet or spec_alphabet(sp)
    cex = bounded_validity(phi, alphabet, max_nodes or sp.bound_nodes, sp.max_parallel,
                           fresh_demand(sp.strategy, sp.rules), method, closed=True,
                           timeout_ms=timeout_ms)
    return phi, cex


def spec_alphabet(sp: Specification) -> Alphabet:
    from .logic import concept_names, role_names
    concepts, roles = set(), set()
    for rule in sp.rules.values():
        c, r = rule.names()
        concepts |= c
        roles |= r
    for phi in (sp.pre, sp.post):
        concepts |= concept_names(phi)
        roles |= role_names(phi)
    concepts.discard(ACTIVE)
    return Alphabet(concepts, roles)


# ------------------------------------------------------------------ soundness


@dataclass
class SoundnessReport:
    sampled: int = 0
    satisfying: int = 0
    outcomes: int = 0
    any_graph: int = 0
    failures: int = 0
    bound_hits: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def test_soundness(sp: Specification, sampler: Callable[[random.Random], LDGraph],
                   trials: int = 500, step_bound: int = 50, seed: int = 0,
                   max_attempts: int | None = None, phi: Formula | None = None,
                   injective: bool = False) -> SoundnessReport:
    """Sample graphs until ``trials`` of them satisfy Pre and the correctness
    formula, and check that every reachable graph satisfies Post."""
    rng = random.Random(seed)
    phi = phi if phi is not None else correctness_formula(sp)
    pre, post = glob(sp.pre), glob(sp.post)
    demand = fresh_demand(sp.strategy, sp.rules)
    rep = SoundnessReport()
    limit = max_attempts if max_attempts is not None else 50 * trials
    while rep.satisfying < trials and rep.sampled < limit:
        g = pad(sampler(rng), demand)
        rep.sampled += 1
        if not (check_on_graph(g, pre, closed=True) and check_on_graph(g, phi, closed=True)):
            continue
        rep.satisfying += 1
        for o in derivations(g, sp.strategy, sp.rules, step_bound, injective):
            rep.outcomes += 1
            if o is ANY:
                rep.any_graph += 1
            elif o is FAILURE:
                rep.failures += 1
            elif o is BOUND:
                rep.bound_hits += 1
            elif not check_on_graph(o.graph, post, closed=True):
                rep.violations.append((g, o.graph))
    return rep


test_soundness.__test__ = False   # not a pytest test despite the name


def lemma_holds(g: LDGraph, actions, q: Formula) -> bool:
    """``g |= eliminate(wp(alpha, q))`` implies ``g[alpha] |= q``."""
    before = eliminate(wp_action(actions, q))
    if q.family == "fol":
        if not eval_fol(g, before):
            return True
        return eval_fol(apply_sequence(g, actions), q)
    m = concept_mask(g, before)
    after = apply_sequence(g, actions)
    return concept_mask(after, q) & m == m
