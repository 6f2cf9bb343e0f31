"""Strategy applicability, execution and exhaustive derivations."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from .errors import StepBoundExceeded, UnknownRule
from .graph import LDGraph
from .rewrite import Rule, _matches, applicable, apply_rule
from .strategy_ast import (Choice, Eps, Must, RuleRef, Seq, Star, Strategy, Try,
                           rule_names)

DEFAULT_STEP_BOUND = 10_000


@dataclass(frozen=True)
class Graph:
    graph: LDGraph

    def __str__(self):
        return "Graph"


class _Marker:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    __str__ = __repr__


ANY = _Marker("AnyGraph")          # a rule did not match: stop successfully
FAILURE = _Marker("Failure")       # a mandatory rule did not match
BOUND = _Marker("StepBoundExceeded")


def check_rules(s: Strategy, rules: Mapping[str, Rule]):
    missing = sorted(rule_names(s) - set(rules))
    if missing:
        raise UnknownRule(f"unknown rule(s) in strategy: {', '.join(missing)}")


def app(g: LDGraph, s: Strategy, rules: Mapping[str, Rule], injective: bool = False) -> bool:
    """Whether ``s`` can perform its first step on ``g``."""
    check_rules(s, rules)
    return _app(g, s, rules, injective)


def _app(g, s, rules, injective):
    if isinstance(s, (RuleRef, Must)):
        return applicable(g, rules[s.name], injective)
    if isinstance(s, (Eps, Try, Star)):
        return True
    if isinstance(s, Choice):
        return _app(g, s.left, rules, injective) or _app(g, s.right, rules, injective)
    if isinstance(s, Seq):
        return _app(g, s.first, rules, injective)
    raise TypeError(f"not a strategy: {s!r}")


def execute(g: LDGraph, s: Strategy, rules: Mapping[str, Rule], policy: str = "first-match",
            step_bound: int = DEFAULT_STEP_BOUND, seed: int | None = None,
            injective: bool = False):
    """Follow one derivation. ``first-match`` takes the first match and the
    left branch; ``seeded`` picks both at random from ``seed``."""
    if step_bound < 1:
        raise ValueError("step_bound must be at least 1")
    if policy not in ("first-match", "seeded"):
        raise ValueError(f"unknown policy {policy!r}")
    check_rules(s, rules)
    rng = random.Random(seed) if policy == "seeded" else None
    steps = [0]

    def tick():
        if steps[0] >= step_bound:
            raise StepBoundExceeded(f"strategy did not finish within {step_bound} steps")
        steps[0] += 1

    def rule_step(g, name, otherwise):
        rule = rules[name]
        if rng is None:
            m = next(_matches(g, rule, injective), None)
        else:
            ms = list(_matches(g, rule, injective))
            m = rng.choice(ms) if ms else None
        if m is None:
            return otherwise
        tick()
        return Graph(apply_rule(g, rule, m))

    def run(g, s):
        if isinstance(s, Eps):
            return Graph(g)
        if isinstance(s, RuleRef):
            return rule_step(g, s.name, ANY)
        if isinstance(s, Try):
            return rule_step(g, s.name, Graph(g))
        if isinstance(s, Must):
            return rule_step(g, s.name, FAILURE)
        if isinstance(s, Seq):
            out = run(g, s.first)
            return run(out.graph, s.second) if isinstance(out, Graph) else out
        if isinstance(s, Choice):
            left = rng is None or rng.random() < 0.5
            return run(g, s.left if left else s.right)
        if isinstance(s, Star):
            while _app(g, s.body, rules, injective):
                tick()
                out = run(g, s.body)
                if not isinstance(out, Graph):
                    return out
                g = out.graph
            return Graph(g)
        raise TypeError(f"not a strategy: {s!r}")

    return run(g, s)


def derivations(g: LDGraph, s: Strategy, rules: Mapping[str, Rule],
                step_bound: int = 50, injective: bool = False) -> frozenset:
    """Every outcome reachable within ``step_bound`` steps. Rule applications
    and closure iterations each cost one step; running out yields ``BOUND``."""
    check_rules(s, rules)
    memo: dict = {}

    def run(g, s, budget) -> frozenset:
        key = (g, s, budget)
        if key in memo:
            return memo[key]
        out = set()
        if isinstance(s, Eps):
            out.add((Graph(g), budget))
        elif isinstance(s, (RuleRef, Try, Must)):
            rule = rules[s.name]
            ms = list(_matches(g, rule, injective))
            if not ms:
                fallback = {RuleRef: ANY, Try: Graph(g), Must: FAILURE}[type(s)]
                out.add((fallback, budget))
            elif budget == 0:
                out.add((BOUND, 0))
            else:
                for m in ms:
                    out.add((Graph(apply_rule(g, rule, m)), budget - 1))
        elif isinstance(s, Seq):
            for o, b in run(g, s.first, budget):
                out |= run(o.graph, s.second, b) if isinstance(o, Graph) else {(o, b)}
        elif isinstance(s, Choice):
            out = set(run(g, s.left, budget)) | run(g, s.right, budget)
        elif isinstance(s, Star):
            if not _app(g, s.body, rules, injective):
                out.add((Graph(g), budget))
            elif budget == 0:
                out.add((BOUND, 0))
            else:
                for o, b in run(g, s.body, budget - 1):
                    out |= run(o.graph, s, b) if isinstance(o, Graph) else {(o, b)}
        else:
            raise TypeError(f"not a strategy: {s!r}")
        memo[key] = frozenset(out)
        return memo[key]

    return frozenset(o for o, _ in run(g, s, step_bound))


def graphs_of(outcomes) -> list[LDGraph]:
    return [o.graph for o in outcomes if isinstance(o, Graph)]
