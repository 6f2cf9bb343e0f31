"""Bounded model search with z3.

A graph over a fixed universe becomes boolean variables (activity, labels,
edge triples). Formulas are unfolded over the universe. Binders that are
existential in a counterexample and have a global body are Skolemized with
one-hot selectors; all other binders are expanded.
"""

from __future__ import annotations

from itertools import product

import z3

from .errors import BudgetExceeded, UnknownName
from .graph import Alphabet, LDGraph
from .logic import (ACTIVE, Atom, Concept, Eq, Every, Exists, FExists, FNot, FOr, Fol,
                    FTop, Lt, Nominal, Not, Or, Pred, Rel, SelfR, Some, Top, Var,
                    free_names, is_global)


class Encoder:
    def __init__(self, alphabet: Alphabet, max_nodes: int, pad: int = 0):
        self.alphabet = alphabet
        self.size = max_nodes + pad
        self.names = [f"n{x}" for x in range(self.size)]
        self.pos = {n: x for x, n in enumerate(self.names)}
        U = range(self.size)
        self.act = [z3.Bool(f"act_{x}") if x < max_nodes else z3.BoolVal(False) for x in U]
        self.lab = {c: [z3.Bool(f"{c}_{x}") for x in U] for c in sorted(alphabet.concepts)}
        self.edge = {r: [[z3.Bool(f"{r}_{x}_{y}") for y in U] for x in U]
                     for r in sorted(alphabet.roles)}
        self.side = []
        for x in U:
            off = [self.lab[c][x] for c in self.lab]
            for r in self.edge:
                for y in U:
                    off.append(self.edge[r][x][y])
                    off.append(self.edge[r][y][x])
            self.side.append(z3.Implies(z3.Not(self.act[x]), z3.Not(z3.Or(off))
                                        if off else z3.BoolVal(True)))
        # active nodes form a prefix
        for x in range(max_nodes - 1):
            self.side.append(z3.Implies(self.act[x + 1], self.act[x]))
        self.memo: dict = {}
        self.globals: dict = {}
        self.sels: list = []

    # ---------------------------------------------------------------- concepts

    def node_of(self, name, env):
        if name in env:
            return env[name]
        if name in self.pos:
            return ("node", self.pos[name])
        raise UnknownName(f"unknown nominal {name!r}")

    def is_global(self, c) -> bool:
        hit = self.globals.get(c)
        if hit is None:
            hit = self.globals[c] = is_global(c)
        return hit

    def concept(self, c: Concept, x: int, env: dict, pol: bool):
        if self.is_global(c):
            x = 0   # same value everywhere
        fn = free_names(c)
        key = (c, x, pol, tuple(env.get(n) for n in fn))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._concept(c, x, env, pol)
        self.memo[key] = out
        return out

    def _concept(self, c, x, env, pol):
        if isinstance(c, Top):
            return z3.BoolVal(True)
        if isinstance(c, Atom):
            name = c.args[0]
            if name == ACTIVE:
                return self.act[x]
            if name not in self.lab:
                raise UnknownName(f"unknown concept {name!r}")
            return self.lab[name][x]
        if isinstance(c, Nominal):
            kind, v = self.node_of(c.args[0], env)
            if kind == "node":
                return z3.BoolVal(v == x)
            return self.sels[v][x]
        if isinstance(c, Not):
            return z3.Not(self.concept(c.args[0], x, env, not pol))
        if isinstance(c, Or):
            return z3.Or(self.concept(c.args[0], x, env, pol),
                         self.concept(c.args[1], x, env, pol))
        if isinstance(c, Exists):
            role, body = c.args
            return z3.Or([self._step(role, x, y, self.concept(body, y, env, pol))
                          for y in range(self.size)])
        if isinstance(c, SelfR):
            role = c.args[0]
            if role.is_universal:
                return z3.BoolVal(True)
            return self._edge(role.name, x, x)
        if isinstance(c, Lt):
            n, role, body = c.args
            lits = [self._step(role, x, y, self.concept(body, y, env, not pol))
                    for y in range(self.size)]
            return z3.PbLe([(l, 1) for l in lits], n - 1)
        if isinstance(c, (Every, Some)):
            params, body = c.args
            universal = isinstance(c, Every)
            # existential in a counterexample: Every in positive or Some in
            # negative position, since the solver looks for "not phi"
            if universal == pol and self.is_global(body):
                inner = dict(env)
                for p in params:
                    vec = [z3.Bool(f"sel{len(self.sels)}_{y}") for y in range(self.size)]
                    self.side.append(z3.PbEq([(v, 1) for v in vec], 1))
                    inner[p] = ("sel", len(self.sels))
                    self.sels.append(vec)
                return self.concept(body, x, inner, pol)
            parts = []
            for combo in product(range(self.size), repeat=len(params)):
                inner = dict(env)
                inner.update((p, ("node", y)) for p, y in zip(params, combo))
                parts.append(self.concept(body, x, inner, pol))
            return z3.And(parts) if universal else z3.Or(parts)
        raise TypeError(f"cannot encode {type(c).__name__}")

    def _edge(self, r, x, y):
        if r not in self.edge:
            raise UnknownName(f"unknown role {r!r}")
        return self.edge[r][x][y]

    def _step(self, role, x, y, body):
        if role.is_universal:
            return body
        if role.is_inverse:
            return z3.And(self._edge(role.name, y, x), body)
        return z3.And(self._edge(role.name, x, y), body)

    # ---------------------------------------------------------------- first order

    def fol(self, f: Fol, env: dict):
        fn = free_names(f)
        key = (f, tuple(env.get(n) for n in fn))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._fol(f, env)
        self.memo[key] = out
        return out

    def term(self, t, env):
        if isinstance(t, Var):
            return env[t.name]
        if t.name not in self.pos:
            raise UnknownName(f"unknown constant {t.name!r}")
        return self.pos[t.name]

    def _fol(self, f, env):
        if isinstance(f, FTop):
            return z3.BoolVal(True)
        if isinstance(f, Pred):
            name, t = f.args
            x = self.term(t, env)
            if name == ACTIVE:
                return self.act[x]
            if name not in self.lab:
                raise UnknownName(f"unknown concept {name!r}")
            return self.lab[name][x]
        if isinstance(f, Rel):
            name, a, b = f.args
            return self._edge(name, self.term(a, env), self.term(b, env))
        if isinstance(f, Eq):
            return z3.BoolVal(self.term(f.args[0], env) == self.term(f.args[1], env))
        if isinstance(f, FNot):
            return z3.Not(self.fol(f.args[0], env))
        if isinstance(f, FOr):
            return z3.Or(self.fol(f.args[0], env), self.fol(f.args[1], env))
        if isinstance(f, FExists):
            var, body = f.args
            parts = []
            for y in range(self.size):
                inner = dict(env)
                inner[var] = y
                parts.append(self.fol(body, inner))
            return z3.Or(parts)
        raise TypeError(f"cannot encode {type(f).__name__}")

    # ---------------------------------------------------------------- matches

    def match_exists(self, rule):
        """Some assignment of the LHS nodes to active nodes meets every label
        and edge of the rule. Built from the rule itself, not from App."""
        parts = []
        for combo in product(range(self.size), repeat=len(rule.nodes)):
            h = dict(zip(rule.nodes, combo))
            conds = [self.act[h[n]] for n in rule.nodes]
            for n in rule.nodes:
                conds += [self.concept(c, h[n], {}, True) for c in rule.labels[n]]
            conds += [self._edge(r, h[s], h[t]) for _, s, t, r in rule.edges]
            parts.append(z3.And(conds))
        return z3.Or(parts) if parts else z3.BoolVal(True)

    # ---------------------------------------------------------------- models

    def graph(self, model) -> LDGraph:
        val = lambda b: z3.is_true(model.eval(b, model_completion=True))
        active = [n for x, n in enumerate(self.names) if val(self.act[x])]
        labels = {n: {c for c in self.lab if val(self.lab[c][self.pos[n]])} for n in active}
        edges, e = {}, 0
        for r in self.edge:
            for x in range(self.size):
                for y in range(self.size):
                    if val(self.edge[r][x][y]):
                        edges[f"e{e}"] = (self.names[x], self.names[y], r)
                        e += 1
        return LDGraph(self.alphabet, self.names, active, labels, edges)


def find_counterexample(phi, alphabet: Alphabet, max_nodes: int, pad: int = 0,
                        closed: bool = True, timeout_ms: int | None = None):
    """A graph where ``phi`` fails, or ``None``. DL formulas are read at the
    graph level: the whole universe when ``closed``, else every active node."""
    enc = Encoder(alphabet, max_nodes, pad)
    if phi.family == "fol":
        target = enc.fol(phi, {})
    elif closed:
        target = enc.concept(phi, 0, {}, True)
    else:
        target = z3.And([z3.Implies(enc.act[x], enc.concept(phi, x, {}, True))
                         for x in range(enc.size)])
    solver = z3.Solver()
    if timeout_ms:
        solver.set("timeout", timeout_ms)
    solver.add(*enc.side)
    solver.add(z3.Not(target))
    return _solve(solver, enc)


def _solve(solver, enc):
    res = solver.check()
    if res == z3.unknown:
        raise BudgetExceeded(f"solver gave up: {solver.reason_unknown()}")
    if res == z3.unsat:
        return None
    return enc.graph(solver.model())


def app_disagreement(rule, phi, alphabet: Alphabet, max_nodes: int,
                     timeout_ms: int | None = None):
    """A host where ``phi`` and the existence of a match differ, or ``None``.
    A DL ``phi`` is read at the graph level (it should be global)."""
    enc = Encoder(alphabet, max_nodes)
    if phi.family == "fol":
        value = enc.fol(phi, {})
    else:
        value = z3.And([enc.concept(phi, x, {}, True) for x in range(enc.size)])
    solver = z3.Solver()
    if timeout_ms:
        solver.set("timeout", timeout_ms)
    solver.add(*enc.side)
    solver.add(value != enc.match_exists(rule))
    return _solve(solver, enc)
