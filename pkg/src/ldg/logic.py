"""Formula ASTs for the description logic and the first-order fragment,
and their evaluation over decorated graphs.

Formula nodes are hash-consed: building the same node twice returns the
same object, so structural equality is identity and large formulas with
shared subterms are stored and evaluated as DAGs.

Node sets are int bitmasks over the universe order of ``GraphIndex``.
The domain of evaluation is the whole universe, reserved nodes included.
"""

from __future__ import annotations

import itertools
import sys
import weakref
from dataclasses import dataclass
from typing import Mapping

from .errors import PendingSubstitution, UnboundVariable, UnknownName
from .graph import LDGraph, sort_ids

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

ACTIVE = "Active"

_TABLE: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()


class Formula:
    """Base of all interned AST nodes (terms included)."""

    __slots__ = ("args", "_free", "__weakref__")
    family = "formula"

    def __new__(cls, *args):
        key = (cls, args)
        obj = _TABLE.get(key)
        if obj is None:
            obj = object.__new__(cls)
            obj.args = args
            obj._free = None
            _TABLE[key] = obj
        return obj

    def __reduce__(self):
        return (type(self), self.args)

    def __repr__(self):
        from .syntax import show
        try:
            return show(self)
        except Exception:  # printing must never hide the object
            return f"{type(self).__name__}{self.args!r}"

    def children(self) -> tuple:
        return tuple(a for a in self.args if isinstance(a, Formula))


# --------------------------------------------------------------------------
# roles


@dataclass(frozen=True)
class Role:
    kind: str            # "basic" | "inv" | "U"
    name: str | None = None

    @property
    def is_universal(self) -> bool:
        return self.kind == "U"

    @property
    def is_inverse(self) -> bool:
        return self.kind == "inv"

    def inverse(self) -> "Role":
        if self.kind == "U":
            return self
        return Role("basic" if self.kind == "inv" else "inv", self.name)

    def __str__(self):
        if self.kind == "U":
            return "U"
        if self.kind == "inv":
            return f"inv {self.name}"
        return self.name


def basic(name: str) -> Role:
    return Role("basic", name)


def inv(name: str) -> Role:
    return Role("inv", name)


U = Role("U")


# --------------------------------------------------------------------------
# description logic concepts


class Concept(Formula):
    __slots__ = ()
    family = "dl"


class Top(Concept):
    __slots__ = ()


class Atom(Concept):
    __slots__ = ()

    @property
    def name(self) -> str:
        return self.args[0]


class Nominal(Concept):
    __slots__ = ()

    @property
    def name(self) -> str:
        return self.args[0]


class Not(Concept):
    __slots__ = ()


class Or(Concept):
    __slots__ = ()


class Exists(Concept):
    """``exists R . C``; args ``(role, concept)``."""
    __slots__ = ()


class SelfR(Concept):
    """``exists R . Self``; args ``(role,)``."""
    __slots__ = ()


class Lt(Concept):
    """``(< n R C)``; args ``(n, role, concept)``."""
    __slots__ = ()


class Subst(Concept):
    """Pending substitution ``C[a]``; args ``(concept, action)``."""
    __slots__ = ()


class Every(Concept):
    """Rule-variable binder: the intersection of ``body`` over every
    assignment of the parameter names to universe nodes.  Used by the
    verifier for "for every match" and never produced by elimination."""
    __slots__ = ()


class Some(Concept):
    """Union counterpart of ``Every``."""
    __slots__ = ()


# --------------------------------------------------------------------------
# first-order formulas


class Term(Formula):
    __slots__ = ()
    family = "term"

    @property
    def name(self) -> str:
        return self.args[0]


class Var(Term):
    __slots__ = ()


class Const(Term):
    __slots__ = ()


class Fol(Formula):
    __slots__ = ()
    family = "fol"


class FTop(Fol):
    __slots__ = ()


class Pred(Fol):
    """``C(t)``; ``Active`` is one of these."""
    __slots__ = ()


class Rel(Fol):
    """``r(t1, t2)``."""
    __slots__ = ()


class Eq(Fol):
    __slots__ = ()


class FNot(Fol):
    __slots__ = ()


class FOr(Fol):
    __slots__ = ()


class FExists(Fol):
    """``exists x . phi``; args ``(var name, body)``."""
    __slots__ = ()


class FSubst(Fol):
    __slots__ = ()


_KIT = {
    "dl": (Top, Not, Or),
    "fol": (FTop, FNot, FOr),
}


def _kit(x: Formula):
    return _KIT[x.family]


# --------------------------------------------------------------------------
# smart constructors (constant folding only)

TOP = Top()
BOT = Not(TOP)
FTRUE = FTop()
FFALSE = FNot(FTRUE)


def is_true(x) -> bool:
    return x is TOP or x is FTRUE


def is_false(x) -> bool:
    return x is BOT or x is FFALSE


def neg(x: Formula) -> Formula:
    top, not_, _ = _kit(x)
    if isinstance(x, not_):
        return x.args[0]
    return not_(x)


def lor(a: Formula, b: Formula) -> Formula:
    top, not_, or_ = _kit(a)
    if is_true(a) or is_true(b):
        return top()
    if is_false(a):
        return b
    if is_false(b) or a is b:
        return a
    if (isinstance(a, not_) and a.args[0] is b) or (isinstance(b, not_) and b.args[0] is a):
        return top()
    return or_(a, b)


def land(a: Formula, b: Formula) -> Formula:
    if is_false(a) or is_false(b):
        return neg(_kit(a)[0]())
    if is_true(a):
        return b
    if is_true(b) or a is b:
        return a
    return neg(lor(neg(a), neg(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return lor(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return land(implies(a, b), implies(b, a))


def disj(items, family="dl") -> Formula:
    out = BOT if family == "dl" else FFALSE
    for x in items:
        out = lor(out, x)
    return out


def conj(items, family="dl") -> Formula:
    out = TOP if family == "dl" else FTRUE
    for x in items:
        out = land(out, x)
    return out


# raw (non-folding) versions keep the exact shape of the wp/vc figures


def raw_and(a: Formula, b: Formula) -> Formula:
    _, not_, or_ = _kit(a)
    return not_(or_(not_(a), not_(b)))


def raw_implies(a: Formula, b: Formula) -> Formula:
    _, not_, or_ = _kit(a)
    return or_(not_(a), b)


def match_and(x: Formula):
    """Return ``(a, b)`` if ``x`` has the shape ``a and b``."""
    _, not_, or_ = _kit(x)
    if isinstance(x, not_) and isinstance(x.args[0], or_):
        l, r = x.args[0].args
        if isinstance(l, not_) and isinstance(r, not_):
            return l.args[0], r.args[0]
    return None


def match_implies(x: Formula):
    _, not_, or_ = _kit(x)
    if isinstance(x, or_) and isinstance(x.args[0], not_):
        return x.args[0].args[0], x.args[1]
    return None


# DL helpers


def atom(name: str) -> Concept:
    return Atom(name)


def nom(name) -> Concept:
    return Nominal(name)


def exists(role: Role, c: Concept) -> Concept:
    if c is BOT:
        return BOT
    return Exists(role, c)


def forall(role: Role, c: Concept) -> Concept:
    return neg(exists(role, neg(c)))


def lt(n: int, role: Role, c: Concept) -> Concept:
    if n <= 0:
        return BOT
    if c is BOT:
        return TOP
    return Lt(n, role, c)


def ge(n: int, role: Role, c: Concept) -> Concept:
    return neg(lt(n, role, c))


def some_u(c: Concept) -> Concept:
    return exists(U, c)


def at(name, c: Concept) -> Concept:
    """``exists U . ({name} and c)``: c holds at the named node."""
    return some_u(land(Nominal(name), c))


# FOL helpers


def fexists(var: str, body: Fol) -> Fol:
    if is_false(body):
        return FFALSE
    if is_true(body):
        return FExists(var, FTRUE)
    return FExists(var, body)


def fforall(var: str, body: Fol) -> Fol:
    return neg(fexists(var, neg(body)))


def feq(a: Term, b: Term) -> Fol:
    if a is b:
        return FTRUE
    if isinstance(a, Const) and isinstance(b, Const):
        return FFALSE
    return Eq(a, b)


# --------------------------------------------------------------------------
# structural queries


def free_names(x: Formula) -> tuple:
    """Names whose meaning depends on the environment.

    For concepts these are nominal names (parameters or nodes); for FOL
    formulas the free variable names.  Cached on the node.
    """
    if x._free is not None:
        return x._free
    if isinstance(x, Nominal):
        out = {x.args[0]}
    elif isinstance(x, Var):
        out = {x.args[0]}
    elif isinstance(x, (Every, Some)):
        out = set(free_names(x.args[1])) - set(x.args[0])
    elif isinstance(x, FExists):
        out = set(free_names(x.args[1])) - {x.args[0]}
    elif isinstance(x, (Subst, FSubst)):
        out = set(free_names(x.args[0]))
        for a in x.args[1].node_args():
            if isinstance(a, Var):
                out.add(a.name)
            elif isinstance(a, str) and x.family == "dl":
                out.add(a)
    else:
        out = set()
        for c in x.children():
            out.update(free_names(c))
    x._free = tuple(sorted(out))
    return x._free


def walk(x: Formula):
    """Every distinct node of the DAG, children before parents."""
    seen = set()
    order = []
    stack = [(x, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for c in node.children():
            if id(c) not in seen:
                stack.append((c, False))
    return order


def dag_size(x: Formula) -> int:
    return len(walk(x))


def tree_size(x: Formula) -> int:
    sizes: dict[int, int] = {}
    for node in walk(x):
        sizes[id(node)] = 1 + sum(sizes[id(c)] for c in node.children())
    return sizes[id(x)]


def depth(x: Formula) -> int:
    d: dict[int, int] = {}
    for node in walk(x):
        d[id(node)] = 1 + max((d[id(c)] for c in node.children()), default=0)
    return d[id(x)]


def has_subst(x: Formula) -> bool:
    return any(isinstance(n, (Subst, FSubst)) for n in walk(x))


def concept_names(x: Formula) -> set:
    out = set()
    for n in walk(x):
        if isinstance(n, Atom) and n.name != ACTIVE:
            out.add(n.name)
        elif isinstance(n, Pred) and n.args[0] != ACTIVE:
            out.add(n.args[0])
    return out


def role_names(x: Formula) -> set:
    out = set()
    for n in walk(x):
        if isinstance(n, (Exists, SelfR, Lt)):
            role = n.args[1] if isinstance(n, Lt) else n.args[0]
            if role.name is not None:
                out.add(role.name)
        elif isinstance(n, Rel):
            out.add(n.args[0])
    return out


def is_global(c: Concept) -> bool:
    """Syntactic test: the extension is either empty or the universe."""
    if isinstance(c, Top):
        return True
    if isinstance(c, (Exists, SelfR)) and c.args[0].is_universal:
        return True
    if isinstance(c, Lt) and c.args[1].is_universal:
        return True
    if isinstance(c, (Not, Or)):
        return all(is_global(k) for k in c.args)
    if isinstance(c, (Every, Some)):
        return is_global(c.args[1])
    if isinstance(c, Subst):
        return is_global(c.args[0])
    return False


# --------------------------------------------------------------------------
# evaluation


class ConceptEvaluator:
    """Evaluates concepts on one graph; memoizes per (node, relevant env)."""

    def __init__(self, g: LDGraph):
        self.g = g
        self.idx = g.index()
        self.memo: dict = {}

    def resolve(self, name, env):
        if env and name in env:
            return env[name]
        if name in self.idx.pos:
            return name
        raise UnknownName(f"unknown nominal {name!r}")

    def mask(self, c: Concept, env: Mapping | None = None) -> int:
        fn = free_names(c)
        if env and fn:
            key = (c, tuple(env.get(n) for n in fn))
        else:
            key = c
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        val = self._eval(c, env)
        self.memo[key] = val
        return val

    def _eval(self, c: Concept, env) -> int:
        idx = self.idx
        if isinstance(c, Top):
            return idx.full
        if isinstance(c, Atom):
            name = c.args[0]
            if name == ACTIVE:
                return idx.active
            if name not in self.g.alphabet.concepts:
                raise UnknownName(f"unknown concept {name!r}")
            return idx.labels.get(name, 0)
        if isinstance(c, Nominal):
            return idx.bit(self.resolve(c.args[0], env))
        if isinstance(c, Not):
            return idx.full & ~self.mask(c.args[0], env)
        if isinstance(c, Or):
            a = self.mask(c.args[0], env)
            if a == idx.full:
                return a
            return a | self.mask(c.args[1], env)
        if isinstance(c, Exists):
            role, body = c.args
            m = self.mask(body, env)
            if not m:
                return 0
            if role.is_universal:
                return idx.full
            rel = self._rel(role)
            out = 0
            for k, nb in enumerate(rel):
                if nb & m:
                    out |= 1 << k
            return out
        if isinstance(c, SelfR):
            role = c.args[0]
            if role.is_universal:
                return idx.full
            self._check_role(role)
            return idx.loops.get(role.name, 0)
        if isinstance(c, Lt):
            n, role, body = c.args
            m = self.mask(body, env)
            if role.is_universal:
                return idx.full if m.bit_count() < n else 0
            rel = self._rel(role)
            out = 0
            for k, nb in enumerate(rel):
                if (nb & m).bit_count() < n:
                    out |= 1 << k
            return out
        if isinstance(c, (Every, Some)):
            params, body = c.args
            everyq = isinstance(c, Every)
            acc = idx.full if everyq else 0
            base = dict(env or {})
            for combo in itertools.product(idx.nodes, repeat=len(params)):
                base.update(zip(params, combo))
                m = self.mask(body, base)
                if everyq:
                    acc &= m
                    if not acc:
                        break
                else:
                    acc |= m
                    if acc == idx.full:
                        break
            return acc
        if isinstance(c, Subst):
            raise PendingSubstitution("eliminate substitutions before evaluation")
        raise TypeError(f"not a concept: {c!r}")

    def _check_role(self, role: Role):
        if role.name not in self.g.alphabet.roles:
            raise UnknownName(f"unknown role {role.name!r}")

    def _rel(self, role: Role):
        self._check_role(role)
        if role.is_inverse:
            return self.idx.predecessors(role.name)
        return self.idx.successors(role.name)


def concept_mask(g: LDGraph, c: Concept, env: Mapping | None = None) -> int:
    return ConceptEvaluator(g).mask(c, env)


def eval_concept(g: LDGraph, c: Concept, env: Mapping | None = None) -> set:
    """The extension of ``c`` as a set of node names."""
    idx = g.index()
    return set(idx.mask_to_nodes(concept_mask(g, c, env)))


def holds_at(g: LDGraph, n: str, c: Concept, env: Mapping | None = None) -> bool:
    idx = g.index()
    if n not in idx.pos:
        raise UnknownName(f"unknown node {n!r}")
    return bool(concept_mask(g, c, env) & idx.bit(n))


def graph_satisfies(g: LDGraph, c: Concept, env: Mapping | None = None) -> bool:
    """``G |= c``: every active node is in the extension."""
    idx = g.index()
    return idx.active & ~concept_mask(g, c, env) == 0


class FolEvaluator:
    def __init__(self, g: LDGraph):
        self.g = g
        self.idx = g.index()
        self.triples = g.edge_triples()
        self.memo: dict = {}

    def term(self, t: Term, env) -> str:
        if isinstance(t, Var):
            if env is None or t.name not in env:
                raise UnboundVariable(f"unbound variable {t.name!r}")
            return env[t.name]
        if t.name not in self.idx.pos:
            raise UnknownName(f"unknown constant {t.name!r}")
        return t.name

    def value(self, f: Fol, env: Mapping | None) -> bool:
        fn = free_names(f)
        key = (f, tuple(env.get(n) for n in fn)) if fn and env else f
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        val = self._eval(f, env)
        self.memo[key] = val
        return val

    def _eval(self, f: Fol, env) -> bool:
        if isinstance(f, FTop):
            return True
        if isinstance(f, Pred):
            name, t = f.args
            n = self.term(t, env)
            if name == ACTIVE:
                return n in self.g.active
            if name not in self.g.alphabet.concepts:
                raise UnknownName(f"unknown concept {name!r}")
            return name in self.g.labels.get(n, ())
        if isinstance(f, Rel):
            name, a, b = f.args
            if name not in self.g.alphabet.roles:
                raise UnknownName(f"unknown role {name!r}")
            return (self.term(a, env), self.term(b, env), name) in self.triples
        if isinstance(f, Eq):
            return self.term(f.args[0], env) == self.term(f.args[1], env)
        if isinstance(f, FNot):
            return not self.value(f.args[0], env)
        if isinstance(f, FOr):
            return self.value(f.args[0], env) or self.value(f.args[1], env)
        if isinstance(f, FExists):
            var, body = f.args
            inner = dict(env or {})
            for n in self.idx.nodes:
                inner[var] = n
                if self.value(body, inner):
                    return True
            return False
        if isinstance(f, FSubst):
            raise PendingSubstitution("eliminate substitutions before evaluation")
        raise TypeError(f"not a first-order formula: {f!r}")


def eval_fol(g: LDGraph, f: Fol, env: Mapping | None = None) -> bool:
    return FolEvaluator(g).value(f, dict(env or {}))


def relativize_active(f: Fol) -> Fol:
    """Guard every quantifier with ``Active``; idempotent."""
    memo: dict = {}

    def go(x):
        if x in memo:
            return memo[x]
        if isinstance(x, FExists):
            var, body = x.args
            guard = Pred(ACTIVE, Var(var))
            pair = match_and(body)
            if pair is not None and pair[0] is guard:
                out = FExists(var, raw_and(guard, go(pair[1])))
            else:
                out = FExists(var, raw_and(guard, go(body)))
        elif isinstance(x, FSubst):
            out = FSubst(go(x.args[0]), x.args[1])
        elif isinstance(x, (FNot, FOr)):
            out = type(x)(*[go(a) for a in x.args])
        else:
            out = x
        memo[x] = out
        return out

    return go(f)


@dataclass
class Interpretation:
    """The interpretation induced by a graph."""

    domain: tuple
    concept_ext: dict
    role_ext: dict
    nominal_ext: dict


def interpretation(g: LDGraph) -> Interpretation:
    concept_ext = {c: set() for c in g.alphabet.concepts}
    for n, labs in g.labels.items():
        for c in labs:
            concept_ext[c].add(n)
    concept_ext[ACTIVE] = set(g.active)
    role_ext = {r: set() for r in g.alphabet.roles}
    for s, t, r in g.edges.values():
        role_ext[r].add((s, t))
    return Interpretation(tuple(sort_ids(g.universe)), concept_ext, role_ext,
                          {n: n for n in g.universe})
