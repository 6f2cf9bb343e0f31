"""Elimination of pending substitutions ``phi[a]``.

Elimination is innermost first: the body of ``phi[a]`` is made
substitution-free, then ``a`` is pushed through it with the rewrite
tables below.

Two sets of tables exist for the role constructs (``exists R . C``,
``exists R . Self`` and ``(< n R C)``):

* the *listed* rules, transcribed from the published tables, and
* the *pivot* rules, derived from one description per action of how the
  relation changes around the action's argument nodes (the pivots).

The listed rules are used unless they appear in ``DISABLED``.  A rule is
disabled only when the dual-evaluation oracle found a concrete graph on
which it is wrong; ``tests/test_listed_rules.py`` replays each such
counterexample.
"""

from __future__ import annotations

from itertools import combinations
from typing import Callable, Mapping

from .errors import MalformedSubstitution
from .graph import (Action, AddC, AddE, AddN, Cl, DelC, DelE, DelEdge, DelN,
                    LDGraph, Mrg, Redirect, apply_elementary)
from .logic import (ACTIVE, BOT, FFALSE, FTRUE, TOP, U, Atom, Concept, Const,
                    Eq, Every, Exists, FExists, FNot, FOr, Fol, FSubst, FTop,
                    Lt, Nominal, Not, Or, Pred, Rel, Role, SelfR, Some, Subst,
                    Term, Top, Var, at, basic, concept_mask, conj, disj, eval_fol,
                    exists, feq, forall, free_names, has_subst, implies, inv, land,
                    lor, lt, neg, nom, some_u, walk)

# Listed rules falsified by the oracle.  name -> reason
DISABLED: dict[str, str] = {
    "self/redirect": "claims a loop at i whenever i != j; after i >> j the loop of i points to j",
    "self/cl": "gives j a loop even when i has none; the copied loop needs one at i",
    "exists/mrg": "evaluates phi' at the merged-away node j, which is reserved afterwards",
    "exists/redirect": "the second conjunct is not an implication and fails on most graphs",
    "lt/add_N": "keeps phi unsubstituted, wrong when phi reads Active of the new node",
    "lt/mrg": "at i with n = 1 and no successors every disjunct needs (< 0 ...)",
    "lt-inv/redirect": "the middle disjunct is vacuously true outside j",
    "lt/cl/Cj.5": "forbids a successor of j from phi at i alone, without the loop of i",
    "lt/cl/Cj.6": "counts the loop of i as j -> i even when R is not in R_l_out",
    "lt/cl/Cj.8": "all antecedents fail when i has no loop and phi holds at i, so j gets top",
}

Trace = list  # of (rule name, before, after)


def _names(a: Action):
    for x in a.node_args():
        if not isinstance(x, str):
            raise MalformedSubstitution(f"node argument {x!r} of {a} is not a node name")
    return a.node_args()


# --------------------------------------------------------------------------
# pivot tables


class PivotTable:
    """How relation ``r`` changes under an action.

    ``pivots`` are the action's node arguments (positions matter, names may
    coincide).  For a node ``x`` outside the pivots, ``alpha[p]`` holds at
    ``x`` iff ``r'(x, p)``; ``beta[p]`` holds at ``y`` iff ``r'(p, y)``;
    ``gamma[p, q]`` is a global concept for ``r'(p, q)``.  Pairs of
    non-pivot nodes keep their old status.
    """

    def __init__(self, pivots, alpha, beta, gamma):
        self.pivots = pivots
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma

    def flipped(self) -> "PivotTable":
        k = range(len(self.pivots))
        return PivotTable(self.pivots, self.beta, self.alpha,
                          {(p, q): self.gamma[(q, p)] for p in k for q in k})

    def cells(self, distinct: bool = False):
        """Concepts partitioning the universe: one per pivot position, then the rest."""
        if len(self.pivots) == 1:
            i = nom(self.pivots[0])
            return [i], neg(i)
        i, j = nom(self.pivots[0]), nom(self.pivots[1])
        return [i, j if distinct else land(j, neg(i))], land(neg(i), neg(j))


def same(i, j, distinct: bool = False) -> Concept:
    """Global test that ``i`` and ``j`` name the same node."""
    if i == j:
        return TOP
    return BOT if distinct else at(i, nom(j))


def pivot_table(a: Action, r: str, distinct: bool = False) -> PivotTable | None:
    """``None`` when ``a`` leaves relation ``r`` untouched.

    ``distinct`` asserts that two different argument names denote two
    different nodes, which folds the aliasing tests away.
    """
    R = basic(r)
    into = lambda q: exists(R, nom(q))          # x -> q
    outof = lambda q: exists(inv(r), nom(q))    # q -> y
    edge = lambda p, q: at(p, exists(R, nom(q)))
    if isinstance(a, (AddN, AddC, DelC)):
        return None
    if isinstance(a, DelN):
        return PivotTable([a.i], [BOT], [BOT], {(0, 0): BOT})
    i, j = _names(a)
    P = [i, j]
    alpha = [into(i), into(j)]
    beta = [outof(i), outof(j)]
    gamma = {(0, 0): edge(i, i), (0, 1): edge(i, j), (1, 0): edge(j, i), (1, 1): edge(j, j)}
    eq = same(i, j, distinct)
    if isinstance(a, AddE):
        if a.r != r:
            return None
        gamma[(0, 0)] = lor(edge(i, i), eq)
        gamma[(0, 1)] = TOP
    elif isinstance(a, DelE):
        if a.r != r:
            return None
        gamma[(0, 0)] = land(edge(i, i), neg(eq))
        gamma[(0, 1)] = BOT
    elif isinstance(a, Redirect):
        alpha = [land(into(i), eq), lor(into(j), into(i))]
        gamma = {(0, 0): land(edge(i, i), eq), (0, 1): lor(edge(i, j), edge(i, i)),
                 (1, 0): BOT, (1, 1): lor(edge(j, j), edge(j, i))}
    elif isinstance(a, Mrg):
        alpha = [lor(into(i), into(j)), BOT]
        beta = [lor(outof(i), outof(j)), BOT]
        gamma = {(0, 0): disj([edge(i, i), edge(i, j), edge(j, i), edge(j, j)]),
                 (0, 1): BOT, (1, 0): BOT, (1, 1): BOT}
    elif isinstance(a, Cl):
        p = a.params
        alpha[1] = lor(into(j), into(i)) if r in p.r_in else into(j)
        beta[1] = lor(outof(j), outof(i)) if r in p.r_out else outof(j)
        if r in p.r_l_in:
            gamma[(0, 1)] = lor(edge(i, j), edge(i, i))
        if r in p.r_l_out:
            gamma[(1, 0)] = lor(edge(j, i), edge(i, i))
        if r in p.r_l_l:
            gamma[(1, 1)] = lor(edge(j, j), edge(i, i))
    else:
        raise MalformedSubstitution(f"no substitution rule for {a}")
    return PivotTable(P, alpha, beta, gamma)


def _subsets(indicators: list, body: Callable[[int], Concept]) -> Concept:
    """Split on which indicators hold; ``body(k)`` gets the count of true ones."""
    out = BOT
    idx = range(len(indicators))
    for k in range(len(indicators) + 1):
        for chosen in combinations(idx, k):
            parts = [indicators[p] if p in chosen else neg(indicators[p]) for p in idx]
            out = lor(out, conj(parts + [body(k)]))
    return out


def pivot_parts(kind: str, role: Role, n: int, body: Concept, table: PivotTable,
                distinct: bool = False):
    """Per-cell replacements; returns (cells, rest cell, parts, rest part)."""
    t = table.flipped() if role.is_inverse else table
    cells, rest = t.cells(distinct)
    k = range(len(cells))
    in_cell = lambda q, psi: some_u(land(cells[q], psi))
    if kind == "exists":
        rest_part = lor(exists(role, land(rest, body)),
                        disj([land(t.alpha[p], in_cell(p, body)) for p in k]))
        parts = [lor(some_u(conj([rest, t.beta[p], body])),
                     disj([land(t.gamma[(p, q)], in_cell(q, body)) for q in k]))
                 for p in k]
    elif kind == "self":
        rest_part = SelfR(role)
        parts = [t.gamma[(p, p)] for p in k]
    elif kind == "lt":
        local = land(rest, body)
        ind = [land(t.alpha[p], in_cell(p, body)) for p in k]
        rest_part = _subsets(ind, lambda c: lt(n - c, role, local))
        parts = []
        for p in k:
            ind = [land(t.gamma[(p, q)], in_cell(q, body)) for q in k]
            base = conj([rest, t.beta[p], body])
            parts.append(_subsets(ind, lambda c, base=base: lt(n - c, U, base)))
    else:
        raise ValueError(kind)
    return cells, rest, parts, rest_part


def combine(cells, rest, parts, rest_part) -> Concept:
    out = land(rest, rest_part)
    for c, p in zip(cells, parts):
        out = lor(out, land(c, p))
    return out


# --------------------------------------------------------------------------
# listed rules (basic roles)


def _ub(i, c):
    return some_u(land(nom(i), c))


def listed_atom(name: str, a: Action):
    """Returns ``(rule name, replacement)``; mrg rules assume distinct nodes."""
    A = Atom(name)
    if isinstance(a, AddN):
        if name == ACTIVE:
            return "atom/add_N", lor(A, nom(a.i))
        return "atom/add_N", A
    if isinstance(a, DelN):
        return "atom/del_N", land(A, neg(nom(a.i)))
    if isinstance(a, AddC):
        return "atom/add_C", lor(A, nom(a.i)) if a.c == name else A
    if isinstance(a, DelC):
        return "atom/del_C", land(A, neg(nom(a.i))) if a.c == name else A
    if isinstance(a, (AddE, DelE, Redirect)):
        return f"atom/{a.kind}", A
    if isinstance(a, Mrg):
        if name == ACTIVE:
            return "atom/mrg", land(A, neg(nom(a.j)))
        return "atom/mrg", land(neg(nom(a.j)), lor(A, land(nom(a.i), _ub(a.j, A))))
    if isinstance(a, Cl):
        if name == ACTIVE:
            return "atom/cl", lor(A, nom(a.j))
        return "atom/cl", lor(A, land(nom(a.j), _ub(a.i, A)))
    raise MalformedSubstitution(f"no substitution rule for {a}")


def listed_self(R: Role, a: Action):
    S = SelfR(R)
    r = R.name
    if isinstance(a, (AddC, DelC, AddN)):
        return f"self/{a.kind}", S
    if isinstance(a, (AddE, DelE)) and a.r != r:
        return f"self/{a.kind}/other", S
    if isinstance(a, AddE):
        return "self/add_E", lor(land(nom(a.i), nom(a.j)), S)
    if isinstance(a, DelE):
        return "self/del_E", land(lor(neg(nom(a.i)), neg(nom(a.j))), S)
    if isinstance(a, DelN):
        return "self/del_N", land(S, neg(nom(a.i)))
    i, j = nom(a.i), nom(a.j)
    if isinstance(a, Redirect):
        both = land(implies(i, j), implies(j, i))
        return "self/redirect", land(implies(both, S),
                                     implies(land(neg(i), j), lor(S, exists(R, i))))
    if isinstance(a, Mrg):
        return "self/mrg", land(neg(j), lor(S, land(i, disj([
            exists(R, j), some_u(land(j, exists(R, i))), some_u(land(j, S))]))))
    if isinstance(a, Cl):
        return "self/cl", lor(S, j if r in a.params.r_l_l else BOT)
    return None


def listed_exists(R: Role, phi: Concept, phi2: Concept, a: Action):
    r = R.name
    E = lambda c: exists(R, c)
    if isinstance(a, (AddC, DelC, AddN)):
        return f"exists/{a.kind}", E(phi2)
    if isinstance(a, (AddE, DelE)) and a.r != r:
        return f"exists/{a.kind}/other", E(phi2)
    if isinstance(a, AddE):
        return "exists/add_E", lor(land(nom(a.i), _ub(a.j, phi2)), E(phi2))
    if isinstance(a, DelE):
        i, j = nom(a.i), nom(a.j)
        return "exists/del_E", land(implies(i, E(land(phi2, neg(j)))), implies(neg(i), E(phi2)))
    if isinstance(a, DelN):
        i = nom(a.i)
        return "exists/del_N", land(neg(i), E(land(phi2, neg(i))))
    i, j = nom(a.i), nom(a.j)
    if isinstance(a, Redirect):
        inner = conj([
            implies(conj([E(land(i, phi2)), forall(R, neg(j)), some_u(land(j, neg(phi2)))]),
                    E(land(phi2, neg(i)))),
            conj([E(i), forall(R, neg(j)), some_u(land(j, phi2))]),
            implies(land(E(land(i, phi2)), E(j)), E(land(phi2, neg(i)))),
            implies(disj([forall(R, neg(i)),
                          land(E(land(i, neg(phi2))), E(j)),
                          conj([E(land(i, neg(phi2))), forall(R, neg(j)),
                                some_u(land(j, neg(phi2)))])]),
                    E(phi2)),
        ])
        return "exists/redirect", land(implies(some_u(land(i, j)), E(phi2)),
                                       implies(some_u(land(i, neg(j))), inner))
    if isinstance(a, Mrg):
        ij = lor(i, j)
        return "exists/mrg", land(neg(j), disj([
            E(land(neg(j), phi2)),
            land(E(ij), some_u(land(ij, phi2))),
            land(i, some_u(land(ij, E(phi2)))),
        ]))
    if isinstance(a, Cl):
        p = a.params
        c_in = conj([neg(i), neg(j), E(i), some_u(land(j, phi2))]) if r in p.r_in else BOT
        c_out = land(j, some_u(land(i, E(land(neg(i), phi2))))) if r in p.r_out else BOT
        c_lin = conj([i, E(i), some_u(land(j, phi2))]) if r in p.r_l_in else BOT
        c_lout = land(j, some_u(conj([i, E(i), phi2]))) if r in p.r_l_out else BOT
        c_ll = conj([j, phi2, some_u(land(i, E(i)))]) if r in p.r_l_l else BOT
        return "exists/cl", disj([E(phi2), c_in, c_out, c_lin, c_lout, c_ll])
    return None


def listed_lt(n: int, R: Role, phi: Concept, phi2: Concept, a: Action):
    r = R.name
    L = lambda k, c: lt(k, R, c)
    E = lambda c: exists(R, c)
    if isinstance(a, (AddC, DelC)):
        return f"lt/{a.kind}", L(n, phi2)
    if isinstance(a, (AddE, DelE)) and a.r != r:
        return f"lt/{a.kind}/other", L(n, phi2)
    if isinstance(a, AddN):
        return "lt/add_N", L(n, phi)
    if isinstance(a, DelN):
        i = nom(a.i)
        return "lt/del_N", lor(i, L(n, land(phi2, neg(i))))
    i, j = nom(a.i), nom(a.j)
    if isinstance(a, AddE):
        gain = conj([i, some_u(land(j, phi2)), forall(R, neg(j))])
        keep = disj([neg(i), forall(U, lor(neg(j), neg(phi2))), E(j)])
        return "lt/add_E", land(implies(gain, L(n - 1, phi2)), implies(keep, L(n, phi2)))
    if isinstance(a, DelE):
        loss = conj([i, some_u(land(j, phi2)), E(j)])
        keep = disj([neg(i), forall(U, lor(neg(j), neg(phi2))), forall(R, neg(j))])
        return "lt/del_E", land(implies(loss, L(n + 1, phi2)), implies(keep, L(n, phi2)))
    if isinstance(a, Redirect):
        a1 = conj([E(land(i, phi2)), forall(R, neg(j)), some_u(land(j, neg(phi2)))])
        a2 = conj([E(land(i, neg(phi2))), forall(R, neg(j)), some_u(land(j, phi2))])
        a3 = land(E(land(i, phi2)), E(j))
        a4 = disj([forall(R, neg(i)),
                   land(E(land(i, neg(phi2))), E(j)),
                   conj([E(land(i, phi2)), forall(R, neg(j)), some_u(land(j, phi2))]),
                   conj([E(land(i, neg(phi2))), forall(R, neg(j)), some_u(land(j, neg(phi2)))])])
        inner = conj([implies(a1, L(n + 1, phi2)), implies(a2, L(n - 1, phi2)),
                      implies(a3, L(n + 1, phi2)), implies(a4, L(n, phi2))])
        return "lt/redirect", land(implies(some_u(land(i, j)), L(n, phi2)),
                                   implies(some_u(land(i, neg(j))), inner))
    if isinstance(a, Mrg):
        fj = forall(R.inverse(), neg(j))
        ks = disj([land(L(k, land(phi2, fj)), some_u(land(j, L(n - k, phi2))))
                   for k in range(1, n + 1)])
        d1 = conj([E(land(j, neg(phi2))), forall(R, neg(i)), some_u(land(i, phi2)), L(n - 1, phi2)])
        d2 = conj([E(land(i, neg(phi2))), forall(R, neg(j)), some_u(land(j, phi2)), L(n - 1, phi2)])
        d3 = conj([E(land(i, phi2)), E(land(j, phi2)), L(n + 1, phi2)])
        d4 = conj([lor(forall(R, lor(neg(j), phi2)), E(land(i, neg(phi2)))),
                   lor(forall(R, lor(neg(i), phi2)), E(land(j, neg(phi2)))),
                   lor(forall(R, lor(neg(i), neg(phi2))), forall(R, lor(neg(j), neg(phi2)))),
                   L(n, phi2)])
        return "lt/mrg", disj([j, land(i, ks), conj([neg(i), neg(j), disj([d1, d2, d3, d4])])])
    return None


def listed_lt_inv_redirect(n: int, R: Role, phi2: Concept, a: Redirect):
    i, j = nom(a.i), nom(a.j)
    L = lambda k, c: lt(k, R, c)
    ks = disj([land(L(k, phi2), some_u(land(i, L(n - k, land(phi2, neg(exists(R, j)))))))
               for k in range(0, n + 1)])
    both = land(implies(i, j), implies(j, i))
    return "lt-inv/redirect", disj([land(i, neg(j)), implies(land(neg(i), j), ks),
                                    implies(both, L(n, phi2))])


def listed_lt_cl_parts(n: int, R: Role, phi2: Concept, a: Cl):
    """The three cell formulas of the clone counting rule, with their names."""
    r, p = R.name, a.params
    i, j = nom(a.i), nom(a.j)
    L = lambda k, c: lt(k, R, c)
    E = lambda c: exists(R, c)
    A = lambda c: some_u(land(i, c))
    loop = E(i)
    if r not in p.r_l_in:
        ci = ("lt/cl/Ci.plain", L(n, phi2))
    else:
        ci = ("lt/cl/Ci.lin", land(implies(land(loop, some_u(land(j, phi2))), L(n - 1, phi2)),
                                   implies(lor(forall(R, neg(i)), some_u(land(j, neg(phi2)))),
                                           L(n, phi2))))
    rout, rlout, rll = r in p.r_out, r in p.r_l_out, r in p.r_l_l
    cnt = lambda k: A(L(k, land(neg(i), phi2)))
    cj = None
    if not rout and ((not rlout and not rll) or (not (rlout and rll) and n > 1) or n > 2):
        cj = ("lt/cl/Cj.1", TOP)
    elif not rout and not rll and rlout and n == 1:
        cj = ("lt/cl/Cj.2", land(implies(A(land(loop, phi2)), BOT),
                                 implies(A(lor(forall(R, neg(i)), neg(phi2))), TOP)))
    elif not rout and not rlout and rll and n == 1:
        cj = ("lt/cl/Cj.3", land(implies(land(A(loop), phi2), BOT),
                                 implies(lor(A(forall(R, neg(i))), neg(phi2)), TOP)))
    elif not rout and rlout and rll and n == 2:
        cj = ("lt/cl/Cj.4", land(implies(land(A(land(loop, phi2)), phi2), BOT),
                                 implies(lor(A(lor(forall(R, neg(i)), neg(phi2))), neg(phi2)), TOP)))
    elif not rout and rlout and rll and n == 1:
        cj = ("lt/cl/Cj.5", land(implies(lor(land(A(loop), phi2), A(phi2)), BOT),
                                 implies(lor(A(forall(R, neg(i))), land(neg(phi2), A(neg(phi2)))),
                                         TOP)))
    elif (rout or rlout) and not rll:
        cj = ("lt/cl/Cj.6", land(implies(A(land(loop, phi2)), cnt(n - 1)),
                                 implies(A(lor(forall(R, neg(i)), neg(phi2))), cnt(n))))
    elif (rout or rll) and not rlout:
        cj = ("lt/cl/Cj.7", land(implies(land(A(loop), phi2), cnt(n - 1)),
                                 implies(lor(A(forall(R, neg(i))), neg(phi2)), cnt(n))))
    elif rout and rlout and rll:
        cj = ("lt/cl/Cj.8", conj([
            implies(land(A(land(loop, phi2)), phi2), cnt(n - 2)),
            implies(land(A(land(loop, neg(phi2))), phi2), cnt(n - 1)),
            implies(land(A(land(loop, phi2)), neg(phi2)), cnt(n - 1)),
            implies(lor(land(A(forall(R, neg(i))), neg(phi2)), A(neg(phi2))), cnt(n)),
        ]))
    if r not in p.r_in:
        co = ("lt/cl/Co.plain", L(n, phi2))
    else:
        co = ("lt/cl/Co.in", land(implies(land(loop, some_u(land(j, phi2))), L(n - 1, phi2)),
                                  implies(lor(forall(R, neg(i)), some_u(land(j, neg(phi2)))),
                                          L(n, phi2))))
    return ci, cj, co


# --------------------------------------------------------------------------
# DL elimination


class DLEliminator:
    def __init__(self, trace: bool = False, listed: bool = True):
        self.record = trace
        self.listed = listed
        self.trace: Trace = []
        self.memo: dict = {}
        self.pmemo: dict = {}
        # binder parameters may denote any node, so they can alias each other
        self.bindable: set = set()

    def distinct(self, a: Action) -> bool:
        args = a.node_args()
        if len(args) < 2:
            return True
        i, j = args[0], args[1]
        return i != j and i not in self.bindable and j not in self.bindable

    def eliminate(self, c: Concept) -> Concept:
        for x in walk(c):
            if isinstance(x, (Every, Some)):
                self.bindable.update(x.args[0])
        return self.run(c)

    def log(self, name, before, after):
        if self.record:
            self.trace.append((name, before, after))

    def run(self, c: Concept) -> Concept:
        if c in self.memo:
            return self.memo[c]
        if not has_subst(c):
            out = c
        elif isinstance(c, Subst):
            out = self.push(self.run(c.args[0]), c.args[1])
        elif isinstance(c, Not):
            out = neg(self.run(c.args[0]))
        elif isinstance(c, Or):
            out = lor(self.run(c.args[0]), self.run(c.args[1]))
        elif isinstance(c, Exists):
            out = exists(c.args[0], self.run(c.args[1]))
        elif isinstance(c, Lt):
            out = lt(c.args[0], c.args[1], self.run(c.args[2]))
        elif isinstance(c, (Every, Some)):
            out = type(c)(c.args[0], self.run(c.args[1]))
        else:
            raise MalformedSubstitution(f"substitution over {type(c).__name__}")
        self.memo[c] = out
        return out

    def push(self, c: Concept, a: Action) -> Concept:
        key = (c, a)
        hit = self.pmemo.get(key)
        if hit is not None:
            return hit
        if isinstance(a, DelEdge):
            raise MalformedSubstitution(
                f"{a}: deletion by edge id has no formula counterpart; use del_E(i,j,r)")
        _names(a)
        name, out = self._push(c, a)
        self.log(name, Subst(c, a), out)
        self.pmemo[key] = out
        return out

    def _push(self, c, a):
        if isinstance(c, (Top, Nominal)):
            return type(c).__name__.lower(), c
        if isinstance(c, Not):
            return "not", neg(self.push(c.args[0], a))
        if isinstance(c, Or):
            return "or", lor(self.push(c.args[0], a), self.push(c.args[1], a))
        if isinstance(c, (Every, Some)):
            params, body = c.args
            clash = set(params) & set(a.node_args())
            if clash:
                taken = set(free_names(body)) | set(a.node_args()) | set(params)
                ren = {}
                for p in params:
                    if p in clash:
                        k = 1
                        while f"{p}'{k}" in taken:
                            k += 1
                        ren[p] = f"{p}'{k}"
                        taken.add(ren[p])
                        self.bindable.add(ren[p])
                body = rename_nominals(body, ren)
                params = tuple(ren.get(p, p) for p in params)
            return "binder", type(c)(params, self.push(body, a))
        if isinstance(c, Atom):
            name, out = listed_atom(c.name, a)
            if isinstance(a, Mrg):
                out = self.alias(a, c, out)
            return name, out
        if isinstance(c, Exists):
            role, body = c.args
            if role.is_universal:
                return "exists-U", exists(U, self.push(body, a))
            return self.role_construct("exists", role, 0, body, a, c)
        if isinstance(c, SelfR):
            role = c.args[0]
            if role.is_universal:
                return "self-U", c
            return self.role_construct("self", role, 0, None, a, c)
        if isinstance(c, Lt):
            n, role, body = c.args
            if role.is_universal:
                return "lt-U", lt(n, U, self.push(body, a))
            return self.role_construct("lt", role, n, body, a, c)
        if isinstance(c, Subst):
            raise MalformedSubstitution("push called on a pending substitution")
        raise MalformedSubstitution(f"substitution over {type(c).__name__}")

    def alias(self, a: Mrg, c: Concept, out: Concept) -> Concept:
        """The listed merge rules assume two distinct nodes; mrg(i,i) is the identity."""
        if a.i == a.j:
            return self.rebuild(c, a)
        if self.distinct(a):
            return out
        eq = same(a.i, a.j)
        return lor(land(eq, self.rebuild(c, a)), land(neg(eq), out))

    def rebuild(self, c, a):
        if isinstance(c, Exists):
            return exists(c.args[0], self.push(c.args[1], a))
        if isinstance(c, Lt):
            return lt(c.args[0], c.args[1], self.push(c.args[2], a))
        return c

    def role_construct(self, kind, role, n, body, a, c):
        body2 = self.push(body, a) if body is not None else None
        if self.listed and not role.is_inverse:
            got = self.listed_construct(kind, role, n, body, body2, a)
            if got is not None:
                return got
        table = pivot_table(a, role.name, self.distinct(a))
        if table is None:
            return f"{kind}/unchanged-role", self.rebuild(c, a)
        if self.listed and role.is_inverse and kind == "lt" and isinstance(a, Redirect):
            name, out = listed_lt_inv_redirect(n, role, body2, a)
            if name not in DISABLED:
                return name, out
        parts = pivot_parts(kind, role, n, body2, table, self.distinct(a))
        return f"pivot:{kind}/{a.kind}", combine(*parts)

    def listed_construct(self, kind, role, n, body, body2, a):
        if kind == "lt" and isinstance(a, Cl):
            ci, cj, co = listed_lt_cl_parts(n, role, body2, a)
            d = self.distinct(a)
            table = pivot_table(a, role.name, d)
            cells, rest, parts, rest_part = pivot_parts("lt", role, n, body2, table, d)
            names = []
            use = []
            for got, fallback, label in ((ci, parts[0], "Ci"), (cj, parts[1], "Cj"),
                                         (co, rest_part, "Co")):
                if got is None or got[0] in DISABLED:
                    names.append(f"pivot:{label}")
                    use.append(fallback)
                else:
                    names.append(got[0])
                    use.append(got[1])
            i, j = nom(a.i), nom(a.j)
            out = conj([implies(i, use[0]), implies(j, use[1]),
                        implies(land(neg(i), neg(j)), use[2])])
            return "+".join(names), out
        if kind == "self":
            got = listed_self(role, a)
        elif kind == "exists":
            got = listed_exists(role, body, body2, a)
        else:
            got = listed_lt(n, role, body, body2, a)
        if got is None or got[0] in DISABLED:
            return None
        name, out = got
        if isinstance(a, Mrg):
            out = self.alias(a, Exists(role, body) if kind == "exists" else
                             (Lt(n, role, body) if kind == "lt" else SelfR(role)), out)
        return name, out


def rename_nominals(c: Concept, ren: Mapping) -> Concept:
    memo = {}

    def go(x):
        if x in memo:
            return memo[x]
        if isinstance(x, Nominal):
            out = Nominal(ren.get(x.name, x.name))
        elif isinstance(x, (Every, Some)):
            inner = {k: v for k, v in ren.items() if k not in x.args[0]}
            out = type(x)(x.args[0], rename_nominals(x.args[1], inner))
        elif isinstance(x, Subst):
            out = Subst(go(x.args[0]), x.args[1].rename(ren))
        elif isinstance(x, Exists):
            out = Exists(x.args[0], go(x.args[1]))
        elif isinstance(x, Lt):
            out = Lt(x.args[0], x.args[1], go(x.args[2]))
        elif isinstance(x, (Not, Or)):
            out = type(x)(*[go(k) for k in x.args])
        else:
            out = x
        memo[x] = out
        return out

    return go(c)


def eliminate_dl(c: Concept, trace: bool = True, listed: bool = True):
    e = DLEliminator(trace=trace, listed=listed)
    out = e.eliminate(c)
    return out, e.trace


# --------------------------------------------------------------------------
# FOL elimination


def _term(x) -> Term:
    if isinstance(x, Var):
        return x
    if isinstance(x, str):
        return Const(x)
    raise MalformedSubstitution(f"bad node argument {x!r}")


def _ne(a, b):
    return neg(feq(a, b))


class FolEliminator:
    def __init__(self, trace: bool = False):
        self.record = trace
        self.trace: Trace = []
        self.memo: dict = {}
        self.pmemo: dict = {}
        self.fresh = 0

    def eliminate(self, f: Fol) -> Fol:
        return self.run(f)

    def run(self, f: Fol) -> Fol:
        if f in self.memo:
            return self.memo[f]
        if not has_subst(f):
            out = f
        elif isinstance(f, FSubst):
            out = self.push(self.run(f.args[0]), f.args[1])
        elif isinstance(f, FNot):
            out = neg(self.run(f.args[0]))
        elif isinstance(f, FOr):
            out = lor(self.run(f.args[0]), self.run(f.args[1]))
        elif isinstance(f, FExists):
            out = FExists(f.args[0], self.run(f.args[1]))
        else:
            raise MalformedSubstitution(f"substitution over {type(f).__name__}")
        self.memo[f] = out
        return out

    def push(self, f: Fol, a: Action) -> Fol:
        key = (f, a)
        hit = self.pmemo.get(key)
        if hit is not None:
            return hit
        if isinstance(a, DelEdge):
            raise MalformedSubstitution(
                f"{a}: deletion by edge id has no formula counterpart; use del_E(i,j,r)")
        name, out = self._push(f, a)
        if self.record:
            self.trace.append((name, FSubst(f, a), out))
        self.pmemo[key] = out
        return out

    def _push(self, f, a):
        if isinstance(f, (FTop, Eq)):
            return type(f).__name__.lower(), f
        if isinstance(f, FNot):
            return "not", neg(self.push(f.args[0], a))
        if isinstance(f, FOr):
            return "or", lor(self.push(f.args[0], a), self.push(f.args[1], a))
        if isinstance(f, FExists):
            var, body = f.args
            used = {x.name for x in a.node_args() if isinstance(x, Var)}
            if var in used:
                taken = used | set(free_names(body))
                k = 1
                while f"{var}'{k}" in taken:
                    k += 1
                new = f"{var}'{k}"
                body = substitute_var(body, var, Var(new))
                var = new
            return "exists", FExists(var, self.push(body, a))
        if isinstance(f, Pred):
            return self.pred(f, a)
        if isinstance(f, Rel):
            return self.rel(f, a)
        raise MalformedSubstitution(f"substitution over {type(f).__name__}")

    def alias(self, a: Mrg, f: Fol, out: Fol) -> Fol:
        eq = feq(_term(a.i), _term(a.j))
        return lor(land(eq, f), land(neg(eq), out))

    def pred(self, f: Pred, a: Action):
        name, x = f.args
        if isinstance(a, AddN):
            i = _term(a.i)
            return "pred/add_N", lor(f, feq(i, x)) if name == ACTIVE else f
        if isinstance(a, DelN):
            return "pred/del_N", land(f, _ne(_term(a.i), x))
        if isinstance(a, AddC):
            return "pred/add_C", lor(f, feq(_term(a.i), x)) if a.c == name else f
        if isinstance(a, DelC):
            return "pred/del_C", land(f, _ne(_term(a.i), x)) if a.c == name else f
        if isinstance(a, (AddE, DelE, Redirect)):
            return f"pred/{a.kind}", f
        i, j = _term(a.i), _term(a.j)
        if isinstance(a, Cl):
            if name == ACTIVE:
                return "pred/cl", lor(f, feq(x, j))
            return "pred/cl", lor(f, land(feq(x, j), Pred(name, i)))
        if isinstance(a, Mrg):
            if name == ACTIVE:
                out = land(f, _ne(x, j))
            else:
                out = land(_ne(x, j), lor(f, land(feq(x, i), Pred(name, j))))
            return "pred/mrg", self.alias(a, f, out)
        raise MalformedSubstitution(f"no substitution rule for {a}")

    def rel(self, f: Rel, a: Action):
        R, x, y = f.args
        if isinstance(a, (AddC, DelC, AddN)):
            return f"rel/{a.kind}", f
        if isinstance(a, DelN):
            i = _term(a.i)
            return "rel/del_N", conj([f, _ne(i, x), _ne(i, y)], "fol")
        i, j = _term(a.i), _term(a.j)
        if isinstance(a, AddE):
            if a.r != R:
                return "rel/add_E/other", f
            return "rel/add_E", lor(f, land(feq(i, x), feq(j, y)))
        if isinstance(a, DelE):
            if a.r != R:
                return "rel/del_E/other", f
            return "rel/del_E", land(f, lor(_ne(i, x), _ne(j, y)))
        if isinstance(a, Redirect):
            return "rel/redirect", lor(land(f, _ne(i, y)), land(Rel(R, x, i), feq(j, y)))
        if isinstance(a, Cl):
            p = a.params
            loop = Rel(R, i, i)
            parts = [f]
            if R in p.r_in:
                parts.append(conj([Rel(R, x, i), feq(y, j), _ne(x, i)], "fol"))
            if R in p.r_out:
                parts.append(conj([Rel(R, i, y), feq(x, j), _ne(y, i)], "fol"))
            if R in p.r_l_in:
                parts.append(conj([loop, feq(x, i), feq(y, j)], "fol"))
            if R in p.r_l_out:
                parts.append(conj([loop, feq(x, j), feq(y, i)], "fol"))
            if R in p.r_l_l:
                parts.append(conj([loop, feq(x, j), feq(y, j)], "fol"))
            return "rel/cl", disj(parts, "fol")
        if isinstance(a, Mrg):
            out = conj([_ne(x, j), _ne(y, j), disj([
                f, land(Rel(R, x, j), feq(y, i)), land(Rel(R, j, y), feq(x, i)),
                conj([feq(x, i), feq(y, i), Rel(R, j, j)], "fol")], "fol")], "fol")
            return "rel/mrg", self.alias(a, f, out)
        raise MalformedSubstitution(f"no substitution rule for {a}")


def substitute_var(f: Fol, var: str, term: Term) -> Fol:
    memo = {}
    target = Var(var)

    def t(x):
        return term if x is target else x

    def act(a: Action):
        mapping = {target: term}
        return a.rename(mapping)

    def go(x):
        if x in memo:
            return memo[x]
        if isinstance(x, Pred):
            out = Pred(x.args[0], t(x.args[1]))
        elif isinstance(x, Rel):
            out = Rel(x.args[0], t(x.args[1]), t(x.args[2]))
        elif isinstance(x, Eq):
            out = Eq(t(x.args[0]), t(x.args[1]))
        elif isinstance(x, FExists):
            out = x if x.args[0] == var else FExists(x.args[0], go(x.args[1]))
        elif isinstance(x, FSubst):
            out = FSubst(go(x.args[0]), act(x.args[1]))
        elif isinstance(x, (FNot, FOr)):
            out = type(x)(*[go(k) for k in x.args])
        else:
            out = x
        memo[x] = out
        return out

    return go(f)


def eliminate_fol(f: Fol, trace: bool = True):
    e = FolEliminator(trace=trace)
    out = e.eliminate(f)
    return out, e.trace


def eliminate(x, trace: bool = False):
    """Substitution-free equivalent of ``x`` (either logic)."""
    if x.family == "fol":
        return eliminate_fol(x, trace)[0]
    return eliminate_dl(x, trace)[0]


def replay(x, trace: Trace):
    """Rebuild the elimination of ``x`` using only the recorded steps."""
    table = {before: after for _, before, after in trace}
    fol = x.family == "fol"

    class Replayer(FolEliminator if fol else DLEliminator):
        def push(self, f, a):
            key = (FSubst if fol else Subst)(f, a)
            if key not in table:
                raise MalformedSubstitution(f"trace lacks a step for {key!r}")
            return table[key]

    return Replayer().eliminate(x)


def check_biconditional(g: LDGraph, phi, a: Action, env: Mapping | None = None) -> bool:
    """Does ``eliminate(phi[a])`` on ``g`` agree with ``phi`` on ``g[a]``?"""
    after = apply_elementary(g, a)
    if phi.family == "fol":
        lhs = eval_fol(g, eliminate(FSubst(phi, a)), env)
        return lhs == eval_fol(after, phi, env)
    return concept_mask(g, eliminate(Subst(phi, a)), env) == concept_mask(after, phi, env)
