import random

import pytest

from ldg import gen
from ldg.errors import PendingSubstitution, UnboundVariable, UnknownName
from ldg.graph import AddC, make_graph, pad
from ldg.logic import (ACTIVE, TOP, Atom, Const, Eq, Exists, FExists, Lt, Nominal, Not,
                       Or, Pred, Rel, SelfR, Subst, Top, Var, basic, eval_concept, eval_fol,
                       forall, ge, graph_satisfies, holds_at, interpretation, inv, lt,
                       relativize_active)
from ldg.syntax import parse_concept, parse_fol, show


def naive(g, c):
    """Extension by the inductive clauses over the induced interpretation."""
    I = interpretation(g)
    dom = set(I.domain)

    def pairs(role):
        if role.is_universal:
            return {(a, b) for a in dom for b in dom}
        p = I.role_ext[role.name]
        return {(b, a) for a, b in p} if role.is_inverse else p

    def ext(c):
        if isinstance(c, Top):
            return set(dom)
        if isinstance(c, Atom):
            return set(I.concept_ext[c.args[0]])
        if isinstance(c, Nominal):
            return {I.nominal_ext[c.args[0]]}
        if isinstance(c, Not):
            return dom - ext(c.args[0])
        if isinstance(c, Or):
            return ext(c.args[0]) | ext(c.args[1])
        if isinstance(c, Exists):
            p, body = pairs(c.args[0]), ext(c.args[1])
            return {a for a, b in p if b in body}
        if isinstance(c, SelfR):
            return {a for a, b in pairs(c.args[0]) if a == b}
        if isinstance(c, Lt):
            n, role, body = c.args
            p, b = pairs(role), ext(body)
            return {d for d in dom if len({y for x, y in p if x == d and y in b}) < n}
        raise TypeError(c)

    return ext(c)


def test_matches_naive_semantics():
    rng = random.Random(5)
    for _ in range(1500):
        g = gen.random_graph(rng, max_active=6)
        c = gen.random_concept(rng, 4, names=list(g.universe))
        assert eval_concept(g, c) == naive(g, c), show(c)


def test_dual_forms():
    rng = random.Random(6)
    for _ in range(500):
        g = gen.random_graph(rng)
        c = gen.random_concept(rng, 3)
        r = basic(rng.choice(gen.ROLES))
        dom = set(g.universe)
        assert eval_concept(g, forall(r, c)) == dom - eval_concept(g, Exists(r, Not(c)))
        n = rng.randint(1, 4)
        assert eval_concept(g, ge(n, r, c)) == dom - eval_concept(g, lt(n, r, c))


def test_counting_ignores_parallel_edges():
    g = make_graph([], ["r"], ["a", "b"], {}, [("a", "b", "r")])
    h = make_graph([], ["r"], ["a", "b"], {}, [("a", "b", "r"), ("a", "b", "r")])
    c = parse_concept("(< 2 r top)")
    assert eval_concept(g, c) == eval_concept(h, c) == {"a", "b"}


def test_reserved_nodes():
    g = pad(make_graph(["A"], ["r"], ["a"], {"a": ["A"]}, [("a", "a", "r")]), 1)
    (n,) = g.reserved()
    assert holds_at(g, n, TOP) and holds_at(g, n, Nominal(n))
    assert not holds_at(g, n, Atom(ACTIVE)) and not holds_at(g, n, Atom("A"))
    assert not holds_at(g, n, parse_concept("exists r . Self"))


def test_servernet_counting(servernet):
    g, _ = servernet
    g2 = make_graph(["Proxy"], ["C2P"], ["c", "d", "p"], {"p": ["Proxy"]},
                    [("c", "p", "C2P"), ("d", "p", "C2P")])
    assert "p" not in eval_concept(g2, parse_concept("(< 2 inv C2P top)"))
    assert "p" in eval_concept(g2, parse_concept("(>= 2 inv C2P top)"))
    pre = parse_concept("exists U . (Client and exists Request . Proxy)")
    assert eval_concept(g, pre) == set(g.universe)
    h = g.replace(edges={})
    assert eval_concept(h, pre) == set()


def test_holds_and_satisfies(automaton):
    assert holds_at(automaton, "q1", parse_concept("exists a . Self"))
    assert not holds_at(automaton, "q0", parse_concept("exists a . Self"))
    g = make_graph(["A", "B"], [], ["n0"], {"n0": ["A"]})
    assert holds_at(g, "n0", Atom("A")) and not holds_at(g, "n0", Not(Atom("A")))
    assert not graph_satisfies(g, Atom("B"))
    with pytest.raises(UnknownName):
        holds_at(g, "zz", TOP)


def test_vacuous_post():
    g = make_graph(["Client", "Proxy"], ["C2P"], ["c"], {"c": ["Client"]})
    assert graph_satisfies(g, parse_concept("Proxy => (< 2 inv C2P top)"))


def test_pending_substitution_rejected():
    g = make_graph(["A"], [], ["n0"])
    with pytest.raises(PendingSubstitution):
        eval_concept(g, Subst(Atom("A"), AddC("n0", "A")))


def test_fol_basics():
    g = make_graph(["C", "D"], ["R"], ["a", "b", "c"], {"b": ["C"], "c": ["D"]},
                   [("a", "b", "R"), ("b", "c", "R")])
    assert eval_fol(g, parse_fol("exists x . Active(x)"))
    app = parse_fol("exists i . exists j . exists k . C(j) and (C(k) or D(k)) and R(i,j) and R(j,k)")
    assert eval_fol(g, app)
    assert not eval_fol(g, Eq(Var("x"), Var("y")), {"x": "a", "y": "b"})
    with pytest.raises(UnboundVariable):
        eval_fol(g, Pred("C", Var("x")))
    assert eval_fol(g, Rel("R", Const("a"), Const("b")))


def test_relativize():
    f = parse_fol("exists x . C(x)")
    assert relativize_active(f) == parse_fol("exists x . Active(x) and C(x)")
    q = parse_fol("C(n0) or n0 = n1")
    assert relativize_active(q) is q
    nested = parse_fol("exists x . exists y . R(x,y)")
    assert relativize_active(nested) == parse_fol(
        "exists x . Active(x) and (exists y . Active(y) and R(x,y))")
    assert relativize_active(relativize_active(nested)) == relativize_active(nested)


def test_relativized_ignores_reserved_nodes():
    rng = random.Random(8)
    for _ in range(300):
        g = gen.random_graph(rng, reserved=0)
        f = relativize_active(gen.random_fol(rng, 4))
        assert eval_fol(g, f) == eval_fol(pad(g, 3), f)


def test_hash_consing():
    a = parse_concept("exists r . (A or B)")
    b = parse_concept("exists r . (A or B)")
    assert a is b
    assert inv("r").inverse() == basic("r")
