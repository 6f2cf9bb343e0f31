import random

import pytest

from ldg import gen
from ldg.errors import StepBoundExceeded, UnknownRule
from ldg.graph import make_graph
from ldg.logic import Atom
from ldg.rewrite import Rule, applicable
from ldg.strategy import ANY, BOUND, FAILURE, Graph, app, derivations, execute, graphs_of
from ldg.strategy_ast import Eps, Must, RuleRef, Seq, Star, Try
from ldg.syntax import parse_actions, parse_strategy

from conftest import load_graph, load_rules

TOY = load_rules("toy.ldr")


def toy_graph(rng):
    g = gen.random_graph(rng, max_active=3, max_edges=3, concepts=("A", "B"), roles=("r", "s"))
    return g


def test_worked_examples():
    g = load_graph("servernet.json")
    rules = load_rules("servernet.ldr")
    assert app(g, Eps(), rules)
    assert app(g, parse_strategy("r0 + r1"), rules)
    assert execute(g, Eps(), rules) == Graph(g)
    empty = make_graph(["Client", "Proxy"], ["Request", "C2P"])
    assert not app(empty, Must("r0"), rules)
    assert execute(empty, Must("r0"), rules) is FAILURE
    assert execute(empty, RuleRef("r0"), rules) is ANY
    assert execute(empty, Try("r0"), rules) == Graph(empty)
    assert derivations(g, Eps(), rules) == {Graph(g)}
    outs = derivations(g, parse_strategy("r0 + r1"), rules)
    assert ANY in outs and len(graphs_of(outs)) == 1


def test_closure_deletes_all():
    rule = Rule("kill", ["i"], {"i": [Atom("A")]}, [], parse_actions("del_N(i)"))
    g = make_graph(["A"], [], ["a", "b", "c"], {n: ["A"] for n in "abc"})
    out = execute(g, Star(RuleRef("kill")), {"kill": rule})
    assert isinstance(out, Graph) and not out.graph.active


def test_two_matches_two_graphs():
    rule = Rule("mark", ["i"], {}, [], parse_actions("add_C(i,A)"))
    g = make_graph(["A"], [], ["a", "b"])
    assert len(graphs_of(derivations(g, RuleRef("mark"), {"mark": rule}))) == 2


def test_step_bound():
    g = make_graph(["A", "B"], ["r"], ["a"], {"a": ["A", "B"]})
    loop = parse_strategy("link* {inv: top}")
    with pytest.raises(StepBoundExceeded):
        execute(g, loop, TOY, step_bound=20)
    assert BOUND in derivations(g, loop, TOY, step_bound=20)
    with pytest.raises(ValueError):
        execute(g, Eps(), TOY, step_bound=0)


def test_unknown_rule():
    with pytest.raises(UnknownRule):
        execute(make_graph(), RuleRef("nope"), {})


def test_execute_is_a_derivation():
    rng = random.Random(11)
    for t in range(1000):
        g = toy_graph(rng)
        s = gen.random_strategy(rng, ["mark", "unmark", "purge", "fuse", "redir"], 3)
        outs = derivations(g, s, TOY, step_bound=12)
        if BOUND in outs:
            continue
        policy = "seeded" if t % 2 else "first-match"
        assert execute(g, s, TOY, policy=policy, seed=t, step_bound=12) in outs


def test_laws():
    rng = random.Random(12)
    for _ in range(300):
        g = toy_graph(rng)
        for name in ["mark", "unmark", "purge", "fuse"]:
            if not applicable(g, TOY[name]):
                assert execute(g, Star(RuleRef(name)), TOY) == Graph(g)
                continue
            outs = [derivations(g, k(name), TOY) for k in (RuleRef, Try, Must)]
            assert outs[0] == outs[1] == outs[2]


def test_absorbing_outcomes():
    g = make_graph(["A", "B"], ["r"], ["a"])
    s = Seq(RuleRef("unmark"), RuleRef("mark"))
    assert execute(g, s, TOY) is ANY
    assert derivations(g, Seq(Must("unmark"), RuleRef("mark")), TOY) == {FAILURE}
