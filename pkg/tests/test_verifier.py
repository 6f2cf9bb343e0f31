import random

import pytest

from ldg import gen
from ldg.errors import InexpressibleApp, MissingInvariant, UnknownRule
from ldg.graph import Alphabet, make_graph
from ldg.logic import BOT, TOP, Atom, Every, match_and, match_implies
from ldg.models import enumerate_graphs, graph_key
from ldg.strategy import FAILURE, derivations, graphs_of
from ldg.strategy_ast import Choice, Eps, Must, RuleRef, Seq, Star, Try
from ldg.syntax import parse_concept, parse_rules, parse_strategy
from ldg.verifier import (Specification, app_rule, app_strategy, bounded_validity,
                          check_on_graph, correctness_formula, correctness_raw, glob,
                          lemma_holds, rule_post, test_soundness, verify, vc_strategy,
                          wp_strategy)

from conftest import SPEC_FILES, load_rules, load_spec

TOY = load_rules("toy.ldr")
Q = parse_concept("forall U . (A => exists r . top)")
AB = Alphabet({"A", "B"}, {"r", "s"})


def test_wp_shapes():
    assert wp_strategy(Eps(), Q, TOY) is Q
    app = app_rule(TOY["mark"], "dl")
    post = rule_post(TOY["mark"], Q, "dl")
    assert isinstance(post, Every) and post.args[0] == ("i@0",)
    assert match_implies(wp_strategy(RuleRef("mark"), Q, TOY)) == (app, post)
    assert match_and(wp_strategy(Must("mark"), Q, TOY)) == (app, post)
    left, right = match_and(wp_strategy(Try("mark"), Q, TOY))
    assert match_implies(left) == (app, post)
    assert match_implies(right)[1] is Q
    seq = wp_strategy(Seq(RuleRef("mark"), RuleRef("purge")), Q, TOY)
    assert seq == wp_strategy(RuleRef("mark"), wp_strategy(RuleRef("purge"), Q, TOY), TOY)
    ch = wp_strategy(Choice(RuleRef("mark"), Eps()), Q, TOY)
    assert match_and(ch) == (wp_strategy(RuleRef("mark"), Q, TOY), Q)
    inv = Atom("B")
    assert wp_strategy(Star(RuleRef("mark"), inv), Q, TOY) == glob(inv)


def test_nested_params_do_not_clash():
    inner = wp_strategy(RuleRef("mark"), Q, TOY)
    outer = wp_strategy(Seq(RuleRef("unmark"), RuleRef("mark")), Q, TOY)
    assert rule_post(TOY["unmark"], inner, "dl").args[0] == ("i@1",)
    assert match_implies(outer)[1] == rule_post(TOY["unmark"], inner, "dl")


def test_vc_shapes():
    for s in (Eps(), RuleRef("mark"), Try("mark"), Must("mark")):
        assert vc_strategy(s, Q, TOY) is TOP
    star = Star(RuleRef("mark"), Atom("B"))
    body, exit_ = match_and(vc_strategy(star, Q, TOY))
    inner, step = match_and(body)
    assert inner is TOP
    app = app_strategy(RuleRef("mark"), TOY)
    assert match_implies(step)[1] == wp_strategy(RuleRef("mark"), glob(Atom("B")), TOY)
    assert match_implies(exit_)[1] is Q
    assert app_strategy(Seq(Must("mark"), Eps()), TOY) == app
    assert app_strategy(star, TOY) is TOP


def test_servernet_correctness_shape(servernet):
    sp = load_spec("servernet.ldv")
    raw = correctness_raw(sp)
    partial, vc = match_and(raw)
    assert vc == vc_strategy(sp.strategy, glob(sp.post), sp.rules)
    assert match_and(vc) == (TOP, TOP)
    pre, wp = match_implies(partial)
    assert pre == glob(sp.pre)
    w0, w1 = match_and(wp)
    assert match_implies(w0)[0] == app_rule(sp.rules["r0"], "dl")
    assert match_implies(w1)[0] == app_rule(sp.rules["r1"], "dl")


def test_folding():
    sp = Specification(BOT, TOY, Eps(), Q)
    assert correctness_formula(sp) is TOP
    sp = Specification(TOP, TOY, Eps(), Atom("A"))
    assert correctness_formula(sp, expand=False) == glob(Atom("A"))


def test_check_on_graph():
    g = make_graph(["A"], ["r"], ["a", "b"], {"a": ["A"]}, [("a", "b", "r")], reserved=["z"])
    assert not check_on_graph(g, Atom("A"))
    assert check_on_graph(g, parse_concept("exists U . A"))
    assert check_on_graph(g, parse_concept("A or (exists inv r . A) or not Active"), closed=True)
    assert not check_on_graph(g, parse_concept("A or not Active"), closed=True)
    assert not check_on_graph(g, parse_concept("Active"), closed=True)


def test_bounded_validity_basics():
    assert bounded_validity(TOP, AB, 3) is None
    cex = bounded_validity(Atom("A"), AB, 3)
    assert cex is not None and not check_on_graph(cex.graph, Atom("A"))
    assert bounded_validity(Atom("A"), AB, 3, method="enum") is not None
    with pytest.raises(ValueError):
        bounded_validity(TOP, AB, 1, method="magic")


def test_z3_and_enum_agree():
    rng = random.Random(5)
    small = Alphabet({"A"}, {"r"})
    for _ in range(150):
        c = gen.random_concept(rng, 3, concepts=("A",), roles=("r",))
        z = bounded_validity(c, small, 2)
        e = bounded_validity(c, small, 2, method="enum")
        assert (z is None) == (e is None), c


def test_enumeration_is_iso_complete():
    small = Alphabet({"A"}, {"r"})
    fast = [graph_key(g) for g in enumerate_graphs(small, 3)]
    brute = {graph_key(g) for g in enumerate_graphs(small, 3, canonical=False)}
    assert len(fast) == len(set(fast)) and set(fast) == brute


@pytest.mark.parametrize("name", SPEC_FILES)
def test_specs_verify(name):
    sp = load_spec(name)
    phi, cex = verify(sp, max_nodes=3)
    if name == "spec_retag.ldv":
        assert cex is not None and not check_on_graph(cex.graph, phi, closed=True)
    else:
        assert cex is None


def test_retag_counterexample_is_a_must_failure():
    sp = load_spec("spec_retag.ldv")
    phi = correctness_formula(sp)
    g = make_graph(["A", "B"], ["r", "s"], ["a"], {"a": ["A"]})
    assert check_on_graph(g, phi, closed=True)
    assert graphs_of(derivations(g, sp.strategy, sp.rules))
    empty = make_graph(["A", "B"], ["r", "s"], [], reserved=["z"])
    assert not check_on_graph(empty, phi, closed=True)
    assert derivations(empty, sp.strategy, sp.rules) == {FAILURE}


def test_lemma_sample():
    rng = random.Random(9)
    for _ in range(300):
        g = gen.random_graph(rng, 3, 4, reserved=2)
        acts, _ = gen.random_actions(rng, g, 2)
        q = gen.random_concept(rng, 3, names=tuple(g.universe))
        assert lemma_holds(g, acts, q)


def test_soundness_on_specs():
    sp = load_spec("spec_mark_all.ldv")
    rep = test_soundness(sp, lambda rng: gen.random_graph(rng, 3, 3, ("A", "B"), ("r", "s")),
                         trials=40, seed=1)
    assert rep.ok and rep.satisfying == 40 and rep.outcomes >= 40


def test_errors():
    with pytest.raises(MissingInvariant):
        wp_strategy(parse_strategy("mark*"), Q, TOY)
    with pytest.raises(UnknownRule):
        vc_strategy(RuleRef("nope"), Q, TOY)
    with pytest.raises(InexpressibleApp):
        app_rule(load_rules("servernet.ldr")["r0"], "fol")
