import json
import random

import pytest

from ldg import gen
from ldg.errors import SyntaxError as LdgSyntaxError
from ldg.errors import UnknownName
from ldg.graph import Alphabet
from ldg.logic import Atom, Exists, Lt, Not, Or, TOP, U, basic, inv
from ldg.syntax import (check_names, dump_graph, graph_from_json, parse_action, parse_actions,
                        parse_concept, parse_fol, parse_rules, parse_spec, parse_strategy,
                        show, show_rules, show_spec, show_strategy)

from conftest import FIXTURES, SPEC_FILES, fixture_path, load_spec


def test_grammar_examples():
    assert parse_concept("(< 2 inv C2P top)") == Lt(2, inv("C2P"), TOP)
    assert parse_concept("exists U . (Client and exists Request . Proxy)") == Exists(
        U, Not(Or(Not(Atom("Client")), Not(Exists(basic("Request"), Atom("Proxy"))))))
    assert parse_rules("") == {}
    assert parse_rules("# only a comment\n") == {}


def test_concept_round_trip():
    rng = random.Random(1)
    for _ in range(2000):
        c = gen.random_concept(rng, 5, names=["n0", "i"])
        assert parse_concept(show(c)) == c
        assert parse_concept(show(c, full=True)) == c


def test_fol_round_trip():
    rng = random.Random(2)
    for _ in range(2000):
        f = gen.random_fol(rng, 5, consts=["n0"])   # sentences: a free name reads as a constant
        assert parse_fol(show(f)) == f
        assert parse_fol(show(f, full=True)) == f


def test_substitution_suffix():
    c = parse_concept("A [add_C(i,A)] [del_N(j)]")
    assert show(c) == "A [add_C(i,A)] [del_N(j)]"
    assert parse_concept(show(c)) == c


def test_actions_round_trip():
    acts = parse_actions("add_N(k); add_C(k,B); cl(i,k,{r},{},{},{},{}); i >> k")
    assert len(acts) == 4
    assert parse_actions("; ".join(map(str, acts))) == acts


def test_strategy_round_trip():
    rng = random.Random(4)
    texts = ["eps", "r0 + r1", "a ; b? ; c!", "(a + b)* {inv: top}", "(a ; b*{inv: A})*{inv: B}"]
    for t in texts:
        s = parse_strategy(t)
        assert parse_strategy(show_strategy(s)) == s
        assert parse_strategy(show_strategy(s, full=True)) == s


def test_fixture_round_trips():
    for name in ["toy.ldr", "corpus.ldr", "servernet.ldr", "nappfo.ldr"]:
        rules = parse_rules(open(fixture_path(name)).read())
        again = parse_rules(show_rules(rules))
        assert again == rules
    for name in SPEC_FILES:
        sp = load_spec(name)
        again = parse_spec(show_spec(sp), FIXTURES)
        assert (again.pre, again.post, again.strategy, again.logic, again.bound_nodes) == (
            sp.pre, sp.post, sp.strategy, sp.logic, sp.bound_nodes)
    for name in ["merge.json", "automaton.json", "servernet.json"]:
        g = graph_from_json(open(fixture_path(name)).read())
        assert graph_from_json(dump_graph(g)) == g


@pytest.mark.parametrize("text,line,col", [
    ("exists r .", 1, 11),
    ("A and\n  (B or", 2, 8),
    ("(< x r A)", 1, 4),
])
def test_error_locations(text, line, col):
    with pytest.raises(LdgSyntaxError) as err:
        parse_concept(text)
    assert str(err.value).startswith(f"{line}:{col}:")


def test_bad_inputs():
    with pytest.raises(LdgSyntaxError):
        parse_action("frob(i)")
    with pytest.raises(LdgSyntaxError):
        graph_from_json("{not json")
    with pytest.raises(LdgSyntaxError):
        graph_from_json(json.dumps({"nodes": [{"id": "a", "active": False, "labels": ["A"]}]}))
    with pytest.raises(LdgSyntaxError):
        parse_spec("pre: top\n", FIXTURES)
    with pytest.raises(UnknownName):
        check_names(parse_concept("exists s . Z"), Alphabet({"A"}, {"r"}))
