import json
import os

import pytest

from ldg.syntax import graph_from_json, parse_rules, parse_spec

FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, "src", "ldg", "fixtures")
FIXTURES = os.path.normpath(FIXTURES)


def fixture_path(name):
    return os.path.join(FIXTURES, name)


def load_graph(name):
    with open(fixture_path(name), encoding="utf-8") as fh:
        return graph_from_json(json.load(fh))


def load_rules(name):
    with open(fixture_path(name), encoding="utf-8") as fh:
        return parse_rules(fh.read())


def load_spec(name):
    with open(fixture_path(name), encoding="utf-8") as fh:
        return parse_spec(fh.read(), FIXTURES)


SPEC_FILES = sorted(f for f in os.listdir(FIXTURES) if f.endswith(".ldv"))


@pytest.fixture
def merge_graph():
    return load_graph("merge.json")


@pytest.fixture
def automaton():
    return load_graph("automaton.json")


@pytest.fixture
def servernet():
    return load_graph("servernet.json"), load_rules("servernet.ldr")
