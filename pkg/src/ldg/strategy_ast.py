"""Strategy terms: eps, rho, rho?, rho!, s;s, s+s and annotated s*."""

from __future__ import annotations

from dataclasses import dataclass


class Strategy:
    pass


@dataclass(frozen=True)
class Eps(Strategy):
    pass


@dataclass(frozen=True)
class RuleRef(Strategy):
    name: str


@dataclass(frozen=True)
class Try(Strategy):
    name: str


@dataclass(frozen=True)
class Must(Strategy):
    name: str


@dataclass(frozen=True)
class Seq(Strategy):
    first: Strategy
    second: Strategy


@dataclass(frozen=True)
class Choice(Strategy):
    left: Strategy
    right: Strategy


@dataclass(frozen=True)
class Star(Strategy):
    body: Strategy
    inv: object = None   # formula or None


def rule_names(s: Strategy) -> set:
    if isinstance(s, (RuleRef, Try, Must)):
        return {s.name}
    if isinstance(s, Seq):
        return rule_names(s.first) | rule_names(s.second)
    if isinstance(s, Choice):
        return rule_names(s.left) | rule_names(s.right)
    if isinstance(s, Star):
        return rule_names(s.body)
    return set()


def strategy_depth(s: Strategy) -> int:
    if isinstance(s, (Seq, Choice)):
        a, b = (s.first, s.second) if isinstance(s, Seq) else (s.left, s.right)
        return 1 + max(strategy_depth(a), strategy_depth(b))
    if isinstance(s, Star):
        return 1 + strategy_depth(s.body)
    return 1
