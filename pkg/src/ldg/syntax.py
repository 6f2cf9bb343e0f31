"""Parsers and printers for every textual format.

Formats: concepts, first-order formulas, elementary actions, strategies,
rule files (``.ldr``), specification files (``.ldv``) and graph JSON.
Printing then parsing yields an equal value.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass

from .errors import SyntaxError as LdgSyntaxError
from .errors import UnknownName
from .graph import (Action, AddC, AddE, AddN, Alphabet, Cl, CloneParams, DelC,
                    DelE, DelEdge, DelN, LDGraph, Mrg, Redirect, sort_ids)
from .logic import (Atom, Const, Eq, Every, Exists, FExists, FNot, FOr, Formula,
                    FSubst, FTop, Lt, Nominal, Not, Or, Pred, Rel, Role, SelfR,
                    Some, Subst, Term, Top, Var, basic, inv, match_and,
                    match_implies, raw_and, raw_implies, U)
from . import strategy_ast as st

# --------------------------------------------------------------------------
# tokens

_OPS = ["<=>", "->", ">>", ">=", "<=", "!=", "=>", "(", ")", "{", "}", "[", "]",
        ",", ";", ".", "<", ">", "=", "+", "*", "?", "!", ":", "-"]
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_'@]*")
_NUM = re.compile(r"\d+")

KEYWORDS = {"top", "bot", "not", "and", "or", "exists", "forall", "inv", "U",
            "Self", "every", "some", "true", "false"}


@dataclass
class Token:
    kind: str     # id | num | str | op | eof
    value: str
    line: int
    col: int
    start: int
    end: int


def tokenize(text: str, line0: int = 1, col0: int = 1) -> list[Token]:
    toks = []
    pos, line, col = 0, line0, col0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == "\n":
            pos += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            pos += 1
            col += 1
            continue
        if ch == "#":
            while pos < n and text[pos] != "\n":
                pos += 1
            continue
        start = pos
        if ch == '"':
            end = text.find('"', pos + 1)
            if end < 0:
                raise LdgSyntaxError("unterminated string", line, col)
            toks.append(Token("str", text[pos + 1:end], line, col, start, end + 1))
            col += end + 1 - pos
            pos = end + 1
            continue
        m = _IDENT.match(text, pos)
        if m:
            toks.append(Token("id", m.group(), line, col, start, m.end()))
        else:
            m = _NUM.match(text, pos)
            if m:
                toks.append(Token("num", m.group(), line, col, start, m.end()))
            else:
                for op in _OPS:
                    if text.startswith(op, pos):
                        toks.append(Token("op", op, line, col, start, pos + len(op)))
                        break
                else:
                    raise LdgSyntaxError(f"unexpected character {ch!r}", line, col)
        tok = toks[-1]
        col += tok.end - tok.start
        pos = tok.end
    toks.append(Token("eof", "", line, col, n, n))
    return toks


class Parser:
    def __init__(self, text: str, line0: int = 1, col0: int = 1):
        self.text = text
        self.toks = tokenize(text, line0, col0)
        self.pos = 0

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, value: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind in ("op", "id") and tok.value == value

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.pos += 1
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.fail(f"expected {value!r}")
        return self.next()

    def ident(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind != "id":
            self.fail(f"expected {what}")
        self.pos += 1
        return tok.value

    def number(self) -> int:
        tok = self.peek()
        if tok.kind != "num":
            self.fail("expected a number")
        self.pos += 1
        return int(tok.value)

    def fail(self, message: str):
        tok = self.peek()
        found = tok.value if tok.kind != "eof" else "end of input"
        raise LdgSyntaxError(f"{message}, found {found!r}", tok.line, tok.col)

    def done(self):
        if self.peek().kind != "eof":
            self.fail("unexpected trailing input")

    # -- actions (shared)
    def action(self, scope=frozenset()) -> Action:
        def arg():
            name = self.ident("node name")
            return Var(name) if name in scope else name

        if self.peek().kind == "id" and self.at(">>", 1):
            i = arg()
            self.expect(">>")
            return Redirect(i, arg())
        head = self.ident("action name")
        if head not in ("add_N", "del_N", "add_C", "del_C", "add_E", "del_E",
                        "add_R", "del_R", "mrg", "cl"):
            self.pos -= 1
            self.fail("unknown action")
        self.expect("(")
        if head == "cl":
            i = arg()
            self.expect(",")
            j = arg()
            sets = []
            for _ in range(5):
                self.expect(",")
                self.expect("{")
                roles = []
                while not self.at("}"):
                    roles.append(self.ident("role name"))
                    if not self.accept(","):
                        break
                self.expect("}")
                sets.append(frozenset(roles))
            self.expect(")")
            return Cl(i, j, CloneParams(*sets))
        args = []
        while True:
            args.append(self.ident("argument"))
            if not self.accept(","):
                break
        self.expect(")")
        node = (lambda x: Var(x) if x in scope else x)
        if head in ("add_N", "del_N") and len(args) == 1:
            return (AddN if head == "add_N" else DelN)(node(args[0]))
        if head in ("add_C", "del_C") and len(args) == 2:
            return (AddC if head == "add_C" else DelC)(node(args[0]), args[1])
        if head in ("add_E", "add_R"):
            if len(args) == 3:
                return AddE(node(args[0]), node(args[1]), args[2])
            if len(args) == 4:
                return AddE(node(args[1]), node(args[2]), args[3], args[0])
        if head in ("del_E", "del_R"):
            if len(args) == 3:
                return DelE(node(args[0]), node(args[1]), args[2])
            if len(args) == 1:
                return DelEdge(args[0])
        if head == "mrg" and len(args) == 2:
            return Mrg(node(args[0]), node(args[1]))
        self.fail(f"wrong number of arguments for {head}")

    def actions(self, scope=frozenset(), closer: str | None = None) -> list[Action]:
        out = []
        if closer and self.at(closer):
            return out
        if self.peek().kind == "eof":
            return out
        out.append(self.action(scope))
        while self.accept(";"):
            if (closer and self.at(closer)) or self.peek().kind == "eof":
                break
            out.append(self.action(scope))
        return out

    def subst_suffix(self, x, wrap, scope=frozenset()):
        while self.at("["):
            self.next()
            acts = self.actions(scope, closer="]")
            self.expect("]")
            for a in reversed(acts):
                x = wrap(x, a)
        return x


class ConceptParser(Parser):
    def formula(self):
        return self.imp()

    def imp(self):
        left = self.or_()
        if self.accept("=>"):
            return raw_implies(left, self.imp())
        if self.accept("<=>"):
            right = self.imp()
            return raw_and(raw_implies(left, right), raw_implies(right, left))
        return left

    def or_(self):
        x = self.and_()
        while self.accept("or"):
            x = Or(x, self.and_())
        return x

    def and_(self):
        x = self.unary()
        while self.accept("and"):
            x = raw_and(x, self.unary())
        return x

    def unary(self):
        if self.accept("not"):
            return Not(self.unary())
        if self.at("exists") or self.at("forall"):
            kw = self.next().value
            role = self.role()
            self.expect(".")
            if self.at("Self"):
                if kw != "exists":
                    self.fail("Self only follows exists")
                self.next()
                return self.subst_suffix(SelfR(role), Subst)
            body = self.imp()
            if kw == "exists":
                return Exists(role, body)
            return Not(Exists(role, Not(body)))
        if self.at("every") or self.at("some"):
            kw = self.next().value
            names = [self.ident("parameter")]
            while self.accept(","):
                names.append(self.ident("parameter"))
            self.expect(".")
            body = self.imp()
            return (Every if kw == "every" else Some)(tuple(names), body)
        return self.subst_suffix(self.primary(), Subst)

    def role(self) -> Role:
        if self.accept("inv"):
            return inv(self.ident("role name"))
        if self.accept("U"):
            return U
        name = self.ident("role name")
        if name in KEYWORDS:
            self.pos -= 1
            self.fail("expected a role")
        return basic(name)

    def primary(self):
        tok = self.peek()
        if self.accept("top"):
            return Top()
        if self.accept("bot"):
            return Not(Top())
        if self.accept("{"):
            name = self.ident("node name")
            self.expect("}")
            return Nominal(name)
        if self.accept("("):
            if self.peek().value in ("<", "<=", ">", ">=") and self.peek().kind == "op":
                op = self.next().value
                n = self.number()
                role = self.role()
                body = self.imp()
                self.expect(")")
                if op == "<":
                    return Lt(n, role, body)
                if op == ">=":
                    return Not(Lt(n, role, body))
                if op == "<=":
                    return Lt(n + 1, role, body)
                return Not(Lt(n + 1, role, body))
            x = self.imp()
            self.expect(")")
            return x
        if tok.kind == "id" and tok.value not in KEYWORDS:
            self.next()
            return Atom(tok.value)
        self.fail("expected a concept")


class FolParser(Parser):
    def __init__(self, text, line0=1, col0=1):
        super().__init__(text, line0, col0)
        self.scope: list[str] = []

    def formula(self):
        return self.imp()

    def imp(self):
        left = self.or_()
        if self.accept("=>"):
            return raw_implies(left, self.imp())
        if self.accept("<=>"):
            right = self.imp()
            return raw_and(raw_implies(left, right), raw_implies(right, left))
        return left

    def or_(self):
        x = self.and_()
        while self.accept("or"):
            x = FOr(x, self.and_())
        return x

    def and_(self):
        x = self.unary()
        while self.accept("and"):
            x = raw_and(x, self.unary())
        return x

    def unary(self):
        if self.accept("not"):
            return FNot(self.unary())
        if self.at("exists") or self.at("forall"):
            kw = self.next().value
            names = [self.ident("variable")]
            while self.accept(","):
                names.append(self.ident("variable"))
            self.expect(".")
            self.scope.extend(names)
            body = self.imp()
            del self.scope[len(self.scope) - len(names):]
            for v in reversed(names):
                body = FExists(v, body) if kw == "exists" else FNot(FExists(v, FNot(body)))
            return body
        return self.subst_suffix(self.primary(), FSubst, frozenset(self.scope))

    def term(self) -> Term:
        name = self.ident("term")
        return Var(name) if name in self.scope else Const(name)

    def primary(self):
        if self.accept("top") or self.accept("true"):
            return FTop()
        if self.accept("bot") or self.accept("false"):
            return FNot(FTop())
        if self.accept("("):
            x = self.imp()
            self.expect(")")
            return x
        tok = self.peek()
        if tok.kind == "id" and tok.value not in KEYWORDS:
            if self.at("(", 1):
                name = self.next().value
                self.expect("(")
                a = self.term()
                if self.accept(","):
                    b = self.term()
                    self.expect(")")
                    return Rel(name, a, b)
                self.expect(")")
                return Pred(name, a)
            a = self.term()
            if self.accept("="):
                return Eq(a, self.term())
            if self.accept("!="):
                return FNot(Eq(a, self.term()))
            self.fail("expected '=' or '!='")
        self.fail("expected a formula")


def parse_concept(text: str):
    p = ConceptParser(text)
    x = p.formula()
    p.done()
    return x


def parse_fol(text: str):
    p = FolParser(text)
    x = p.formula()
    p.done()
    return x


def parse_formula(text: str, logic: str = "dl"):
    return parse_fol(text) if logic == "fol" else parse_concept(text)


def parse_action(text: str) -> Action:
    p = Parser(text)
    a = p.action()
    p.done()
    return a


def parse_actions(text: str) -> list[Action]:
    p = Parser(text)
    acts = p.actions()
    p.done()
    return acts


# --------------------------------------------------------------------------
# formula printing

QUANT, IMP, OR, AND, NOT, ATOM = range(6)


def show(x, full: bool = False) -> str:
    """Surface syntax; ``full`` parenthesizes every compound operand."""
    return _Printer(full).top(x)


class _Printer:
    def __init__(self, full: bool):
        self.full = full
        self.memo: dict = {}

    def top(self, x) -> str:
        return self.fmt(x)[0]

    def wrap(self, x, need: int) -> str:
        s, level = self.fmt(x)
        if level < need or (self.full and level < ATOM):
            return f"({s})"
        return s

    def fmt(self, x):
        hit = self.memo.get(x)
        if hit is None:
            hit = self._fmt(x)
            self.memo[x] = hit
        return hit

    def _fmt(self, x):
        if isinstance(x, Term):
            return x.name, ATOM
        if isinstance(x, (Top, FTop)):
            return "top", ATOM
        if isinstance(x, Atom):
            return x.name, ATOM
        if isinstance(x, Nominal):
            return "{" + str(x.name) + "}", ATOM
        if isinstance(x, Pred):
            return f"{x.args[0]}({self.top(x.args[1])})", ATOM
        if isinstance(x, Rel):
            return f"{x.args[0]}({self.top(x.args[1])},{self.top(x.args[2])})", ATOM
        if isinstance(x, Eq):
            return f"{self.top(x.args[0])} = {self.top(x.args[1])}", ATOM
        if isinstance(x, (Not, FNot)):
            inner = x.args[0]
            if isinstance(inner, (Top, FTop)):
                return "bot", ATOM
            pair = match_and(x)
            if pair is not None:
                return f"{self.wrap(pair[0], AND)} and {self.wrap(pair[1], NOT)}", AND
            if isinstance(inner, Exists) and isinstance(inner.args[1], Not):
                return f"forall {inner.args[0]} . {self.wrap(inner.args[1].args[0], QUANT)}", QUANT
            if isinstance(inner, FExists) and isinstance(inner.args[1], FNot):
                return f"forall {inner.args[0]} . {self.wrap(inner.args[1].args[0], QUANT)}", QUANT
            if isinstance(inner, Lt):
                n, role, body = inner.args
                return f"(>= {n} {role} {self.wrap(body, QUANT)})", ATOM
            if isinstance(inner, Eq):
                return f"{self.top(inner.args[0])} != {self.top(inner.args[1])}", ATOM
            return f"not {self.wrap(inner, NOT)}", NOT
        if isinstance(x, (Or, FOr)):
            pair = match_implies(x)
            if pair is not None:
                return f"{self.wrap(pair[0], OR)} => {self.wrap(pair[1], IMP)}", IMP
            return f"{self.wrap(x.args[0], OR)} or {self.wrap(x.args[1], AND)}", OR
        if isinstance(x, Exists):
            return f"exists {x.args[0]} . {self.wrap(x.args[1], QUANT)}", QUANT
        if isinstance(x, FExists):
            return f"exists {x.args[0]} . {self.wrap(x.args[1], QUANT)}", QUANT
        if isinstance(x, SelfR):
            return f"exists {x.args[0]} . Self", QUANT
        if isinstance(x, Lt):
            n, role, body = x.args
            return f"(< {n} {role} {self.wrap(body, QUANT)})", ATOM
        if isinstance(x, (Subst, FSubst)):
            return f"{self.wrap(x.args[0], ATOM)} [{x.args[1]}]", ATOM
        if isinstance(x, (Every, Some)):
            kw = "every" if isinstance(x, Every) else "some"
            return f"{kw} {', '.join(x.args[0])} . {self.wrap(x.args[1], QUANT)}", QUANT
        raise TypeError(f"cannot print {type(x).__name__}")


# --------------------------------------------------------------------------
# strategies


class StrategyParser(Parser):
    def __init__(self, text, logic="dl", line0=1, col0=1):
        super().__init__(text, line0, col0)
        self.logic = logic

    def strategy(self):
        x = self.seq()
        while self.accept("+"):
            x = st.Choice(x, self.seq())
        return x

    def seq(self):
        x = self.post()
        while self.accept(";"):
            x = st.Seq(x, self.post())
        return x

    def post(self):
        tok = self.peek()
        if self.accept("("):
            x = self.strategy()
            self.expect(")")
        elif tok.kind == "id":
            self.next()
            if tok.value == "eps":
                x = st.Eps()
            elif self.accept("?"):
                return self.stars(st.Try(tok.value))
            elif self.accept("!"):
                return self.stars(st.Must(tok.value))
            else:
                x = st.RuleRef(tok.value)
        else:
            self.fail("expected a strategy")
        return self.stars(x)

    def stars(self, x):
        while self.accept("*"):
            inv_ = None
            if self.at("{"):
                open_tok = self.next()
                depth, k = 1, self.pos
                while True:
                    tok = self.toks[k]
                    if tok.kind == "eof":
                        raise LdgSyntaxError("unclosed invariant", open_tok.line, open_tok.col)
                    if tok.kind == "op" and tok.value == "{":
                        depth += 1
                    elif tok.kind == "op" and tok.value == "}":
                        depth -= 1
                        if depth == 0:
                            break
                    k += 1
                if not (self.at("inv") and self.at(":", 1)):
                    self.fail("expected 'inv:'")
                body_start = self.toks[self.pos + 2]
                text = self.text[body_start.start:self.toks[k].start]
                inv_ = _parse_formula_at(text, self.logic, body_start.line, body_start.col)
                self.pos = k + 1
            x = st.Star(x, inv_)
        return x


def _parse_formula_at(text, logic, line, col):
    p = FolParser(text, line, col) if logic == "fol" else ConceptParser(text, line, col)
    x = p.formula()
    p.done()
    return x


def parse_strategy(text: str, logic: str = "dl"):
    p = StrategyParser(text, logic)
    x = p.strategy()
    p.done()
    return x


def show_strategy(s, full: bool = False) -> str:
    # levels: 0 choice, 1 seq, 2 postfix
    def go(x, need):
        if isinstance(x, st.Eps):
            return "eps"
        if isinstance(x, st.RuleRef):
            return x.name
        if isinstance(x, st.Try):
            return x.name + "?"
        if isinstance(x, st.Must):
            return x.name + "!"
        if isinstance(x, st.Star):
            body = go(x.body, 2)
            inv_ = f" {{inv: {show(x.inv, full)}}}" if x.inv is not None else ""
            return f"{body}*{inv_}"
        if isinstance(x, st.Seq):
            s_ = f"{go(x.first, 1)} ; {go(x.second, 2)}"
            return f"({s_})" if need > 1 or (full and need > 0) else s_
        if isinstance(x, st.Choice):
            s_ = f"{go(x.left, 0)} + {go(x.right, 1)}"
            return f"({s_})" if need > 0 else s_
        raise TypeError(x)

    return go(s, 0)


# --------------------------------------------------------------------------
# rule files


def parse_rules(text: str) -> dict:
    from .rewrite import Rule

    p = Parser(text)
    rules = {}
    while p.peek().kind != "eof":
        tok = p.peek()
        if not p.accept("rule"):
            p.fail("expected 'rule'")
        name = p.ident("rule name")
        if name in rules:
            raise LdgSyntaxError(f"duplicate rule {name!r}", tok.line, tok.col)
        p.expect("{")
        p.expect("lhs")
        p.expect("{")
        nodes, labels, edges = [], {}, []
        if p.accept("nodes"):
            p.expect(":")
            while p.peek().kind == "id":
                n = p.ident("node name")
                nodes.append(n)
                labs = []
                if p.accept("["):
                    while not p.at("]"):
                        lt_ = p.peek()
                        if lt_.kind == "str":
                            p.next()
                            labs.append(_parse_formula_at(lt_.value, "dl", lt_.line, lt_.col + 1))
                        else:
                            name_ = p.ident("label")
                            labs.append(Atom(name_) if name_ != "top" else Top())
                        if not p.accept(","):
                            break
                    p.expect("]")
                labels[n] = tuple(labs)
                if not p.accept(","):
                    break
            p.accept(";")
        if p.accept("edges"):
            p.expect(":")
            k = 0
            while p.peek().kind == "id":
                if p.at(":", 1):
                    eid = p.ident()
                    p.expect(":")
                else:
                    eid = None
                s = p.ident("node name")
                p.expect("-")
                r = p.ident("role name")
                p.expect("->")
                t = p.ident("node name")
                edges.append((eid or f"e{k}", s, t, r))
                k += 1
                if not p.accept(","):
                    break
            p.accept(";")
        p.expect("}")
        p.expect("rhs")
        p.expect("{")
        acts = p.actions(closer="}")
        p.expect("}")
        p.expect("}")
        rules[name] = Rule(name, tuple(nodes), labels, tuple(edges), tuple(acts))
    return rules


def show_rule(rule) -> str:
    def label(c):
        if isinstance(c, Atom):
            return c.name
        return json.dumps(show(c))

    nodes = ", ".join(
        n + (f" [{', '.join(label(c) for c in rule.labels.get(n, ()))}]"
             if rule.labels.get(n) else "")
        for n in rule.nodes)
    edges = ", ".join(f"{e}: {s} -{r}-> {t}" for e, s, t, r in rule.edges)
    acts = "; ".join(str(a) for a in rule.rhs)
    return (f"rule {rule.name} {{ lhs {{ nodes: {nodes}; edges: {edges} }} "
            f"rhs {{ {acts} }} }}")


def show_rules(rules: dict) -> str:
    return "\n".join(show_rule(r) for r in rules.values()) + "\n"


# --------------------------------------------------------------------------
# specification files

_SECTIONS = ("logic", "rules", "pre", "post", "strategy", "bound", "concepts", "roles")


def parse_spec(text: str, base_dir: str = ".", rules: dict | None = None):
    """Parse a ``.ldv`` file into a ``Specification``."""
    from .verifier import Specification

    raw: dict[str, tuple] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(line)
        if not stripped.strip():
            continue
        m = re.match(r"([A-Za-z_]+)\s*:(.*)$", stripped)
        if m and m.group(1) in _SECTIONS and not line[:1].isspace():
            current = m.group(1)
            if current in raw:
                raise LdgSyntaxError(f"duplicate section {current!r}", lineno, 1)
            raw[current] = (m.group(2), lineno, m.start(2) + 1)
        elif current is not None and line[:1].isspace():
            body, l0, c0 = raw[current]
            raw[current] = (body + "\n" + stripped, l0, c0)
        else:
            raise LdgSyntaxError("expected 'section: value'", lineno, 1)
    logic = raw.get("logic", ("dl", 0, 0))[0].strip() or "dl"
    if logic not in ("dl", "fol"):
        raise LdgSyntaxError(f"unknown logic {logic!r}", raw["logic"][1], raw["logic"][2])
    for need in ("pre", "post", "strategy"):
        if need not in raw:
            raise LdgSyntaxError(f"missing section {need!r}", 1, 1)
    if rules is None:
        if "rules" not in raw:
            raise LdgSyntaxError("missing section 'rules'", 1, 1)
        path = os.path.join(base_dir, raw["rules"][0].strip())
        with open(path, encoding="utf-8") as fh:
            rules = parse_rules(fh.read())

    def formula(key):
        body, l0, c0 = raw[key]
        return _parse_formula_at(body, logic, l0, c0)

    body, l0, c0 = raw["strategy"]
    p = StrategyParser(body, logic, l0, c0)
    strategy = p.strategy()
    p.done()
    bound_nodes, max_parallel = 4, 1
    if "bound" in raw:
        for part in re.split(r"[,\s]+", raw["bound"][0].strip()):
            if not part:
                continue
            key, _, val = part.partition("=")
            if key == "nodes":
                bound_nodes = int(val)
            elif key == "parallel":
                max_parallel = int(val)
            else:
                raise LdgSyntaxError(f"unknown bound {key!r}", raw["bound"][1], 1)

    def names(key):
        if key not in raw:
            return None
        return frozenset(x for x in re.split(r"[,\s]+", raw[key][0].strip()) if x)

    concepts, roles = names("concepts"), names("roles")
    alphabet = None
    if concepts is not None or roles is not None:
        alphabet = Alphabet(concepts or frozenset(), roles or frozenset())
    return Specification(pre=formula("pre"), rules=rules, strategy=strategy,
                         post=formula("post"), logic=logic, bound_nodes=bound_nodes,
                         max_parallel=max_parallel, alphabet=alphabet,
                         rules_file=raw.get("rules", ("", 0, 0))[0].strip() or None)


def _strip_comment(line: str) -> str:
    # '#' starts a comment; formulas never contain it
    return line.split("#", 1)[0].rstrip()


def show_spec(sp) -> str:
    lines = [f"logic: {sp.logic}"]
    if sp.rules_file:
        lines.append(f"rules: {sp.rules_file}")
    if sp.alphabet is not None:
        lines.append("concepts: " + ", ".join(sorted(sp.alphabet.concepts)))
        lines.append("roles: " + ", ".join(sorted(sp.alphabet.roles)))
    lines.append(f"pre: {show(sp.pre)}")
    lines.append(f"post: {show(sp.post)}")
    lines.append(f"strategy: {show_strategy(sp.strategy)}")
    lines.append(f"bound: nodes={sp.bound_nodes}, parallel={sp.max_parallel}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# graphs


def graph_from_json(data) -> LDGraph:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise LdgSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise LdgSyntaxError("graph must be a JSON object")
    nodes = data.get("nodes", [])
    edges = data.get("edges", [])
    concepts = set(data.get("concepts", []))
    roles = set(data.get("roles", []))
    universe, active, labels, emap = [], [], {}, {}
    for k, nd in enumerate(nodes):
        if not isinstance(nd, dict) or "id" not in nd:
            raise LdgSyntaxError(f"node {k} lacks an id")
        nid = str(nd["id"])
        if nid in universe:
            raise LdgSyntaxError(f"duplicate node {nid!r}")
        universe.append(nid)
        if nd.get("active", True):
            active.append(nid)
            labels[nid] = list(nd.get("labels", []))
        elif nd.get("labels"):
            raise LdgSyntaxError(f"reserved node {nid!r} has labels")
    if "concepts" not in data:
        for labs in labels.values():
            concepts.update(labs)
    for k, ed in enumerate(edges):
        try:
            eid = str(ed.get("id", f"e{k}"))
            emap[eid] = (str(ed["src"]), str(ed["tgt"]), str(ed["role"]))
        except (KeyError, AttributeError) as exc:
            raise LdgSyntaxError(f"edge {k} is malformed") from exc
        if "roles" not in data:
            roles.add(emap[eid][2])
    return LDGraph(Alphabet(concepts, roles), universe, active, labels, emap)


def graph_to_json(g: LDGraph) -> dict:
    return {
        "concepts": sorted(g.alphabet.concepts),
        "roles": sorted(g.alphabet.roles),
        "nodes": [{"id": n, "active": n in g.active,
                   "labels": sorted(g.labels.get(n, ()))} for n in g.universe],
        "edges": [{"id": e, "src": s, "tgt": t, "role": r}
                  for e, (s, t, r) in g.edges.items()],
    }


def dump_graph(g: LDGraph) -> str:
    return json.dumps(graph_to_json(g), indent=2) + "\n"


def graph_to_dot(g: LDGraph) -> str:
    lines = ["digraph G {"]
    for n in g.universe:
        if n in g.active:
            labs = ",".join(sorted(g.labels.get(n, ())))
            text = f"{n}: {labs}" if labs else n
            lines.append(f'  "{n}" [label="{text}"];')
        else:
            lines.append(f'  "{n}" [style=dashed];')
    for e, (s, t, r) in g.edges.items():
        lines.append(f'  "{s}" -> "{t}" [label="{r}", id="{e}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def check_names(x: Formula, alphabet: Alphabet):
    """Raise ``UnknownName`` for concept or role names outside ``alphabet``."""
    from .logic import concept_names, role_names

    bad = (concept_names(x) - alphabet.concepts) | (role_names(x) - alphabet.roles)
    if bad:
        raise UnknownName(f"unknown names {sorted(bad)}")

