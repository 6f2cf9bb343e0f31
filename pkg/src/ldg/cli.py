"""Command-line entry point: ``ldg <command> ...``.

Exit codes: 0 success, 1 a counterexample or failed check, 2 an input
error, 3 a step bound or search budget was exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .errors import BudgetExceeded, InputError, StepBoundExceeded
from .errors import SyntaxError as LdgSyntaxError
from .syntax import (dump_graph, graph_from_json, graph_to_dot, graph_to_json,
                     parse_actions, parse_formula, parse_rules, parse_spec,
                     parse_strategy, show)

DEFAULT_SEED = 0


def _use_color(stream) -> bool:
    return os.environ.get("LDG_COLOR", "1") != "0" and hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, ok: bool, stream=None) -> str:
    stream = stream or sys.stdout
    if not _use_color(stream):
        return text
    return f"\033[{'32' if ok else '31'}m{text}\033[0m"


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load_graph(path: str):
    return graph_from_json(_read(path))


def _load_rules(path: str) -> dict:
    return parse_rules(_read(path))


def _outdir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit_graph(g, args):
    text = graph_to_dot(g) if getattr(args, "dot", False) else dump_graph(g)
    sys.stdout.write(text)
    if getattr(args, "out", None):
        d = _outdir(args.out)
        _write(os.path.join(d, "graph.json"), dump_graph(g))
        _write(os.path.join(d, "graph.dot"), graph_to_dot(g))


# ---------------------------------------------------------------- commands


def cmd_apply(args) -> int:
    from .graph import apply_sequence
    g = apply_sequence(_load_graph(args.graph), parse_actions(args.actions))
    _emit_graph(g, args)
    return 0


def _outcome_json(o):
    from .strategy import Graph
    if isinstance(o, Graph):
        return {"outcome": "Graph", "graph": graph_to_json(o.graph)}
    return {"outcome": str(o)}


def cmd_rewrite(args) -> int:
    from .strategy import Graph, derivations, execute
    g = _load_graph(args.graph)
    rules = _load_rules(args.rules)
    s = parse_strategy(args.strategy, args.logic)
    if args.all:
        outs = derivations(g, s, rules, args.step_bound or 50, args.injective)
        items = sorted((_outcome_json(o) for o in outs),
                       key=lambda x: json.dumps(x, sort_keys=True))
        sys.stdout.write(json.dumps(items, indent=2) + "\n")
        return 0
    o = execute(g, s, rules, args.policy, args.step_bound or 10_000, args.seed, args.injective)
    if isinstance(o, Graph):
        _emit_graph(o.graph, args)
    else:
        print(o)
    return 0


def cmd_eliminate(args) -> int:
    from .substitution import eliminate_dl, eliminate_fol
    x = parse_formula(args.formula, args.logic)
    out, trace = (eliminate_fol if args.logic == "fol" else eliminate_dl)(x, args.trace)
    if args.trace:
        for name, before, after in trace:
            print(f"{name}: {show(before)}  ~>  {show(after)}")
    print(show(out, full=args.full))
    return 0


def _strategy_args(args):
    from .verifier import fold
    if bool(args.actions) == bool(args.strategy):
        raise InputError("give exactly one of --strategy and --actions")
    q = parse_formula(args.post, args.logic)
    if args.glob:
        from .verifier import glob
        q = glob(q)
    rules = _load_rules(args.rules) if args.rules else {}
    return q, rules, fold


def _finish(phi, args):
    from .substitution import eliminate
    from .verifier import fold
    if args.expand:
        phi = fold(eliminate(phi))
    print(show(phi, full=args.full))
    return 0


def cmd_wp(args) -> int:
    from .verifier import wp_action, wp_strategy
    q, rules, fold = _strategy_args(args)
    if args.actions:
        return _finish(wp_action(parse_actions(args.actions), q), args)
    s = parse_strategy(args.strategy, args.logic)
    return _finish(fold(wp_strategy(s, q, rules, args.logic)), args)


def cmd_vc(args) -> int:
    from .verifier import vc_strategy
    if args.actions:
        raise InputError("vc needs a strategy, not actions")
    q, rules, fold = _strategy_args(args)
    s = parse_strategy(args.strategy, args.logic)
    return _finish(fold(vc_strategy(s, q, rules, args.logic)), args)


def cmd_verify(args) -> int:
    from . import gen
    from .verifier import spec_alphabet, test_soundness, verify
    sp = parse_spec(_read(args.spec), os.path.dirname(os.path.abspath(args.spec)))
    bound = args.bound_nodes or sp.bound_nodes
    phi, cex = verify(sp, bound, args.method, args.timeout_ms)
    if args.emit_formula:
        _write(args.emit_formula, show(phi, full=True) + "\n")
    if cex is not None:
        print(_paint("counterexample found", False), file=sys.stderr)
        sys.stdout.write(dump_graph(cex.graph))
        return 1
    print(_paint(f"no counterexample with at most {bound} active nodes", True))
    if args.trials:
        alphabet = sp.alphabet or spec_alphabet(sp)
        concepts, roles = sorted(alphabet.concepts), sorted(alphabet.roles)

        def sampler(rng):
            return gen.random_graph(rng, max_active=bound, concepts=concepts,
                                    roles=roles, reserved=0)

        rep = test_soundness(sp, sampler, args.trials, seed=args.seed, phi=phi)
        print(f"soundness: {rep.satisfying} satisfying graphs, {rep.outcomes} outcomes, "
              f"{len(rep.violations)} violations")
        if rep.violations:
            sys.stdout.write(dump_graph(rep.violations[0][0]))
            return 1
    return 0


def _load_interp(path):
    from .bisim import Interp
    data = json.loads(_read(path))
    return Interp(graph_from_json(data), dict(data.get("nominals", {})))


def cmd_bisim_check(args) -> int:
    from .bisim import Features, is_bisimulation
    i, j = _load_interp(args.i), _load_interp(args.j)
    data = json.loads(_read(args.z))
    pairs = data["pairs"] if isinstance(data, dict) else data
    try:
        f = Features.parse(args.features)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    ok, why = is_bisimulation(i, j, [tuple(p) for p in pairs], f)
    if ok:
        print(_paint(f"Z is an {f}-bisimulation", True))
        return 0
    print(_paint(f"Z is not an {f}-bisimulation", False))
    for w in why:
        print(f"  {w}")
    return 1


def cmd_bisim_demo(args) -> int:
    from .bisim import demonstrate_non_closure, nonclosure_fixture
    if args.out:
        d = _outdir(args.out)
        i, j, z = nonclosure_fixture()
        for name, side in (("I", i), ("J", j)):
            data = graph_to_json(side.graph)
            data["nominals"] = side.nominals
            _write(os.path.join(d, f"{name}.json"), json.dumps(data, indent=2) + "\n")
        _write(os.path.join(d, "Z.json"), json.dumps(sorted(map(list, z)), indent=2) + "\n")
    rep = demonstrate_non_closure()
    for (_, ok, _), line in zip(rep.steps, rep.lines()):
        print(_paint(line, ok))
    return 0 if rep.ok else 1


def cmd_fuzz(args) -> int:
    from . import gen
    from .fuzz import biconditional_suite
    logics = tuple(args.logic.split(","))
    kinds = tuple(args.kinds.split(",")) if args.kinds else gen.KINDS
    for x in logics:
        if x not in ("dl", "fol"):
            raise InputError(f"unknown logic {x!r}")
    for k in kinds:
        if k not in gen.KINDS:
            raise InputError(f"unknown action kind {k!r}")

    def progress(st):
        line = f"{st.logic:<4}{st.kind:<10}cases={st.cases} failures={st.failures}"
        print(_paint(line, not st.failures), flush=True)

    stats = biconditional_suite(args.seed, args.cases, logics, kinds, progress=progress)
    bad = [s for s in stats if s.failures]
    for s in bad:
        for g, a, phi, env in s.examples:
            print(f"failure ({s.logic}, {s.kind}): {show(phi)} under {a}", file=sys.stderr)
            sys.stderr.write(dump_graph(g))
    if args.out:
        from .report import write_fuzz_report
        for p in write_fuzz_report(stats, _outdir(args.out), chart=not args.no_chart):
            print(f"wrote {p}", file=sys.stderr)
    return 1 if bad else 0


def cmd_draw(args) -> int:
    from .report import draw_graph
    g = _load_graph(args.graph)
    path = os.path.join(_outdir(args.out), args.name)
    draw_graph(g, path, args.title)
    print(path)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ldg", description="Logically decorated graph rewriting "
                                "and verification.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("apply", help="apply elementary actions to a graph")
    a.add_argument("graph")
    a.add_argument("actions", help="actions separated by ';'")
    a.add_argument("--dot", action="store_true", help="print Graphviz instead of JSON")
    a.add_argument("--out", help="also write graph.json and graph.dot here")
    a.set_defaults(func=cmd_apply)

    r = sub.add_parser("rewrite", help="run a strategy on a graph")
    r.add_argument("graph")
    r.add_argument("rules")
    r.add_argument("strategy")
    r.add_argument("--all", action="store_true", help="print every derivation outcome")
    r.add_argument("--injective", action="store_true", help="only injective matches")
    r.add_argument("--policy", choices=("first-match", "seeded"), default="first-match")
    r.add_argument("--seed", type=int, default=DEFAULT_SEED)
    r.add_argument("--step-bound", type=int, default=None,
                   help="default 10000, or 50 with --all")
    r.add_argument("--logic", choices=("dl", "fol"), default="dl")
    r.add_argument("--dot", action="store_true")
    r.add_argument("--out")
    r.set_defaults(func=cmd_rewrite)

    e = sub.add_parser("eliminate", help="remove substitutions from a formula")
    e.add_argument("formula", help="e.g. 'A [add_C(i,A)]'")
    e.add_argument("--logic", choices=("dl", "fol"), default="dl")
    e.add_argument("--trace", action="store_true", help="print each rewriting step")
    e.add_argument("--full", action="store_true", help="parenthesize fully")
    e.set_defaults(func=cmd_eliminate)

    for name, func in (("wp", cmd_wp), ("vc", cmd_vc)):
        w = sub.add_parser(name, help=f"{name} of a strategy (or action sequence)")
        w.add_argument("post")
        w.add_argument("--strategy")
        w.add_argument("--actions")
        w.add_argument("--rules")
        w.add_argument("--logic", choices=("dl", "fol"), default="dl")
        w.add_argument("--glob", action="store_true",
                       help="read the postcondition at the graph level first")
        w.add_argument("--expand", action="store_true", help="eliminate substitutions")
        w.add_argument("--full", action="store_true", help="parenthesize fully")
        w.set_defaults(func=func)

    v = sub.add_parser("verify", help="check a specification file")
    v.add_argument("spec")
    v.add_argument("--bound-nodes", type=int)
    v.add_argument("--trials", type=int, default=0,
                   help="also run the soundness check on this many graphs")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--emit-formula", metavar="FILE")
    v.add_argument("--method", choices=("z3", "enum"), default="z3")
    v.add_argument("--timeout-ms", type=int)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bisim", help="bisimulation tools")
    bs = b.add_subparsers(dest="bisim_command", required=True)
    bc = bs.add_parser("check", help="is Z a bisimulation between I and J?")
    bc.add_argument("i")
    bc.add_argument("j")
    bc.add_argument("z")
    bc.add_argument("--features", default="QUOSelf")
    bc.set_defaults(func=cmd_bisim_check)
    bd = bs.add_parser("demo-nonclosure", help="the non-closure witness")
    bd.add_argument("--out", help="write I.json, J.json and Z.json here")
    bd.set_defaults(func=cmd_bisim_demo)

    f = sub.add_parser("fuzz", help="randomized substitution biconditional suite")
    f.add_argument("--seed", type=int, default=DEFAULT_SEED)
    f.add_argument("--cases", type=int, default=1000, help="cases per action kind")
    f.add_argument("--logic", default="dl,fol")
    f.add_argument("--kinds", help="comma-separated action kinds")
    f.add_argument("--out", help="write fuzz.json and fuzz.png here")
    f.add_argument("--no-chart", action="store_true")
    f.set_defaults(func=cmd_fuzz)

    d = sub.add_parser("draw", help="draw a graph as PNG")
    d.add_argument("graph")
    d.add_argument("--out", required=True)
    d.add_argument("--name", default="graph.png")
    d.add_argument("--title")
    d.set_defaults(func=cmd_draw)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LdgSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StepBoundExceeded, BudgetExceeded) as exc:
        print(f"bound exceeded: {exc}", file=sys.stderr)
        return 3
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
