"""Randomized check of G |= eliminate(phi[a]) <=> G[a] |= phi."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from . import gen
from .graph import apply_elementary
from .logic import FSubst, Subst, concept_mask, eval_fol
from .substitution import eliminate

CLONE_SWEEP = list(gen.all_clone_params(("r",)))


@dataclass
class KindStats:
    logic: str
    kind: str
    cases: int = 0
    failures: int = 0
    seconds: float = 0.0
    examples: list = field(default_factory=list)   # (graph, action, formula, env)


def make_case(rng: random.Random, logic: str, kind: str, t: int, depth: int = 4,
              max_active: int = 5):
    """One random (graph, action, formula, env) with an applicable action."""
    while True:
        g = gen.random_graph(rng, max_active=max_active, reserved=2, min_active=1)
        if kind == "cl":
            params = CLONE_SWEEP[t % len(CLONE_SWEEP)]
            a = gen.random_action(rng, g, "cl")
            if a is None:
                continue
            a = type(a)(a.i, a.j, params)
        else:
            a = gen.random_action(rng, g, kind)
            if a is None:
                continue
        names = list(g.universe)
        if logic == "dl":
            return g, a, gen.random_concept(rng, depth, names=names), None
        env = {"x": rng.choice(names)} if rng.random() < 0.5 else None
        phi = gen.random_fol(rng, depth, consts=names, free=("x",) if env else ())
        return g, a, phi, env


def check_case(g, a, phi, env) -> bool:
    after = apply_elementary(g, a)
    if phi.family == "fol":
        return eval_fol(g, eliminate(FSubst(phi, a)), env) == eval_fol(after, phi, env)
    return concept_mask(g, eliminate(Subst(phi, a))) == concept_mask(after, phi)


def biconditional_suite(seed: int = 0, cases: int = 10_000, logics=("dl", "fol"),
                        kinds=gen.KINDS, depth: int = 4, max_active: int = 5,
                        keep: int = 3, progress=None) -> list[KindStats]:
    out = []
    for logic in logics:
        for kind in kinds:
            rng = random.Random(f"{seed}/{logic}/{kind}")
            st = KindStats(logic, kind)
            start = time.perf_counter()
            for t in range(cases):
                g, a, phi, env = make_case(rng, logic, kind, t, depth, max_active)
                st.cases += 1
                if not check_case(g, a, phi, env):
                    st.failures += 1
                    if len(st.examples) < keep:
                        st.examples.append((g, a, phi, env))
            st.seconds = time.perf_counter() - start
            out.append(st)
            if progress:
                progress(st)
    return out
