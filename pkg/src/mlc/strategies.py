"""Reduction strategies: ahead-of-time compilation as normalization, pure
interpretation, and JIT execution as an interleaving of the two."""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .machine import EMPTY, Configuration, Outcome, Status
from .rewrite import (CANCEL_RULES, EVAL_RULES, TRANSLATION_RULES, RedexSite,
                      RuleName, SiteError, enumerate_redexes, ml_step)
from .source import src_contract, src_decompose
from .target import tgt_contract
from .terms import (AS, SOURCE, TARGET, App, Bool, Int, Lam, Let, Loc, Op, Term,
                    has_boundary, replace_at, show, size, term_at)


class StepBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Policy:
    kind: str                   # interp | aot | onapply | eager | random
    p_translate: float = 0.5
    seed: int = 0

    def __str__(self):
        if self.kind == "random":
            return f"random(p={self.p_translate}, seed={self.seed})"
        return self.kind


INTERP_ONLY = Policy("interp")
AOT_THEN_RUN = Policy("aot")
TRANSLATE_ON_APPLY = Policy("onapply")
EAGER = Policy("eager")


def random_interleave(p_translate: float = 0.5, seed: int = 0) -> Policy:
    return Policy("random", float(p_translate), int(seed))


@dataclass
class StepRecord:
    rule: RuleName
    path: tuple
    config: Configuration = field(repr=False)

    @property
    def digest(self) -> str:
        return self.config.digest()


@dataclass
class Trace:
    initial: Configuration
    records: list = field(default_factory=list)

    @property
    def final(self) -> Configuration:
        return self.records[-1].config if self.records else self.initial

    def rules(self) -> list:
        return [r.rule for r in self.records]

    def jsonl(self, with_terms: bool = False) -> str:
        lines = []
        for i, r in enumerate(self.records):
            row = {"step": i, "rule": r.rule.value, "path": list(r.path),
                   "heap_size": len(r.config.heap)}
            if with_terms:
                row["term"] = show(r.config.term)
            lines.append(json.dumps(row))
        return "\n".join(lines) + ("\n" if lines else "")


def replay(trace: Trace) -> Configuration:
    """Re-apply every recorded step from the initial configuration."""
    c = trace.initial
    for r in trace.records:
        for site in enumerate_redexes(c):
            if site.path == r.path and site.rule is r.rule:
                c = ml_step(c, site)
                break
        else:
            raise SiteError(f"replay: {r.rule.value} at {r.path} is not enabled")
    return c


# ---------------------------------------------------------------------------
# ahead-of-time compilation


def step_budget(s: Term) -> int:
    env = os.environ.get("MLC_STEP_BUDGET")
    if env:
        return int(env)
    return 10_000 * size(s)


def _normalize(c: Configuration, order: str, budget: int, trace: Optional[Trace]):
    steps = 0
    while True:
        sites = enumerate_redexes(c, TRANSLATION_RULES)
        if not sites:
            return c
        if steps >= budget:
            raise StepBudgetExceeded(f"translation did not normalize within {budget} steps")
        site = sites[0] if order == "lo" else sites[-1]
        c = ml_step(c, site)
        steps += 1
        if trace is not None:
            trace.records.append(StepRecord(site.rule, site.path, c))


def compile_aot(s: Term, order: str = "lo", budget: Optional[int] = None,
                trace: Optional[Trace] = None) -> Term:
    """Normalize ``AS(s)`` with respect to translation and cancellation steps.

    ``order`` picks the site each step: ``"lo"`` leftmost-outermost, ``"ri"``
    rightmost-innermost.  Never evaluates the program.
    """
    if budget is None:
        budget = step_budget(s)
    c = Configuration(EMPTY, AS(s), TARGET)
    return _normalize(c, order, budget, trace).term


def normalize_translations(t: Term, root: str = TARGET, budget: int = 100_000) -> Term:
    """Translation normal form of an arbitrary (possibly mixed) term."""
    return _normalize(Configuration(EMPTY, t, root), "lo", budget, None).term


# ---------------------------------------------------------------------------
# execution


def _is_final(t: Term) -> bool:
    return isinstance(t, (Int, Bool, Loc, Lam))


_READS = frozenset({"unbox", "car", "cdr"})


def _reads_heap(node: Term) -> bool:
    if isinstance(node, Let):
        node = node.bound
    return isinstance(node, Op) and node.op in _READS


def _direct_step(c: Configuration):
    """Evaluation step for a boundary-free term without enumerating sites."""
    if c.root == SOURCE:
        d = src_decompose(c.term)
        if d.status != "redex":
            return None
        r = src_contract(c.heap, d.redex)
        if r is None:
            return None
        heap, new = r
        return RuleName.SrcStep, d.path, Configuration(heap, replace_at(c.term, d.path, new), c.root)
    t = c.term
    r = tgt_contract(c.heap, t)
    if r is None:
        return None
    rule = RuleName.LetFlatten if isinstance(t, Let) and isinstance(t.bound, Let) else RuleName.TgtStep
    return rule, (), Configuration(r[0], r[1], c.root)


def _lambda_under(node: Term, path: tuple):
    """Path of the function about to be applied by a site at ``node``."""
    if isinstance(node, Let):
        node, path = node.bound, path + (0,)
    if isinstance(node, App) and isinstance(node.fn, Lam):
        return path + (0,)
    return None


def _prefix(p: tuple, q: tuple) -> bool:
    return q[:len(p)] == p


def _choose_on_apply(c: Configuration, sites: list) -> RedexSite:
    ev = next((s for s in sites if s.rule in EVAL_RULES), None)
    others = [s for s in sites if s.rule not in EVAL_RULES]
    for s in others:
        if s.rule in CANCEL_RULES:
            return s
    if ev is not None:
        fn_path = _lambda_under(ev.subterm, ev.path)
        if fn_path is not None:
            if ev.rule is RuleName.TgtStep:
                # translate the body of a target function before entering it
                inside = [s for s in others if _prefix(fn_path, s.path)]
                if inside:
                    return inside[0]
            else:
                # a source call: translate toward it from the nearest AS
                enclosing = [s for s in others if _prefix(s.path, ev.path)]
                if enclosing:
                    return enclosing[-1]
        return ev
    return others[0]


def _choose(policy: Policy, c: Configuration, sites: list, rng: random.Random) -> RedexSite:
    if policy.kind == "onapply":
        return _choose_on_apply(c, sites)
    if policy.kind == "eager":
        trans = [s for s in sites if s.rule not in EVAL_RULES]
        return trans[0] if trans else sites[0]
    # random interleaving
    p = policy.p_translate
    weights = [(1.0 - p) if s.rule in EVAL_RULES else p for s in sites]
    total = sum(weights)
    if total <= 0:
        return sites[rng.randrange(len(sites))]
    x = rng.random() * total
    for s, w in zip(sites, weights):
        x -= w
        if x < 0:
            return s
    return sites[-1]


def run(c, policy: Policy = TRANSLATE_ON_APPLY, fuel: int = 10_000,
        observer: Optional[Callable[[int, Configuration], None]] = None):
    """Run a closed source program under ``policy``; returns ``(Outcome, Trace)``.

    ``interp`` reduces the program as-is with source steps only; ``aot``
    compiles first then runs the target machine; every other policy starts
    from ``AS(program)`` and may interleave any enabled steps.  ``fuel``
    bounds the number of execution steps (compilation steps under ``aot``
    are bounded by the step budget instead).
    """
    if isinstance(c, Term):
        c = Configuration(EMPTY, c)
    if policy.kind == "interp":
        start = Configuration(c.heap, c.term, SOURCE)
    else:
        start = Configuration(c.heap, AS(c.term), TARGET)
    trace = Trace(start)
    if observer:
        observer(0, start)

    if policy.kind == "aot":
        compiled = _normalize(start, "lo", step_budget(c.term), trace)
        if observer:
            for i, r in enumerate(trace.records, 1):
                observer(i, r.config)
        cur = compiled
        return _drive(cur, policy, fuel, trace, observer, direct_only=True)
    return _drive(start, policy, fuel, trace, observer)


def _drive(c: Configuration, policy: Policy, fuel: int, trace: Trace, observer,
           direct_only: bool = False):
    rng = random.Random(policy.seed)
    interp = policy.kind == "interp"
    offset = len(trace.records)
    steps = 0
    # boundary-free terms stay boundary-free except through heap reads,
    # which may hand back a function stored by the other language
    plain = direct_only or not has_boundary(c.term)
    while True:
        if _is_final(c.term):
            return Outcome(Status.VALUE, c, steps), trace
        if plain:
            r = _direct_step(c)
            if r is None:
                return Outcome(Status.STUCK, c, steps), trace
            rule, path, nxt = r
            if not direct_only and _reads_heap(term_at(c.term, path)):
                plain = not has_boundary(nxt.term)
        else:
            sites = enumerate_redexes(c, frozenset({RuleName.SrcStep})) if interp \
                else enumerate_redexes(c)
            if not sites:
                return Outcome(Status.STUCK, c, steps), trace
            site = _choose(policy, c, sites, rng)
            rule, path, nxt = site.rule, site.path, ml_step(c, site)
            plain = not has_boundary(nxt.term)
        if steps >= fuel:
            return Outcome(Status.FUEL, c, steps), trace
        c = nxt
        steps += 1
        trace.records.append(StepRecord(rule, path, c))
        if observer:
            observer(offset + steps, c)
