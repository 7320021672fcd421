"""Property checks over generated programs.

Every check returns a ``Report``; failures carry enough to reproduce them
(the generator seed and the printed program).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from ..machine import EMPTY, Configuration
from ..rewrite import RuleName, enumerate_redexes, ml_step
from ..source import src_eval
from ..strategies import (AOT_THEN_RUN, EAGER, TRANSLATE_ON_APPLY, compile_aot,
                          random_interleave, run)
from ..target import anf_check, flatten
from ..terms import (AS, HOLE, SA, SOURCE, TARGET, Term, alpha_eq, alpha_key,
                     has_boundary, show)
from .gen import GenConfig, gen_context, gen_program, gen_typed, plug
from .observe import Divergent, KeyCache, config_key, observe
from .oracle import reference_anf
from .wellformed import violations

# Fuel multiplier for runs that interleave translation with evaluation:
# translation steps count against fuel too.
TRANSLATE_FUEL_FACTOR = 20


@dataclass
class Finding:
    check: str
    seed: int
    program: str
    detail: str

    def json(self) -> str:
        return json.dumps({"check": self.check, "seed": self.seed,
                           "program": self.program, "detail": self.detail})


@dataclass
class Report:
    check: str
    cases: int = 0
    failures: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, seed: int, program, detail: str):
        text = show(program) if isinstance(program, Term) else str(program)
        self.failures.append(Finding(self.check, seed, text, detail))

    def summary(self) -> str:
        extra = "".join(f" {k}={v}" for k, v in sorted(self.notes.items()))
        verdict = "ok" if self.ok else "FAIL"
        return f"{self.check}: {verdict} cases={self.cases} failures={len(self.failures)}{extra}"

    def jsonl(self) -> str:
        return "".join(f.json() + "\n" for f in self.failures)


# ---------------------------------------------------------------------------
# compilation


def check_oracle(cfg: GenConfig, count: int) -> Report:
    """``compile_aot`` agrees with the reference ANF conversion up to alpha
    after canonical let-flattening."""
    rep = Report("oracle")
    exact = 0
    for i in range(count):
        c = cfg.derive(i)
        s = gen_program(c)
        got, want = compile_aot(s), reference_anf(s)
        rep.cases += 1
        if alpha_eq(got, want):
            exact += 1
        elif alpha_key(flatten(got)) != alpha_key(flatten(want)):
            rep.fail(c.seed, s, f"compiled {show(got)} expected {show(want)}")
    rep.notes["compared"] = "alpha-after-flattening"
    rep.notes["exact_alpha"] = exact
    return rep


def check_normal_forms(cfg: GenConfig, count: int) -> Report:
    """Compilation leaves no boundary behind, produces ANF, and the result
    does not depend on which translation site is taken first."""
    rep = Report("normal-forms")
    for i in range(count):
        c = cfg.derive(i)
        s = gen_program(c)
        lo, ri = compile_aot(s, "lo"), compile_aot(s, "ri")
        rep.cases += 1
        if has_boundary(lo):
            rep.fail(c.seed, s, f"boundary left in {show(lo)}")
        elif not anf_check(lo):
            rep.fail(c.seed, s, f"not ANF: {show(lo)}")
        elif not alpha_eq(lo, ri):
            rep.fail(c.seed, s, f"order-dependent: {show(lo)} vs {show(ri)}")
    return rep


def cancellation_terms(max_size: int = 10, per_size: int = 60, seed: int = 0):
    """Source programs of every size up to ``max_size`` and their compiled
    forms, for the cancellation identities."""
    out = []
    for n in range(1, max_size + 1):
        base = GenConfig(seed=seed, max_size=n)
        for i in range(per_size):
            s = gen_program(base.derive(n * 1000 + i))
            out.append(s)
            out.append(compile_aot(s))
    return out


def check_cancellation(terms) -> Report:
    """``AS(SA(t))`` and ``SA(AS(t))`` each cancel to exactly ``t`` in one step."""
    rep = Report("cancellation")
    for t in terms:
        rep.cases += 1
        for wrapped, root, rule in ((AS(SA(t)), TARGET, RuleName.CancelAS_SA),
                                    (SA(AS(t)), SOURCE, RuleName.CancelSA_AS)):
            c = Configuration(EMPTY, wrapped, root)
            site = next((s for s in enumerate_redexes(c) if s.path == () and s.rule is rule), None)
            if site is None:
                rep.fail(0, t, f"{rule.value} not enabled at the root")
                continue
            got = ml_step(c, site).term
            if got != t:
                rep.fail(0, t, f"{rule.value} gave {show(got)}")
    return rep


# ---------------------------------------------------------------------------
# execution


def _policies(seed: int):
    return [AOT_THEN_RUN, TRANSLATE_ON_APPLY,
            random_interleave(0.5, seed), random_interleave(0.2, seed + 1),
            random_interleave(0.8, seed + 2)]


def correctness_and_subject(cfg: GenConfig, count: int, fuel: int = 10_000,
                            track_wf: bool = True):
    """Run ``count`` terminating programs under every strategy.

    Returns two reports: observable agreement with the source interpreter,
    and well-formedness of every configuration visited (subject reduction).
    Programs that do not terminate under the interpreter within ``fuel``
    are skipped and counted.
    """
    corr = Report("correctness")
    subj = Report("subject-reduction")
    skipped = 0
    steps_seen = 0
    i = 0
    while corr.cases < count:
        c = cfg.derive(i)
        i += 1
        s = gen_program(c)
        want = observe(src_eval(s, fuel))
        if isinstance(want, Divergent):
            skipped += 1
            continue
        corr.cases += 1
        for pol in _policies(c.seed):
            bad: list = []

            def watch(k, conf, bad=bad):
                if not bad:
                    v = violations(conf)
                    if v:
                        bad.append((k, conf, v))

            out, trace = run(s, pol, fuel * TRANSLATE_FUEL_FACTOR,
                             observer=watch if track_wf else None)
            steps_seen += len(trace.records) + 1
            got = observe(out)
            if got != want:
                corr.fail(c.seed, s, f"{pol}: got {got} expected {want}")
            if bad:
                k, conf, v = bad[0]
                subj.fail(c.seed, s, f"{pol} step {k}: {'; '.join(v)} in {show(conf.term)}")
        subj.cases += 1
    corr.notes["skipped_divergent"] = skipped
    subj.notes["configurations"] = steps_seen
    return corr, subj


def check_correctness(cfg: GenConfig, count: int, fuel: int = 10_000) -> Report:
    return correctness_and_subject(cfg, count, fuel, track_wf=False)[0]


def check_subject_reduction(cfg: GenConfig, count: int, fuel: int = 10_000) -> Report:
    return correctness_and_subject(cfg, count, fuel)[1]


# ---------------------------------------------------------------------------
# confluence


class _Explorer:
    """Memoized one-step successor graph over canonical configuration keys."""

    def __init__(self, state_cap: int):
        self.cache = KeyCache()
        self.configs: dict = {}
        self.succ: dict = {}
        self.state_cap = state_cap

    def key(self, c: Configuration):
        k = config_key(c, self.cache)
        self.configs.setdefault(k, c)
        return k

    def successors(self, k) -> list:
        got = self.succ.get(k)
        if got is None:
            c = self.configs[k]
            got = [self.key(ml_step(c, s)) for s in enumerate_redexes(c)]
            self.succ[k] = got
        return got

    def joinable(self, a, b, depth: int):
        """``True`` if the two keys reach a common key within ``depth`` steps
        each, ``False`` if both sides are exhausted first, ``None`` if the
        state cap was hit."""
        if a == b:
            return True
        seen = [{a}, {b}]
        front = [[a], [b]]
        for _ in range(depth):
            for side in (0, 1):
                nxt = []
                for k in front[side]:
                    for n in self.successors(k):
                        if n in seen[1 - side]:
                            return True
                        if n not in seen[side]:
                            seen[side].add(n)
                            nxt.append(n)
                front[side] = nxt
                if len(seen[0]) + len(seen[1]) > self.state_cap:
                    return None
            if not front[0] and not front[1]:
                return False
        return False


def check_confluence(cfg: GenConfig, count: int, join_depth: int = 8,
                     fuel: int = 400, state_cap: int = 20_000,
                     per_program: int = 3) -> Report:
    """Every pair of one-step reducts of a sampled configuration joins.

    Configurations are sampled from random interleaved runs so that they
    mix source and target code and carry a heap.
    """
    rep = Report("confluence")
    pairs = unresolved = 0
    i = 0
    while rep.cases < count:
        c = cfg.derive(i)
        i += 1
        s = gen_program(c)
        _, trace = run(s, random_interleave(0.5, c.seed), fuel)
        configs = [trace.initial] + [r.config for r in trace.records]
        rng = random.Random(c.seed)
        candidates = [k for k in configs if len(enumerate_redexes(k)) >= 2]
        if not candidates:
            continue
        for conf in rng.sample(candidates, min(per_program, len(candidates))):
            if rep.cases >= count:
                break
            rep.cases += 1
            ex = _Explorer(state_cap)
            sites = enumerate_redexes(conf)
            reducts = [ex.key(ml_step(conf, st)) for st in sites]
            for x in range(len(sites)):
                for y in range(x + 1, len(sites)):
                    pairs += 1
                    j = ex.joinable(reducts[x], reducts[y], join_depth)
                    if j is None:
                        unresolved += 1
                        j = False
                    if not j:
                        rep.fail(c.seed, conf.term,
                                 f"{sites[x].rule.value}@{list(sites[x].path)} and "
                                 f"{sites[y].rule.value}@{list(sites[y].path)} "
                                 f"do not join within {join_depth}")
    rep.notes["pairs"] = pairs
    rep.notes["state_cap_hits"] = unresolved
    return rep


# ---------------------------------------------------------------------------
# contextual equivalence


def _terminates(t: Term, fuel: int):
    if has_boundary(t):
        return observe(run(t, EAGER, fuel)[0])
    return observe(src_eval(t, fuel))


def check_ctx_equiv(a: Term, b: Term, cfg: GenConfig, contexts: int,
                    hole_type="int", fuel: int = 10_000, rep: Report | None = None) -> Report:
    """``C[a]`` and ``C[b]`` agree on termination for ``contexts`` contexts:
    the empty one, then generated ones.

    Every step, translation included, costs one unit of fuel.  A
    disagreement is retried with twenty times the fuel on the side that ran
    out before it counts.
    """
    rep = rep or Report("ctx-equiv")
    for i in range(contexts):
        c = cfg.derive(i)
        # the first context is the hole itself
        ctx = HOLE if i == 0 else gen_context(c, hole_type)
        rep.cases += 1
        oa, ob = _terminates(plug(ctx, a), fuel), _terminates(plug(ctx, b), fuel)
        ta, tb = not isinstance(oa, Divergent), not isinstance(ob, Divergent)
        if ta != tb:
            slow = plug(ctx, b if ta else a)
            if isinstance(_terminates(slow, fuel * TRANSLATE_FUEL_FACTOR), Divergent):
                rep.fail(c.seed, ctx, f"terminates with {show(a) if ta else show(b)} only")
    return rep


def check_full_abstraction(cfg: GenConfig, programs: int, contexts: int,
                           fuel: int = 10_000) -> Report:
    """Each generated ``s`` and its compiled form seen from source,
    ``SA(compile_aot(s))``, are indistinguishable by termination."""
    rep = Report("ctx-equiv")
    done = 0
    i = 0
    while done < programs:
        c = cfg.derive(i)
        i += 1
        s, ty = gen_typed(c)
        if isinstance(observe(src_eval(s, fuel)), Divergent):
            continue
        done += 1
        ctx_cfg = GenConfig(seed=c.seed, max_size=cfg.max_size,
                            allow_effects=cfg.allow_effects, ill_typed_rate=0.0,
                            diverge_rate=0.2)
        check_ctx_equiv(s, SA(compile_aot(s)), ctx_cfg, contexts, ty, fuel, rep)
    rep.notes["programs"] = done
    return rep
