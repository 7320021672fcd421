"""Hypothesis properties over arbitrary terms and generated programs."""

import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from mlc.harness.gen import GenConfig, gen_program
from mlc.harness.observe import observe
from mlc.harness.oracle import reference_anf
from mlc.harness.wellformed import well_formed
from mlc.machine import EMPTY, Cell, Configuration, Heap, Outcome, Status
from mlc.rewrite import RuleName, enumerate_redexes, ml_step
from mlc.sexpr import parse
from mlc.source import src_eval
from mlc.strategies import (AOT_THEN_RUN, EAGER, TRANSLATE_ON_APPLY, compile_aot,
                            random_interleave, replay, run)
from mlc.target import anf_check, flatten, tgt_eval
from mlc.terms import (AS, SA, SOURCE, TARGET, App, Begin, Bool, If, Int, Lam,
                       Let, Loc, Op, SynClass, Var, alpha_eq, alpha_key,
                       classify, free_vars, has_boundary, rename, show,
                       substitute)

NAMES = st.sampled_from(["x", "y", "z", "f"])
LEAF = st.one_of(st.integers(-5, 20).map(Int), st.booleans().map(Bool), NAMES.map(Var))


def _extend(kids, boundaries=True):
    forms = [
        st.builds(Lam, NAMES, kids),
        st.builds(App, kids, kids),
        st.builds(Let, NAMES, kids, kids),
        st.builds(If, kids, kids, kids),
        st.builds(Begin, kids, kids),
        st.builds(lambda o, a, b: Op(o, (a, b)), st.sampled_from(["+", "-", "*", "<", "eq?", "cons"]), kids, kids),
        st.builds(lambda o, a: Op(o, (a,)), st.sampled_from(["box", "unbox", "car", "cdr"]), kids),
    ]
    if boundaries:
        forms += [st.builds(AS, kids), st.builds(SA, kids)]
    return st.one_of(*forms)


TERMS = st.recursive(LEAF, _extend, max_leaves=12)
SOURCE_TERMS = st.recursive(LEAF, lambda k: _extend(k, boundaries=False), max_leaves=12)
SEEDS = st.integers(0, 2**32)
FAST = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def program(seed, **kw):
    return gen_program(GenConfig(seed=seed, **kw))


# -- syntax -----------------------------------------------------------------------


@FAST
@given(TERMS)
def test_print_parse_round_trip(t):
    assert parse(show(t)) == t


@FAST
@given(TERMS)
def test_alpha_eq_is_reflexive_and_renaming_invariant(t):
    assert alpha_eq(t, t)
    if isinstance(t, Lam):
        renamed = Lam("fresh%9", rename(t.body, t.param, "fresh%9"))
        if "fresh%9" not in free_vars(t.body):
            assert alpha_eq(t, renamed)


@FAST
@given(TERMS, NAMES, TERMS)
def test_substitution_free_variables(t, x, v):
    got = substitute(t, x, v)
    assert free_vars(got) <= (free_vars(t) - {x}) | free_vars(v)
    if x not in free_vars(t):
        assert alpha_eq(got, t)


@FAST
@given(TERMS)
def test_static_target_grammar_is_inside_runtime_grammar(t):
    got = classify(t)
    if SynClass.TargetExpr in got:
        assert SynClass.TargetRuntimeExpr in got
        assert not has_boundary(t)
    if not has_boundary(t):
        assert SynClass.Mixed not in got


@FAST
@given(TERMS)
def test_cancellation_identities(t):
    for wrapped, root, rule in ((AS(SA(t)), TARGET, RuleName.CancelAS_SA),
                                (SA(AS(t)), SOURCE, RuleName.CancelSA_AS)):
        c = Configuration(EMPTY, wrapped, root)
        site = next(s for s in enumerate_redexes(c) if s.path == () and s.rule is rule)
        assert ml_step(c, site).term == t


# -- compilation --------------------------------------------------------------------


@FAST
@given(SOURCE_TERMS)
def test_compilation_of_arbitrary_source_terms(s):
    got = compile_aot(s)
    assert anf_check(got) and not has_boundary(got)
    assert free_vars(got) == free_vars(s)
    assert alpha_key(flatten(got)) == alpha_key(flatten(reference_anf(s)))
    assert alpha_eq(compile_aot(s, "ri"), got)


@FAST
@given(SEEDS)
def test_flatten_is_idempotent_and_preserves_meaning(seed):
    s = program(seed)
    compiled = compile_aot(s)
    flat = flatten(compiled)
    assert alpha_eq(flatten(flat), flat)
    assert observe(tgt_eval(flat, 10_000)) == observe(tgt_eval(compiled, 10_000))


# -- execution ---------------------------------------------------------------------


@FAST
@given(SEEDS, st.floats(0, 1))
def test_policies_agree_with_the_interpreter(seed, p):
    s = program(seed, max_size=20)
    want = observe(src_eval(s, 10_000))
    for pol in (AOT_THEN_RUN, TRANSLATE_ON_APPLY, EAGER, random_interleave(p, seed)):
        assert observe(run(s, pol, 200_000)[0]) == want


@FAST
@given(SEEDS, st.data())
def test_any_site_choice_stays_well_formed(seed, data):
    c = Configuration(EMPTY, AS(program(seed, max_size=15)), TARGET)
    for _ in range(60):
        assert well_formed(c)
        sites = enumerate_redexes(c)
        if not sites:
            break
        c = ml_step(c, data.draw(st.sampled_from(sites)))


@FAST
@given(SEEDS)
def test_replay_and_determinism(seed):
    s = program(seed, max_size=15)
    pol = random_interleave(0.5, seed)
    a, ta = run(s, pol, 2000)
    b, tb = run(s, pol, 2000)
    assert ta.final.digest() == tb.final.digest() == replay(ta).digest()


@FAST
@given(st.permutations(range(4)), st.integers(0, 3))
def test_observe_ignores_heap_addresses(perm, root):
    cells = [Cell("pair", ((Int(1), SOURCE), (Loc(1), SOURCE))),
             Cell("box", ((Loc(2), SOURCE),)),
             Cell("box", ((Bool(True), TARGET),)),
             Cell("pair", ((Loc(0), SOURCE), (Loc(3), SOURCE)))]

    def relabel(v):
        return Loc(perm[v.index]) if isinstance(v, Loc) else v

    moved = [None] * 4
    for i, cell in enumerate(cells):
        moved[perm[i]] = Cell(cell.kind, tuple((relabel(v), lang) for v, lang in cell.slots))
    a = observe(Outcome(Status.VALUE, Configuration(Heap(tuple(cells)), Loc(root))))
    b = observe(Outcome(Status.VALUE, Configuration(Heap(tuple(moved)), Loc(perm[root]))))
    assert a == b


def test_generated_programs_cover_every_translation_rule():
    seen = set()
    rng = random.Random(0)
    for i in range(300):
        c = Configuration(EMPTY, AS(program(i)), TARGET)
        for _ in range(200):
            sites = enumerate_redexes(c)
            if not sites:
                break
            site = rng.choice(sites)
            seen.add(site.rule)
            c = ml_step(c, site)
    assert seen == set(RuleName)
