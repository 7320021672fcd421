"""Multi-language rules, site enumeration and stepping."""

import pytest

from mlc.machine import EMPTY, Cell, Configuration, Heap
from mlc.rewrite import (Mutation, RuleName, SiteError, a_reduce, a_rule,
                         active_mutation, enumerate_redexes, find_eval, ml_step,
                         mutated)
from mlc.sexpr import parse
from mlc.terms import AS, SA, SOURCE, TARGET, Int, Let, Loc, Op, Var, alpha_eq, show


def sites(text, root=TARGET, heap=EMPTY):
    return enumerate_redexes(Configuration(heap, parse(text), root))


def step(c, rule, path=()):
    for s in enumerate_redexes(c):
        if s.rule is rule and s.path == tuple(path):
            return ml_step(c, s)
    raise AssertionError(f"{rule} not enabled at {path} in {show(c.term)}")


def translate(text):
    return a_reduce(parse(text))


# -- translation rules -------------------------------------------------------


def test_alift():
    got = translate("(AS (+ 1 (+ 2 3)))")
    assert alpha_eq(got, parse("(let ((t0 (AS (+ 2 3)))) (AS (+ 1 t0)))"))


def test_value_translation():
    assert translate("(AS 5)") == Int(5)
    assert translate("(AS (lambda (x) x))") == parse("(lambda (x) (AS x))")


def test_computation_translates_structurally():
    assert translate("(AS (f 1))") == parse("((AS f) (AS 1))")
    assert translate("(AS (if x 1 (+ 1 2)))") == parse("(if (AS x) (AS 1) (AS (+ 1 2)))")


def test_join_if_copies_the_context():
    got = translate("(AS (+ 1 (if x 2 3)))")
    assert got == parse("(AS (if x (+ 1 2) (+ 1 3)))")


def test_let_association_renames_captured_binder():
    got = translate("(AS (+ y (let ((y 1)) y)))")
    assert alpha_eq(got, parse("(AS (let ((z 1)) (+ y z)))"))


def test_begin_becomes_a_discarding_let():
    got = translate("(AS (begin (f 1) 2))")
    assert isinstance(got, AS) and got.body.name.startswith("_")
    assert alpha_eq(got, parse("(AS (let ((_ (f 1))) 2))"))


def test_let_with_simple_bound_binds_directly():
    assert translate("(AS (let ((x (f 1))) x))") == parse("(let ((x (AS (f 1)))) (AS x))")
    # an if in bound position stays a computation
    assert a_rule(parse("(let ((x (if y 1 2))) x)")) is RuleName.TLetBind


def test_non_translatable_positions():
    with pytest.raises(SiteError):
        a_reduce(parse("(+ 1 2)"))
    with pytest.raises(SiteError):
        a_reduce(parse("(AS (f 1))"), RuleName.ALift)


# -- boundaries ----------------------------------------------------------------


def test_cancellations():
    c = Configuration(EMPTY, SA(AS(Var("x"))), SOURCE)
    assert step(c, RuleName.CancelSA_AS).term == Var("x")
    c = Configuration(EMPTY, parse("(AS (SA (let ((y (+ 1 2))) y)))"), TARGET)
    assert step(c, RuleName.CancelAS_SA).term == parse("(let ((y (+ 1 2))) y)")


def test_cancellation_under_a_context():
    c = Configuration(EMPTY, parse("(+ 1 (SA (AS 2)))"), SOURCE)
    assert step(c, RuleName.CancelSA_AS, [1]).term == parse("(+ 1 2)")


def test_sa_of_values():
    c = Configuration(EMPTY, SA(Int(5)), SOURCE)
    assert step(c, RuleName.SAValConst).term == Int(5)
    c = Configuration(Heap((Cell("box", ((Int(1), TARGET),)),)), SA(Loc(0)), SOURCE)
    assert step(c, RuleName.SAValConst).term == Loc(0)
    c = Configuration(EMPTY, parse("(SA (lambda (x) x))"), SOURCE)
    assert step(c, RuleName.SAValLam).term == parse("(lambda (x) (SA x))")


# -- enumeration and stepping ----------------------------------------------------


def test_pure_source_has_one_site():
    got = sites("(+ 1 2)", SOURCE)
    assert [(s.path, s.rule) for s in got] == [((), RuleName.SrcStep)]


def test_translated_value_site():
    assert [(s.path, s.rule) for s in sites("(AS 5)")] == [((), RuleName.TValConst)]


def test_jit_choice_point():
    got = {(s.path, s.rule) for s in sites("(AS (+ 1 (+ 2 3)))")}
    assert got == {((0, 1), RuleName.SrcStep), ((), RuleName.ALift)}


def test_sites_are_listed_in_path_order():
    got = sites("(let ((x (AS (f 1)))) (lambda (y) (AS (g y))))")
    assert [s.path for s in got] == sorted(s.path for s in got)
    assert any(s.binders == ("x", "y") for s in got)


def test_evaluation_inside_a_boundary():
    c = Configuration(EMPTY, parse("(AS (+ 1 2))"), TARGET)
    assert step(c, RuleName.SrcStep, [0]).term == parse("(AS 3)")


def test_translate_then_run_reaches_same_value():
    c = Configuration(EMPTY, parse("(AS (+ 1 2))"), TARGET)
    c = step(c, RuleName.TCompStruct)
    while enumerate_redexes(c):
        c = ml_step(c, enumerate_redexes(c)[0])
    assert c.term == Int(3)


def test_no_evaluation_under_binders():
    got = sites("(lambda (x) (AS (+ 1 2)))")
    assert all(s.rule not in (RuleName.SrcStep, RuleName.TgtStep) for s in got)


def test_target_reads_source_closure_through_a_boundary():
    heap = Heap((Cell("box", ((parse("(lambda (x) x)"), SOURCE),)),))
    c = Configuration(heap, Let("f", Op("unbox", (Loc(0),)), Var("f")), TARGET)
    c = step(c, RuleName.TgtStep)
    assert c.term.bound == AS(parse("(lambda (x) x)"))


def test_find_eval_reports_blocked_translation():
    status, path, lang = find_eval(parse("(AS 5)"), TARGET)
    assert status == "blocked"


def test_stale_sites_are_rejected():
    c = Configuration(EMPTY, parse("(AS (+ 1 (+ 2 3)))"), TARGET)
    s = enumerate_redexes(c)[0]
    moved = ml_step(c, s)
    with pytest.raises(SiteError):
        ml_step(moved, s)


def test_mutation_context_restores():
    with mutated(Mutation.JOINIF_SWAP):
        assert active_mutation() is Mutation.JOINIF_SWAP
        assert translate("(AS (+ 1 (if x 2 3)))") == parse("(AS (if x (+ 1 3) (+ 1 2)))")
    assert active_mutation() is Mutation.NONE


def test_lift_freshness_mutation_captures():
    with mutated(Mutation.LIFT_NOT_FRESH):
        got = translate("(AS (+ t (f 1)))")
    assert got == parse("(let ((t (AS (f 1)))) (AS (+ t t)))")


def test_skip_boundary_mutation_leaves_source_in_target():
    with mutated(Mutation.TCOMP_SKIP_BOUNDARY):
        got = translate("(AS (if x (+ 1 (+ 2 3)) 4))")
    assert got.then == parse("(+ 1 (+ 2 3))")
