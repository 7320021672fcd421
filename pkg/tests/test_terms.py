import pytest

from mlc.sexpr import parse
from mlc.terms import (AS, SA, SOURCE, TARGET, App, Int, Lam, Let, Loc, NameSupply,
                       SynClass, Var, alpha_eq, alpha_key, classify, free_vars,
                       has_boundary, replace_at, show, size, substitute, term_at)

ALL_SIX = {SynClass.SourceValue, SynClass.SourceExpr, SynClass.TargetValue,
           SynClass.TargetComp, SynClass.TargetExpr, SynClass.TargetRuntimeExpr}


def test_constant_belongs_to_every_plain_class():
    assert classify(Int(5)) == ALL_SIX


def test_nested_operand_is_source_only():
    assert classify(parse("(+ 1 (+ 2 3))")) == {SynClass.SourceExpr}


def test_let_of_application_is_anf():
    assert SynClass.TargetExpr in classify(parse("(let ((x (f y))) x)"))


def test_boundary_terms_are_never_static_target():
    got = classify(parse("(AS 5)"))
    assert SynClass.TargetRuntimeExpr in got
    assert not got & {SynClass.TargetValue, SynClass.TargetComp, SynClass.TargetExpr}


def test_sa_of_value_sits_in_source_grammar():
    assert SynClass.SourceExpr in classify(SA(Int(5)))


def test_substitute_variable():
    assert substitute(Var("x"), "x", Int(5)) == Int(5)


def test_substitute_respects_shadowing():
    lam = parse("(lambda (x) x)")
    assert substitute(lam, "x", Int(5)) == lam


def test_substitute_avoids_capture():
    got = substitute(parse("(lambda (y) x)"), "x", Var("y"))
    assert isinstance(got, Lam) and got.param != "y"
    assert got.body == Var("y")


def test_substitute_wraps_functions_crossing_into_source():
    # AS(x) puts x in source; a target lambda arriving there needs SA
    t = AS(Var("x"))
    got = substitute(t, "x", parse("(lambda (z) z)"), TARGET)
    assert got == AS(SA(parse("(lambda (z) z)")))


def test_substitute_shares_first_order_values_across_boundaries():
    assert substitute(AS(Var("x")), "x", Int(3), TARGET) == AS(Int(3))
    assert substitute(SA(Var("x")), "x", Loc(0), SOURCE) == SA(Loc(0))


@pytest.mark.parametrize("a,b,eq", [
    ("(lambda (x) x)", "(lambda (y) y)", True),
    ("(lambda (x) (lambda (y) x))", "(lambda (a) (lambda (b) b))", False),
    ("(let ((x (f 1))) x)", "(let ((t (f 1))) t)", True),
    ("(let ((x 1)) y)", "(let ((x 1)) z)", False),
])
def test_alpha_eq(a, b, eq):
    assert alpha_eq(parse(a), parse(b)) is eq


def test_alpha_key_renames_locations_through_map():
    assert alpha_key(Loc(9), {9: 0}) == alpha_key(Loc(0), {0: 0})


def test_paths_address_children():
    t = parse("(let ((x (+ 1 2))) (f x))")
    assert term_at(t, (0, 1)) == Int(2)
    assert show(replace_at(t, (1, 1), Int(7))) == "(let ((x (+ 1 2))) (f 7))"


def test_size_and_boundary_and_free_vars():
    t = parse("(lambda (x) (AS (f x)))")
    assert size(t) == 5
    assert has_boundary(t)
    assert free_vars(t) == {"f"}


def test_name_supply_starts_past_existing_suffixes():
    supply = NameSupply.after(parse("(let ((t%4 1)) t%4)"))
    assert supply.fresh("t") == "t%5"
    assert supply.fresh("t") == "t%6"


def test_show_round_trips_boundaries():
    t = App(AS(Lam("x", SA(Var("x")))), Int(1))
    assert parse(show(t)) == t
    assert show(Let("x", Int(1), Var("x"))) == "(let ((x 1)) x)"
