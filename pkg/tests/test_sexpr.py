import pytest

from mlc.sexpr import ArityError, ParseError, ScopeError, parse, parse_program
from mlc.terms import AS, SA, Int, Lam, Let, Op, Var, show


def test_primitive_application():
    assert parse("(+ 1 2)") == Op("+", (Int(1), Int(2)))


def test_identity_function():
    assert parse("(lambda (x) x)") == Lam("x", Var("x"))


def test_nested_boundaries():
    assert parse("(AS (SA 5))") == AS(SA(Int(5)))


def test_printing():
    assert show(Lam("x", Var("x"))) == "(lambda (x) x)"
    assert show(AS(Int(5))) == "(AS 5)"
    assert show(Let("x", Op("+", (Int(1), Int(2))), Var("x"))) == "(let ((x (+ 1 2))) x)"


def test_comments_and_whitespace():
    assert parse("; leading\n(+ 1 ; inline\n 2)") == parse("(+ 1 2)")


def test_negative_integers():
    assert parse("-3") == Int(-3)


@pytest.mark.parametrize("text", ["(+ 1", ")", "(+ 1 2))", "", "(1 2) 3", "(lambda x x)",
                                  "(let (x 1) x)", "(if 1 2)", "()"])
def test_malformed_input(text):
    with pytest.raises(ParseError):
        parse(text)


def test_error_position():
    with pytest.raises(ParseError) as e:
        parse("(+ 1\n  (car 1 2))")
    assert e.value.line == 2


def test_arity_errors_are_parse_errors():
    with pytest.raises(ArityError):
        parse("(box 1 2)")
    with pytest.raises(ArityError):
        parse("(f 1 2)")


def test_keywords_cannot_be_bound():
    with pytest.raises(ParseError):
        parse("(lambda (if) 1)")


def test_locations_are_not_source_syntax():
    with pytest.raises(ParseError):
        parse("#l0")


def test_programs_must_be_closed():
    with pytest.raises(ScopeError):
        parse_program("(+ 1 y)")
    assert parse_program("(let ((y 1)) (+ 1 y))") is not None


def test_programs_may_not_use_generated_names():
    with pytest.raises(ParseError):
        parse_program("(let ((t%0 1)) t%0)")
    assert parse("(let ((t%0 1)) t%0)") == Let("t%0", Int(1), Var("t%0"))
