import itertools
import random

import pytest

from tsbdd.formula import (
    FALSE,
    TRUE,
    And,
    FormulaError,
    Iff,
    Implies,
    Ite,
    Not,
    Or,
    Var,
    Xor,
    parse_formula,
)

from conftest import random_formula


def all_assignments(names):
    for bits in itertools.product((0, 1), repeat=len(names)):
        yield dict(zip(names, bits))


def test_constants_and_variables():
    assert TRUE.evaluate({})
    assert not FALSE.evaluate({})
    x = Var("x")
    assert x.evaluate({"x": 1})
    assert not x.evaluate({"x": 0})


def test_operator_overloads_match_semantics():
    a, b = Var("a"), Var("b")
    for env in all_assignments(["a", "b"]):
        assert (a & b).evaluate(env) == (env["a"] and env["b"])
        assert (a | b).evaluate(env) == (env["a"] or env["b"])
        assert (a ^ b).evaluate(env) == (env["a"] != env["b"])
        assert (~a).evaluate(env) == (not env["a"])
        assert a.implies(b).evaluate(env) == ((not env["a"]) or env["b"])
        assert a.iff(b).evaluate(env) == (env["a"] == env["b"])


def test_nary_xor_is_parity():
    f = Xor((Var("a"), Var("b"), Var("c")))
    for env in all_assignments(["a", "b", "c"]):
        assert f.evaluate(env) == ((env["a"] + env["b"] + env["c"]) % 2 == 1)


def test_ite():
    f = Ite(Var("c"), Var("t"), Var("e"))
    for env in all_assignments(["c", "t", "e"]):
        assert f.evaluate(env) == (env["t"] if env["c"] else env["e"])


def test_variables_collects_all_leaves():
    f = parse_formula("(a & b) | ite(c, d, !a)")
    assert f.variables() == {"a", "b", "c", "d"}


def test_parse_precedence():
    # ! binds tighter than &, & than ^, ^ than |, | than =>, => than <=>
    f = parse_formula("!a & b ^ c | d => e <=> f")
    g = Iff(Implies(Or((Xor((And((Not(Var("a")), Var("b"))), Var("c"))), Var("d"))), Var("e")), Var("f"))
    names = ["a", "b", "c", "d", "e", "f"]
    for env in all_assignments(names):
        assert f.evaluate(env) == g.evaluate(env)


def test_parse_implication_right_associative():
    f = parse_formula("a => b => c")
    g = Implies(Var("a"), Implies(Var("b"), Var("c")))
    for env in all_assignments(["a", "b", "c"]):
        assert f.evaluate(env) == g.evaluate(env)


def test_parse_constants_and_parens():
    assert parse_formula("1").evaluate({})
    assert not parse_formula("0").evaluate({})
    f = parse_formula("(a | b) & (a | !b)")
    assert f.evaluate({"a": 1, "b": 0})
    assert not f.evaluate({"a": 0, "b": 0})


def test_parse_ite_call():
    f = parse_formula("ite(a, b, c)")
    assert isinstance(f, Ite)
    assert f.evaluate({"a": 0, "b": 0, "c": 1})


@pytest.mark.parametrize(
    "bad",
    ["", "a &", "(a", "a b", "ite(a, b)", "a ? b", "a <=> ", "&a", "ite(a b c)"],
)
def test_parse_errors(bad):
    with pytest.raises(FormulaError):
        parse_formula(bad)


def test_parser_round_trip_against_ast_semantics():
    # textual fragments with known ASTs
    cases = [
        ("a & b & c", And((And((Var("a"), Var("b"))), Var("c")))),
        ("a ^ b ^ c", Xor((Xor((Var("a"), Var("b"))), Var("c")))),
        ("!(a | b)", Not(Or((Var("a"), Var("b"))))),
    ]
    for text, ast in cases:
        parsed = parse_formula(text)
        for env in all_assignments(["a", "b", "c"]):
            assert parsed.evaluate(env) == ast.evaluate(env), text


def test_random_formula_fixture_is_deterministic():
    names = ["p", "q", "r"]
    f = random_formula(random.Random(5), names, 4)
    g = random_formula(random.Random(5), names, 4)
    for env in all_assignments(names):
        assert f.evaluate(env) == g.evaluate(env)
