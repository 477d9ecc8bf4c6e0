import pytest

from zforge.errors import FormulaSyntaxError, MissingVariable, MonotoneViolation
from zforge.formula import (
    And,
    Mode,
    Nand,
    Not,
    Or,
    Var,
    Xor,
    enumerate_formulas,
    evaluate_formula,
    formula_variables,
    is_monotone,
    parse_formula,
    to_text,
)


def test_two_ands_under_an_or():
    assert parse_formula("(x1 AND x2) OR (x3 AND x4)") == Or(
        And(Var("x1"), Var("x2")), And(Var("x3"), Var("x4"))
    )


def test_precedence_and_associativity():
    assert parse_formula("a OR b AND c") == Or(Var("a"), And(Var("b"), Var("c")))
    assert parse_formula("a AND b AND c") == And(And(Var("a"), Var("b")), Var("c"))
    assert parse_formula("NOT a AND b", Mode.DUAL_RAIL) == And(Not(Var("a")), Var("b"))
    assert parse_formula("a XOR b NAND c", Mode.DUAL_RAIL) == Xor(Var("a"), Nand(Var("b"), Var("c")))
    assert parse_formula("NOT NOT a", Mode.DUAL_RAIL) == Not(Not(Var("a")))


def test_keywords_are_case_insensitive_and_identifiers_may_contain_them():
    assert parse_formula("x and y Or z") == Or(And(Var("x"), Var("y")), Var("z"))
    assert parse_formula("ANDROID and order") == And(Var("ANDROID"), Var("order"))


def test_multiline_input():
    assert parse_formula("(a AND b)\n  OR c\n") == Or(And(Var("a"), Var("b")), Var("c"))


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("(x1 AND x2", 1, 11),
        ("(a AND b)\nc", 2, 1),
        ("", 1, 1),
        ("x1 x2", 1, 4),
    ],
)
def test_syntax_errors_report_position(text, line, column):
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula(text)
    assert info.value.line == line
    assert info.value.column == column


@pytest.mark.parametrize("text, operator", [("NOT x1", "NOT"), ("x1 XOR x2", "XOR"), ("a AND (b NAND c)", "NAND")])
def test_monotone_mode_rejects_negation(text, operator):
    with pytest.raises(MonotoneViolation) as info:
        parse_formula(text, Mode.MONOTONE)
    assert info.value.operator == operator
    assert parse_formula(text, Mode.DUAL_RAIL)


def test_monotone_violation_position():
    with pytest.raises(MonotoneViolation) as info:
        parse_formula("a AND\n  NOT b")
    assert (info.value.line, info.value.column) == (2, 3)


def test_variables_in_first_occurrence_order():
    assert formula_variables(parse_formula("(b AND a) OR (b AND c)")) == ("b", "a", "c")


def test_evaluation():
    ast = parse_formula("(x1 AND x2) XOR NOT x3", Mode.DUAL_RAIL)
    assert evaluate_formula(ast, {"x1": 1, "x2": 1, "x3": 1}) == 1
    assert evaluate_formula(ast, {"x1": 1, "x2": 1, "x3": 0}) == 0
    assert evaluate_formula(Nand(Var("a"), Var("b")), {"a": 1, "b": 1}) == 0
    with pytest.raises(MissingVariable):
        evaluate_formula(ast, {"x1": 1})


@pytest.mark.parametrize(
    "text",
    ["a", "NOT (a AND b) OR c", "a AND (b AND c)", "(a OR b) XOR (c NAND NOT d)", "NOT NOT a"],
)
def test_text_rendering_parses_back(text):
    ast = parse_formula(text, Mode.DUAL_RAIL)
    assert parse_formula(to_text(ast), Mode.DUAL_RAIL) == ast


def test_enumeration_counts():
    formulas = list(enumerate_formulas(4, 3))
    assert len(formulas) == 1 + 4 + 40 + 600
    assert len(set(formulas)) == len(formulas)
    assert all(is_monotone(f) for f in formulas)
    assert all(len(formula_variables(f)) <= 4 for f in formulas)
    assert Or(And(Var("x1"), Var("x2")), And(Var("x3"), Var("x4"))) in formulas


def test_enumeration_uses_one_name_per_renaming():
    formulas = list(enumerate_formulas(2, 1))
    assert formulas == [
        Var("x1"),
        And(Var("x1"), Var("x1")),
        Or(Var("x1"), Var("x1")),
        And(Var("x1"), Var("x2")),
        Or(Var("x1"), Var("x2")),
    ]


def test_mode_names():
    assert Mode.parse("dual-rail") is Mode.DUAL_RAIL
    assert Mode.parse("Monotone") is Mode.MONOTONE


@pytest.mark.parametrize("text", ["x1 AND", "AND x1", "x1 AND AND x2", "(x1)) ", "x1 OR ()"])
def test_malformed_formulas(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text)
