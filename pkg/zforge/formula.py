"""Boolean formula AST, the text grammar for it, evaluation and enumeration.

Grammar, loosest binding first: OR / XOR, then AND / NAND, then prefix NOT. Binary
operators associate to the left. Keywords are case-insensitive; variables are
identifiers that are not keywords.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import pyparsing as pp

from zforge.errors import FormulaSyntaxError, MissingVariable, MonotoneViolation


class Mode(str, enum.Enum):
    MONOTONE = "monotone"
    DUAL_RAIL = "dual_rail"

    @classmethod
    def parse(cls, text: str) -> Mode:
        return cls(text.strip().lower().replace("-", "_"))


class Formula:
    """Base class of every AST node. `position` is the source offset, ignored by equality."""

    operator: str = ""
    monotone: bool = True


@dataclass(frozen=True)
class Var(Formula):
    name: str
    position: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Not(Formula):
    child: Formula
    position: int = field(default=0, compare=False, repr=False)

    operator = "NOT"
    monotone = False


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula
    position: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class And(_Binary):
    operator = "AND"


@dataclass(frozen=True)
class Or(_Binary):
    operator = "OR"


@dataclass(frozen=True)
class Nand(_Binary):
    operator = "NAND"
    monotone = False


@dataclass(frozen=True)
class Xor(_Binary):
    operator = "XOR"
    monotone = False


BINARY = {"AND": And, "OR": Or, "NAND": Nand, "XOR": Xor}
KEYWORDS = ("AND", "OR", "NOT", "NAND", "XOR")


@dataclass(frozen=True)
class _Token:
    keyword: str
    position: int


def _operator(keyword: str) -> pp.ParserElement:
    return pp.CaselessKeyword(keyword).set_parse_action(lambda s, loc, toks: _Token(toks[0], loc))


def _fold(s, loc, toks):
    items = list(toks)
    node = items[0]
    for token, right in zip(items[1::2], items[2::2]):
        node = BINARY[token.keyword](node, right, position=token.position)
    return node


def _build_grammar() -> pp.ParserElement:
    reserved = pp.MatchFirst([pp.CaselessKeyword(k) for k in KEYWORDS])
    identifier = pp.Word(pp.alphas + "_", pp.alphanums + "_")
    variable = (~reserved + identifier).set_parse_action(lambda s, loc, toks: Var(toks[0], position=loc))

    expression = pp.Forward()
    factor = pp.Forward()
    negation = (_operator("NOT") + factor).set_parse_action(
        lambda s, loc, toks: Not(toks[1], position=toks[0].position)
    )
    group = pp.Suppress("(") + expression + pp.Suppress(")")
    factor <<= negation | variable | group
    term = (factor + pp.ZeroOrMore((_operator("AND") | _operator("NAND")) + factor)).set_parse_action(_fold)
    expression <<= (term + pp.ZeroOrMore((_operator("OR") | _operator("XOR")) + term)).set_parse_action(_fold)
    return expression


_GRAMMAR = _build_grammar()


def _walk(node: Formula) -> Iterator[Formula]:
    yield node
    if isinstance(node, Not):
        yield from _walk(node.child)
    elif isinstance(node, _Binary):
        yield from _walk(node.left)
        yield from _walk(node.right)


def parse_formula(text: str, mode: Mode = Mode.MONOTONE) -> Formula:
    """ Parse `text` into an AST.

    Raises FormulaSyntaxError with the line and column of the first offending
    character, or MonotoneViolation when a NOT/NAND/XOR appears in monotone mode.
    """
    try:
        ast = _GRAMMAR.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as error:
        raise FormulaSyntaxError(error.msg, error.lineno, error.col, error.loc) from None

    if Mode(mode) is Mode.MONOTONE:
        for node in _walk(ast):
            if not node.monotone:
                raise MonotoneViolation(
                    node.operator, pp.lineno(node.position, text), pp.col(node.position, text)
                )
    return ast


def formula_variables(ast: Formula) -> Tuple[str, ...]:
    """Variable names in order of first occurrence, left to right."""
    names: Dict[str, None] = {}
    for node in _walk(ast):
        if isinstance(node, Var):
            names.setdefault(node.name)
    return tuple(names)


def is_monotone(ast: Formula) -> bool:
    return all(node.monotone for node in _walk(ast))


def evaluate_formula(ast: Formula, assignment: Mapping[str, int]) -> int:
    if isinstance(ast, Var):
        try:
            return int(bool(assignment[ast.name]))
        except KeyError:
            raise MissingVariable(f"no value for variable {ast.name!r}") from None
    if isinstance(ast, Not):
        return 1 - evaluate_formula(ast.child, assignment)

    left = evaluate_formula(ast.left, assignment)
    right = evaluate_formula(ast.right, assignment)
    if isinstance(ast, And):
        return left & right
    if isinstance(ast, Or):
        return left | right
    if isinstance(ast, Nand):
        return 1 - (left & right)
    return left ^ right


def to_text(ast: Formula) -> str:
    """Render with every binary subterm parenthesized; parses back to an equal AST."""
    def wrapped(node: Formula) -> str:
        return f"({to_text(node)})" if isinstance(node, _Binary) else to_text(node)

    if isinstance(ast, Var):
        return ast.name
    if isinstance(ast, Not):
        return f"NOT {wrapped(ast.child)}"
    return f"{wrapped(ast.left)} {ast.operator} {wrapped(ast.right)}"


def _shapes(operators: int) -> Iterator[Optional[tuple]]:
    if operators == 0:
        yield None
        return
    for left in range(operators):
        for l_shape in _shapes(left):
            for r_shape in _shapes(operators - 1 - left):
                yield (l_shape, r_shape)


def _labelings(leaves: int, variables: int) -> Iterator[Tuple[int, ...]]:
    """Restricted growth strings: each leaf uses a seen variable or the next new one."""
    def extend(prefix: List[int], top: int) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == leaves:
            yield tuple(prefix)
            return
        for label in range(min(top + 2, variables)):
            yield from extend(prefix + [label], max(top, label))

    yield from extend([], -1)


def _realize(shape, labels: Iterator[int], ops: Iterator[str]) -> Formula:
    if shape is None:
        return Var(f"x{next(labels) + 1}")
    op = next(ops)
    left = _realize(shape[0], labels, ops)
    right = _realize(shape[1], labels, ops)
    return BINARY[op](left, right)


def enumerate_formulas(
    max_variables: int = 4,
    max_operators: int = 3,
    operators: Sequence[str] = ("AND", "OR"),
) -> Iterator[Formula]:
    """ Every formula tree over x1..x{max_variables} with at most `max_operators` binary
    operators, one representative per renaming of variables.
    """
    for count in range(max_operators + 1):
        for shape in _shapes(count):
            for labels in _labelings(count + 1, max_variables):
                for ops in product(operators, repeat=count):
                    yield _realize(shape, iter(labels), iter(ops))
