"""Equation front-end: lexing, infix-to-postfix conversion, numeral
normalization, and expression-tree construction.

The pipeline for one problem is
``strip_unknown -> tokenize -> to_postfix -> normalize -> build_tree``;
:func:`parse_equation` runs all five stages and annotates any failure with
the stage name and the offending record id.

Supported operators are the binary ``+ - * / ^``. Numerals that equal a
number mentioned in the problem text become variable leaves; every other
numeral becomes the shared constant placeholder, so two problems compare
equal exactly when they perform the same operations in the same order.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

from .errors import (
    EmptyInputError,
    ExpressionError,
    LeftoverOperandsError,
    MalformedExpressionError,
    MalformedNumberError,
    MismatchedParenthesesError,
    StackUnderflowError,
    UnknownCharacterError,
    UnsupportedEquationFormError,
)

OPERATOR_SYMBOLS = ("+", "-", "*", "/", "^")
CONSTANT_PLACEHOLDER = "<CONSTANT>"

# Relative tolerance for matching equation numerals against text numbers,
# with an absolute floor for values near zero.
REL_TOLERANCE = 1e-6
ABS_TOLERANCE = 1e-9

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}
_RIGHT_ASSOCIATIVE = frozenset("^")

_NUMBER_RUN = re.compile(r"[0-9.]+")
_VARIABLE_TOKEN = re.compile(r"(?:N|number)(\d+)")
_WORD_RUN = re.compile(r"[A-Za-z][A-Za-z0-9]*")
_LONE_UNKNOWN = re.compile(r"[A-Za-z]+")


class TokenKind(enum.Enum):
    NUMBER = "number"
    VARIABLE = "variable"
    OPERATOR = "operator"
    LPAREN = "lparen"
    RPAREN = "rparen"
    # Produced by normalize(), never by tokenize().
    CONSTANT = "constant"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    value: float | None = None      # NUMBER only
    op: str | None = None           # OPERATOR only
    var_index: int | None = None    # VARIABLE only

    @classmethod
    def number(cls, lexeme: str, value: float) -> "Token":
        return cls(TokenKind.NUMBER, lexeme, value=value)

    @classmethod
    def variable(cls, index: int, lexeme: str | None = None) -> "Token":
        return cls(TokenKind.VARIABLE, lexeme or f"N{index}", var_index=index)

    @classmethod
    def operator(cls, symbol: str) -> "Token":
        return cls(TokenKind.OPERATOR, symbol, op=symbol)

    @classmethod
    def constant(cls) -> "Token":
        return cls(TokenKind.CONSTANT, CONSTANT_PLACEHOLDER)

    @classmethod
    def lparen(cls) -> "Token":
        return cls(TokenKind.LPAREN, "(")

    @classmethod
    def rparen(cls) -> "Token":
        return cls(TokenKind.RPAREN, ")")


@dataclass(frozen=True)
class OperatorNode:
    symbol: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class VariableNode:
    index: int


@dataclass(frozen=True)
class ConstantNode:
    placeholder: str = CONSTANT_PLACEHOLDER


Node = Union[OperatorNode, VariableNode, ConstantNode]


@dataclass(frozen=True)
class ExprTree:
    root: Node

    def postorder(self) -> Iterator[Node]:
        return postorder(self.root)

    def operator_count(self) -> int:
        return sum(1 for n in self.postorder() if isinstance(n, OperatorNode))


def postorder(root: Node) -> Iterator[Node]:
    """Iterative postorder traversal (left, right, node)."""
    stack: list[tuple[Node, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, OperatorNode) and not expanded:
            stack.append((node, True))
            stack.append((node.right, False))
            stack.append((node.left, False))
        else:
            yield node


@dataclass
class NormalizationContext:
    """Ordered text numbers plus consumption flags for one normalization run."""

    text_numbers: Sequence[float]
    consumed: list[bool] = field(init=False)

    def __post_init__(self) -> None:
        self.consumed = [False] * len(self.text_numbers)


def values_close(a: float, b: float) -> bool:
    return abs(a - b) <= max(REL_TOLERANCE * max(abs(a), abs(b)), ABS_TOLERANCE)


def strip_unknown(equation: str) -> str:
    """Drop the lone-unknown side of an '=' equation.

    "x = 5 + 6" becomes "5 + 6"; equations without '=' pass through.
    Raises UnsupportedEquationForm when no single side is a lone unknown
    (both composite, both unknowns, or more than one '=').
    """
    if "=" not in equation:
        return equation
    parts = equation.split("=")
    if len(parts) != 2:
        raise UnsupportedEquationFormError(
            f"equation has {len(parts) - 1} '=' signs: {equation!r}")
    left, right = (p.strip() for p in parts)
    left_unknown = _is_lone_unknown(left)
    right_unknown = _is_lone_unknown(right)
    if left_unknown and not right_unknown:
        return right
    if right_unknown and not left_unknown:
        return left
    raise UnsupportedEquationFormError(
        f"cannot isolate a lone unknown in {equation!r}")


def _is_lone_unknown(side: str) -> bool:
    # Pure-letter token; N<k>/number<k> contain digits so they never qualify.
    return _LONE_UNKNOWN.fullmatch(side) is not None


def tokenize(equation: str) -> list[Token]:
    """Lex an equation body into tokens.

    Recognizes decimal numerals (a single leading minus folds into the
    numeral at expression start, after '(' or after an operator, when
    directly adjacent to the digits), variable tokens ``N<k>``/``number<k>``,
    the five operators, and parentheses. Whitespace is ignored. No syntax
    checking happens here; that is to_postfix's job.
    """
    if not equation.strip():
        raise EmptyInputError("empty equation")
    tokens: list[Token] = []
    i = 0
    n = len(equation)
    while i < n:
        ch = equation[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            tokens.append(Token.lparen())
            i += 1
            continue
        if ch == ")":
            tokens.append(Token.rparen())
            i += 1
            continue
        if (ch == "-" and _unary_position(tokens) and i + 1 < n
                and (equation[i + 1].isdigit() or equation[i + 1] == ".")):
            match = _NUMBER_RUN.match(equation, i + 1)
            assert match is not None
            tokens.append(_number_token("-" + match.group()))
            i = match.end()
            continue
        if ch in _PRECEDENCE:
            tokens.append(Token.operator(ch))
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            match = _NUMBER_RUN.match(equation, i)
            assert match is not None
            tokens.append(_number_token(match.group()))
            i = match.end()
            continue
        if ch.isalpha():
            match = _WORD_RUN.match(equation, i)
            assert match is not None
            word = match.group()
            var = _VARIABLE_TOKEN.fullmatch(word)
            if var is None:
                raise UnknownCharacterError(
                    f"unrecognized symbol {word!r} at position {i}")
            tokens.append(Token.variable(int(var.group(1)), lexeme=word))
            i = match.end()
            continue
        raise UnknownCharacterError(f"unexpected character {ch!r} at position {i}")
    return tokens


def _unary_position(tokens: list[Token]) -> bool:
    if not tokens:
        return True
    return tokens[-1].kind in (TokenKind.OPERATOR, TokenKind.LPAREN)


def _number_token(lexeme: str) -> Token:
    digits = lexeme.lstrip("-")
    if digits.count(".") > 1:
        raise MalformedNumberError(f"numeral {lexeme!r} has multiple decimal points")
    if not any(c.isdigit() for c in digits):
        raise MalformedNumberError(f"numeral {lexeme!r} has no digits")
    return Token.number(lexeme, float(lexeme))


def to_postfix(tokens: Sequence[Token]) -> list[Token]:
    """Shunting-yard conversion to postfix with syntax validation.

    Precedence ^ > {*, /} > {+, -}; all operators left-associative except
    the right-associative ^. The output carries no parenthesis tokens.
    """
    if not tokens:
        raise EmptyInputError("no tokens to convert")
    output: list[Token] = []
    stack: list[Token] = []
    expect_operand = True
    for tok in tokens:
        if tok.kind in (TokenKind.NUMBER, TokenKind.VARIABLE, TokenKind.CONSTANT):
            if not expect_operand:
                raise MalformedExpressionError(
                    f"operand {tok.lexeme!r} not preceded by an operator")
            output.append(tok)
            expect_operand = False
        elif tok.kind is TokenKind.LPAREN:
            if not expect_operand:
                raise MalformedExpressionError("'(' not preceded by an operator")
            stack.append(tok)
        elif tok.kind is TokenKind.RPAREN:
            if expect_operand:
                raise MalformedExpressionError(
                    "')' after an operator or empty parentheses")
            while stack and stack[-1].kind is not TokenKind.LPAREN:
                output.append(stack.pop())
            if not stack:
                raise MismatchedParenthesesError("unmatched ')'")
            stack.pop()
        else:  # operator
            if expect_operand:
                raise MalformedExpressionError(
                    f"operator {tok.op!r} is missing its left operand")
            while (stack and stack[-1].kind is TokenKind.OPERATOR
                   and (_PRECEDENCE[stack[-1].op] > _PRECEDENCE[tok.op]
                        or (_PRECEDENCE[stack[-1].op] == _PRECEDENCE[tok.op]
                            and tok.op not in _RIGHT_ASSOCIATIVE))):
                output.append(stack.pop())
            stack.append(tok)
            expect_operand = True
    if expect_operand:
        raise MalformedExpressionError("expression ends with a dangling operator")
    while stack:
        top = stack.pop()
        if top.kind is TokenKind.LPAREN:
            raise MismatchedParenthesesError("unmatched '('")
        output.append(top)
    return output


def normalize(tokens: Sequence[Token], ctx: NormalizationContext) -> list[Token]:
    """Replace numerals with variable or constant placeholder tokens.

    A number token that equals the first not-yet-consumed text number
    (scanned in text order, tolerance :data:`REL_TOLERANCE`) becomes that
    entry's variable and consumes it; unmatched numbers become the shared
    constant placeholder. Variable tokens pass through unchanged, so the
    operation is idempotent.
    """
    out: list[Token] = []
    for tok in tokens:
        if tok.kind is not TokenKind.NUMBER:
            out.append(tok)
            continue
        for idx, text_value in enumerate(ctx.text_numbers):
            if not ctx.consumed[idx] and values_close(tok.value, text_value):
                ctx.consumed[idx] = True
                out.append(Token.variable(idx))
                break
        else:
            out.append(Token.constant())
    return out


def build_tree(postfix: Sequence[Token]) -> ExprTree:
    """Stack construction of an expression tree from normalized postfix.

    Operands push leaves; each operator pops the right child first, then
    the left, and pushes the combined node. Exactly one node must remain.
    """
    if not postfix:
        raise EmptyInputError("empty postfix sequence")
    stack: list[Node] = []
    for tok in postfix:
        if tok.kind is TokenKind.VARIABLE:
            stack.append(VariableNode(tok.var_index))
        elif tok.kind is TokenKind.CONSTANT:
            stack.append(ConstantNode())
        elif tok.kind is TokenKind.OPERATOR:
            if len(stack) < 2:
                raise StackUnderflowError(
                    f"operator {tok.op!r} requires two operands")
            right = stack.pop()
            left = stack.pop()
            stack.append(OperatorNode(tok.op, left, right))
        else:
            raise MalformedExpressionError(
                f"token {tok.lexeme!r} is not valid in normalized postfix")
    if len(stack) != 1:
        raise LeftoverOperandsError(
            f"{len(stack)} nodes remain after construction; expected 1")
    return ExprTree(stack[0])


def tree_postfix(tree: ExprTree) -> list[Token]:
    """Emit the normalized postfix token sequence of a tree (inverse of
    build_tree up to variable lexemes)."""
    out: list[Token] = []
    for node in tree.postorder():
        if isinstance(node, OperatorNode):
            out.append(Token.operator(node.symbol))
        elif isinstance(node, VariableNode):
            out.append(Token.variable(node.index))
        else:
            out.append(Token.constant())
    return out


def postfix_text(tokens: Sequence[Token]) -> str:
    """Space-joined lexemes, e.g. ``"N0 N1 +"`` — the display form."""
    return " ".join(tok.lexeme for tok in tokens)


def parse_equation(equation: str, text_numbers: Sequence[float] = (),
                   *, record_id: str | None = None) -> ExprTree:
    """Run the full pipeline on one equation.

    Deterministic in (equation, text_numbers). Any stage failure is
    re-raised with ``stage`` and ``record_id`` attached.
    """
    stage = "strip_unknown"
    try:
        body = strip_unknown(equation)
        stage = "tokenize"
        tokens = tokenize(body)
        stage = "to_postfix"
        postfix = to_postfix(tokens)
        stage = "normalize"
        normalized = normalize(postfix, NormalizationContext(text_numbers))
        stage = "build_tree"
        return build_tree(normalized)
    except ExpressionError as err:
        if err.stage is None:
            err.stage = stage
        if err.record_id is None and record_id is not None:
            err.record_id = record_id
        raise
