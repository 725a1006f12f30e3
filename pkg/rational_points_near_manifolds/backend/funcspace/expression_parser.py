"""This module implements the parser for manifold map expressions.

Grammar: identifiers x1..xn, rational literals (integers and decimals, kept exact), the binary operators
+ - * / ^ (also **), parentheses, and the functions exp, sin, cos and sqrt.
"""
import re

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor, parse_expr, rationalize, standard_transformations
)

from rational_points_near_manifolds.errors import ExpressionError

ALLOWED_FUNCTIONS = {
    "exp": sympy.exp,
    "sin": sympy.sin,
    "cos": sympy.cos,
    "sqrt": sympy.sqrt,
}

_TOKEN_PATTERN = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))")
_VARIABLE_PATTERN = re.compile(r"^x([1-9][0-9]*)$")
_TRANSFORMATIONS = standard_transformations + (convert_xor, rationalize)


def coordinate_symbols(arity):
    """Creates the coordinate symbols x1..xn.

    Args:
        arity: The number of coordinates n.

    Returns:
        The tuple of real sympy symbols.
    """
    return tuple(sympy.Symbol(f'x{i}', real=True) for i in range(1, arity + 1))


def _check_tokens(text, arity):
    """Validates that an expression string only uses grammar tokens.

    Args:
        text: The expression string.
        arity: The number of admissible coordinates.
    """
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN_PATTERN.match(text, pos)
        if match is None or match.end() == pos:
            raise ExpressionError(f'Unexpected character "{text[pos:].strip()[:1]}" in expression "{text}".')
        name = match.group("name")
        if name is not None and name not in ALLOWED_FUNCTIONS:
            var_match = _VARIABLE_PATTERN.match(name)
            if var_match is None:
                raise ExpressionError(f'Unknown identifier "{name}" in expression "{text}".')
            if int(var_match.group(1)) > arity:
                raise ExpressionError(f'Variable "{name}" exceeds the arity {arity} in expression "{text}".')
        pos = match.end()


def parse_expression(text, arity):
    """Parses an expression string of the manifold grammar into a sympy expression.

    Args:
        text: The expression string, e.g. "(x1^2 - x2^2)/2".
        arity: The number of coordinates n.

    Returns:
        The sympy expression with rational constants.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("Expression must be a non-empty string.")
    _check_tokens(text, arity)

    local_dict = {str(sym): sym for sym in coordinate_symbols(arity)}
    local_dict.update(ALLOWED_FUNCTIONS)
    try:
        expr = parse_expr(text, local_dict=local_dict, transformations=_TRANSFORMATIONS, evaluate=True)
    except (SyntaxError, TypeError, ValueError, ZeroDivisionError, sympy.SympifyError) as exc:
        raise ExpressionError(f'Expression "{text}" cannot be parsed: {exc}') from exc

    if not isinstance(expr, sympy.Expr):
        raise ExpressionError(f'Expression "{text}" does not denote a scalar.')
    if expr.has(sympy.zoo, sympy.nan, sympy.oo, -sympy.oo):
        raise ExpressionError(f'Expression "{text}" is undefined (division by zero).')
    return expr
