"""Tiny whitelisted arithmetic expressions for builtin test functions.

Exact mode accepts polynomials with rational coefficients only
(``+ - * /``, non-negative integer powers, variables, numeric literals);
float mode additionally allows non-integer powers and ``sin``, ``cos``, ``exp``.
Variables are ``x1, ..., xn`` (and ``x`` when n = 1). ``^`` means power.
"""

from __future__ import annotations

import ast
import math
import operator
from fractions import Fraction
from typing import Callable

from .scalars import EXACT, check_mode

_FLOAT_FUNCS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


class ExpressionError(ValueError):
    pass


def compile_function(text: str, n: int, mode: str) -> Callable:
    """Parse ``text`` into a callable ``f(point)``; raises ExpressionError on anything not whitelisted."""
    check_mode(mode)
    source = text.replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    names = {f"x{i}": i - 1 for i in range(1, n + 1)}
    if n == 1:
        names["x"] = 0
    exact = mode == EXACT

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            if exact:
                value = Fraction(ast.get_source_segment(source, node))
            else:
                value = float(node.value)
            return lambda x: value
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ExpressionError(f"unknown variable {node.id!r}")
            i = names[node.id]
            return lambda x: x[i]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            return (lambda x: -inner(x)) if isinstance(node.op, ast.USub) else inner
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            a, b = build(node.left), build(node.right)
            if exact and isinstance(node.op, ast.Div) and not _is_constant(node.right):
                raise ExpressionError("exact mode allows division by constants only (polynomials)")
            op = _BINOPS[type(node.op)]
            return lambda x: op(a(x), b(x))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            base = build(node.left)
            if exact:
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int) and node.right.value >= 0):
                    raise ExpressionError("exact mode allows only non-negative integer powers")
                k = node.right.value
                return lambda x: base(x) ** k
            expo = build(node.right)
            return lambda x: base(x) ** expo(x)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords and len(node.args) == 1:
            if exact:
                raise ExpressionError(f"function {node.func.id!r} is not polynomial; use --mode float")
            fn = _FLOAT_FUNCS.get(node.func.id)
            if fn is None:
                raise ExpressionError(f"unknown function {node.func.id!r}")
            arg = build(node.args[0])
            return lambda x: fn(arg(x))
        raise ExpressionError(f"unsupported syntax in {text!r}")

    f = build(tree)

    def evaluate(point):
        if len(point) != n:
            raise ExpressionError(f"function of {n} variables evaluated at a {len(point)}-vector")
        value = f(point)
        return Fraction(value) if exact else float(value)

    return evaluate


def _is_constant(node) -> bool:
    if isinstance(node, ast.Constant):
        return True
    if isinstance(node, ast.UnaryOp):
        return _is_constant(node.operand)
    if isinstance(node, ast.BinOp):
        return _is_constant(node.left) and _is_constant(node.right)
    return False
