"""Tiny safe evaluator for the arithmetic text grammar shared by all modules.

The grammar is ordinary infix arithmetic over names and integer literals with
``+ - * / ^`` (``**`` is accepted too).  Evaluation is delegated to caller
supplied objects, so the same parser builds scalars, commutative polynomials
or noncommutative words depending on what the name resolver returns.
"""

from __future__ import annotations

import ast
from typing import Any, Callable


class ParseError(ValueError):
    pass


def evaluate(text: str, resolve: Callable[[str], Any], lift: Callable[[int], Any]) -> Any:
    """Parse ``text`` and evaluate it with names from ``resolve``."""
    src = text.strip().replace("^", "**")
    if not src:
        raise ParseError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    return _walk(tree.body, resolve, lift, text)


def _walk(node: ast.AST, resolve, lift, text: str) -> Any:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return lift(node.value)
    if isinstance(node, ast.Name):
        return resolve(node.id)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _walk(node.operand, resolve, lift, text)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp):
        left = _walk(node.left, resolve, lift, text)
        if isinstance(node.op, ast.Pow):
            exp = _int_exponent(node.right, text)
            return left**exp
        right = _walk(node.right, resolve, lift, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return left / right
    raise ParseError(f"unsupported syntax in {text!r}")


def _int_exponent(node: ast.AST, text: str) -> int:
    sign = 1
    while isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        if isinstance(node.op, ast.USub):
            sign = -sign
        node = node.operand
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return sign * node.value
    raise ParseError(f"exponent must be an integer literal in {text!r}")
