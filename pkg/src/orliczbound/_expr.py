"""Evaluate small arithmetic expressions over coordinate arrays.

Only literals, the coordinate names ``x1 .. xn`` (aliases ``x, y, z``),
arithmetic, comparisons and a fixed set of numpy functions are allowed.
"""
from __future__ import annotations

import ast
import math
from typing import Callable

import numpy as np

__all__ = ["ExpressionError", "compile_expression"]

_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
    "sqrt": np.sqrt, "abs": np.abs, "tanh": np.tanh, "arctan": np.arctan,
    "where": np.where, "minimum": np.minimum, "maximum": np.maximum,
    "sign": np.sign, "hypot": np.hypot,
}
_CONSTS = {"pi": math.pi, "e": math.e}
_ALIASES = {"x": 0, "y": 1, "z": 2}

_ALLOWED = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Compare, ast.Call, ast.Name, ast.Load,
    ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.Mod, ast.FloorDiv,
    ast.USub, ast.UAdd, ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Eq, ast.NotEq,
    ast.BitAnd, ast.BitOr,
)


class ExpressionError(ValueError):
    pass


def _coord_index(name: str, n: int):
    if name in _ALIASES:
        i = _ALIASES[name]
    elif name.startswith("x") and name[1:].isdigit():
        i = int(name[1:]) - 1
    else:
        return None
    if not 0 <= i < n:
        raise ExpressionError(f"coordinate {name!r} out of range for n = {n}")
    return i


def compile_expression(src: str, n: int) -> Callable[[np.ndarray], np.ndarray]:
    """Return ``f(points) -> values`` for ``points`` of shape ``(N, n)``."""
    try:
        tree = ast.parse(str(src), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {src!r}: {exc.msg}") from None
    names = {}
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise ExpressionError(f"{type(node).__name__} is not allowed in {src!r}")
        if isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name) and node.func.id in _FUNCS) or node.keywords:
                raise ExpressionError(f"only plain calls of {sorted(_FUNCS)} are allowed")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ExpressionError(f"constant {node.value!r} is not a number")
        if isinstance(node, ast.Name) and node.id not in _FUNCS:
            i = _coord_index(node.id, n)
            if i is None and node.id not in _CONSTS:
                raise ExpressionError(f"unknown name {node.id!r} in {src!r}")
            names[node.id] = i
    code = compile(tree, "<expression>", "eval")

    def f(points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        env = dict(_FUNCS)
        env.update(_CONSTS)
        for name, i in names.items():
            if i is not None:
                env[name] = pts[:, i]
        out = eval(code, {"__builtins__": {}}, env)
        return np.broadcast_to(np.asarray(out, dtype=float), (pts.shape[0],)).copy()

    return f
