"""Symbolic expression kernel: trees, parsing, derivatives, normal forms."""

from .diff import differentiate
from .nodes import (
    ONE,
    ZERO,
    Add,
    Const,
    Div,
    Expr,
    Func,
    Mul,
    Pow,
    Sym,
    X,
    Y,
    YP,
    YPP,
    as_expr,
    cos,
    depends_on,
    exp,
    free_symbols,
    ln,
    sin,
    substitute,
    x,
    y,
    yp,
)
from .normal import NormalForm, normalize, poly_coefficients, simplify
from .parser import parse_equation, parse_expr
from .printer import render

__all__ = [
    "Add", "Const", "Div", "Expr", "Func", "Mul", "NormalForm", "ONE", "Pow", "Sym",
    "X", "Y", "YP", "YPP", "ZERO", "as_expr", "cos", "depends_on", "differentiate",
    "exp", "free_symbols", "ln", "normalize", "parse_equation", "parse_expr",
    "poly_coefficients", "render", "simplify", "sin", "substitute", "x", "y", "yp",
]
