"""Exact partial derivatives of expression trees."""

from __future__ import annotations

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
    add,
    cos,
    div,
    mul,
    neg,
    power,
    sin,
)


def differentiate(e: Expr, var: str) -> Expr:
    """Partial derivative of ``e`` with respect to the symbol named ``var``.

    Every other symbol, parameters included, is held constant.
    """
    memo: dict[Expr, Expr] = {}

    def d(node: Expr) -> Expr:
        hit = memo.get(node)
        if hit is not None:
            return hit
        out = _d(node)
        memo[node] = out
        return out

    def _d(node: Expr) -> Expr:
        if isinstance(node, Const):
            return ZERO
        if isinstance(node, Sym):
            return ONE if node.name == var else ZERO
        if isinstance(node, Add):
            return add(*(d(a) for a in node.args))
        if isinstance(node, Mul):
            terms = []
            for i, a in enumerate(node.args):
                da = d(a)
                if isinstance(da, Const) and da.value == 0:
                    continue
                terms.append(mul(*node.args[:i], da, *node.args[i + 1 :]))
            return add(*terms)
        if isinstance(node, Pow):
            db = d(node.base)
            if isinstance(db, Const) and db.value == 0:
                return ZERO
            return mul(Const(node.exp), power(node.base, node.exp - 1), db)
        if isinstance(node, Div):
            dn, dd = d(node.num), d(node.den)
            if isinstance(dd, Const) and dd.value == 0:
                return div(dn, node.den)
            return div(
                add(mul(dn, node.den), neg(mul(node.num, dd))),
                power(node.den, 2),
            )
        if isinstance(node, Func):
            da = d(node.arg)
            if isinstance(da, Const) and da.value == 0:
                return ZERO
            if node.head == "exp":
                return mul(node, da)
            if node.head == "ln":
                return div(da, node.arg)
            if node.head == "sin":
                return mul(cos(node.arg), da)
            if node.head == "cos":
                return neg(mul(sin(node.arg), da))
        raise TypeError(node)  # pragma: no cover

    return d(e)
