"""Render expressions back into the input grammar.

The output re-parses to the same tree for anything the parser produces; the
subtraction shorthand is only used when the parser's negation rule rebuilds
the identical node.
"""

from __future__ import annotations

from fractions import Fraction

from .nodes import Add, Const, Div, Expr, Func, Mul, Pow, Sym


def _const(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _atomic(e: Expr) -> bool:
    if isinstance(e, (Sym, Func)):
        return True
    return isinstance(e, Const) and e.value.denominator == 1 and e.value >= 0


def _paren(s: str) -> str:
    return f"({s})"


def parser_negate(e: Expr) -> Expr:
    """Negation exactly as the parser applies it for unary and binary minus."""
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Mul):
        if e.args and isinstance(e.args[0], Const):
            return Mul((Const(-e.args[0].value),) + e.args[1:])
        return Mul((Const(-1),) + e.args)
    return Mul((Const(-1), e))


def _negated_for_sum(t: Expr) -> Expr | None:
    """Return ``u`` with parser_negate(u) == t if ``t`` reads well as ``- u``."""
    if isinstance(t, Const) and t.value < 0:
        return Const(-t.value)
    if isinstance(t, Mul) and t.args and isinstance(t.args[0], Const) and t.args[0].value < 0:
        c = t.args[0].value
        rest = t.args[1:]
        if not rest:
            return None
        if c != -1:
            cand: Expr = Mul((Const(-c),) + rest)
        elif len(rest) >= 2:
            cand = Mul(rest)
        elif not isinstance(rest[0], (Const, Mul)):
            cand = rest[0]
        else:
            return None
        if parser_negate(cand) == t:
            return cand
    return None


def render(e: Expr) -> str:
    if isinstance(e, Const):
        return _const(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Func):
        return f"{e.head}({render(e.arg)})"
    if isinstance(e, Pow):
        base = render(e.base)
        if not _atomic(e.base):
            base = _paren(base)
        return f"{base}^{e.exp}"
    if isinstance(e, Add):
        out = _sum_head(e.args[0])
        for t in e.args[1:]:
            u = _negated_for_sum(t)
            if u is not None:
                out += " - " + _sum_tail(u)
            else:
                out += " + " + _sum_tail(t)
        return out
    if isinstance(e, Mul):
        return _render_mul(e)
    if isinstance(e, Div):
        left = render(e.num)
        if isinstance(e.num, Add):
            left = _paren(left)
        elif (
            isinstance(e.num, Const)
            and e.num.value.denominator == 1
            and isinstance(e.den, Const)
            and e.den.value.denominator == 1
            and e.den.value >= 0
        ):
            # keep "2/3" from lexing as one rational literal
            left = _paren(left)
        right = render(e.den)
        if not (_atomic(e.den) or isinstance(e.den, Pow)):
            right = _paren(right)
        return f"{left}/{right}"
    raise TypeError(e)  # pragma: no cover


def _sum_head(t: Expr) -> str:
    return _paren(render(t)) if isinstance(t, Add) else render(t)


def _sum_tail(t: Expr) -> str:
    s = render(t)
    if isinstance(t, Add):
        return _paren(s)
    return s


def _render_mul(e: Mul) -> str:
    args = e.args
    if not args:
        return "1"
    first = args[0]
    parts: list[str] = []
    if (
        isinstance(first, Const)
        and first.value == -1
        and len(args) > 1
        and isinstance(args[1], (Sym, Func, Pow))
    ):
        # "-x^2*y" parses as Mul(-1, x^2, y)
        parts.append("-" + _mul_factor(args[1], leading=True))
        rest = args[2:]
    else:
        parts.append(_mul_factor(first, leading=True))
        rest = args[1:]
    for a in rest:
        parts.append(_mul_factor(a, leading=False))
    return "*".join(parts)


def _mul_factor(a: Expr, leading: bool) -> str:
    s = render(a)
    if isinstance(a, (Add, Mul)):
        return _paren(s)
    if isinstance(a, Div) and not leading:
        return _paren(s)
    if isinstance(a, Const) and a.value < 0 and not leading:
        return _paren(s)
    return s
