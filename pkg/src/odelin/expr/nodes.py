"""Immutable expression trees.

Nodes are hashable and compare structurally.  Two families of constructors
exist: the raw node classes, which keep whatever shape they are given (the
parser uses these so a parse tree mirrors the text), and the lower-case
smart constructors (:func:`add`, :func:`mul`, ...) which fold constants and
drop neutral elements.  Arithmetic operators on :class:`Expr` go through the
smart constructors.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterator, Mapping

X = "x"
Y = "y"
YP = "y'"
YPP = "y''"

KERNEL_HEADS = ("exp", "ln", "sin", "cos")


class Expr:
    __slots__ = ("_hash",)

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        return hash(self) == hash(other) and self._key() == other._key()

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
            return h

    def __setattr__(self, name, value):
        raise AttributeError("Expr nodes are immutable")

    @property
    def children(self) -> tuple["Expr", ...]:
        return ()

    # arithmetic goes through the simplifying constructors
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n: int):
        return power(self, n)

    def __str__(self) -> str:
        from .printer import render

        return render(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self)!r})"


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value))

    def _key(self):
        return (self.value.numerator, self.value.denominator)


class Sym(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def _key(self):
        return (self.name,)


class Add(Expr):
    __slots__ = ("args",)

    def __init__(self, args):
        object.__setattr__(self, "args", tuple(args))

    def _key(self):
        return self.args

    @property
    def children(self):
        return self.args


class Mul(Expr):
    __slots__ = ("args",)

    def __init__(self, args):
        object.__setattr__(self, "args", tuple(args))

    def _key(self):
        return self.args

    @property
    def children(self):
        return self.args


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: int):
        if not isinstance(exp, int):
            raise TypeError("only integer exponents are supported")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", exp)

    def _key(self):
        return (self.base, self.exp)

    @property
    def children(self):
        return (self.base,)


class Div(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num: Expr, den: Expr):
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def _key(self):
        return (self.num, self.den)

    @property
    def children(self):
        return (self.num, self.den)


class Func(Expr):
    __slots__ = ("head", "arg")

    def __init__(self, head: str, arg: Expr):
        if head not in KERNEL_HEADS:
            raise ValueError(f"unknown function {head!r}")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "arg", arg)

    def _key(self):
        return (self.head, self.arg)

    @property
    def children(self):
        return (self.arg,)


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Rational)) and not isinstance(value, bool):
        return Const(value)
    if isinstance(value, str):
        return Sym(value)
    raise TypeError(f"cannot convert {value!r} to Expr")


def is_const(e: Expr, value=None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


# ---------------------------------------------------------------------------
# smart constructors


def add(*terms) -> Expr:
    flat: list[Expr] = []
    total = Fraction(0)
    for t in terms:
        t = as_expr(t)
        parts = t.args if isinstance(t, Add) else (t,)
        for p in parts:
            if isinstance(p, Const):
                total += p.value
            else:
                flat.append(p)
    if total:
        flat.append(Const(total))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(flat)


def mul(*factors) -> Expr:
    flat: list[Expr] = []
    coeff = Fraction(1)
    for f in factors:
        f = as_expr(f)
        parts = f.args if isinstance(f, Mul) else (f,)
        for p in parts:
            if isinstance(p, Const):
                coeff *= p.value
            else:
                flat.append(p)
    if coeff == 0:
        return ZERO
    if not flat:
        return Const(coeff)
    if coeff != 1:
        flat.insert(0, Const(coeff))
    if len(flat) == 1:
        return flat[0]
    return Mul(flat)


def neg(e: Expr) -> Expr:
    return mul(MINUS_ONE, e)


def sub(a, b) -> Expr:
    return add(a, neg(as_expr(b)))


def power(base, n: int) -> Expr:
    base = as_expr(base)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0 and n < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return Const(base.value**n)
    if isinstance(base, Pow):
        return power(base.base, base.exp * n)
    return Pow(base, n)


def div(a, b) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if isinstance(b, Const):
        if b.value == 0:
            raise ZeroDivisionError("division by the constant 0")
        return mul(Const(1 / b.value), a)
    if is_const(a, 0):
        return ZERO
    if a == b:
        return ONE
    return Div(a, b)


def func(head: str, arg) -> Expr:
    arg = as_expr(arg)
    if isinstance(arg, Const) and arg.value == 0:
        if head == "exp" or head == "cos":
            return ONE
        if head == "sin":
            return ZERO
    if head == "ln" and is_const(arg, 1):
        return ZERO
    return Func(head, arg)


def exp(arg) -> Expr:
    return func("exp", arg)


def ln(arg) -> Expr:
    return func("ln", arg)


def sin(arg) -> Expr:
    return func("sin", arg)


def cos(arg) -> Expr:
    return func("cos", arg)


x = Sym(X)
y = Sym(Y)
yp = Sym(YP)


# ---------------------------------------------------------------------------
# traversal


def walk(e: Expr) -> Iterator[Expr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def free_symbols(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Sym)}


def depends_on(e: Expr, name: str) -> bool:
    return any(isinstance(n, Sym) and n.name == name for n in walk(e))


def map_tree(e: Expr, leaf: Callable[[Expr], Expr | None]) -> Expr:
    """Rebuild ``e`` bottom-up with the smart constructors.

    ``leaf`` may return a replacement for any node (checked before recursing)
    or ``None`` to keep descending.
    """
    memo: dict[Expr, Expr] = {}

    def go(node: Expr) -> Expr:
        if node in memo:
            return memo[node]
        hit = leaf(node)
        if hit is not None:
            out = hit
        elif isinstance(node, (Const, Sym)):
            out = node
        elif isinstance(node, Add):
            out = add(*(go(a) for a in node.args))
        elif isinstance(node, Mul):
            out = mul(*(go(a) for a in node.args))
        elif isinstance(node, Pow):
            out = power(go(node.base), node.exp)
        elif isinstance(node, Div):
            out = div(go(node.num), go(node.den))
        elif isinstance(node, Func):
            out = func(node.head, go(node.arg))
        else:  # pragma: no cover
            raise TypeError(node)
        memo[node] = out
        return out

    return go(e)


def substitute(e: Expr, mapping: Mapping[str, object]) -> Expr:
    repl = {k: as_expr(v) for k, v in mapping.items()}

    def leaf(node):
        if isinstance(node, Sym):
            return repl.get(node.name)
        return None

    return map_tree(e, leaf)


def count_nodes(e: Expr) -> int:
    return sum(1 for _ in walk(e))
