"""Canonical rational normal forms.

An expression is mapped to a reduced fraction ``numer/denom`` of polynomials
with rational coefficients in a set of indeterminates: the symbols it
mentions plus one indeterminate per distinct transcendental kernel.

Kernel rules:

* ``exp`` arguments are split into monomial "shapes" (a numerator monomial
  over the argument's denominator).  All exponentials whose argument shares a
  shape become integer powers of a single atom ``exp(g*shape)`` where ``g`` is
  the gcd of the rational coefficients seen for that shape, so
  ``exp(a)*exp(b) == exp(a+b)`` and ``exp(0) == 1`` hold exactly.
* ``ln``, ``sin`` and ``cos`` are opaque: same head and identical normalised
  argument means same indeterminate.  ``ln`` is not split over products
  unless ``split_ln=True`` is requested.

Polynomial arithmetic and gcds are delegated to sympy's sparse polynomial
rings; everything about which indeterminates exist and how kernels merge is
decided here.

Indeterminate order (most significant first, graded lex): x, y, y', y'',
parameters alphabetically, kernels sorted by canonical key.  The denominator
is monic with respect to that order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from sympy.polys.domains import QQ
from sympy.polys.fields import field as sp_field
from sympy.polys.orderings import grlex

from .nodes import (
    ONE,
    X,
    Y,
    YP,
    YPP,
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
    func,
    map_tree,
    mul,
    neg,
    power,
)

_SYMBOL_RANK = {X: 0, Y: 1, YP: 2, YPP: 3}

Monomial = tuple[int, ...]
Terms = tuple[tuple[Monomial, Fraction], ...]


@dataclass(frozen=True)
class Gen:
    """One indeterminate of a normal form."""

    kind: str  # "sym", "exp", "ln", "sin", "cos"
    key: str
    name: str = ""
    arg: Expr | None = dc_field(default=None, compare=False, hash=False)

    def to_expr(self) -> Expr:
        if self.kind == "sym":
            return Sym(self.name)
        return func(self.kind, self.arg)

    @property
    def is_kernel(self) -> bool:
        return self.kind != "sym"


def _sort_key(g: Gen):
    if g.kind == "sym":
        rank = _SYMBOL_RANK.get(g.name)
        if rank is not None:
            return (0, rank, "")
        return (1, 0, g.name)
    return (2, 0, g.key)


@dataclass(frozen=True)
class NormalForm:
    gens: tuple[Gen, ...]
    numer: Terms
    denom: Terms
    _num: object = dc_field(default=None, compare=False, hash=False, repr=False)
    _den: object = dc_field(default=None, compare=False, hash=False, repr=False)

    @property
    def is_zero(self) -> bool:
        return not self.numer

    def is_constant(self) -> bool:
        return all(not any(m) for m, _ in self.numer) and all(not any(m) for m, _ in self.denom)

    def constant_value(self) -> Fraction | None:
        if not self.is_constant():
            return None
        if not self.numer:
            return Fraction(0)
        return self.numer[0][1] / self.denom[0][1]

    def gen_index(self, name: str) -> int | None:
        for i, g in enumerate(self.gens):
            if g.kind == "sym" and g.name == name:
                return i
        return None

    def depends_on(self, name: str) -> bool:
        """True if the symbol occurs, directly or inside a kernel argument."""
        from .nodes import depends_on

        for g in self.gens:
            if g.kind == "sym" and g.name == name:
                return True
            if g.is_kernel and depends_on(g.arg, name):
                return True
        return False

    def kernels(self) -> list[Gen]:
        return [g for g in self.gens if g.is_kernel]

    def key(self) -> str:
        """Order-independent canonical string (used to identify kernels)."""
        return "(" + _poly_key(self.gens, self.numer) + ")/(" + _poly_key(self.gens, self.denom) + ")"

    def numer_expr(self) -> Expr:
        return _poly_expr(self.gens, self.numer)

    def denom_expr(self) -> Expr:
        return _poly_expr(self.gens, self.denom)

    def to_expr(self) -> Expr:
        num = self.numer_expr()
        if self.denom == (((0,) * len(self.gens), Fraction(1)),):
            return num
        den = self.denom_expr()
        if isinstance(num, Const) or not isinstance(den, Const):
            from .nodes import div

            return div(num, den)
        return mul(Const(1 / den.value), num)

    def to_display_expr(self) -> Expr:
        """Like to_expr, but with integer coefficients on both sides where possible."""
        from math import lcm

        if self.is_zero or self.denom == (((0,) * len(self.gens), Fraction(1)),):
            return self.to_expr()
        L = lcm(*(c.denominator for _, c in self.numer + self.denom))
        num = tuple((m, c * L) for m, c in self.numer)
        den = tuple((m, c * L) for m, c in self.denom)
        from .nodes import div

        return div(_poly_expr(self.gens, num), _poly_expr(self.gens, den))

    def __str__(self) -> str:
        return str(self.to_expr())


def _mono_key(gens, m: Monomial) -> str:
    parts = sorted(f"{gens[i].key}^{e}" for i, e in enumerate(m) if e)
    return "*".join(parts) or "1"


def _poly_key(gens, terms: Terms) -> str:
    items = sorted((_mono_key(gens, m), c) for m, c in terms)
    return " + ".join(f"{c}*{k}" for k, c in items) or "0"


def _mono_expr(gens, m: Monomial) -> list[Expr]:
    return [power(gens[i].to_expr(), e) for i, e in enumerate(m) if e]


def _poly_expr(gens, terms: Terms) -> Expr:
    return add(*(mul(Const(c), *_mono_expr(gens, m)) for m, c in terms))


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _terms(poly) -> Terms:
    return tuple((m, _frac(c)) for m, c in poly.terms())


@lru_cache(maxsize=None)
def _field(n: int):
    names = ",".join(f"g{i}" for i in range(n)) if n else "g0"
    return sp_field(names, QQ, grlex)


# ---------------------------------------------------------------------------
# collection pass


class _Collector:
    def __init__(self, split_ln: bool):
        self.split_ln = split_ln
        self.symbols: set[str] = set()
        self.kernels: dict[str, Gen] = {}
        self.node_kernel: dict[Expr, str] = {}
        # exp bookkeeping
        self.exp_terms: dict[Expr, list[tuple[str, Expr, Fraction]]] = {}
        self.shape_coeffs: dict[str, set[Fraction]] = {}
        self.shape_expr: dict[str, Expr] = {}
        self.seen: set[Expr] = set()

    def visit(self, e: Expr) -> None:
        stack = [e]
        while stack:
            node = stack.pop()
            if node in self.seen:
                continue
            self.seen.add(node)
            if isinstance(node, Sym):
                self.symbols.add(node.name)
            elif isinstance(node, Func):
                self.kernel(node)
            else:
                stack.extend(node.children)

    def kernel(self, node: Func) -> None:
        arg_nf = normalize(node.arg, self.split_ln)
        if node.head == "exp":
            parts = []
            for shape_key, shape, c in exp_shapes(arg_nf):
                parts.append((shape_key, shape, c))
                self.shape_coeffs.setdefault(shape_key, set()).add(c)
                self.shape_expr.setdefault(shape_key, shape)
            self.exp_terms[node] = parts
            return
        c = arg_nf.constant_value()
        if c is not None and (
            (node.head == "ln" and c == 1) or (node.head in ("sin", "cos") and c == 0)
        ):
            self.node_kernel[node] = ""
            return
        key = f"{node.head}[{arg_nf.key()}]"
        if key not in self.kernels:
            self.kernels[key] = Gen(node.head, key, arg=arg_nf.to_expr())
        self.node_kernel[node] = key


def exp_shapes(arg_nf: NormalForm) -> list[tuple[str, Expr, Fraction]]:
    """Split an exponent into (shape key, shape expression, coefficient)."""
    out = []
    den_terms = arg_nf.denom
    for m, c in arg_nf.numer:
        raw = NormalForm(arg_nf.gens, ((m, Fraction(1)),), den_terms)
        shape_nf = normalize(raw.to_expr()) if len(den_terms) > 1 or any(den_terms[0][0]) else raw
        out.append((shape_nf.key(), shape_nf.to_expr(), c))
    return out


def _rational_gcd(values: Iterable[Fraction]) -> Fraction:
    num = 0
    den = 1
    for v in values:
        num = math.gcd(num, abs(v.numerator))
        den = den * v.denominator // math.gcd(den, v.denominator)
    return Fraction(num, den)


def _split_ln(e: Expr) -> Expr:
    def leaf(node):
        if isinstance(node, Func) and node.head == "ln":
            return _ln_expand(_split_ln(node.arg))
        return None

    return map_tree(e, leaf)


def _ln_expand(arg: Expr) -> Expr:
    if isinstance(arg, Mul):
        return add(*(_ln_expand(a) for a in arg.args))
    if isinstance(arg, Div):
        return add(_ln_expand(arg.num), neg(_ln_expand(arg.den)))
    if isinstance(arg, Pow):
        return mul(Const(arg.exp), _ln_expand(arg.base))
    return func("ln", arg)


# ---------------------------------------------------------------------------


@lru_cache(maxsize=65536)
def normalize(e: Expr, split_ln: bool = False) -> NormalForm:
    """Canonical reduced rational form of ``e``.

    Raises ``ZeroDivisionError`` if ``e`` divides by something that is
    identically zero.
    """
    if split_ln:
        e = _split_ln(e)
    col = _Collector(split_ln)
    col.visit(e)

    gens: list[Gen] = [Gen("sym", f"${s}", name=s) for s in col.symbols]
    atoms: dict[str, tuple[Gen, Fraction]] = {}
    for shape_key, coeffs in col.shape_coeffs.items():
        g = _rational_gcd(coeffs)
        exponent = mul(Const(g), col.shape_expr[shape_key])
        atom = Gen("exp", f"exp[{g}*{shape_key}]", arg=exponent)
        atoms[shape_key] = (atom, g)
        gens.append(atom)
    gens.extend(col.kernels.values())
    gens.sort(key=_sort_key)
    index = {g.key: i for i, g in enumerate(gens)}

    K, *syms = _field(len(gens))
    R = K.ring
    memo: dict[Expr, object] = {}

    def ev(node: Expr):
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Const):
            out = K.raw_new(R.ground_new(QQ(node.value.numerator, node.value.denominator)), R.one)
        elif isinstance(node, Sym):
            out = syms[index["$" + node.name]]
        elif isinstance(node, Add):
            # sum numerators over shared denominators before cancelling
            groups: dict = {}
            for a in node.args:
                v = ev(a)
                groups[v.denom] = groups.get(v.denom, R.zero) + v.numer
            out = K(0)
            for den, num in groups.items():
                out = out + (K.raw_new(num, den) if den == R.one else K.new(num, den))
        elif isinstance(node, Mul):
            num, den = R.one, R.one
            for a in node.args:
                v = ev(a)
                num, den = num * v.numer, den * v.denom
            out = K.raw_new(num, den) if den == R.one else K.new(num, den)
        elif isinstance(node, Pow):
            b = ev(node.base)
            if node.exp >= 0:
                out = b**node.exp
            else:
                if not b:
                    raise ZeroDivisionError(f"division by zero in {node}")
                out = 1 / b ** (-node.exp)
        elif isinstance(node, Div):
            d = ev(node.den)
            if not d:
                raise ZeroDivisionError(f"division by zero in {node}")
            out = ev(node.num) / d
        elif isinstance(node, Func):
            if node.head == "exp":
                out = K(1)
                for shape_key, _, c in col.exp_terms[node]:
                    atom, g = atoms[shape_key]
                    k = c / g
                    assert k.denominator == 1
                    a = syms[index[atom.key]]
                    out = out * a ** int(k) if k > 0 else out / a ** int(-k)
            else:
                key = col.node_kernel[node]
                if key == "":
                    out = K(1) if node.head == "cos" else K(0)
                else:
                    out = syms[index[key]]
        else:  # pragma: no cover
            raise TypeError(node)
        memo[node] = out
        return out

    val = ev(e)
    return _from_field(gens, val.numer, val.denom)


def _from_field(gens: list[Gen], num, den) -> NormalForm:
    if not num:
        return NormalForm((), (), (((), Fraction(1)),))
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    used = [False] * len(gens)
    for poly in (num, den):
        for m in poly.monoms():
            for i, e in enumerate(m):
                if e:
                    used[i] = True
    keep = [i for i, u in enumerate(used) if u]
    new_gens = tuple(gens[i] for i in keep)

    def project(poly) -> Terms:
        return tuple((tuple(m[i] for i in keep), _frac(c)) for m, c in poly.terms())

    if len(keep) == len(gens):
        return NormalForm(new_gens, project(num), project(den), num, den)
    return NormalForm(new_gens, project(num), project(den))


def simplify(e: Expr, split_ln: bool = False) -> Expr:
    """``e`` rewritten as its normal form."""
    return normalize(e, split_ln).to_expr()


def symbolically_zero(e: Expr) -> bool:
    return normalize(e).is_zero


def poly_coefficients(e: Expr, name: str) -> dict[int, Expr]:
    """Coefficients of ``e`` as a polynomial in the symbol ``name``.

    Raises ``ValueError`` if ``e`` is not polynomial in ``name`` (the symbol
    sits in the denominator or inside a kernel).
    """
    nf = normalize(e)
    idx = nf.gen_index(name)
    for g in nf.kernels():
        from .nodes import depends_on

        if depends_on(g.arg, name):
            raise ValueError(f"{name} occurs inside {g.to_expr()}")
    if idx is None:
        return {0: nf.to_expr()} if not nf.is_zero else {}
    if any(m[idx] for m, _ in nf.denom):
        raise ValueError(f"{name} occurs in the denominator")
    buckets: dict[int, list] = {}
    for m, c in nf.numer:
        k = m[idx]
        reduced = m[:idx] + (0,) + m[idx + 1 :]
        buckets.setdefault(k, []).append((reduced, c))
    den = nf.denom_expr()
    out = {}
    for k, terms in buckets.items():
        out[k] = normalize(_poly_expr(nf.gens, tuple(terms)) / den).to_expr()
    return out
