"""Second-order ODEs in the form y'' + F3*y'^3 + F2*y'^2 + F1*y' + F = 0."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import DegenerateLeading, NotCubic
from .expr import (
    ZERO,
    YP,
    YPP,
    Expr,
    Sym,
    differentiate,
    normalize,
    parse_equation,
    poly_coefficients,
    simplify,
)
from .expr.nodes import X, Y, add, mul, neg, power

yp = Sym(YP)


@dataclass(frozen=True)
class CubicODE:
    F3: Expr
    F2: Expr
    F1: Expr
    F: Expr
    leading: Expr | None = None
    params: tuple[str, ...] = ()
    text: str | None = field(default=None, compare=False)

    @property
    def coefficients(self) -> tuple[Expr, Expr, Expr, Expr]:
        return (self.F3, self.F2, self.F1, self.F)

    def rhs(self) -> Expr:
        """f(x, y, y') with the equation written as y'' = f."""
        return neg(
            add(
                mul(self.F3, power(yp, 3)),
                mul(self.F2, power(yp, 2)),
                mul(self.F1, yp),
                self.F,
            )
        )

    def lhs(self) -> Expr:
        return add(Sym(YPP), neg(self.rhs()))

    def singular_loci(self) -> list[Expr]:
        """Denominators of the coefficients and the divided-out leading factor."""
        loci: list[Expr] = []
        seen = set()
        for c in self.coefficients:
            nf = normalize(c)
            den = nf.denom_expr()
            if not normalize(den).is_constant() and den not in seen:
                seen.add(den)
                loci.append(den)
        if self.leading is not None:
            lead = normalize(self.leading).numer_expr()
            if lead not in seen and not normalize(lead).is_constant():
                loci.append(lead)
        return loci

    def __str__(self) -> str:
        return f"y'' + ({self.F3})*y'^3 + ({self.F2})*y'^2 + ({self.F1})*y' + ({self.F}) = 0"


def from_coefficients(F3, F2, F1, F, params: Iterable[str] = ()) -> CubicODE:
    return CubicODE(simplify(F3), simplify(F2), simplify(F1), simplify(F), params=tuple(params))


def extract_cubic(eq: Expr, params: Iterable[str] = (), text: str | None = None) -> CubicODE:
    """Bring ``eq = 0`` (linear in y'') into the cubic form.

    Raises DegenerateLeading if y'' does not occur and NotCubic if the rest,
    divided by the y'' coefficient, is not a polynomial of degree <= 3 in y'.
    """
    try:
        by_ypp = poly_coefficients(eq, YPP)
    except ValueError as exc:
        raise NotCubic(f"equation is not linear in y'': {exc}") from None
    if any(k > 1 for k in by_ypp):
        raise NotCubic("equation is not linear in y''")
    M = by_ypp.get(1)
    if M is None or normalize(M).is_zero:
        raise DegenerateLeading("the coefficient of y'' vanishes identically")
    N = by_ypp.get(0, ZERO)
    ratio = N / M
    try:
        coeffs = poly_coefficients(ratio, YP)
    except ValueError as exc:
        raise NotCubic(f"not polynomial in y': {exc}") from None
    if any(k > 3 for k in coeffs):
        raise NotCubic(f"degree {max(coeffs)} in y' exceeds 3")
    F3, F2, F1, F = (coeffs.get(k, ZERO) for k in (3, 2, 1, 0))
    lead_nf = normalize(M)
    leading = None if lead_nf.is_constant() else lead_nf.to_expr()
    return CubicODE(
        simplify(F3), simplify(F2), simplify(F1), simplify(F), leading, tuple(params), text
    )


def parse_ode(text: str, params: Iterable[str] = ()) -> CubicODE:
    """Parse ``lhs = rhs`` text (``y''`` allowed) into a CubicODE."""
    params = tuple(params)
    return extract_cubic(parse_equation(text, params), params, text)


def total_derivative(ode: CubicODE, e: Expr) -> Expr:
    """D_x e = e_x + y' e_y + f e_{y'} along solutions of ``ode``."""
    return add(
        differentiate(e, X),
        mul(yp, differentiate(e, Y)),
        mul(ode.rhs(), differentiate(e, YP)),
    )
