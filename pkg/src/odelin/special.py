"""The class y'' + (a y + b) y' + (a^2/9) y^3 + ((a' + a b)/3) y^2 + c y + d = 0.

Coefficients a, b, c, d depend on x only.  Solutions of the linear ODEs
attached to the class give (w, z) and the linearizing transformation in
closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .errors import (
    BasisInvalid,
    GNotASolution,
    IntegrationUnavailable,
    NonConstant,
    NotInClass,
    NotIntegrable,
    Unsolved,
    VerificationFailure,
)
from .expr import Expr, differentiate, normalize, poly_coefficients, simplify
from .expr.integrate import integrate_rulebased, verify_antiderivative
from .expr.nodes import ONE, X, Y, YP, ZERO, Const, Sym, add, cos, div, exp, mul, neg, power, sin
from .lambda_sym import AuxPair
from .lie import lie_conditions_residuals
from .ode import CubicODE
from .transform import (
    GeneralSolution,
    PointTransform,
    general_solution,
    transform_matches_ode,
    verify_general_solution,
)

xs = Sym(X)
ys = Sym(Y)


@dataclass(frozen=True)
class SpecialClassCoeffs:
    a: Expr
    b: Expr
    c: Expr
    d: Expr
    params: tuple[str, ...] = ()

    def template(self) -> CubicODE:
        """Reassemble the cubic ODE of the class from (a, b, c, d)."""
        a, b, c, d = self.a, self.b, self.c, self.d
        da = differentiate(a, X)
        F1 = a * ys + b
        F = (
            div(power(a, 2), Const(9)) * power(ys, 3)
            + div(da + a * b, Const(3)) * power(ys, 2)
            + c * ys
            + d
        )
        return CubicODE(ZERO, ZERO, simplify(F1), simplify(F), params=self.params)


def _x_only(e: Expr) -> bool:
    nf = normalize(e)
    return not (nf.depends_on(Y) or nf.depends_on(YP))


def _same(a: Expr, b: Expr) -> bool:
    return normalize(a - b).is_zero


def detect_special_class(ode: CubicODE) -> SpecialClassCoeffs:
    """Read off (a, b, c, d) or raise NotInClass naming the first failed match."""
    F3, F2, F1, F = ode.coefficients
    if not normalize(F3).is_zero:
        raise NotInClass(f"F3 = {F3} is not zero")
    if not normalize(F2).is_zero:
        raise NotInClass(f"F2 = {F2} is not zero")
    try:
        c1 = poly_coefficients(F1, Y)
        c0 = poly_coefficients(F, Y)
    except ValueError as exc:
        raise NotInClass(f"coefficients are not polynomial in y: {exc}") from None
    if any(k > 1 for k in c1):
        raise NotInClass(f"F1 = {F1} is not linear in y")
    if any(k > 3 for k in c0):
        raise NotInClass(f"F = {F} has degree above 3 in y")
    a = simplify(c1.get(1, ZERO))
    b = simplify(c1.get(0, ZERO))
    if normalize(a).is_zero:
        raise NotInClass("a(x) vanishes: F1 has no y term")
    for name, e in (("a", a), ("b", b)):
        if not _x_only(e):
            raise NotInClass(f"{name} = {e} depends on y")
    want3 = div(power(a, 2), Const(9))
    got3 = c0.get(3, ZERO)
    if not _same(got3, want3):
        raise NotInClass(f"y^3 coefficient of F is {simplify(got3)}, expected {simplify(want3)}")
    want2 = div(differentiate(a, X) + a * b, Const(3))
    got2 = c0.get(2, ZERO)
    if not _same(got2, want2):
        raise NotInClass(f"y^2 coefficient of F is {simplify(got2)}, expected {simplify(want2)}")
    c = simplify(c0.get(1, ZERO))
    d = simplify(c0.get(0, ZERO))
    for name, e in (("c", c), ("d", d)):
        if not _x_only(e):
            raise NotInClass(f"{name} = {e} depends on y")
    return SpecialClassCoeffs(a, b, c, d, ode.params)


@dataclass(frozen=True)
class LinearODE:
    """u^(n) + coeffs[n-1] u^(n-1) + ... + coeffs[0] u = 0 in x."""

    order: int
    coeffs: tuple[Expr, ...]
    var: str = "H"

    def residual(self, u: Expr) -> Expr:
        derivs = [u]
        for _ in range(self.order):
            derivs.append(differentiate(derivs[-1], X))
        return simplify(add(derivs[-1], *(mul(c, dk) for c, dk in zip(self.coeffs, derivs))))

    def __str__(self) -> str:
        v = self.var
        names = [v] + [v + "'" * k for k in range(1, self.order + 1)]
        parts = [names[-1]]
        for k in range(self.order - 1, -1, -1):
            c = self.coeffs[k]
            if not normalize(c).is_zero:
                parts.append(f"({c})*{names[k]}")
        return " + ".join(parts) + " = 0"


def build_linear_odes(sc: SpecialClassCoeffs) -> tuple[LinearODE, LinearODE]:
    """The third-order ODE for g and the second-order ODE for h."""
    a, b, c, d = sc.a, sc.b, sc.c, sc.d
    da = differentiate(a, X)
    dda = differentiate(da, X)
    r = div(da, a)
    k2 = b - Const(2) * r
    k1 = neg(div(dda, a) - Const(2) * power(r, 2) + b * r - c)
    k0 = div(d * a, Const(3))
    third = LinearODE(3, (simplify(k0), simplify(k1), simplify(k2)), "Y")
    second = LinearODE(2, (simplify(c), simplify(b)), "H")
    return third, second


@dataclass(frozen=True)
class BasisSolutions:
    functions: tuple[Expr, ...]
    provenance: str  # "constant-coefficient solver" or "user-supplied"


def wronskian(funcs: Sequence[Expr]) -> Expr:
    n = len(funcs)
    rows = [list(funcs)]
    for _ in range(n - 1):
        rows.append([differentiate(f, X) for f in rows[-1]])
    M = sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"_w{i}_{j}"))
    det = M.det(method="berkowitz")
    mapping = {f"_w{i}_{j}": rows[i][j] for i in range(n) for j in range(n)}
    return simplify(_from_sympy(det, mapping))


def _from_sympy(e, mapping) -> Expr:
    if e.is_Symbol:
        return mapping[e.name]
    if e.is_Integer:
        return Const(int(e))
    if e.is_Add:
        return add(*(_from_sympy(a, mapping) for a in e.args))
    if e.is_Mul:
        return mul(*(_from_sympy(a, mapping) for a in e.args))
    if e.is_Pow and e.exp.is_Integer:
        return power(_from_sympy(e.base, mapping), int(e.exp))
    raise TypeError(f"unexpected determinant term {e}")


def check_basis(lin: LinearODE, funcs: Sequence[Expr]) -> None:
    """Raise BasisInvalid unless each function solves ``lin`` and the Wronskian is non-zero."""
    for f in funcs:
        res = lin.residual(f)
        if not normalize(res).is_zero:
            raise BasisInvalid(f"{f} does not solve {lin}: residual {res}")
    if len(funcs) > 1:
        W = wronskian(funcs)
        if normalize(W).is_zero:
            raise BasisInvalid("Wronskian vanishes: functions are linearly dependent")


def _constant_value(e: Expr):
    nf = normalize(e)
    if nf.depends_on(X) or nf.depends_on(Y) or nf.depends_on(YP):
        raise NonConstant(f"coefficient {e} depends on the independent variable")
    return nf


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    from math import isqrt

    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def _exp_rx(r: Expr) -> Expr:
    return exp(simplify(mul(r, xs)))


def _second_order_basis(p: Expr, q: Expr) -> list[Expr]:
    """Basis of u'' + p u' + q u = 0 for constant p, q."""
    disc = simplify(power(p, 2) - Const(4) * q)
    dnf = normalize(disc)
    if dnf.is_zero:
        r = simplify(neg(div(p, Const(2))))
        e = _exp_rx(r)
        return [e, simplify(mul(xs, e))]
    if not dnf.is_constant():
        raise Unsolved(f"discriminant {disc} is neither zero nor a rational constant")
    D = dnf.constant_value()
    pnf = normalize(p)
    if not pnf.is_constant():
        raise Unsolved(f"roots depend on parameters through {p}")
    P = pnf.constant_value()
    s = _rational_sqrt(D)
    if s is not None:
        r1, r2 = (-P + s) / 2, (-P - s) / 2
        return [_exp_rx(Const(r1)), _exp_rx(Const(r2))]
    t = _rational_sqrt(-D)
    if t is not None:
        alpha, beta = -P / 2, t / 2
        arg = simplify(mul(Const(beta), xs))
        e = _exp_rx(Const(alpha))
        return [simplify(mul(e, cos(arg))), simplify(mul(e, sin(arg)))]
    raise Unsolved(f"characteristic roots are irrational (discriminant {D})")


def solve_const_coeff(lin: LinearODE) -> BasisSolutions:
    """Characteristic-root basis for constant coefficients.

    Order 2 handles rational, repeated and complex roots with rational
    imaginary part.  Order 3 needs all roots rational, or a zero root.
    """
    for c in lin.coeffs:
        _constant_value(c)
    if lin.order == 2:
        q, p = lin.coeffs
        funcs = _second_order_basis(p, q)
    elif lin.order == 3:
        funcs = _third_order_basis(*lin.coeffs)
    else:
        raise Unsolved(f"order {lin.order} is not supported")
    check_basis(lin, funcs)
    return BasisSolutions(tuple(funcs), "constant-coefficient solver")


def _third_order_basis(k0: Expr, k1: Expr, k2: Expr) -> list[Expr]:
    vals = []
    for k in (k0, k1, k2):
        nf = normalize(k)
        if not nf.is_constant():
            raise Unsolved("third-order roots with parameters are not supported")
        vals.append(nf.constant_value())
    c0, c1, c2 = vals
    r = sympy.Symbol("r")
    poly = sympy.Poly(
        r**3 + sympy.Rational(c2.numerator, c2.denominator) * r**2
        + sympy.Rational(c1.numerator, c1.denominator) * r
        + sympy.Rational(c0.numerator, c0.denominator),
        r,
        domain="QQ",
    )
    roots = sympy.roots(poly, filter="Q")
    if sum(roots.values()) == 3:
        funcs = []
        for root in sorted(roots, key=lambda v: (v.p / v.q)):
            e = _exp_rx(Const(Fraction(int(root.p), int(root.q))))
            for m in range(roots[root]):
                funcs.append(simplify(mul(power(xs, m), e)))
        return funcs
    if c0 == 0:
        return [ONE] + _second_order_basis(Const(c2), Const(c1))
    raise Unsolved("characteristic polynomial has irrational roots")


def aux_from_g(sc: SpecialClassCoeffs, g: Expr) -> AuxPair:
    """(w, z) built from a solution g of the third-order ODE."""
    third, _ = build_linear_odes(sc)
    res = third.residual(g)
    if not normalize(res).is_zero:
        raise GNotASolution(res)
    a = sc.a
    g1 = differentiate(g, X)
    g2 = differentiate(g1, X)
    da = differentiate(a, X)
    den = ys * a * g - Const(3) * g1
    w = simplify(div(a * g, den))
    num = Const(9) * a * g2 - (Const(9) * da + Const(6) * ys * power(a, 2)) * g1 + power(ys, 2) * power(a, 3) * g
    z = simplify(div(num, Const(3) * a * den))
    aux = AuxPair(w, z)
    lie = lie_conditions_residuals(sc.template(), aux)
    if not all(normalize(r).is_zero for r in lie):
        raise VerificationFailure(f"(w, z) from g = {g} fails the Lie conditions")
    return aux


def _antiderivative(integrand: Expr, supplied: Expr | None) -> Expr:
    if supplied is not None:
        if not verify_antiderivative(supplied, integrand):
            raise IntegrationUnavailable(f"supplied antiderivative {supplied} does not differentiate to {integrand}")
        return supplied
    try:
        return integrate_rulebased(integrand)
    except NotIntegrable as exc:
        raise IntegrationUnavailable(f"cannot integrate {integrand}: {exc}") from None


def transforms_from_h(
    sc: SpecialClassCoeffs,
    h1: Expr,
    h2: Expr,
    antiderivatives: tuple[Expr | None, Expr | None] | None = None,
) -> PointTransform:
    """phi = (1/3) int a h1 dx - h1/y, psi likewise with h2 (d must vanish)."""
    if not normalize(sc.d).is_zero:
        raise NotInClass("closed-form transformations need d = 0; supply g and use the S-system")
    _, second = build_linear_odes(sc)
    check_basis(second, [h1, h2])
    anti = antiderivatives or (None, None)
    parts = []
    for h, given in zip((h1, h2), anti):
        I = _antiderivative(simplify(mul(sc.a, h)), given)
        parts.append(simplify(div(I, Const(3)) - div(h, ys)))
    tr = PointTransform(parts[0], parts[1])
    match = transform_matches_ode(tr, sc.template())
    if not match.matches:
        raise VerificationFailure(f"transformation does not match the ODE: {match.residuals}")
    return tr


def special_general_solution(sc: SpecialClassCoeffs, tr: PointTransform) -> GeneralSolution:
    gs = general_solution(tr, sc.params)
    check = verify_general_solution(sc.template(), gs)
    if not check.ok:
        raise VerificationFailure(f"general solution failed verification ({check.mode})")
    return gs
