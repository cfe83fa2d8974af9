"""lambda-symmetries of the canonical form (d/dy, lambda).

For v = d/dy the lambda-prolongation has eta0 = 1, eta1 = lambda and
eta2 = D_x(lambda) + lambda^2, so (v, lambda) is a lambda-symmetry of
y'' = f exactly when D_x(lambda) + lambda^2 = f_y + lambda*f_{y'}.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import Expr, differentiate, normalize, poly_coefficients, simplify
from .expr.nodes import X, Y, YP, Const, Sym, add, div, mul, neg, power
from .ode import CubicODE, total_derivative

yp = Sym(YP)


@dataclass(frozen=True)
class AuxPair:
    """Auxiliary functions (w, z) of the Lie conditions."""

    w: Expr
    z: Expr

    def __post_init__(self):
        for e in (self.w, self.z):
            if normalize(e).depends_on(YP):
                raise ValueError("auxiliary functions must not depend on y'")


@dataclass(frozen=True)
class LambdaFn:
    expr: Expr

    def __str__(self) -> str:
        return str(self.expr)


def lambda_determining_expr(ode: CubicODE, lam: Expr) -> Expr:
    f = ode.rhs()
    return add(
        total_derivative(ode, lam),
        power(lam, 2),
        neg(differentiate(f, Y)),
        neg(mul(lam, differentiate(f, YP))),
    )


def lambda_determining_residual(ode: CubicODE, lam: LambdaFn | Expr) -> Expr:
    """D_x(lambda) + lambda^2 - f_y - lambda*f_{y'}, normalised."""
    lam = lam.expr if isinstance(lam, LambdaFn) else lam
    return simplify(lambda_determining_expr(ode, lam))


def lambda_from_aux(ode: CubicODE, aux: AuxPair, scale: Expr | None = None) -> LambdaFn:
    """lambda_1 from (w, z); with ``scale`` S (phi or psi) the shifted lambda_2/lambda_3.

    lambda = -F3*y'^2 - (F2 - w - S_y/S)*y' - z + S_x/S
    """
    F3, F2 = ode.F3, ode.F2
    lin = add(F2, neg(aux.w))
    const = neg(aux.z)
    if scale is not None:
        if normalize(scale).is_zero:
            raise ValueError("scale must not vanish identically")
        lin = add(lin, neg(div(differentiate(scale, Y), scale)))
        const = add(const, div(differentiate(scale, X), scale))
    lam = add(neg(mul(F3, power(yp, 2))), neg(mul(lin, yp)), const)
    return LambdaFn(simplify(lam))


def aux_system_residuals(ode: CubicODE, aux: AuxPair) -> tuple[Expr, Expr, Expr]:
    """Residuals (LHS - RHS) of the reduced system for (w, z).

    w_y = -w^2 + F2*w + F3*z + F3_x - F1*F3
    w_x - z_y = 2*w*z - 2*F3*F + F2_x - F1_y
    z_x = z^2 - F1*z - F*w + F_y + F*F2
    """
    F3, F2, F1, F = ode.coefficients
    w, z = aux.w, aux.z
    d = differentiate
    r_wy = d(w, Y) - (-power(w, 2) + F2 * w + F3 * z + d(F3, X) - F1 * F3)
    r_mixed = d(w, X) - d(z, Y) - (Const(2) * w * z - Const(2) * F3 * F + d(F2, X) - d(F1, Y))
    r_zx = d(z, X) - (power(z, 2) - F1 * z - F * w + d(F, Y) + F * F2)
    return simplify(r_wy), simplify(r_mixed), simplify(r_zx)


def determining_coefficients(ode: CubicODE, aux: AuxPair) -> dict[int, Expr]:
    """The lambda_1 determining residual collected in powers of y'."""
    res = lambda_determining_residual(ode, lambda_from_aux(ode, aux))
    return poly_coefficients(res, YP)
