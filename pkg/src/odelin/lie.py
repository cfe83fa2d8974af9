"""Residual checks for the Lie conditions, the trace condition and the quadratures."""

from __future__ import annotations

from .expr import Expr, differentiate, normalize, simplify
from .expr.nodes import X, Y, Const, div, power
from .lambda_sym import AuxPair
from .ode import CubicODE

third = Const(1) / 3
two_thirds = Const(2) / 3


def lie_conditions_rhs(ode: CubicODE, aux: AuxPair) -> tuple[Expr, Expr, Expr, Expr]:
    """Right-hand sides for (w_x, w_y, z_x, z_y)."""
    F3, F2, F1, F = ode.coefficients
    w, z = aux.w, aux.z
    d = differentiate
    wx = z * w - F * F3 - third * d(F1, Y) + two_thirds * d(F2, X)
    wy = -power(w, 2) + F2 * w + F3 * z + d(F3, X) - F1 * F3
    zx = power(z, 2) - F1 * z - F * w + d(F, Y) + F * F2
    zy = -z * w + F * F3 - third * d(F2, X) + two_thirds * d(F1, Y)
    return wx, wy, zx, zy


def lie_conditions_residuals(ode: CubicODE, aux: AuxPair) -> tuple[Expr, Expr, Expr, Expr]:
    """LHS - RHS of the four Lie conditions, ordered (w_x, w_y, z_x, z_y)."""
    wx, wy, zx, zy = lie_conditions_rhs(ode, aux)
    d = differentiate
    w, z = aux.w, aux.z
    return (
        simplify(d(w, X) - wx),
        simplify(d(w, Y) - wy),
        simplify(d(z, X) - zx),
        simplify(d(z, Y) - zy),
    )


def lie_conditions_hold(ode: CubicODE, aux: AuxPair) -> bool:
    return all(normalize(r).is_zero for r in lie_conditions_residuals(ode, aux))


def trace_condition_residual(ode: CubicODE, aux: AuxPair) -> Expr:
    """w_x + z_y - (F2_x + F1_y)/3."""
    d = differentiate
    return simplify(d(aux.w, X) + d(aux.z, Y) - third * (d(ode.F2, X) + d(ode.F1, Y)))


def quadrature_residuals(S: Expr, aux: AuxPair, aux_i: AuxPair) -> tuple[Expr, Expr]:
    """Residuals of S_x/S = z - z_i and S_y/S = w_i - w."""
    if normalize(S).is_zero:
        raise ValueError("S must not vanish identically")
    d = differentiate
    return (
        simplify(div(d(S, X), S) - (aux.z - aux_i.z)),
        simplify(div(d(S, Y), S) - (aux_i.w - aux.w)),
    )


def compatibility_residuals(ode: CubicODE, aux: AuxPair) -> tuple[Expr, Expr]:
    """Cross-derivative mismatches of the Lie condition right-hand sides.

    Computes D_y(RHS_wx) - D_x(RHS_wy) and D_y(RHS_zx) - D_x(RHS_zy), where
    w_x, w_y, z_x, z_y occurring after differentiation are replaced by their
    right-hand sides.  With (w, z) a solution these reduce to the Lie-Tresse
    invariants.
    """
    wx, wy, zx, zy = lie_conditions_rhs(ode, aux)
    from .expr.nodes import Sym

    W, Z = Sym("w_"), Sym("z_")
    generic = AuxPair(W, Z)
    gwx, gwy, gzx, gzy = lie_conditions_rhs(ode, generic)

    def total(e: Expr, var: str) -> Expr:
        dw = wx if var == X else wy
        dz = zx if var == X else zy
        return differentiate(e, var) + differentiate(e, "w_") * dw + differentiate(e, "z_") * dz

    from .expr.nodes import substitute

    c1 = substitute(total(gwx, Y) - total(gwy, X), {"w_": aux.w, "z_": aux.z})
    c2 = substitute(total(gzx, Y) - total(gzy, X), {"w_": aux.w, "z_": aux.z})
    return simplify(c1), simplify(c2)
