"""Independent sympy oracle used to cross-check results in the tests."""

from __future__ import annotations

import sympy as sp

from odelin.expr import Expr, render

x, y, yp = sp.symbols("x y yp")
SYMS = {"x": x, "y": y, "yp": yp, "exp": sp.exp, "ln": sp.log, "sin": sp.sin, "cos": sp.cos}


def to_sympy(e: Expr | str, params=()):
    text = render(e) if not isinstance(e, str) else e
    text = text.replace("y''", "ypp").replace("y'", "yp").replace("^", "**")
    ns = dict(SYMS)
    ns.update({p: sp.Symbol(p) for p in params})
    ns["ypp"] = sp.Symbol("ypp")
    return sp.sympify(text, locals=ns)


def same(a, b, params=()) -> bool:
    """Symbolic equality decided by sympy."""
    A = a if isinstance(a, sp.Basic) else to_sympy(a, params)
    B = b if isinstance(b, sp.Basic) else to_sympy(b, params)
    return sp.simplify(A - B) == 0


def total_derivative(expr, F3, F2, F1, F):
    f = -(F3 * yp**3 + F2 * yp**2 + F1 * yp + F)
    return sp.diff(expr, x) + yp * sp.diff(expr, y) + f * sp.diff(expr, yp)


def lie_tresse(F3, F2, F1, F):
    d = sp.diff
    L1 = (d(F1, y, 2) - 2 * d(F2, x, y) + 3 * d(F3, x, 2) - 3 * d(F1, x) * F3 - 3 * F1 * d(F3, x)
          + 6 * d(F, y) * F3 + 3 * F * d(F3, y) - F2 * d(F1, y) + 2 * F2 * d(F2, x))
    L2 = (d(F2, x, 2) - 2 * d(F1, x, y) + 3 * d(F, y, 2) + 3 * d(F, y) * F2 + 3 * F * d(F2, y)
          - 3 * d(F, x) * F3 - 6 * F * d(F3, x) + F1 * d(F2, x) - 2 * F1 * d(F1, y))
    return sp.simplify(L1), sp.simplify(L2)


def pushforward(phi, psi):
    """(A, B, w, z, P, Q) straight from the Jacobian quotients."""
    d = sp.diff
    J = d(phi, x) * d(psi, y) - d(phi, y) * d(psi, x)

    def q(a, b, c, e):
        return sp.simplify((a * b - c * e) / J)

    px, py, qx, qy = d(phi, x), d(phi, y), d(psi, x), d(psi, y)
    A = q(py, d(psi, y, 2), qy, d(phi, y, 2))
    B = q(px, d(psi, y, 2), qx, d(phi, y, 2))
    w = q(py, d(psi, x, y), qy, d(phi, x, y))
    z = q(px, d(psi, x, y), qx, d(phi, x, y))
    P = q(py, d(psi, x, 2), qy, d(phi, x, 2))
    Q = q(px, d(psi, x, 2), qx, d(phi, x, 2))
    return A, B, w, z, P, Q
