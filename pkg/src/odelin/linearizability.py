"""The Lie-Tresse point-linearizability test."""

from __future__ import annotations

from dataclasses import dataclass

from .expr import Expr, differentiate, simplify
from .expr.nodes import X, Y, Const
from .expr.numeric import DEFAULT_SEED, Verdict, is_zero
from .ode import CubicODE


def _d(e: Expr, *vs: str) -> Expr:
    for v in vs:
        e = differentiate(e, v)
    return e


def lie_tresse_invariants(ode: CubicODE) -> tuple[Expr, Expr]:
    """The two invariants, unsimplified, with terms in the classical order."""
    F3, F2, F1, F = ode.coefficients
    c = Const
    first = (
        _d(F1, Y, Y)
        - c(2) * _d(F2, X, Y)
        + c(3) * _d(F3, X, X)
        - c(3) * _d(F1, X) * F3
        - c(3) * F1 * _d(F3, X)
        + c(6) * _d(F, Y) * F3
        + c(3) * F * _d(F3, Y)
        - F2 * _d(F1, Y)
        + c(2) * F2 * _d(F2, X)
    )
    second = (
        _d(F2, X, X)
        - c(2) * _d(F1, X, Y)
        + c(3) * _d(F, Y, Y)
        + c(3) * _d(F, Y) * F2
        + c(3) * F * _d(F2, Y)
        - c(3) * _d(F, X) * F3
        - c(6) * F * _d(F3, X)
        + F1 * _d(F2, X)
        - c(2) * F1 * _d(F1, Y)
    )
    return first, second


@dataclass(frozen=True)
class LieTresseResult:
    first: Expr
    second: Expr
    verdicts: tuple[Verdict, Verdict]

    @property
    def linearizable(self) -> bool:
        return all(v is Verdict.ZERO for v in self.verdicts)

    @property
    def proven_nonlinearizable(self) -> bool:
        return any(v is Verdict.NON_ZERO for v in self.verdicts)

    @property
    def verdict(self) -> str:
        if self.linearizable:
            return "linearizable"
        if self.proven_nonlinearizable:
            return "not-linearizable"
        return "undecided"


def lie_tresse_residuals(ode: CubicODE, seed: int = DEFAULT_SEED) -> LieTresseResult:
    """Normalised Lie-Tresse invariants and the linearizability verdict.

    The ODE is point-linearizable iff both invariants vanish identically.  A
    residual that only vanishes numerically leaves the verdict undecided.
    """
    first, second = lie_tresse_invariants(ode)
    r1, r2 = simplify(first), simplify(second)
    return LieTresseResult(r1, r2, (is_zero(r1, seed), is_zero(r2, seed)))
