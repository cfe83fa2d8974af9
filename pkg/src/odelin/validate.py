"""Numeric cross-checks: residual sampling and RK4 against closed-form solutions."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Mapping

from .errors import AllSamplesSingular, SingularPointError, SingularTrajectory
from .expr import Expr, differentiate
from .expr.nodes import X, Y, YP, free_symbols, substitute
from .expr.numeric import DEFAULT_SEED, MAX_RESAMPLE, POLE_TOL, _MpOps, _evaluate, random_point
from .ode import CubicODE

import mpmath


def sample_residual(e: Expr, n: int = 20, seed: int = DEFAULT_SEED) -> float:
    """Max |e| over ``n`` regular random points (50-digit arithmetic)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    names = sorted(free_symbols(e))
    rng = random.Random(seed)
    ctx = mpmath.mp.clone()
    ctx.dps = 50
    ops = _MpOps(ctx)
    worst = 0.0
    got = 0
    for _ in range(MAX_RESAMPLE * n):
        point = random_point(names, rng)
        try:
            v = _evaluate(e, point, ops, POLE_TOL)
        except (SingularPointError, ZeroDivisionError, ValueError):
            continue
        worst = max(worst, float(abs(v)))
        got += 1
        if got == n:
            return worst
    raise AllSamplesSingular(f"no regular sample point found for {e}")


def _bind(e: Expr, constants: Mapping[str, object]) -> Expr:
    try:
        return substitute(e, {k: Fraction(v) for k, v in constants.items()})
    except ZeroDivisionError:
        raise SingularTrajectory("expression is singular for the chosen constants") from None


def rk4_crosscheck(
    ode: CubicODE,
    explicit: Expr,
    constants: Mapping[str, object],
    interval: tuple[float, float] = (0.0, 1.0),
    step: float = 1e-3,
) -> float:
    """Integrate y'' = f with classical RK4 from the explicit solution's data at
    the left endpoint; return max |y_numeric - y_explicit| over the grid.

    ``constants`` binds the integration constants and any parameters.
    """
    from .expr.numeric import compile_function

    sol = _bind(explicit, constants)
    f = _bind(ode.rhs(), constants)
    y_fn = compile_function(sol, [X])
    dy_fn = compile_function(differentiate(sol, X), [X])
    f_fn = compile_function(f, [X, Y, YP])
    x0, x1 = float(interval[0]), float(interval[1])
    nsteps = max(1, int(round((x1 - x0) / step)))
    h = (x1 - x0) / nsteps

    def call(fn, *args):
        try:
            v = fn(*args)
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            raise SingularTrajectory(f"evaluation failed at x = {args[0]:.6g}: {exc}") from None
        if not math.isfinite(v):
            raise SingularTrajectory(f"non-finite value at x = {args[0]:.6g}")
        return v

    y = call(y_fn, x0)
    v = call(dy_fn, x0)
    worst = 0.0
    for i in range(nsteps):
        x = x0 + i * h
        k1y, k1v = v, call(f_fn, x, y, v)
        k2y, k2v = v + h / 2 * k1v, call(f_fn, x + h / 2, y + h / 2 * k1y, v + h / 2 * k1v)
        k3y, k3v = v + h / 2 * k2v, call(f_fn, x + h / 2, y + h / 2 * k2y, v + h / 2 * k2v)
        k4y, k4v = v + h * k3v, call(f_fn, x + h, y + h * k3y, v + h * k3v)
        y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        xn = x0 + (i + 1) * h
        worst = max(worst, abs(y - call(y_fn, xn)))
    return worst
