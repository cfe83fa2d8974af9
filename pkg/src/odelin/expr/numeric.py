"""Numeric evaluation and randomized zero testing."""

from __future__ import annotations

import enum
import math
import random
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import mpmath

from ..errors import AllSamplesSingular, SingularPointError
from .nodes import Add, Const, Div, Expr, Func, Mul, Pow, Sym, free_symbols, walk
from .normal import normalize

DEFAULT_SEED = 0xC0FFEE
SAMPLE_RANGE = 7
SAMPLE_DENOM = 97
POLE_TOL = 1e-9
MAX_RESAMPLE = 50


class Verdict(str, enum.Enum):
    ZERO = "zero"
    NON_ZERO = "non-zero"
    NUMERIC_ONLY_ZERO = "numeric-only-zero"


class _FloatOps:
    def const(self, v: Fraction):
        return float(v)

    def lift(self, v):
        return float(v)

    def exp(self, a):
        try:
            return math.exp(a)
        except OverflowError:
            raise SingularPointError("exp", "overflow") from None

    def ln(self, a):
        return math.log(a)

    sin = staticmethod(math.sin)
    cos = staticmethod(math.cos)

    def magnitude(self, v):
        return abs(v)


class _ExactOps:
    def const(self, v: Fraction):
        return v

    def lift(self, v):
        return Fraction(v)

    def magnitude(self, v):
        return abs(v)


class _MpOps:
    def __init__(self, ctx):
        self.ctx = ctx

    def const(self, v: Fraction):
        return self.ctx.mpf(v.numerator) / v.denominator

    def lift(self, v):
        if isinstance(v, Fraction):
            return self.const(v)
        return self.ctx.mpf(v)

    def exp(self, a):
        return self.ctx.exp(a)

    def ln(self, a):
        return self.ctx.log(a)

    def sin(self, a):
        return self.ctx.sin(a)

    def cos(self, a):
        return self.ctx.cos(a)

    def magnitude(self, v):
        return abs(v)


def _evaluate(e: Expr, point: Mapping[str, object], ops, pole_tol: float):
    env = {k: ops.lift(v) for k, v in point.items()}
    memo: dict[Expr, object] = {}

    def check_den(d, node):
        if d == 0 or ops.magnitude(d) <= pole_tol:
            raise SingularPointError(str(node))

    def ev(node: Expr):
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Const):
            out = ops.const(node.value)
        elif isinstance(node, Sym):
            try:
                out = env[node.name]
            except KeyError:
                raise KeyError(f"no value for symbol {node.name!r}") from None
        elif isinstance(node, Add):
            out = ev(node.args[0])
            for a in node.args[1:]:
                out = out + ev(a)
        elif isinstance(node, Mul):
            out = ev(node.args[0])
            for a in node.args[1:]:
                out = out * ev(a)
        elif isinstance(node, Pow):
            b = ev(node.base)
            if node.exp < 0:
                check_den(b, node)
                out = 1 / (b ** (-node.exp))
            else:
                out = b**node.exp
        elif isinstance(node, Div):
            d = ev(node.den)
            check_den(d, node)
            out = ev(node.num) / d
        elif isinstance(node, Func):
            a = ev(node.arg)
            if node.head == "ln" and a <= 0:
                raise SingularPointError(str(node), "logarithm of a non-positive number")
            if not hasattr(ops, node.head):
                raise TypeError("exact evaluation does not support kernels")
            out = getattr(ops, node.head)(a)
        else:  # pragma: no cover
            raise TypeError(node)
        memo[node] = out
        return out

    return ev(e)


def eval_numeric(e: Expr, point: Mapping[str, object]) -> float:
    """Evaluate ``e`` in IEEE double precision.

    Raises SingularPointError naming the offending subexpression on division
    by zero or a logarithm of a non-positive number.
    """
    try:
        return float(_evaluate(e, point, _FloatOps(), 0.0))
    except ZeroDivisionError:
        raise SingularPointError(str(e)) from None
    except OverflowError:
        raise SingularPointError(str(e), "overflow") from None


def eval_exact(e: Expr, point: Mapping[str, object]) -> Fraction:
    return _evaluate(e, point, _ExactOps(), 0.0)


def _has_kernels(e: Expr) -> bool:
    return any(isinstance(n, Func) for n in walk(e))


def random_point(names: Sequence[str], rng: random.Random) -> dict[str, Fraction]:
    point = {}
    for n in names:
        k = 0
        while k == 0:
            k = rng.randint(-SAMPLE_RANGE * SAMPLE_DENOM, SAMPLE_RANGE * SAMPLE_DENOM)
        point[n] = Fraction(k, SAMPLE_DENOM)
    return point


def sample_values(e: Expr, n: int = 20, seed: int = DEFAULT_SEED, extra: Sequence[str] = ()):
    """Values of ``e`` at ``n`` regular random rational points.

    Kernel-free expressions are evaluated exactly; others with 50-digit
    mpmath arithmetic.  Points within POLE_TOL of a singularity are redrawn.
    """
    names = sorted(free_symbols(e) | set(extra))
    rng = random.Random(seed)
    exact = not _has_kernels(e)
    ctx = mpmath.mp.clone()
    ctx.dps = 50
    ops = _ExactOps() if exact else _MpOps(ctx)
    values = []
    for _ in range(n):
        for _attempt in range(MAX_RESAMPLE):
            point = random_point(names, rng)
            try:
                values.append(_evaluate(e, point, ops, POLE_TOL))
                break
            except (SingularPointError, ZeroDivisionError):
                continue
        else:
            raise AllSamplesSingular(f"no regular sample point found for {e}")
    return values, exact


def is_zero(e: Expr, seed: int = DEFAULT_SEED, n: int = 20, split_ln: bool = False) -> Verdict:
    """Three-way zero test.

    ``zero`` when the normal form vanishes; otherwise ``non-zero`` if any of
    ``n`` random samples is non-zero, else ``numeric-only-zero`` (a kernel
    relation the normal form does not know about).
    """
    try:
        nf = normalize(e, split_ln)
    except ZeroDivisionError:
        raise SingularPointError(str(e)) from None
    if nf.is_zero:
        return Verdict.ZERO
    try:
        values, exact = sample_values(e, n, seed)
    except AllSamplesSingular:
        return Verdict.NON_ZERO
    tol = 0 if exact else mpmath.mpf("1e-25")
    if any(abs(v) > tol for v in values):
        return Verdict.NON_ZERO
    return Verdict.NUMERIC_ONLY_ZERO


def compile_function(e: Expr, args: Sequence[str]) -> Callable[..., float]:
    """Compile ``e`` into a plain Python float function of ``args``."""
    names = {a: f"_a{i}" for i, a in enumerate(args)}
    missing = free_symbols(e) - set(args)
    if missing:
        raise ValueError(f"unbound symbols {sorted(missing)}")
    lines: list[str] = []
    memo: dict[Expr, str] = {}

    def emit(node: Expr) -> str:
        if node in memo:
            return memo[node]
        if isinstance(node, Const):
            src = repr(float(node.value))
        elif isinstance(node, Sym):
            src = names[node.name]
        else:
            if isinstance(node, Add):
                body = " + ".join(emit(a) for a in node.args)
            elif isinstance(node, Mul):
                body = " * ".join(emit(a) for a in node.args)
            elif isinstance(node, Pow):
                b = emit(node.base)
                body = f"{b} ** {node.exp}" if node.exp > 0 else f"1.0 / ({b} ** {-node.exp})"
            elif isinstance(node, Div):
                body = f"{emit(node.num)} / {emit(node.den)}"
            elif isinstance(node, Func):
                fn = {"exp": "_exp", "ln": "_log", "sin": "_sin", "cos": "_cos"}[node.head]
                body = f"{fn}({emit(node.arg)})"
            else:  # pragma: no cover
                raise TypeError(node)
            src = f"_t{len(lines)}"
            lines.append(f"    {src} = {body}")
        memo[node] = src
        return src

    result = emit(e)
    code = f"def _f({', '.join(names[a] for a in args)}):\n" + "\n".join(lines) + f"\n    return {result}\n"
    scope = {"_exp": math.exp, "_log": math.log, "_sin": math.sin, "_cos": math.cos}
    exec(compile(code, "<odelin-compiled>", "exec"), scope)
    return scope["_f"]
