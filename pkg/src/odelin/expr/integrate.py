"""Rule-based antiderivatives in x.

Handles linear combinations of ``x^n * exp(a*x+b) * T`` where ``T`` is 1,
``sin(c*x+d)`` or ``cos(c*x+d)`` and the coefficients are free of x.  Every
result is checked by differentiating it back.
"""

from __future__ import annotations

from math import factorial

from ..errors import NotIntegrable, VerificationFailure
from .diff import differentiate
from .nodes import ONE, ZERO, X, Y, YP, Const, Expr, Sym, add, cos, div, exp, mul, power, sin
from .normal import Gen, NormalForm, normalize, poly_coefficients, simplify


def _linear_in_x(e: Expr) -> tuple[Expr, Expr] | None:
    try:
        coeffs = poly_coefficients(e, X)
    except ValueError:
        return None
    if any(k > 1 for k in coeffs):
        return None
    a = coeffs.get(1, ZERO)
    b = coeffs.get(0, ZERO)
    if normalize(a).depends_on(X) or normalize(b).depends_on(X):
        return None
    return a, b


def _x_dependent(g: Gen) -> bool:
    from .nodes import depends_on

    if g.kind == "sym":
        return g.name == X
    return depends_on(g.arg, X)


class _Term:
    __slots__ = ("n", "coeff", "exp_arg", "trig")

    def __init__(self, n, coeff, exp_arg, trig):
        self.n = n
        self.coeff = coeff
        self.exp_arg = exp_arg
        self.trig = trig


def _split(nf: NormalForm) -> tuple[list[_Term], Expr]:
    gens = nf.gens
    den_exps = [0] * len(gens)
    den_free: Expr
    if len(nf.denom) == 1:
        m, c = nf.denom[0]
        rest = []
        for i, e in enumerate(m):
            if not e:
                continue
            g = gens[i]
            if _x_dependent(g):
                if g.kind != "exp":
                    raise NotIntegrable(f"x-dependent denominator factor {g.to_expr()}")
                den_exps[i] = e
            else:
                rest.append(power(g.to_expr(), e))
        den_free = mul(Const(c), *rest)
    else:
        if any(_x_dependent(gens[i]) for m, _ in nf.denom for i, e in enumerate(m) if e):
            raise NotIntegrable("denominator depends on x")
        den_free = nf.denom_expr()

    terms = []
    for m, c in nf.numer:
        n = 0
        coeff: list[Expr] = [Const(c)]
        exp_parts: list[Expr] = []
        trig = None
        for i, e in enumerate(m):
            g = gens[i]
            k = e - den_exps[i]
            if not k:
                continue
            if not _x_dependent(g):
                coeff.append(power(g.to_expr(), k))
            elif g.kind == "sym":
                n = k
            elif g.kind == "exp":
                exp_parts.append(mul(Const(k), g.arg))
            elif g.kind in ("sin", "cos") and k == 1 and trig is None:
                trig = g
            else:
                raise NotIntegrable(f"unsupported factor {g.to_expr()}^{k}")
        terms.append(_Term(n, mul(*coeff), add(*exp_parts) if exp_parts else None, trig))
    return terms, den_free


def _integrate_term(t: _Term) -> Expr:
    if t.n < 0:
        raise NotIntegrable("negative powers of x")
    alpha, beta0 = ZERO, ZERO
    if t.exp_arg is not None:
        lin = _linear_in_x(t.exp_arg)
        if lin is None:
            raise NotIntegrable(f"exponent {t.exp_arg} is not linear in x")
        alpha, beta0 = lin
    xs = Sym(X)
    E = exp(simplify(add(mul(alpha, xs), beta0))) if t.exp_arg is not None else ONE
    a_zero = normalize(alpha).is_zero

    if t.trig is None:
        if a_zero:
            return mul(t.coeff, E, div(power(xs, t.n + 1), Const(t.n + 1)))
        parts = []
        for k in range(t.n + 1):
            c = Const((-1) ** k * factorial(t.n) // factorial(t.n - k))
            parts.append(mul(c, power(xs, t.n - k), div(ONE, power(alpha, k + 1))))
        return mul(t.coeff, E, add(*parts))

    lin = _linear_in_x(t.trig.arg)
    if lin is None:
        raise NotIntegrable(f"argument of {t.trig.to_expr()} is not linear in x")
    beta, _ = lin
    C, S = cos(t.trig.arg), sin(t.trig.arg)
    D = simplify(add(power(alpha, 2), power(beta, 2)))
    memo: dict[tuple[int, str], Expr] = {}

    def I(n: int, kind: str) -> Expr:
        # antiderivative of x^n * E * (C or S)
        if (n, kind) in memo:
            return memo[(n, kind)]
        if kind == "C":
            base = div(mul(E, add(mul(alpha, C), mul(beta, S))), D)
        else:
            base = div(mul(E, add(mul(alpha, S), mul(Const(-1), beta, C))), D)
        if n == 0:
            out = base
        else:
            if kind == "C":
                inner = add(mul(alpha, I(n - 1, "C")), mul(beta, I(n - 1, "S")))
            else:
                inner = add(mul(alpha, I(n - 1, "S")), mul(Const(-1), beta, I(n - 1, "C")))
            out = add(mul(power(xs, n), base), mul(Const(-n), div(inner, D)))
        memo[(n, kind)] = out
        return out

    return mul(t.coeff, I(t.n, "C" if t.trig.kind == "cos" else "S"))


def integrate_rulebased(e: Expr, var: str = X) -> Expr:
    """Antiderivative of ``e`` with respect to x, or raise NotIntegrable."""
    if var != X:
        raise NotIntegrable("only integration in x is supported")
    nf = normalize(e)
    if nf.depends_on(Y) or nf.depends_on(YP):
        raise ValueError("integrand must be free of y and y'")
    if nf.is_zero:
        return ZERO
    terms, den_free = _split(nf)
    result = simplify(div(add(*(_integrate_term(t) for t in terms)), den_free))
    check = normalize(differentiate(result, X) - e)
    if not check.is_zero:
        raise VerificationFailure(f"antiderivative self-check failed for {e}: residual {check}")
    return result


def verify_antiderivative(candidate: Expr, integrand: Expr) -> bool:
    return normalize(differentiate(candidate, X) - integrand).is_zero
