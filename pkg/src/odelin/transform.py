"""Point transformations t = phi(x, y), u = psi(x, y) to the free particle u_tt = 0."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import AnsatzExhausted, AuxInvalid, FirstIntegralCheckFailed, SingularJacobian
from .expr import Expr, differentiate, normalize, simplify
from .expr.nodes import X, Y, YP, Const, Sym, add, div, mul, neg, power, substitute
from .lambda_sym import AuxPair
from .lie import lie_conditions_residuals
from .linalg import IntDomain, PolyDomain, clear_denominators, nullspace, rank_and_pivots
from .ode import CubicODE, total_derivative

yp = Sym(YP)


@dataclass(frozen=True)
class PointTransform:
    phi: Expr
    psi: Expr

    def jacobian(self) -> Expr:
        d = differentiate
        return simplify(d(self.phi, X) * d(self.psi, Y) - d(self.phi, Y) * d(self.psi, X))

    def is_regular(self) -> bool:
        return not normalize(self.jacobian()).is_zero


@dataclass(frozen=True)
class PushforwardCoefficients:
    A: Expr
    B: Expr
    w: Expr
    z: Expr
    P: Expr
    Q: Expr

    def aux(self) -> AuxPair:
        return AuxPair(self.w, self.z)


def pushforward_coefficients(
    tr: PointTransform, params: Iterable[str] = ()
) -> tuple[PushforwardCoefficients, CubicODE]:
    """The six Jacobian quotients and the cubic ODE that u_tt = 0 becomes."""
    J = tr.jacobian()
    if normalize(J).is_zero:
        raise SingularJacobian(f"Jacobian of ({tr.phi}, {tr.psi}) vanishes identically")
    d = differentiate
    phi, psi = tr.phi, tr.psi
    px, py = d(phi, X), d(phi, Y)
    qx, qy = d(psi, X), d(psi, Y)
    pxx, pxy, pyy = d(px, X), d(px, Y), d(py, Y)
    qxx, qxy, qyy = d(qx, X), d(qx, Y), d(qy, Y)

    def quot(a, b, c, e):
        return simplify(div(a * b - c * e, J))

    A = quot(py, qyy, qy, pyy)
    B = quot(px, qyy, qx, pyy)
    w = quot(py, qxy, qy, pxy)
    Q = quot(px, qxx, qx, pxx)
    z = quot(px, qxy, qx, pxy)
    P = quot(py, qxx, qy, pxx)
    coeffs = PushforwardCoefficients(A, B, w, z, P, Q)
    two = Const(2)
    ode = CubicODE(
        A,
        simplify(B + two * w),
        simplify(P + two * z),
        Q,
        params=tuple(params),
    )
    return coeffs, ode


@dataclass(frozen=True)
class MatchResult:
    matches: bool
    residuals: tuple[Expr, Expr, Expr, Expr]


def transform_matches_ode(tr: PointTransform, ode: CubicODE) -> MatchResult:
    """Does (phi, psi) map ``ode`` to u_tt = 0?  Residuals are pushforward minus input."""
    _, pushed = pushforward_coefficients(tr, ode.params)
    res = tuple(simplify(a - b) for a, b in zip(pushed.coefficients, ode.coefficients))
    return MatchResult(all(normalize(r).is_zero for r in res), res)


# ---------------------------------------------------------------------------
# first integrals


@dataclass(frozen=True)
class FirstIntegral:
    expr: Expr
    kind: str  # "I1", "I2", "I3"


def _checked(ode: CubicODE, e: Expr, kind: str) -> FirstIntegral:
    e = simplify(e)
    res = simplify(total_derivative(ode, e))
    if not normalize(res).is_zero:
        raise FirstIntegralCheckFailed(kind, res)
    return FirstIntegral(e, kind)


def first_integrals(tr: PointTransform, ode: CubicODE) -> tuple[FirstIntegral, FirstIntegral]:
    """I1 = (psi_x + psi_y y')/(phi_x + phi_y y') and I2 = psi - phi*I1, both checked."""
    d = differentiate
    I1 = div(d(tr.psi, X) + d(tr.psi, Y) * yp, d(tr.phi, X) + d(tr.phi, Y) * yp)
    I2 = tr.psi - tr.phi * I1
    return _checked(ode, I1, "I1"), _checked(ode, I2, "I2")


def quotient_integral(tr: PointTransform, ode: CubicODE) -> FirstIntegral:
    I1, I2 = first_integrals(tr, ode)
    return _checked(ode, div(I2.expr, I1.expr), "I3")


# ---------------------------------------------------------------------------
# the linear system for S


def s_system_exprs(S: Expr, ode: CubicODE, aux: AuxPair) -> tuple[Expr, Expr, Expr]:
    d = differentiate
    F3, F2, F1, F = ode.coefficients
    w, z = aux.w, aux.z
    Sx, Sy = d(S, X), d(S, Y)
    two = Const(2)
    e1 = d(Sy, Y) + (two * w - F2) * Sy + F3 * Sx
    e2 = d(Sx, Y) + w * Sx - z * Sy
    e3 = d(Sx, X) + (F1 - two * z) * Sx - F * Sy
    return e1, e2, e3


def s_system_residuals(S: Expr, ode: CubicODE, aux: AuxPair) -> tuple[Expr, Expr, Expr]:
    """Residuals of
    S_yy + (2w - F2) S_y + F3 S_x = 0,
    S_xy + w S_x - z S_y = 0,
    S_xx + (F1 - 2z) S_x - F S_y = 0.
    """
    return tuple(simplify(e) for e in s_system_exprs(S, ode, aux))


@dataclass(frozen=True)
class AnsatzRung:
    name: str
    basis: tuple[Expr, ...]


def _monomials(D: int) -> list[tuple[int, int]]:
    return [(i, d - i) for d in range(D + 1) for i in range(d, -1, -1)]


def poly_rung(D: int) -> AnsatzRung:
    xs, ys = Sym(X), Sym(Y)
    basis = tuple(mul(power(xs, i), power(ys, j)) for i, j in _monomials(D))
    return AnsatzRung(f"poly{D}", basis)


def inv_y_rung(D: int, K: int = 2) -> AnsatzRung:
    xs, ys = Sym(X), Sym(Y)
    seen = []
    for k in range(K + 1):
        for i, j in _monomials(D):
            key = (i, j - k)
            if key not in seen:
                seen.append(key)
    return AnsatzRung(f"inv-y{D}", tuple(mul(power(xs, i), power(ys, j)) for i, j in seen))


def inv_linear_rung(D: int, K: int = 2) -> AnsatzRung:
    xs, ys = Sym(X), Sym(Y)
    polys = [mul(power(xs, i), power(ys, j)) for i, j in _monomials(D)]
    basis = list(polys)
    for lin in (add(xs, ys), add(xs, mul(Const(2), ys))):
        for k in range(1, K + 1):
            basis.extend(div(p, power(lin, k)) for p in polys)
    return AnsatzRung(f"inv-lin{D}", tuple(basis))


def user_rung(basis: Sequence[Expr], name: str = "user") -> AnsatzRung:
    return AnsatzRung(name, tuple(basis))


def default_ladder() -> list[AnsatzRung]:
    """Polynomials, then polynomials over powers of y, then over (x+y), (x+2y)."""
    rungs = [poly_rung(D) for D in range(1, 5)]
    rungs += [inv_y_rung(D) for D in range(1, 4)]
    rungs += [inv_linear_rung(D) for D in range(1, 3)]
    return rungs


LADDER_NAMES = ("poly", "inv-y", "inv-linear")


def ladder_from_names(names: Sequence[str]) -> list[AnsatzRung]:
    rungs: list[AnsatzRung] = []
    for n in names:
        if n == "poly":
            rungs += [poly_rung(D) for D in range(1, 5)]
        elif n == "inv-y":
            rungs += [inv_y_rung(D) for D in range(1, 4)]
        elif n == "inv-linear":
            rungs += [inv_linear_rung(D) for D in range(1, 3)]
        else:
            raise ValueError(f"unknown ansatz ladder {n!r}; choose from {LADDER_NAMES}")
    return rungs


def _coefficient_rows(exprs: Sequence[Expr], params: Sequence[str]):
    """Linear conditions on c for sum_k c_k * exprs[k] == 0 identically.

    Returns (rows, domain).  Coefficients are grouped by monomials in
    everything except the parameters; parameters stay in the entries.
    """
    unknowns = [f"_c{k}" for k in range(len(exprs))]
    total = add(*(mul(Sym(u), e) for u, e in zip(unknowns, exprs)))
    nf = normalize(total)
    gens = nf.gens
    c_index = {}
    param_idx = []
    other_idx = []
    for i, g in enumerate(gens):
        if g.kind == "sym" and g.name in unknowns:
            c_index[i] = unknowns.index(g.name)
        elif g.kind == "sym" and g.name in params:
            param_idx.append(i)
        else:
            other_idx.append(i)
    used_params = [gens[i].name for i in param_idx]
    groups: dict[tuple, dict[int, list]] = {}
    for m, c in nf.numer:
        ks = [i for i in c_index if m[i]]
        if len(ks) != 1 or m[ks[0]] != 1:
            raise ArithmeticError("ansatz combination is not linear in the unknowns")
        col = c_index[ks[0]]
        key = tuple(m[i] for i in other_idx)
        pmono = tuple(m[i] for i in param_idx)
        groups.setdefault(key, {}).setdefault(col, []).append((pmono, c))
    n = len(exprs)
    if not used_params:
        rows = []
        for key in sorted(groups, reverse=True):
            row = [Fraction(0)] * n
            for col, items in groups[key].items():
                row[col] = sum(c for _, c in items)
            rows.append(clear_denominators(row))
        return rows, IntDomain
    dom = PolyDomain(used_params)
    rows = []
    for key in sorted(groups, reverse=True):
        frac_row: list[dict] = [dict() for _ in range(n)]
        den = 1
        for col, items in groups[key].items():
            for pm, c in items:
                frac_row[col][pm] = frac_row[col].get(pm, Fraction(0)) + c
                den = den * c.denominator // _gcd(den, c.denominator)
        row = []
        for entry in frac_row:
            row.append(dom.ring.from_dict({pm: int(c * den) for pm, c in entry.items() if c}))
        rows.append(row)
    return rows, dom


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def _entry_expr(v, dom) -> Expr:
    if dom is IntDomain:
        return Const(v)
    return add(
        *(
            mul(Const(int(c)), *(power(Sym(n), e) for n, e in zip(dom.names, m)))
            for m, c in v.terms()
        )
    )


def independent_subset(basis: Sequence[Expr], params: Sequence[str]) -> list[Expr]:
    """Drop ansatz members that are linear combinations of earlier ones."""
    if not basis:
        return []
    rows, dom = _coefficient_rows(basis, params)
    pivots = rank_and_pivots(rows, dom)
    return [basis[i] for i in pivots]


def s_nullspace(basis: Sequence[Expr], ode: CubicODE, aux: AuxPair) -> list[Expr]:
    """Every solution of the S-system inside span(basis), as a basis of expressions."""
    per_eq = [s_system_exprs(b, ode, aux) for b in basis]
    rows = []
    dom = None
    for j in range(3):
        r, dj = _coefficient_rows([pe[j] for pe in per_eq], ode.params)
        if dom is None or (dj is not IntDomain and dom is IntDomain):
            dom_new = dj
        else:
            dom_new = dom
        rows.append((r, dj))
        dom = dom_new
    # bring all rows into one domain
    all_rows = []
    for r, dj in rows:
        if dj is dom:
            all_rows += r
        elif dj is IntDomain:
            all_rows += [[dom.ring(v) for v in row] for row in r]
        else:
            all_rows += [[_convert(v, dj, dom) for v in row] for row in r]
    vecs = nullspace(all_rows, len(basis), dom)
    sols = []
    for v in vecs:
        S = add(*(mul(_entry_expr(c, dom), b) for c, b in zip(v, basis) if c))
        sols.append(simplify(S))
    return sols


def _convert(v, src: PolyDomain, dst) -> object:
    if dst is IntDomain:
        return int(v.LC) if v else 0
    terms = {}
    for m, c in v.terms():
        full = [0] * len(dst.names)
        for n, e in zip(src.names, m):
            full[dst.names.index(n)] = e
        terms[tuple(full)] = int(c)
    return dst.ring.from_dict(terms) if terms else dst.zero


@dataclass(frozen=True)
class SSolution:
    solutions: tuple[Expr, ...]
    transform: PointTransform
    pair: tuple[int, int]
    rung: str


def _is_constant(e: Expr) -> bool:
    nf = normalize(e)
    return not (nf.depends_on(X) or nf.depends_on(Y))


def solve_s_system(
    ode: CubicODE, aux: AuxPair, ladder: Sequence[AnsatzRung] | None = None
) -> SSolution:
    """Find two independent non-constant S with a regular Jacobian.

    Tries each ansatz rung in order; the first rung yielding a regular pair
    wins.  Raises AuxInvalid if (w, z) does not satisfy the Lie conditions
    and AnsatzExhausted if no rung yields a pair.
    """
    res = lie_conditions_residuals(ode, aux)
    if not all(normalize(r).is_zero for r in res):
        raise AuxInvalid("(w, z) does not satisfy the Lie conditions: residuals " + ", ".join(map(str, res)))
    if ladder is None:
        ladder = default_ladder()
    tried = []
    for rung in ladder:
        basis = independent_subset(rung.basis, ode.params)
        sols = [s for s in s_nullspace(basis, ode, aux) if not _is_constant(s)]
        tried.append(f"{rung.name}:{len(sols)}")
        if len(sols) < 2:
            continue
        for i, j in combinations(range(len(sols)), 2):
            tr = PointTransform(sols[i], sols[j])
            if tr.is_regular():
                return SSolution(tuple(sols), tr, (i, j), rung.name)
    raise AnsatzExhausted("no pair of independent non-constant solutions found (" + ", ".join(tried) + ")")


# ---------------------------------------------------------------------------
# general solutions


@dataclass(frozen=True)
class GeneralSolution:
    """psi(x, y) = c1*phi(x, y) + c2, optionally solved as y = explicit(x; c1, c2)."""

    phi: Expr
    psi: Expr
    constants: tuple[str, str] = ("c1", "c2")
    explicit: Expr | None = None

    def implicit(self) -> Expr:
        c1, c2 = (Sym(c) for c in self.constants)
        return simplify(self.psi - c1 * self.phi - c2)

    def implicit_text(self) -> str:
        c1, c2 = self.constants
        return f"{self.psi} = {c1}*({self.phi}) + {c2}"


def constant_names(params: Sequence[str]) -> tuple[str, str]:
    for a, b in (("c1", "c2"), ("C1", "C2"), ("k1", "k2")):
        if a not in params and b not in params:
            return a, b
    raise ValueError("cannot choose names for the integration constants")


def solve_implicit_for_y(relation: Expr) -> Expr | None:
    """Solve relation(x, y) = 0 for y when its numerator is linear in y."""
    from .expr import poly_coefficients

    nf = normalize(relation)
    num = nf.numer_expr()
    try:
        coeffs = poly_coefficients(num, Y)
    except ValueError:
        return None
    if set(coeffs) - {0, 1} or 1 not in coeffs:
        return None
    return normalize(neg(div(coeffs.get(0, Const(0)), coeffs[1]))).to_display_expr()


def general_solution(tr: PointTransform, params: Sequence[str] = ()) -> GeneralSolution:
    consts = constant_names(params)
    gs = GeneralSolution(tr.phi, tr.psi, consts)
    explicit = solve_implicit_for_y(gs.implicit())
    return GeneralSolution(tr.phi, tr.psi, consts, explicit)


@dataclass(frozen=True)
class GSVerification:
    implicit_ok: bool | None
    explicit_ok: bool | None
    implicit_residuals: tuple[Expr, ...] = ()
    explicit_residual: Expr | None = None
    mode: str = ""

    @property
    def ok(self) -> bool:
        checks = [c for c in (self.implicit_ok, self.explicit_ok) if c is not None]
        return bool(checks) and all(checks)


def explicit_residual(ode: CubicODE, Yx: Expr) -> Expr:
    """ODE residual of y = Yx(x); zero iff Yx solves the ODE identically."""
    Y1 = differentiate(Yx, X)
    Y2 = differentiate(Y1, X)
    F3, F2, F1, F = (substitute(c, {Y: Yx}) for c in ode.coefficients)
    return simplify(Y2 + F3 * power(Y1, 3) + F2 * power(Y1, 2) + F1 * Y1 + F)


def verify_general_solution(ode: CubicODE, gs: GeneralSolution) -> GSVerification:
    """Implicit form via the first-integral route, explicit form by substitution."""
    implicit_ok = None
    implicit_res: tuple[Expr, ...] = ()
    modes = []
    if gs.phi is not None and gs.psi is not None:
        tr = PointTransform(gs.phi, gs.psi)
        if tr.is_regular():
            d = differentiate
            I1 = div(d(tr.psi, X) + d(tr.psi, Y) * yp, d(tr.phi, X) + d(tr.phi, Y) * yp)
            I2 = tr.psi - tr.phi * I1
            implicit_res = tuple(simplify(total_derivative(ode, I)) for I in (I1, I2))
            implicit_ok = all(normalize(r).is_zero for r in implicit_res)
            modes.append("first-integrals")
        else:
            implicit_ok = False
    explicit_ok = None
    exp_res = None
    if gs.explicit is not None:
        exp_res = explicit_residual(ode, gs.explicit)
        explicit_ok = normalize(exp_res).is_zero
        modes.append("substitution")
    return GSVerification(implicit_ok, explicit_ok, implicit_res, exp_res, "+".join(modes))
