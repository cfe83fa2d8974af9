"""End-to-end acceptance criteria, one test per criterion.

Each test prints a PASS/FAIL line; the terminal summary repeats them.
"""

import random
import time

import pytest

from exprgen import random_quadratic

from odelin.expr import normalize, parse_expr
from odelin.expr.numeric import Verdict, is_zero
from odelin.lambda_sym import AuxPair, aux_system_residuals, lambda_determining_residual, lambda_from_aux
from odelin.lie import lie_conditions_residuals, trace_condition_residual
from odelin.linearizability import lie_tresse_residuals
from odelin.ode import parse_ode
from odelin.report import PipelineOptions, run_pipeline
from odelin.special import build_linear_odes, detect_special_class, solve_const_coeff, transforms_from_h
from odelin.transform import (
    PointTransform,
    explicit_residual,
    pushforward_coefficients,
    s_system_residuals,
    transform_matches_ode,
)
from odelin.validate import rk4_crosscheck

P = parse_expr
BK = ("b", "k")
C12 = ("c1", "c2")


def zero(e) -> bool:
    return normalize(e).is_zero


def all_zero(es) -> bool:
    return all(zero(e) for e in es)


def report(n, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
    assert ok, detail


@pytest.mark.criterion(1, "modified Emden end-to-end solve under 2 s")
def test_criterion_1_emden():
    eq = "y'' + 3*y*y' + y^3 = 0"
    t0 = time.perf_counter()
    rep = run_pipeline("solve", eq, PipelineOptions(explicit="(2*x+c1)/(x^2+c1*x+c2)"))
    dt = time.perf_counter() - t0
    ode = parse_ode(eq)
    lt = lie_tresse_residuals(ode)
    known_tr = PointTransform(P("x - 1/y"), P("x^2/2 - x/y"))
    res = explicit_residual(ode, P("(2*x+c1)/(x^2+c1*x+c2)", C12))
    ok = (
        rep.status == 0
        and all(rep.verified.values())
        and rep.verified.get("pushforward_match") is True
        and lt.first == P("0") and lt.second == P("0")
        and transform_matches_ode(known_tr, ode).matches
        and zero(res)
        and dt < 2.0
    )
    report(1, ok, f"exit {rep.status}, explicit residual {normalize(res).to_expr()}, {dt:.2f} s")


@pytest.mark.criterion(2, "Lienard-type with parameters b, k under 5 s")
def test_criterion_2_lienard():
    eq = "y'' + (b+3*k*y)*y' + k^2*y^3 + b*k*y^2 + b^2/4*y = 0"
    explicit = "b^2*(c1-x)/(2*b*k*x+4*k-2*c1*b*k+c2*b^2*k*exp(b/2*x))"
    t0 = time.perf_counter()
    ode = parse_ode(eq, BK)
    sc = detect_special_class(ode)
    detected = all_zero([sc.a - P("3*k", BK), sc.b - P("b", BK), sc.c - P("b^2/4", BK), sc.d])
    _, second = build_linear_odes(sc)
    basis = solve_const_coeff(second).functions
    want = [P("exp(-b*x/2)", BK), P("x*exp(-b*x/2)", BK)]
    repeated = all(zero(u - v) for u, v in zip(basis, want))
    tr = transforms_from_h(sc, *basis)
    generated_ok = transform_matches_ode(tr, ode).matches
    known_tr = PointTransform(
        P("(2*k*y+b)/(b*k*y)*exp(-b/2*x)", BK), P("(2*b*k*x*y+4*k*y+b^2*x)/(b^2*k*y)*exp(-b/2*x)", BK)
    )
    known_ok = transform_matches_ode(known_tr, ode).matches
    res = explicit_residual(ode, P(explicit, BK + C12))
    rep = run_pipeline("solve", eq, PipelineOptions(params=BK, explicit=explicit))
    dt = time.perf_counter() - t0
    ok = detected and repeated and generated_ok and known_ok and zero(res) and rep.status == 0 and dt < 5.0
    report(2, ok, f"detection {detected}, repeated root {repeated}, transforms {generated_ok}/{known_ok}, "
                  f"explicit residual zero {zero(res)}, exit {rep.status}, {dt:.2f} s")


SECTION4 = [
    (
        "y'' - 2/(x+y)*y'^2 - 1/(x+y)*y' = 0",
        [("-1/(x+y)", "0"), ("x/(y*(x+y))", "0"), ("x/((x+2*y)*(x+y))", "-2*(x+y)/(x*(x+2*y))")],
        ("y", "x*(x+2*y)"),
    ),
    ("x*y'' - y'^3 - y' = 0", [("1/y", "0")], ("1/y", "y + x^2/y")),
    (
        "y'' - 1/x*y'^3 + 2*y/(y^2-1)*y'^2 - 1/x*y' = 0",
        [("(3*y^2-3)/(y^3-3*y)", "0")],
        ("1/(y*(y^2-3))", "((y^3-3*y+2)*ln(y-1) + (2+3*y-y^3)*ln(y+1) + 3*x^2 - y^2)/(y*(y^2-3))"),
    ),
]


@pytest.mark.criterion(3, "cubic and quadratic corpus residuals exactly zero")
def test_criterion_3_corpus():
    failures = []
    for eq, auxes, (phi, psi) in SECTION4:
        ode = parse_ode(eq)
        aux0 = None
        for w, z in auxes:
            aux = AuxPair(P(w), P(z))
            aux0 = aux0 or aux
            rs = (*lie_conditions_residuals(ode, aux), *aux_system_residuals(ode, aux), trace_condition_residual(ode, aux))
            if not all_zero(rs):
                failures.append(f"{eq}: (w, z) = ({w}, {z})")
        tr = PointTransform(P(phi), P(psi))
        for S in (tr.phi, tr.psi):
            if not all_zero(s_system_residuals(S, ode, aux0)):
                failures.append(f"{eq}: S = {S}")
        if not transform_matches_ode(tr, ode).matches:
            failures.append(f"{eq}: pushforward")
    report(3, not failures, "all exact" if not failures else "; ".join(failures))


@pytest.mark.criterion(4, "negative control y'' = y^2")
def test_criterion_4_negative_control():
    rep = run_pipeline("check", "y'' = y^2")
    second = rep.lie_tresse["residuals"]["second"]
    ok = rep.status == 1 and second["residual"] == "-6" and second["verdict"] == "non-zero"
    report(4, ok, f"exit {rep.status}, second residual {second['residual']}")


@pytest.mark.criterion(5, "200-case generative round trip under 60 s")
def test_criterion_5_round_trip():
    rng = random.Random(20240601)
    t0 = time.perf_counter()
    done = 0
    failures = []
    while done < 200:
        tr = PointTransform(random_quadratic(rng), random_quadratic(rng))
        if not tr.is_regular():
            continue
        co, ode = pushforward_coefficients(tr)
        aux = co.aux()
        lt = lie_tresse_residuals(ode)
        checks = {
            "lie-tresse": lt.linearizable and zero(lt.first) and zero(lt.second),
            "lie": all_zero(lie_conditions_residuals(ode, aux)),
            "trace": zero(trace_condition_residual(ode, aux)),
            "lambda": zero(lambda_determining_residual(ode, lambda_from_aux(ode, aux))),
            "s-system": all_zero(s_system_residuals(tr.phi, ode, aux)) and all_zero(s_system_residuals(tr.psi, ode, aux)),
        }
        bad = [k for k, v in checks.items() if not v]
        if bad:
            failures.append(f"({tr.phi}, {tr.psi}): {bad}")
        done += 1
    dt = time.perf_counter() - t0
    ok = not failures and dt < 60.0
    report(5, ok, f"{done - len(failures)}/{done} exact in {dt:.1f} s" + (f"; first failure {failures[0]}" if failures else ""))


LAMBDA_CASES = [
    ("y'' + 3*y*y' + y^3 = 0", "1/y", "y", True),
    ("y'' - 2/(x+y)*y'^2 - 1/(x+y)*y' = 0", "-1/(x+y)", "0", True),
    ("y'' - 2/(x+y)*y'^2 - 1/(x+y)*y' = 0", "x/((x+2*y)*(x+y))", "-2*(x+y)/(x*(x+2*y))", True),
    ("x*y'' - y'^3 - y' = 0", "1/y", "0", True),
    ("y'' - 1/x*y'^3 + 2*y/(y^2-1)*y'^2 - 1/x*y' = 0", "(3*y^2-3)/(y^3-3*y)", "0", True),
    ("y'' + 3*y*y' + y^3 = 0", "0", "0", False),
    ("y'' - 2/(x+y)*y'^2 - 1/(x+y)*y' = 0", "1/y", "0", False),
    ("x*y'' - y'^3 - y' = 0", "y", "0", False),
    ("y'' - 1/x*y'^3 + 2*y/(y^2-1)*y'^2 - 1/x*y' = 0", "1/y", "0", False),
]


@pytest.mark.criterion(6, "lambda determining residual zero iff reduced system zero")
def test_criterion_6_lambda_equivalence():
    agree = 0
    seen = {True: 0, False: 0}
    mismatches = []
    for eq, w, z, _ in LAMBDA_CASES:
        ode = parse_ode(eq)
        aux = AuxPair(P(w), P(z))
        lam_zero = zero(lambda_determining_residual(ode, lambda_from_aux(ode, aux)))
        red_zero = all_zero(aux_system_residuals(ode, aux))
        if lam_zero == red_zero:
            agree += 1
            seen[lam_zero] += 1
        else:
            mismatches.append(f"{eq} with ({w}, {z})")
    expected = {v: sum(1 for c in LAMBDA_CASES if c[3] is v) for v in (True, False)}
    ok = not mismatches and seen[True] >= 3 and seen[False] >= 3 and seen == expected
    report(6, ok, f"{agree}/{len(LAMBDA_CASES)} agree ({seen[True]} passing, {seen[False]} failing)")


@pytest.mark.criterion(7, "RK4 cross-check below 1e-5")
def test_criterion_7_rk4():
    emden = parse_ode("y'' + 3*y*y' + y^3 = 0")
    d1 = rk4_crosscheck(emden, P("(2*x+c1)/(x^2+c1*x+c2)", C12), {"c1": 0, "c2": 1}, (0, 1), 1e-3)
    ex41 = parse_ode("y'' - 2/(x+y)*y'^2 - 1/(x+y)*y' = 0")
    # x(x+2y) = c1*y + c2 with c1 = 0, c2 = 3
    d2 = rk4_crosscheck(ex41, P("(3 - x^2)/(2*x)"), {}, (1, 2), 1e-3)
    report(7, d1 < 1e-5 and d2 < 1e-5, f"Emden {d1:.2e}, quadratic example {d2:.2e}")


@pytest.mark.criterion(8, "kernel soundness: exp merges and numeric-only-zero surfaced")
def test_criterion_8_kernel_soundness():
    merges = [
        P("exp(x)*exp(-x) - 1"),
        P("exp(x)^2 - exp(2*x)"),
        P("exp(x/2)*exp(x/3) - exp(5*x/6)"),
        P("exp(b*x)*exp(-b*x/2) - exp(b/2*x)", ["b"]),
        P("exp(x+y)/exp(y) - exp(x)"),
    ]
    merges_ok = all(zero(e) and is_zero(e) is Verdict.ZERO for e in merges)
    ln_case = P("ln(x*y) - ln(x) - ln(y)")
    verdict = is_zero(ln_case)
    rep = run_pipeline("check", "y'' + y*(ln(x*y) - ln(x) - ln(y))*y' = 0")
    surfaced = any("not symbolically" in w for w in rep.warnings) and rep.status != 0
    treated_as_zero = rep.verdict == "linearizable"
    ok = merges_ok and verdict is Verdict.NUMERIC_ONLY_ZERO and surfaced and not treated_as_zero
    report(8, ok, f"exp merges {merges_ok}, ln case {verdict.value}, surfaced {surfaced}, exit {rep.status}")
