import re

import pytest
import sympy as sp

from oracle import to_sympy

from odelin.errors import BasisInvalid, GNotASolution, IntegrationUnavailable, NonConstant, NotInClass, Unsolved
from odelin.expr import normalize, parse_expr
from odelin.lambda_sym import aux_system_residuals
from odelin.lie import lie_conditions_residuals
from odelin.ode import parse_ode
from odelin.special import (
    SpecialClassCoeffs,
    aux_from_g,
    build_linear_odes,
    check_basis,
    detect_special_class,
    solve_const_coeff,
    special_general_solution,
    transforms_from_h,
    wronskian,
)
from odelin.transform import transform_matches_ode

P = parse_expr
BK = ["b", "k"]
LIENARD = parse_ode("y'' + (b+3*k*y)*y' + k^2*y^3 + b*k*y^2 + b^2/4*y = 0", BK)
EMDEN = parse_ode("y'' + 3*y*y' + y^3 = 0")


def zero(e):
    return normalize(e).is_zero


def coeffs(sc):
    return tuple(str(e) for e in (sc.a, sc.b, sc.c, sc.d))


def test_detect_emden():
    assert coeffs(detect_special_class(EMDEN)) == ("3", "0", "0", "0")


def test_detect_lienard():
    sc = detect_special_class(LIENARD)
    for got, want in zip((sc.a, sc.b, sc.c, sc.d), ("3*k", "b", "b^2/4", "0")):
        assert zero(got - P(want, BK))


def test_detect_variable_coefficient():
    ode = parse_ode("y'' + x*y*y' + x^2/9*y^3 + 1/3*y^2 + x = 0")
    sc = detect_special_class(ode)
    assert coeffs(sc) == ("x", "0", "0", "x")


@pytest.mark.parametrize(
    "eq, msg",
    [
        ("y'' + 3*y*y' + y^3 + y'^2 = 0", "F2"),
        ("y'' + 3*y*y' + 2*y^3 = 0", "y^3 coefficient of F is 2, expected 1"),
        ("y'' + 3*y*y' + y^3 + y^2 = 0", "y^2 coefficient"),
        ("y'' + y' + y = 0", "a(x) vanishes"),
        ("y'' + y^2*y' = 0", "not linear in y"),
    ],
)
def test_detect_rejects(eq, msg):
    with pytest.raises(NotInClass, match=re.escape(msg)):
        detect_special_class(parse_ode(eq))


def test_template_reassembles():
    for ode in (EMDEN, LIENARD):
        t = detect_special_class(ode).template()
        assert all(zero(u - v) for u, v in zip(t.coefficients, ode.coefficients))


def test_linear_odes():
    third, second = build_linear_odes(SpecialClassCoeffs(P("3"), P("0"), P("0"), P("x")))
    assert third.order == 3 and second.order == 2
    assert str(third) == "Y''' + (x)*Y = 0"
    third, second = build_linear_odes(detect_special_class(LIENARD))
    assert zero(second.coeffs[0] - P("b^2/4", BK)) and zero(second.coeffs[1] - P("b", BK))
    assert zero(second.residual(P("x*exp(-b*x/2)", BK)))


def test_linear_ode_residual_against_oracle():
    sc = SpecialClassCoeffs(P("x"), P("1"), P("x^2"), P("2"))
    third, _ = build_linear_odes(sc)
    u = P("exp(x)*x")
    x = sp.Symbol("x")
    a, b, c, d = x, 1, x**2, 2
    U = to_sympy(u)
    # (a Y)'' form expanded independently
    k2 = b - 2 * sp.diff(a, x) / a
    k1 = -(sp.diff(a, x, 2) / a - 2 * (sp.diff(a, x) / a) ** 2 + b * sp.diff(a, x) / a - c)
    k0 = d * a / 3
    ref = sp.diff(U, x, 3) + k2 * sp.diff(U, x, 2) + k1 * sp.diff(U, x) + k0 * U
    assert sp.simplify(to_sympy(third.residual(u)) - ref) == 0


@pytest.mark.parametrize(
    "b, c, basis",
    [
        ("0", "0", ["1", "x"]),
        ("-3", "2", ["exp(x)", "exp(2*x)"]),
        ("2", "1", ["exp(-x)", "x*exp(-x)"]),
        ("0", "1", ["sin(x)", "cos(x)"]),
        ("2", "5", ["exp(-x)*sin(2*x)", "exp(-x)*cos(2*x)"]),
    ],
)
def test_second_order_solver(b, c, basis):
    _, second = build_linear_odes(SpecialClassCoeffs(P("1"), P(b), P(c), P("0")))
    sol = solve_const_coeff(second)
    check_basis(second, sol.functions)
    got = {str(normalize(f).to_expr()) for f in sol.functions}
    want = {str(normalize(P(f)).to_expr()) for f in basis}
    assert got == want


def test_second_order_parametric_repeated_root():
    _, second = build_linear_odes(detect_special_class(LIENARD))
    sol = solve_const_coeff(second)
    check_basis(second, sol.functions)
    assert len(sol.functions) == 2


def test_solver_refusals():
    _, irr = build_linear_odes(SpecialClassCoeffs(P("1"), P("0"), P("-2"), P("0")))
    with pytest.raises(Unsolved):
        solve_const_coeff(irr)
    _, var = build_linear_odes(SpecialClassCoeffs(P("1"), P("x"), P("0"), P("0")))
    with pytest.raises(NonConstant):
        solve_const_coeff(var)


def test_third_order_solver():
    third, _ = build_linear_odes(SpecialClassCoeffs(P("3"), P("0"), P("-1"), P("0")))
    sol = solve_const_coeff(third)
    check_basis(third, sol.functions)
    assert len(sol.functions) == 3


def test_wronskian():
    assert zero(wronskian([P("exp(x)"), P("exp(2*x)")]) - P("exp(3*x)"))
    assert zero(wronskian([P("x"), P("2*x")]))


def test_basis_invalid():
    _, second = build_linear_odes(detect_special_class(EMDEN))
    with pytest.raises(BasisInvalid, match="Wronskian"):
        check_basis(second, [P("x"), P("x")])
    with pytest.raises(BasisInvalid, match="does not solve"):
        check_basis(second, [P("x^2"), P("1")])


@pytest.mark.parametrize("g", ["1", "x", "x^2"])
def test_aux_from_g_emden(g):
    sc = detect_special_class(EMDEN)
    aux = aux_from_g(sc, P(g))
    assert all(zero(r) for r in lie_conditions_residuals(EMDEN, aux))
    assert all(zero(r) for r in aux_system_residuals(EMDEN, aux))


def test_aux_from_g_unit():
    aux = aux_from_g(detect_special_class(EMDEN), P("1"))
    assert zero(aux.w - P("1/y")) and zero(aux.z - P("y"))


def test_aux_from_g_rejects_non_solution():
    with pytest.raises(GNotASolution):
        aux_from_g(detect_special_class(EMDEN), P("x^3"))


def test_transforms_emden():
    sc = detect_special_class(EMDEN)
    tr = transforms_from_h(sc, P("1"), P("x"))
    assert zero(tr.phi - P("x - 1/y")) and zero(tr.psi - P("x^2/2 - x/y"))
    assert transform_matches_ode(tr, EMDEN).matches
    gs = special_general_solution(sc, tr)
    assert gs.explicit is not None


def test_transforms_lienard():
    sc = detect_special_class(LIENARD)
    tr = transforms_from_h(sc, P("exp(-b*x/2)", BK), P("x*exp(-b*x/2)", BK))
    assert transform_matches_ode(tr, LIENARD).matches
    assert zero(tr.phi - P("-(2*k*y+b)/(b*y)*exp(-b*x/2)", BK))


def test_transforms_need_integrable_and_d_zero():
    sc = SpecialClassCoeffs(P("x"), P("0"), P("0"), P("1"))
    with pytest.raises(NotInClass, match="d = 0"):
        transforms_from_h(sc, P("1"), P("x"))
    sc = SpecialClassCoeffs(P("exp(x^2)"), P("0"), P("0"), P("0"))
    with pytest.raises(IntegrationUnavailable):
        transforms_from_h(sc, P("1"), P("x"))
