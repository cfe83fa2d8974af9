import random

import pytest
import sympy as sp

from exprgen import random_expr
from oracle import same, to_sympy, total_derivative as oracle_td, x, y, yp

from odelin.errors import DegenerateLeading, NotCubic, ParseError
from odelin.expr import normalize, parse_expr, parse_equation
from odelin.expr.nodes import Sym, YP, YPP, add, mul, power
from odelin.ode import extract_cubic, from_coefficients, parse_ode, total_derivative

P = parse_expr
EMDEN = "y'' + 3*y*y' + y^3 = 0"


def coeffs(ode):
    return tuple(str(c) for c in ode.coefficients)


def test_emden_coefficients():
    assert coeffs(parse_ode(EMDEN)) == ("0", "0", "3*y", "y^3")


def test_divides_by_leading_coefficient():
    ode = parse_ode("x*y'' - y'^3 - y' = 0")
    assert coeffs(ode) == ("-1/x", "0", "-1/x", "0")
    assert str(ode.leading) == "x"
    assert [str(s) for s in ode.singular_loci()] == ["x"]


def test_rhs_form_is_accepted():
    assert coeffs(parse_ode("y'' = -3*y*y' - y^3")) == coeffs(parse_ode(EMDEN))


def test_degree_four_is_not_cubic():
    with pytest.raises(NotCubic):
        parse_ode("y'' = y'^4")


@pytest.mark.parametrize("text", ["y''^2 = y", "exp(y')*y'' = 1", "y'' = 1/y'"])
def test_other_non_cubic_inputs(text):
    with pytest.raises(NotCubic):
        parse_ode(text)


def test_missing_second_derivative():
    with pytest.raises(DegenerateLeading):
        parse_ode("y' = y")


def test_equation_needs_one_equals_sign():
    with pytest.raises(ParseError):
        parse_equation("y'' = 0 = 1")
    # a bare expression is read as "expr = 0"
    assert parse_equation("y'' + y") == parse_equation("y'' + y = 0")


def test_extraction_inverts_assembly():
    rng = random.Random(17)
    for _ in range(40):
        F = [random_expr(rng, 2, names=("x", "y"), kernels=False) for _ in range(4)]
        M = add(random_expr(rng, 1, names=("x", "y"), kernels=False), Sym("x"), power(Sym("y"), 2))
        if normalize(M).is_zero:
            continue
        yp_ = Sym(YP)
        body = add(Sym(YPP), mul(F[0], power(yp_, 3)), mul(F[1], power(yp_, 2)), mul(F[2], yp_), F[3])
        try:
            ode = extract_cubic(mul(M, body))
        except ZeroDivisionError:
            continue
        for got, want in zip(ode.coefficients, F):
            assert normalize(got - want).is_zero


def test_total_derivative_examples():
    ode = parse_ode(EMDEN)
    assert str(total_derivative(ode, P("y"))) == "y'"
    r = total_derivative(ode, P("y'/y - y"))
    assert normalize(r - P("-y'^2/y^2 - 4*y' - y^2")).is_zero
    I1 = P("(x*y^2 - y + x*y')/(y^2 + y')")
    assert normalize(total_derivative(ode, I1)).is_zero


def test_total_derivative_matches_oracle():
    ode = parse_ode("y'' - 2/(x+y)*y'^2 - 1/(x+y)*y' = 0")
    e = P("x*y'^2/(x+y) + y")
    F3, F2, F1, F = (to_sympy(c) for c in ode.coefficients)
    assert same(total_derivative(ode, e), oracle_td(to_sympy(e), F3, F2, F1, F))


def test_total_derivative_is_a_derivation():
    ode = parse_ode(EMDEN)
    rng = random.Random(5)
    for _ in range(20):
        a = random_expr(rng, 2, kernels=False)
        b = random_expr(rng, 2, kernels=False)
        try:
            lhs = total_derivative(ode, a * b)
            rhs = a * total_derivative(ode, b) + b * total_derivative(ode, a)
            assert normalize(lhs - rhs).is_zero
        except ZeroDivisionError:
            continue


def test_from_coefficients_round_trip():
    ode = from_coefficients(P("0"), P("-2/(x+y)"), P("-1/(x+y)"), P("0"))
    assert coeffs(parse_ode(str(ode))) == coeffs(ode)
