"""Exact nullspaces by fraction-free Gauss-Jordan elimination.

Matrix entries live in an integral domain given by a small adapter: plain
Python ints, or polynomials with integer coefficients in the free
parameters (sympy ``PolyElement`` over ZZ).  Parameters are treated as
transcendental, so a pivot is usable whenever it is not the zero polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from sympy.polys.domains import ZZ
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring as sp_ring


class IntDomain:
    zero = 0
    one = 1

    @staticmethod
    def exquo(a, b):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError(f"inexact division {a}/{b}")
        return q

    @staticmethod
    def gcd(a, b):
        return gcd(a, b)

    @staticmethod
    def is_negative(a) -> bool:
        return a < 0


class PolyDomain:
    """Integer polynomials in named parameters."""

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        self.ring, *self.gens = sp_ring(",".join(self.names), ZZ, grlex)
        self.zero = self.ring.zero
        self.one = self.ring.one

    def exquo(self, a, b):
        return a.exquo(b)

    def gcd(self, a, b):
        return a.gcd(b)

    def is_negative(self, a) -> bool:
        return bool(a) and a.LC < 0


def rref_fraction_free(rows: list[list], dom) -> tuple[list[list], list[int], object]:
    """Fraction-free Gauss-Jordan elimination, in place on a copy.

    Returns (matrix, pivot columns, d).  Every pivot entry of the result
    equals ``d`` and every other entry of a pivot column is zero, so the
    rational RREF is the result divided by ``d``.
    """
    A = [list(r) for r in rows]
    m = len(A)
    n = len(A[0]) if A else 0
    pivots: list[int] = []
    prev = dom.one
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        for i in range(m):
            if i == r:
                continue
            a_ic = A[i][c]
            row_i = A[i]
            row_r = A[r]
            for j in range(n):
                row_i[j] = dom.exquo(piv * row_i[j] - a_ic * row_r[j], prev)
        prev = piv
        pivots.append(c)
        r += 1
    # rows above the last pivot were scaled by later pivots; bring every
    # pivot row to the common scale ``prev``
    for k, c in enumerate(pivots):
        if A[k][c] != prev:
            factor_num, factor_den = prev, A[k][c]
            A[k] = [dom.exquo(v * factor_num, factor_den) for v in A[k]]
    return A, pivots, prev


def nullspace(rows: list[list], ncols: int, dom) -> list[list]:
    """Basis of {v : A v = 0} with entries in the domain, one vector per free column."""
    if not rows:
        return [[dom.one if i == j else dom.zero for i in range(ncols)] for j in range(ncols)]
    A, pivots, d = rref_fraction_free(rows, dom)
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [dom.zero] * ncols
        v[f] = d
        for k, c in enumerate(pivots):
            v[c] = -A[k][f]
        basis.append(_primitive(v, dom))
    return basis


def rank_and_pivots(rows: list[list], dom) -> list[int]:
    if not rows:
        return []
    return rref_fraction_free(rows, dom)[1]


def _primitive(v: list, dom) -> list:
    g = dom.zero
    for e in v:
        if e:
            g = dom.gcd(g, e) if g else e
    if not g:
        return v
    out = [dom.exquo(e, g) if e else dom.zero for e in v]
    lead = next(e for e in out if e)
    if dom.is_negative(lead):
        out = [-e for e in out]
    return out


def clear_denominators(row: list[Fraction]) -> list[int]:
    den = 1
    for v in row:
        den = den * v.denominator // gcd(den, v.denominator)
    return [int(v * den) for v in row]
