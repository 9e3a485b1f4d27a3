from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from lfrmaps.errors import DomainError
from lfrmaps.exactpoly import IntPoly, salem_poly
from lfrmaps.numroots import (AlgebraicNumber, delta_star, isolate_roots, psi_roots, salem_configuration,
                              salem_root, small_divisor_diagnostic)


def bisect_real_root(p: IntPoly, lo, hi, prec=200):
    with mpmath.workprec(prec):
        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        flo = p(lo)
        for _ in range(prec):
            mid = (lo + hi) / 2
            fm = p(mid)
            if (fm < 0) == (flo < 0):
                lo, flo = mid, fm
            else:
                hi = mid
        return lo


def test_exact_rational_roots():
    roots = isolate_roots(IntPoly((-1, 0, 1)))
    assert [r.approx.real for r in roots] == [1, -1]
    assert all(r.radius == 0 and r.is_rational for r in roots)
    half = isolate_roots(IntPoly((-1, 2)))[0]
    assert half.approx == mpmath.mpf(1) / 2


@given(st.lists(st.integers(-6, 6).filter(bool), min_size=1, max_size=5, unique=True))
@settings(max_examples=25, deadline=None)
def test_isolated_roots_of_products_of_linears(rs):
    p = IntPoly((1,))
    for r in rs:
        p = p * IntPoly((-r, 1))
    got = sorted(int(z.approx.real) for z in isolate_roots(p))
    assert got == sorted(rs)


def test_enclosures_contain_sympy_roots():
    p = salem_poly(9)
    ref = sp.Poly(list(reversed(p.coeffs)), sp.symbols("x")).nroots(n=60)
    roots = isolate_roots(p)
    with mpmath.workprec(256):
        for z in ref:
            zc = mpmath.mpc(str(sp.re(z)), str(sp.im(z)))
            assert sum(1 for r in roots if abs(r.approx - zc) < 1e-40) == 1


def test_non_squarefree_rejected():
    with pytest.raises(DomainError):
        isolate_roots(IntPoly((1, 2, 1)))


def test_salem_root_against_bisection():
    lam = salem_root(7)
    ref = bisect_real_root(salem_poly(7), 1, 2)
    assert abs(lam.approx - ref) < mpmath.mpf(10) ** -50
    assert abs(lam.approx - mpmath.mpf("1.1762808183")) < 1e-9


def test_psi_root_order_and_configuration():
    roots = psi_roots(10)
    assert roots[0].approx.real > 1 and roots[0].is_real
    assert salem_configuration(10) == {"outside": 1, "inside": 1, "on_circle": 6, "degree": 8}


def test_delta_star():
    d = delta_star()
    assert abs(d.approx ** 3 - d.approx - 1) < 1e-60


def test_refine_stays_inside():
    r = psi_roots(7)[3]
    s = r.refine(512)
    assert s.radius < r.radius and r.contains(s.approx)
    assert s == r


def test_algebraic_equality_requires_same_minpoly():
    r = salem_root(7)
    other = AlgebraicNumber(salem_poly(8), r.approx, r.radius, r.bits)
    assert r != other


def test_small_divisor_diagnostic():
    t = next(r for r in psi_roots(10) if abs(abs(r.approx) - 1) < 1e-30)
    v = small_divisor_diagnostic(t, 200, 2.0)
    assert v > 0
    with pytest.raises(DomainError):
        small_divisor_diagnostic(Fraction(1), 10, 2.0)
    with pytest.raises(DomainError):
        small_divisor_diagnostic(salem_root(7), 10, 2.0)
