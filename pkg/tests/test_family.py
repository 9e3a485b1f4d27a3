import random
from fractions import Fraction

import mpmath
import pytest
import sympy as sp

from lfrmaps.dynamics import MapData, apply, apply_affine, chordal
from lfrmaps.errors import CycleDegenerate, DomainError, ExcludedParameter, PreconditionFailed
from lfrmaps.exactpoly import IntPoly
from lfrmaps.family import (MONOMIALS3, closed_form_on_circle, cubic_coefficients, cubic_from_lines,
                            cycle_multipliers, cycle_points, divide_by_linear, fixed_points, gamma_membership,
                            invariant_cubic, j3_lines, jacobian, eligibility_bounds, multiplicative_relation, omega,
                            order_pair, phi, resonance_check, rotation_classify, verify_functional_equation)
from lfrmaps.numroots import psi_roots, salem_root

T, A, B, X0, X1, X2 = sp.symbols("t a b x0 x1 x2")


def test_phi_examples():
    pp = phi(3, 2)
    assert (pp.a, pp.b) == (3, Fraction(3, 2))
    with pytest.raises(ExcludedParameter):
        phi(1, 1)
    lim = phi(1, 1, allow_excluded=True)
    assert (lim.a, lim.b) == (Fraction(-1, 4), 0)
    w = phi(2, omega(), allow_excluded=True)
    assert abs(w.a) < 1e-60 and abs(w.b) < 1e-60
    with pytest.raises(DomainError):
        phi(4, 2)


def sym_phi(j):
    if j == 1:
        return (T - T**3 - T**4) / (1 + T)**2, (1 - T**5) / (T**2 + T**3)
    if j == 2:
        return (T + T**2 + T**3) / (1 + T)**2, (T**3 - 1) / (T + T**2)
    return 1 + T, T - 1 / T


@pytest.mark.parametrize("j", [1, 2, 3])
def test_functional_equation_against_sympy(j):
    """Independent route: rational-function arithmetic in sympy."""
    a, b = sym_phi(j)
    cs = cubic_coefficients(T, a, b)
    P = lambda u0, u1, u2: sum(c * u0**e[0] * u1**e[1] * u2**e[2] for e, c in cs.items())
    Bx, Ax = b * X0 + X1, a * X0 + X2
    lhs = P(X0 * Bx, X2 * Bx, X0 * Ax)
    rhs = T * X0 * Bx * Ax * P(X0, X1, X2)
    assert sp.simplify(sp.together(lhs - rhs)) == 0


@pytest.mark.parametrize("j", [1, 2, 3])
def test_functional_equation_symbolic_report(j):
    rep = verify_functional_equation(j)
    assert len(rep.coefficients) == 28 and rep.holds


def test_functional_equation_detects_a_wrong_cubic():
    from lfrmaps.family import _residual_poly
    from lfrmaps.mpoly import MPoly

    t, a, b, x0, x1, x2 = (MPoly.var(i, 6) for i in range(6))
    P = cubic_coefficients(t, a, b)
    P[(0, 3, 0)] = P[(0, 3, 0)] + t
    assert not _residual_poly(P, a, b, t, x0, x1, x2).is_zero()


def test_functional_equation_numeric():
    rep = verify_functional_equation(1, salem_root(7), mode="numeric")
    assert rep.residual < mpmath.mpf(2) ** -200


def test_cubic_examples():
    t = Fraction(3, 7)
    cub = invariant_cubic(1, t)
    assert cub.coefficient(0, 1, 2) == (t - 1) * t
    q = (1, -cub.a, 0)
    assert cub(*q) == 0
    assert len(MONOMIALS3) == 10


def test_cubic_vanishes_at_special_points():
    t = Fraction(5, 11)
    for j in (1, 2, 3):
        cub = invariant_cubic(j, t)
        for pt in ((0, 1, 0), (0, 0, 1), (1, -cub.a, 0), (1, -cub.b, -cub.a)):
            assert cub(*pt) == 0


def test_j3_three_lines():
    t = Fraction(-2, 9)
    cub = invariant_cubic(3, t)
    lines = j3_lines(t)
    prod = cubic_from_lines(lines)
    ratios = {cub.coeffs[e] / prod[e] for e in prod if prod[e] != 0}
    assert len(ratios) == 1
    assert all(cub.coeffs[e] == 0 for e in cub.coeffs if prod.get(e, 0) == 0)
    quo, rem = divide_by_linear(cub.coeffs, lines[0])
    assert rem == {}


def test_fixed_points_examples():
    fs, fr = fixed_points(3, 2)
    assert fs.x == -2
    w = omega()
    assert {mpmath.nstr(e, 20) for e in fs.eigenvalues} == {mpmath.nstr(2 * w, 20), mpmath.nstr(2 * w * w, 20)}


@pytest.mark.parametrize("n", [7, 8, 9, 12])
def test_fixed_points_are_fixed_and_eigenvalues_match(n):
    w = omega()
    for j in (1, 2, 3):
        if n % j:
            continue
        for t in psi_roots(n):
            tv = t.approx
            pp = phi(j, t)
            a, b = mpmath.mpc(pp.a), mpmath.mpc(pp.b)
            fs, fr = fixed_points(j, t)
            for fp in (fs, fr):
                x = mpmath.mpc(fp.x)
                assert chordal(apply(MapData(a, b), fp.location), fp.location) < 1e-60
                tr = 1 / (x + b)
                det = x / (x + b)
                e1, e2 = fp.eigenvalues
                assert abs(e1 + e2 - tr) < 1e-50 and abs(e1 * e2 - det) < 1e-50
            want = {1: (tv**2, tv**3), 2: (-tv, -tv**2), 3: (w * tv, w * w * tv)}[j]
            assert abs(fs.eta1 * fs.eta2 - want[0] * want[1]) < 1e-50
            if j > 1:
                assert abs(fr.eta1 * fr.eta2 - 1 / tv) < 1e-50


def test_j1_fpr_eigenvalues_formula():
    t = salem_root(9)
    _, fr = fixed_points(1, t)
    tv = t.approx
    want = {mpmath.nstr(1 / tv, 30), mpmath.nstr(-(tv**3 + tv**2 - 1) / (tv**4 - tv**2 - tv), 30)}
    assert {mpmath.nstr(fr.eta1, 30), mpmath.nstr(fr.eta2, 30)} == want


def test_order_pair():
    assert order_pair(mpmath.mpc(-1), mpmath.mpc(2)) == (2, -1)
    assert order_pair(mpmath.mpc(3), mpmath.mpc(2)) == (2, 3)


def test_cycle_points_examples():
    with pytest.raises(CycleDegenerate):
        cycle_points(3, 0, 0)
    c = cycle_points(3, 2, 1)
    z = [p[0] for p in c.points]
    assert abs(sum(z) + (1 + 2 + 1 + 1)) < 1e-60
    for x, y in c.points:
        px, py = x, y
        for _ in range(3):
            px, py = apply_affine(2, 1, px, py)
        assert abs(px - x) + abs(py - y) < 1e-30
    c2 = cycle_points(2, mpmath.mpf("0.3"), mpmath.mpf("-2.1"))
    (u, v), _ = c2.points
    assert abs(apply_affine(mpmath.mpf("0.3"), mpmath.mpf("-2.1"), u, v)[1] - u) < 1e-60


def test_printed_multiplier_examples():
    assert cycle_multipliers(2, 2, 1)[0] == 0
    assert cycle_multipliers(3, 2, 1)[0] == Fraction(1, 3)


def _random_params(seed, count=20):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a = mpmath.mpf(rng.uniform(-3, 3))
        b = mpmath.mpf(rng.uniform(-3, 3))
        out.append((a, b))
    return out


@pytest.mark.parametrize("length", [2, 3])
def test_corrected_multipliers_match_jacobian_product(length):
    for a, b in _random_params(4):
        try:
            c = cycle_points(length, a, b)
        except CycleDegenerate:
            continue
        mu, tau = cycle_multipliers(length, a, b, variant="corrected")
        assert abs(mu - c.mu) < 1e-10 * max(1, abs(mu))
        assert abs(tau - c.tau) < 1e-10 * max(1, abs(tau))


def test_tau3_printed_equals_corrected():
    for a, b in _random_params(9, 5):
        assert cycle_multipliers(3, a, b)[1] == cycle_multipliers(3, a, b, "corrected")[1]


def test_jacobian_matches_sympy():
    x, y = sp.symbols("x y")
    F = sp.Matrix([y, (y + A) / (x + B)]).jacobian([x, y])
    J = jacobian(2, 3, Fraction(1, 2), Fraction(5, 3))
    ref = F.subs({A: 2, B: 3, x: sp.Rational(1, 2), y: sp.Rational(5, 3)})
    assert all(sp.nsimplify(J[i][k]) == ref[i, k] for i in range(2) for k in range(2))


def test_resonance_examples():
    rep = resonance_check(1, 7, salem_root(7))
    assert rep.residual_stated < 1e-30
    for t in psi_roots(8):
        assert resonance_check(2, 8, t).residual_derived < 1e-30
    with pytest.raises(PreconditionFailed):
        resonance_check(1, 7, 2)


def test_cycle_eigenvalue_formula_matches_cycle_multiplier():
    """For j = 2, 3 the l-cycle eigenvalues are t^-l and eta2; check via the cycle Jacobian."""
    for j in (2, 3):
        n = 12
        for t in psi_roots(n)[:4]:
            pp = phi(j, t)
            c = cycle_points(j, pp.a, pp.b)
            rep = resonance_check(j, n, t)
            assert abs(rep.eta1 * rep.eta2 - c.mu) < 1e-40
            assert abs(rep.eta1 + rep.eta2 - c.tau) < 1e-40


def test_closed_form_examples():
    t = mpmath.expj(mpmath.acos(-0.8))
    assert closed_form_on_circle(2, t, "stated")
    t = mpmath.expj(mpmath.acos(-0.9))
    assert not closed_form_on_circle(2, t, "stated")
    b = eligibility_bounds()
    lo, hi = b["stated"]["j3_excluded"]
    assert abs(lo - (-23 - mpmath.sqrt(17)) / 32) < 1e-60 and abs(hi - (-23 + mpmath.sqrt(17)) / 32) < 1e-60


def test_corrected_bounds_agree_with_direct_moduli():
    from lfrmaps.family import fp_r_eigenvalues

    rng = random.Random(8)
    for _ in range(200):
        t = mpmath.expj(rng.uniform(0, 2 * float(mpmath.pi)))
        for j in (2, 3):
            direct = all(abs(abs(e) - 1) < 1e-12 for e in fp_r_eigenvalues(j, t))
            assert closed_form_on_circle(j, t, "corrected") == direct


def test_rotation_report_fields_and_stability():
    t = psi_roots(12)[2]
    rep = rotation_classify(2, 12, t)
    again = rotation_classify(2, 12, t, bits=512)
    assert rep.booleans() == again.booleans()
    lam = rotation_classify(2, 12, psi_roots(12)[0])
    assert lam.saddle and not lam.rank1_at_FPs
    js = rep.to_json()
    assert "(-23-sqrt(17))/32" in js["bounds"]["stated_j3_excluded"]
    with pytest.raises(PreconditionFailed):
        rotation_classify(2, 7, salem_root(7))


def test_multiplicative_relation_finds_planted_relation():
    z = mpmath.expj(mpmath.mpf(1) / 3)
    assert multiplicative_relation(z ** 3, z ** -2, M=10) in {(2, 3), (-2, -3)}
    assert multiplicative_relation(mpmath.mpf(2), mpmath.mpf(3), M=10) is None


def test_gamma_membership_examples():
    m = gamma_membership(3, Fraction(3, 2))
    assert [(x.j, x.excluded) for x in m] == [(3, False)] and abs(m[0].t - 2) < 1e-60
    zero = gamma_membership(0, 0)
    assert {x.j for x in zero} == {2, 3}
    assert gamma_membership(mpmath.mpf("0.123"), mpmath.mpf("4.567")) == []


def test_gamma_membership_roundtrip_random():
    rng = random.Random(12)
    for _ in range(10):
        t = Fraction(rng.randint(2, 40), rng.randint(41, 90))
        for j in (1, 2, 3):
            pp = phi(j, t)
            assert any(m.j == j and abs(m.t - t.numerator / mpmath.mpf(t.denominator)) < 1e-40
                       for m in gamma_membership(pp.a, pp.b))


def test_suspect_v6_point_is_not_on_gamma3():
    assert all(m.j != 3 for m in gamma_membership(0, 2))


def test_cubic_over_intpoly_ring():
    t = IntPoly.x()
    cs = cubic_coefficients(t, IntPoly((0, 1)), IntPoly((1,)))
    assert cs[(0, 1, 2)] == (t - IntPoly((1,))) * t
