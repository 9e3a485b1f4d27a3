import io
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfrmaps.dynamics import (CSV_HEADER, MAX_STEPS, REACHED_P, MapData, OrbitTrace,
                              ProjPoint, apply, apply_affine, apply_inverse, apply_inverse_affine, chordal,
                              conjugacy_residual, emit_orbit_csv, lyness_check, normalize_conjugacy, orbit,
                              vn_membership, zeta_certificate)
from lfrmaps.errors import DomainError, IndeterminateInput
from lfrmaps.family import phi
from lfrmaps.numroots import psi_roots, salem_root

TOL = mpmath.mpf(2) ** -128

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def rand_point(rng):
    return ProjPoint.make(*(mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(3)))


def test_v1_sends_q_to_p():
    m = MapData(1, 0)
    img = apply(m, m.q)
    assert chordal(img, ProjPoint.make(1, 0, -1)) < TOL
    back = apply_inverse(m, m.p)
    assert chordal(back, m.q) < TOL


def test_sigma_gamma_collapses_to_q_and_sigma_beta_to_e2():
    rng = random.Random(5)
    m = MapData(Fraction(2, 3), Fraction(-5, 7))
    a, b = mpmath.mpf(2) / 3, mpmath.mpf(-5) / 7
    for _ in range(100):
        x0, x1 = mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)), mpmath.mpc(rng.uniform(-2, 2), 0)
        on_gamma = ProjPoint.make(x0, x1, -a * x0)
        assert chordal(apply(m, on_gamma), m.q) < TOL
        on_beta = ProjPoint.make(x0, -b * x0, x1)
        assert chordal(apply(m, on_beta), m.e2) < TOL


def test_round_trips():
    rng = random.Random(7)
    m = MapData(mpmath.mpf("0.3"), mpmath.mpf("-1.7"))
    for _ in range(100):
        pt = rand_point(rng)
        assert chordal(apply(m, apply_inverse(m, pt)), pt) < TOL
        assert chordal(apply_inverse(m, apply(m, pt)), pt) < TOL


@given(finite, finite, finite, finite)
@settings(max_examples=60, deadline=None)
def test_affine_chart_agrees(a, b, x, y):
    if abs(x + b) < 1e-3 or abs(y) < 1e-3:
        return
    m = MapData(a, b)
    img = apply(m, ProjPoint.affine(x, y))
    fx, fy = apply_affine(mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(x), mpmath.mpf(y))
    assert chordal(img, ProjPoint.affine(fx, fy)) < TOL
    ix, iy = apply_inverse_affine(mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(x), mpmath.mpf(y))
    assert chordal(apply_inverse(m, ProjPoint.affine(x, y)), ProjPoint.affine(ix, iy)) < TOL


def test_indeterminate_input_raises():
    m = MapData(1, 2)
    for s in m.indeterminacy():
        with pytest.raises(IndeterminateInput):
            apply(m, s)
    for s in m.inverse_indeterminacy():
        with pytest.raises(IndeterminateInput):
            apply_inverse(m, s)


def test_orbit_examples():
    m0 = MapData(0, 0)
    tr = orbit(m0, m0.q, 10)
    assert tr.reason == REACHED_P and tr.last_k == 0
    pp = phi(1, salem_root(7))
    tr = orbit(MapData(pp.a, pp.b), MapData(pp.a, pp.b).q, 20)
    assert tr.reason == REACHED_P and tr.last_k == 7
    generic = MapData(mpmath.mpf("0.4123"), mpmath.mpf("0.8311"))
    assert orbit(generic, generic.q, 100).reason == MAX_STEPS


def test_vn_membership_examples():
    assert vn_membership(1, 0) == 1
    assert vn_membership(0, 0) == 0
    for t in psi_roots(7):
        assert vn_membership(phi(1, t)) == 7


def test_zeta_certificate_examples():
    lam = salem_root(7)
    assert zeta_certificate(1, 7, lam).positive
    neg = zeta_certificate(2, 7, lam)
    assert not neg.positive and "j_divides_n" in neg.failed
    late = zeta_certificate(1, 14, lam)
    assert not late.positive and late.witness_k == 7


@pytest.mark.parametrize("n", [7, 8, 9, 10, 11, 12])
def test_certificate_agrees_with_orbit(n):
    for j in (1, 2, 3):
        for t in psi_roots(n):
            if n % j:
                continue
            got = vn_membership(phi(j, t), nmax=n)
            assert zeta_certificate(j, n, t).positive == (got == n)


def test_lyness_examples():
    assert lyness_check(3, (1, 1), 100) < 1e-10
    assert lyness_check(Fraction(-1, 4), (mpmath.mpf("0.37"), mpmath.mpf("1.91")), 100) < 1e-10
    with pytest.raises(IndeterminateInput):
        lyness_check(2, (-1, 2), 10)


def test_conjugacy():
    assert normalize_conjugacy(0, 0).a == 0 and normalize_conjugacy(0, 0).b == 0
    pp = normalize_conjugacy(-1, 1)
    assert (pp.a, pp.b) == (1, 0)
    rng = random.Random(2)
    for _ in range(5):
        assert conjugacy_residual(mpmath.mpf(rng.uniform(-2, 2)), mpmath.mpf(rng.uniform(-2, 2))) < 1e-25


def test_csv_rows(tmp_path):
    pp = phi(1, salem_root(7))
    m = MapData(pp.a, pp.b)
    tr = orbit(m, m.q, 20)
    buf = io.StringIO()
    assert emit_orbit_csv(tr, buf) == 8
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_HEADER) and len(lines) == 9
    path = tmp_path / "o.csv"
    assert emit_orbit_csv(tr, path) == 8
    with pytest.raises(DomainError):
        emit_orbit_csv(OrbitTrace(), buf)


def test_csv_marks_points_at_infinity():
    m = MapData(2, 3)
    tr = orbit(m, ProjPoint.make(0, 1, 1), 2)
    buf = io.StringIO()
    emit_orbit_csv(tr, buf)
    assert buf.getvalue().splitlines()[1].endswith("infinity")


def test_rank_one_rotation_orbit_stays_bounded():
    # a unit-circle root of psi_10 on Gamma_1: orbits near FP_s stay near it
    from lfrmaps.family import fixed_points

    t = next(r for r in psi_roots(10) if abs(abs(r.approx) - 1) < 1e-30)
    pp = phi(1, t)
    fs, _ = fixed_points(1, t)
    m = MapData(pp.a, pp.b)
    with mpmath.workprec(128):
        x = mpmath.mpc(fs.x) + mpmath.mpf("1e-6")
        tr = orbit(m, ProjPoint.affine(x, mpmath.mpc(fs.x)), 2000, bits=128)
    assert tr.reason == MAX_STEPS
    assert all(s.dist_ind > 0 for s in tr.steps)
    assert max(chordal(s.point, fs.location) for s in tr.steps) < 1e-3
