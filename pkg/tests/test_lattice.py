import random

import mpmath
import pytest
import sympy as sp

from lfrmaps.errors import DomainError
from lfrmaps.exactpoly import IntPoly, chi
from lfrmaps.lattice import (IntMatrix, char_poly, coxeter_matrix, expected_dim, graph_matrix, graph_spec, lab,
                             lorentz_form, spectral_radius, verify_thm_c1)
from lfrmaps.numroots import salem_root


@pytest.mark.parametrize("N", [5, 8, 10, 17, 25])
def test_coxeter_is_an_isometry_with_chi_char_poly(N):
    m = coxeter_matrix(N)
    J = lorentz_form(N + 1)
    assert m.transpose() @ J @ m == J
    assert m.det() in (1, -1)
    assert char_poly(m) == chi(N - 3)


def test_coxeter_rejects_small_N():
    with pytest.raises(DomainError):
        coxeter_matrix(4)


def test_char_poly_examples():
    assert char_poly(IntMatrix.identity(2)) == IntPoly((1, -2, 1))
    rng = random.Random(21)
    rows = [[rng.randint(-3, 3) for _ in range(12)] for _ in range(12)]
    cp = char_poly(IntMatrix.from_rows(rows))
    ref = sp.Matrix(rows).charpoly().all_coeffs()
    assert list(reversed(cp.coeffs)) == [int(c) for c in ref]
    eig = mpmath.polyroots(list(reversed(cp.coeffs)), maxsteps=200, extraprec=200)
    ev = mpmath.eig(mpmath.matrix(rows))[0]
    for z in ev:
        assert min(abs(z - w) for w in eig) < 1e-10


def test_family1_row_for_02():
    gs = graph_spec(1, 8)
    m = gs.matrix()
    i = gs.basis.index("02")
    ones = {gs.basis[j] for j in range(m.dim) if m[i, j]}
    assert ones == {"16", "170"}
    assert m.dim == 17


def test_dimensions():
    assert graph_matrix(2, 8).dim == 15 == expected_dim(2, 8)
    assert graph_matrix(3, 9).dim == 14 == expected_dim(3, 9)
    assert lab(1, 12, 0) == "1(12)0"


def test_domain_checks():
    for fam, n in ((1, 7), (2, 9), (3, 10), (4, 9)):
        with pytest.raises(DomainError):
            graph_spec(fam, n)


@pytest.mark.parametrize("n", range(8, 15))
def test_family1_matches_plus_sign(n):
    rep = verify_thm_c1(1, n)
    assert rep.matches["(x^7+1)chi_n/(x^2-1)"]
    assert not rep.matches["(x^7-1)chi_n/(x^2-1)"]
    assert rep.char_poly.degree == expected_dim(1, n)


@pytest.mark.parametrize("n", [8, 10, 14, 20])
def test_family2(n):
    rep = verify_thm_c1(2, n)
    assert rep.formula_match and rep.divisible_by_psi and rep.radius_error < 1e-40


@pytest.mark.parametrize("n", [9, 12, 15, 21])
def test_family3_variants(n):
    assert verify_thm_c1(3, n).formula_match
    assert not verify_thm_c1(3, n, variant="printed").formula_match


def test_spectral_radius_is_salem_number():
    rep = verify_thm_c1(1, 10)
    assert abs(spectral_radius(rep.char_poly) - salem_root(10).approx) < 1e-40
