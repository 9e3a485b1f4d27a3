from fractions import Fraction

import mpmath
import pytest

from lfrmaps.dynamics import MapData, ProjPoint, apply, chordal, vn_membership
from lfrmaps.enumerate import (SIZE_BUDGET, BiPoly, build_system, catalog_path, classify_vn, enumerate_vn,
                               load_catalog, symbolic_orbit)
from lfrmaps.errors import ResourceExhausted
from lfrmaps.family import phi
from lfrmaps.numroots import psi_roots


def test_symbolic_orbit_start():
    orb = symbolic_orbit(1)
    (xn, xd), (yn, yd) = orb.coordinates(0)
    assert xn == -BiPoly.var("a") and yn == BiPoly.const(0)


@pytest.mark.parametrize("a,b", [(Fraction(2, 3), Fraction(5, 7)), (Fraction(-3, 2), Fraction(1, 4)), (3, 11)])
def test_symbolic_orbit_matches_exact_iteration(a, b):
    orb = symbolic_orbit(6)
    x, y = Fraction(-a), Fraction(0)
    for k in range(1, 7):
        x, y = y, (y + a) / (x + b)
        assert orb.evaluate(a, b, k) == (x, y)


def test_system_examples():
    s0 = build_system(0)
    a, b = BiPoly.var("a"), BiPoly.var("b")
    assert {s0.P, s0.Q} == {(b - a).normalized(), a.normalized()}
    s1 = build_system(1)
    assert s1.P(1, 0) == 0 and s1.Q(1, 0) == 0


def test_system_vanishes_on_gamma1_for_n7():
    s = build_system(7)
    for t in psi_roots(7)[:3]:
        pp = phi(1, t)
        a, b = mpmath.mpc(pp.a), mpmath.mpc(pp.b)
        scale = 1 + abs(s.P(abs(a), abs(b)))
        assert abs(s.P(a, b)) < 1e-50 * scale and abs(s.Q(a, b)) < 1e-50 * scale


def test_small_n():
    v0 = enumerate_vn(0, cache_dir="")
    assert [(m.point.a, m.point.b) for m in v0.members] == [(0, 0)]
    v1 = enumerate_vn(1, cache_dir="")
    assert [(m.point.a, m.point.b) for m in v1.members] == [(1, 0)]
    assert v1.discarded.get("V_0") == 1


def test_n6_lies_on_gamma2_only():
    cs = enumerate_vn(6, cache_dir="")
    assert cs.counts()["Gamma_2"] == 4 and len(cs.members) == 4
    assert cs.common_factor is not None


def test_n7_complete_and_minimal(v7):
    cs, _ = v7
    assert len(cs.members) == 10
    assert {m.cls for m in cs.members} == {"Gamma_1"}
    assert sorted(m.psi_index for m in cs.members) == list(range(10))
    for m in cs.members:
        pp = phi(1, psi_roots(7)[m.psi_index])
        assert abs(m.point.a - pp.a) + abs(m.point.b - pp.b) < 1e-20
        assert vn_membership(m.point.a, m.point.b, nmax=7) == 7
        assert m.certificate.positive
    assert classify_vn(cs)["consistent"]


def test_n7_member_lands_on_p(v7):
    cs, _ = v7
    m = cs.members[0]
    md = MapData(m.point.a, m.point.b)
    pt = md.q
    for _ in range(6):
        pt = apply(md, pt)
    assert chordal(apply(md, pt), md.p) < 1e-40 or chordal(pt, md.p) > 1e-10


def test_n8_matches_both_curves():
    cs = enumerate_vn(8, cache_dir="")
    summary = classify_vn(cs)
    assert summary["counts"]["Gamma_1"] == 10 and summary["counts"]["Gamma_2"] == 10
    assert summary["consistent"]


def test_cap_and_budget():
    with pytest.raises(ResourceExhausted):
        enumerate_vn(12, cache_dir="")
    with pytest.raises(ResourceExhausted):
        enumerate_vn(11, cache_dir="")
    with pytest.raises(ResourceExhausted):
        build_system(8, budget=SIZE_BUDGET // 10)


def test_cache_roundtrip(tmp_path):
    cs = enumerate_vn(6, cache_dir=tmp_path)
    path = catalog_path(6, cs.bits, tmp_path)
    assert path.exists()
    back = load_catalog(6, cs.bits, tmp_path)
    assert [m.cls for m in back.members] == [m.cls for m in cs.members]
    for x, y in zip(back.members, cs.members):
        assert abs(x.point.a - y.point.a) + abs(x.point.b - y.point.b) < 1e-60
    path.write_text("{broken")
    assert load_catalog(6, cs.bits, tmp_path) is None


def test_env_var_selects_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("LFRMAPS_CACHE_DIR", str(tmp_path))
    enumerate_vn(1)
    assert catalog_path(1, 256).exists()


def test_v1_point_sends_q_to_p():
    md = MapData(1, 0)
    assert chordal(apply(md, md.q), md.p) < 1e-60
    assert md.p == ProjPoint.make(1, 0, -1) or chordal(md.p, ProjPoint.make(1, 0, -1)) < 1e-60
