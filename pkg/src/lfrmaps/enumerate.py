"""Enumeration of V_n: parameters (a, b) for which f^n(q) = p with n minimal.

Pipeline: iterate f symbolically on q = [1 : -a : 0] over Z[a, b], clear the
system f^n(q) = p to two integer polynomials, eliminate b by a resultant,
pair roots, then keep only candidates whose orbit really lands on p at step n.
"""
from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import mpmath
from sympy.polys.domains import ZZ
from sympy.polys.rings import ring

from . import __version__
from .dynamics import vn_membership, zeta_certificate
from .errors import DegenerateInput, IOFailure, PrecisionExhausted, ResourceExhausted
from .exactpoly import BiPoly, IntPoly, resultant, salem_poly, squarefree_part
from .family import ParamPoint, gamma_membership
from .numroots import DEFAULT_BITS, GUARD_BITS, complex_roots, isolate_roots, psi_roots
from .serialize import num

log = logging.getLogger(__name__)

N_CAP = 9
SIZE_BUDGET = 12_000  # sum over P, Q of (term count x max coefficient bits)
BEST_EFFORT_CAP = 11
BEST_EFFORT_BUDGET = 80_000
CACHE_ENV = "LFRMAPS_CACHE_DIR"
CLASSES = ("Gamma_1", "Gamma_2", "Gamma_3", "none")

_R, _b, _a = ring("b,a", ZZ)


def _to_bipoly(p) -> BiPoly:
    return BiPoly.from_dict({(m[1], m[0]): int(c) for m, c in p.terms()})


def _size(p) -> int:
    cs = p.coeffs()
    return len(cs) * max((abs(int(c)).bit_length() for c in cs), default=0)


def _limits(n: int, best_effort: bool, n_cap: Optional[int], budget: Optional[int]):
    cap = n_cap if n_cap is not None else (BEST_EFFORT_CAP if best_effort else N_CAP)
    bud = budget if budget is not None else (BEST_EFFORT_BUDGET if best_effort else SIZE_BUDGET)
    if n < 0:
        raise DegenerateInput("n must be nonnegative")
    if n > cap:
        raise ResourceExhausted(f"n = {n} exceeds the configured cap {cap}")
    return bud


# ---------------------------------------------------------------------------
# symbolic iteration

@dataclass
class SymbolicOrbit:
    """f^k(q) for k = 0..n as reduced projective triples [X0 : X1 : X2] over Z[a, b]."""

    n: int
    triples: list = field(default_factory=list)  # sympy ring elements
    degrees: list = field(default_factory=list)  # (deg_a, deg_b) of X0 per step

    def coordinates(self, k: Optional[int] = None):
        """Affine (x, y) = (X1/X0, X2/X0), each pair with common factors removed."""
        x0, x1, x2 = self.triples[self.n if k is None else k]
        out = []
        for numer in (x1, x2):
            g = numer.gcd(x0)
            out.append((_to_bipoly(numer.exquo(g)), _to_bipoly(x0.exquo(g))))
        return tuple(out)

    def evaluate(self, a, b, k: Optional[int] = None):
        """Exact affine point at rational (a, b); None when X0 vanishes there."""
        (xn, xd), (yn, yd) = self.coordinates(k)
        if xd(a, b) == 0:
            return None
        return _div(xn(a, b), xd(a, b)), _div(yn(a, b), yd(a, b))


def _div(u, v):
    exact = (int, Fraction)
    return Fraction(u) / v if isinstance(u, exact) and isinstance(v, exact) else u / v


def symbolic_orbit(n: int, best_effort: bool = False, n_cap: Optional[int] = None,
                   budget: Optional[int] = None) -> SymbolicOrbit:
    bud = _limits(n, best_effort, n_cap, budget)
    X = [_R(1), -_a, _R(0)]
    orb = SymbolicOrbit(n, [tuple(X)], [(0, 0)])
    for k in range(1, n + 1):
        x0, x1, x2 = X
        B = _b * x0 + x1
        A = _a * x0 + x2
        Y = [x0 * B, x2 * B, x0 * A]
        g = Y[0].gcd(Y[1]).gcd(Y[2])
        X = [y.exquo(g) for y in Y]
        if sum(_size(x) for x in X) > 2 * bud:
            raise ResourceExhausted(f"symbolic orbit exceeds the size budget at step {k}")
        orb.triples.append(tuple(X))
        orb.degrees.append((X[0].degree(1), X[0].degree(0)))
        log.debug("step %d: deg_a %d deg_b %d", k, *orb.degrees[-1])
    return orb


@dataclass
class System:
    n: int
    P: BiPoly
    Q: BiPoly
    common: BiPoly  # gcd removed from P and Q
    size: int


def build_system(n: int, best_effort: bool = False, n_cap: Optional[int] = None,
                 budget: Optional[int] = None) -> System:
    """Integer pair (P_n, Q_n) whose common zeros are where f^n(q) = p = [1 : -b : -a]."""
    bud = _limits(n, best_effort, n_cap, budget)
    x0, x1, x2 = symbolic_orbit(n, best_effort, n_cap, budget).triples[-1]
    P = x1 + _b * x0
    Q = x2 + _a * x0
    g = P.gcd(Q)
    P, Q = P.exquo(g), Q.exquo(g)
    size = _size(P) + _size(Q)
    if size > bud:
        raise ResourceExhausted(f"system for n = {n} has size {size} > budget {bud}")
    return System(n, _to_bipoly(P).normalized(), _to_bipoly(Q).normalized(), _to_bipoly(g), size)


# ---------------------------------------------------------------------------
# numeric stage

@dataclass
class Member:
    point: ParamPoint
    cls: str
    classes: tuple
    t: object = None
    psi_index: Optional[int] = None
    certificate: object = None
    residual: object = None

    def to_json(self, bits: int) -> dict:
        out = {"a": num(self.point.a, bits), "b": num(self.point.b, bits), "class": self.cls,
               "classes": list(self.classes), "residual": mpmath.nstr(self.residual, 5)}
        if self.t is not None:
            out["t"] = num(self.t, bits)
            out["psi_index"] = self.psi_index
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


@dataclass
class CandidateSet:
    n: int
    bits: int
    res_a: IntPoly
    res_b: Optional[IntPoly]
    members: list
    candidates: int = 0
    discarded: dict = field(default_factory=dict)  # reason -> count
    common_factor: Optional[str] = None
    warnings: list = field(default_factory=list)

    def counts(self) -> dict:
        out = {c: 0 for c in CLASSES}
        for m in self.members:
            out[m.cls] += 1
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "bits": self.bits, "version": __version__,
                "res_a": self.res_a.to_json(), "res_a_degree": self.res_a.degree,
                "res_b": self.res_b.to_json() if self.res_b is not None else None,
                "candidates": self.candidates, "discarded": self.discarded,
                "common_factor": self.common_factor, "warnings": self.warnings,
                "counts": self.counts(),
                "members": [m.to_json(self.bits) for m in self.members]}


def _eval_coeffs(polys, z):
    return [_horner(p.coeffs, z) for p in polys]


def _horner(cs, z):
    acc = 0 * z
    for c in reversed(cs):
        acc = acc * z + c
    return acc


class _Nested:
    """A BiPoly evaluated by Horner in b over Horner-evaluated coefficients in a."""

    def __init__(self, p: BiPoly):
        self.polys = [q.coeffs for q in p.coeff_polys("b")]

    def __call__(self, a, b):
        return _horner([_horner(cs, a) for cs in self.polys], b)


def _newton2(P: BiPoly, Q: BiPoly, a, b, steps: int = 40):
    """Polish a common zero of (P, Q) by Newton's method in two variables."""
    fs = [_Nested(f) for f in (P, Q, _partial(P, 0), _partial(P, 1), _partial(Q, 0), _partial(Q, 1))]
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 24)
    for _ in range(steps):
        p, q, j11, j12, j21, j22 = (f(a, b) for f in fs)
        det = j11 * j22 - j12 * j21
        if det == 0:
            break
        da = (p * j22 - q * j12) / det
        db = (q * j11 - p * j21) / det
        a, b = a - da, b - db
        if abs(da) + abs(db) <= eps * max(1, abs(a), abs(b)):
            break
    return a, b


def _partial(p: BiPoly, i: int) -> BiPoly:
    d = {}
    for k, v in p.terms:
        if k[i]:
            nk = (k[0] - (i == 0), k[1] - (i == 1))
            d[nk] = v * k[i]
    return BiPoly.from_dict(d)


def _abs_eval(p: BiPoly, a, b):
    """sum |c| |a|^i |b|^j, the natural scale for |p(a, b)|."""
    aa, bb = abs(a), abs(b)
    return sum(abs(v) * aa ** i * bb ** j for (i, j), v in p.terms)


def _roots_in(polys, z, bits):
    cs = _eval_coeffs(polys, z)
    top = max((abs(c) for c in cs), default=0)
    while cs and abs(cs[-1]) <= top * mpmath.mpf(2) ** (-bits // 2):
        cs.pop()
    if len(cs) <= 1:
        return None if not cs else []
    return complex_roots(cs, bits)


def _classify(a, b, n: int, bits: int, tol) -> tuple:
    matches = [m for m in gamma_membership(a, b, tol=tol, bits=bits) if not m.excluded]
    if not matches:
        return "none", (), None, None, None
    classes = tuple(sorted({f"Gamma_{m.j}" for m in matches}))
    best = min(matches, key=lambda m: m.j)
    psi = psi_roots(n, bits) if n >= 7 else ()
    idx, cert = None, None
    for i, r in enumerate(psi):
        if abs(r.approx - best.t) <= mpmath.mpf(tol):
            idx = i
            cert = zeta_certificate(best.j, n, r)
            break
    return f"Gamma_{best.j}", classes, best.t, idx, cert


def _candidates(system: System, bits: int, res_a: IntPoly):
    """Common zeros of (P, Q) paired from the roots of res_a."""
    P, Q = system.P, system.Q
    Pb, Qb = P.coeff_polys("b"), Q.coeff_polys("b")
    roots = None
    cur = bits
    sq = squarefree_part(res_a)
    while roots is None:
        try:
            roots = isolate_roots(sq, cur, check_squarefree=False)
        except PrecisionExhausted:
            cur *= 2
            if cur > 4096:
                raise
    work = 2 * bits
    out = []
    with mpmath.workprec(work + GUARD_BITS):
        thresh = mpmath.mpf(2) ** (-bits // 4)
        for r in roots:
            try:
                a = r.refine(work).approx if r.radius else mpmath.mpc(r.approx)
            except PrecisionExhausted:
                # cancellation in a huge res_a; the joint Newton step below polishes a anyway
                a = mpmath.mpc(r.approx)
            bs = _roots_in(Pb, a, work)
            other = Q
            if bs is None:  # P(a*, .) vanishes identically; pair from Q instead
                bs = _roots_in(Qb, a, work)
                other = P
                if bs is None:
                    continue
            for b in bs:
                if abs(_Nested(other)(a, b)) <= thresh * max(1, _abs_eval(other, a, b)):
                    out.append(_newton2(P, Q, a, b))
    return out, cur


def _dedupe(points, radius):
    kept = []
    for a, b in points:
        if all(abs(a - a2) + abs(b - b2) > radius for a2, b2 in kept):
            kept.append((a, b))
    return kept


def elimination_polys(system: System) -> tuple[IntPoly, Optional[IntPoly]]:
    """res_a (b eliminated) and, when one polynomial is free of b, that polynomial."""
    P, Q = system.P, system.Q
    for p in (P, Q):
        if p.degree("b") == 0:
            return p.coeff_polys("b")[0].primitive(), None
    return resultant(P, Q, "b"), None


def enumerate_vn(n: int, bits: int = DEFAULT_BITS, best_effort: bool = False, n_cap: Optional[int] = None,
                 budget: Optional[int] = None, cache_dir=None, with_res_b: bool = False) -> CandidateSet:
    """Elements of V_n, each verified by orbit iteration and classified against the curves."""
    cached = load_catalog(n, bits, cache_dir)
    if cached is not None:
        return cached
    system = build_system(n, best_effort, n_cap, budget)
    res_a, _ = elimination_polys(system)
    res_b = None
    if with_res_b and system.P.degree("a") > 0 and system.Q.degree("a") > 0:
        res_b = resultant(system.P, system.Q, "a")
    pts, used = _candidates(system, bits, res_a)
    merge = mpmath.mpf(10) ** -20
    with mpmath.workprec(2 * bits + GUARD_BITS):
        uniq = _dedupe(pts, merge)
    cs = CandidateSet(n, bits, res_a, res_b, [], len(uniq), {},
                      None if system.common == BiPoly.const(1) else str(system.common))
    if used > bits:
        cs.warnings.append(f"root isolation needed {used} bits")
    members = []
    for a, b in uniq:
        with mpmath.workprec(bits + GUARD_BITS):
            a, b = +a, +b
            if abs(a.imag) <= mpmath.mpf(2) ** (-bits):
                a = mpmath.mpc(a.real)
            if abs(b.imag) <= mpmath.mpf(2) ** (-bits):
                b = mpmath.mpc(b.real)
        try:
            k = vn_membership(a, b, nmax=n, bits=bits)
        except PrecisionExhausted:
            k = "ambiguous"
        if k != n:
            reason = "not_in_orbit" if k is None else ("ambiguous" if k == "ambiguous" else f"V_{k}")
            cs.discarded[reason] = cs.discarded.get(reason, 0) + 1
            continue
        with mpmath.workprec(bits + GUARD_BITS):
            res = abs(system.P(a, b)) + abs(system.Q(a, b))
        cls, classes, t, idx, cert = _classify(a, b, n, bits, mpmath.mpf(10) ** -20)
        members.append(Member(ParamPoint(a, b, int(cls[-1]) if t is not None else None, t, n),
                              cls, classes, t, idx, cert, res))
    members.sort(key=lambda m: (float(mpmath.re(m.point.a)), float(mpmath.im(m.point.a)),
                                float(mpmath.re(m.point.b)), float(mpmath.im(m.point.b))))
    cs.members = members
    save_catalog(cs, cache_dir)
    return cs


def classify_vn(cs: CandidateSet) -> dict:
    """Counts per class, with the expected curve counts deg(psi_n) for each j | n."""
    counts = cs.counts()
    expected = {}
    if cs.n >= 7:
        d = salem_poly(cs.n).degree
        for j in (1, 2, 3):
            expected[f"Gamma_{j}"] = d if cs.n % j == 0 else 0
    consistent = all(counts[c] == e for c, e in expected.items()) if expected else None
    return {"n": cs.n, "counts": counts, "expected_on_curves": expected, "consistent": consistent,
            "candidates": cs.candidates, "discarded": cs.discarded}


# ---------------------------------------------------------------------------
# catalog cache

def cache_directory(cache_dir=None) -> Optional[Path]:
    d = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def catalog_path(n: int, bits: int, cache_dir=None) -> Optional[Path]:
    d = cache_directory(cache_dir)
    if d is None:
        return None
    return d / f"vn-v{__version__}-n{n}-b{bits}.json"


def write_atomic(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc


def save_catalog(cs: CandidateSet, cache_dir=None) -> Optional[Path]:
    path = catalog_path(cs.n, cs.bits, cache_dir)
    if path is None:
        return None
    write_atomic(path, json.dumps(cs.to_json(), indent=2, sort_keys=True))
    return path


def _parse_num(d: dict, bits: int):
    with mpmath.workprec(bits + GUARD_BITS):
        if "exact" in d:
            return mpmath.mpc(mpmath.mpf(d["exact"]))
        return mpmath.mpc(mpmath.mpf(d["re"]), mpmath.mpf(d.get("im", "0")))


def load_catalog(n: int, bits: int, cache_dir=None) -> Optional[CandidateSet]:
    path = catalog_path(n, bits, cache_dir)
    if path is None or not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if data.get("version") != __version__ or data.get("n") != n or data.get("bits") != bits:
        return None
    members = []
    for m in data["members"]:
        a, b = _parse_num(m["a"], bits), _parse_num(m["b"], bits)
        t = _parse_num(m["t"], bits) if "t" in m else None
        j = int(m["class"][-1]) if t is not None else None
        members.append(Member(ParamPoint(a, b, j, t, n), m["class"], tuple(m["classes"]), t,
                              m.get("psi_index"), None, mpmath.mpf(m["residual"])))
    res_b = IntPoly.from_json(data["res_b"]) if data.get("res_b") else None
    return CandidateSet(n, bits, IntPoly.from_json(data["res_a"]), res_b, members, data["candidates"],
                        data["discarded"], data["common_factor"], data["warnings"])
