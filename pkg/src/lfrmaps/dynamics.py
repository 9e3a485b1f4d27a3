"""Iteration of f(x, y) = (y, (y+a)/(x+b)) on the projective plane.

In homogeneous coordinates f[x0:x1:x2] = [x0*B : x2*B : x0*A] with
B = b*x0 + x1 and A = a*x0 + x2. Distances are chordal (Fubini-Study).
"""
from __future__ import annotations

import csv
import io
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import DomainError, IndeterminateInput, IOFailure, PrecisionExhausted
from .exactpoly import IntPoly, chi
from .numroots import DEFAULT_BITS, AlgebraicNumber

BITS_CAP = 4096


def tol_p(bits: int):
    return mpmath.mpf(2) ** (-(bits // 2))


def eps_ind(bits: int):
    return mpmath.mpf(2) ** (-(bits // 4))


def to_mp(v):
    """Exact or multiprecision scalar -> mpc at the current working precision."""
    if isinstance(v, AlgebraicNumber):
        v = v.approx
    if isinstance(v, Fraction):
        return mpmath.mpc(mpmath.mpf(v.numerator) / v.denominator)
    return mpmath.mpc(v)


@dataclass(frozen=True)
class ProjPoint:
    """Point of P^2 scaled so the first coordinate of maximal modulus equals 1."""

    coords: tuple

    @classmethod
    def make(cls, x0, x1, x2) -> "ProjPoint":
        c = [to_mp(x0), to_mp(x1), to_mp(x2)]
        mods = [abs(z) for z in c]
        m = max(mods)
        if m == 0:
            raise DomainError("all homogeneous coordinates vanish")
        k = mods.index(m)
        s = c[k]
        return cls(tuple(z / s if i != k else mpmath.mpc(1) for i, z in enumerate(c)))

    @classmethod
    def affine(cls, x, y) -> "ProjPoint":
        return cls.make(1, x, y)

    def normalized(self) -> "ProjPoint":
        return ProjPoint.make(*self.coords)

    @property
    def x0(self):
        return self.coords[0]

    def affine_xy(self):
        """(x, y) = (x1/x0, x2/x0); None when x0 == 0."""
        x0, x1, x2 = self.coords
        if x0 == 0:
            return None
        return x1 / x0, x2 / x0

    def __iter__(self):
        return iter(self.coords)


def chordal(p: ProjPoint, q: ProjPoint):
    """sin of the Fubini-Study angle, via |p ^ q| / (|p| |q|) for stability."""
    a, b = p.coords, q.coords
    wedge = (abs(a[0] * b[1] - a[1] * b[0]) ** 2 + abs(a[0] * b[2] - a[2] * b[0]) ** 2
             + abs(a[1] * b[2] - a[2] * b[1]) ** 2)
    na = sum(abs(z) ** 2 for z in a)
    nb = sum(abs(z) ** 2 for z in b)
    return mpmath.sqrt(wedge / (na * nb))


@dataclass(frozen=True)
class MapData:
    """The map f_{a,b} with its special points and exceptional lines."""

    a: object
    b: object

    def _ab(self):
        return to_mp(self.a), to_mp(self.b)

    @property
    def alpha(self):
        a, _ = self._ab()
        return (a, mpmath.mpc(0), mpmath.mpc(1))

    gamma = alpha

    @property
    def beta(self):
        _, b = self._ab()
        return (b, mpmath.mpc(1), mpmath.mpc(0))

    @property
    def sigma0(self):
        return (mpmath.mpc(1), mpmath.mpc(0), mpmath.mpc(0))

    @property
    def q(self) -> ProjPoint:
        a, _ = self._ab()
        return ProjPoint.make(1, -a, 0)

    @property
    def p(self) -> ProjPoint:
        a, b = self._ab()
        return ProjPoint.make(1, -b, -a)

    @property
    def e1(self) -> ProjPoint:
        return ProjPoint.make(0, 1, 0)

    @property
    def e2(self) -> ProjPoint:
        return ProjPoint.make(0, 0, 1)

    def indeterminacy(self) -> tuple[ProjPoint, ...]:
        """I(f) = {e2, e1, p}: pairwise intersections of Sigma_0, Sigma_beta, Sigma_gamma."""
        return (self.e2, self.e1, self.p)

    def inverse_indeterminacy(self) -> tuple[ProjPoint, ...]:
        return (self.e1, self.e2, self.q)


def _eps(eps, bits):
    return eps_ind(bits) if eps is None else mpmath.mpf(eps)


def apply(m: MapData, pt: ProjPoint, bits: int = DEFAULT_BITS, eps=None) -> ProjPoint:
    with mpmath.workprec(bits):
        e = _eps(eps, bits)
        if any(chordal(pt, s) <= e for s in m.indeterminacy()):
            raise IndeterminateInput("point is within eps_ind of I(f)")
        return _apply_raw(m, pt)


def _apply_raw(m: MapData, pt: ProjPoint) -> ProjPoint:
    a, b = m._ab()
    x0, x1, x2 = pt.coords
    B = b * x0 + x1
    A = a * x0 + x2
    return ProjPoint.make(x0 * B, x2 * B, x0 * A)


def apply_inverse(m: MapData, pt: ProjPoint, bits: int = DEFAULT_BITS, eps=None) -> ProjPoint:
    """f^-1[x0:x1:x2] = [x0*x2 : x0*(x1 + a*x0 - b*x2) : x1*x2]; affinely ((x+a)/y - b, x)."""
    with mpmath.workprec(bits):
        e = _eps(eps, bits)
        if any(chordal(pt, s) <= e for s in m.inverse_indeterminacy()):
            raise IndeterminateInput("point is within eps_ind of I(f^-1)")
        a, b = m._ab()
        x0, x1, x2 = pt.coords
        return ProjPoint.make(x0 * x2, x0 * (x1 + a * x0 - b * x2), x1 * x2)


def apply_affine(a, b, x, y):
    return y, (y + a) / (x + b)


def apply_inverse_affine(a, b, x, y):
    return (x + a) / y - b, x


# ---------------------------------------------------------------------------
# orbits

REACHED_P = "reached_p"
HIT_INDETERMINACY = "hit_indeterminacy"
MAX_STEPS = "max_steps"
AMBIGUOUS = "precision_ambiguous"


@dataclass(frozen=True)
class OrbitStep:
    k: int
    point: ProjPoint
    dist_p: object
    dist_ind: object  # to the nearest of e1, e2 (the points of I(f) other than p)


@dataclass
class OrbitTrace:
    steps: list = field(default_factory=list)
    reason: str = MAX_STEPS
    bits: int = DEFAULT_BITS
    a: object = None
    b: object = None

    def __len__(self):
        return len(self.steps)

    @property
    def last_k(self) -> int:
        return self.steps[-1].k if self.steps else -1

    def to_json(self) -> dict:
        from .serialize import num

        return {
            "a": num(to_mp(self.a), self.bits) if self.a is not None else None,
            "b": num(to_mp(self.b), self.bits) if self.b is not None else None,
            "bits": self.bits,
            "reason": self.reason,
            "tolerances": {"reached_p": f"2^-{self.bits // 2}", "eps_ind": f"2^-{self.bits // 4}"},
            "steps": [
                {"k": s.k, "point": [num(z, self.bits) for z in s.point.coords],
                 "dist_p": mpmath.nstr(s.dist_p, 10), "dist_ind": mpmath.nstr(s.dist_ind, 10)}
                for s in self.steps
            ],
        }


def orbit(m: MapData, start: ProjPoint, kmax: int, bits: int = DEFAULT_BITS,
          tol=None, eps=None) -> OrbitTrace:
    """Iterate from start, recording distances, until a termination condition fires.

    reached_p: within tol of p (and not also within eps_ind of e1/e2);
    hit_indeterminacy: within tol of e1 or e2;
    precision_ambiguous: inside the gray zone (tol, eps_ind] of any point of I(f),
    or near p and another indeterminacy point at once.
    """
    if kmax < 0:
        raise DomainError("kmax must be nonnegative")
    trace = OrbitTrace(bits=bits, a=m.a, b=m.b)
    with mpmath.workprec(bits):
        t = tol_p(bits) if tol is None else mpmath.mpf(tol)
        e = _eps(eps, bits)
        p, e1, e2 = m.p, m.e1, m.e2
        pt = start.normalized()
        for k in range(kmax + 1):
            dp = chordal(pt, p)
            di = min(chordal(pt, e1), chordal(pt, e2))
            trace.steps.append(OrbitStep(k, pt, dp, di))
            if dp <= t:
                trace.reason = AMBIGUOUS if di <= e else REACHED_P
                return trace
            if di <= t:
                trace.reason = HIT_INDETERMINACY
                return trace
            if min(dp, di) <= e:
                trace.reason = AMBIGUOUS
                return trace
            if k == kmax:
                break
            pt = _apply_raw(m, pt)
    trace.reason = MAX_STEPS
    return trace


def _resolve_params(a, b, bits):
    """Numeric (a, b) at `bits`; ParamPoints with provenance are recomputed."""
    from .family import ParamPoint

    if isinstance(a, ParamPoint):
        pp = a.at_bits(bits)
        return pp.a, pp.b
    return a, b


def vn_membership(a, b=None, nmax: int = 20, bits: int = DEFAULT_BITS, cap: int = BITS_CAP):
    """Smallest n <= nmax with f^n q = p, or None.

    `a` may be a ParamPoint (then b is ignored); precision doubles on ambiguity.
    """
    if nmax < 0:
        raise DomainError("nmax must be nonnegative")
    cur = bits
    while True:
        with mpmath.workprec(cur):
            aa, bb = _resolve_params(a, b, cur)
            m = MapData(aa, bb)
            tr = orbit(m, m.q, nmax, cur)
        if tr.reason == REACHED_P:
            return tr.last_k
        if tr.reason != AMBIGUOUS:
            return None
        if cur * 2 > cap:
            raise PrecisionExhausted(f"orbit of q still ambiguous at {cur} bits")
        cur *= 2


# ---------------------------------------------------------------------------
# exact certificate

@dataclass(frozen=True)
class ZetaCertificate:
    j: int
    n: int
    positive: bool
    j_divides_n: bool
    divides_chi_n: bool
    minimal: bool
    failed: tuple[str, ...]
    witness_k: int | None = None  # smaller k with j|k and minpoly | chi(k)

    def to_json(self) -> dict:
        return dict(j=self.j, n=self.n, positive=self.positive, j_divides_n=self.j_divides_n,
                    divides_chi_n=self.divides_chi_n, minimal=self.minimal,
                    failed=list(self.failed), witness_k=self.witness_k)


def zeta_certificate(j: int, n: int, t) -> ZetaCertificate:
    """Exact test of phi_j(t) in V_n: j | n, minpoly(t) | chi(n), and no smaller such k."""
    if j not in (1, 2, 3):
        raise DomainError("j must be 1, 2 or 3")
    if n < 0:
        raise DomainError("n must be nonnegative")
    mp = t.minpoly if isinstance(t, AlgebraicNumber) else t
    if not isinstance(mp, IntPoly):
        raise DomainError("t must carry an exact minimal polynomial")
    mp = mp.primitive()
    jd = n % j == 0
    dv = mp.divides(chi(n))
    witness = None
    for k in range(0, n, j):
        if mp.divides(chi(k)):
            witness = k
            break
    minimal = witness is None
    failed = tuple(name for name, ok in (("j_divides_n", jd), ("divides_chi_n", dv), ("minimal", minimal)) if not ok)
    return ZetaCertificate(j, n, not failed, jd, dv, minimal, failed, witness)


# ---------------------------------------------------------------------------
# Lyness invariant (b = 0)

def lyness_r(a, x, y):
    return (x + y + a) * (x + 1) * (y + 1) / (x * y)


def lyness_check(a, start: Sequence, k: int = 100, bits: int = DEFAULT_BITS):
    """Max relative drift of r(x, y) = (x+y+a)(x+1)(y+1)/(xy) along k steps of f_{a,0}."""
    with mpmath.workprec(bits):
        a = to_mp(a)
        x, y = to_mp(start[0]), to_mp(start[1])
        tol = tol_p(bits)

        def check(x, y):
            for v in (x, y, x + 1, y + 1, x + y + a):
                if abs(v) <= tol * max(1, abs(x), abs(y)):
                    raise IndeterminateInput("orbit meets the excluded locus of r")

        check(x, y)
        r0 = lyness_r(a, x, y)
        worst = mpmath.mpf(0)
        for _ in range(k):
            x, y = apply_affine(a, 0, x, y)
            check(x, y)
            worst = max(worst, abs(lyness_r(a, x, y) - r0) / abs(r0))
        return worst


# ---------------------------------------------------------------------------
# the (y + alpha, y/x + beta) normal form

def normalize_conjugacy(alpha, beta):
    """g(x, y) = (y + alpha, y/x + beta) is conjugate to f_{a,b} with a = beta, b = alpha + beta."""
    from .family import ParamPoint

    return ParamPoint(beta, alpha + beta)


def conjugacy_residual(alpha, beta, segments: int = 20, length: int = 10,
                       bits: int = DEFAULT_BITS, seed: int = 0):
    """Max relative gap between T(g^k z) and f^k(T z), T(x, y) = (x - b, y - a)."""
    rng = random.Random(seed)
    with mpmath.workprec(bits):
        al, be = to_mp(alpha), to_mp(beta)
        a, b = be, al + be
        worst = mpmath.mpf(0)
        for _ in range(segments):
            gx, gy = mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)), mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))
            fx, fy = gx - b, gy - a
            for _ in range(length):
                gx, gy = gy + al, gy / gx + be
                fx, fy = apply_affine(a, b, fx, fy)
                scale = max(1, abs(fx), abs(fy))
                worst = max(worst, (abs(gx - b - fx) + abs(gy - a - fy)) / scale)
        return worst


# ---------------------------------------------------------------------------
# CSV

CSV_HEADER = ("k", "x", "y", "dist_p", "dist_ind", "flag")


def _fmt(z, digits=30):
    z = mpmath.mpc(z)
    if mpmath.im(z) == 0:
        return mpmath.nstr(mpmath.re(z), digits)
    im = mpmath.im(z)
    sign = "+" if im >= 0 else "-"
    return f"{mpmath.nstr(mpmath.re(z), digits)}{sign}{mpmath.nstr(abs(im), digits)}j"


def emit_orbit_csv(trace: OrbitTrace, destination, digits: int = 30) -> int:
    """Write the trace in the affine chart; points with x0 ~ 0 get empty x, y and flag 'infinity'."""
    if not trace.steps:
        raise DomainError("empty trace")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    with mpmath.workprec(trace.bits):
        small = tol_p(trace.bits)
        for s in trace.steps:
            x0, x1, x2 = s.point.coords
            if abs(x0) <= small:
                x = y = ""
                flag = "infinity"
            else:
                x, y = _fmt(x1 / x0, digits), _fmt(x2 / x0, digits)
                flag = ""
            w.writerow((s.k, x, y, mpmath.nstr(s.dist_p, 12), mpmath.nstr(s.dist_ind, 12), flag))
    text = buf.getvalue()
    try:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(os.fspath(destination), "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        raise IOFailure(str(exc)) from exc
    return len(trace.steps)
