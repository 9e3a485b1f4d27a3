"""Multiprecision complex root isolation for integer polynomials.

Roots are found by Aberth iteration seeded with companion-matrix
eigenvalues, then certified with Weierstrass inclusion disks: if the disks
D(z_i, d*|W_i|) are pairwise disjoint, each holds exactly one root.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

from .errors import DomainError, InternalInconsistency, PrecisionExhausted
from .exactpoly import IntPoly, cyclotomic, poly_gcd, salem_poly

DEFAULT_BITS = 256
GUARD_BITS = 64


def cert_threshold(bits: int):
    return mpmath.mpf(2) ** (-(bits // 2))


@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    """A root of `minpoly` isolated in the disk of `radius` about `approx`."""

    minpoly: IntPoly
    approx: mpmath.mpc
    radius: mpmath.mpf
    bits: int = DEFAULT_BITS

    @property
    def value(self):
        return self.approx

    @property
    def is_real(self) -> bool:
        return mpmath.im(self.approx) == 0

    @property
    def is_rational(self) -> bool:
        return self.radius == 0

    def __complex__(self):
        return complex(self.approx)

    def __abs__(self):
        return abs(self.approx)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        if self.minpoly != other.minpoly:
            return False
        return abs(self.approx - other.approx) <= self.radius + other.radius

    def __hash__(self):
        return hash(self.minpoly)

    def contains(self, z, slack=0) -> bool:
        return abs(self.approx - z) <= self.radius + slack

    def refine(self, bits: int) -> "AlgebraicNumber":
        """Newton-refine to `bits`; the new disk stays inside the old one."""
        if self.radius == 0 or bits <= self.bits:
            return self
        p, dp = self.minpoly, self.minpoly.derivative()
        d = p.degree
        with mpmath.workprec(bits + GUARD_BITS):
            z = mpmath.mpc(self.approx)
            tol = mpmath.mpf(2) ** (-bits - 8)
            for _ in range(200):
                step = p(z) / dp(z)
                z -= step
                if abs(step) <= tol * max(1, abs(z)):
                    break
            r = d * abs(p(z) / dp(z)) + mpmath.mpf(2) ** (-(bits + GUARD_BITS - 8)) * max(1, abs(z))
            if abs(z - self.approx) + r > self.radius:
                raise PrecisionExhausted("refined root left its isolating disk")
            if self.is_real:
                z = mpmath.mpc(mpmath.re(z), 0)
            return AlgebraicNumber(p, +z, +r, bits)

    def to_json(self, digits: int | None = None) -> dict:
        from .serialize import num

        return {"minpoly": self.minpoly.to_json(), "approx": num(self.approx, self.bits, digits),
                "radius": mpmath.nstr(self.radius, 5), "bits": self.bits}

    def __repr__(self) -> str:
        return f"AlgebraicNumber({mpmath.nstr(self.approx, 15)}, deg={self.minpoly.degree})"


# ---------------------------------------------------------------------------
# numeric core

def _to_mp(c):
    if isinstance(c, Fraction):
        return mpmath.mpc(mpmath.mpf(c.numerator) / c.denominator)
    return mpmath.mpc(c)


def _horner2(cs, z):
    """p(z) and p'(z) for ascending coefficients cs."""
    p = cs[-1] * 0
    dp = p
    for c in reversed(cs):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _seeds(cs: Sequence) -> list:
    d = len(cs) - 1
    try:
        fc = np.array([complex(c) for c in reversed(cs)], dtype=complex)
        if not np.all(np.isfinite(fc)):
            raise OverflowError
        seeds = np.roots(fc)
        if len(seeds) == d and np.all(np.isfinite(seeds)):
            return [mpmath.mpc(complex(s)) for s in seeds]
    except (OverflowError, ValueError, np.linalg.LinAlgError):
        pass
    # fall back to a circle whose radius comes from the coefficient sizes
    lc, c0 = abs(cs[-1]), abs(cs[0])
    rad = mpmath.mpf(c0 / lc) ** (mpmath.mpf(1) / d) if c0 else mpmath.mpf(1)
    return [rad * mpmath.expj(2 * mpmath.pi * (k + 0.25) / d) for k in range(d)]


def aberth(cs: Sequence, prec: int, seeds=None, maxit: int = 500) -> list:
    """All roots of sum(cs[k] z^k) by Aberth-Ehrlich iteration (uncertified).

    Converges at low precision first, then doubles the working precision;
    near the roots each doubling costs only a couple of sweeps.
    """
    if seeds is None and prec > 128 and len(cs) > 2:
        with mpmath.workprec(prec):
            full = [_to_mp(c) for c in cs]
        zs = _aberth_at(full, 96, None, maxit)
        p = 96
        while p < prec:
            p = min(2 * p, prec)
            zs = _aberth_at(full, p, zs, maxit)
        return zs
    return _aberth_at(cs, prec, seeds, maxit)


def _aberth_at(cs: Sequence, prec: int, seeds, maxit: int) -> list:
    d = len(cs) - 1
    if d < 1:
        return []
    with mpmath.workprec(prec):
        cs = [_to_mp(c) for c in cs]
        if d == 1:
            return [-cs[0] / cs[1]]
        zs = list(seeds) if seeds is not None else _seeds(cs)
        zs = [mpmath.mpc(z) for z in zs]
        # separate coincident seeds
        for i in range(d):
            for j in range(i):
                if zs[i] == zs[j]:
                    zs[i] += mpmath.mpf(2) ** (-20) * mpmath.expj(i)
        tol = mpmath.mpf(2) ** (-prec + 8)
        noise = mpmath.mpf(2) ** (-prec + 6) * (d + 1)
        acs = [abs(c) for c in cs]
        live = set(range(d))
        for _ in range(maxit):
            for i in sorted(live):
                zi = zs[i]
                p, dp = _horner2(cs, zi)
                if p == 0:
                    live.discard(i)
                    continue
                # once |p| is within Horner rounding error, one last step and stop
                az = abs(zi)
                bound = acs[-1]
                for c in reversed(acs[:-1]):
                    bound = bound * az + c
                settled = abs(p) <= noise * bound
                s = mpmath.fsum(1 / (zi - zs[j]) for j in range(d) if j != i)
                ratio = p / dp if dp != 0 else None
                if ratio is None:
                    w = -1 / s
                else:
                    w = ratio / (1 - ratio * s)
                zs[i] = zi - w
                if settled or abs(w) <= tol * max(1, abs(zs[i])):
                    live.discard(i)
            if not live:
                break
        return zs


def weierstrass_radii(cs: Sequence, zs: Sequence, prec: int) -> list:
    d = len(cs) - 1
    with mpmath.workprec(prec):
        lc = cs[-1]
        out = []
        floor = mpmath.mpf(2) ** (-prec + 16)
        for i, zi in enumerate(zs):
            p, _ = _horner2(cs, zi)
            den = lc
            for j, zj in enumerate(zs):
                if j != i:
                    den *= zi - zj
            w = abs(p / den) if den != 0 else mpmath.inf
            out.append(d * w * (1 + mpmath.mpf(2) ** -20) + floor * max(1, abs(zi)))
        return out


def _disjoint(zs, rs) -> bool:
    order = sorted(range(len(zs)), key=lambda i: mpmath.re(zs[i]) - rs[i])
    for a_pos, i in enumerate(order):
        right = mpmath.re(zs[i]) + rs[i]
        for j in order[a_pos + 1:]:
            if mpmath.re(zs[j]) - rs[j] > right:
                break
            if abs(zs[i] - zs[j]) <= rs[i] + rs[j]:
                return False
    return True


def root_sort_key(z, bits: int = DEFAULT_BITS):
    """Descending modulus, then ascending argument in [0, 2pi), quantized for stability."""
    q = mpmath.mpf(2) ** (bits // 4)
    arg = mpmath.arg(z)
    if arg < 0:
        arg += 2 * mpmath.pi
    return (-int(mpmath.nint(abs(z) * q)), int(mpmath.nint(arg * q)))


def _rational_root(p: IntPoly, z) -> Fraction | None:
    if abs(mpmath.im(z)) > 1e-6 * max(1, abs(z)):
        return None
    lc = abs(p.lc)
    f = Fraction(str(mpmath.nstr(mpmath.re(z), 40, strip_zeros=False))).limit_denominator(lc)
    num, den = f.numerator, f.denominator
    acc = sum(c * num ** k * den ** (p.degree - k) for k, c in enumerate(p.coeffs))
    return f if acc == 0 else None


def isolate_roots(p: IntPoly, bits: int = DEFAULT_BITS, check_squarefree: bool = True) -> list[AlgebraicNumber]:
    """Certified isolation of all roots of a squarefree integer polynomial.

    Rational roots come back exactly with radius 0. Raises PrecisionExhausted
    when the inclusion disks overlap or exceed 2**(-bits/2) (relative).
    """
    if p.is_zero():
        raise DomainError("zero polynomial")
    p = p.primitive()
    if p.degree < 1:
        return []
    if check_squarefree and poly_gcd(p, p.derivative()).degree > 0:
        raise DomainError("polynomial is not squarefree")
    prec = bits + GUARD_BITS
    with mpmath.workprec(prec):
        zs = aberth([mpmath.mpf(c) for c in p.coeffs], prec)
        rs = weierstrass_radii([mpmath.mpf(c) for c in p.coeffs], zs, prec)
        thr = cert_threshold(bits)
        if not _disjoint(zs, rs) or any(r > thr * max(1, abs(z)) for z, r in zip(zs, rs)):
            raise PrecisionExhausted(f"root enclosures not certified at {bits} bits")
        out = []
        for i, (z, r) in enumerate(zip(zs, rs)):
            fr = _rational_root(p, z)
            if fr is not None:
                out.append(AlgebraicNumber(p, mpmath.mpc(mpmath.mpf(fr.numerator) / fr.denominator, 0), mpmath.mpf(0), bits))
                continue
            # a disk that meets the real axis and whose mirror image meets no
            # other disk holds a real root (the conjugate must be itself)
            if abs(mpmath.im(z)) <= r and all(
                abs(mpmath.conj(z) - zs[j]) > r + rs[j] for j in range(len(zs)) if j != i
            ):
                z = mpmath.mpc(mpmath.re(z), 0)
            out.append(AlgebraicNumber(p, +z, +r, bits))
    out.sort(key=lambda a: root_sort_key(a.approx, bits))
    return out


def complex_roots(cs: Sequence, bits: int = DEFAULT_BITS) -> list:
    """Uncertified roots of a polynomial with (multiprecision) complex coefficients."""
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) < 2:
        return []
    return aberth(cs, bits + GUARD_BITS)


# ---------------------------------------------------------------------------
# Salem roots

@lru_cache(maxsize=256)
def psi_roots(n: int, bits: int = DEFAULT_BITS) -> tuple[AlgebraicNumber, ...]:
    """Roots of psi_n in the stable order; index 0 is lambda_n."""
    return tuple(isolate_roots(salem_poly(n), bits, check_squarefree=False))


def salem_root(n: int, bits: int = DEFAULT_BITS) -> AlgebraicNumber:
    roots = psi_roots(n, bits)
    with mpmath.workprec(bits + GUARD_BITS):
        outside = [r for r in roots if abs(r.approx) - r.radius > 1]
        if len(outside) != 1:
            raise InternalInconsistency(f"psi_{n} has {len(outside)} roots outside the unit disk")
        lam = outside[0]
        if not lam.is_real or mpmath.re(lam.approx) <= 1:
            raise InternalInconsistency("Salem root is not a real number > 1")
    return lam


def salem_configuration(n: int, bits: int = DEFAULT_BITS) -> dict:
    """Counts of psi_n roots outside, inside and on the unit circle (within enclosure radius)."""
    roots = psi_roots(n, bits)
    tol = cert_threshold(bits)
    out = {"outside": 0, "inside": 0, "on_circle": 0, "degree": len(roots)}
    for r in roots:
        m = abs(r.approx)
        if abs(m - 1) <= r.radius + tol:
            out["on_circle"] += 1
        elif m > 1:
            out["outside"] += 1
        else:
            out["inside"] += 1
    return out


def delta_star(bits: int = DEFAULT_BITS) -> AlgebraicNumber:
    """The real root of x^3 - x - 1."""
    for r in isolate_roots(IntPoly((-1, -1, 0, 1)), bits):
        if r.is_real:
            return r
    raise InternalInconsistency("x^3 - x - 1 has no isolated real root")


# ---------------------------------------------------------------------------
# Diophantine diagnostic

def small_divisor_diagnostic(t, K: int, nu: float, bits: int = DEFAULT_BITS):
    """min over 2 <= k <= K of |1 - t^k| * k^nu (finite-sample witness only)."""
    if K < 2:
        raise DomainError("K must be at least 2")
    if isinstance(t, AlgebraicNumber):
        for k in range(1, K + 1):
            phi = cyclotomic(k)
            if phi.degree == t.minpoly.degree and phi == t.minpoly:
                raise DomainError(f"t is a root of unity of order {k}")
            if phi.degree > 4 * t.minpoly.degree ** 2 + 10:
                break
        z = t.approx
    else:
        z = t
    with mpmath.workprec(bits + GUARD_BITS):
        z = _to_mp(z)
        tol = cert_threshold(bits)
        if abs(abs(z) - 1) > tol + (t.radius if isinstance(t, AlgebraicNumber) else 0):
            raise DomainError("t is not on the unit circle")
        best = None
        pw = z
        for k in range(2, K + 1):
            pw *= z
            v = abs(1 - pw) * mpmath.mpf(k) ** nu
            if abs(1 - pw) <= tol:
                raise DomainError(f"|1 - t^{k}| vanishes to working precision")
            best = v if best is None or v < best else best
        return best
