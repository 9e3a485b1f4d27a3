"""The parameter curves Gamma_1, Gamma_2, Gamma_3 and the dynamics attached to them.

phi_j(t) gives (a, b); on these curves f_{a,b} preserves a cubic P with
P o f = t * j_f * P, where j_f = x0 (b x0 + x1)(a x0 + x2).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .dynamics import ProjPoint, apply_affine, to_mp, tol_p
from .errors import (CycleDegenerate, DegenerateParameter, DomainError, ExcludedParameter,
                     PreconditionFailed)
from .exactpoly import IntPoly, chi, salem_poly
from .mpoly import MPoly
from .numroots import DEFAULT_BITS, GUARD_BITS, AlgebraicNumber, complex_roots, salem_root


def omega(bits: int = DEFAULT_BITS):
    with mpmath.workprec(bits + GUARD_BITS):
        return mpmath.expj(2 * mpmath.pi / 3)


def _exact(v) -> bool:
    return isinstance(v, (int, Fraction))


def _scalar(t):
    """Exact values become Fractions; AlgebraicNumbers their approximation."""
    if isinstance(t, AlgebraicNumber):
        return mpmath.mpc(t.approx)
    if isinstance(t, int):
        return Fraction(t)
    if isinstance(t, Fraction):
        return t
    return mpmath.mpc(t)


def _is_zero(v, tol) -> bool:
    return v == 0 if _exact(v) else abs(v) <= tol


# ---------------------------------------------------------------------------
# parameters

@dataclass(frozen=True)
class ParamPoint:
    """(a, b) with optional provenance (curve index j, parameter t, orbit length n)."""

    a: object
    b: object
    j: Optional[int] = None
    t: object = None
    n: Optional[int] = None

    def numeric(self):
        return to_mp(self.a), to_mp(self.b)

    def at_bits(self, bits: int) -> "ParamPoint":
        """Recompute from provenance at higher precision when t is an AlgebraicNumber."""
        if isinstance(self.t, AlgebraicNumber) and self.j is not None and bits > self.t.bits:
            with mpmath.workprec(bits + GUARD_BITS):
                pp = phi(self.j, self.t.refine(bits), allow_excluded=True, bits=bits)
            return ParamPoint(pp.a, pp.b, self.j, pp.t, self.n)
        return self

    def to_json(self, bits: int = DEFAULT_BITS) -> dict:
        from .serialize import num

        out = {"a": num(self.a, bits), "b": num(self.b, bits)}
        if self.j is not None:
            out["j"] = self.j
        if self.t is not None:
            out["t"] = self.t.to_json() if isinstance(self.t, AlgebraicNumber) else num(self.t, bits)
        if self.n is not None:
            out["n"] = self.n
        return out


def excluded_reason(t, bits: int = DEFAULT_BITS) -> Optional[str]:
    tv = _scalar(t)
    tol = tol_p(bits)
    for name, v in (("t = 0", tv), ("t = 1", tv - 1), ("t = -1", tv + 1), ("t^3 = 1", tv ** 3 - 1)):
        if _is_zero(v, tol):
            return name
    return None


def _phi_formula(j: int, t):
    if j == 1:
        num_a, den_a = t - t ** 3 - t ** 4, (1 + t) ** 2
        num_b, den_b = 1 - t ** 5, t ** 2 + t ** 3
    elif j == 2:
        num_a, den_a = t + t ** 2 + t ** 3, (1 + t) ** 2
        num_b, den_b = t ** 3 - 1, t + t ** 2
    elif j == 3:
        num_a, den_a = 1 + t, 1
        num_b, den_b = t ** 2 - 1, t
    else:
        raise DomainError("j must be 1, 2 or 3")
    return num_a, den_a, num_b, den_b


def phi(j: int, t, allow_excluded: bool = False, bits: int = DEFAULT_BITS) -> ParamPoint:
    """(a, b) = phi_j(t).

    phi_1(t) = ((t - t^3 - t^4)/(1+t)^2, (1 - t^5)/(t^2 + t^3))
    phi_2(t) = ((t + t^2 + t^3)/(1+t)^2, (t^3 - 1)/(t + t^2))
    phi_3(t) = (1 + t, t - 1/t)

    t in {0, 1, -1} or t^3 = 1 raises ExcludedParameter; with allow_excluded the
    formula is evaluated directly wherever its denominators do not vanish.
    """
    if j not in (1, 2, 3):
        raise DomainError("j must be 1, 2 or 3")
    reason = excluded_reason(t, bits)
    if reason and not allow_excluded:
        raise ExcludedParameter(f"{reason}: the invariant cubic degenerates at this parameter")
    with mpmath.workprec(bits + GUARD_BITS):
        tv = _scalar(t)
        na, da, nb, db = _phi_formula(j, tv)
        tol = tol_p(bits)
        if _is_zero(da, tol) or _is_zero(db, tol):
            raise DegenerateParameter(f"phi_{j} has a pole at this t")
        a, b = na / da, nb / db
    return ParamPoint(a, b, j, t)


# ---------------------------------------------------------------------------
# invariant cubic

MONOMIALS3 = tuple((i, j, 3 - i - j) for i in range(3, -1, -1) for j in range(3 - i, -1, -1))


def cubic_coefficients(t, a, b) -> dict:
    """Coefficients of P_{t,a,b} by monomial exponent (e0, e1, e2); works over any ring."""
    u = t - 1
    return {
        (3, 0, 0): a * u * t ** 4,
        (2, 1, 0): u * t ** 3 * (a + t),
        (2, 0, 1): u * t ** 4 * (a + t - 2 * b),
        (1, 2, 0): u * t ** 3,
        (1, 1, 1): 2 * b * t ** 3,
        (1, 0, 2): u * (1 + b * t),
        (0, 2, 1): u * t ** 2,
        (0, 1, 2): u * t,
        (0, 3, 0): 0 * t,
        (0, 0, 3): 0 * t,
    }


@dataclass(frozen=True)
class CubicForm:
    coeffs: dict
    j: Optional[int] = None
    t: object = None
    a: object = None
    b: object = None

    def __call__(self, x0, x1, x2):
        return sum((c * x0 ** e[0] * x1 ** e[1] * x2 ** e[2] for e, c in self.coeffs.items()), 0 * x0)

    def coefficient(self, e0: int, e1: int, e2: int):
        return self.coeffs.get((e0, e1, e2), 0)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs.values())

    def max_abs(self):
        return max(abs(c) for c in self.coeffs.values())

    def to_json(self, bits: int = DEFAULT_BITS) -> dict:
        from .serialize import num

        return {"monomials": [list(e) for e in MONOMIALS3],
                "coeffs": [num(self.coeffs[e], bits) for e in MONOMIALS3]}


def invariant_cubic(j: int, t, allow_excluded: bool = False, bits: int = DEFAULT_BITS) -> CubicForm:
    pp = phi(j, t, allow_excluded, bits)
    with mpmath.workprec(bits + GUARD_BITS):
        tv = _scalar(t)
        cs = cubic_coefficients(tv, pp.a, pp.b)
    return CubicForm(cs, j, t, pp.a, pp.b)


def jf(a, b, x0, x1, x2):
    """The Jacobian-determinant cubic x0 (b x0 + x1)(a x0 + x2)."""
    return x0 * (b * x0 + x1) * (a * x0 + x2)


def j3_lines(t):
    """Linear forms (c0, c1, c2) of the three lines making up P when j = 3."""
    return ((t, 1, 0), (t, 0, 1), (t + t ** 2, t, 1))


def cubic_from_lines(lines) -> dict:
    """Coefficients of the product of three linear forms."""
    out: dict = {}
    for i0, c0 in enumerate(lines[0]):
        for i1, c1 in enumerate(lines[1]):
            for i2, c2 in enumerate(lines[2]):
                e = [0, 0, 0]
                for i in (i0, i1, i2):
                    e[i] += 1
                e = tuple(e)
                out[e] = out.get(e, 0) + c0 * c1 * c2
    return out


def divide_by_linear(coeffs: dict, lin) -> tuple[dict, dict]:
    """Divide a cubic by l0 x0 + l1 x1 + l2 x2 (l1 != 0) as polynomials in x1.

    Returns (quadric coefficients, remainder coefficients); the remainder is free of x1.
    """
    l0, l1, l2 = lin
    rem = {e: c for e, c in coeffs.items() if c != 0}
    quo: dict = {}
    for deg in (3, 2, 1):
        for e in [e for e in list(rem) if e[1] == deg]:
            c = rem.pop(e)
            qe = (e[0], e[1] - 1, e[2])
            qc = c / l1
            quo[qe] = quo.get(qe, 0) + qc
            for k, lk in ((0, l0), (2, l2)):
                if lk != 0:
                    ne = list(qe)
                    ne[k] += 1
                    ne = tuple(ne)
                    rem[ne] = rem.get(ne, 0) - qc * lk
    return quo, {e: c for e, c in rem.items() if c != 0}


# ---------------------------------------------------------------------------
# functional equation

def _phi_num_den(j: int) -> tuple[IntPoly, IntPoly, IntPoly]:
    """(A, B, D) with a = A/D, b = B/D on Gamma_j."""
    x = IntPoly.x()
    one = IntPoly((1,))
    if j == 1:
        d = x ** 2 * (one + x) ** 2
        return x ** 2 * (x - x ** 3 - x ** 4), (one - x ** 5) * (one + x), d
    if j == 2:
        d = x * (one + x) ** 2
        return x * (x + x ** 2 + x ** 3), (x ** 3 - one) * (one + x), d
    if j == 3:
        return x + x ** 2, x ** 2 - one, x
    raise DomainError("j must be 1, 2 or 3")


@dataclass
class FunctionalEquationReport:
    j: int
    mode: str
    coefficients: list = field(default_factory=list)  # (monomial, value) over all 28 sextic monomials
    residual: object = None

    @property
    def holds(self) -> bool:
        if self.mode == "symbolic":
            return all(v.is_zero() for _, v in self.coefficients)
        return self.residual is not None

    def to_json(self):
        if self.mode == "symbolic":
            return {"j": self.j, "mode": self.mode, "all_zero": self.holds,
                    "coefficients": [[list(m), v.to_json()] for m, v in self.coefficients]}
        return {"j": self.j, "mode": self.mode, "residual": mpmath.nstr(self.residual, 10)}


def _residual_poly(P, A, B, t, x0, x1, x2):
    """P o f - t * j_f * P for a cubic given by coefficient dict P."""
    bx = B * x0 + x1
    ax = A * x0 + x2
    y = (x0 * bx, x2 * bx, x0 * ax)
    lhs = 0
    for e, c in P.items():
        lhs = lhs + c * y[0] ** e[0] * y[1] ** e[1] * y[2] ** e[2]
    rhs = 0
    for e, c in P.items():
        rhs = rhs + c * x0 ** e[0] * x1 ** e[1] * x2 ** e[2]
    return lhs - t * (x0 * bx * ax) * rhs


def sextic_monomials():
    return [(i, j, 6 - i - j) for i in range(6, -1, -1) for j in range(6 - i, -1, -1)]


def verify_functional_equation(j: int, t=None, mode: str = "symbolic", bits: int = DEFAULT_BITS):
    """Compute P o f - t j_f P.

    symbolic: t is an indeterminate; the 28 coefficients are returned as
    polynomials in t (numerators after clearing the denominator D^4 of a, b).
    numeric: residual max-modulus after scaling P to unit max coefficient.
    """
    if j not in (1, 2, 3):
        raise DomainError("j must be 1, 2 or 3")
    if mode == "symbolic":
        # variables: t, a, b, x0, x1, x2
        T, A, B, X0, X1, X2 = (MPoly.var(i, 6) for i in range(6))
        P = cubic_coefficients(T, A, B)
        R = _residual_poly(P, A, B, T, X0, X1, X2)
        num_a, num_b, den = _phi_num_den(j)
        top = 4  # (a, b)-degree bound of the residual
        pw_a = [num_a ** k for k in range(top + 1)]
        pw_b = [num_b ** k for k in range(top + 1)]
        pw_d = [den ** k for k in range(top + 1)]
        acc: dict = {m: IntPoly() for m in sextic_monomials()}
        for (et, ea, eb, e0, e1, e2), c in R.terms.items():
            if ea + eb > top:
                raise AssertionError("unexpected (a, b)-degree")
            term = (pw_a[ea] * pw_b[eb] * pw_d[top - ea - eb]).shift(et) * int(c)
            acc[(e0, e1, e2)] = acc[(e0, e1, e2)] + term
        return FunctionalEquationReport(j, mode, [(m, acc[m]) for m in sextic_monomials()])
    if mode != "numeric":
        raise DomainError("mode must be 'symbolic' or 'numeric'")
    cub = invariant_cubic(j, t, bits=bits)
    with mpmath.workprec(bits + GUARD_BITS):
        tv = _scalar(t)
        scale = max(abs(to_mp(c)) for c in cub.coeffs.values())
        P = {e: to_mp(c) / scale for e, c in cub.coeffs.items()}
        X0, X1, X2 = (MPoly.var(i, 3) for i in range(3))
        R = _residual_poly(P, to_mp(cub.a), to_mp(cub.b), to_mp(tv), X0, X1, X2)
        coeffs = [(m, R.terms.get(m, mpmath.mpc(0))) for m in sextic_monomials()]
        res = max((abs(v) for _, v in coeffs), default=mpmath.mpf(0))
    return FunctionalEquationReport(j, mode, coeffs, res)


# ---------------------------------------------------------------------------
# fixed points

def jacobian(a, b, x, y):
    """Df at (x, y) = [[0, 1], [-(y+a)/(x+b)^2, 1/(x+b)]]."""
    return ((0, 1), (-(y + a) / (x + b) ** 2, 1 / (x + b)))


def eig2(m):
    """Eigenvalues of a 2x2 matrix from its trace and determinant."""
    tr = m[0][0] + m[1][1]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    disc = mpmath.sqrt(to_mp(tr) ** 2 - 4 * to_mp(det))
    return (to_mp(tr) + disc) / 2, (to_mp(tr) - disc) / 2


def order_pair(u, v):
    """eta1 has the smaller argument in [0, 2pi), ties broken by modulus."""
    def key(z):
        z = to_mp(z)
        if z == 0:
            return (mpmath.mpf(0), mpmath.mpf(0))
        arg = mpmath.arg(z)
        if arg < 0:
            arg += 2 * mpmath.pi
        return (arg, abs(z))
    return (u, v) if key(u) <= key(v) else (v, u)


@dataclass(frozen=True)
class FixedPointData:
    kind: str  # "FP_s" or "FP_r"
    x: object  # affine x = y coordinate
    location: ProjPoint
    eta1: object
    eta2: object

    @property
    def eigenvalues(self):
        return (self.eta1, self.eta2)

    def to_json(self, bits: int = DEFAULT_BITS) -> dict:
        from .serialize import num

        return {"kind": self.kind, "x": num(self.x, bits), "eta1": num(self.eta1, bits),
                "eta2": num(self.eta2, bits)}


def fp_r_trace(j: int, t):
    """Trace of the FP_r Jacobian [[0, 1], [-1/t, tau]] for j = 2, 3."""
    if j == 2:
        return (1 + t) / (1 + t + t ** 2)
    if j == 3:
        return 1 / (t + 1)
    raise DomainError("closed-form FP_r Jacobian is given for j = 2, 3")


def fp_r_eigenvalues(j: int, t):
    """Unordered FP_r eigenvalues: closed forms for j = 1, Jacobian roots for j = 2, 3."""
    t = to_mp(t)
    if j == 1:
        return 1 / t, -(t ** 3 + t ** 2 - 1) / (t ** 4 - t ** 2 - t)
    tau = fp_r_trace(j, t)
    disc = mpmath.sqrt(tau ** 2 - 4 / t)
    return (tau + disc) / 2, (tau - disc) / 2


def fixed_points(j: int, t, bits: int = DEFAULT_BITS) -> tuple[FixedPointData, FixedPointData]:
    """(FP_s, FP_r) with eigenvalues ordered per `order_pair`."""
    phi(j, t, bits=bits)  # validates t
    with mpmath.workprec(bits + GUARD_BITS):
        tv = _scalar(t)
        tol = tol_p(bits)
        if j == 1:
            dens = ((1 + tv), (tv ** 2 + tv ** 3), (tv ** 4 - tv ** 2 - tv))
        elif j == 2:
            dens = ((1 + tv), (tv + tv ** 2), (1 + tv + tv ** 2))
        else:
            dens = (tv, tv + 1)
        if any(_is_zero(d, tol) for d in dens):
            raise DegenerateParameter("a fixed-point formula has a vanishing denominator")
        if j == 1:
            xs, xr = tv ** 3 / (1 + tv), (-1 + tv ** 2 + tv ** 3) / (tv ** 2 + tv ** 3)
            es = (tv ** 2, tv ** 3)
        elif j == 2:
            xs, xr = -tv ** 2 / (1 + tv), (1 + tv + tv ** 2) / (tv + tv ** 2)
            es = (-tv, -tv ** 2)
        else:
            w = omega(bits)
            xs, xr = -tv, 1 + 1 / tv
            es = (w * to_mp(tv), w ** 2 * to_mp(tv))
        er = fp_r_eigenvalues(j, tv)
        fs = FixedPointData("FP_s", xs, ProjPoint.affine(xs, xs), *order_pair(*(to_mp(e) for e in es)))
        fr = FixedPointData("FP_r", xr, ProjPoint.affine(xr, xr), *order_pair(*er))
    return fs, fr


# ---------------------------------------------------------------------------
# cycles

def p3_coeffs(a, b):
    """Ascending coefficients of z^3 + (1+a+b+b^2) z^2 + (b^3+ab+2a-1) z - 1 + a - b + ab - b^2."""
    return [-1 + a - b + a * b - b ** 2, b ** 3 + a * b + 2 * a - 1, 1 + a + b + b ** 2, 1]


def p2_coeffs(a, b):
    """The 2-cycle {(u, v), (v, u)}: u, v are the roots of z^2 + (b+1) z + (b+1-a)."""
    return [b + 1 - a, b + 1, 1]


@dataclass(frozen=True)
class CycleData:
    length: int
    points: tuple
    mu: object  # det of the Jacobian product around the cycle
    tau: object  # its trace
    eigenvalues: tuple = ()

    def to_json(self, bits: int = DEFAULT_BITS) -> dict:
        from .serialize import num

        return {"length": self.length,
                "points": [[num(x, bits), num(y, bits)] for x, y in self.points],
                "mu": num(self.mu, bits), "tau": num(self.tau, bits)}


def jacobian_product(a, b, points):
    """J = Df(p_{l-1}) ... Df(p_0) accumulated along the cycle."""
    m = ((mpmath.mpc(1), mpmath.mpc(0)), (mpmath.mpc(0), mpmath.mpc(1)))
    for x, y in points:
        d = jacobian(a, b, x, y)
        m = tuple(tuple(sum(d[i][k] * m[k][jj] for k in range(2)) for jj in range(2)) for i in range(2))
    return m


def cycle_points(length: int, a, b, bits: int = DEFAULT_BITS) -> CycleData:
    if length not in (2, 3):
        raise DomainError("cycle length must be 2 or 3")
    with mpmath.workprec(bits + GUARD_BITS):
        a, b = to_mp(_scalar(a)), to_mp(_scalar(b))
        tol = tol_p(bits)
        if length == 2:
            c0, c1, _ = p2_coeffs(a, b)
            disc = mpmath.sqrt(c1 ** 2 - 4 * c0)
            zs = [(-c1 + disc) / 2, (-c1 - disc) / 2]
        else:
            zs = complex_roots(p3_coeffs(a, b), bits)
        scale = max([1] + [abs(z) for z in zs])
        for i in range(len(zs)):
            for k in range(i):
                if abs(zs[i] - zs[k]) <= tol * scale:
                    raise CycleDegenerate("cycle coordinates coincide")
        if any(abs(z + b) <= tol * scale for z in zs):
            raise CycleDegenerate("cycle meets the indeterminacy locus")
        if length == 2:
            u, v = zs
            pts = ((u, v), (v, u))
        else:
            best = None
            for order in ((0, 1, 2), (0, 2, 1)):
                z1, z2, z3 = (zs[i] for i in order)
                pts = ((z1, z2), (z2, z3), (z3, z1))
                err = max(abs(apply_affine(a, b, *pts[i])[1] - pts[(i + 1) % 3][1]) for i in range(3))
                if best is None or err < best[0]:
                    best = (err, pts)
            err, pts = best
            if err > mpmath.sqrt(tol) * scale:
                raise CycleDegenerate("roots of P_3 do not assemble into a 3-cycle")
        J = jacobian_product(a, b, pts)
        mu = J[0][0] * J[1][1] - J[0][1] * J[1][0]
        tau = J[0][0] + J[1][1]
        return CycleData(length, pts, mu, tau, eig2(J))


def cycle_multipliers(length: int, a, b, variant: str = "printed"):
    """(mu, tau) for the 2- or 3-cycle from closed forms.

    variant="printed" uses the published expressions; "corrected" uses the
    forms that agree with the Jacobian product (the printed denominators of
    mu_2, tau_2 and mu_3 differ from it).
    """
    a, b = _scalar(a), _scalar(b)
    if variant not in ("printed", "corrected"):
        raise DomainError("variant must be 'printed' or 'corrected'")
    if length == 2:
        if variant == "printed":
            den = 2 * b ** 2 + a - 1
            num_mu, num_tau = a - b - 1, 3 - 2 * a + b - b ** 2
        else:
            den = a - 1
            num_mu, num_tau = a - b - 1, 1 - 2 * a + b - b ** 2
        dens = (den, den)
    elif length == 3:
        num_mu = 1 + b + b ** 2 - a - a * b
        den_mu = 1 - a - a * b if variant == "printed" else 1 - a + a * b
        num_tau = 2 + a ** 2 + b + 2 * b ** 2 - b ** 3 + b ** 4 + a * (-2 - b + 2 * b ** 2)
        den_tau = -1 + a - a * b
        dens = (den_mu, den_tau)
    else:
        raise DomainError("cycle length must be 2 or 3")
    if any(_is_zero(d, tol_p(DEFAULT_BITS)) for d in dens):
        raise DegenerateParameter("multiplier denominator vanishes")
    return num_mu / dens[0], num_tau / dens[1]


def cycle_eigenvalue_formula(length: int, t):
    """(t^-l, -t^(l-1)(t^3+t^2-1)/(t^3-t-1)) for the l-cycle on Gamma_l."""
    t = to_mp(t)
    return t ** (-length), -t ** (length - 1) * (t ** 3 + t ** 2 - 1) / (t ** 3 - t - 1)


# ---------------------------------------------------------------------------
# resonances

def _require_root(n: int, t) -> IntPoly:
    """Minimal polynomial of t, checked to divide chi(n) exactly."""
    if isinstance(t, AlgebraicNumber):
        mp = t.minpoly
        if not mp.primitive().divides(chi(n)):
            raise PreconditionFailed(f"minimal polynomial of t does not divide chi({n})")
        return mp
    tv = _scalar(t)
    if _exact(tv):
        if chi(n)(tv) != 0:
            raise PreconditionFailed(f"chi({n})(t) != 0")
        return IntPoly((-tv.numerator, tv.denominator))
    raise PreconditionFailed("t must be exact or an AlgebraicNumber")


@dataclass(frozen=True)
class ResonanceReport:
    j: int
    n: int
    eta1: object
    eta2: object
    exponent_stated: int
    residual_stated: object
    exponent_derived: int
    residual_derived: object

    @property
    def residuals(self):
        return (self.residual_stated, self.residual_derived)

    def to_json(self, bits: int = DEFAULT_BITS) -> dict:
        from .serialize import num

        return {"j": self.j, "n": self.n, "eta1": num(self.eta1, bits), "eta2": num(self.eta2, bits),
                "exponent_stated": self.exponent_stated,
                "residual_stated": mpmath.nstr(self.residual_stated, 10),
                "exponent_derived": self.exponent_derived,
                "residual_derived": mpmath.nstr(self.residual_derived, 10)}


def resonance_check(j: int, n: int, t, bits: int = DEFAULT_BITS) -> ResonanceReport:
    """Residuals of the resonance relations.

    j = 1: |eta1^n eta2 - 1| at FP_r with eta1 = 1/t.
    j = 2, 3: for the j-cycle eigenvalues eta1 = t^-j, eta2, both the stated
    exponent n+1 and the exponent n/j + 1 (from eta2 = t^(n+j) when chi_n(t) = 0).
    """
    if j not in (1, 2, 3):
        raise DomainError("j must be 1, 2 or 3")
    if n % j:
        raise PreconditionFailed(f"{j} does not divide {n}")
    _require_root(n, t)
    with mpmath.workprec(bits + GUARD_BITS):
        tv = to_mp(_scalar(t))
        if j == 1:
            e1, e2 = fp_r_eigenvalues(1, tv)
            stated = derived = n
        else:
            e1, e2 = cycle_eigenvalue_formula(j, tv)
            stated, derived = n + 1, n // j + 1
        rs = abs(e1 ** stated * e2 - 1)
        rd = abs(e1 ** derived * e2 - 1)
    return ResonanceReport(j, n, e1, e2, stated, rs, derived, rd)


# ---------------------------------------------------------------------------
# rotation-domain eligibility

def eligibility_bounds(bits: int = DEFAULT_BITS) -> dict:
    with mpmath.workprec(bits):
        s = mpmath.sqrt(17)
        return {
            "stated": {"j2_re_min": mpmath.mpf(-7) / 8,
                       "j3_excluded": ((-23 - s) / 32, (-23 + s) / 32)},
            "corrected": {"j3_re_min": mpmath.mpf(-7) / 8,
                          "j2_excluded": ((-7 - s) / 16, (-7 + s) / 16)},
        }


def closed_form_on_circle(j: int, t, variant: str = "stated", bits: int = DEFAULT_BITS) -> bool:
    """Closed-form test of |eta1| = |eta2| = 1 at FP_r for |t| = 1."""
    re = mpmath.re(to_mp(t))
    lb = eligibility_bounds(bits)
    if variant == "stated":
        if j == 2:
            return bool(re >= lb["stated"]["j2_re_min"])
        lo, hi = lb["stated"]["j3_excluded"]
        return not (lo < re < hi)
    if j == 3:
        return bool(re >= lb["corrected"]["j3_re_min"])
    lo, hi = lb["corrected"]["j2_excluded"]
    return not (lo < re < hi)


def multiplicative_relation(e1, e2, M: int = 50, bits: int = 512):
    """Search 0 < |m1| + |m2| <= M with e1^m1 e2^m2 = 1; returns (m1, m2) or None."""
    with mpmath.workprec(bits + GUARD_BITS):
        e1, e2 = to_mp(e1), to_mp(e2)
        tol = tol_p(bits)
        p1 = {0: mpmath.mpc(1)}
        p2 = {0: mpmath.mpc(1)}
        for k in range(1, M + 1):
            p1[k], p1[-k] = p1[k - 1] * e1, p1[-(k - 1)] / e1
            p2[k], p2[-k] = p2[k - 1] * e2, p2[-(k - 1)] / e2
        for total in range(1, M + 1):
            for m1 in range(-total, total + 1):
                rest = total - abs(m1)
                for m2 in {rest, -rest}:
                    if abs(p1[m1] * p2[m2] - 1) <= tol:
                        return (m1, m2)
    return None


@dataclass
class RotationReport:
    j: int
    n: int
    t: object
    rank1_at_FPs: bool
    FPr_moduli_on_circle: bool
    rank2_candidate: bool
    saddle: bool
    eta1: object
    eta2: object
    moduli: tuple
    moduli_on_circle_direct: bool
    closed_form_stated: Optional[bool]
    closed_form_corrected: Optional[bool]
    rank2_candidate_direct: bool
    relation: Optional[tuple]
    M: int
    bits: int

    def booleans(self) -> tuple:
        return (self.rank1_at_FPs, self.FPr_moduli_on_circle, self.rank2_candidate, self.saddle,
                self.moduli_on_circle_direct, self.rank2_candidate_direct)

    def to_json(self) -> dict:
        from .serialize import num

        lb = eligibility_bounds(self.bits)
        return {
            "j": self.j, "n": self.n, "t": num(to_mp(self.t), self.bits),
            "rank1_at_FPs": self.rank1_at_FPs,
            "FPr_moduli_on_circle": self.FPr_moduli_on_circle,
            "rank2_candidate": self.rank2_candidate,
            "saddle": self.saddle,
            "eta1": num(self.eta1, self.bits), "eta2": num(self.eta2, self.bits),
            "moduli": [mpmath.nstr(m, 20) for m in self.moduli],
            "moduli_on_circle_direct": self.moduli_on_circle_direct,
            "closed_form_stated": self.closed_form_stated,
            "closed_form_corrected": self.closed_form_corrected,
            "rank2_candidate_direct": self.rank2_candidate_direct,
            "relation": list(self.relation) if self.relation else None,
            "M": self.M,
            "bounds": {
                "stated_j2_re_min": "-7/8",
                "stated_j3_excluded": ["(-23-sqrt(17))/32", "(-23+sqrt(17))/32",
                                       mpmath.nstr(lb["stated"]["j3_excluded"][0], 15),
                                       mpmath.nstr(lb["stated"]["j3_excluded"][1], 15)],
                "corrected_j3_re_min": "-7/8",
                "corrected_j2_excluded": ["(-7-sqrt(17))/16", "(-7+sqrt(17))/16",
                                          mpmath.nstr(lb["corrected"]["j2_excluded"][0], 15),
                                          mpmath.nstr(lb["corrected"]["j2_excluded"][1], 15)],
            },
        }


def rotation_classify(j: int, n: int, t, M: int = 50, bits: int = DEFAULT_BITS,
                      search_bits: int = 512) -> RotationReport:
    """Eligibility report for rotation domains at FP_s (rank 1) and FP_r (rank 2).

    FPr_moduli_on_circle follows the closed-form rule (|t| = 1 and the Re(t)
    test); the direct eigenvalue moduli are reported alongside.
    """
    if j not in (1, 2, 3):
        raise DomainError("j must be 1, 2 or 3")
    if n % j:
        raise PreconditionFailed(f"{j} does not divide {n}")
    if not isinstance(t, AlgebraicNumber) or t.minpoly.primitive() != salem_poly(n):
        raise PreconditionFailed(f"t must be a root of psi_{n}")
    lam = salem_root(n, bits)
    with mpmath.workprec(bits + GUARD_BITS):
        tol = tol_p(bits)
        tv = to_mp(t.approx)
        lv = to_mp(lam.approx)
        saddle = bool(abs(tv - lv) <= tol or abs(tv * lv - 1) <= tol)
        unit = bool(abs(abs(tv) - 1) <= tol + t.radius)
        rank1 = unit and not saddle
        e1, e2 = order_pair(*fp_r_eigenvalues(j, tv))
        moduli = (abs(e1), abs(e2))
        direct = all(abs(m - 1) <= tol for m in moduli)
        if j == 1:
            stated = corrected = None
            on_circle = direct
        else:
            stated = unit and closed_form_on_circle(j, tv, "stated", bits)
            corrected = unit and closed_form_on_circle(j, tv, "corrected", bits)
            on_circle = stated
    tt = t.refine(search_bits)
    with mpmath.workprec(search_bits + GUARD_BITS):
        s1, s2 = fp_r_eigenvalues(j, to_mp(tt.approx))
    relation = multiplicative_relation(s1, s2, M, search_bits)
    return RotationReport(j, n, t.approx, rank1, on_circle, bool(on_circle and relation is None),
                          saddle, e1, e2, moduli, direct, stated, corrected,
                          bool(direct and relation is None), relation, M, bits)


# ---------------------------------------------------------------------------
# curve membership

@dataclass(frozen=True)
class GammaMatch:
    j: int
    t: object
    residual: object
    excluded: bool

    def to_json(self, bits: int = DEFAULT_BITS) -> dict:
        from .serialize import num

        return {"j": self.j, "t": num(to_mp(self.t), bits), "residual": mpmath.nstr(self.residual, 5),
                "excluded": self.excluded}


def _gamma_polys(j: int, a):
    """Ascending coefficients of the polynomial in t whose roots solve phi_j(t)_a = a."""
    if j == 1:  # a (1+t)^2 = t - t^3 - t^4
        return [a, 2 * a - 1, a, 1, 1]
    if j == 2:  # a (1+t)^2 = t + t^2 + t^3
        return [-a, 1 - 2 * a, 1 - a, 1]
    raise DomainError("j = 3 is inverted directly: t = a - 1")


def _newton(cs, z, steps=60):
    for _ in range(steps):
        p = dp = 0
        for c in reversed(cs):
            dp = dp * z + p
            p = p * z + c
        if dp == 0:
            break
        dz = p / dp
        z -= dz
        if abs(dz) <= mpmath.mpf(2) ** (-mpmath.mp.prec + 4) * max(1, abs(z)):
            break
    return z


def gamma_membership(a, b, tol=1e-20, bits: int = DEFAULT_BITS) -> list[GammaMatch]:
    """All (j, t) with phi_j(t) within tol of (a, b); excluded t values are flagged, not dropped."""
    out: list[GammaMatch] = []
    with mpmath.workprec(bits + GUARD_BITS):
        av, bv = to_mp(_scalar(a)), to_mp(_scalar(b))
        tol = mpmath.mpf(tol)
        scale = max(1, abs(av), abs(bv))
        small = tol_p(bits)

        def consider(j, t):
            try:
                pp = phi(j, t, allow_excluded=True, bits=bits)
            except DegenerateParameter:
                return
            r = abs(to_mp(pp.a) - av) + abs(to_mp(pp.b) - bv)
            if r <= tol * scale:
                for m in out:
                    if m.j == j and abs(to_mp(m.t) - t) <= mpmath.sqrt(small):
                        return
                out.append(GammaMatch(j, t, r, excluded_reason(t, bits) is not None))

        for j in (1, 2):
            cs = _gamma_polys(j, av)
            for z in complex_roots(cs, bits):
                consider(j, _newton(cs, z))
        consider(3, av - 1)

    def key(m):
        arg = mpmath.arg(to_mp(m.t)) if to_mp(m.t) != 0 else 0
        if arg < 0:
            arg += 2 * mpmath.pi
        return (m.j, float(arg), float(abs(to_mp(m.t))))

    return sorted(out, key=key)
