"""Exact integer polynomial arithmetic.

Dense univariate polynomials over Z (IntPoly), sparse bivariate ones in
(a, b) (BiPoly), the chi_n / psi_n family with its cyclotomic schedule,
GCDs and Sylvester resultants.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, Sequence

from .errors import DegenerateInput, DomainError, InternalInconsistency

try:  # GMP integers make the big-integer determinant much faster
    from gmpy2 import mpz as _mpz, divexact as _divexact
except ImportError:  # pragma: no cover
    _mpz = int

    def _divexact(x, y):
        return x // y


def _strip(cs: Iterable[int]) -> tuple[int, ...]:
    cs = [int(c) for c in cs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class IntPoly:
    """Dense polynomial with integer coefficients in ascending degree order."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs))

    # construction -------------------------------------------------------
    @classmethod
    def x(cls) -> "IntPoly":
        return cls((0, 1))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntPoly":
        return cls((0,) * k + (c,))

    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls((c,))

    @classmethod
    def from_terms(cls, terms: dict[int, int]) -> "IntPoly":
        if not terms:
            return cls()
        cs = [0] * (max(terms) + 1)
        for k, c in terms.items():
            cs[k] += c
        return cls(cs)

    # basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def primitive(self) -> "IntPoly":
        """Primitive part with positive leading coefficient."""
        if not self.coeffs:
            return self
        c = self.content()
        if self.lc < 0:
            c = -c
        return IntPoly(x // c for x in self.coeffs)

    normalized = primitive

    def norm1(self) -> int:
        return sum(abs(c) for c in self.coeffs)

    def max_norm(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "IntPoly":
        if isinstance(other, IntPoly):
            return other
        if isinstance(other, int):
            return IntPoly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return IntPoly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(c * other for c in self.coeffs)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPoly()
        if min(len(a), len(b)) > 64:
            return IntPoly(_kronecker_mul(a, b))
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out, base = IntPoly((1,)), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, v):
        acc = 0 * v if not isinstance(v, int) else 0
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def derivative(self) -> "IntPoly":
        return IntPoly(k * c for k, c in enumerate(self.coeffs) if k)

    def shift(self, k: int) -> "IntPoly":
        """Multiply by x**k."""
        return IntPoly((0,) * k + self.coeffs) if self.coeffs else self

    def reverse(self) -> "IntPoly":
        return IntPoly(reversed(self.coeffs))

    def divmod(self, d: "IntPoly") -> tuple["IntPoly", "IntPoly"]:
        """Division over Z; raises DomainError when a quotient coefficient is not integral."""
        if d.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        r = list(self.coeffs)
        dc, dd, lc = d.coeffs, d.degree, d.lc
        q = [0] * max(len(r) - dd, 0)
        for k in range(len(r) - 1, dd - 1, -1):
            c = r[k]
            if not c:
                continue
            qk, rem = divmod(c, lc)
            if rem:
                raise DomainError("quotient is not integral")
            q[k - dd] = qk
            base = k - dd
            for i, x in enumerate(dc):
                r[base + i] -= qk * x
        return IntPoly(q), IntPoly(r[:dd] if dd > 0 else ())

    def __floordiv__(self, d):
        return self.divmod(self._coerce(d))[0]

    def __mod__(self, d):
        return self.divmod(self._coerce(d))[1]

    def divides(self, p: "IntPoly") -> bool:
        """True when self divides p in Z[x]."""
        try:
            return p.divmod(self)[1].is_zero()
        except DomainError:
            return False

    def exact_div(self, d: "IntPoly") -> "IntPoly":
        q, r = self.divmod(d)
        if r:
            raise InternalInconsistency(f"nonzero remainder dividing by {d}")
        return q

    def pseudo_rem(self, d: "IntPoly") -> "IntPoly":
        r = list(self.coeffs)
        dc, dd, lc = d.coeffs, d.degree, d.lc
        while len(r) - 1 >= dd and r:
            c = r[-1]
            base = len(r) - 1 - dd
            r = [lc * x for x in r]
            for i, x in enumerate(dc):
                r[base + i] -= c * x
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return IntPoly(r)

    # presentation -------------------------------------------------------
    def to_json(self) -> dict:
        return {"coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "IntPoly":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(c) for c in obj["coeffs"])

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            m = abs(c)
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            body = str(m) if (m != 1 or k == 0) else ""
            if body and mono:
                body += "*"
            parts.append((sign, body + mono))
        head = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
        return head + "".join(f" {s} {t}" for s, t in parts[1:])

    def __repr__(self) -> str:
        return f"IntPoly({str(self)})"


def _kronecker_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    k = bound.bit_length() + 2
    va, vb = _pack(a, k), _pack(b, k)
    return _unpack(va * vb, k, len(a) + len(b) - 1)


def _pack(cs: Sequence[int], k: int):
    acc = _mpz(0)
    for c in reversed(cs):
        acc = (acc << k) + c
    return acc


def _unpack(v, k: int, n: int) -> list[int]:
    """Signed base-2**k digits of v (lowest first); v must fit in n digits."""
    v = _mpz(v)
    base = _mpz(1) << k
    half = base >> 1
    mask = base - 1
    out = []
    for _ in range(n):
        c = v & mask
        if c >= half:
            c -= base
        out.append(int(c))
        v = (v - c) >> k
    if v != 0:
        raise InternalInconsistency("packed value exceeds the digit budget")
    return out


# ---------------------------------------------------------------------------
# the chi_n family

def chi(n: int) -> IntPoly:
    """-1 + x^2 + x^3 - x^(n+1) - x^(n+2) + x^(n+4)."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    terms: dict[int, int] = {}
    for k, c in ((0, -1), (2, 1), (3, 1), (n + 1, -1), (n + 2, -1), (n + 4, 1)):
        terms[k] = terms.get(k, 0) + c
    return IntPoly.from_terms(terms)


def chi_derivative(n: int) -> IntPoly:
    """(n+4)x^(n+3) - (n+2)x^(n+1) - (n+1)x^n + 3x^2 + 2x, written out directly."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    terms: dict[int, int] = {}
    for k, c in ((1, 2), (2, 3), (n, -(n + 1)), (n + 1, -(n + 2)), (n + 3, n + 4)):
        terms[k] = terms.get(k, 0) + c
    return IntPoly.from_terms(terms)


@lru_cache(maxsize=None)
def cyclotomic(k: int) -> IntPoly:
    """The k-th cyclotomic polynomial, by exact division of x^k - 1."""
    if k < 1:
        raise DomainError("cyclotomic index must be positive")
    p = IntPoly.monomial(k) - 1
    for d in range(1, k):
        if k % d == 0:
            p = p.exact_div(cyclotomic(d))
    return p


# (index k of Phi_k, predicate on n); Phi_1 always divides chi_n
SCHEDULE: tuple[tuple[int, object], ...] = (
    (1, lambda n: True),
    (2, lambda n: n % 2 == 0),
    (3, lambda n: n % 3 == 0),
    (5, lambda n: n % 5 == 1),
    (8, lambda n: n % 8 == 2),
    (12, lambda n: n % 12 == 3),
    (18, lambda n: n % 18 == 4),
    (30, lambda n: n % 30 == 5),
)


@dataclass(frozen=True)
class Factor:
    poly: IntPoly
    multiplicity: int
    tag: object  # cyclotomic index k, or "salem"

    def to_json(self) -> dict:
        return {**self.poly.to_json(), "multiplicity": self.multiplicity, "tag": self.tag}


@dataclass(frozen=True)
class FactorList:
    factors: tuple[Factor, ...] = field(default_factory=tuple)

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    def product(self) -> IntPoly:
        out = IntPoly((1,))
        for f in self.factors:
            out = out * f.poly ** f.multiplicity
        return out

    def polys(self) -> list[IntPoly]:
        return [f.poly for f in self.factors]

    def indices(self) -> list[int]:
        return [f.tag for f in self.factors if f.tag != "salem"]

    def to_json(self) -> list:
        return [f.to_json() for f in self.factors]


def _require_n7(n: int):
    if n < 7:
        raise DomainError("the cyclotomic schedule applies for n >= 7")


def cyclotomic_part(n: int) -> FactorList:
    """Cyclotomic factors of chi(n) predicted by the schedule, each checked by exact division."""
    _require_n7(n)
    c = chi(n)
    out = []
    for k, rule in SCHEDULE:
        if rule(n):
            phi = cyclotomic(k)
            q, r = _safe_divmod(c, phi)
            if r:
                raise InternalInconsistency(f"Phi_{k} does not divide chi({n})")
            c = q
            out.append(Factor(phi, 1, k))
    return FactorList(tuple(out))


def _safe_divmod(p: IntPoly, d: IntPoly):
    try:
        return p.divmod(d)
    except DomainError:
        return p, IntPoly((1,))


def salem_poly(n: int) -> IntPoly:
    """psi_n = chi(n) / (product of its cyclotomic part)."""
    q, r = _safe_divmod(chi(n), cyclotomic_part(n).product())
    if r:
        raise InternalInconsistency(f"cyclotomic part does not divide chi({n})")
    if not (n - 26 <= q.degree <= n + 3):
        raise InternalInconsistency(f"deg psi_{n} = {q.degree} out of range")
    return q.primitive()


def factor_chi(n: int) -> FactorList:
    """Complete factorization chi(n) = C_n * psi_n as a FactorList."""
    cyc = cyclotomic_part(n)
    return FactorList(cyc.factors + (Factor(salem_poly(n), 1, "salem"),))


def cyclotomic_trial_division(p: IntPoly, kmax: int) -> dict[int, int]:
    """Brute force: multiplicity of every Phi_k (k <= kmax) dividing p."""
    out = {}
    for k in range(1, kmax + 1):
        phi = cyclotomic(k)
        m = 0
        while p.degree >= phi.degree:
            q, r = _safe_divmod(p, phi)
            if r:
                break
            p, m = q, m + 1
        if m:
            out[k] = m
    return out


# ---------------------------------------------------------------------------
# GCD

def poly_gcd(p: IntPoly, q: IntPoly) -> IntPoly:
    """Primitive GCD with positive leading coefficient (primitive PRS)."""
    if p.is_zero() and q.is_zero():
        raise DomainError("gcd(0, 0) is undefined")
    if p.is_zero():
        return q.primitive()
    if q.is_zero():
        return p.primitive()
    f, g = p.primitive(), q.primitive()
    if f.degree < g.degree:
        f, g = g, f
    while True:
        if g.is_zero():
            return f.primitive()
        if g.degree == 0:
            return IntPoly((1,))
        f, g = g, f.pseudo_rem(g).primitive()


def squarefree_part(p: IntPoly) -> IntPoly:
    if p.degree <= 0:
        return p.primitive()
    return p.primitive().exact_div(poly_gcd(p, p.derivative())).primitive()


# ---------------------------------------------------------------------------
# determinants of polynomial matrices

def poly_matrix_det(rows: Sequence[Sequence]) -> IntPoly:
    """Exact determinant of a square matrix with IntPoly/int entries.

    Fraction-free (Bareiss) elimination on the integer matrix obtained by
    substituting x = 2**K, with K chosen from a Hadamard bound so that the
    signed base-2**K digits of the result are its coefficients.
    """
    n = len(rows)
    if n == 0:
        return IntPoly((1,))
    m = [[e if isinstance(e, IntPoly) else IntPoly((e,)) for e in r] for r in rows]
    if any(len(r) != n for r in m):
        raise DomainError("matrix is not square")
    row_deg = [max((e.degree for e in r), default=-1) for r in m]
    col_deg = [max((m[i][j].degree for i in range(n)), default=-1) for j in range(n)]
    if min(row_deg) < 0 or min(col_deg) < 0:
        return IntPoly()
    dbound = min(sum(row_deg), sum(col_deg))
    norms = [[e.norm1() ** 2 for e in r] for r in m]
    h_rows, h_cols = 1, 1
    for i in range(n):
        h_rows *= max(sum(norms[i]), 1)
        h_cols *= max(sum(norms[j][i] for j in range(n)), 1)
    h2 = min(h_rows, h_cols)
    k = (h2.bit_length() + 1) // 2 + 2
    ints = [[_pack(e.coeffs, k) for e in r] for r in m]
    return IntPoly(_unpack(bareiss_det(ints), k, dbound + 1))


def bareiss_det(a: list[list]) -> int:
    """Determinant of an integer matrix by Bareiss elimination (consumes a)."""
    n = len(a)
    a = [[_mpz(v) for v in r] for r in a]
    sign, prev = 1, _mpz(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        rk = a[k]
        akk = rk[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            if aik == 0:
                for j in range(k + 1, n):
                    if ri[j]:
                        ri[j] = _divexact(akk * ri[j], prev)
            else:
                for j in range(k + 1, n):
                    ri[j] = _divexact(akk * ri[j] - aik * rk[j], prev)
        prev = akk
    return int(sign * a[n - 1][n - 1])


# ---------------------------------------------------------------------------
# bivariate polynomials and resultants

VARS = ("a", "b")


@dataclass(frozen=True)
class BiPoly:
    """Sparse integer polynomial in (a, b); terms maps (deg_a, deg_b) to a coefficient."""

    terms: tuple[tuple[tuple[int, int], int], ...] = ()

    def __post_init__(self):
        d = dict(self.terms) if not isinstance(self.terms, dict) else self.terms
        object.__setattr__(self, "terms", tuple(sorted((k, int(v)) for k, v in d.items() if v)))

    @classmethod
    def from_dict(cls, d: dict) -> "BiPoly":
        return cls(tuple(d.items()))

    @classmethod
    def var(cls, name: str) -> "BiPoly":
        return cls((((1, 0) if name == "a" else (0, 1), 1),))

    @classmethod
    def const(cls, c: int) -> "BiPoly":
        return cls((((0, 0), c),))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, var: str) -> int:
        i = VARS.index(var)
        return max((k[i] for k, _ in self.terms), default=-1)

    def total_degree(self) -> int:
        return max((sum(k) for k, _ in self.terms), default=-1)

    def content(self) -> int:
        return reduce(math.gcd, (v for _, v in self.terms), 0)

    def normalized(self) -> "BiPoly":
        """Content 1; the lexicographically largest monomial gets a positive coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.terms[-1][1] < 0:
            c = -c
        return BiPoly(tuple((k, v // c) for k, v in self.terms))

    def coeff_polys(self, var: str) -> list[IntPoly]:
        """Coefficients with respect to var, each an IntPoly in the other variable."""
        i = VARS.index(var)
        d = self.degree(var)
        buckets: list[dict[int, int]] = [dict() for _ in range(d + 1)]
        for k, v in self.terms:
            buckets[k[i]][k[1 - i]] = v
        return [IntPoly.from_terms(t) for t in buckets]

    def __add__(self, other):
        d = self.as_dict()
        for k, v in other.terms:
            d[k] = d.get(k, 0) + v
        return BiPoly.from_dict(d)

    def __neg__(self):
        return BiPoly(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return BiPoly(tuple((k, v * other) for k, v in self.terms))
        d: dict = {}
        for (i, j), v in self.terms:
            for (k, l), w in other.terms:
                key = (i + k, j + l)
                d[key] = d.get(key, 0) + v * w
        return BiPoly.from_dict(d)

    __rmul__ = __mul__

    def __call__(self, a, b):
        return sum((v * a ** i * b ** j for (i, j), v in self.terms), 0 * a)

    def to_json(self) -> dict:
        return {"vars": list(VARS), "terms": [[i, j, str(v)] for (i, j), v in self.terms]}

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for (i, j), v in reversed(self.terms):
            mono = "*".join(s for s in (f"a^{i}" if i > 1 else ("a" if i else ""),
                                        f"b^{j}" if j > 1 else ("b" if j else "")) if s)
            out.append(f"{v}*{mono}" if mono else str(v))
        return " + ".join(out)


def sylvester_matrix(p: Sequence[IntPoly], q: Sequence[IntPoly]) -> list[list[IntPoly]]:
    """Sylvester matrix of two polynomials given by ascending coefficient lists."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    zero = IntPoly()
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(p)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(q)):
            row[i + k] = c
        rows.append(row)
    return rows


def resultant(p: BiPoly, q: BiPoly, eliminate: str = "b") -> IntPoly:
    """Sylvester resultant eliminating one variable; content-normalized."""
    if eliminate not in VARS:
        raise DomainError(f"unknown variable {eliminate!r}")
    if p.is_zero() or q.is_zero():
        raise DegenerateInput("zero polynomial")
    if p.degree(eliminate) < 1 or q.degree(eliminate) < 1:
        raise DegenerateInput(f"polynomial is constant in {eliminate}")
    rows = sylvester_matrix(p.coeff_polys(eliminate), q.coeff_polys(eliminate))
    return poly_matrix_det(rows).primitive()
