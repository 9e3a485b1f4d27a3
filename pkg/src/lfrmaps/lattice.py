"""Integer matrices: the Coxeter element on Pic and the graph transfer rules.

Graph labels are edge names such as "12", "2a3" or "170". Multi-digit vertex
indices are wrapped in parentheses, e.g. "1(10)0".
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .errors import DomainError, InternalInconsistency
from .exactpoly import IntPoly, chi, poly_matrix_det, salem_poly, squarefree_part
from .numroots import DEFAULT_BITS, GUARD_BITS, complex_roots, salem_root


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple

    def __post_init__(self):
        if not self.rows or any(len(r) != len(self.rows) for r in self.rows):
            raise DomainError("IntMatrix must be square with dimension >= 1")

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix":
        return cls(tuple(tuple(int(v) for v in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        cols = list(zip(*other.rows))
        return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows))

    def det(self) -> int:
        return poly_matrix_det([list(r) for r in self.rows])(0)

    def to_json(self) -> dict:
        return {"dim": self.dim, "rows": [list(r) for r in self.rows]}


def lorentz_form(n: int) -> IntMatrix:
    """diag(1, -1, ..., -1) of size n."""
    return IntMatrix.from_rows([[(1 if i == 0 else -1) if i == j else 0 for j in range(n)] for i in range(n)])


def coxeter_matrix(N: int) -> IntMatrix:
    """Coxeter element on {E_0, ..., E_N}; column sigma holds the image of E_sigma."""
    if N < 5:
        raise DomainError("coxeter_matrix needs N >= 5")
    images = {
        0: {0: 2, 2: -1, 3: -1, 4: -1},
        1: {0: 1, 3: -1, 4: -1},
        2: {0: 1, 2: -1, 4: -1},
        3: {0: 1, 2: -1, 3: -1},
    }
    for s in range(4, N):
        images[s] = {s + 1: 1}
    images[N] = {1: 1}
    m = [[0] * (N + 1) for _ in range(N + 1)]
    for col, img in images.items():
        for row, v in img.items():
            m[row][col] = v
    return IntMatrix.from_rows(m)


def char_poly(m: IntMatrix) -> IntPoly:
    """det(xI - M), monic, by fraction-free elimination."""
    x = IntPoly.x()
    rows = [[(x if i == j else IntPoly()) - IntPoly((m[i, j],)) for j in range(m.dim)] for i in range(m.dim)]
    return poly_matrix_det(rows)


def spectral_radius(p: IntPoly, bits: int = DEFAULT_BITS):
    """Largest root modulus of an integer polynomial (via its squarefree part)."""
    q = squarefree_part(p)
    with mpmath.workprec(bits + GUARD_BITS):
        return max(abs(z) for z in complex_roots(q.coeffs, bits))


# ---------------------------------------------------------------------------
# graph rules

def lab(a, k, b) -> str:
    """Edge label from vertex a through k to vertex b."""
    ks = str(k)
    return f"{a}{ks if len(ks) == 1 else '(' + ks + ')'}{b}"


@dataclass(frozen=True)
class GraphSpec:
    family: int
    n: int
    basis: tuple
    rules: dict  # label -> tuple of labels (each with weight 1)

    def __post_init__(self):
        known = set(self.basis)
        if len(known) != len(self.basis):
            raise DomainError("duplicate basis labels")
        for src, dst in self.rules.items():
            if src not in known or any(d not in known for d in dst):
                raise DomainError(f"rule {src} refers to a label outside the basis")
        if set(self.rules) != known:
            raise DomainError("every basis label needs a rule")

    def matrix(self) -> IntMatrix:
        idx = {label: i for i, label in enumerate(self.basis)}
        m = [[0] * len(self.basis) for _ in self.basis]
        for src, dst in self.rules.items():
            for d in dst:
                m[idx[src]][idx[d]] += 1
        return IntMatrix.from_rows(m)


def expected_dim(family: int, n: int) -> int:
    return n + {1: 9, 2: 7, 3: 5}[family]


def _check(family: int, n: int):
    if family == 1:
        if n < 8:
            raise DomainError("family 1 needs n >= 8")
    elif family == 2:
        if n % 2 or n < 8:
            raise DomainError("family 2 needs even n >= 8")
    elif family == 3:
        if n % 3 or n < 9:
            raise DomainError("family 3 needs n divisible by 3 with n >= 9")
    else:
        raise DomainError("family must be 1, 2 or 3")


RULE_VARIANTS = ("reconciled", "printed")


def graph_spec(family: int, n: int, variant: str = "reconciled") -> GraphSpec:
    """Basis and rewrite rules.

    For family 3, variant "printed" sends 0b4 to 3a4 + 073 + ...; the default
    "reconciled" sends it to 3c4 + 073 + ..., the single relabelling that makes
    the transfer matrix reproduce (x^4-1) chi_n / (x^3-1).
    """
    _check(family, n)
    if variant not in RULE_VARIANTS:
        raise DomainError(f"variant must be one of {RULE_VARIANTS}")
    if family == 1:
        basis = ["12", "23", "34", "04", "15", "26", "03", "14", "25", "05", "16", "02", "13", "24", "06"]
        basis += [lab(1, k, 0) for k in range(7, n + 1)]
        rules = {
            "02": ["16"] + [lab(1, k, 0) for k in range(7, n)],
            "03": ["24", "25", "26"], "04": ["34"], "05": ["24", "34"], "06": ["25"],
            "12": [lab(1, n, 0)], "13": ["02"], "14": ["03"], "15": ["04"], "16": ["05"],
            lab(1, 7, 0): ["06"],
            "23": ["12"], "24": ["13"], "25": ["14"], "26": ["15"], "34": ["23"],
        }
        for k in range(8, n + 1):
            rules[lab(1, k, 0)] = [lab(1, k - 1, 0)]
    elif family == 2:
        k = n // 2
        # 1g2 and 3c4 in the ordered basis are the edges written 1c2 and 3b4 in the rules
        basis = ["12", "2a3", "34", "45", "1c2", "2e3", "3b4", "04", "01", "03", "14", "25"]
        tail = []
        for i in range(6, 2 * k + 1):
            tail.append(lab(0, i, 1 if i % 2 == 0 else 2))
        basis += tail
        rules = {
            # the last summand is the even-index edge 0(2k)1 (the only 0..1 edge at that end)
            "01": ["04"] + [lab(0, 2 * j, 1) for j in range(3, k + 1)],
            "03": ["25"] + [lab(0, 2 * j + 1, 2) for j in range(3, k)],
            "04": ["3b4"], lab(0, 6, 1): ["25", "45"], "12": [lab(0, 2 * k, 1)], "1c2": ["01"], "14": ["03"],
            "2a3": ["12"], "2e3": ["1c2"], "25": ["14"], "3b4": ["2e3"], "34": ["2a3"], "45": ["34"],
        }
        for j in range(4, k + 1):
            rules[lab(0, 2 * j, 1)] = [lab(0, 2 * j - 1, 2)]
        for j in range(3, k):
            rules[lab(0, 2 * j + 1, 2)] = [lab(0, 2 * j, 1)]
    else:
        k = n // 3
        # 015 and 04 in the ordered basis are the edges written 051 and 0b4 in the rules
        basis = ["23", "3a4", "051", "13", "01", "12", "2d3", "3c4", "02", "0b4"]
        for j in range(2, k + 1):
            basis.append(lab(1, 3 * j, 2))
            if j < k:
                basis += [lab(0, 3 * j + 1, 3), lab(0, 3 * j + 2, 1)]
        rules = {
            "01": ["0b4"],
            "02": ["13"] + [lab(1, 3 * j, 2) for j in range(2, k)],
            "0b4": ["3a4" if variant == "printed" else "3c4"] + [lab(0, 3 * j + 1, 3) for j in range(2, k)],
            "051": ["0b4", "3c4", "3a4"],
            "12": ["01"], "13": ["02"], "23": [lab(1, 3 * k, 2)], "2d3": ["12"], "3a4": ["23"], "3c4": ["2d3"],
        }
        for j in range(3, k + 1):
            rules[lab(0, 3 * j - 1, 1)] = [lab(0, 3 * j - 2, 3)]
        for j in range(2, k + 1):
            rules[lab(1, 3 * j, 2)] = [lab(0, 3 * j - 1, 1)]
        for j in range(2, k):
            rules[lab(0, 3 * j + 1, 3)] = [lab(1, 3 * j, 2)]
    gs = GraphSpec(family, n, tuple(basis), {s: tuple(d) for s, d in rules.items()})
    if len(gs.basis) != expected_dim(family, n):
        raise InternalInconsistency("basis size mismatch")
    return gs


def graph_matrix(family: int, n: int, variant: str = "reconciled") -> IntMatrix:
    """m[i][j] = 1 when the i-th basis edge maps across the j-th."""
    return graph_spec(family, n, variant).matrix()


def closed_forms(family: int, n: int) -> dict:
    """Closed forms as (numerator, denominator) pairs, by name.

    Compared by cross-multiplication since the quotient need not be a polynomial.
    """
    x = IntPoly.x()
    one = IntPoly((1,))
    c = chi(n)
    if family == 1:
        return {"(x^7+1)chi_n/(x^2-1)": ((x ** 7 + one) * c, x ** 2 - one),
                "(x^7-1)chi_n/(x^2-1)": ((x ** 7 - one) * c, x ** 2 - one)}
    if family == 2:
        return {"(x^5-1)chi_n/(x^2-1)": ((x ** 5 - one) * c, x ** 2 - one)}
    return {"(x^4-1)chi_n/(x^3-1)": ((x ** 4 - one) * c, x ** 3 - one)}


@dataclass
class TransferReport:
    family: int
    n: int
    variant: str
    char_poly: IntPoly
    matches: dict
    divisible_by_psi: bool
    spectral_radius: object
    salem_root: object
    radius_error: object

    @property
    def formula_match(self) -> bool:
        return any(self.matches.values())

    def to_json(self) -> dict:
        return {"family": self.family, "n": self.n, "variant": self.variant, "char_poly": self.char_poly.to_json(),
                "degree": self.char_poly.degree, "matches": self.matches,
                "formula_match": self.formula_match, "divisible_by_psi": self.divisible_by_psi,
                "spectral_radius": mpmath.nstr(self.spectral_radius, 30),
                "salem_root": mpmath.nstr(self.salem_root, 30),
                "radius_error": mpmath.nstr(self.radius_error, 5)}


def verify_thm_c1(family: int, n: int, bits: int = DEFAULT_BITS, variant: str = "reconciled") -> TransferReport:
    cp = char_poly(graph_matrix(family, n, variant))
    matches = {name: (cp * den == num or cp * den == -num)
               for name, (num, den) in closed_forms(family, n).items()}
    rho = spectral_radius(cp, bits)
    lam = salem_root(n, bits).approx.real
    with mpmath.workprec(bits + GUARD_BITS):
        err = abs(rho - lam)
    return TransferReport(family, n, variant, cp, matches, salem_poly(n).divides(cp), rho, lam, err)
