"""Minimal sparse multivariate polynomials over any coefficient ring."""
from __future__ import annotations


class MPoly:
    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict, nvars: int):
        self.terms = {k: v for k, v in terms.items() if v != 0}
        self.nvars = nvars

    @classmethod
    def var(cls, i: int, nvars: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars)

    @classmethod
    def const(cls, c, nvars: int) -> "MPoly":
        return cls({(0,) * nvars: c}, nvars)

    def _lift(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            return other
        return MPoly.const(other, self.nvars)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return MPoly(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return MPoly({k: -v for k, v in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            return MPoly({k: v * other for k, v in self.terms.items()}, self.nvars)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(x + y for x, y in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return MPoly(out, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = MPoly.const(1, self.nvars)
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def split(self, idx: tuple[int, ...]) -> dict:
        """Group terms by the exponents of the variables in idx."""
        out: dict = {}
        for k, v in self.terms.items():
            key = tuple(k[i] for i in idx)
            rest = tuple(0 if i in idx else e for i, e in enumerate(k))
            out.setdefault(key, {})[rest] = v
        return {key: MPoly(t, self.nvars) for key, t in out.items()}

    def __repr__(self):
        return f"MPoly({self.terms!r})"
