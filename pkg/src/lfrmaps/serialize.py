"""JSON helpers: numbers travel as decimal strings tagged with their precision."""
from __future__ import annotations

import json
import math
from fractions import Fraction

import mpmath


def digits_for(bits: int) -> int:
    return max(int(bits * math.log10(2)), 1)


def num(x, bits: int, digits: int | None = None) -> dict:
    """Serialize a real or complex number with a precision annotation."""
    if isinstance(x, (int, Fraction)):
        return {"exact": str(x)}
    digits = digits or digits_for(bits)
    with mpmath.workprec(bits + 16):
        z = mpmath.mpc(x)
        out = {"re": mpmath.nstr(mpmath.re(z), digits)}
        if mpmath.im(z) != 0:
            out["im"] = mpmath.nstr(mpmath.im(z), digits)
    out["bits"] = bits
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
