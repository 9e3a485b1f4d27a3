"""Command-line entry point; every command prints JSON (or CSV for orbits)."""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from . import enumerate as enum_mod
from .dynamics import MapData, emit_orbit_csv, lyness_check, orbit, vn_membership, zeta_certificate
from .errors import DomainError, ExhaustionError, InternalInconsistency, IOFailure
from .exactpoly import chi, factor_chi, salem_poly
from .family import (invariant_cubic, phi, resonance_check, rotation_classify,
                     verify_functional_equation)
from .lattice import char_poly, coxeter_matrix, graph_matrix, graph_spec, lorentz_form, verify_thm_c1
from .numroots import psi_roots, salem_configuration, salem_root
from .serialize import dumps, num

EXIT_OK, EXIT_DOMAIN, EXIT_EXHAUSTED, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _parse_number(s: str):
    """Exact for integers and p/q, otherwise an mpc at the current precision."""
    s = s.replace(" ", "")
    try:
        f = Fraction(s)
        return f.numerator if f.denominator == 1 else f
    except ValueError:
        return mpmath.mpmathify(s)


def _complex(s: str) -> str:
    """Validate now; the value is parsed again under the working precision."""
    try:
        _parse_number(s)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from exc
    return s


def _bits(s: str) -> int:
    v = int(s)
    if v < 64:
        raise argparse.ArgumentTypeError("bits must be at least 64")
    return v


def _root(n: int, idx: int, bits: int):
    roots = psi_roots(n, bits)
    if not 0 <= idx < len(roots):
        raise DomainError(f"t-index must lie in [0, {len(roots) - 1}] for n = {n}")
    return roots[idx]


def _applicable(j: int, n: int):
    if n < 7:
        raise DomainError("n must be at least 7")
    if n % j:
        raise DomainError(f"{j} does not divide {n}")


# ---------------------------------------------------------------------------
# commands

def cmd_chi(args):
    p = chi(args.n)
    out = {"n": args.n, "chi": p.to_json(), "degree": p.degree}
    if args.factor:
        fl = factor_chi(args.n)
        out["factors"] = [{"tag": f.tag, "degree": f.poly.degree, "multiplicity": f.multiplicity,
                           "poly": str(f.poly)} for f in fl]
        out["cyclotomic_indices"] = fl.indices()
        out["psi_degree"] = salem_poly(args.n).degree
    return out


def cmd_salem(args):
    lam = salem_root(args.n, args.bits)
    return {"n": args.n, "psi": salem_poly(args.n).to_json(), "psi_degree": salem_poly(args.n).degree,
            "lambda": lam.to_json(), "configuration": salem_configuration(args.n, args.bits)}


def cmd_params(args):
    _applicable(args.j, args.n)
    rows = []
    for i, t in enumerate(psi_roots(args.n, args.bits)):
        pp = phi(args.j, t, bits=args.bits)
        cert = zeta_certificate(args.j, args.n, t)
        rows.append({"t_index": i, "t": t.to_json(), "a": num(pp.a, args.bits), "b": num(pp.b, args.bits),
                     "certificate": cert.to_json()})
    return {"j": args.j, "n": args.n, "bits": args.bits, "points": rows}


def cmd_cubic(args):
    if args.symbolic:
        return verify_functional_equation(args.j).to_json()
    if args.n is None:
        raise UsageError("cubic needs --n unless --symbolic is given")
    t = _root(args.n, args.t_index, args.bits)
    cub = invariant_cubic(args.j, t, bits=args.bits)
    fe = verify_functional_equation(args.j, t, mode="numeric", bits=args.bits)
    return {"j": args.j, "n": args.n, "t_index": args.t_index, "t": t.to_json(),
            "cubic": cub.to_json(args.bits), "functional_equation": fe.to_json()}


def cmd_orbit(args):
    with mpmath.workprec(args.bits):
        m = MapData(_parse_number(args.a), _parse_number(args.b))
        tr = orbit(m, m.q, args.kmax, args.bits)
    if args.csv:
        rows = emit_orbit_csv(tr, sys.stdout if args.csv == "-" else args.csv)
        return None if args.csv == "-" else {"csv": args.csv, "rows": rows, "reason": tr.reason}
    return tr.to_json()


def cmd_vn(args):
    if args.enumerate:
        cs = enum_mod.enumerate_vn(args.n, args.bits, best_effort=args.best_effort,
                                   cache_dir=args.cache_dir)
        out = cs.to_json()
        out["summary"] = enum_mod.classify_vn(cs)
        return out
    if args.n < 7:
        raise DomainError("curve-side listing needs n >= 7; use --enumerate for small n")
    rows = []
    for j in (1, 2, 3):
        if args.n % j:
            continue
        for i, t in enumerate(psi_roots(args.n, args.bits)):
            pp = phi(j, t, bits=args.bits)
            rows.append({"j": j, "t_index": i, "a": num(pp.a, args.bits), "b": num(pp.b, args.bits),
                         "orbit_n": vn_membership(pp, nmax=args.n, bits=args.bits),
                         "certified": zeta_certificate(j, args.n, t).positive})
    return {"n": args.n, "bits": args.bits, "on_curves": rows}


def cmd_rotation(args):
    _applicable(args.j, args.n)
    reps = [rotation_classify(args.j, args.n, t, bits=args.bits) for t in psi_roots(args.n, args.bits)]
    return {"j": args.j, "n": args.n, "roots": [dict(r.to_json(), t_index=i) for i, r in enumerate(reps)]}


def cmd_resonance(args):
    _applicable(args.j, args.n)
    reps = [resonance_check(args.j, args.n, t, args.bits) for t in psi_roots(args.n, args.bits)]
    return {"j": args.j, "n": args.n, "roots": [dict(r.to_json(args.bits), t_index=i) for i, r in enumerate(reps)]}


def cmd_coxeter(args):
    m = coxeter_matrix(args.N)
    cp = char_poly(m)
    J = lorentz_form(m.dim)
    return {"N": args.N, "matrix": m.to_json(), "char_poly": cp.to_json(),
            "equals_chi": args.N >= 3 and cp == chi(args.N - 3),
            "isometry": m.transpose() @ J @ m == J, "det": m.det()}


def cmd_graph(args):
    if args.verify:
        return verify_thm_c1(args.family, args.n, args.bits, args.variant).to_json()
    gs = graph_spec(args.family, args.n, args.variant)
    return {"family": args.family, "n": args.n, "variant": args.variant, "basis": list(gs.basis),
            "rules": {k: list(v) for k, v in gs.rules.items()},
            "matrix": graph_matrix(args.family, args.n, args.variant).to_json()}


def cmd_lyness(args):
    a, x, y = (_parse_number(v) for v in (args.a, args.x, args.y))
    drift = lyness_check(a, (x, y), args.k, args.bits)
    return {"a": num(a, args.bits), "x": num(x, args.bits), "y": num(y, args.bits),
            "k": args.k, "bits": args.bits, "max_relative_drift": mpmath.nstr(drift, 10)}


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--bits", type=_bits, default=256, help="working precision in bits (default 256)")
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")
    common.add_argument("--cache-dir", help=f"catalog cache directory (default ${enum_mod.CACHE_ENV})")

    p = _Parser(prog="lfrmaps", description="Tools for the maps (x, y) -> (y, (y+a)/(x+b)).")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    s = add("chi", cmd_chi, "the polynomial chi_n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--factor", action="store_true")

    s = add("salem", cmd_salem, "psi_n and its Salem root")
    s.add_argument("--n", type=int, required=True)

    s = add("params", cmd_params, "phi_j at every root of psi_n")
    s.add_argument("--j", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--n", type=int, required=True)

    s = add("cubic", cmd_cubic, "invariant cubic at a root of psi_n, or the symbolic identity")
    s.add_argument("--j", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--t-index", type=int, default=0)
    s.add_argument("--symbolic", action="store_true")

    s = add("orbit", cmd_orbit, "orbit of q = (-a, 0)")
    s.add_argument("--a", type=_complex, required=True)
    s.add_argument("--b", type=_complex, required=True)
    s.add_argument("--kmax", type=int, required=True)
    s.add_argument("--csv", metavar="PATH", help="write CSV to PATH ('-' for stdout)")

    s = add("vn", cmd_vn, "elements of V_n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--enumerate", action="store_true", help="run the elimination pipeline")
    s.add_argument("--best-effort", action="store_true", help="allow n up to 11 with a larger budget")

    s = add("rotation", cmd_rotation, "rotation-domain eligibility at every root of psi_n")
    s.add_argument("--j", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--n", type=int, required=True)

    s = add("resonance", cmd_resonance, "resonance residuals at every root of psi_n")
    s.add_argument("--j", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--n", type=int, required=True)

    s = add("coxeter", cmd_coxeter, "Coxeter element on Pic")
    s.add_argument("--N", type=int, required=True)

    s = add("graph", cmd_graph, "graph transfer matrices")
    s.add_argument("--family", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--verify", action="store_true")
    s.add_argument("--variant", choices=("reconciled", "printed"), default="reconciled")

    s = add("lyness", cmd_lyness, "drift of the Lyness invariant (b = 0)")
    s.add_argument("--a", type=_complex, required=True)
    s.add_argument("--x", type=_complex, required=True)
    s.add_argument("--y", type=_complex, required=True)
    s.add_argument("--k", type=int, default=100)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with mpmath.workprec(args.bits):
            result = args.func(args)
        if result is not None:
            text = dumps(result) + "\n"
            if args.output:
                enum_mod.write_atomic(Path(args.output), text)
            else:
                sys.stdout.write(text)
        return EXIT_OK
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    except (DomainError, IOFailure) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except ExhaustionError as exc:
        sys.stderr.write(f"exhausted: {exc}\n")
        return EXIT_EXHAUSTED
    except InternalInconsistency as exc:
        sys.stderr.write(f"internal error: {exc}\n")
        return 70


if __name__ == "__main__":
    sys.exit(main())
