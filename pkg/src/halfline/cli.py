"""Command-line interface.

Exit status is 0 on success, 1 when the input is mathematically or
syntactically unusable (a JSON error object is written to standard error),
and 2 when ``verify`` finds a failing check.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import checks, corpus
from . import io
from . import matrix as mr
from . import measure as m
from .elementary import (DET_TOL, complex_roundtrip_error, factor_complex,
                         factor_poly, poly_det, poly_roundtrip_error, verify_product)
from .errors import DomainError, FormatError, MembershipError
from .homotopy import DEFAULT_SAMPLES, null_homotopy
from .laplace import laplace_eval
from .poly import Polynomial1
from .spectra import closed_form_errors, nonexample_measure, spectrum_curve, spectrum_region

__all__ = ["main", "build_parser"]


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return io.load_json(text)


def _measure(path: str) -> m.HalfLineMeasure:
    return io.measure_from_obj(_read_json(path))


def _matrix(path: str) -> mr.MeasureMatrix:
    return io.matrix_from_obj(_read_json(path))


def _emit(args, text: str):
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)


def _json(obj) -> str:
    return io.dumps(obj) + "\n"


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


# -- subcommands ------------------------------------------------------------------

def cmd_convolve(args):
    _emit(args, _json(io.measure_to_obj(m.convolve(_measure(args.a), _measure(args.b)))))


def cmd_deform(args):
    _emit(args, _json(io.measure_to_obj(m.deform(_measure(args.measure), args.t))))


def cmd_norm(args):
    _emit(args, _json({"tv_norm": m.tv_norm(_measure(args.measure))}))


def cmd_laplace(args):
    mu = _measure(args.measure)
    rows = []
    for s in args.s:
        v = laplace_eval(mu, s)
        rows.append((s.real, s.imag, v.real, v.imag))
    _emit(args, io.csv_rows(("s_re", "s_im", "val_re", "val_im"), rows))


def cmd_det(args):
    _emit(args, _json(io.measure_to_obj(mr.det(_matrix(args.matrix)))))


def _constant_matrix(a: mr.MeasureMatrix) -> np.ndarray:
    for row in a.entries:
        for x in row:
            if x.density is not None or np.any(x.locs > m.LOC_MERGE):
                raise MembershipError("factor-complex needs entries c * delta only")
    return np.array([[m.atom_at_zero(x) for x in row] for row in a.entries])


def cmd_factor_complex(args):
    c = _constant_matrix(_matrix(args.matrix))
    factors = factor_complex(c, tol=args.tol)
    prefix = max((abs(np.linalg.det(verify_product(factors[:q], c.shape[0])) - 1)
                  for q in range(1, len(factors) + 1)), default=0.0)
    report = {"max_roundtrip_error": complex_roundtrip_error(factors, c),
              "max_prefix_det_error": float(prefix), "factor_count": len(factors)}
    _emit(args, _json({"factors": io.factors_to_obj(factors), "report": report}))


def cmd_factor_poly(args):
    a = _matrix(args.matrix)
    if a.n != 2:
        raise DomainError("factor-poly handles 2x2 matrices only")
    mat = [[io.measure_to_poly(x) for x in row] for row in a.entries]
    factors = factor_poly(mat, tol=args.tol)
    one = Polynomial1.const(1)
    prefix = max(((poly_det(verify_product(factors[:q], 2, "poly")) - one).max_abs()
                  for q in range(1, len(factors) + 1)), default=0.0)
    report = {"max_roundtrip_error": poly_roundtrip_error(factors, mat),
              "max_prefix_det_error": prefix, "factor_count": len(factors)}
    _emit(args, _json({"factors": io.factors_to_obj(factors), "report": report}))


def cmd_homotopy(args):
    path = null_homotopy(_matrix(args.matrix), k=args.samples, tol=args.tol)
    obj = io.path_to_obj(path) if args.full else path.certificate()
    _emit(args, _json(obj))


def cmd_spectrum(args):
    theta, curve = spectrum_curve(args.samples)
    csv = io.csv_rows(("theta", "re", "im"),
                      zip(theta, curve.real, curve.imag))
    region = spectrum_region(args.samples, args.resolution)
    mu = nonexample_measure(args.h, args.horizon)
    report = {"bounded_components": region.bounded_components,
              "closed_form_max_error": max(closed_form_errors(mu)),
              "samples": args.samples, "resolution": args.resolution}
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "spectrum_curve.csv").write_text(csv)
        (out / "spectrum_report.json").write_text(_json(report))
    else:
        _emit(args, csv)
        if args.report:
            Path(args.report).write_text(_json(report))


def cmd_verify(args):
    results = checks.run_checks(args.seed, only=args.only)
    for r in results:
        print(r.line())
    if args.json:
        Path(args.json).write_text(_json([r.as_dict() for r in results]))
    return 0 if all(r.passed for r in results) else 2


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="halfline",
        description="Measures on the half-line, their matrices and spectra.")
    p.add_argument("-o", "--output", help="write the result here instead of stdout")
    p.add_argument("--h", type=_positive(float), default=m.DEFAULT_H,
                   help="grid step for generated densities (default 2^-10)")
    p.add_argument("--horizon", type=_positive(float), default=m.DEFAULT_HORIZON,
                   help="horizon for generated densities (default 32)")
    p.add_argument("--tol", type=_positive(float), default=DET_TOL,
                   help="determinant tolerance for factorization and homotopy input")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("convolve", help="convolution of two measures")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_convolve)

    s = sub.add_parser("deform", help="reweight a measure by (1-t)^x")
    s.add_argument("measure")
    s.add_argument("--t", type=float, required=True)
    s.set_defaults(func=cmd_deform)

    s = sub.add_parser("norm", help="total variation norm")
    s.add_argument("measure")
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("laplace", help="Laplace transform at given points (CSV)")
    s.add_argument("measure")
    s.add_argument("--s", type=_complex_arg, nargs="+", required=True,
                   help="points with Re(s) >= 0, e.g. 0 1.5 2+1j")
    s.set_defaults(func=cmd_laplace)

    s = sub.add_parser("det", help="determinant of a measure matrix")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_det)

    s = sub.add_parser("factor-complex", help="shear factorization over C")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_factor_complex)

    s = sub.add_parser("factor-poly", help="shear factorization over C[z] "
                       "(atom at k encodes z^k)")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_factor_poly)

    s = sub.add_parser("homotopy", help="null-homotopy certificate or full path")
    s.add_argument("matrix")
    s.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    s.add_argument("--full", action="store_true", help="emit every path sample")
    s.set_defaults(func=cmd_homotopy)

    s = sub.add_parser("spectrum", help="boundary curve CSV and region report")
    s.add_argument("--samples", type=int, default=720)
    s.add_argument("--resolution", type=int, default=512)
    s.add_argument("--out-dir", help="write spectrum_curve.csv and "
                   "spectrum_report.json here")
    s.add_argument("--report", help="with CSV on stdout, write the report JSON here")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("verify", help="run the acceptance checks")
    s.add_argument("--seed", type=int, default=None,
                   help="base seed (default: HLA_SEED or 0)")
    s.add_argument("--only", type=lambda t: {int(x) for x in t.split(",")},
                   help="comma-separated check numbers")
    s.add_argument("--json", help="also write the results as JSON here")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        status = args.func(args)
    except DomainError as exc:
        sys.stderr.write(_json({"error": exc.kind, "message": str(exc)}))
        return 1
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
