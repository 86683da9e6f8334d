"""JSON and CSV encodings of measures, matrices, factor lists and paths.

Floats are written with 17 significant digits so that every double survives
a write/read cycle bit for bit.  Output is deterministic: keys keep a fixed
order and no timestamps or environment data are emitted.
"""

from __future__ import annotations

import json
import math
from typing import Any, Iterable, Sequence

import numpy as np

from .elementary import ElementaryFactor
from .errors import FormatError
from .matrix import MeasureMatrix
from .measure import Density, HalfLineMeasure
from .poly import Polynomial1

__all__ = ["dumps", "measure_to_obj", "measure_from_obj", "matrix_to_obj",
           "matrix_from_obj", "factors_to_obj", "path_to_obj", "load_json",
           "poly_to_measure", "measure_to_poly", "csv_rows"]


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise FormatError(f"cannot serialize non-finite float {x!r}")
    out = "%.17g" % x
    return out if any(c in out for c in ".en") else out + ".0"


def dumps(obj: Any, indent: int | None = None) -> str:
    """``json.dumps`` with every float written to 17 significant digits."""
    return _emit(obj, indent, 0)


def _emit(obj, indent, level) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = [json.dumps(str(k)) + ": " + _emit(v, indent, level + 1)
                 for k, v in obj.items()]
        return _wrap("{", "}", items, indent, level)
    if isinstance(obj, (list, tuple, np.ndarray)):
        return _wrap("[", "]", [_emit(v, indent, level + 1) for v in obj],
                     indent, level)
    raise FormatError(f"cannot serialize {type(obj).__name__}")


def _wrap(open_, close, items, indent, level) -> str:
    if not items:
        return open_ + close
    if indent is None:
        return open_ + ", ".join(items) + close
    pad = " " * (indent * (level + 1))
    return (open_ + "\n" + ",\n".join(pad + s for s in items) + "\n"
            + " " * (indent * level) + close)


def load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None


# -- measures --------------------------------------------------------------------

def measure_to_obj(mu: HalfLineMeasure) -> dict:
    atoms = [{"loc": float(x), "re": float(w.real), "im": float(w.imag)}
             for x, w in zip(mu.locs, mu.weights)]
    dens = None
    if mu.density is not None:
        dens = {"h": mu.density.h,
                "values": [[float(v.real), float(v.imag)] for v in mu.density.values]}
    return {"atoms": atoms, "density": dens}


def _number(x, what: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(f"{what} must be a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise FormatError(f"{what} must be finite")
    return x


def measure_from_obj(obj: Any) -> HalfLineMeasure:
    """Parse the measure schema; locations must be ascending and nonnegative."""
    if not isinstance(obj, dict) or set(obj) - {"atoms", "density"}:
        raise FormatError("measure must be an object with keys 'atoms', 'density'")
    atoms = obj.get("atoms", [])
    if not isinstance(atoms, list):
        raise FormatError("'atoms' must be a list")
    locs, weights = [], []
    for a in atoms:
        if not isinstance(a, dict) or "loc" not in a:
            raise FormatError(f"atom {a!r} needs 'loc', 're' and optionally 'im'")
        locs.append(_number(a["loc"], "atom location"))
        weights.append(complex(_number(a.get("re", 0.0), "atom weight"),
                               _number(a.get("im", 0.0), "atom weight")))
    if any(b <= a for a, b in zip(locs, locs[1:])):
        raise FormatError("atom locations must be strictly ascending")
    if locs and locs[0] < 0:
        raise FormatError(f"atom location {locs[0]} is negative")
    dens = obj.get("density")
    density = None
    if dens is not None:
        if not isinstance(dens, dict) or "h" not in dens or "values" not in dens:
            raise FormatError("density must have 'h' and 'values'")
        h = _number(dens["h"], "density step")
        vals = dens["values"]
        if not isinstance(vals, list) or any(
                not isinstance(v, list) or len(v) != 2 for v in vals):
            raise FormatError("density values must be [re, im] pairs")
        if vals:
            arr = np.array([[_number(r, "density value"), _number(i, "density value")]
                            for r, i in vals])
            density = Density(h, arr[:, 0] + 1j * arr[:, 1])
    return HalfLineMeasure.from_arrays(np.array(locs), np.array(weights, dtype=complex),
                                       density)


# -- matrices and factors ------------------------------------------------------------

def matrix_to_obj(a: MeasureMatrix) -> dict:
    return {"n": a.n, "entries": [[measure_to_obj(x) for x in row] for row in a.entries]}


def matrix_from_obj(obj: Any) -> MeasureMatrix:
    if not isinstance(obj, dict) or "n" not in obj or "entries" not in obj:
        raise FormatError("matrix must be an object with 'n' and 'entries'")
    n, rows = obj["n"], obj["entries"]
    if not isinstance(n, int) or n < 1:
        raise FormatError(f"'n' must be a positive integer, got {n!r}")
    if not isinstance(rows, list) or len(rows) != n or any(
            not isinstance(r, list) or len(r) != n for r in rows):
        raise FormatError(f"'entries' must be an {n} x {n} array")
    return MeasureMatrix([[measure_from_obj(x) for x in row] for row in rows])


def poly_to_measure(p: Polynomial1) -> HalfLineMeasure:
    """``sum c_k z^k`` as the atomic measure ``sum c_k delta_k``."""
    return HalfLineMeasure.from_arrays(np.arange(p.coeffs.size, dtype=float), p.coeffs)


def measure_to_poly(mu: HalfLineMeasure) -> Polynomial1:
    """Inverse of :func:`poly_to_measure`; atoms must sit on 0, 1, 2, ..."""
    if not mu.is_atomic:
        raise FormatError("a polynomial entry must be purely atomic")
    if mu.locs.size == 0:
        return Polynomial1()
    k = np.rint(mu.locs)
    if np.any(np.abs(mu.locs - k) > 1e-9):
        raise FormatError("polynomial entries need atoms at integer locations")
    coeffs = np.zeros(int(k[-1]) + 1, dtype=complex)
    coeffs[k.astype(int)] = mu.weights
    return Polynomial1(coeffs, trim=0.0)


def _param_to_measure(p) -> HalfLineMeasure:
    if isinstance(p, HalfLineMeasure):
        return p
    if isinstance(p, Polynomial1):
        return poly_to_measure(p)
    return HalfLineMeasure([(0.0, complex(p))])


def factors_to_obj(factors: Iterable[ElementaryFactor]) -> list:
    """Factor list; every parameter is written as a measure (constants as
    multiples of ``delta``, polynomials with ``z^k`` at location ``k``)."""
    return [{"i": f.i, "j": f.j, "param": measure_to_obj(_param_to_measure(f.param))}
            for f in factors]


def path_to_obj(path) -> dict:
    meta = {k: v for k, v in path.certificate().items()}
    meta["det_residuals"] = list(path.meta.get("det_residuals", []))
    return {"meta": meta,
            "samples": [{"t": t, "matrix": matrix_to_obj(a)} for t, a in path.samples]}


def csv_rows(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    """Comma-separated text with a header line and 17-digit floats."""
    lines = [",".join(header)]
    lines += [",".join(_fmt(float(x)) for x in row) for row in rows]
    return "\n".join(lines) + "\n"
