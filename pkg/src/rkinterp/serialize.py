"""JSON and CSV persistence for specs, models, symbols and reports.

Floats are written with Python's shortest round-trip repr, so loading gives
back the identical bits.  Complex numbers become ``[re, im]`` pairs and
non-finite floats the strings ``"inf"``, ``"-inf"``, ``"nan"``.  All writes go
through a temporary file and :func:`os.replace`.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .interpolation import InterpNetwork
from .kernels import KernelSpec
from .modelred.aak import RationalApproximant
from .modelred.hankel import PowerSymbol, ProductSymbol

SCHEMA = 1
CSV_HEADER = f"# schema={SCHEMA}"


# --------------------------------------------------------------------------
# scalars and arrays
# --------------------------------------------------------------------------

def encode_float(x) -> object:
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def decode_float(x) -> float:
    return float(x)


def encode_complex(z) -> list:
    z = complex(z)
    return [encode_float(z.real), encode_float(z.imag)]


def decode_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(decode_float(v[0]), decode_float(v[1]))
    return complex(decode_float(v))


def encode_array(a) -> dict:
    """Row-major record ``{shape, dtype, data}``; complex entries as pairs."""
    arr = np.asarray(a)
    if np.iscomplexobj(arr):
        data = [encode_complex(z) for z in arr.ravel()]
        kind = "complex"
    else:
        data = [encode_float(x) for x in arr.astype(float).ravel()]
        kind = "float"
    return {"shape": list(arr.shape), "dtype": kind, "data": data}


def decode_array(rec: dict) -> np.ndarray:
    if rec["dtype"] == "complex":
        flat = np.array([decode_complex(v) for v in rec["data"]], dtype=complex)
    else:
        flat = np.array([decode_float(v) for v in rec["data"]], dtype=float)
    return flat.reshape(rec["shape"])


# --------------------------------------------------------------------------
# records
# --------------------------------------------------------------------------

def spec_to_dict(spec: KernelSpec) -> dict:
    return {"id": spec.id, "coeffs": [encode_float(c) for c in spec.coeffs],
            "radius": encode_float(spec.radius),
            "fill_value": None if spec.fill_value is None else encode_float(spec.fill_value)}


def spec_from_dict(d: dict) -> KernelSpec:
    fill = d.get("fill_value")
    return KernelSpec(d["id"], tuple(decode_float(c) for c in d.get("coeffs", ())),
                      decode_float(d.get("radius", "inf")),
                      None if fill is None else decode_float(fill))


def model_to_dict(net: InterpNetwork) -> dict:
    rec = {"schema": SCHEMA, "spec": spec_to_dict(net.spec), "depth": net.depth,
           "nodes": encode_array(net.nodes), "weights": encode_array(net.weights),
           "inner_layers": [encode_array(a) for a in net.inner_layers],
           "cond_estimate": encode_float(net.cond_estimate)}
    return rec


def model_from_dict(d: dict) -> InterpNetwork:
    return InterpNetwork(spec_from_dict(d["spec"]), decode_array(d["nodes"]),
                         decode_array(d["weights"]), int(d.get("depth", 2)),
                         tuple(decode_array(a) for a in d.get("inner_layers", ())),
                         decode_float(d.get("cond_estimate", 0.0)))


def symbol_to_dict(sym) -> dict:
    if isinstance(sym, ProductSymbol):
        return {"factors": [symbol_to_dict(f) for f in sym.factors]}
    rec = {"coeffs": [encode_complex(c) for c in sym.coeffs]}
    if sym.decay_bound is not None:
        rec["decay_bound"] = encode_float(sym.decay_bound)
        rec["decay_constant"] = encode_float(sym.decay_constant)
    return rec


def symbol_from_dict(d):
    """A bare list is a coefficient list; ``{"factors": [...]}`` a product."""
    if isinstance(d, list):
        return PowerSymbol([decode_complex(c) for c in d])
    if "factors" in d:
        return ProductSymbol(tuple(symbol_from_dict(f) for f in d["factors"]))
    rho = d.get("decay_bound")
    C = d.get("decay_constant")
    return PowerSymbol([decode_complex(c) for c in d["coeffs"]],
                       None if rho is None else decode_float(rho),
                       None if C is None else decode_float(C))


def approximant_to_dict(a: RationalApproximant) -> dict:
    return {"p": [encode_complex(c) for c in a.p], "q": [encode_complex(c) for c in a.q],
            "order": a.order, "achieved_error": encode_float(a.achieved_error),
            "schmidt": encode_float(a.schmidt), "certified": bool(a.certified),
            "offset": encode_complex(a.offset)}


def approximant_from_dict(d: dict) -> RationalApproximant:
    return RationalApproximant([decode_complex(c) for c in d["p"]],
                               [decode_complex(c) for c in d["q"]], int(d["order"]),
                               decode_float(d["achieved_error"]),
                               decode_float(d.get("schmidt", 0.0)),
                               bool(d.get("certified", True)),
                               decode_complex(d.get("offset", 0.0)))


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and dataclass-like values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, (float, np.floating)):
        return encode_float(obj)
    return obj


# --------------------------------------------------------------------------
# files
# --------------------------------------------------------------------------

def atomic_write(path, text: str) -> Path:
    """Write ``text`` to ``path`` via a sibling temporary file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dump_json(obj, path) -> Path:
    return atomic_write(path, json.dumps(to_jsonable(obj), indent=1, allow_nan=False) + "\n")


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def save_model(net: InterpNetwork, path) -> Path:
    return dump_json(model_to_dict(net), path)


def load_model(path) -> InterpNetwork:
    return model_from_dict(load_json(path))


def format_value(x) -> str:
    """17 significant digits; complex values print as ``re+imj`` only when imaginary."""
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        if z.imag == 0:
            return format(z.real, ".17g")
        return f"{z.real:.17g}{z.imag:+.17g}j"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    return atomic_write(path, csv_text(header, rows))


def read_csv(path) -> tuple:
    """Return ``(header, rows)`` with the schema comment skipped; cells stay strings."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader, [])
    return header, [r for r in reader if r]


def parse_number(cell: str):
    v = complex(cell.replace(" ", ""))
    return v.real if v.imag == 0 else v


def read_points(path) -> np.ndarray:
    """Points from a CSV (one point per row) or JSON file, as a ``d x m`` array.

    CSV coordinate columns are those whose header starts with ``x`` (all
    columns when none do).  JSON holds either an array record from
    :func:`encode_array` in ``d x m`` layout or a list of real points.
    """
    path = Path(path)
    if path.suffix == ".json":
        data = load_json(path)
        if isinstance(data, dict):
            arr = decode_array(data)
            return arr.reshape(1, -1) if arr.ndim == 1 else arr
        arr = np.array(data, dtype=float)
        if arr.size == 0:
            return np.zeros((1, 0))
        return arr.reshape(1, -1) if arr.ndim == 1 else arr.T
    header, rows = read_csv(path)
    coord = [j for j, h in enumerate(header) if h.startswith("x")] or list(range(len(header)))
    if not rows:
        return np.zeros((max(len(coord), 1), 0))
    return np.array([[parse_number(r[j]) for j in coord] for r in rows]).T
