"""Command-line entry point: ``rkinterp {fit,eval,reduce,bench,nodes}``.

Every command writes its outputs into ``--out`` (default: ``$RKINTERP_OUT``
or the current directory) together with a ``<command>.manifest.json`` that
echoes the config, seed and package version and records SHA-256 digests of
the outputs.

Exit codes
----------
0  success
1  missing file, unknown id, bad arguments or any other failure
2  singular Gram matrix or duplicate nodes
3  domain violation
4  singular-value cluster in a model reduction
"""
from __future__ import annotations

import argparse
import hashlib
import logging
import os
import sys
import time
import warnings
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, serialize
from .bench import run_experiment
from .errors import (
    DomainViolation,
    DuplicatePoints,
    IllConditioned,
    SingularGram,
    SingularValueCluster,
    UnsupportedId,
)
from .interpolation import chebyshev_nodes, evaluate, fit, fit_deep
from .kernels import make_spec
from .modelred import ProductSymbol, marginal_aak
from .oracles import ExperimentConfig, chirp, elliptic_e, homotopy_phi, surface_xy2

log = logging.getLogger("rkinterp")

EXIT_OK, EXIT_USAGE, EXIT_SINGULAR, EXIT_DOMAIN, EXIT_CLUSTER = 0, 1, 2, 3, 4

TARGETS = {
    "zero": lambda X: np.zeros(X.shape[1]),
    "elliptic_e": lambda X: elliptic_e(np.abs(X[0].real)),
    "chirp": lambda X: chirp(X[0].real),
    "homotopy_phi": lambda X: homotopy_phi(X[0].real),
    "xy2": lambda X: surface_xy2(X.real, noise_std=0.0).values,
}


class CLIError(Exception):
    """Usage or input problem reported with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _out_dir(args) -> Path:
    out = args.out or os.environ.get("RKINTERP_OUT") or "."
    return Path(out)


def _require(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {p}")
    return p


def _load_config(args) -> dict:
    if not args.config:
        return {}
    cfg = serialize.load_json(_require(args.config))
    if not isinstance(cfg, dict):
        raise CLIError(f"config {args.config} must hold a JSON object")
    return cfg


def _seed(args, cfg) -> int:
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise CLIError("seed must be an unsigned 64-bit integer")
    return seed


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest(out: Path, command: str, cfg: dict, seed, t0: float, outputs, extra=None) -> Path:
    rec = {
        "command": command,
        "config": cfg,
        "seed": seed,
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "duration_seconds": time.perf_counter() - t0,
        "outputs": {p.name: _digest(p) for p in outputs},
    }
    if extra:
        rec.update(extra)
    return serialize.dump_json(rec, out / f"{command}.manifest.json")


# --------------------------------------------------------------------------
# fit
# --------------------------------------------------------------------------

def _spec_from(cfg):
    k = cfg.get("kernel", "omega")
    if isinstance(k, dict):
        return serialize.spec_from_dict(k)
    return make_spec(k)


def _nodes_from(cfg, base: Path) -> np.ndarray:
    src = cfg.get("nodes")
    if src is None:
        raise CLIError("config needs a 'nodes' entry")
    if isinstance(src, dict) and "chebyshev" in src:
        c = src["chebyshev"]
        return chebyshev_nodes(int(c["n"]), float(c.get("a", -1.0)), float(c.get("b", 1.0))).reshape(1, -1)
    if isinstance(src, dict) and "file" in src:
        return serialize.read_points(_require(base / src["file"]))
    if isinstance(src, dict):
        arr = serialize.decode_array(src)
        return arr.reshape(1, -1) if arr.ndim == 1 else arr
    arr = np.array(src, dtype=float)
    return arr.reshape(1, -1) if arr.ndim == 1 else arr.T


def _values_from(cfg, X: np.ndarray, base: Path) -> np.ndarray:
    src = cfg.get("values", "zero")
    if isinstance(src, str):
        try:
            return np.asarray(TARGETS[src](X))
        except KeyError:
            raise UnsupportedId(f"unknown target {src!r}; choose from {sorted(TARGETS)}") from None
    if isinstance(src, dict) and "file" in src:
        header, rows = serialize.read_csv(_require(base / src["file"]))
        col = header.index(src.get("column", "value")) if header else 0
        return np.array([serialize.parse_number(r[col]) for r in rows])
    return np.array([serialize.decode_complex(v) for v in src])


def cmd_fit(args) -> int:
    t0 = time.perf_counter()
    cfg = _load_config(args)
    seed = _seed(args, cfg)
    base = Path(args.config).parent if args.config else Path(".")
    out = _out_dir(args)
    spec = _spec_from(cfg)
    X = _nodes_from(cfg, base)
    lam = _values_from(cfg, X, base)
    depth = int(cfg.get("depth", 2))
    jitter = bool(cfg.get("jitter", True))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditioned)
        if depth == 2:
            net, report = fit(spec, X, lam, jitter=jitter)
        else:
            net = fit_deep(spec, X, lam, depth=depth, jitter=jitter)
            report = net.meta["solve"]
    model_path = serialize.save_model(net, out / cfg.get("model", "model.json"))
    report_path = serialize.dump_json({
        "cond_estimate": report.cond_estimate, "residual_norm": report.residual_norm,
        "jitter": report.jitter, "path": report.path, "success": report.success,
    }, out / "gram_report.json")
    _manifest(out, "fit", cfg, seed, t0, [model_path, report_path])
    print(f"wrote {model_path} (residual {report.residual_norm:.3g}, path {report.path})")
    return EXIT_OK


# --------------------------------------------------------------------------
# eval
# --------------------------------------------------------------------------

def cmd_eval(args) -> int:
    t0 = time.perf_counter()
    net = serialize.load_model(_require(args.model))
    Z = serialize.read_points(_require(args.input))
    out = _out_dir(args)
    d = net.dim
    header = [f"x{j}" for j in range(d)] + ["prediction"]
    if Z.shape[1] == 0:
        rows = []
    else:
        if Z.shape[0] != d:
            raise CLIError(f"model expects {d}-dimensional inputs, file has {Z.shape[0]}")
        pred = np.atleast_1d(evaluate(net, Z))
        rows = [list(Z[:, j]) + [pred[j]] for j in range(Z.shape[1])]
    path = serialize.write_csv(out / args.name, header, rows)
    cfg = {"model": str(args.model), "input": str(args.input)}
    _manifest(out, "eval", cfg, None, t0, [path])
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


# --------------------------------------------------------------------------
# reduce
# --------------------------------------------------------------------------

def _read_factors(paths) -> list:
    factors = []
    for p in paths:
        sym = serialize.symbol_from_dict(serialize.load_json(_require(p)))
        factors.extend(sym.factors if isinstance(sym, ProductSymbol) else [sym])
    return factors


def cmd_reduce(args) -> int:
    t0 = time.perf_counter()
    factors = _read_factors(args.symbols)
    orders = list(args.orders)
    if len(orders) == 1 and len(factors) > 1:
        orders = orders * len(factors)
    if len(orders) != len(factors):
        raise CLIError(f"{len(orders)} orders for {len(factors)} symbol factors")
    out = _out_dir(args)
    red = marginal_aak(factors, orders)
    outputs = []
    for j, a in enumerate(red.approximants):
        outputs.append(serialize.dump_json(serialize.approximant_to_dict(a), out / f"approximant_{j}.json"))
    report = {
        "orders": orders,
        "achieved_errors": [a.achieved_error for a in red.approximants],
        "schmidt": list(red.schmidt),
        "certified": [a.certified for a in red.approximants],
        "product_bound": red.product_bound,
        "sqrt_d_product_bound": red.bound,
    }
    outputs.append(serialize.dump_json(report, out / "bounds.json"))
    cfg = {"symbols": [str(p) for p in args.symbols], "orders": orders}
    _manifest(out, "reduce", cfg, None, t0, outputs)
    for j, a in enumerate(red.approximants):
        print(f"factor {j}: order {a.order}, error {a.achieved_error:.6g}, s = {a.schmidt:.6g}")
    print(f"prod s = {red.product_bound:.6g}, sqrt(d) prod s = {red.bound:.6g}")
    return EXIT_OK


# --------------------------------------------------------------------------
# bench
# --------------------------------------------------------------------------

def cmd_bench(args) -> int:
    t0 = time.perf_counter()
    cfg = _load_config(args)
    seed = _seed(args, cfg)
    exp_id = args.experiment or cfg.get("experiment")
    if not exp_id:
        raise CLIError("bench needs an experiment id")
    ecfg = ExperimentConfig(exp_id, seed, dict(cfg.get("sizes", {})),
                            float(cfg.get("noise", 0.0)), cfg.get("output"))
    report = run_experiment(ecfg, jobs=args.jobs)
    # wall-clock columns vary between runs; they go to the manifest, not the CSV
    cols = [c for c in report.columns if not c.endswith("_seconds")]
    timings = [{c: r[c] for c in r if c.endswith("_seconds")} for r in report.rows]
    rows = [[exp_id] + [r.get(c, "") for c in cols] for r in report.rows]
    out = _out_dir(args)
    path = serialize.write_csv(out / (cfg.get("output") or f"{exp_id}.csv"), ["experiment"] + cols, rows)
    echo = {"experiment": exp_id, "seed": seed, "sizes": ecfg.sizes, "noise": ecfg.noise}
    extra = {"timings": timings} if any(timings) else None
    _manifest(out, "bench", echo, seed, t0, [path], extra)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


# --------------------------------------------------------------------------
# nodes
# --------------------------------------------------------------------------

def cmd_nodes(args) -> int:
    t0 = time.perf_counter()
    x = chebyshev_nodes(args.n, args.a, args.b)
    out = _out_dir(args)
    path = serialize.write_csv(out / args.name, ["x0"], [[v] for v in x])
    _manifest(out, "nodes", {"n": args.n, "a": args.a, "b": args.b}, None, t0, [path])
    print(f"wrote {path}")
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides the config)")
    common.add_argument("--out", help="output directory (default $RKINTERP_OUT or .)")
    common.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="rkinterp", description="Kernel interpolation networks and model reduction.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("fit", parents=[common], help="train a network from a config")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("eval", parents=[common], help="evaluate a saved model")
    s.add_argument("model")
    s.add_argument("input", help="CSV (x0, x1, ... columns) or JSON points")
    s.add_argument("--name", default="predictions.csv")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("reduce", parents=[common], help="AAK-reduce symbol files")
    s.add_argument("symbols", nargs="+")
    s.add_argument("--orders", type=int, nargs="+", required=True)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("bench", parents=[common], help="run a seeded experiment")
    s.add_argument("experiment", nargs="?")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("nodes", parents=[common], help="write Chebyshev nodes")
    s.add_argument("n", type=int)
    s.add_argument("--a", type=float, default=-1.0)
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--name", default="nodes.csv")
    s.set_defaults(func=cmd_nodes)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SingularGram, DuplicatePoints) as exc:
        idx = getattr(exc, "indices", None)
        print(f"error: {type(exc).__name__}: {exc}" + (f" (indices {idx})" if idx else ""), file=sys.stderr)
        return EXIT_SINGULAR
    except DomainViolation as exc:
        idx = f" (index {exc.index})" if exc.index is not None else ""
        print(f"error: DomainViolation: {exc}{idx}", file=sys.stderr)
        return EXIT_DOMAIN
    except SingularValueCluster as exc:
        print(f"error: SingularValueCluster: {exc} (indices {exc.indices})", file=sys.stderr)
        return EXIT_CLUSTER
    except (FileNotFoundError, UnsupportedId, CLIError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # anything else is a usage-class failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
