"""Prolongations: sampling a reduced model to train a kernel network on it."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..errors import DimensionMismatch
from ..interpolation import InterpNetwork, fit
from ..kernels import KernelSpec


def tensor_grid(grid: Sequence) -> np.ndarray:
    """``d x prod(n_k)`` matrix of all points of a tensor grid (first axis slowest)."""
    axes = [np.asarray(g, dtype=complex).ravel() for g in grid]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh])


def build_prolongation(factors: Sequence, grid: Sequence) -> tuple:
    """Sample ``prod_k R_k(w_k)`` on a tensor grid.

    Parameters
    ----------
    factors : sequence
        One reduced factor per dimension; anything with a ``disk_eval``
        method (approximants, symbols, residuals).
    grid : sequence of array_like
        Node list for each dimension.

    Returns
    -------
    points : ndarray, shape (d, n)
    values : ndarray, shape (n,)
    """
    if len(factors) != len(grid):
        raise DimensionMismatch(f"{len(factors)} factors for a {len(grid)}-dimensional grid")
    axes = [np.asarray(g, dtype=complex).ravel() for g in grid]
    per_axis = [np.asarray(f.disk_eval(a), dtype=complex) for f, a in zip(factors, axes)]
    vals = per_axis[0]
    for v in per_axis[1:]:
        vals = np.multiply.outer(vals, v)
    return tensor_grid(axes), np.asarray(vals, dtype=complex).ravel()


def fit_pnn(samples: tuple, spec: KernelSpec, info: Optional[dict] = None,
            **fit_kwargs) -> InterpNetwork:
    """Kernel network interpolating prolongation samples ``(points, values)``."""
    points, values = samples
    net, report = fit(spec, points, values, **fit_kwargs)
    meta = {"pnn": True, "solve": report}
    if info:
        meta.update(info)
    net.meta.update(meta)
    return net
