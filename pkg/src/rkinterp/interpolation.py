"""Training networks by kernel interpolation.

A trained two-layer network is

    F(z) = sum_j alpha_j K(z, x_j),   alpha = P^{-1} lambda,

with ``P[i, j] = K(x_i, x_j)`` the Gram matrix.  For a positive kernel this is
the minimum-norm interpolant; for a Krein kernel it is the unique
interpolant in the span of the kernel sections at the nodes.

Deeper networks first push inputs through ``depth - 2`` rescaled
omega-kernel feature maps (see :func:`deep_feature_map`).
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import (
    CollapsedNodes,
    DimensionMismatch,
    DomainViolation,
    KreinSpec,
    SingularGram,
    IllConditioned,
    UnsupportedId,
)
from .kernels import KernelSpec, as_points, check_distinct, kernel_matrix

log = logging.getLogger(__name__)

RESIDUAL_RTOL = 1e-8
COND_WARN = 1e12


@dataclass(frozen=True)
class GramSolveReport:
    cond_estimate: float
    residual_norm: float
    jitter: float
    path: str
    success: bool = True


@dataclass(frozen=True, eq=False)
class InterpNetwork:
    """A trained interpolation network.

    ``nodes`` are the training inputs (columns); ``weights`` has one row per
    node and, for vector targets, one column per output.  For ``depth > 2``
    ``inner_layers`` holds the anchor matrix of each feature-map stage.
    """

    spec: KernelSpec
    nodes: np.ndarray
    weights: np.ndarray
    depth: int = 2
    inner_layers: tuple = ()
    cond_estimate: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.nodes.shape[0]

    @cached_property
    def centers(self) -> np.ndarray:
        """Kernel centres of the output layer (training nodes after the inner layers)."""
        Z = self.nodes
        for anchors in self.inner_layers:
            Z = deep_feature_map(anchors, Z)
        return Z

    def __call__(self, z):
        return evaluate(self, z)


# --------------------------------------------------------------------------
# Gram matrices and the linear solve
# --------------------------------------------------------------------------

def gram(spec: KernelSpec, nodes) -> np.ndarray:
    """Hermitian Gram matrix ``P[i, j] = K(x_i, x_j)`` of distinct nodes."""
    X = as_points(nodes)
    check_distinct(X, "nodes")
    P = kernel_matrix(spec, X, X)
    return 0.5 * (P + P.conj().T)


def _residual(P, alpha, lam):
    return float(np.linalg.norm(P @ alpha - lam))


def _refine(P, solve, alpha, lam, steps=3):
    # keep the best iterate: refinement can diverge once cond * eps > 1
    best, best_res = alpha, _residual(P, alpha, lam)
    for _ in range(steps):
        alpha = alpha + solve(lam - P @ alpha)
        res = _residual(P, alpha, lam)
        if not res < best_res:
            break
        best, best_res = alpha, res
    return best


def solve_gram(P: np.ndarray, lam: np.ndarray, positive: bool = True, jitter: bool = True,
               rtol: float = RESIDUAL_RTOL) -> tuple:
    """Solve ``P alpha = lam`` and describe how it went.

    Positive kernels try a Cholesky factorization first.  When that fails
    (or leaves a large residual) a diagonal jitter of ``1e-12 * trace / n``
    is escalated tenfold up to ``1e-6 * trace / n``; each jittered
    factorization is followed by iterative refinement against the original
    ``P``.  Krein (indefinite) Grams, and anything still unresolved, go
    through a partially pivoted LU.
    """
    n = P.shape[0]
    lam_norm = float(np.linalg.norm(lam))
    target = rtol * lam_norm
    if n == 0:
        return np.zeros_like(lam), GramSolveReport(0.0, 0.0, 0.0, "empty")
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(P))
    if not np.isfinite(cond):
        cond = math.inf
    attempts = []

    def done(alpha, jit, path):
        res = _residual(P, alpha, lam)
        attempts.append((res, alpha, jit, path))
        return res <= target

    if lam_norm == 0:
        return np.zeros_like(lam), GramSolveReport(cond, 0.0, 0.0, "zero-rhs")

    if positive:
        try:
            c = sla.cho_factor(P, lower=True, check_finite=False)
            alpha = sla.cho_solve(c, lam, check_finite=False)
            if done(alpha, 0.0, "cholesky"):
                return _finish(attempts, cond)
        except (np.linalg.LinAlgError, sla.LinAlgError):
            pass

    try:
        with warnings.catch_warnings():
            # an exactly singular factor is caught below and handed to the jitter stage
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu = sla.lu_factor(P, check_finite=False)
        if np.any(np.diag(lu[0]) == 0):
            raise np.linalg.LinAlgError("exactly singular")
        solve = lambda r: sla.lu_solve(lu, r, check_finite=False)
        alpha = _refine(P, solve, solve(lam), lam)
        if np.all(np.isfinite(alpha)) and done(alpha, 0.0, "pivoted"):
            return _finish(attempts, cond)
    except (np.linalg.LinAlgError, sla.LinAlgError, ValueError):
        pass

    if jitter:
        scale = abs(float(np.trace(P).real)) / n or 1.0
        eps = 1e-12 * scale
        while eps <= 1e-6 * scale * (1 + 1e-9):
            Pj = P + eps * np.eye(n)
            try:
                if positive:
                    c = sla.cho_factor(Pj, lower=True, check_finite=False)
                    solve = lambda r, c=c: sla.cho_solve(c, r, check_finite=False)
                    path = "cholesky+jitter"
                else:
                    lu = sla.lu_factor(Pj, check_finite=False)
                    solve = lambda r, lu=lu: sla.lu_solve(lu, r, check_finite=False)
                    path = "pivoted+jitter"
                alpha = _refine(P, solve, solve(lam), lam)
                if np.all(np.isfinite(alpha)) and done(alpha, eps, path):
                    return _finish(attempts, cond)
            except (np.linalg.LinAlgError, sla.LinAlgError, ValueError):
                pass
            eps *= 10

    if not attempts:
        raise SingularGram("Gram matrix is numerically singular")
    if not jitter:
        best = min(attempts, key=lambda a: a[0])
        if not np.isfinite(best[0]) or best[0] > 1e3 * target:
            raise SingularGram(
                f"Gram matrix is numerically singular (residual {best[0]:.3g}, cond {cond:.3g})"
            )
    return _finish(attempts, cond, success=False)


def _finish(attempts, cond, success=True):
    res, alpha, jit, path = min(attempts, key=lambda a: a[0]) if not success else attempts[-1]
    if cond > COND_WARN:
        warnings.warn(f"Gram condition estimate {cond:.3g} exceeds {COND_WARN:.0e}", IllConditioned,
                      stacklevel=3)
    if not success:
        log.info("Gram solve residual %.3g did not reach tolerance (path %s)", res, path)
    return alpha, GramSolveReport(cond, res, jit, path, success)


# --------------------------------------------------------------------------
# fitting and evaluation
# --------------------------------------------------------------------------

def fit(spec: KernelSpec, nodes, values, jitter: bool = True, rtol: float = RESIDUAL_RTOL) -> tuple:
    """Interpolate ``values`` at ``nodes``.

    Parameters
    ----------
    spec : KernelSpec
    nodes : array_like
        ``d x n`` array of column nodes (a 1-D array means ``n`` scalars).
    values : array_like
        Length-``n`` targets, or ``n x k`` for ``k`` outputs.
    jitter : bool
        Allow diagonal regularization when the Gram matrix is singular.

    Returns
    -------
    network : InterpNetwork
    report : GramSolveReport
    """
    X = as_points(nodes)
    lam = np.asarray(values, dtype=complex)
    if lam.shape[0] != X.shape[1]:
        raise DimensionMismatch(f"{lam.shape[0]} values for {X.shape[1]} nodes")
    P = gram(spec, X)
    alpha, report = solve_gram(P, lam, positive=spec.is_positive, jitter=jitter, rtol=rtol)
    net = InterpNetwork(spec, X, alpha, 2, (), report.cond_estimate)
    return net, report


def _as_eval_points(net: InterpNetwork, z):
    arr = np.asarray(z, dtype=complex)
    d = net.dim
    if arr.ndim == 0:
        return arr.reshape(1, 1), True
    if arr.ndim == 1:
        if d == 1:
            return arr.reshape(1, -1), False
        if arr.shape[0] == d:
            return arr.reshape(d, 1), True
        raise DimensionMismatch(f"expected {d}-dimensional input, got {arr.shape[0]}")
    if arr.shape[0] != d:
        raise DimensionMismatch(f"expected {d} x m inputs, got {arr.shape}")
    return arr, False


def evaluate(network: InterpNetwork, z):
    """Network output at ``z``.

    ``z`` may be one point (a scalar, or a length-``d`` vector) or a
    ``d x m`` batch; in the batch case an array of ``m`` outputs is returned.
    """
    Z, single = _as_eval_points(network, z)
    for anchors in network.inner_layers:
        Z = deep_feature_map(anchors, Z)
    K = kernel_matrix(network.spec, Z, network.centers)
    out = K @ network.weights
    if single:
        return complex(out[0]) if out.ndim == 1 else out[0]
    return out


def _quadratic_form(network: InterpNetwork):
    C = network.centers
    P = kernel_matrix(network.spec, C, C)
    P = 0.5 * (P + P.conj().T)
    a = network.weights
    q = np.einsum("i...,ij,j...->...", a.conj(), P, a)
    return np.real(q)


def rkhs_norm(network: InterpNetwork):
    """``sqrt(alpha* P alpha)``; only meaningful for positive kernels."""
    if not network.spec.is_positive:
        raise KreinSpec(f"{network.spec.id} is sign-indefinite; use krein_form")
    q = _quadratic_form(network)
    return np.sqrt(np.maximum(q, 0.0)) if np.ndim(q) else math.sqrt(max(float(q), 0.0))


def krein_form(network: InterpNetwork):
    """The (possibly negative) Krein quadratic form ``Re(alpha* P alpha)``."""
    q = _quadratic_form(network)
    return q if np.ndim(q) else float(q)


# --------------------------------------------------------------------------
# deep layering
# --------------------------------------------------------------------------

def deep_feature_map(anchors, x) -> np.ndarray:
    """Rescaled omega-kernel features of ``x`` at ``N`` anchor points.

    Component ``j`` is ``(1 - |y_j|)(1 - |x|) / (sqrt(N) (1 - y_j* x))``, so
    every point of the closed unit ball lands strictly inside it and the whole
    unit sphere collapses to the origin.  ``x`` may be a single ``d``-vector
    (returns an ``N``-vector) or a ``d x m`` batch (returns ``N x m``).
    """
    Y = as_points(anchors)
    xa = np.asarray(x, dtype=complex)
    single = xa.ndim <= 1 and not (xa.ndim == 1 and Y.shape[0] == 1 and xa.size > 1)
    X = xa.reshape(-1, 1) if single else as_points(xa)
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"anchor dimension {Y.shape[0]} vs input {X.shape[0]}")
    xn = np.linalg.norm(X, axis=0)
    yn = np.linalg.norm(Y, axis=0)
    bad = np.nonzero(xn > 1 + 1e-15)[0]
    if bad.size:
        raise DomainViolation(f"input {bad[0]} has norm {xn[bad[0]]:.6g} > 1", index=int(bad[0]))
    bad = np.nonzero(yn > 1 + 1e-15)[0]
    if bad.size:
        raise DomainViolation(f"anchor {bad[0]} has norm {yn[bad[0]]:.6g} > 1", index=int(bad[0]))
    N = Y.shape[1]
    num = np.outer(1 - yn, 1 - xn)
    den = 1 - Y.conj().T @ X
    with np.errstate(divide="ignore", invalid="ignore"):
        F = np.where(num == 0, 0.0, num / den) / math.sqrt(N)
    return F[:, 0] if single else F


def fit_deep(spec: KernelSpec, nodes, values, depth: int = 3, jitter: bool = True,
             rtol: float = RESIDUAL_RTOL) -> InterpNetwork:
    """Layer-by-layer interpolation network of the given depth.

    Each of the ``depth - 2`` inner layers maps points through
    :func:`deep_feature_map` anchored at the (already mapped) training nodes;
    the output layer is an ordinary kernel fit on the final images.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    if depth == 2:
        return fit(spec, nodes, values, jitter=jitter, rtol=rtol)[0]
    if spec.id != "omega":
        raise UnsupportedId("deep layering is defined for the omega kernel")
    X = as_points(nodes)
    check_distinct(X, "nodes")
    anchors = []
    Z = X
    for _ in range(depth - 2):
        anchors.append(Z)
        Z = deep_feature_map(Z, Z)
        try:
            check_distinct(Z, "mapped nodes")
        except CollapsedNodes:
            raise
        except Exception as exc:  # DuplicatePoints from the check
            raise CollapsedNodes(f"{exc}; inputs collapse after the feature map",
                                 indices=getattr(exc, "indices", None)) from None
    lam = np.asarray(values, dtype=complex)
    if lam.shape[0] != X.shape[1]:
        raise DimensionMismatch(f"{lam.shape[0]} values for {X.shape[1]} nodes")
    P = kernel_matrix(spec, Z, Z)
    P = 0.5 * (P + P.conj().T)
    alpha, report = solve_gram(P, lam, positive=True, jitter=jitter, rtol=rtol)
    net = InterpNetwork(spec, X, alpha, depth, tuple(anchors), report.cond_estimate,
                        {"solve": report})
    return net


def chebyshev_nodes(n: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """``n`` first-kind Chebyshev points mapped to ``[a, b]``, ascending."""
    if n < 1 or not a < b:
        raise ValueError("need n >= 1 and a < b")
    k = np.arange(n, 0, -1)
    t = np.cos((2 * k - 1) * np.pi / (2 * n))
    return np.sort(0.5 * (a + b) + 0.5 * (b - a) * t)
