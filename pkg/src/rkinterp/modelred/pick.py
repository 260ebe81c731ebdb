"""Pick matrices and Nevanlinna-Pick interpolation on the disk and polydisk."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DimensionMismatch, DomainViolation, DuplicatePoints, Infeasible

PSD_RTOL = 1e-10
BOUNDARY_TOL = 1e-12
SUP_GRID = 4096


def principal_root(lam, d: int) -> np.ndarray:
    """``lam**(1/d)`` on the principal branch, with ``0 -> 0``."""
    lam = np.asarray(lam, dtype=complex)
    out = np.zeros_like(lam)
    nz = lam != 0
    out[nz] = np.exp(np.log(lam[nz]) / d)
    return out


def _psd(M: np.ndarray) -> tuple:
    ev = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    tr = abs(float(np.trace(M).real))
    mn = float(ev[0]) if ev.size else 0.0
    return mn >= -PSD_RTOL * max(tr, np.finfo(float).tiny), mn


@dataclass(frozen=True, eq=False)
class PickSystem:
    points: np.ndarray
    targets: np.ndarray
    matrices: tuple
    feasible: bool
    min_eigs: tuple = ()


def pick_matrices(points, targets, d: Optional[int] = None) -> PickSystem:
    """Marginal Pick matrices of a polydisk interpolation problem.

    ``points`` is ``d x n`` (one column per point).  With ``mu = lam**(1/d)``
    the ``k``-th matrix is
    ``(1 - mu_p conj(mu_q)) / (1 - z_k^(p) conj(z_k^(q)))``; the problem is
    declared feasible when every matrix is PSD up to ``1e-10 * trace``.
    """
    Z = np.asarray(points, dtype=complex)
    if Z.ndim == 1:
        Z = Z.reshape(1, -1) if d in (None, 1) else Z.reshape(d, -1)
    if d is None:
        d = Z.shape[0]
    if Z.shape[0] != d:
        raise DimensionMismatch(f"points have dimension {Z.shape[0]}, expected {d}")
    lam = np.atleast_1d(np.asarray(targets, dtype=complex))
    if lam.size != Z.shape[1]:
        raise DimensionMismatch(f"{lam.size} targets for {Z.shape[1]} points")
    mod = np.abs(Z)
    if np.any(mod >= 1):
        k, j = np.argwhere(mod >= 1)[0]
        raise DomainViolation(f"coordinate {k} of point {j} is outside the open disk", index=int(j))
    mu = principal_root(lam, d)
    top = 1 - np.outer(mu, mu.conj())
    mats, eigs, ok = [], [], True
    for k in range(d):
        M = top / (1 - np.outer(Z[k], Z[k].conj()))
        good, mn = _psd(M)
        mats.append(M)
        eigs.append(mn)
        ok = ok and good
    return PickSystem(Z, lam, tuple(mats), bool(ok), tuple(eigs))


def _blaschke(a, z):
    return (z - a) / (1 - np.conj(a) * z)


@dataclass(frozen=True, eq=False)
class SchurInterpolant:
    """Bounded analytic interpolant built by the Schur recursion.

    ``nodes[k]`` and ``params[k]`` are the point and Schur parameter of step
    ``k``; after the last step the remainder is the constant ``tail``.
    """

    nodes: np.ndarray
    params: np.ndarray
    tail: complex = 0.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        f = np.full(z.shape, self.tail, dtype=complex)
        for a, w in zip(self.nodes[::-1], self.params[::-1]):
            bf = _blaschke(a, z) * f
            f = (w + bf) / (1 + np.conj(w) * bf)
        return f

    def sup_norm(self, grid_size: int = SUP_GRID) -> float:
        z = np.exp(2j * np.pi * np.arange(grid_size) / grid_size)
        return float(np.max(np.abs(self(z)))) if grid_size else 0.0


def _dedupe(z, w):
    keep_z, keep_w = [], []
    for zi, wi in zip(z, w):
        hit = [k for k, zk in enumerate(keep_z) if zk == zi]
        if hit:
            if abs(keep_w[hit[0]] - wi) > 1e-12:
                return None
            continue
        keep_z.append(zi)
        keep_w.append(wi)
    return np.array(keep_z, dtype=complex), np.array(keep_w, dtype=complex)


def nevanlinna_pick_1d(points, targets) -> SchurInterpolant:
    """Analytic ``F`` on the disk with ``F(z_j) = w_j`` and ``sup |F| <= 1``.

    Each step peels off one interpolation condition with a disk automorphism
    and divides by the Blaschke factor of its node; a unimodular parameter
    forces the remaining data to be constant.

    Raises
    ------
    Infeasible
        If the Pick matrix is not PSD (no such ``F`` exists).
    DuplicatePoints
        If two nodes coincide.
    """
    z = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
    w = np.atleast_1d(np.asarray(targets, dtype=complex)).ravel()
    if z.size != w.size:
        raise DimensionMismatch(f"{w.size} targets for {z.size} points")
    for i in range(z.size):
        dup = np.nonzero(z[i + 1:] == z[i])[0]
        if dup.size:
            raise DuplicatePoints(f"points {i} and {i + 1 + dup[0]} coincide",
                                  indices=(i, int(i + 1 + dup[0])))
    system = pick_matrices(z.reshape(1, -1), w, 1)
    if not system.feasible:
        raise Infeasible(f"Pick matrix has eigenvalue {system.min_eigs[0]:.3g} < 0", coordinate=0)

    nodes, params = [], []
    rem_z, rem_w = z.copy(), w.copy()
    tail = 0.0
    while rem_z.size:
        a, wk = rem_z[0], rem_w[0]
        if abs(wk) > 1 + 1e-10:
            raise Infeasible(f"Schur parameter {abs(wk):.6g} exceeds 1", coordinate=0)
        if abs(wk) >= 1 - BOUNDARY_TOL:
            # unimodular: the interpolant must be constant from here on
            if np.any(np.abs(rem_w - wk) > 1e-8):
                raise Infeasible("data after a unimodular Schur parameter are not constant",
                                 coordinate=0)
            tail = wk / abs(wk)
            break
        nodes.append(a)
        params.append(wk)
        rz, rw = rem_z[1:], rem_w[1:]
        rem_w = ((rw - wk) / (1 - np.conj(wk) * rw)) / _blaschke(a, rz)
        rem_z = rz
    return SchurInterpolant(np.array(nodes, dtype=complex), np.array(params, dtype=complex), tail)


@dataclass(frozen=True, eq=False)
class ProductInterpolant:
    """``F(z) = prod_k F_k(z_k)`` from one-dimensional interpolants."""

    factors: tuple
    feasible: bool = True

    @property
    def dim(self) -> int:
        return len(self.factors)

    def __call__(self, Z):
        Z = np.asarray(Z, dtype=complex)
        if Z.ndim == 1:
            Z = Z.reshape(self.dim, -1) if Z.size != self.dim else Z.reshape(self.dim, 1)
        out = np.ones(Z.shape[1], dtype=complex)
        for k, F in enumerate(self.factors):
            out *= F(Z[k])
        return out

    def sup_norm(self, grid_size: int = SUP_GRID) -> float:
        # the sup of a product of one-variable functions is the product of sups
        return float(np.prod([F.sup_norm(grid_size) for F in self.factors]))


def pick_product_interpolant(points, targets, d: Optional[int] = None) -> ProductInterpolant:
    """Polydisk interpolant as a product of one-variable Pick interpolants.

    Coordinate ``k`` interpolates ``lam_j**(1/d)`` at ``z_k^(j)``, so the
    product takes the value ``lam_j`` at each point and stays in the unit
    ball.

    Raises
    ------
    Infeasible
        With ``coordinate`` set to the first marginal problem that has no
        solution.
    """
    system = pick_matrices(points, targets, d)
    Z, mu = system.points, principal_root(system.targets, system.points.shape[0])
    factors = []
    for k in range(Z.shape[0]):
        if system.min_eigs[k] < -PSD_RTOL * max(abs(np.trace(system.matrices[k]).real), 1e-300):
            raise Infeasible(f"marginal Pick matrix {k} is not PSD", coordinate=k)
        dd = _dedupe(Z[k], mu)
        if dd is None:
            raise Infeasible(f"coordinate {k} repeats a node with different targets", coordinate=k)
        try:
            factors.append(nevanlinna_pick_1d(*dd))
        except Infeasible as exc:
            raise Infeasible(f"coordinate {k}: {exc}", coordinate=k) from None
    return ProductInterpolant(tuple(factors), True)
