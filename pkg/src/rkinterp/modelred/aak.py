"""Optimal Hankel-norm rational approximation of one-dimensional symbols.

For a symbol ``f`` with Schmidt numbers ``s_1 >= s_2 >= ...`` the best
approximation of order ``m`` (``m`` poles in the open disk) in the Hankel
norm has error exactly ``s_{m+1}``.  Given a Schmidt pair ``H v = s u`` the
optimal error function is ``s u_-(z) / v_+(z)`` with
``v_+(z) = sum_j v_j z^{j-1}`` and ``u_-(z) = sum_j u_j z^{-j}``, so the
approximant is the strictly proper part of ``f - s u_- / v_+``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.signal import lfilter

from ..errors import PoleOnCircle, PoleOnGrid, SingularValueCluster
from .hankel import (
    MAX_SIZE,
    PowerSymbol,
    ProductSymbol,
    _as_symbol,
    fir_realization,
    hankel_matrix,
    hankel_singular_values_ss,
    hankel_norm,
    hankel_svd,
    rational_realization,
    strictly_proper_part,
)

log = logging.getLogger(__name__)

CLUSTER_RTOL = 1e-10
RANK_RTOL = 1e-10
POLE_TOL = 1e-8


class UncertifiedReduction(UserWarning):
    """Achieved Hankel error differs from the predicted Schmidt number."""


@dataclass(frozen=True, eq=False)
class RationalApproximant:
    """Strictly proper rational ``p(z) / q(z) + offset``.

    ``q`` is monic of degree ``order`` and ``p`` has degree below it; both
    are stored highest power first.  ``achieved_error`` is the Hankel norm of
    the difference to the reduced symbol and ``schmidt`` the predicted
    optimum ``s_{m+1}``.
    """

    p: np.ndarray
    q: np.ndarray
    order: int
    achieved_error: float
    schmidt: float = 0.0
    certified: bool = True
    offset: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p", np.atleast_1d(np.asarray(self.p, dtype=complex)))
        object.__setattr__(self, "q", np.atleast_1d(np.asarray(self.q, dtype=complex)))

    @property
    def poles(self) -> np.ndarray:
        return np.roots(self.q) if self.order else np.zeros(0, complex)

    @property
    def decay(self) -> float:
        return float(np.max(np.abs(self.poles))) if self.order else 0.0

    def expansion(self, length: int) -> np.ndarray:
        """First ``length`` coefficients of ``p/q`` in powers of ``1/z``."""
        m = self.order
        if m == 0 or length == 0:
            return np.zeros(length, dtype=complex)
        # in x = 1/z:  (p_{m-1} x + ... + p_0 x^m) / (1 + q_1 x + ... + q_m x^m)
        b = np.concatenate([[0.0], _pad_front(self.p, m)])
        delta = np.zeros(length + 1, dtype=complex)
        delta[0] = 1.0
        return lfilter(b, self.q, delta)[1:]

    def default_length(self, tol: float = 1e-17) -> int:
        rho = self.decay
        if rho == 0:
            return 1
        n = math.ceil(math.log(tol) / math.log(rho)) + self.order + 1
        return int(min(max(n, 32), 4 * MAX_SIZE))

    def to_symbol(self, length: Optional[int] = None) -> PowerSymbol:
        L = self.default_length() if length is None else length
        rho = self.decay
        return PowerSymbol(self.expansion(L), rho if 0 < rho < 1 else None)

    def disk_eval(self, w):
        """Value at ``z = 1/w``: ``offset + sum_n r_n w^n``, a rational function of ``w``."""
        w = np.asarray(w, dtype=complex)
        m = self.order
        if m == 0:
            return np.full(w.shape, self.offset, dtype=complex)
        num = np.polynomial.polynomial.polyval(w, np.concatenate([[0.0], _pad_front(self.p, m)]))
        den = np.polynomial.polynomial.polyval(w, self.q)
        wp = 1.0 / self.poles
        close = np.min(np.abs(w.reshape(-1, 1) - wp.reshape(1, -1)), axis=1) < POLE_TOL
        if np.any(close):
            k = int(np.nonzero(close)[0][0])
            raise PoleOnGrid(f"evaluation point {k} lies within {POLE_TOL:g} of a pole")
        return self.offset + num / den

    def __call__(self, z):
        return self.disk_eval(1.0 / np.asarray(z, dtype=complex))

    def as_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "order": self.order,
                "achieved_error": self.achieved_error, "schmidt": self.schmidt,
                "certified": self.certified, "offset": self.offset}


@dataclass(frozen=True, eq=False)
class ResidualFactor:
    """Difference ``symbol - approximant`` in the disk model."""

    symbol: PowerSymbol
    approximant: RationalApproximant

    def disk_eval(self, w):
        return self.symbol.disk_eval(w) - self.approximant.disk_eval(w)


def _pad_front(p, m):
    p = np.asarray(p, dtype=complex)
    out = np.zeros(m, dtype=complex)
    k = min(m, p.size)
    if k:
        out[m - k:] = p[p.size - k:]
    return out


def _numerator(q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Polynomial part of ``q(z) * sum_n r_n z^{-n}``, highest power first."""
    m = q.size - 1
    rr = np.zeros(m + 1, dtype=complex)
    k = min(m, r.size)
    rr[1:k + 1] = r[:k]
    # P_e = sum_{n=1}^{m-e} q_{m-e-n} r_n
    P = np.array([sum(q[m - e - n] * rr[n] for n in range(1, m - e + 1)) for e in range(m)])
    return P[::-1]


def realize(coeffs, order: int, size: Optional[int] = None) -> tuple:
    """Order-``order`` realization ``(p, q)`` of a coefficient sequence (Kung's method)."""
    c = np.asarray(coeffs, dtype=complex)
    if order == 0:
        return np.zeros(0, complex), np.ones(1, complex)
    N = size or max(order + 1, min((c.size + 1) // 2, 256))
    H = hankel_matrix(c, N)
    U, s, Vh = sla.svd(H)
    sq = np.sqrt(s[:order])
    O = U[:, :order] * sq
    A = np.linalg.lstsq(O[:-1], O[1:], rcond=None)[0]
    q = np.poly(np.linalg.eigvals(A)).astype(complex)
    return _numerator(q, c), q


def _grid_size(N: int, rho: float) -> int:
    need = 4 * N
    if 0 < rho < 1:
        need = max(need, int(math.log(1e-17) / math.log(rho)) + 2 * N)
    G = 256
    while G < need and G < 1 << 16:
        G *= 2
    return G


def aak_reduce_1d(symbol, order: int, grid_size: Optional[int] = None, size: Optional[int] = None,
                  tol: float = 1e-6) -> RationalApproximant:
    """Optimal order-``order`` Hankel-norm approximant of a symbol.

    Parameters
    ----------
    symbol : PowerSymbol or array_like
    order : int
        Number of poles ``m >= 0`` of the approximant.
    grid_size : int, optional
        Circle grid used to split off the strictly proper part; a power of
        two of at least 256.  Chosen from the Hankel size when omitted.
    size : int, optional
        Hankel truncation; defaults to the symbol's certified size.
    tol : float
        Relative tolerance for certifying ``achieved_error == s_{m+1}``.

    Raises
    ------
    SingularValueCluster
        If ``s_{m+1}`` is not separated from a neighbour by ``1e-10 s_1``.
    PoleOnCircle
        If a recovered pole lies within ``1e-8`` of the unit circle.
    """
    sym = _as_symbol(symbol)
    m = int(order)
    if m < 0:
        raise ValueError("order must be >= 0")
    U, s, Vh = hankel_svd(sym, size)
    N = s.size
    s1 = float(s[0]) if N else 0.0
    if m == 0 or s1 == 0:
        return RationalApproximant(np.zeros(0), np.ones(1), 0, s1, s1)
    if m >= N:
        raise ValueError(f"order {m} exceeds the Hankel size {N}")
    sm1 = float(s[m])
    rank = int(np.sum(s > RANK_RTOL * s1))
    if rank <= m:
        # symbol already has McMillan degree <= m: realize it exactly
        p, q = realize(sym.coeffs, rank, N)
        return _finish(sym, p, q, rank, sm1, s1, tol)

    for j in (m - 1, m + 1):
        if 0 <= j < N and abs(s[j] - s[m]) < CLUSTER_RTOL * s1:
            lo, hi = sorted((j, m))
            raise SingularValueCluster(
                f"Schmidt numbers s_{lo + 1} and s_{hi + 1} coincide ({s[lo]:.6g}, {s[hi]:.6g})",
                indices=(lo + 1, hi + 1),
            )

    u = U[:, m]
    v = Vh[m].conj()
    G = grid_size or _grid_size(N, sym.decay_bound or 0.0)
    z = np.exp(2j * np.pi * np.arange(G) / G)
    w = 1.0 / z
    vplus = np.polynomial.polynomial.polyval(z, v)
    if np.min(np.abs(vplus)) < 1e-300:
        raise PoleOnCircle("v_+ vanishes on the sampling grid")
    uminus = w * np.polynomial.polynomial.polyval(w, u)
    fz = sym.disk_eval(w)
    h = fz - sm1 * uminus / vplus
    rhat = strictly_proper_part(h, zero_rtol=0.0)

    vt = np.trim_zeros(v, "b")
    zeros = np.polynomial.polynomial.polyroots(vt) if vt.size > 1 else np.zeros(0)
    inside = zeros[np.abs(zeros) < 1]
    if inside.size == m:
        q = np.poly(inside).astype(complex)
        p = _numerator(q, rhat.coeffs)
        path = "schmidt-pair"
    else:
        log.info("v_+ has %d zeros inside the disk (expected %d); realizing from coefficients",
                 inside.size, m)
        p, q = realize(rhat.coeffs, m)
        path = "realization"
    out = _finish(sym, p, q, m, sm1, s1, tol)
    if not out.certified and path == "schmidt-pair":
        p2, q2 = realize(rhat.coeffs, m)
        alt = _finish(sym, p2, q2, m, sm1, s1, tol)
        if abs(alt.achieved_error - sm1) < abs(out.achieved_error - sm1):
            out = alt
    if not out.certified:
        warnings.warn(
            f"order-{m} reduction reached {out.achieved_error:.6g}, predicted {sm1:.6g}",
            UncertifiedReduction, stacklevel=2,
        )
    return out


def _finish(sym, p, q, m, sm1, s1, tol) -> RationalApproximant:
    q = np.asarray(q, dtype=complex)
    roots = np.roots(q) if q.size > 1 else np.zeros(0)
    if roots.size and np.any(np.abs(np.abs(roots) - 1) < POLE_TOL):
        raise PoleOnCircle("approximant has a pole on the unit circle")
    approx = RationalApproximant(p, q, m, 0.0, sm1)
    if roots.size and np.max(np.abs(roots)) >= 1:
        err = math.inf
    elif sym.decay_bound is None:
        # finite symbol: exact Hankel norm of (FIR - rational) from Gramians
        A1, B1, C1 = fir_realization(sym.coeffs)
        A2, B2, C2 = rational_realization(p, q)
        A = sla.block_diag(A1, A2)
        B = np.vstack([B1, B2])
        C = np.hstack([C1, -C2])
        err = float(hankel_singular_values_ss(A, B, C)[0])
    else:
        L = max(sym.size, approx.default_length())
        err = hankel_norm(sym - approx.to_symbol(L), atol=1e-10 * s1)
    if sm1 > RANK_RTOL * s1:
        ok = abs(err - sm1) <= tol * sm1
    else:
        ok = err <= 1e-8 * s1
    return RationalApproximant(p, q, m, err, sm1, bool(ok))


@dataclass(frozen=True)
class MarginalReduction:
    """Per-dimension reductions of a product symbol and their error bounds."""

    approximants: tuple
    schmidt: tuple
    bound: float
    product_bound: float


def marginal_aak(product, orders: Sequence[int], **kwargs) -> MarginalReduction:
    """Reduce each factor of ``prod_j phi_j(z_j)`` to order ``n_j``.

    Returns the approximants together with ``prod_j s^{(j)}`` and
    ``sqrt(d) prod_j s^{(j)}``, where ``s^{(j)}`` is the Schmidt number that
    equals the optimal error of the order-``n_j`` reduction of factor ``j``.
    """
    factors = product.factors if isinstance(product, ProductSymbol) else tuple(product)
    if len(orders) != len(factors):
        raise ValueError(f"{len(orders)} orders for {len(factors)} factors")
    approx = tuple(aak_reduce_1d(f, n, **kwargs) for f, n in zip(factors, orders))
    s = tuple(a.schmidt for a in approx)
    prod = float(np.prod(s))
    return MarginalReduction(approx, s, math.sqrt(len(factors)) * prod, prod)
