"""Strictly proper symbols and their Hankel operators.

A symbol ``f(z) = sum_{n>=1} f_n z^{-n}`` is stored by its coefficient list.
Its Hankel matrix has entries ``H[i, j] = f_{i+j-1}`` (1-based), and the
singular values of that matrix (the Schmidt numbers) govern how well ``f``
can be approximated by low-order rational functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from ..errors import DimensionMismatch, TruncationTooSmall

TAIL_TOL = 1e-12
TRUNCATION_RTOL = 1e-10
MIN_SIZE = 32
MAX_SIZE = 4096


@dataclass(frozen=True, eq=False)
class PowerSymbol:
    """Strictly proper part ``sum_{n>=1} f_n z^{-n}`` of a symbol.

    Parameters
    ----------
    coeffs : array_like
        ``f_1, ..., f_M``.
    decay_bound : float, optional
        ``rho`` in ``(0, 1)`` with ``|f_n| <= C rho**n`` for the infinite
        sequence the stored coefficients come from.  ``None`` means the
        symbol is exactly the stored finite sum.
    decay_constant : float, optional
        ``C``; computed from the stored coefficients when omitted.
    alias_bound : float
        Estimated aliasing error when the coefficients came from sampling.
    """

    coeffs: np.ndarray
    decay_bound: Optional[float] = None
    decay_constant: Optional[float] = None
    alias_bound: float = 0.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).ravel()
        object.__setattr__(self, "coeffs", c)
        rho = self.decay_bound
        if rho is None:
            return
        if not 0 < rho < 1:
            raise ValueError("decay_bound must lie in (0, 1)")
        n = np.arange(1, c.size + 1)
        needed = float(np.max(np.abs(c) / rho ** n)) if c.size else 0.0
        C = self.decay_constant
        if C is None:
            object.__setattr__(self, "decay_constant", needed)
        elif needed > C * (1 + 1e-9):
            raise ValueError(f"coefficients violate |f_n| <= {C:g} * {rho:g}**n")

    @classmethod
    def from_poles(cls, poles, residues, length: Optional[int] = None) -> "PowerSymbol":
        """Symbol ``sum_k r_k / (z - p_k)``, i.e. ``f_n = sum_k r_k p_k**(n-1)``."""
        p = np.atleast_1d(np.asarray(poles, dtype=complex))
        r = np.atleast_1d(np.asarray(residues, dtype=complex))
        if p.shape != r.shape:
            raise DimensionMismatch("one residue per pole")
        if p.size == 0:
            return cls(np.zeros(0))
        rho = float(np.max(np.abs(p)))
        if rho >= 1:
            raise ValueError("poles must lie in the open unit disk")
        if rho == 0:
            return cls(np.array([r.sum()]))
        C = float(np.sum(np.abs(r))) / rho
        if length is None:
            length = _geometric_size(C, rho, 4 * MAX_SIZE)
        n = np.arange(length)
        coeffs = (r[None, :] * p[None, :] ** n[:, None]).sum(axis=1)
        return cls(coeffs, rho, C)

    @property
    def size(self) -> int:
        return self.coeffs.size

    def tail_bound(self, N: int) -> float:
        """Bound on ``sum_{n>N} |f_n|``."""
        c = self.coeffs
        stored = float(np.sum(np.abs(c[N:])))
        if self.decay_bound is None:
            return stored
        rho, C = self.decay_bound, self.decay_constant
        beyond = C * rho ** (max(N, c.size) + 1) / (1 - rho)
        return stored + beyond if N < c.size else beyond

    def default_size(self) -> int:
        """Smallest Hankel size whose neglected tail is below ``1e-12``."""
        if self.decay_bound is None:
            last = np.nonzero(self.coeffs)[0]
            n = int(last[-1]) + 1 if last.size else 1
            return int(min(max(n, MIN_SIZE), MAX_SIZE))
        return _geometric_size(self.decay_constant, self.decay_bound, MAX_SIZE)

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(length, dtype=complex)
        k = min(length, self.size)
        out[:k] = self.coeffs[:k]
        return out

    def disk_eval(self, w):
        """Power-series model ``sum_n f_n w**n`` (``w = 1/z``), valid for ``|w| < 1/rho``."""
        w = np.asarray(w, dtype=complex)
        c = np.concatenate([[0.0], self.coeffs])
        return np.polynomial.polynomial.polyval(w, c)

    def __call__(self, z):
        """Value ``sum_n f_n z**-n`` for ``|z| > rho``."""
        return self.disk_eval(1.0 / np.asarray(z, dtype=complex))

    def __sub__(self, other: "PowerSymbol") -> "PowerSymbol":
        L = max(self.size, other.size)
        rhos = [s.decay_bound for s in (self, other) if s.decay_bound is not None]
        rho = max(rhos) if rhos else None
        return PowerSymbol(self.padded(L) - other.padded(L), rho)


@dataclass(frozen=True)
class ProductSymbol:
    """Separable symbol ``Phi(z_1, ..., z_d) = prod_j phi_j(z_j)``."""

    factors: tuple

    def __post_init__(self):
        f = tuple(self.factors)
        if not f:
            raise ValueError("a product symbol needs at least one factor")
        object.__setattr__(self, "factors", f)

    @property
    def dim(self) -> int:
        return len(self.factors)

    def disk_eval(self, W):
        W = np.asarray(W, dtype=complex).reshape(self.dim, -1)
        out = np.ones(W.shape[1], dtype=complex)
        for k, fac in enumerate(self.factors):
            out *= fac.disk_eval(W[k])
        return out


def _geometric_size(C: float, rho: float, cap: int) -> int:
    if C <= 0:
        return MIN_SIZE
    # C rho^N / (1 - rho) < TAIL_TOL
    N = math.ceil(math.log(TAIL_TOL * (1 - rho) / C) / math.log(rho))
    return int(min(max(N, MIN_SIZE), cap))


# --------------------------------------------------------------------------
# Hankel operators
# --------------------------------------------------------------------------

def hankel_matrix(symbol, size: int) -> np.ndarray:
    """``size x size`` Hankel matrix ``H[i, j] = f_{i+j+1}`` (0-based indices)."""
    if size < 1:
        raise ValueError("size must be >= 1")
    c = _coeffs(symbol)
    f = np.zeros(2 * size - 1, dtype=complex)
    k = min(c.size, f.size)
    f[:k] = c[:k]
    return sla.hankel(f[:size], f[size - 1:])


def _coeffs(symbol) -> np.ndarray:
    if isinstance(symbol, PowerSymbol):
        return symbol.coeffs
    return np.atleast_1d(np.asarray(symbol, dtype=complex))


def _as_symbol(symbol) -> PowerSymbol:
    return symbol if isinstance(symbol, PowerSymbol) else PowerSymbol(symbol)


def _checked_size(sym: PowerSymbol, size: Optional[int]) -> int:
    return sym.default_size() if size is None else int(size)


def _certify(sym: PowerSymbol, N: int, s1: float, atol: float = 0.0) -> None:
    tail = sym.tail_bound(N)
    if tail > max(TRUNCATION_RTOL * s1, atol) and tail > 0:
        raise TruncationTooSmall(
            f"Hankel size {N} leaves a tail of {tail:.3g} > {TRUNCATION_RTOL:g} * s1 ({s1:.3g})"
        )


def schmidt_numbers(symbol, size: Optional[int] = None, count: Optional[int] = None,
                    atol: float = 0.0) -> np.ndarray:
    """Leading singular values ``s_1 >= s_2 >= ...`` of the truncated Hankel matrix.

    Raises
    ------
    TruncationTooSmall
        If the coefficients neglected by the truncation could move the
        result by more than ``max(1e-10 * s_1, atol)``.
    """
    sym = _as_symbol(symbol)
    N = _checked_size(sym, size)
    s = sla.svdvals(hankel_matrix(sym, N))
    _certify(sym, N, float(s[0]), atol)
    return s if count is None else s[:count]


def hankel_norm(symbol, size: Optional[int] = None, atol: float = 0.0) -> float:
    """Operator norm ``s_1`` of the (truncated) Hankel operator."""
    return float(schmidt_numbers(symbol, size, 1, atol)[0])


def hankel_svd(symbol, size: Optional[int] = None):
    """Full SVD ``H = U diag(s) Vh`` of the truncated Hankel matrix."""
    sym = _as_symbol(symbol)
    N = _checked_size(sym, size)
    U, s, Vh = sla.svd(hankel_matrix(sym, N))
    _certify(sym, N, float(s[0]))
    return U, s, Vh


# --------------------------------------------------------------------------
# boundary values
# --------------------------------------------------------------------------

def boundary_samples(symbol, grid_size: int = 4096) -> np.ndarray:
    """Values of ``f`` at ``z_k = exp(2 pi i k / G)``.

    Coefficients beyond ``G`` are folded modulo ``G``, which is exact for
    the sampled values.
    """
    c = _coeffs(symbol)
    G = int(grid_size)
    a = np.zeros(G, dtype=complex)
    n = np.arange(1, c.size + 1) % G
    np.add.at(a, n, c)
    # sum_n f_n exp(-2 pi i n k / G)
    return np.fft.fft(a)


def l2_norm(symbol) -> float:
    """Boundary ``L^2`` norm, equal to the coefficient ``l^2`` norm."""
    return float(np.linalg.norm(_coeffs(symbol)))


def sup_norm(symbol, grid_size: int = 4096) -> float:
    """Boundary sup norm estimated on a uniform circle grid."""
    return float(np.max(np.abs(boundary_samples(symbol, grid_size))))


def strictly_proper_part(samples, zero_rtol: float = 1e-14) -> PowerSymbol:
    """Negative-frequency part of a function sampled on a uniform circle grid.

    ``samples[k]`` is the value at ``exp(2 pi i k / G)``; ``G`` must be a
    power of two, at least 256.  The coefficient of ``z^{-n}`` is
    ``ifft(samples)[n]`` for ``1 <= n < G/2``.  The returned ``alias_bound``
    is the largest coefficient magnitude near the Nyquist band, where
    positive and negative frequencies overlap.
    """
    g = np.asarray(samples, dtype=complex).ravel()
    G = g.size
    if G < 256 or G & (G - 1):
        raise ValueError("grid size must be a power of two >= 256")
    c = np.fft.ifft(g)
    neg = c[1:G // 2].copy()
    band = slice(3 * G // 8, 5 * G // 8)
    alias = float(np.max(np.abs(c[band])))
    scale = float(np.max(np.abs(g))) if G else 0.0
    neg[np.abs(neg) <= zero_rtol * scale] = 0
    nz = np.nonzero(neg)[0]
    neg = neg[: nz[-1] + 1] if nz.size else neg[:0]
    return PowerSymbol(neg, alias_bound=alias)


# --------------------------------------------------------------------------
# state-space route for finite symbols plus rationals
# --------------------------------------------------------------------------

def fir_realization(coeffs) -> tuple:
    """``(A, B, C)`` with ``C A^{n-1} B = f_n`` for a finite coefficient list."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    M = c.size
    A = np.eye(M, k=-1, dtype=complex)
    B = np.zeros((M, 1), dtype=complex)
    if M:
        B[0, 0] = 1.0
    return A, B, c.reshape(1, M)


def rational_realization(p, q) -> tuple:
    """Controllable canonical realization of ``p(z)/q(z)`` (``q`` monic, highest power first)."""
    q = np.asarray(q, dtype=complex)
    m = q.size - 1
    A = np.zeros((m, m), dtype=complex)
    if m:
        A[0] = -q[1:]
        A[1:, :-1] += np.eye(m - 1)
    B = np.zeros((m, 1), dtype=complex)
    if m:
        B[0, 0] = 1.0
    c = np.zeros(m, dtype=complex)
    p = np.asarray(p, dtype=complex)
    k = min(m, p.size)
    if k:
        c[m - k:] = p[p.size - k:]
    return A, B, c.reshape(1, m)


def hankel_singular_values_ss(A, B, C) -> np.ndarray:
    """Hankel singular values of ``f_n = C A^{n-1} B`` from the two Gramians.

    Requires every eigenvalue of ``A`` inside the unit disk.
    """
    if A.shape[0] == 0:
        return np.zeros(1)
    Wc = sla.solve_discrete_lyapunov(A, B @ B.conj().T)
    Wo = sla.solve_discrete_lyapunov(A.conj().T, C.conj().T @ C)
    ev = np.linalg.eigvals(Wc @ Wo)
    return np.sort(np.sqrt(np.maximum(ev.real, 0.0)))[::-1]
