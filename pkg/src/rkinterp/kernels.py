"""Kernel catalog: closed forms, power series, Krein splitting and gap filling.

Every kernel except ``sobolev_K`` has the dot-product form

    K(x, y) = f(y* x),   f(w) = sum_j a_j w^j,

where ``y* x`` is the Hermitian pairing (conjugate-linear in ``y``).  The
sign pattern of the coefficients ``a_j`` decides whether the kernel is
positive (an RKHS kernel) or indefinite (a Krein kernel).

Point sets are passed around as ``d x n`` arrays whose *columns* are the
points.  A 1-D array of length ``n`` is read as ``n`` scalar points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainViolation,
    DuplicatePoints,
    InvalidFill,
    UnsupportedId,
)

KERNEL_IDS = (
    "omega",
    "segal_bargmann",
    "tanh",
    "softplus",
    "tan_assoc",
    "softplus_assoc",
    "sobolev_K",
    "custom_series",
)

SERIES_IDS = ("omega", "segal_bargmann", "tanh", "softplus", "tan_assoc", "softplus_assoc")

# Radius (in the pairing variable w = y*x) of the disk where the series converges.
_RADII = {
    "omega": 1.0,
    "segal_bargmann": math.inf,
    "tanh": math.pi / 2,
    "tan_assoc": math.pi / 2,
    "softplus": math.pi,
    "softplus_assoc": math.pi,
    "sobolev_K": math.inf,
    "custom_series": math.inf,
}

_ASSOCIATED = {"tanh": "tan_assoc", "softplus": "softplus_assoc"}

DEFAULT_SERIES_LENGTH = 32
PSD_RTOL = 1e-10


@dataclass(frozen=True)
class KernelSpec:
    """Identity of a kernel.

    Parameters
    ----------
    id : str
        One of :data:`KERNEL_IDS`.
    coeffs : tuple of float
        Power-series coefficients ``a_0 ... a_M`` in the pairing variable.
        Empty for closed-form ids that were built without a series.
    radius : float
        Evaluation is valid while ``|y* x| < radius``.
    fill_value : float, optional
        Value used when the coefficients were produced by :func:`fill_gaps`.
    """

    id: str
    coeffs: tuple = ()
    radius: float = math.inf
    fill_value: Optional[float] = None

    def __post_init__(self):
        if self.id not in KERNEL_IDS:
            raise UnsupportedId(f"unknown kernel id {self.id!r}")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def is_positive(self) -> bool:
        """True when the kernel is positive semidefinite (a genuine RKHS kernel)."""
        if self.id in ("tanh", "softplus"):
            return False
        if self.id == "custom_series":
            return all(c >= 0 for c in self.coeffs)
        return True


def make_spec(kernel_id: str, count: Optional[int] = None, radius: Optional[float] = None) -> KernelSpec:
    """Build a :class:`KernelSpec` with the catalog radius.

    ``count`` attaches that many exact series coefficients (ignored for
    ``sobolev_K``).
    """
    if kernel_id not in KERNEL_IDS:
        raise UnsupportedId(f"unknown kernel id {kernel_id!r}")
    coeffs = ()
    if count is not None and kernel_id in SERIES_IDS:
        coeffs = tuple(series_coefficients(kernel_id, count))
    return KernelSpec(kernel_id, coeffs, _RADII[kernel_id] if radius is None else radius)


def custom_series(coeffs: Sequence[float], radius: float = math.inf) -> KernelSpec:
    return KernelSpec("custom_series", tuple(coeffs), radius)


# --------------------------------------------------------------------------
# exact power series
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_numbers(n: int) -> tuple:
    """Bernoulli numbers B_0..B_n as exact fractions (Akiyama-Tanigawa)."""
    a = [Fraction(0)] * (n + 1)
    out = []
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    # the recurrence yields B_1 = +1/2; only even indices are used here
    return tuple(out)


@lru_cache(maxsize=None)
def _tanh_fractions(count: int) -> tuple:
    coeffs = [Fraction(0)] * count
    n_max = count // 2 + 1
    bern = _bernoulli_numbers(2 * n_max)
    for n in range(1, n_max + 1):
        deg = 2 * n - 1
        if deg >= count:
            break
        four_n = 4 ** n
        coeffs[deg] = four_n * (four_n - 1) * bern[2 * n] / math.factorial(2 * n)
    return tuple(coeffs)


@lru_cache(maxsize=None)
def _softplus_fractions(count: int) -> tuple:
    # softplus' = 1/2 + tanh(z/2)/2, integrated term by term
    t = _tanh_fractions(max(count, 2))
    coeffs = [Fraction(0)] * count
    if count > 1:
        coeffs[1] = Fraction(1, 2)
    for k, tk in enumerate(t):
        if tk and k + 1 < count:
            coeffs[k + 1] += tk / (2 ** (k + 1) * (k + 1))
    return tuple(coeffs)


def series_coefficients(kernel_id: str, count: int) -> list:
    """First ``count`` Taylor coefficients of the kernel's activation.

    >>> series_coefficients("omega", 4)
    [1.0, 1.0, 1.0, 1.0]
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if kernel_id == "omega":
        return [1.0] * count
    if kernel_id == "segal_bargmann":
        return [1.0 / math.factorial(j) for j in range(count)]
    if kernel_id in ("tanh", "tan_assoc"):
        out = [float(c) for c in _tanh_fractions(count)]
    elif kernel_id in ("softplus", "softplus_assoc"):
        out = [float(c) for c in _softplus_fractions(count)]
        out[0] = math.log(2.0)
    else:
        raise UnsupportedId(f"{kernel_id!r} has no power series in y*x")
    if kernel_id.endswith("_assoc"):
        out = [abs(c) for c in out]
    return out


def resolved_coeffs(spec: KernelSpec, count: int = DEFAULT_SERIES_LENGTH) -> tuple:
    """Coefficients stored on a kernel spec, generating the catalog series if none are stored."""
    if spec.id == "sobolev_K":
        raise UnsupportedId("sobolev_K is not a power series in y*x")
    if spec.coeffs:
        return spec.coeffs
    if spec.id == "custom_series":
        return ()
    return tuple(series_coefficients(spec.id, count))


def series_length(spec: KernelSpec, abs_w: float, tol: float = 1e-14) -> int:
    """Number of series terms whose geometric tail bound at ``|w| = abs_w`` is below ``tol``."""
    if spec.id == "custom_series":
        return max(len(spec.coeffs), 1)
    if spec.id == "sobolev_K":
        raise UnsupportedId("sobolev_K is not a power series in y*x")
    if math.isinf(spec.radius):
        # entire series: bound the tail by its first term once terms shrink by 1/2
        n = 1
        term = 1.0
        while True:
            term = abs_w ** n / math.factorial(n) if n < 170 else 0.0
            if n + 1 > 2 * abs_w and term * 2 < tol:
                return n + 1
            n += 1
    q = abs_w / spec.radius
    if q >= 1:
        raise DomainViolation(f"|w| = {abs_w} is outside the series radius {spec.radius}")
    probe = series_coefficients(spec.id, 64)
    scale = max(abs(a) * spec.radius ** j for j, a in enumerate(probe))
    if q == 0:
        return 1
    n = math.log(tol * (1 - q) / scale) / math.log(q)
    return max(int(math.ceil(n)), 1)


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

def as_points(points) -> np.ndarray:
    """Coerce to a complex ``d x n`` array of column points."""
    arr = np.asarray(points)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    elif arr.ndim != 2:
        raise DimensionMismatch("points must be a d x n array")
    return arr.astype(complex)


def pairing(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Matrix of Hermitian pairings ``W[i, j] = Y[:, j]* X[:, i]``."""
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"dimension {X.shape[0]} vs {Y.shape[0]}")
    return X.T @ Y.conj()


def _series_closed_form(kernel_id: str, w):
    if kernel_id == "omega":
        return 1.0 / (1.0 - w)
    if kernel_id == "segal_bargmann":
        return np.exp(w)
    if kernel_id == "tanh":
        return np.tanh(w)
    if kernel_id == "tan_assoc":
        return np.tan(w)
    if kernel_id == "softplus":
        return np.log(1.0 + np.exp(w))
    if kernel_id == "softplus_assoc":
        return -np.log(1.0 + np.exp(1j * w)) + math.log(4.0) + 0.5 * (1 + 1j) * w
    raise UnsupportedId(kernel_id)


def activation(spec: KernelSpec, w):
    """Apply the kernel's scalar activation to pairing values ``w`` (no domain check)."""
    w = np.asarray(w, dtype=complex)
    if spec.id == "custom_series":
        # Horner; polyval wants the highest degree first
        return np.polyval(np.asarray(spec.coeffs[::-1], dtype=complex), w) if spec.coeffs else np.zeros_like(w)
    if spec.id == "sobolev_K":
        raise UnsupportedId("sobolev_K is not a function of y*x alone")
    return _series_closed_form(spec.id, w)


def _check_unit_cube(X: np.ndarray, what: str):
    if np.any(np.abs(X.imag) > 0):
        raise DomainViolation(f"{what}: sobolev_K needs real points in [0, 1]^d")
    bad = np.nonzero(np.any((X.real < 0) | (X.real > 1), axis=0))[0]
    if bad.size:
        raise DomainViolation(
            f"{what} column {bad[0]} leaves [0, 1]^d", index=int(bad[0])
        )


def kernel_matrix(spec: KernelSpec, X, Y) -> np.ndarray:
    """``M[i, j] = K(X[:, i], Y[:, j])`` with domain checking."""
    X = as_points(X)
    Y = as_points(Y)
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"dimension {X.shape[0]} vs {Y.shape[0]}")
    if spec.id == "sobolev_K":
        _check_unit_cube(X, "x")
        _check_unit_cube(Y, "y")
        Xr, Yr = X.real, Y.real
        sx, sy = Xr.sum(axis=0), Yr.sum(axis=0)
        return (np.minimum.outer(sx, sy) - Xr.T @ Yr).astype(complex)
    W = pairing(X, Y)
    if not math.isinf(spec.radius):
        bad = np.argwhere(np.abs(W) >= spec.radius)
        if bad.size:
            i, j = bad[0]
            raise DomainViolation(
                f"|y*x| = {abs(W[i, j]):.6g} >= radius {spec.radius:.6g} "
                f"(x column {i}, y column {j})",
                index=int(i),
            )
    return activation(spec, W)


def eval_kernel(spec: KernelSpec, x, y) -> complex:
    """Evaluate ``K(x, y)`` for two points of equal dimension."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    y = np.atleast_1d(np.asarray(y, dtype=complex))
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionMismatch(f"shapes {x.shape} and {y.shape}")
    return complex(kernel_matrix(spec, x[:, None], y[:, None])[0, 0])


# --------------------------------------------------------------------------
# transforms
# --------------------------------------------------------------------------

def associated_hilbert(spec: KernelSpec) -> KernelSpec:
    """Replace every coefficient by its absolute value.

    ``tanh`` maps to ``tan_assoc`` and ``softplus`` to ``softplus_assoc``, whose
    closed forms reproduce the absolute-value series.  Positive specs are
    returned unchanged.
    """
    if spec.id == "sobolev_K":
        raise UnsupportedId("sobolev_K has no coefficient sequence")
    if spec.is_positive:
        return spec
    coeffs = tuple(abs(c) for c in resolved_coeffs(spec))
    new_id = _ASSOCIATED.get(spec.id, "custom_series")
    return KernelSpec(new_id, coeffs, spec.radius, spec.fill_value)


def fill_gaps(spec: KernelSpec, fill_value: float = 1.0, max_degree: Optional[int] = None) -> KernelSpec:
    """Replace zero coefficients up to ``max_degree`` by ``fill_value``.

    The result is a ``custom_series`` spec; since the filled terms form a
    geometric tail, its radius is capped at 1.
    """
    if spec.id == "sobolev_K":
        raise UnsupportedId("sobolev_K has no coefficient sequence")
    if not fill_value > 0:
        raise InvalidFill(f"fill_value must be positive, got {fill_value}")
    coeffs = list(resolved_coeffs(spec))
    if max_degree is None:
        max_degree = len(coeffs) - 1
    if len(coeffs) < max_degree + 1:
        coeffs.extend([0.0] * (max_degree + 1 - len(coeffs)))
    changed = False
    for j in range(max_degree + 1):
        if coeffs[j] == 0.0:
            coeffs[j] = float(fill_value)
            changed = True
    if not changed:
        return spec
    return KernelSpec("custom_series", tuple(coeffs), min(spec.radius, 1.0), float(fill_value))


@dataclass(frozen=True)
class KreinSplit:
    """Positive and negative parts of a Krein kernel, ``K = plus - minus``."""

    plus: KernelSpec
    minus: KernelSpec = field(default_factory=lambda: KernelSpec("custom_series"))

    def recombine(self) -> tuple:
        p, m = resolved_coeffs(self.plus), self.minus.coeffs
        n = max(len(p), len(m))
        p = tuple(p) + (0.0,) * (n - len(p))
        m = tuple(m) + (0.0,) * (n - len(m))
        return tuple(a - b for a, b in zip(p, m))


def krein_split(spec: KernelSpec) -> KreinSplit:
    """Split the coefficients by sign into two nonnegative sequences."""
    coeffs = resolved_coeffs(spec)
    if all(c >= 0 for c in coeffs):
        return KreinSplit(replace(spec, coeffs=coeffs), KernelSpec("custom_series", (), spec.radius))
    plus = tuple(c if c > 0 else 0.0 for c in coeffs)
    minus = tuple(-c if c < 0 else 0.0 for c in coeffs)
    return KreinSplit(
        KernelSpec("custom_series", plus, spec.radius),
        KernelSpec("custom_series", minus, spec.radius),
    )


# --------------------------------------------------------------------------
# PSD checks and membership
# --------------------------------------------------------------------------

def psd_check(matrix: np.ndarray, rtol: float = PSD_RTOL) -> tuple:
    """Return ``(is_psd, min_eigenvalue)`` for a Hermitian matrix.

    The matrix counts as PSD when its smallest eigenvalue is at least
    ``-rtol * |trace|``.
    """
    M = np.asarray(matrix, dtype=complex)
    M = 0.5 * (M + M.conj().T)
    if M.size == 0:
        return True, 0.0
    lam = float(np.linalg.eigvalsh(M)[0])
    tr = abs(float(np.trace(M).real))
    return lam >= -rtol * tr, lam


def check_distinct(X: np.ndarray, what: str = "points"):
    n = X.shape[1]
    if n < 2:
        return
    order = np.lexsort(np.vstack([X.imag, X.real])[::-1])
    Xs = X[:, order]
    same = np.all(Xs[:, 1:] == Xs[:, :-1], axis=0)
    if np.any(same):
        k = int(np.nonzero(same)[0][0])
        i, j = sorted((int(order[k]), int(order[k + 1])))
        raise DuplicatePoints(f"{what} {i} and {j} coincide", indices=(i, j))


def membership_certificate(spec: KernelSpec, sample_points, sample_values, c: float) -> tuple:
    """Finite-sample test of ``c^2 K(x, y) - f(x) conj(f(y)) >= 0``.

    Passing is necessary for ``f`` to belong to the RKHS with norm at most
    ``c``.  Returns ``(passes, min_eigenvalue)``.
    """
    X = as_points(sample_points)
    v = np.asarray(sample_values, dtype=complex).ravel()
    if v.size != X.shape[1]:
        raise DimensionMismatch("one value per sample point is required")
    check_distinct(X)
    G = kernel_matrix(spec, X, X)
    M = c * c * G - np.outer(v, v.conj())
    return psd_check(M)
