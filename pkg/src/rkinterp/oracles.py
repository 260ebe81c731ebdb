"""Ground-truth targets, seeded data generators and classical comparators.

Everything here is independent of the trained models: benchmarks compute
their reference values from these functions only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _backend
from .errors import DomainViolation, TooLarge

MAX_PERMANENT = 12
MASK64 = (1 << 64) - 1
EPS = np.finfo(float).eps


# --------------------------------------------------------------------------
# seeds and configs
# --------------------------------------------------------------------------

def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixer."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Per-trial seed: ``splitmix64(seed XOR splitmix64(index))``."""
    return splitmix64((int(seed) & MASK64) ^ splitmix64(int(index) & MASK64))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    sizes: dict = field(default_factory=dict)
    noise: float = 0.0
    output: Optional[str] = None

    def size(self, key, default):
        return self.sizes.get(key, default)


# --------------------------------------------------------------------------
# permanents and determinants
# --------------------------------------------------------------------------

def _square(matrix) -> np.ndarray:
    A = np.asarray(matrix, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def permanent(matrix, method: str = "leibniz") -> complex:
    """``sum over permutations s of prod_j a[j, s(j)]``.

    ``method`` is ``"leibniz"`` (direct sum over permutations) or
    ``"ryser"`` (inclusion-exclusion); the two are independent routes to the
    same number.
    """
    A = _square(matrix)
    if A.shape[0] > MAX_PERMANENT:
        raise TooLarge(f"permanent limited to n <= {MAX_PERMANENT}, got {A.shape[0]}")
    if method == "leibniz":
        return _backend.perm_leibniz(A)
    if method == "ryser":
        return _backend.perm_ryser(A)
    raise ValueError(f"unknown method {method!r}")


def determinant(matrix, method: Optional[str] = None) -> complex:
    """Determinant by the signed Leibniz sum (``n <= 12``) or LU factorization."""
    A = _square(matrix)
    if method is None:
        method = "leibniz" if A.shape[0] <= 8 else "lu"
    if method == "leibniz":
        if A.shape[0] > MAX_PERMANENT:
            raise TooLarge(f"Leibniz determinant limited to n <= {MAX_PERMANENT}")
        return _backend.det_leibniz(A)
    if method == "lu":
        return complex(np.linalg.det(A))
    raise ValueError(f"unknown method {method!r}")


# --------------------------------------------------------------------------
# scalar targets
# --------------------------------------------------------------------------

def _elliptic_e_scalar(k: float) -> float:
    if not 0 <= k <= 1:
        raise DomainViolation(f"modulus {k!r} outside [0, 1]")
    if k == 1:
        return 1.0
    a, b, c = 1.0, math.sqrt((1 - k) * (1 + k)), k
    total, weight = 0.5 * c * c, 0.5
    # quadratic convergence; the cap guards against a one-ulp stall of a - b
    for _ in range(64):
        if abs(c) <= 4 * EPS * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        weight *= 2
        total += weight * c * c
    return math.pi / (2 * a) * (1 - total)


def elliptic_e(k):
    """Complete elliptic integral of the second kind, modulus convention.

    ``E(k) = int_0^{pi/2} sqrt(1 - k^2 sin^2 t) dt`` by the arithmetic-geometric
    mean; accepts scalars or arrays with ``0 <= k <= 1``.
    """
    arr = np.asarray(k, dtype=float)
    if arr.ndim == 0:
        return _elliptic_e_scalar(float(arr))
    flat = arr.ravel()
    bad = np.nonzero(~((flat >= 0) & (flat <= 1)))[0]
    if bad.size:
        raise DomainViolation(f"modulus {flat[bad[0]]!r} outside [0, 1]", index=int(bad[0]))
    return np.array([_elliptic_e_scalar(float(v)) for v in flat]).reshape(arr.shape)


def mollifier(t):
    """``exp(-1/t)`` for ``t > 0`` and 0 otherwise (underflow-safe below 1e-300)."""
    t = np.asarray(t, dtype=float)
    pos = t > 1e-300
    out = np.zeros_like(t)
    out[pos] = np.exp(-1.0 / t[pos])
    return out if out.ndim else float(out)


def homotopy_phi(x):
    """Smooth, non-analytic step from 0 (``x <= 1/3``) to 1 (``x >= 2/3``)."""
    x = np.asarray(x, dtype=float)
    a = mollifier(x - 1 / 3)
    b = mollifier(2 / 3 - x)
    out = np.asarray(a / (a + b))
    return out if out.ndim else float(out)


def chirp(x):
    """``sin(10 x + 7 cos(2 pi x))``."""
    out = np.sin(10 * np.asarray(x, dtype=float) + 7 * np.cos(2 * np.pi * np.asarray(x, dtype=float)))
    return out if np.ndim(out) else float(out)


# --------------------------------------------------------------------------
# random data
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GUESample:
    """Scaled Hermitian matrices ``scales[i] * H_i``; ``raw[i]`` is ``H_i``."""

    matrices: np.ndarray
    scales: np.ndarray
    raw: np.ndarray

    def flattened(self) -> np.ndarray:
        """``n^2 x count`` matrix of row-major flattened inputs."""
        return self.matrices.reshape(self.matrices.shape[0], -1).T


def sample_gue(count: int, seed: int, scale: float = 0.25, n: int = 3,
               max_norm: float = 0.9) -> GUESample:
    """Hermitian ``(A + A*)/2`` with standard complex Gaussian ``A``, rescaled.

    Each matrix is multiplied by ``min(scale, max_norm / ||H||_F)`` so its
    flattened entries have Euclidean norm at most ``max_norm``; the factors
    are returned so reference values can be rescaled (``perm(cH) = c^n perm(H)``).
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    rng = np.random.default_rng(seed)
    A = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / math.sqrt(2)
    H = 0.5 * (A + np.conj(np.swapaxes(A, 1, 2)))
    fro = np.linalg.norm(H.reshape(count, -1), axis=1)
    with np.errstate(divide="ignore"):
        c = np.minimum(scale, np.where(fro > 0, max_norm / fro, np.inf))
    return GUESample(H * c[:, None, None], c, H)


def james_stein(obs, positive_part: bool = False) -> np.ndarray:
    """James-Stein shrinkage ``(1 - (d-2)/||x||^2) x`` toward the origin."""
    x = np.asarray(obs, dtype=float).ravel()
    d = x.size
    if d < 3:
        raise DomainViolation(f"James-Stein needs d >= 3, got {d}")
    nrm2 = float(x @ x)
    if nrm2 == 0:
        raise DomainViolation("observation is the zero vector")
    f = 1 - (d - 2) / nrm2
    if positive_part:
        f = max(f, 0.0)
    return f * x


def random_walk_means(N: int, d: int, seed: int) -> tuple:
    """Gaussian random walk of means with one unit-variance observation each.

    Step ``j`` (``j = 1..N``) has standard deviation ``1.05**j``.

    Returns
    -------
    means, observations : ndarray, shape (N, d)
    """
    if N < 1 or d < 1:
        raise ValueError("need N >= 1 and d >= 1")
    rng = np.random.default_rng(seed)
    std = 1.05 ** np.arange(1, N + 1)
    steps = rng.standard_normal((N, d)) * std[:, None]
    means = np.cumsum(steps, axis=0)
    obs = means + rng.standard_normal((N, d))
    return means, obs


@dataclass(frozen=True, eq=False)
class SampleTable:
    points: np.ndarray
    values: np.ndarray
    clean: np.ndarray
    noise_std: float
    seed: int

    def rows(self):
        for j in range(self.values.size):
            yield (*self.points[:, j], self.values[j], self.noise_std, self.seed)


def surface_xy2(points=None, noise_std: float = 0.1, seed: int = 0, count: int = 100,
                low: float = -1.0, high: float = 1.0) -> SampleTable:
    """Samples of ``x y^2`` plus seeded ``N(0, noise_std^2)`` noise.

    When ``points`` is omitted, ``count`` points are drawn uniformly from the
    square ``[low, high]^2`` with the same seed.
    """
    rng = np.random.default_rng(seed)
    if points is None:
        P = rng.uniform(low, high, (2, count))
    else:
        P = np.asarray(points, dtype=float)
        if P.ndim == 1:
            P = P.reshape(2, 1)
        if P.shape[0] != 2:
            P = P.T
    clean = P[0] * P[1] ** 2
    noise = rng.normal(0.0, noise_std, clean.size) if noise_std > 0 else np.zeros(clean.size)
    return SampleTable(P, clean + noise, clean, float(noise_std), int(seed))
