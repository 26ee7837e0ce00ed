"""Fractional Gaussian noise / fractional Brownian motion synthesis.

Random numbers: every call builds a fresh ``numpy.random.Philox`` bit
generator from ``seed`` (keyed through ``SeedSequence``), draws raw 64-bit
words, keeps the top 53 bits ``k`` and maps them to ``u = (k + 0.5) / 2**53``.
Standard normals are ``ndtri(u)`` (inverse-transform sampling).  The stream is
therefore fixed by the seed alone and does not depend on numpy's
``Generator`` normal algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import ndtri

from ._numerics import fourth_difference
from .errors import DomainError, FactorizationError, SynthesisError
from .paths import SamplePath

CHOLESKY_MAX_N = 2048
EIGEN_MAX_N = 4096
_NEG_EIG_RTOL = 1e-10


@dataclass(frozen=True)
class FgnSample:
    """``n`` unit-variance fGn increments at unit spacing."""

    hurst: float
    values: np.ndarray
    spacing: float = 1.0

    @property
    def n(self) -> int:
        return self.values.size


def _check_hurst(hurst):
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"hurst must lie in (0, 1), got {hurst}")


def standard_normals(seed: int, size: int) -> np.ndarray:
    """Deterministic standard normal draws for ``seed`` (see module docstring)."""
    if seed < 0 or seed >= 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    bits = np.random.Philox(int(seed)).random_raw(size)
    u = ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u)


def fgn_autocovariance(k, hurst: float):
    """gamma(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H) / 2 for unit-variance fGn."""
    _check_hurst(hurst)
    k = np.abs(np.asarray(k, dtype=float))
    two_h = 2.0 * hurst
    out = 0.5 * ((k + 1.0) ** two_h - 2.0 * k**two_h + np.abs(k - 1.0) ** two_h)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def _circulant_sqrt_eigenvalues(n: int, hurst: float) -> np.ndarray:
    # first row of the 2(n-1) circulant: gamma(0..n-1), gamma(n-2..1)
    gamma = fgn_autocovariance(np.arange(n), hurst)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eig = np.fft.fft(row).real
    lam_max = eig.max()
    if eig.min() < -_NEG_EIG_RTOL * lam_max:
        raise SynthesisError(
            f"circulant embedding not nonnegative for H={hurst}, n={n} "
            f"(min eigenvalue {eig.min():.3e})"
        )
    eig = np.clip(eig, 0.0, None)
    root = np.sqrt(eig / row.size)
    root.flags.writeable = False
    return root


def generate_fgn(n: int, hurst: float, seed: int) -> FgnSample:
    """Exact fGn sample of length ``n`` by circulant embedding (Wood-Chan).

    The covariance is embedded in a circulant of size ``2(n-1)``, diagonalised
    with the FFT; the real part of the transformed complex Gaussian vector
    has exactly the target covariance on its first ``n`` entries.
    """
    if n < 2:
        raise DomainError(f"need n >= 2 increments, got {n}")
    _check_hurst(hurst)
    root = _circulant_sqrt_eigenvalues(int(n), float(hurst))
    size = root.size
    z = standard_normals(seed, 2 * size)
    w = root * (z[:size] + 1j * z[size:])
    values = np.fft.fft(w).real[:n]
    return FgnSample(hurst=hurst, values=values)


def cholesky_fgn_oracle(n: int, hurst: float, seed: int) -> FgnSample:
    """Reference fGn sample via dense Cholesky factorisation (O(n^3))."""
    if n < 1 or n > CHOLESKY_MAX_N:
        raise DomainError(f"cholesky oracle supports 1 <= n <= {CHOLESKY_MAX_N}, got {n}")
    _check_hurst(hurst)
    cov = toeplitz(fgn_autocovariance(np.arange(n), hurst))
    try:
        lower = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(f"fGn covariance not positive definite: {exc}") from None
    return FgnSample(hurst=hurst, values=lower @ standard_normals(seed, n))


def fbm_path(m: int, horizon: float, hurst: float, seed: int) -> SamplePath:
    """fBm on ``j * horizon / m``, ``j = 0..m``, started at zero."""
    if m < 4:
        raise DomainError(f"need m >= 4 steps, got {m}")
    if not horizon > 0:
        raise DomainError(f"horizon must be positive, got {horizon}")
    fgn = generate_fgn(m, hurst, seed).values
    values = np.empty(m + 1)
    values[0] = 0.0
    np.cumsum(fgn, out=values[1:])
    values[1:] *= (horizon / m) ** hurst
    return SamplePath(horizon, values)


def _second_increment_lag_cov(lag, hurst):
    # covariance of second differences of unit-spaced fBm at separation ``lag``
    return -0.5 * fourth_difference(2.0 * hurst, lag)


def second_increment_cov(i: int, j: int, n: int, hurst: float) -> float:
    """Cov of the second differences of fBm ending at ``i/n`` and ``j/n``."""
    _check_hurst(hurst)
    if not (2 <= i <= n and 2 <= j <= n):
        raise DomainError(f"indices must satisfy 2 <= i, j <= n={n}; got i={i}, j={j}")
    return float(_second_increment_lag_cov(i - j, hurst)) * float(n) ** (-2.0 * hurst)


def second_increment_cov_matrix(n: int, hurst: float) -> np.ndarray:
    """(n-1) x (n-1) covariance matrix of the second differences on ``{i/n}``."""
    _check_hurst(hurst)
    if n < 3:
        raise DomainError(f"need n >= 3, got {n}")
    first = _second_increment_lag_cov(np.arange(n - 1), hurst) * float(n) ** (-2.0 * hurst)
    return toeplitz(first)


@lru_cache(maxsize=128)
def eigen_moment_stats(n: int, hurst: float) -> tuple[float, float, float]:
    """Return (sum of eigenvalues, sum of squared eigenvalues, max eigenvalue).

    Dense symmetric eigen-solve; results are memoised per ``(n, hurst)``
    because the ``n = 4096`` case takes several seconds.
    """
    if n > EIGEN_MAX_N:
        raise DomainError(f"eigen_moment_stats supports n <= {EIGEN_MAX_N}, got {n}")
    lam = np.linalg.eigvalsh(second_increment_cov_matrix(n, hurst))
    return float(lam.sum()), float(np.sum(lam * lam)), float(lam.max())
