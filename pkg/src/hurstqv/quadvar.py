"""Second-order quadratic variation statistics.

The localisation statistics live on the fine grid ``m_n = n * k_n``: for each
offset ``k = 1..n-1`` a window of ``2 k_n`` fine steps centred at grid index
``k * k_n`` is summarised by

* ``w1[k]``: sum of squared lag-1 second differences ending at
  ``c + j``, ``j = -k_n+2..k_n`` (``2 k_n - 1`` terms);
* ``w2[k]``: sum of squared lag-2 second differences ending at
  ``c + j``, ``j = -k_n+4, -k_n+6, ..., k_n`` (``k_n - 1`` terms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DegeneratePathError, DomainError, NumericError
from .paths import SamplePath

PHI_MODES = ("const_one", "log_power")
MIN_KN = 5


@dataclass(frozen=True)
class GridDesign:
    """Outer grid ``n``, window half-width ``k_n`` and fine grid ``m_n = n k_n``.

    ``k_n = floor(n^(2 beta) phi(n))`` when ``beta`` is given, otherwise
    ``floor(n phi(n))``, with ``phi = 1`` or ``phi(n) = ln(n)^alpha``.
    """

    n: int
    beta: Optional[float] = None
    phi_mode: str = "const_one"
    alpha: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"outer grid needs n >= 2, got {self.n}")
        if self.beta is not None and not 0.5 <= self.beta < 1.0:
            raise DomainError(f"beta must lie in [1/2, 1), got {self.beta}")
        if self.phi_mode not in PHI_MODES:
            raise DomainError(f"phi_mode must be one of {PHI_MODES}, got {self.phi_mode!r}")
        if self.phi_mode == "log_power" and not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.k_n < MIN_KN:
            raise DomainError(f"k_n={self.k_n} too small (need >= {MIN_KN})")

    @property
    def k_n(self) -> int:
        n = self.n
        if self.beta is None and self.phi_mode == "const_one":
            return n
        phi = 1.0 if self.phi_mode == "const_one" else math.log(n) ** self.alpha
        base = n if self.beta is None else n ** (2.0 * self.beta)
        # guard against 49.999999... from pow
        return int(math.floor(base * phi + 1e-9))

    @property
    def m_n(self) -> int:
        return self.n * self.k_n

    @classmethod
    def for_path_length(cls, m: int, n: Optional[int] = None, beta=None,
                        phi_mode="const_one", alpha=1.0) -> "GridDesign":
        """Design matching a path with ``m`` steps (default: ``n = sqrt(m)``)."""
        if n is None:
            if beta is not None or phi_mode != "const_one":
                raise DomainError("n must be given for non-default grid designs")
            n = math.isqrt(m)
        design = cls(n, beta=beta, phi_mode=phi_mode, alpha=alpha)
        if design.m_n != m:
            raise DomainError(
                f"path has m={m} steps but design n={n} needs m_n={design.m_n}"
            )
        return design


@dataclass(frozen=True)
class WindowStats:
    n: int
    k_n: int
    w1: np.ndarray
    w2: np.ndarray

    @property
    def w1_mean(self) -> float:
        return float(np.mean(self.w1))

    @property
    def w2_mean(self) -> float:
        return float(np.mean(self.w2))


def second_diff(values, lag: int = 1) -> np.ndarray:
    """``x[i] - 2 x[i-lag] + x[i-2 lag]`` for ``i = 2 lag .. len-1``."""
    x = np.asarray(values, dtype=float)
    if lag < 1:
        raise DomainError(f"lag must be positive, got {lag}")
    if x.ndim != 1 or x.size < 2 * lag + 1:
        raise DomainError(f"need at least {2 * lag + 1} values for lag {lag}")
    return x[2 * lag:] - 2.0 * x[lag:-lag] + x[: x.size - 2 * lag]


def v_tilde(path: SamplePath, hurst: float) -> float:
    """Normalised quadratic variation of second differences; mean (n-1)/n for fBm."""
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"hurst must lie in (0, 1), got {hurst}")
    n = path.m
    if n < 3:
        raise DomainError(f"need at least 3 steps, got {n}")
    d2 = second_diff(path.values) * path.horizon ** (-hurst)
    return float(n ** (2.0 * hurst - 1.0) / (4.0 - 2.0 ** (2.0 * hurst)) * np.dot(d2, d2))


def window_stats(path: SamplePath, design: GridDesign) -> WindowStats:
    if path.m != design.m_n:
        raise DomainError(f"path has m={path.m} steps, design needs m_n={design.m_n}")
    n, k = design.n, design.k_n
    x = path.values
    if not np.all(np.isfinite(x)):
        raise NumericError("path contains non-finite values")
    # d1[i] ends at grid index i + 2, d2[i] at grid index i + 4
    d1 = second_diff(x, 1)
    d2 = second_diff(x, 2)
    d1 *= d1
    d2 *= d2
    # window for offset k starts at fine index (k-1) k_n in both arrays
    w1 = sliding_window_view(d1, 2 * k - 1)[::k][: n - 1].sum(axis=1)
    w2 = sliding_window_view(d2, 2 * k - 3)[::k][: n - 1, ::2].sum(axis=1)
    return WindowStats(n=n, k_n=k, w1=w1, w2=w2)


def _selection_scores(stats: WindowStats, method: int) -> np.ndarray:
    w1, w2 = stats.w1, stats.w2
    if method == 1:
        return -w1
    m1, m2 = stats.w1_mean, stats.w2_mean
    if m1 == 0.0 or m2 == 0.0:
        raise DegeneratePathError("window averages vanish; path is locally affine")
    if method == 2:
        return np.abs(w1 / m1 - 1.0)
    if method == 3:
        return np.abs(w1 / m1 - 1.0) + np.abs(w2 / m2 - 1.0)
    if method == 4:
        return np.abs(m1 - w1) / m2 + np.abs(m2 - w2) / m1
    raise DomainError(f"selector method must be 1..4, got {method}")


def select_index(stats: WindowStats, method: int) -> int:
    """Window offset in ``1..n-1`` picked by selector ``method``; ties go to the smallest."""
    if stats.w1.size == 0:
        raise DomainError("empty window statistics")
    if np.isnan(stats.w1).any() or np.isnan(stats.w2).any():
        raise NumericError("NaN in window statistics")
    scores = _selection_scores(stats, method)
    if np.isnan(scores).any():
        raise NumericError("NaN selection score")
    return int(np.argmin(scores)) + 1
