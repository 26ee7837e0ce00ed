"""Asymptotic variance constants of the quadratic-variation statistics.

``sigma2`` is the limiting variance of ``sqrt(n) (V_n - 1)``, ``sigma_star2``
the limiting covariance of ``sqrt(n) V_n`` and ``sqrt(n) V_2n``, and
``sigma_H2 = 1.5 sigma2 - 2 sigma_star2`` the variance of the log-ratio
``sqrt(n) ln(V_2n / V_n)``.  ``V_n`` is the normalised quadratic variation
computed by :func:`hurstqv.quadvar.v_tilde`.

The lag series are written with the kernel ``rho_gamma(l) / gamma`` so that
``c1(H) (rho_gamma(l) / gamma)^2`` equals four times the squared correlation
of second-order fBm increments at lag ``l``; the lag-one cross term enters
as ``-2 sqrt(c2)`` because that correlation is negative for every H.  Both
conventions are checked against the exact finite-n covariances in the tests.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from ._numerics import fourth_difference
from .errors import DomainError, NumericError
from .fbm import EIGEN_MAX_N, eigen_moment_stats

DEFAULT_TRUNCATION = 100_000
MAX_TRUNCATION = 10_000_000
TAIL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class VarianceConstants:
    hurst: float
    sigma2: float
    sigma1_2: float
    sigma2_2: float
    sigma_star2: float
    sigma_H2: float
    truncation_L: int
    tail_bound: float

    def as_dict(self) -> dict:
        return asdict(self)


def rho(gamma: float, lag):
    """Normalised fourth difference of ``|l|^(2-gamma)``; even in ``lag``."""
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    denom = (gamma - 2.0) * (gamma - 1.0) * (gamma + 1.0)
    out = fourth_difference(2.0 - gamma, lag) / denom
    return float(out) if out.ndim == 0 else out


def c1(hurst: float) -> float:
    h2 = 2.0 * hurst
    return (h2 * (h2 - 1.0) * (h2 - 2.0) * (h2 - 3.0) / (4.0 - 2.0**h2)) ** 2


def c2(hurst: float) -> float:
    h2 = 2.0 * hurst
    return ((2.0 ** (h2 + 2.0) - 7.0 - 3.0**h2) / (4.0 - 2.0**h2)) ** 2


def _tail_bound(hurst: float, truncation: int) -> float:
    # |rho(l)| / gamma <= (l-2)^-(gamma+2), so the tail of the squared series is
    # bounded by the integral of x^-(2 gamma + 4) from L-3
    gamma = 2.0 - 2.0 * hurst
    expo = 2.0 * gamma + 3.0
    return c1(hurst) * (truncation - 3.0) ** (-expo) / expo


@lru_cache(maxsize=4096)
def variance_constants(hurst: float, truncation_L: int = DEFAULT_TRUNCATION) -> VarianceConstants:
    if not 0.5 < hurst < 1.0:
        raise DomainError(f"variance constants need hurst in (1/2, 1), got {hurst}")
    if truncation_L < 1000:
        raise DomainError(f"truncation_L must be >= 1000, got {truncation_L}")
    L = int(truncation_L)
    while _tail_bound(hurst, L) >= TAIL_TOLERANCE:
        L *= 2
        if L > MAX_TRUNCATION:
            raise NumericError(f"lag series for H={hurst} does not converge within {MAX_TRUNCATION} terms")
    gamma = 2.0 - 2.0 * hurst
    kernel = rho(gamma, np.arange(0, L + 1)) / gamma  # kernel[l], l = 0..L
    head = kernel[2:]
    s_sq = float(np.sum(head * head))
    s_lag1 = float(np.sum(head * kernel[1:-1]))
    s_lag2 = float(np.sum(head * kernel[:-2]))
    k1, k2 = c1(hurst), c2(hurst)
    sigma2 = 2.0 + k2 + k1 * s_sq
    sigma1_2 = k2 / 2.0 + k1 * s_lag2
    sigma2_2 = -2.0 * math.sqrt(k2) + k1 * s_lag1
    sigma_star2 = 2.0 ** (-2.0 * hurst) * (3.0 * sigma2 + sigma1_2 + 4.0 * sigma2_2)
    return VarianceConstants(
        hurst=float(hurst),
        sigma2=sigma2,
        sigma1_2=sigma1_2,
        sigma2_2=sigma2_2,
        sigma_star2=sigma_star2,
        sigma_H2=1.5 * sigma2 - 2.0 * sigma_star2,
        truncation_L=L,
        tail_bound=_tail_bound(hurst, L),
    )


def sigma_mc_oracle(hurst: float, n: int) -> float:
    """Exact ``n Var(V_n)`` for fBm from the eigenvalues of the increment covariance."""
    if n > EIGEN_MAX_N:
        raise DomainError(f"oracle supports n <= {EIGEN_MAX_N}, got {n}")
    _, sum_sq, _ = eigen_moment_stats(n, hurst)
    scale = n ** (2.0 * hurst - 1.0) / (4.0 - 2.0 ** (2.0 * hurst))
    return n * scale * scale * 2.0 * sum_sq


def sigma_mc_extrapolated(hurst: float, sizes=(1024, 2048, 4096)) -> float:
    """Two-level Richardson extrapolation of :func:`sigma_mc_oracle` over dyadic ``sizes``.

    Assumes ``oracle(n) = sigma2 + a/n + b/n^2 + ...``.
    """
    n0, n1, n2 = sizes
    if not (n1 == 2 * n0 and n2 == 2 * n1):
        raise DomainError("sizes must be three successive doublings")
    o0, o1, o2 = (sigma_mc_oracle(hurst, n) for n in sizes)
    r0 = 2.0 * o1 - o0
    r1 = 2.0 * o2 - o1
    return (4.0 * r1 - r0) / 3.0
