"""Hurst index estimators.

* :func:`estimate_known_g` inverts ``phi_{n,T}(x) = (T/n)^(2x) (4 - 2^(2x))``
  at the g-normalised mean squared second difference.
* :func:`estimate_localized` evaluates
  ``H_n(k) = 1/2 - ln(w1[k] / w2[k]) / (2 ln 2)`` at a data-driven window.

Standard errors plug the estimate itself into the asymptotic variance,
clipped to ``PLUGIN_RANGE`` where the variance series is defined.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np
from scipy.stats import norm

from .errors import DegeneratePathError, DomainError, InversionRangeError, NearZeroDiffusionError
from .paths import SamplePath
from .quadvar import GridDesign, WindowStats, select_index, second_diff, window_stats
from .variance import variance_constants

EPS0 = 1e-6
BISECTION_TOL = 1e-13
G_FLOOR = 1e-12
PLUGIN_RANGE = (0.501, 0.999)
LOCALIZED_IDS = {1: "hn_1", 2: "hn_2", 3: "hn_3", 4: "hn_4"}
LN2 = math.log(2.0)


@dataclass(frozen=True)
class HurstEstimate:
    h_hat: float
    estimator_id: str
    effective_n: int
    std_error: Optional[float] = None
    ci: Optional[tuple] = None
    confidence: Optional[float] = None
    selected_index: Optional[int] = None

    def as_dict(self) -> dict:
        out = asdict(self)
        if self.ci is not None:
            out["ci"] = list(self.ci)
        return out


def phi(n, horizon: float, x):
    if not n > horizon:
        raise DomainError(f"phi requires n > T (n={n}, T={horizon})")
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0.0) | (x >= 1.0)):
        raise DomainError("phi is defined for x in (0, 1)")
    out = (horizon / n) ** (2.0 * x) * (4.0 - 2.0 ** (2.0 * x))
    return float(out) if out.ndim == 0 else out


def phi_inverse(n, horizon: float, y: float) -> float:
    """Invert the strictly decreasing ``phi`` by bisection on ``[EPS0, 1 - EPS0]``."""
    lo_x, hi_x = EPS0, 1.0 - EPS0
    y_min, y_max = phi(n, horizon, hi_x), phi(n, horizon, lo_x)
    if not (y_min <= y <= y_max) or math.isnan(y):
        raise InversionRangeError(
            f"statistic {y!r} outside the invertible range [{y_min!r}, {y_max!r}]",
            interval=(y_min, y_max),
        )
    while hi_x - lo_x > BISECTION_TOL:
        mid = 0.5 * (lo_x + hi_x)
        if phi(n, horizon, mid) > y:
            lo_x = mid
        else:
            hi_x = mid
    return 0.5 * (lo_x + hi_x)


def _z(confidence):
    if not 0.0 < confidence < 1.0:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    return float(norm.ppf(0.5 + confidence / 2.0))


def _plugin(h):
    return min(max(h, PLUGIN_RANGE[0]), PLUGIN_RANGE[1])


def estimate_known_g(
    path: SamplePath,
    g: Callable[[float], float],
    confidence: Optional[float] = 0.95,
) -> HurstEstimate:
    """Estimator for a known diffusion coefficient ``g`` on the path's own grid."""
    n, horizon = path.m, path.horizon
    if not n > horizon:
        raise DomainError(f"known-g estimator requires n > T (n={n}, T={horizon})")
    if n < 3:
        raise DomainError(f"need at least 3 steps, got {n}")
    gvals = np.array([g(v) for v in path.values[1:-1].tolist()], dtype=float)
    if not np.all(np.abs(gvals) >= G_FLOOR):
        bad = int(np.argmax(~(np.abs(gvals) >= G_FLOOR))) + 1
        raise NearZeroDiffusionError(f"|g(X)| < {G_FLOOR} at grid index {bad}")
    ratio = second_diff(path.values) / gvals
    stat = float(np.dot(ratio, ratio)) / n
    h_hat = phi_inverse(n, horizon, stat)
    std_error = ci = None
    if confidence is not None:
        z = _z(confidence)
        sigma = math.sqrt(variance_constants(_plugin(h_hat)).sigma2)
        std_error = sigma / (2.0 * math.sqrt(n) * math.log(n / horizon))
        ci = (h_hat - z * std_error, h_hat + z * std_error)
    return HurstEstimate(h_hat, "known_g", n, std_error, ci, confidence)


def estimate_hn(stats: WindowStats, k: int) -> float:
    """Raw (unclamped) log-ratio estimate at window offset ``k``."""
    if not 1 <= k <= stats.w1.size:
        raise DomainError(f"window offset {k} outside 1..{stats.w1.size}")
    a, b = stats.w1[k - 1], stats.w2[k - 1]
    if not (a > 0.0 and b > 0.0):
        raise DegeneratePathError(f"window sums at offset {k} are not positive (w1={a}, w2={b})")
    return 0.5 - math.log(a / b) / (2.0 * LN2)


def estimate_from_stats(
    stats: WindowStats, method: int, confidence: Optional[float] = 0.95
) -> HurstEstimate:
    if method not in LOCALIZED_IDS:
        raise DomainError(f"selector method must be 1..4, got {method}")
    k = select_index(stats, method)
    h_hat = estimate_hn(stats, k)
    std_error = ci = None
    if confidence is not None:
        z = _z(confidence)
        sigma_h = math.sqrt(variance_constants(_plugin(h_hat)).sigma_H2)
        std_error = sigma_h / (2.0 * LN2 * math.sqrt(stats.k_n))
        ci = (h_hat - z * std_error, h_hat + z * std_error)
    return HurstEstimate(h_hat, LOCALIZED_IDS[method], stats.k_n, std_error, ci,
                         confidence, selected_index=k)


def estimate_localized(
    path: SamplePath,
    design: Optional[GridDesign] = None,
    method: int = 3,
    confidence: Optional[float] = 0.95,
) -> HurstEstimate:
    """Localised estimator; ``design`` defaults to ``k_n = n = sqrt(m)``."""
    if design is None:
        design = GridDesign.for_path_length(path.m)
    return estimate_from_stats(window_stats(path, design), method, confidence)
