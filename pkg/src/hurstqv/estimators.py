"""scikit-learn compatible wrapper around the path estimators.

Each row of ``X`` is one sample path observed on the uniform grid
``j * horizon / m``, ``j = 0..m`` (so ``X`` has ``m + 1`` columns).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import DomainError
from .estimate import estimate_known_g, estimate_localized
from .paths import SamplePath
from .quadvar import GridDesign
from .sde import get_process

METHODS = ("h1", "h2", "h3", "h4", "known_g")


class QVHurstEstimator(TransformerMixin, BaseEstimator):
    """Estimate the Hurst index of every path in ``X``.

    Parameters
    ----------
    method : {"h1", "h2", "h3", "h4", "known_g"}
        Window selector of the localised estimator, or the known-diffusion
        estimator.
    horizon : float
        Length ``T`` of the observation interval.
    n, beta, phi_mode, alpha
        Grid design of the localised estimators; ``n=None`` means
        ``n = k_n = sqrt(m)``.
    diffusion : callable or str, optional
        ``g`` for ``method="known_g"``; a string is looked up in the process
        registry.
    confidence : float or None
        Level of the reported confidence intervals.

    Attributes
    ----------
    hurst_ : ndarray of shape (n_paths,)
    std_error_ : ndarray of shape (n_paths,)
    estimates_ : list of HurstEstimate
    """

    def __init__(self, method="h3", horizon=1.0, n=None, beta=None,
                 phi_mode="const_one", alpha=1.0, diffusion=None, confidence=0.95):
        self.method = method
        self.horizon = horizon
        self.n = n
        self.beta = beta
        self.phi_mode = phi_mode
        self.alpha = alpha
        self.diffusion = diffusion
        self.confidence = confidence

    def _estimate_rows(self, X):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method!r}")
        m = X.shape[1] - 1
        if self.method == "known_g":
            g = self.diffusion
            if g is None:
                raise DomainError("method='known_g' needs a diffusion function")
            if isinstance(g, str):
                g = get_process(g).diffusion
            return [estimate_known_g(SamplePath(self.horizon, row), g, self.confidence)
                    for row in X]
        design = GridDesign.for_path_length(m, self.n, self.beta, self.phi_mode, self.alpha)
        selector = int(self.method[1])
        return [estimate_localized(SamplePath(self.horizon, row), design, selector,
                                   self.confidence) for row in X]

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_features=5)
        self.n_features_in_ = X.shape[1]
        self.estimates_ = self._estimate_rows(X)
        self.hurst_ = np.array([e.h_hat for e in self.estimates_])
        self.std_error_ = np.array(
            [np.nan if e.std_error is None else e.std_error for e in self.estimates_]
        )
        return self

    def transform(self, X):
        """Column vector of Hurst estimates, one per path."""
        check_is_fitted(self, "hurst_")
        X = check_array(X, ensure_min_features=5)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} grid points, estimator was fitted with {self.n_features_in_}"
            )
        return np.array([[e.h_hat] for e in self._estimate_rows(X)])
