"""scikit-learn compatible transformers over batches of complex signals.

Rows of ``X`` are signals. ``check_array`` rejects complex input, so the
validation here is local but follows the same rules (2-D, finite,
consistent width between ``fit`` and ``transform``).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import LengthError, ParameterError
from .numerics import frft_chirp, frft_direct, is_power_of_two
from .transform import run_qpfrft
from .ualpha import alpha_to_l, decompose_l


def check_signals(X, *, name: str = "X") -> np.ndarray:
    arr = np.asarray(X)
    if arr.ndim == 1:
        raise ValueError(f"{name} must be 2-D (n_samples, n_points); reshape a single signal with X[None, :]")
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    arr = arr.astype(np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


class _SignalTransformer(TransformerMixin, BaseEstimator):
    def _check_width(self, X):
        X = check_signals(X)
        if X.shape[1] != self.n_features_in_:
            raise LengthError(f"X has {X.shape[1]} points per signal, fitted with {self.n_features_in_}")
        return X


class FractionalFourierTransform(_SignalTransformer):
    """Classical FrFT of each row, by direct sum or chirp convolution."""

    def __init__(self, alpha: float = 1.0, method: str = "chirp"):
        self.alpha = alpha
        self.method = method

    def fit(self, X, y=None):
        if self.method not in ("direct", "chirp"):
            raise ParameterError(f"method must be 'direct' or 'chirp', got {self.method!r}")
        self.n_features_in_ = check_signals(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = self._check_width(X)
        fn = frft_direct if self.method == "direct" else frft_chirp
        return np.stack([fn(row, self.alpha).values for row in X])


class QuantumPseudoFrFT(_SignalTransformer):
    """FrFT coefficients recovered from a simulated QPFrFT run per row.

    Give either ``l`` or ``alpha``; ``alpha`` must lie on the ``2**-n`` grid
    of the fitted width ``N = 2**n``.
    """

    def __init__(self, alpha: float | None = None, l: int | None = None, use_circuit: bool = True):
        self.alpha = alpha
        self.l = l
        self.use_circuit = use_circuit

    def fit(self, X, y=None):
        X = check_signals(X)
        if not is_power_of_two(X.shape[1]) or X.shape[1] < 2:
            raise LengthError(f"signal length must be a power of two >= 2, got {X.shape[1]}")
        n = X.shape[1].bit_length() - 1
        if (self.alpha is None) == (self.l is None):
            raise ParameterError("set exactly one of 'alpha' or 'l'")
        self.l_ = decompose_l(self.l, n).l if self.l is not None else alpha_to_l(self.alpha, n)
        self.n_ = n
        self.alpha_ = decompose_l(self.l_, n).alpha
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "l_")
        X = self._check_width(X)
        return np.stack([run_qpfrft(row, self.l_, self.n_, self.use_circuit).coefficients.values for row in X])
