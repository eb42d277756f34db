"""Quantum pseudo-fractional Fourier transform pipeline.

State flow on layout ``{l: n+1, j: n, w: n}``::

    |l> sum_j f[j] |j> |0>  --U_alpha-->  |l> sum_{j,k} X(j, k) |j>|k>
                            --QFT on j--> |l> sum_{Q,k} Z(Q, k) |Q>|k>

with ``X(j, k) = f[j] exp(2i*pi*alpha*k*j/N) / sqrt(N)``. The QFT
contributes a second ``1/sqrt(N)``, so the ``Q = 0`` slice holds
``Z(0, k) = F_alpha[k] / N``. The pipeline therefore rescales by ``N``,
not ``sqrt(N)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import LengthError, NormError
from .numerics import Spectrum, as_signal, is_power_of_two
from .statevector import StateVector, apply_qft, prepare_signal
from .ualpha import AlphaIndex, apply_direct, decompose_l, synthesize, ualpha_layout

__all__ = ["QpfrftRun", "run_qpfrft", "xalpha_table", "apply_ualpha"]


@dataclass
class QpfrftRun:
    n: int
    alpha_index: AlphaIndex
    input: np.ndarray
    coefficients: Spectrum
    raw_slice: np.ndarray
    rescale: float
    # Kept for inspection: the state after U_alpha and the final state.
    pre_qft: StateVector
    state: StateVector

    @property
    def alpha(self) -> float:
        return self.alpha_index.alpha


def apply_ualpha(state: StateVector, a: AlphaIndex, use_circuit: bool = True, conjugate: bool = False) -> StateVector:
    if use_circuit:
        return synthesize(a, conjugate=conjugate, layout=state.layout).run(state)
    return apply_direct(state, a, conjugate=conjugate)


def run_qpfrft(f, l: int, n: int, use_circuit: bool = True) -> QpfrftRun:
    """Recover ``frft_direct(f, alpha)`` from the ``Q = 0`` amplitude slice.

    ``f`` need not be normalized: it is scaled to unit norm for state
    preparation and the norm is folded back into ``rescale``.
    """
    f = as_signal(f)
    if not is_power_of_two(f.size) or f.size != 1 << n:
        raise LengthError(f"signal length {f.size} does not match n={n} (need {1 << n})")
    norm = float(np.linalg.norm(f))
    if norm == 0.0:
        raise NormError("signal is identically zero")
    a = decompose_l(l, n)
    layout = ualpha_layout(n)
    state = prepare_signal(layout, "j", f / norm, {"l": l})
    pre = apply_ualpha(state, a, use_circuit)
    final = apply_qft(pre, "j")
    raw = final.blocks()[l, 0, :].copy()
    rescale = float(1 << n) * norm
    return QpfrftRun(
        n=n,
        alpha_index=a,
        input=f,
        coefficients=Spectrum(raw * rescale, a.alpha),
        raw_slice=raw,
        rescale=rescale,
        pre_qft=pre,
        state=final,
    )


def xalpha_table(f, a: AlphaIndex) -> np.ndarray:
    """``X[j, k] = f[j] exp(2i*pi*alpha*k*j/N) / sqrt(N)`` as an N x N array."""
    f = as_signal(f)
    big_n = 1 << a.n
    if f.size != big_n:
        raise LengthError(f"signal length {f.size} does not match n={a.n}")
    jk = np.outer(np.arange(big_n), np.arange(big_n))
    num = np.mod((a.l - big_n) * jk, big_n * big_n) / (big_n * big_n)
    return f[:, None] * np.exp(2j * np.pi * num) / np.sqrt(big_n)
