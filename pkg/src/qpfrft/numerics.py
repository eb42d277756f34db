"""Classical complex-signal arithmetic and the two classical FrFT routes.

Everything here uses the *unnormalized* transform convention::

    F_alpha[k] = sum_j f[j] * exp(2j*pi * alpha * k*j / N)

The quantum modules own every sqrt(N) factor; nothing in this module
rescales.

Chirp route sign derivation
---------------------------
Write ``c(x) = exp(+i*pi*alpha*x**2 / N)``. Since
``2*k*j = k**2 + j**2 - (k - j)**2``,

    exp(2i*pi*alpha*k*j/N) = c(k) * c(j) * conj(c(k - j))

so ``F_alpha = c * ((f * c) conv conj(c))``. Using the chirp
``s(x) = exp(-i*pi*alpha*x**2 / N)`` as the outer factors instead
produces ``F_{-alpha}``, which is why :func:`frft_chirp` multiplies by
``conj(s)`` and convolves with ``s``. The direct oracle confirms the sign
on every run of the test suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import LengthError

__all__ = [
    "Spectrum",
    "as_signal",
    "is_power_of_two",
    "fft_pow2",
    "dft_direct",
    "frft_direct",
    "frft_chirp",
    "load_signal",
    "parse_signal",
    "signal_to_json",
    "to_pairs",
]

# Rows of the direct-sum kernel materialised per block; bounds memory at
# roughly 16 * _ROW_BLOCK * N bytes.
_ROW_BLOCK = 256


@dataclass(frozen=True)
class Spectrum:
    """FrFT output: coefficient array plus the order that produced it."""

    values: np.ndarray
    alpha: float

    def __len__(self) -> int:
        return len(self.values)


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def as_signal(values, *, name: str = "signal") -> np.ndarray:
    """Validate and coerce ``values`` to a 1-D complex128 array."""
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise LengthError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise LengthError(f"{name} must have length >= 1")
    arr = arr.astype(np.complex128, copy=True)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def _bit_reverse_permutation(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def fft_pow2(values, inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 decimation-in-time FFT along the last axis.

    Forward: ``F[k] = sum_j f[j] exp(+2i*pi*k*j/N)`` (unnormalized).
    Inverse: ``f[j] = (1/N) sum_k F[k] exp(-2i*pi*k*j/N)``.

    Leading axes are treated as a batch, so this also serves register-wise
    QFTs on reshaped statevectors.
    """
    x = np.asarray(values, dtype=np.complex128)
    n = x.shape[-1] if x.ndim else 0
    if not is_power_of_two(n):
        raise LengthError(f"fft_pow2 needs a power-of-two length, got {n}")
    x = x[..., _bit_reverse_permutation(n)]
    sign = -1.0 if inverse else 1.0
    batch = x.shape[:-1]
    size = 2
    while size <= n:
        half = size // 2
        # Each twiddle is evaluated directly; recurrences drift at 2^20.
        tw = np.exp(sign * 2j * np.pi * np.arange(half) / size)
        blocks = x.reshape(*batch, n // size, size)
        even = blocks[..., :half]
        odd = blocks[..., half:] * tw
        x = np.concatenate((even + odd, even - odd), axis=-1).reshape(*batch, n)
        size *= 2
    if inverse:
        x = x / n
    return x


def dft_direct(values, inverse: bool = False) -> np.ndarray:
    """O(N^2) DFT with the same conventions as :func:`fft_pow2`, any N."""
    f = as_signal(values)
    n = f.size
    kj = np.outer(np.arange(n), np.arange(n)) % n
    sign = -1.0 if inverse else 1.0
    out = np.sum(np.exp(sign * 2j * np.pi * kj / n) * f, axis=1)
    return out / n if inverse else out


def frft_direct(values, alpha: float) -> Spectrum:
    """Direct O(N^2) evaluation of the fractional Fourier transform.

    Loops over output rows ``k`` and sums ``f[j] * exp(2i*pi*alpha*k*j/N)``
    over ``j`` in a fixed order, so results are reproducible bit for bit.
    This is the reference every other route in the package is checked
    against.
    """
    f = as_signal(values)
    alpha = float(alpha)
    n = f.size
    j = np.arange(n, dtype=np.int64)
    out = np.empty(n, dtype=np.complex128)
    for start in range(0, n, _ROW_BLOCK):
        k = np.arange(start, min(start + _ROW_BLOCK, n), dtype=np.int64)
        kj = np.outer(k, j).astype(np.float64)
        kernel = np.exp(2j * np.pi * alpha * kj / n)
        out[start : start + k.size] = np.sum(kernel * f, axis=1)
    return Spectrum(out, alpha)


def _chirp(alpha: float, n: int, idx: np.ndarray) -> np.ndarray:
    """``exp(+i*pi*alpha*idx**2/n)``; idx**2 is formed exactly in int64."""
    sq = (idx.astype(np.int64) ** 2).astype(np.float64)
    return np.exp(1j * np.pi * alpha * sq / n)


def frft_chirp(values, alpha: float) -> Spectrum:
    """Fractional Fourier transform through a chirp convolution.

    Linear convolution is done with :func:`fft_pow2` after zero-padding to
    the next power of two >= 2N - 1.
    """
    f = as_signal(values)
    alpha = float(alpha)
    n = f.size
    idx = np.arange(n)
    c = _chirp(alpha, n, idx)

    m = 1 << max(0, (2 * n - 1 - 1).bit_length())
    a = np.zeros(m, dtype=np.complex128)
    a[:n] = f * c
    # Kernel conj(c) on offsets -(N-1)..(N-1), wrapped circularly.
    h = np.zeros(m, dtype=np.complex128)
    h[:n] = np.conj(c)
    if n > 1:
        h[m - (n - 1) :] = np.conj(c[1:][::-1])
    y = fft_pow2(fft_pow2(a) * fft_pow2(h), inverse=True)[:n]
    return Spectrum(c * y, alpha)


# -- Signal JSON -----------------------------------------------------------


def _reject_constant(token: str):
    raise ValueError(f"non-finite number {token!r} is not allowed")


def to_pairs(values) -> list[list[float]]:
    arr = np.asarray(values, dtype=np.complex128)
    return [[float(v.real), float(v.imag)] for v in arr]


def parse_signal(text: str) -> np.ndarray:
    """Parse the shared Signal JSON document ``{"n": int?, "values": [[re, im], ...]}``."""
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("signal document must be a JSON object")
    if "values" not in doc:
        raise ValueError("field 'values' is missing")
    raw = doc["values"]
    if not isinstance(raw, list) or not raw:
        raise ValueError("field 'values' must be a non-empty list of [re, im] pairs")
    out = np.empty(len(raw), dtype=np.complex128)
    for i, pair in enumerate(raw):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise ValueError(f"field 'values[{i}]' must be a [re, im] pair of numbers")
        if not all(math.isfinite(x) for x in pair):
            raise ValueError(f"field 'values[{i}]' is not finite")
        out[i] = complex(pair[0], pair[1])
    n = doc.get("n")
    if n is not None:
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ValueError("field 'n' must be a non-negative integer")
        if len(out) != 1 << n:
            raise ValueError(f"field 'n' says length {1 << n} but 'values' has {len(out)}")
    return out


def load_signal(path) -> np.ndarray:
    return parse_signal(Path(path).read_text())


def signal_to_json(values, n: int | None = None) -> str:
    doc: dict = {}
    if n is not None:
        doc["n"] = n
    doc["values"] = to_pairs(values)
    return json.dumps(doc)
