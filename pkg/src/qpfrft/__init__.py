"""Simulation of the quantum pseudo-fractional Fourier transform and U_alpha phase estimation."""

from .exceptions import (
    LengthError,
    MemoryGuardError,
    NormError,
    ParameterError,
    QpfrftError,
    RegisterError,
)
from .numerics import Spectrum, fft_pow2, frft_chirp, frft_direct
from .qpe import (
    DiagonalUnitary,
    QpeResult,
    check_inequality,
    feasibility_table,
    qpe_grover,
    qpe_modulated,
    qpe_reduced,
    qpe_textbook,
    valid_alphas,
)
from .statevector import Circuit, RegisterLayout, StateVector, basis_state
from .transform import QpfrftRun, run_qpfrft, xalpha_table
from .ualpha import AlphaIndex, apply_direct, decompose_l, enumerate_terms, gate_count, psi_phase, synthesize

__version__ = "0.1.0"
