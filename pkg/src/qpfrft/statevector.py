"""Dense statevector simulation over named qubit registers.

Index convention
----------------
Registers are concatenated in layout order, the first register occupying
the most significant bits of the flat amplitude index. Inside a register
of width ``w``, bit 1 is the most significant, so a register value is
``v = sum_p v_p * 2**(w - p)``. Global qubit ``q`` (0-based) is axis ``q``
of ``amps.reshape([2] * Q)``; qubit 0 is therefore bit 1 of the first
register. :meth:`RegisterLayout.qubit` is the only place that maps
``(register, bit)`` to a global qubit index.
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from .exceptions import LengthError, MemoryGuardError, NormError, RegisterError
from .numerics import fft_pow2, to_pairs

DEFAULT_MAX_QUBITS = 28
MAX_QUBITS_ENV = "QPFRFT_MAX_QUBITS"

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def max_qubits() -> int:
    """Qubit budget: ``$QPFRFT_MAX_QUBITS`` if set, else 28 (4 GiB of amplitudes)."""
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None or raw == "":
        return DEFAULT_MAX_QUBITS
    try:
        return int(raw)
    except ValueError:
        raise MemoryGuardError(f"{MAX_QUBITS_ENV}={raw!r} is not an integer") from None


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered ``(name, width)`` registers; first register is most significant."""

    registers: tuple
    max_qubits: int | None = None

    def __post_init__(self):
        regs = tuple((str(name), int(width)) for name, width in self.registers)
        object.__setattr__(self, "registers", regs)
        names = [name for name, _ in regs]
        if not regs:
            raise RegisterError("layout needs at least one register")
        if len(set(names)) != len(names):
            raise RegisterError(f"register names must be unique: {names}")
        for name, width in regs:
            if width < 1:
                raise RegisterError(f"register {name!r} has width {width} < 1")
        limit = max_qubits() if self.max_qubits is None else self.max_qubits
        if self.total > limit:
            raise MemoryGuardError(
                f"layout needs {self.total} qubits, above the limit of {limit} "
                f"(raise it with {MAX_QUBITS_ENV})"
            )

    @classmethod
    def of(cls, *registers: tuple[str, int], max_qubits: int | None = None) -> "RegisterLayout":
        return cls(tuple(registers), max_qubits=max_qubits)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.registers)

    @property
    def total(self) -> int:
        return sum(width for _, width in self.registers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(1 << width for _, width in self.registers)

    @property
    def size(self) -> int:
        return 1 << self.total

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise RegisterError(f"unknown register {name!r}; layout has {list(self.names)}") from None

    def width(self, name: str) -> int:
        return self.registers[self.axis(name)][1]

    def offset(self, name: str) -> int:
        """Global qubit index of bit 1 of ``name``."""
        return sum(width for _, width in self.registers[: self.axis(name)])

    def qubit(self, name: str, bit: int) -> int:
        width = self.width(name)
        if not 1 <= bit <= width:
            raise RegisterError(f"bit {bit} outside register {name!r} of width {width}")
        return self.offset(name) + bit - 1

    def index(self, assignment: Mapping[str, int], *, require_all: bool = False) -> int:
        unknown = set(assignment) - set(self.names)
        if unknown:
            raise RegisterError(f"unknown register(s) {sorted(unknown)}")
        if require_all:
            missing = [name for name in self.names if name not in assignment]
            if missing:
                raise RegisterError(f"registers {missing} are not assigned")
        idx = 0
        for name, width in self.registers:
            value = int(assignment.get(name, 0))
            if not 0 <= value < (1 << width):
                raise RegisterError(f"value {value} out of range for register {name!r} (width {width})")
            idx = (idx << width) | value
        return idx

    def to_list(self) -> list:
        return [[name, width] for name, width in self.registers]


@dataclass(frozen=True)
class DiagonalUnitary:
    """Diagonal test unitary: ``U|u> = exp(2i*pi*phases[u]) |u>``, phases in turns."""

    width: int
    phases: tuple

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("DiagonalUnitary width must be >= 1")
        phases = tuple(float(p) % 1.0 for p in self.phases)
        if len(phases) != 1 << self.width:
            raise LengthError(f"need {1 << self.width} phases for width {self.width}, got {len(phases)}")
        object.__setattr__(self, "phases", phases)

    @classmethod
    def with_phase(cls, phase: float, u: int = 1, width: int = 1) -> "DiagonalUnitary":
        """Unitary whose eigenstate ``|u>`` carries ``phase``; all other phases 0."""
        table = [0.0] * (1 << width)
        table[u] = phase
        return cls(width, tuple(table))

    def inverse(self) -> "DiagonalUnitary":
        return DiagonalUnitary(self.width, tuple(-p for p in self.phases))


# -- gates -------------------------------------------------------------------


@dataclass(frozen=True)
class Hadamard:
    target: int

    tag = "hadamard"


@dataclass(frozen=True)
class PauliX:
    target: int

    tag = "pauli_x"


@dataclass(frozen=True)
class ControlledDyadicPhase:
    """Phase ``exp(sign * 2i*pi / 2**k_exp)`` on basis states with all controls and target set.

    ``family`` is a bookkeeping label ("theta"/"phi") used only for tallies.
    """

    controls: frozenset
    target: int
    sign: int
    k_exp: int
    family: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "controls", frozenset(self.controls))

    @property
    def tag(self) -> str:
        return f"{self.family}_phase" if self.family else "phase"


@dataclass(frozen=True)
class DiagonalControlledPower:
    """Controlled ``U**k``: ``k`` read from ``control``, ``U`` diagonal on ``eigen``."""

    control: str
    eigen: str
    unitary: DiagonalUnitary

    tag = "controlled_power"


@dataclass(frozen=True)
class QFT:
    """Normalized positive-exponent QFT on one register (``inverse`` applies its adjoint)."""

    register: str
    inverse: bool = False

    @property
    def tag(self) -> str:
        return "iqft" if self.inverse else "qft"


GateOp = Union[Hadamard, PauliX, ControlledDyadicPhase, DiagonalControlledPower, QFT]


def inverse(op: GateOp) -> GateOp:
    if isinstance(op, (Hadamard, PauliX)):
        return op
    if isinstance(op, ControlledDyadicPhase):
        return ControlledDyadicPhase(op.controls, op.target, -op.sign, op.k_exp, op.family)
    if isinstance(op, DiagonalControlledPower):
        return DiagonalControlledPower(op.control, op.eigen, op.unitary.inverse())
    if isinstance(op, QFT):
        return QFT(op.register, not op.inverse)
    raise TypeError(f"not a gate: {op!r}")


@dataclass
class Circuit:
    layout: RegisterLayout
    ops: list = field(default_factory=list)

    def append(self, op: GateOp) -> "Circuit":
        validate(self.layout, op)
        self.ops.append(op)
        return self

    def extend(self, ops: Iterable[GateOp]) -> "Circuit":
        for op in ops:
            self.append(op)
        return self

    @property
    def counts(self) -> Counter:
        return Counter(op.tag for op in self.ops)

    def controlled_power_layers(self) -> int:
        """Number of controlled ``U**(2**i)`` layers: one per control qubit of each power gate."""
        return sum(self.layout.width(op.control) for op in self.ops if isinstance(op, DiagonalControlledPower))

    def inverse(self) -> "Circuit":
        return Circuit(self.layout, [inverse(op) for op in reversed(self.ops)])

    def run(self, state: "StateVector") -> "StateVector":
        if state.layout != self.layout:
            raise RegisterError("state layout does not match circuit layout")
        amps = state.amps.copy()
        for op in self.ops:
            _apply_inplace(amps, self.layout, op)
        return StateVector(self.layout, amps)

    def __len__(self) -> int:
        return len(self.ops)


def validate(layout: RegisterLayout, op: GateOp) -> None:
    q = layout.total

    def check(qubit):
        if not isinstance(qubit, (int, np.integer)) or not 0 <= qubit < q:
            raise RegisterError(f"qubit index {qubit!r} invalid for a {q}-qubit layout")

    if isinstance(op, (Hadamard, PauliX)):
        check(op.target)
    elif isinstance(op, ControlledDyadicPhase):
        check(op.target)
        for c in op.controls:
            check(c)
        if op.target in op.controls:
            raise RegisterError("phase gate target is also a control")
        if op.k_exp < 1:
            raise ValueError(f"k_exp must be >= 1, got {op.k_exp}")
        if op.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {op.sign}")
    elif isinstance(op, DiagonalControlledPower):
        if op.control == op.eigen:
            raise RegisterError("control and eigen registers must differ")
        layout.axis(op.control)
        if layout.width(op.eigen) != op.unitary.width:
            raise RegisterError(
                f"unitary width {op.unitary.width} does not match register {op.eigen!r} "
                f"of width {layout.width(op.eigen)}"
            )
    elif isinstance(op, QFT):
        layout.axis(op.register)
    else:
        raise TypeError(f"not a gate: {op!r}")


# -- state -----------------------------------------------------------------


@dataclass
class StateVector:
    layout: RegisterLayout
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (self.layout.size,):
            raise LengthError(f"expected {self.layout.size} amplitudes, got shape {self.amps.shape}")

    def copy(self) -> "StateVector":
        return StateVector(self.layout, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def blocks(self) -> np.ndarray:
        """View with one axis per register."""
        return self.amps.reshape(self.layout.dims)

    def marginal(self, register: str) -> np.ndarray:
        """Probability of each value of ``register`` (others traced out)."""
        axis = self.layout.axis(register)
        probs = np.abs(self.blocks()) ** 2
        others = tuple(i for i in range(len(self.layout.dims)) if i != axis)
        return probs.sum(axis=others) if others else probs

    def to_json(self) -> str:
        return json.dumps({"layout": self.layout.to_list(), "amps": to_pairs(self.amps)})


def basis_state(layout: RegisterLayout, assignment: Mapping[str, int] | None = None) -> StateVector:
    amps = np.zeros(layout.size, dtype=np.complex128)
    amps[layout.index(assignment or {})] = 1.0
    return StateVector(layout, amps)


def prepare_signal(
    layout: RegisterLayout,
    register: str,
    f,
    others: Mapping[str, int] | None = None,
    *,
    atol: float = 1e-12,
) -> StateVector:
    """``sum_j f[j] |j>`` on ``register``, tensored with basis states elsewhere."""
    f = np.asarray(f, dtype=np.complex128)
    others = dict(others or {})
    if register in others:
        raise RegisterError(f"register {register!r} is both the signal target and in 'others'")
    width = layout.width(register)
    if f.shape != (1 << width,):
        raise LengthError(f"signal length {f.size} does not match register {register!r} (2^{width})")
    norm = float(np.linalg.norm(f))
    if abs(norm - 1.0) > atol:
        raise NormError(f"signal norm is {norm!r}, expected 1 (normalize before preparing)")
    state = basis_state(layout, others)
    blocks = state.blocks()
    base = list(np.unravel_index(layout.index(others), layout.dims))
    axis = layout.axis(register)
    base[axis] = slice(None)
    blocks[tuple(base)] = f
    return state


def apply(state: StateVector, op: GateOp) -> StateVector:
    validate(state.layout, op)
    amps = state.amps.copy()
    _apply_inplace(amps, state.layout, op)
    return StateVector(state.layout, amps)


def apply_qft(state: StateVector, register: str, inverse: bool = False) -> StateVector:
    return apply(state, QFT(register, inverse))


def amplitude(state: StateVector, assignment: Mapping[str, int]) -> complex:
    return complex(state.amps[state.layout.index(assignment, require_all=True)])


def sample(state: StateVector, register: str, shots: int, seed: int) -> dict[int, int]:
    """Draw ``shots`` outcomes of ``register`` from its marginal; seeded and deterministic."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = state.marginal(register)
    probs = probs / probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    return {int(v): int(c) for v, c in enumerate(counts) if c}


# -- kernels ---------------------------------------------------------------


def _apply_inplace(amps: np.ndarray, layout: RegisterLayout, op: GateOp) -> None:
    q = layout.total
    if isinstance(op, (Hadamard, PauliX)):
        view = amps.reshape(1 << op.target, 2, 1 << (q - op.target - 1))
        if isinstance(op, PauliX):
            view[:] = view[:, ::-1, :].copy()
        else:
            a0 = view[:, 0, :].copy()
            a1 = view[:, 1, :]
            view[:, 0, :] = (a0 + a1) * _INV_SQRT2
            view[:, 1, :] = (a0 - a1) * _INV_SQRT2
    elif isinstance(op, ControlledDyadicPhase):
        view, axes = _split_view(amps, q, [*op.controls, op.target])
        idx = [slice(None)] * view.ndim
        for ax in axes:
            idx[ax] = 1
        view[tuple(idx)] *= np.exp(op.sign * 2j * np.pi / (1 << op.k_exp))
    elif isinstance(op, DiagonalControlledPower):
        _controlled_power(amps, layout, op)
    elif isinstance(op, QFT):
        axis = layout.axis(op.register)
        blocks = amps.reshape(layout.dims)
        moved = np.moveaxis(blocks, axis, -1)
        m = layout.dims[axis]
        if op.inverse:
            out = fft_pow2(moved, inverse=True) * math.sqrt(m)
        else:
            out = fft_pow2(moved) / math.sqrt(m)
        np.moveaxis(blocks, axis, -1)[...] = out
    else:
        raise TypeError(f"not a gate: {op!r}")


def _split_view(amps: np.ndarray, q: int, qubits) -> tuple[np.ndarray, list[int]]:
    """Reshape so each listed qubit gets its own length-2 axis; untouched runs stay merged."""
    shape, axes, prev = [], {}, 0
    for qb in sorted(set(qubits)):
        if qb > prev:
            shape.append(1 << (qb - prev))
        axes[qb] = len(shape)
        shape.append(2)
        prev = qb + 1
    if prev < q:
        shape.append(1 << (q - prev))
    return amps.reshape(shape), [axes[qb] for qb in qubits]


def _controlled_power(amps: np.ndarray, layout: RegisterLayout, op: DiagonalControlledPower) -> None:
    c_axis, e_axis = layout.axis(op.control), layout.axis(op.eigen)
    k = np.arange(layout.dims[c_axis], dtype=np.float64)
    phases = np.asarray(op.unitary.phases, dtype=np.float64)
    # k * phi reduced mod 1 before exponentiating keeps large k accurate.
    table = np.exp(2j * np.pi * np.mod(np.outer(k, phases), 1.0))
    shape = [1] * len(layout.dims)
    shape[c_axis] = table.shape[0]
    shape[e_axis] = table.shape[1]
    if c_axis > e_axis:
        table = table.T
    amps.reshape(layout.dims)[...] *= table.reshape(shape)
