"""Phase estimation variants built on U_alpha.

All test unitaries are diagonal (:class:`DiagonalUnitary`), so eigenstates
are computational basis states of the eigen register ``u`` and
controlled-``U**k`` is a phase table lookup.

* :func:`qpe_reduced` -- U_alpha shifts the phase by ``alpha*j`` so that
  ``n`` controlled-power layers suffice where textbook QPE needs more.
* :func:`qpe_grover` -- a superposition over ``l`` generates many shifted
  phases; amplitude amplification hunts for the branch reading zero.
* :func:`qpe_modulated` -- the eigen register itself drives U_alpha, so
  the readout is shifted by ``u*alpha``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import ParameterError, RegisterError
from .statevector import (
    QFT,
    Circuit,
    DiagonalControlledPower,
    DiagonalUnitary,
    Hadamard,
    PauliX,
    RegisterLayout,
    StateVector,
    basis_state,
)
from .ualpha import apply_direct, decompose_l, synthesize

__all__ = [
    "DiagonalUnitary",
    "PhaseTarget",
    "QpeResult",
    "FeasibilityRow",
    "qpe_reduced",
    "qpe_textbook",
    "textbook_layers",
    "integer_phase_configs",
    "qpe_grover",
    "grover_preparation",
    "qpe_modulated",
    "valid_alphas",
    "check_inequality",
    "feasibility_table",
]


@dataclass(frozen=True)
class PhaseTarget:
    b: int
    nprime: int

    def __post_init__(self):
        if not 0 <= self.b < 1 << self.nprime:
            raise ParameterError(f"b={self.b} outside [0, 2^{self.nprime})")

    @property
    def value(self) -> float:
        return self.b / (1 << self.nprime)

    @classmethod
    def from_phase(cls, phase: float, nprime: int) -> "PhaseTarget":
        scaled = Fraction(phase).limit_denominator(1 << (nprime + 16)) * (1 << nprime)
        if scaled.denominator != 1:
            raise ParameterError(f"phase {phase} is not an exact {nprime}-bit binary fraction")
        return cls(int(scaled) % (1 << nprime), nprime)


@dataclass
class QpeResult:
    method: str
    measured: int
    estimate: float
    success_prob: float
    gate_tally: dict
    params: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    # Final statevector, for sampling demos; not serialized.
    state: StateVector | None = field(default=None, repr=False, compare=False)
    readout: str = "w"

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc.pop("state")
        doc.pop("readout")
        return doc


def _check_eigen(unitary: DiagonalUnitary, u: int) -> None:
    if not 0 <= u < 1 << unitary.width:
        raise RegisterError(f"eigenindex u={u} outside [0, 2^{unitary.width})")


def _tally(circuit: Circuit) -> dict:
    tally = dict(sorted(circuit.counts.items()))
    tally["controlled_u_layers"] = circuit.controlled_power_layers()
    return tally


def _nearest(phi: float, modulus: int) -> int:
    return int(math.floor(phi + 0.5)) % modulus


def _ualpha_then_power(
    layout, a, unitary, *, j_register, conjugate, use_circuit
):
    """Circuit (for tallies) and a runner; the runner may swap in the direct U_alpha."""
    circuit = synthesize(a, conjugate=conjugate, layout=layout, j_register=j_register)
    tail = [DiagonalControlledPower("w", "u", unitary), QFT("w", inverse=True)]
    circuit.extend(tail)
    if use_circuit:
        return circuit, circuit.run
    tail_circuit = Circuit(layout, tail)

    def run(state):
        return tail_circuit.run(apply_direct(state, a, j_register, "w", conjugate))

    return circuit, run


def qpe_reduced(
    unitary: DiagonalUnitary, u: int, l: int, j: int, n: int, *, use_circuit: bool = True
) -> QpeResult:
    """Phase estimation with only ``n`` controlled-power layers.

    The readout register sees ``phi = alpha_l*j + N*phi_u`` with
    ``alpha_l = (l - N)/N``; the estimate undoes the known shift.
    """
    _check_eigen(unitary, u)
    a = decompose_l(l, n)
    big_n = 1 << n
    if not 0 <= j < big_n:
        raise RegisterError(f"j={j} outside [0, {big_n})")
    layout = RegisterLayout.of(("l", n + 1), ("j", n), ("w", n), ("u", unitary.width))
    circuit, run = _ualpha_then_power(layout, a, unitary, j_register="j", conjugate=False, use_circuit=use_circuit)
    final = run(basis_state(layout, {"l": l, "j": j, "u": u}))

    probs = final.marginal("w")
    measured = int(np.argmax(probs))
    shift = a.alpha * j
    phi = shift + big_n * unitary.phases[u]
    estimate = ((measured - shift) / big_n) % 1.0
    return QpeResult(
        method="reduced",
        measured=measured,
        estimate=estimate,
        success_prob=float(probs[_nearest(phi, big_n)]),
        gate_tally=_tally(circuit),
        params={"n": n, "l": l, "j": j, "u": u, "alpha": a.alpha, "alpha_convention": "(l-L)/L"},
        extra={"phi": phi},
        state=final,
    )


def textbook_layers(nprime: int, eps: float) -> int:
    """Counting qubits for ``nprime`` bits with failure probability ``eps``."""
    if not 0 < eps < 1:
        raise ParameterError("eps must lie in (0, 1)")
    # Tolerance keeps exact powers of two (eps = 0.25 -> log2(4) = 2) from rounding up.
    return nprime + math.ceil(math.log2(2 + 1 / (2 * eps)) - 1e-12)


def qpe_textbook(unitary: DiagonalUnitary, u: int, nprime: int, eps: float = 0.25) -> QpeResult:
    """Reference textbook phase estimation (Hadamards, controlled powers, IQFT)."""
    _check_eigen(unitary, u)
    q = textbook_layers(nprime, eps)
    layout = RegisterLayout.of(("w", q), ("u", unitary.width))
    circuit = Circuit(layout, [Hadamard(layout.qubit("w", b)) for b in range(1, q + 1)])
    circuit.extend([DiagonalControlledPower("w", "u", unitary), QFT("w", inverse=True)])
    final = circuit.run(basis_state(layout, {"u": u}))

    probs = final.marginal("w")
    measured = int(np.argmax(probs))
    big_q = 1 << q
    dist = np.abs((np.arange(big_q) / big_q - unitary.phases[u] + 0.5) % 1.0 - 0.5)
    return QpeResult(
        method="textbook",
        measured=measured,
        estimate=measured / big_q,
        success_prob=float(probs[dist < 2.0**-nprime].sum()),
        gate_tally=_tally(circuit),
        params={"nprime": nprime, "eps": eps, "q": q, "u": u},
        state=final,
    )


def integer_phase_configs(n: int, nprime: int) -> list[tuple[int, int, int]]:
    """Brute-force every ``(l, j, b)`` with ``alpha_l*j + N*b/2**nprime`` an integer."""
    big_n = 1 << n
    scale = big_n << nprime  # phi * scale is an integer for every candidate
    out = []
    for b in range(1 << nprime):
        for l in range(2 * big_n):
            for j in range(big_n):
                if ((l - big_n) * j * (1 << nprime) + big_n * big_n * b) % scale == 0:
                    out.append((l, j, b))
    return out


def grover_preparation(unitary: DiagonalUnitary, u: int, n: int, j: int) -> Circuit:
    """State preparation ``A`` for the Grover variant, acting on ``|0...0>``.

    The top bit of ``l`` is pinned to 1 and the conjugate U_alpha is used,
    which yields the phase ``-(l'/L) * k * j / N`` required by the search
    (``alpha_l = -l'/L`` with ``l'`` the low n bits).
    """
    layout = RegisterLayout.of(("l", n + 1), ("j", n), ("w", n), ("u", unitary.width))
    prep = Circuit(layout)
    prep.append(PauliX(layout.qubit("l", 1)))
    prep.extend(Hadamard(layout.qubit("l", b)) for b in range(2, n + 2))
    prep.extend(PauliX(layout.qubit("j", b)) for b in range(1, n + 1) if (j >> (n - b)) & 1)
    prep.extend(PauliX(layout.qubit("u", b)) for b in range(1, unitary.width + 1) if (u >> (unitary.width - b)) & 1)
    prep.extend(synthesize(decompose_l(1 << n, n), conjugate=True, layout=layout).ops)
    prep.extend([DiagonalControlledPower("w", "u", unitary), QFT("w", inverse=True)])
    return prep


def qpe_grover(
    unitary: DiagonalUnitary, u: int, n: int, nprime: int, iterations: int | str = "auto"
) -> QpeResult:
    """Phase estimation as amplitude amplification over the ``l`` register.

    ``iterations`` is a round count, ``"auto"`` (``floor(pi/4 * sqrt(L))``,
    the single-marked-item schedule) or ``"optimal"`` (chosen from the
    marked mass of the prepared state).

    ``success_prob`` is the mass on the marked subspace (readout register
    equal to 0), which follows ``sin^2((2i + 1) theta)``. The probability of
    reading exactly ``l' = b`` is reported as ``extra["hit_prob"]``.
    """
    _check_eigen(unitary, u)
    if not n < nprime <= 2 * n:
        raise ParameterError(f"need n < n' <= 2n so that j = N^2/N' is an integer below N (n={n}, n'={nprime})")
    target = PhaseTarget.from_phase(unitary.phases[u], nprime)
    big_n = 1 << n
    if target.b >= big_n:
        raise ParameterError(f"b={target.b} must be below L=2^{n} for the marked l to exist")
    j = 1 << (2 * n - nprime)

    prep = grover_preparation(unitary, u, n, j)
    unprep = prep.inverse()
    layout = prep.layout
    marked = np.zeros(layout.dims, dtype=bool)
    marked[:, :, 0, :] = True
    marked = marked.reshape(-1)

    state = prep.run(basis_state(layout))
    history = [float(np.sum(np.abs(state.amps[marked]) ** 2))]
    if iterations == "auto":
        iterations = int(math.floor(math.pi / 4 * math.sqrt(big_n)))
    elif iterations == "optimal":
        theta = math.asin(math.sqrt(min(1.0, history[0])))
        iterations = max(0, int(round(math.pi / (4 * theta) - 0.5)))
    iterations = int(iterations)
    if iterations < 0:
        raise ParameterError("iterations must be >= 0")
    for _ in range(iterations):
        amps = state.amps.copy()
        amps[marked] *= -1.0
        state = unprep.run(StateVector(layout, amps))
        state.amps[0] *= -1.0
        state = prep.run(state)
        state.amps *= -1.0
        history.append(float(np.sum(np.abs(state.amps[marked]) ** 2)))

    low = state.marginal("l")[big_n:]
    measured = int(np.argmax(low))
    tally = _tally(prep)
    tally["grover_iterations"] = iterations
    tally["preparation_applications"] = 1 + 2 * iterations
    return QpeResult(
        method="grover",
        measured=measured,
        estimate=measured / (1 << nprime),
        success_prob=history[-1],
        gate_tally=tally,
        params={"n": n, "nprime": nprime, "b": target.b, "j": j, "u": u, "alpha_convention": "-l/L"},
        extra={
            "initial_marked_prob": history[0],
            "hit_prob": float(low[target.b]),
            "history": history,
        },
        state=state,
        readout="l",
    )


def valid_alphas(u: int, n: int) -> list[int]:
    """Every ``l`` for which ``u * alpha_l`` is an integer."""
    if u < 0:
        raise RegisterError("u must be >= 0")
    big_n = 1 << n
    return [l for l in range(2 * big_n) if ((l - big_n) * u) % big_n == 0]


def qpe_modulated(unitary: DiagonalUnitary, u: int, l: int, n: int, *, use_circuit: bool = True) -> QpeResult:
    """Phase estimation whose readout is shifted by ``u * alpha``.

    The eigen register takes the role of ``j`` in a conjugated U_alpha, so
    the readout register ends in ``|N*phi_u - u*alpha mod N>``.
    """
    _check_eigen(unitary, u)
    a = decompose_l(l, n)
    big_n = 1 << n
    if ((l - big_n) * u) % big_n:
        raise ParameterError(f"u*alpha = {u}*({l}-{big_n})/{big_n} is not an integer")
    shift = (l - big_n) * u // big_n
    layout = RegisterLayout.of(("l", n + 1), ("u", unitary.width), ("w", n))
    circuit, run = _ualpha_then_power(layout, a, unitary, j_register="u", conjugate=True, use_circuit=use_circuit)
    final = run(basis_state(layout, {"l": l, "u": u}))

    probs = final.marginal("w")
    measured = int(np.argmax(probs))
    phi = big_n * unitary.phases[u] - shift
    return QpeResult(
        method="modulated",
        measured=measured,
        estimate=((measured + shift) % big_n) / big_n,
        success_prob=float(probs[_nearest(phi, big_n)]),
        gate_tally=_tally(circuit),
        params={"n": n, "l": l, "u": u, "alpha": a.alpha, "u_alpha": shift},
        extra={"phi": phi},
        state=final,
    )


def check_inequality(n: int, nu: int) -> bool:
    """``2**n <= (nu + n)**4`` in exact integer arithmetic."""
    if n < 1 or nu < 0:
        raise ParameterError("need n >= 1 and nu >= 0")
    return (1 << n) <= (nu + n) ** 4


@dataclass(frozen=True)
class FeasibilityRow:
    n: int
    nu: int
    lhs: int
    rhs: int
    ok: bool


def feasibility_table(n_max: int, nus) -> list[FeasibilityRow]:
    rows = []
    for nu in nus:
        for n in range(1, n_max + 1):
            rows.append(FeasibilityRow(n, nu, 1 << n, (nu + n) ** 4, check_inequality(n, nu)))
    return rows
