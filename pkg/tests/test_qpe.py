import math
from fractions import Fraction

import numpy as np
import pytest

from qpfrft.exceptions import ParameterError, RegisterError
from qpfrft.qpe import (
    DiagonalUnitary,
    PhaseTarget,
    check_inequality,
    feasibility_table,
    integer_phase_configs,
    qpe_grover,
    qpe_modulated,
    qpe_reduced,
    qpe_textbook,
    textbook_layers,
    valid_alphas,
)
from qpfrft.statevector import sample


def U(phase, u=1, width=1):
    return DiagonalUnitary.with_phase(phase, u, width)


def test_phase_target():
    assert PhaseTarget(5, 4).value == 5 / 16
    assert PhaseTarget.from_phase(0.3125, 4) == PhaseTarget(5, 4)
    with pytest.raises(ParameterError):
        PhaseTarget(16, 4)
    with pytest.raises(ParameterError):
        PhaseTarget.from_phase(0.3, 4)


def test_reduced_trivial():
    r = qpe_reduced(U(0.0), 1, 4, 0, 2)
    assert (r.measured, r.estimate) == (0, 0.0)
    assert r.success_prob == pytest.approx(1, abs=1e-10)


def test_reduced_exact_integer_phase():
    r = qpe_reduced(U(3 / 8), 1, 8, 0, 3)
    assert r.measured == 3 and r.estimate == 0.375
    assert r.success_prob == pytest.approx(1, abs=1e-10)


def test_reduced_recovers_fine_phase_with_shift():
    # alpha = -1/4, j = 2 cancels 8/16: the 3-bit readout is exact for a 4-bit phase
    r = qpe_reduced(U(1 / 16), 1, 6, 2, 3)
    assert r.measured == 0
    assert r.estimate == 1 / 16
    assert r.success_prob == pytest.approx(1, abs=1e-10)
    assert r.params["alpha"] == -0.25


def brute_integer_configs(n, nprime):
    big_n = 2**n
    return sorted(
        (l, j, b)
        for l in range(2 * big_n)
        for j in range(big_n)
        for b in range(2**nprime)
        if (Fraction(l - big_n, big_n) * j + big_n * Fraction(b, 2**nprime)).denominator == 1
    )


@pytest.mark.parametrize("n,nprime", [(2, 3), (3, 4)])
def test_integer_configs_match_brute_force(n, nprime):
    assert sorted(integer_phase_configs(n, nprime)) == brute_integer_configs(n, nprime)


def test_integer_configs_count():
    assert len(integer_phase_configs(3, 4)) == 512


@pytest.mark.slow
def test_reduced_exact_on_all_integer_configs():
    for l, j, b in integer_phase_configs(3, 4):
        r = qpe_reduced(U(b / 16), 1, l, j, 3)
        assert r.success_prob == pytest.approx(1, abs=1e-10)
        assert r.estimate == pytest.approx(b / 16, abs=1e-12)
        assert r.gate_tally["controlled_u_layers"] == 3


def test_reduced_inexact_floor(rng):
    for _ in range(40):
        phase = float(rng.uniform(0, 1))
        l, j = int(rng.integers(16)), int(rng.integers(8))
        r = qpe_reduced(U(phase), 1, l, j, 3)
        assert r.success_prob >= 4 / math.pi**2 - 1e-6


def test_reduced_direct_path_agrees(rng):
    for _ in range(10):
        phase = float(rng.uniform(0, 1))
        l, j = int(rng.integers(16)), int(rng.integers(8))
        a = qpe_reduced(U(phase), 1, l, j, 3, use_circuit=True)
        b = qpe_reduced(U(phase), 1, l, j, 3, use_circuit=False)
        np.testing.assert_allclose(a.state.amps, b.state.amps, atol=1e-12)


def test_reduced_rejects():
    with pytest.raises(RegisterError):
        qpe_reduced(U(0.0), 1, 4, 4, 2)
    with pytest.raises(RegisterError):
        qpe_reduced(U(0.0), 2, 4, 0, 2)
    with pytest.raises(ParameterError):
        qpe_reduced(U(0.0), 1, 8, 0, 2)


def test_layer_accounting():
    assert textbook_layers(4, 0.25) == 6
    assert textbook_layers(4, 0.1) == 4 + math.ceil(math.log2(7))
    r = qpe_reduced(U(0.0), 1, 8, 0, 3)
    t = qpe_textbook(U(5 / 16), 1, 4, 0.25)
    assert r.gate_tally["controlled_u_layers"] == 3
    assert t.gate_tally["controlled_u_layers"] == 6
    assert t.measured == 20 and t.estimate == 5 / 16
    assert t.success_prob == pytest.approx(1, abs=1e-10)


def test_textbook_meets_eps(rng):
    for _ in range(10):
        phase = float(rng.uniform(0, 1))
        assert qpe_textbook(U(phase), 1, 3, 0.25).success_prob >= 0.75


def dirichlet_initial_mass(n, nprime, b):
    big_n = 2**n
    total = 0.0
    for lp in range(big_n):
        phi = (b - lp) * big_n / 2**nprime
        total += abs(sum(np.exp(2j * np.pi * k * phi / big_n) for k in range(big_n)) / big_n) ** 2
    return total / big_n


@pytest.mark.parametrize("b", range(8))
def test_grover_sin_law(b):
    r = qpe_grover(U(b / 16), 1, 3, 4, iterations=4)
    p0 = r.extra["initial_marked_prob"]
    assert p0 == pytest.approx(dirichlet_initial_mass(3, 4, b), abs=1e-12)
    theta = math.asin(math.sqrt(p0))
    for i, p in enumerate(r.extra["history"]):
        assert p == pytest.approx(math.sin((2 * i + 1) * theta) ** 2, abs=1e-6)


@pytest.mark.parametrize("b", range(8))
def test_grover_auto(b):
    r = qpe_grover(U(b / 16), 1, 3, 4)
    assert r.gate_tally["grover_iterations"] == 2
    assert r.measured == b
    assert r.estimate == b / 16
    assert r.success_prob > r.extra["initial_marked_prob"]
    assert r.params["j"] == 4


def test_grover_b5_frozen_value():
    r = qpe_grover(U(5 / 16), 1, 3, 4)
    assert r.success_prob == pytest.approx(0.3193662080900556, abs=1e-9)
    assert r.extra["initial_marked_prob"] == pytest.approx(0.2368, abs=1e-4)


def test_grover_zero_iterations_is_prepared_mass():
    r = qpe_grover(U(5 / 16), 1, 3, 4, iterations=0)
    assert r.success_prob == r.extra["initial_marked_prob"]
    assert r.gate_tally["preparation_applications"] == 1


def test_grover_monotone_to_optimum():
    r = qpe_grover(U(5 / 16), 1, 3, 4, iterations=1)
    opt = qpe_grover(U(5 / 16), 1, 3, 4, iterations="optimal")
    assert opt.gate_tally["grover_iterations"] == 1
    assert opt.success_prob == r.success_prob > r.extra["initial_marked_prob"]
    assert opt.success_prob >= 0.99


def test_grover_sampling_is_seeded():
    r = qpe_grover(U(5 / 16), 1, 3, 4, iterations="optimal")
    counts = sample(r.state, "l", 500, seed=11)
    assert counts == sample(r.state, "l", 500, seed=11)
    assert max(counts, key=counts.get) == 8 + 5


@pytest.mark.parametrize(
    "phase,n,nprime",
    [(5 / 8, 3, 3), (1 / 16, 2, 5), (15 / 16, 3, 4), (0.3, 3, 4)],
)
def test_grover_rejects(phase, n, nprime):
    with pytest.raises(ParameterError):
        qpe_grover(U(phase), 1, n, nprime)


def test_grover_rejects_negative_iterations():
    with pytest.raises(ParameterError):
        qpe_grover(U(5 / 16), 1, 3, 4, iterations=-1)


def test_valid_alphas():
    assert valid_alphas(0, 3) == list(range(16))
    assert valid_alphas(1, 3) == [0, 8]
    assert valid_alphas(2, 3) == [0, 4, 8, 12]
    brute = [l for l in range(16) if (Fraction(l - 8, 8) * 3).denominator == 1]
    assert valid_alphas(3, 3) == brute


def test_modulated_examples():
    r = qpe_modulated(U(3 / 8), 1, 8, 3)
    assert (r.measured, r.estimate) == (3, 0.375)
    assert r.success_prob == pytest.approx(1, abs=1e-10)
    r = qpe_modulated(U(5 / 8, 2, 2), 2, 12, 3)
    assert (r.measured, r.estimate) == (4, 0.625)
    assert r.params["u_alpha"] == 1
    for l in range(16):
        assert qpe_modulated(U(5 / 8, 0, 2), 0, l, 3).measured == 5


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("m", [1, 2])
def test_modulated_shift_law(n, m):
    big_n = 2**n
    for u in range(2**m):
        for l in valid_alphas(u, n):
            shift = (l - big_n) * u // big_n
            for b in range(big_n):
                r = qpe_modulated(U(b / big_n, u, m), u, l, n)
                assert r.measured == (b - shift) % big_n
                assert r.estimate == b / big_n
                assert r.success_prob == pytest.approx(1, abs=1e-10)


def test_modulated_direct_path_agrees():
    for l in valid_alphas(2, 3):
        a = qpe_modulated(U(3 / 8, 2, 2), 2, l, 3)
        b = qpe_modulated(U(3 / 8, 2, 2), 2, l, 3, use_circuit=False)
        np.testing.assert_allclose(a.state.amps, b.state.amps, atol=1e-12)


def test_modulated_rejects_fractional_shift():
    with pytest.raises(ParameterError):
        qpe_modulated(U(3 / 8), 1, 9, 3)


@pytest.mark.parametrize("n,nu,ok", [(15, 0, True), (16, 0, True), (17, 0, False), (20, 16, True), (21, 16, False)])
def test_check_inequality_examples(n, nu, ok):
    assert check_inequality(n, nu) is ok


def test_check_inequality_exact():
    for n in range(1, 65):
        for nu in range(65):
            assert check_inequality(n, nu) == (2**n <= (nu + n) ** 4)


def test_check_inequality_rejects():
    with pytest.raises(ParameterError):
        check_inequality(0, 0)
    with pytest.raises(ParameterError):
        check_inequality(3, -1)


def test_feasibility_table():
    rows = feasibility_table(24, [0, 16])
    assert len(rows) == 48
    zero = [r for r in rows if r.nu == 0]
    assert [r.n for r in zero if r.ok][-1] == 16
    assert zero[15].lhs == zero[15].rhs == 65536
    sixteen = [r for r in rows if r.nu == 16]
    assert [r.n for r in sixteen if r.ok][-1] == 20
    assert all(r.ok == check_inequality(r.n, r.nu) for r in rows)


def test_result_to_dict_drops_state():
    doc = qpe_reduced(U(0.0), 1, 4, 0, 2).to_dict()
    assert "state" not in doc and doc["method"] == "reduced"
