"""Tests for the circuit elements: splitters, displacements, sources, POVMs."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from pbsim.errors import ValidationError
from pbsim.fock import (FockVector, TruncationConfig, number_state,
                        tensor_product, vacuum_state)
from pbsim.ops import (TwoModeUnitary, apply_single_mode_op,
                       apply_two_mode_unitary, beam_splitter_5050,
                       beam_splitter_pb, detector_povm, displacement_op,
                       phase_plate, tmsv)


def two_photon_input(cutoff=2):
    return tensor_product(number_state(1, cutoff), number_state(1, cutoff))


def test_two_mode_unitary_validation():
    with pytest.raises(ValidationError):
        TwoModeUnitary(np.array([[1.0, 0.0], [1.0, 1.0]]))
    u = TwoModeUnitary(np.eye(2, dtype=complex))
    assert np.allclose(u.dagger.u, np.eye(2))


def test_hong_ou_mandel():
    # |1,1> through the 50-50 splitter: coincidence amplitude cancels
    out = apply_two_mode_unitary(two_photon_input(), (0, 1),
                                 beam_splitter_5050())
    a = out.amplitudes
    assert abs(a[1, 1]) < 1e-14
    assert a[2, 0] == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert a[0, 2] == pytest.approx(-1 / math.sqrt(2), abs=1e-12)


def test_single_photon_split_convention():
    # creation operator of the first input maps to (a1+ - a2+)/sqrt(2)
    inp = tensor_product(number_state(1, 1), vacuum_state(1))
    out = apply_two_mode_unitary(inp, (0, 1), beam_splitter_5050())
    assert out.amplitudes[1, 0] == pytest.approx(1 / math.sqrt(2))
    assert out.amplitudes[0, 1] == pytest.approx(-1 / math.sqrt(2))


def test_beam_splitter_pb_entries():
    b = beam_splitter_pb(1, 4)
    assert b.u[0, 0] == pytest.approx(math.sqrt(3.0 / 4.0))
    assert b.u[0, 1] == pytest.approx(-0.5)
    assert b.u[1, 0] == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        beam_splitter_pb(4, 4)
    with pytest.raises(ValidationError):
        beam_splitter_pb(0, 4)


def test_transfer_conserves_photon_number():
    rng = np.random.default_rng(8)
    cfg = TruncationConfig(3, 2)
    amp = rng.standard_normal(cfg.shape) + 1j * rng.standard_normal(cfg.shape)
    amp /= np.linalg.norm(amp)
    v = FockVector(cfg, amp, normalized=True)
    u = beam_splitter_pb(2, 3)
    out = apply_two_mode_unitary(v, (0, 1), u)
    # total-photon-number marginals are preserved
    def marginal(x):
        p = np.zeros(2 * 3 + 1)
        for m in range(4):
            for n in range(4):
                p[m + n] += abs(x[m, n]) ** 2
        return p
    got = marginal(out.amplitudes)
    want = marginal(v.amplitudes)
    # components above the cutoff leak out of sectors 4..6
    assert np.all(got[:4] <= want[:4] + 1e-12)
    assert got[0] == pytest.approx(want[0], abs=1e-12)


def test_leakage_accounting():
    # |2,2> through a 50-50 splitter at cutoff 2 loses the n=3,4 parts
    inp = tensor_product(number_state(2, 2), number_state(2, 2))
    out = apply_two_mode_unitary(inp, (0, 1), beam_splitter_5050())
    assert not out.normalized
    assert out.leakage == pytest.approx(1.0 - out.norm_sq(), abs=1e-12)
    assert out.leakage > 0.7


def test_tmsv_norm():
    q, cutoff = 0.4, 5
    st = tmsv(q, cutoff)
    nkept = cutoff + 1
    assert st.norm_sq() == pytest.approx(
        (1 - q ** 2) * (1 - q ** (2 * nkept)) / (1 - q ** 2), abs=1e-12)
    assert st.amplitudes[3, 3] == pytest.approx(math.sqrt(1 - q * q) * q ** 3)
    assert st.amplitudes[1, 2] == 0.0
    limited = tmsv(q, cutoff, max_terms=2)
    assert limited.amplitudes[2, 2] == 0.0
    with pytest.raises(ValidationError):
        tmsv(1.0, 3)


def test_displacement_series_vs_exact():
    # order-5 series against the matrix exponential at small amplitude
    alpha = 0.05
    d_series = displacement_op(alpha, 5, scheme="series", order=5)
    d_exact = displacement_op(alpha, 5, scheme="exact")
    assert np.abs(d_series - d_exact).max() < 1e-7


def test_displacement_exact_matches_expm():
    alpha = 0.3 + 0.2j
    dim = 6
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    g = alpha * a.conj().T - np.conj(alpha) * a
    want = expm(g)
    got = displacement_op(alpha, dim - 1, scheme="exact")
    assert np.abs(got - want).max() < 1e-12
    # exact scheme is unitary on the truncated space
    assert np.abs(got @ got.conj().T - np.eye(dim)).max() < 1e-12


def test_displacement_on_vacuum_gives_coherent_amplitudes():
    alpha = 0.2
    cutoff = 8
    d = displacement_op(alpha, cutoff, scheme="exact")
    out = apply_single_mode_op(vacuum_state(cutoff), 0, d)
    want = np.exp(-abs(alpha) ** 2 / 2) * np.array(
        [alpha ** n / math.sqrt(math.factorial(n)) for n in range(cutoff + 1)])
    assert np.abs(out.amplitudes - want).max() < 1e-9


def test_phase_plate():
    v = number_state(2, 3)
    out = phase_plate(v, 0, 0.7)
    assert out.amplitudes[2] == pytest.approx(np.exp(-2j * 0.7))
    sup = FockVector(TruncationConfig(1, 1),
                     np.array([1, 1], dtype=complex) / np.sqrt(2),
                     normalized=True)
    out = phase_plate(sup, 0, math.pi)
    assert out.amplitudes[1] == pytest.approx(-1 / np.sqrt(2))


def test_detector_povm_entries():
    p = detector_povm(0.6, 4)
    assert p.click[0, 0] == 0.0
    assert p.click[1, 1] == pytest.approx(0.6)
    assert p.click[2, 2] == pytest.approx(0.24)
    assert np.allclose(p.click + p.no_click, np.eye(5))
    assert p.tail_weight == pytest.approx((1 - 0.6) ** 4)
    unit = detector_povm(1.0, 4)
    want = np.zeros((5, 5))
    want[1, 1] = 1.0
    assert np.allclose(unit.click, want)
    with pytest.raises(ValidationError):
        detector_povm(1.2, 4)
