"""Tests for the truncated Fock-space containers and contractions."""

import json

import numpy as np
import pytest

from pbsim.errors import (ConfigMismatchError, DegenerateHeraldError,
                          ValidationError)
from pbsim.fock import (FockDensity, FockVector, TruncationConfig,
                        conditional_density, fidelity_pure, inner_product,
                        number_state, pad_to_cutoff, project_pattern,
                        tensor_product, vacuum_state)


def random_vector(cutoff, modes, seed, normalized=True):
    rng = np.random.default_rng(seed)
    cfg = TruncationConfig(cutoff, modes)
    amp = rng.standard_normal(cfg.shape) + 1j * rng.standard_normal(cfg.shape)
    if normalized:
        amp /= np.linalg.norm(amp)
    return FockVector(cfg, amp, normalized=normalized)


def test_config_validation():
    with pytest.raises(ValidationError):
        TruncationConfig(0, 1)
    with pytest.raises(ValidationError):
        TruncationConfig(3, 0)
    cfg = TruncationConfig(4, 2)
    assert cfg.dim == 5
    assert cfg.shape == (5, 5)


def test_vector_norm_flag_enforced():
    cfg = TruncationConfig(2, 1)
    amp = np.array([1.0, 1.0, 0.0], dtype=complex)
    with pytest.raises(ValidationError):
        FockVector(cfg, amp, normalized=True)
    v = FockVector(cfg, amp / np.sqrt(2.0), normalized=True)
    assert v.norm_sq() == pytest.approx(1.0)


def test_vector_json_round_trip():
    v = random_vector(3, 2, seed=5)
    blob = json.dumps(v.to_json_dict())
    w = FockVector.from_json_dict(json.loads(blob))
    assert w.config == v.config
    assert np.allclose(w.amplitudes, v.amplitudes)
    assert w.normalized == v.normalized


def test_tensor_product_norm_multiplies():
    # norm(a (x) b) = norm(a) norm(b), direct-summation oracle
    a = random_vector(3, 1, seed=1, normalized=False)
    b = random_vector(3, 2, seed=2, normalized=False)
    t = tensor_product(a, b)
    assert t.modes == 3
    direct = np.sqrt(sum(abs(x * y) ** 2
                         for x in a.amplitudes.ravel()
                         for y in b.amplitudes.ravel()))
    assert np.sqrt(t.norm_sq()) == pytest.approx(direct, abs=1e-12)


def test_tensor_product_axis_order():
    one = number_state(1, 2)
    vac = vacuum_state(2)
    t = tensor_product(one, vac)
    assert t.amplitudes[1, 0] == pytest.approx(1.0)
    assert t.amplitudes[0, 1] == pytest.approx(0.0)


def test_inner_product_conjugation():
    a = random_vector(4, 1, seed=3)
    b = random_vector(4, 1, seed=4)
    assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)))
    with pytest.raises(ConfigMismatchError):
        inner_product(a, random_vector(5, 1, seed=6))


def test_density_hermitian_and_psd_checks():
    good = FockDensity.from_pure(number_state(2, 3))
    assert good.matrix[2, 2] == pytest.approx(1.0)
    bad = np.zeros((3, 3), dtype=complex)
    bad[0, 1] = 1.0
    with pytest.raises(ValidationError):
        FockDensity(bad)
    neg = -np.eye(3, dtype=complex)
    with pytest.raises(ValidationError):
        FockDensity(neg)


def test_fidelity_pure_double_sum_oracle():
    rng = np.random.default_rng(11)
    dim = 5
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = a @ a.conj().T
    m /= np.trace(m).real
    rho = FockDensity(m)
    psi = random_vector(dim - 1, 1, seed=12)
    direct = sum(np.conj(psi.amplitudes[i]) * m[i, j] * psi.amplitudes[j]
                 for i in range(dim) for j in range(dim)).real
    assert fidelity_pure(rho, psi) == pytest.approx(direct, abs=1e-12)


def test_project_pattern():
    # project the first mode of |1,0> + |0,1> onto one photon
    cfg = TruncationConfig(1, 2)
    amp = np.zeros((2, 2), dtype=complex)
    amp[1, 0] = amp[0, 1] = 1.0 / np.sqrt(2.0)
    v = FockVector(cfg, amp, normalized=True)
    out = project_pattern(v, {0: 1})
    assert out.modes == 1
    assert not out.normalized
    assert out.norm_sq() == pytest.approx(0.5)
    assert out.amplitudes[0] == pytest.approx(1.0 / np.sqrt(2.0))
    with pytest.raises(ValidationError):
        project_pattern(v, {0: 1, 1: 0})


def test_conditional_density_identity_povm_is_reduced_state():
    v = random_vector(2, 2, seed=21)
    eye = np.eye(3, dtype=complex)
    rho, p = conditional_density(v, [eye], kept_mode=1)
    assert p == pytest.approx(1.0)
    amp = v.amplitudes
    reduced = np.einsum("ka,kb->ab", amp, amp.conj())
    assert np.allclose(rho.matrix, reduced, atol=1e-12)


def test_conditional_density_factorizes_on_product_state():
    # P = eta^2 when two auxiliary modes each hold exactly one photon
    eta = 0.73
    one = number_state(1, 2)
    psi = random_vector(2, 1, seed=31)
    state = tensor_product(tensor_product(one, one), psi)
    e = np.zeros((3, 3), dtype=complex)
    e[1, 1] = eta
    e[2, 2] = eta * (1 - eta)
    rho, p = conditional_density(state, [e, e], kept_mode=2)
    assert p == pytest.approx(eta ** 2, abs=1e-12)
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-10)


def test_conditional_density_zero_probability():
    vac = tensor_product(vacuum_state(2), vacuum_state(2))
    click = np.zeros((3, 3), dtype=complex)
    click[1, 1] = 1.0
    with pytest.raises(DegenerateHeraldError):
        conditional_density(vac, [click], kept_mode=1)


def test_pad_to_cutoff():
    v = number_state(1, 1)
    w = pad_to_cutoff(v, 4)
    assert w.config.dim == 5
    assert w.amplitudes[1] == pytest.approx(1.0)
    assert w.norm_sq() == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        pad_to_cutoff(w, 2)
    assert pad_to_cutoff(v, 1) is v


def test_number_state_validation():
    with pytest.raises(ValidationError):
        number_state(3, 2)
    v = number_state(0, 1)
    assert v.amplitudes[0] == pytest.approx(1.0)
