import math

import numpy as np
import pytest

from bellswap.channels import amplitude_damping_kraus, apply_channel, check_kraus, damp_both
from bellswap.errors import DomainError
from bellswap.linalg import validate_density
from bellswap.states import random_density, werner


def damped_werner_entries(alpha, gamma):
    """Closed-form damped Werner matrix, written out entry by entry."""
    m = np.zeros((4, 4))
    m[0, 0] = ((1 - alpha) * (1 + gamma**2) + 2 * (1 + alpha) * gamma) / 4
    m[1, 1] = m[2, 2] = (1 - gamma) * (1 + gamma + alpha * (1 - gamma)) / 4
    m[1, 2] = m[2, 1] = -alpha * (1 - gamma) / 2
    m[3, 3] = (1 - alpha) * (1 - gamma) ** 2 / 4
    return m


def test_kraus_endpoints():
    k0, k1 = amplitude_damping_kraus(0)
    assert np.array_equal(k0, np.eye(2)) and not k1.any()
    k0, k1 = amplitude_damping_kraus(1)
    assert np.array_equal(k0, np.diag([1, 0]))
    assert np.array_equal(k1, np.array([[0, 1], [0, 0]]))
    k0, _ = amplitude_damping_kraus(0.5)
    assert k0[1, 1] == pytest.approx(1 / math.sqrt(2))


def test_kraus_complete():
    for g in np.linspace(0, 1, 21):
        check_kraus(amplitude_damping_kraus(g))


@pytest.mark.parametrize("gamma", [-0.01, 1.01])
def test_kraus_domain(gamma):
    with pytest.raises(DomainError):
        amplitude_damping_kraus(gamma)


def test_incomplete_kraus_rejected():
    with pytest.raises(DomainError):
        check_kraus([np.eye(2) * 0.5])


def test_identity_channel():
    rho = random_density(3)
    assert np.max(np.abs(apply_channel(rho, [np.eye(2)], 1) - rho)) <= 1e-15


def test_full_damping():
    for seed in range(20):
        out = damp_both(random_density(seed), 1.0)
        assert np.allclose(out, np.diag([1, 0, 0, 0]), atol=1e-15)


def test_single_qubit_decay():
    rho = np.diag([0, 0, 0, 1]).astype(complex)
    out = apply_channel(rho, amplitude_damping_kraus(0.5), 0)
    assert np.allclose(out, np.diag([0, 0.5, 0, 0.5]), atol=1e-15)


def test_bad_qubit():
    with pytest.raises(IndexError):
        apply_channel(np.eye(4) / 4, amplitude_damping_kraus(0.2), 2)


def test_gamma_zero_noop():
    rho = random_density(5)
    assert np.allclose(damp_both(rho, 0), rho, atol=1e-15)


def test_damped_werner_matches_closed_form_grid():
    for alpha in np.linspace(0, 1, 21):
        for gamma in np.linspace(0, 1, 21):
            got = damp_both(werner(alpha), gamma)
            assert np.max(np.abs(got - damped_werner_entries(alpha, gamma))) <= 1e-12


def test_damping_one_qubit_does_not_match():
    # only the same-gamma action on both qubits reproduces the closed form
    got = apply_channel(werner(0.6), amplitude_damping_kraus(0.5), 0)
    assert np.max(np.abs(got - damped_werner_entries(0.6, 0.5))) > 1e-3


def test_trace_and_positivity_random():
    for seed in range(100):
        rho = random_density(seed)
        for g in np.linspace(0, 1, 11):
            out = damp_both(rho, g)
            assert abs(np.trace(out) - 1) <= 1e-12
            validate_density(out)
    for seed in range(100, 1100):
        out = apply_channel(random_density(seed), amplitude_damping_kraus(0.37), seed % 2)
        assert abs(np.trace(out) - 1) <= 1e-12
