import itertools
import math

import numpy as np
import pytest
from scipy.optimize import minimize

from bellswap.errors import DimensionError, DomainError
from bellswap.linalg import is_unitary, tensor
from bellswap.nonlocality import (
    abs_local_lhs,
    bell_diagonal_M,
    best_bell_assignment,
    chsh_max,
    correlation_matrix,
    has_lhv,
    horodecki_M,
    l_abs_x,
    lhv_threshold_gamma,
    locality_report,
    optimal_global_unitary,
)
from bellswap.states import XStateParams, bell_diagonal, bell_state, gisin, lhv_state, random_density, werner
from conftest import haar_unitary, oracle_abs_lhs, oracle_eigvals, random_x_params

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1, -1]).astype(complex)


def _spin(theta, phi):
    return math.sin(theta) * math.cos(phi) * SX + math.sin(theta) * math.sin(phi) * SY + math.cos(theta) * SZ


def chsh_by_angles(rho, seed=0, starts=12):
    """Numerically maximize the CHSH expression over four measurement directions."""

    def neg(x):
        a, a2, b, b2 = (_spin(x[2 * i], x[2 * i + 1]) for i in range(4))
        e = lambda p, q: np.trace(rho @ np.kron(p, q)).real  # noqa: E731
        return -(e(a, b) + e(a, b2) + e(a2, b) - e(a2, b2))

    rng = np.random.default_rng(seed)
    best = max(-minimize(neg, rng.uniform(0, 2 * np.pi, 8), method="BFGS").fun for _ in range(starts))
    return best


class TestCorrelation:
    def test_singlet(self):
        assert np.allclose(correlation_matrix(bell_state("b11")), -np.eye(3), atol=1e-15)

    def test_mixed(self):
        assert np.allclose(correlation_matrix(np.eye(4) / 4), 0, atol=1e-15)

    def test_werner_linear(self):
        for alpha in np.linspace(0, 1, 11):
            assert np.allclose(correlation_matrix(werner(alpha)), -alpha * np.eye(3), atol=1e-15)

    def test_dimension(self):
        with pytest.raises(DimensionError):
            correlation_matrix(np.eye(2) / 2)


class TestHorodecki:
    def test_values(self):
        assert horodecki_M(bell_state("b11")) == pytest.approx(2, abs=1e-12)
        assert horodecki_M(np.eye(4) / 4) == pytest.approx(0, abs=1e-15)
        assert horodecki_M(werner(0.8)) == pytest.approx(1.28, abs=1e-12)

    def test_werner_matches_angle_maximization(self):
        m = horodecki_M(werner(0.8))
        assert chsh_max(m) == pytest.approx(chsh_by_angles(werner(0.8)), abs=1e-6)

    def test_random_state_matches_angle_maximization(self):
        rho = random_density(3)
        assert chsh_max(horodecki_M(rho)) == pytest.approx(chsh_by_angles(rho, seed=1), abs=1e-6)

    def test_local_unitary_invariance(self):
        rng = np.random.default_rng(99)
        worst = 0.0
        for seed in range(10_000):
            rho = random_density(seed)
            u = tensor(haar_unitary(rng), haar_unitary(rng))
            worst = max(worst, abs(horodecki_M(u @ rho @ u.conj().T) - horodecki_M(rho)))
        assert worst <= 1e-9


class TestAbsLocal:
    def test_values(self):
        assert abs_local_lhs([0.25] * 4) == 0
        assert abs_local_lhs([1, 0, 0, 0]) == 2

    def test_werner(self):
        for alpha in np.linspace(0, 1, 21):
            spec = [(1 + 3 * alpha) / 4] + [(1 - alpha) / 4] * 3
            assert abs_local_lhs(spec) == pytest.approx(2 * alpha**2, abs=1e-12)

    def test_unsorted(self):
        with pytest.raises(DomainError):
            abs_local_lhs([0.1, 0.2, 0.3, 0.4])

    def test_werner_flags_at_boundary(self):
        edge = 1 / math.sqrt(2)
        above = locality_report(werner(edge + 1e-6))
        below = locality_report(werner(edge - 1e-6))
        assert above.is_chsh_violating and not above.is_absolutely_local
        assert not below.is_chsh_violating and below.is_absolutely_local

    def test_gisin_threshold_all_alpha(self):
        edge = 1 / math.sqrt(2)
        for alpha in np.linspace(0, math.pi / 4, 50):
            assert locality_report(gisin(edge - 1e-6, alpha)).is_absolutely_local
            assert not locality_report(gisin(edge + 1e-6, alpha)).is_absolutely_local


class TestXCriterion:
    def test_werner_tie_case(self):
        res = l_abs_x(XStateParams.werner(0.6))
        t1, t2, t3 = res.thetas
        assert t1 == pytest.approx(0) and t2 == pytest.approx(0.6) and t3 == pytest.approx(-0.6)
        assert res.branch == 1
        assert res.value == pytest.approx(2 * 0.36) == res.spectral

    def test_boundary_case(self):
        res = l_abs_x(XStateParams(0.5, 0.5, 0, 0))
        assert res.branch == 1 and res.value == pytest.approx(1) and res.spectral == pytest.approx(1)

    def test_recorded_discrepancy(self):
        res = l_abs_x(XStateParams(0.4, 0.1, 0.1, 0.4, 0.4, 0.0))
        assert res.branch == 2
        assert res.value == pytest.approx(0.64, abs=1e-12)
        assert res.spectral == pytest.approx(1.28, abs=1e-12)

    def test_second_branch_is_half_spectral(self):
        rng = np.random.default_rng(5)
        seen = 0
        for _ in range(2000):
            res = l_abs_x(XStateParams(*random_x_params(rng)))
            if res.branch == 2:
                seen += 1
                assert res.spectral == pytest.approx(2 * res.value, abs=1e-9)
        assert seen > 100


class TestLHV:
    def test_threshold(self):
        assert lhv_threshold_gamma(0) == 1
        assert lhv_threshold_gamma(math.pi / 4) == pytest.approx(0.5)
        with pytest.raises(DomainError):
            lhv_threshold_gamma(2)

    def test_half_always_lhv_and_absolutely_local(self):
        for beta in np.linspace(0, math.pi / 2, 51):
            assert has_lhv(0.5, beta)
            assert locality_report(lhv_state(0.5, beta)).is_absolutely_local

    def test_above_threshold(self):
        assert not has_lhv(0.6, math.pi / 4)


class TestOptimalUnitary:
    def test_mixed(self):
        u, sigma = optimal_global_unitary(np.eye(4) / 4)
        assert np.allclose(sigma, np.eye(4) / 4) and is_unitary(u)
        assert horodecki_M(sigma) == pytest.approx(0, abs=1e-12)

    def test_pure(self):
        vec = np.array([0.6, 0.0, 0.8j, 0.0])
        _, sigma = optimal_global_unitary(np.outer(vec, vec.conj()))
        assert horodecki_M(sigma) == pytest.approx(2, abs=1e-9)
        assert any(np.allclose(sigma, bell_state(lab), atol=1e-9) for lab in ("b00", "b01", "b10", "b11"))

    def test_werner(self):
        _, sigma = optimal_global_unitary(werner(0.8))
        assert horodecki_M(sigma) == pytest.approx(1.28, abs=1e-9)

    def test_sigma_is_bell_diagonal_same_spectrum(self):
        rho = random_density(17)
        u, sigma = optimal_global_unitary(rho)
        assert is_unitary(u)
        assert np.allclose(oracle_eigvals(sigma), oracle_eigvals(rho), atol=1e-12)
        for a, b in itertools.combinations(("b00", "b01", "b10", "b11"), 2):
            # off-diagonal in the Bell basis vanishes
            va = np.linalg.eigh(bell_state(a))[1][:, -1]
            vb = np.linalg.eigh(bell_state(b))[1][:, -1]
            assert abs(va.conj() @ sigma @ vb) <= 1e-9

    def test_bell_diagonal_closed_form(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            w = rng.dirichlet(np.ones(4))
            assert bell_diagonal_M(w) == pytest.approx(horodecki_M(bell_diagonal(*w)), abs=1e-12)

    def test_best_assignment_equals_abs_lhs(self):
        rng = np.random.default_rng(4)
        for _ in range(500):
            w = np.sort(rng.dirichlet(np.ones(4)))[::-1]
            _, m = best_bell_assignment(w)
            assert m == pytest.approx(abs_local_lhs(w), abs=1e-12)

    def test_random_states(self):
        for seed in range(500):
            rho = random_density(seed)
            _, sigma = optimal_global_unitary(rho)
            m = horodecki_M(sigma)
            assert m == pytest.approx(oracle_abs_lhs(rho), abs=1e-9)
            assert m >= horodecki_M(rho) - 1e-9


def test_report_consistency():
    for seed in range(50):
        r = locality_report(random_density(seed))
        assert r.chsh_max**2 == pytest.approx(4 * r.horodecki_M, abs=1e-9)
        assert r.is_chsh_violating == (r.horodecki_M > 1 + 1e-12)
        assert r.is_absolutely_local == (r.abs_lhs <= 1 + 1e-12)
        assert list(r.spectrum) == sorted(r.spectrum, reverse=True)
    d = locality_report(werner(1)).to_dict()
    assert list(d) == ["horodecki_M", "chsh_max", "spectrum", "abs_lhs", "is_chsh_violating", "is_absolutely_local"]
