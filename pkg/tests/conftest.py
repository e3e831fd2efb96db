"""Shared fixtures and independent oracles.

The oracles here never call into bellswap's linear algebra: they build
matrices entry by entry and use numpy.linalg for eigenvalues.
"""

import math

import numpy as np
import pytest

ACCEPTANCE_LINES = []


def oracle_eigvals(m):
    """Descending eigenvalues via LAPACK."""
    m = np.asarray(m, dtype=complex)
    return np.linalg.eigvalsh((m + m.conj().T) / 2)[::-1]


def oracle_abs_lhs(m):
    a = oracle_eigvals(m)
    return (2 * a[0] + 2 * a[1] - 1) ** 2 + (2 * a[0] + 2 * a[2] - 1) ** 2


_S = 1 / math.sqrt(2)
# Bell vectors as {basis index: amplitude}, labels b00, b01, b10, b11
ORACLE_BELL = {
    "b00": {0b00: _S, 0b11: _S},
    "b01": {0b00: _S, 0b11: -_S},
    "b10": {0b01: _S, 0b10: _S},
    "b11": {0b01: _S, 0b10: -_S},
}


def oracle_swap(rho_ab, rho_bc):
    """Brute-force swap with explicit index loops.

    Joint basis index bits are (A, B1, B2, C), A most significant. Returns
    {label: (probability, conditional 4x4 or None)}.
    """
    rho_ab = np.asarray(rho_ab, dtype=complex)
    rho_bc = np.asarray(rho_bc, dtype=complex)

    def joint(i, j):
        ab_i, bc_i = i >> 2, i & 3
        ab_j, bc_j = j >> 2, j & 3
        return rho_ab[ab_i, ab_j] * rho_bc[bc_i, bc_j]

    out = {}
    for label, vec in ORACLE_BELL.items():
        # reduced[(a,c),(a',c')] = sum_{m,n} <b|mn> <mn|..|m'n'> <m'n'|b> amplitudes
        red = np.zeros((4, 4), dtype=complex)
        for a in range(2):
            for c in range(2):
                for a2 in range(2):
                    for c2 in range(2):
                        acc = 0j
                        for mn, amp in vec.items():
                            for mn2, amp2 in vec.items():
                                i = (a << 3) | (mn << 1) | c
                                j = (a2 << 3) | (mn2 << 1) | c2
                                acc += np.conj(amp) * joint(i, j) * amp2
                        red[2 * a + c, 2 * a2 + c2] = acc
        p = float(np.trace(red).real)
        out[label] = (p, red / p if p > 1e-12 else None)
    return out


def haar_unitary(rng, n=2):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_x_params(rng):
    a, b, c, d = rng.dirichlet(np.ones(4))
    p = rng.uniform(-1, 1) * math.sqrt(a * d)
    q = rng.uniform(-1, 1) * math.sqrt(b * c)
    return a, b, c, d, p, q


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
