"""CHSH and absolute Bell-CHSH locality criteria for two-qubit states.

The spectral test ``abs_local_lhs`` is the gate used everywhere. The
piecewise X-state formula in ``l_abs_x`` is reported next to it but never
used for decisions: wherever its second branch applies, the spectral value
is 2 * (t1^2 + t2^2), twice what that branch returns.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, DomainError, HermiticityError
from .linalg import as_matrix, dagger, eigenvalues, hermitian_eigensystem
from .states import BELL_LABELS, BELL_VECTORS, XStateParams, x_state

FLAG_TOL = 1e-12
SPECTRUM_TOL = 1e-9

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# sigma_i x sigma_j stacked as (3, 3, 4, 4)
_PAULI_PAIRS = np.array([[np.kron(si, sj) for sj in PAULI] for si in PAULI])

# diagonal of T for each Bell projector, rows b00, b01, b10, b11
_BELL_T = np.array(
    [
        [1.0, -1.0, 1.0],
        [-1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [-1.0, -1.0, -1.0],
    ]
)


def _two_qubit(rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise DimensionError(f"expected a two-qubit (4x4) state, got {rho.shape}")
    return rho


def correlation_matrix(rho) -> np.ndarray:
    """T_ij = Tr[rho (sigma_i x sigma_j)] with Pauli order X, Y, Z."""
    rho = _two_qubit(rho)
    t = np.einsum("ijab,ba->ij", _PAULI_PAIRS, rho)
    worst = float(np.max(np.abs(t.imag)))
    if worst > SPECTRUM_TOL:
        raise HermiticityError(f"correlation matrix has imaginary part {worst:.3e}", worst)
    return t.real.copy()


def horodecki_M(rho) -> float:
    """Sum of the two largest eigenvalues of T^T T; CHSH is violated iff M > 1."""
    t = correlation_matrix(rho)
    w = eigenvalues(t.T @ t)
    return float(w[0] + w[1])


def chsh_max(m: float) -> float:
    return 2.0 * math.sqrt(max(m, 0.0))


def _check_spectrum(spec) -> np.ndarray:
    s = np.asarray(spec, dtype=float)
    if s.shape != (4,):
        raise DomainError(f"spectrum must have 4 entries, got {s.shape}")
    if np.any(np.diff(s) > FLAG_TOL):
        raise DomainError(f"spectrum is not sorted in decreasing order: {s.tolist()}")
    return s


def abs_local_lhs(spec) -> float:
    """(2a1 + 2a2 - 1)^2 + (2a1 + 2a3 - 1)^2 for a descending spectrum.

    The state is absolutely Bell-CHSH local iff the value is at most 1.
    """
    a1, a2, a3, _ = _check_spectrum(spec)
    return float((2 * a1 + 2 * a2 - 1) ** 2 + (2 * a1 + 2 * a3 - 1) ** 2)


class XCriterion(NamedTuple):
    value: float
    branch: int
    spectral: float
    thetas: tuple


def x_thetas(params: XStateParams) -> tuple:
    t1 = math.sqrt((params.a - params.d) ** 2 + 4 * params.p**2)
    t2 = math.sqrt((params.b - params.c) ** 2 + 4 * params.q**2)
    t3 = params.a + params.d - params.b - params.c
    return t1, t2, t3


def l_abs_x(params: XStateParams) -> XCriterion:
    """Piecewise X-state value plus the spectral value of the same state.

    Branch 1, ``(t1 + t2)^2 + t3^2``, is taken whenever
    ``t3^2 >= (t1 - t2)^2`` (ties included); otherwise branch 2,
    ``t1^2 + t2^2``.
    """
    t1, t2, t3 = x_thetas(params)
    if t3**2 >= (t1 - t2) ** 2:
        value, branch = (t1 + t2) ** 2 + t3**2, 1
    else:
        value, branch = t1**2 + t2**2, 2
    spectral = abs_local_lhs(eigenvalues(x_state(params)))
    return XCriterion(value, branch, spectral, (t1, t2, t3))


def lhv_threshold_gamma(beta: float) -> float:
    """Largest gamma with a projective LHV model for the lhv_state family."""
    if not -FLAG_TOL <= beta <= math.pi / 2 + FLAG_TOL:
        raise DomainError(f"beta={beta!r} outside [0, pi/2]")
    return 1.0 / (1.0 + math.sin(2.0 * beta))


def has_lhv(gamma: float, beta: float) -> bool:
    return gamma <= lhv_threshold_gamma(beta) + FLAG_TOL


def bell_diagonal_M(weights) -> float:
    """Horodecki M of sum_k w_k |B_k><B_k|, with T diagonal in closed form."""
    tdiag = np.asarray(weights, dtype=float) @ _BELL_T
    sq = np.sort(tdiag**2)
    return float(sq[-1] + sq[-2])


def best_bell_assignment(values) -> tuple:
    """Exhaustive search over the 24 ways to put ``values`` on Bell projectors.

    Returns ``(perm, M)`` where ``perm[k]`` is the Bell index receiving
    ``values[k]``. The first maximizer in itertools order wins ties.
    """
    values = np.asarray(values, dtype=float)
    best, best_m = None, -math.inf
    for perm in itertools.permutations(range(4)):
        w = np.empty(4)
        w[list(perm)] = values
        m = bell_diagonal_M(w)
        if m > best_m + 1e-15:
            best, best_m = perm, m
    return best, best_m


def optimal_global_unitary(rho):
    """Global unitary U taking rho to the CHSH-optimal Bell-diagonal state.

    Returns ``(U, sigma)`` with ``sigma = U rho U^H``.
    """
    rho = _two_qubit(rho)
    values, vectors = hermitian_eigensystem(rho)
    perm, _ = best_bell_assignment(values)
    u = np.zeros((4, 4), dtype=complex)
    for k, b in enumerate(perm):
        u += np.outer(BELL_VECTORS[BELL_LABELS[b]], vectors[:, k].conj())
    sigma = u @ rho @ dagger(u)
    return u, (sigma + dagger(sigma)) / 2


@dataclass(frozen=True)
class LocalityReport:
    horodecki_M: float
    chsh_max: float
    spectrum: tuple
    abs_lhs: float
    is_chsh_violating: bool
    is_absolutely_local: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spectrum"] = list(self.spectrum)
        return d


def locality_report(rho) -> LocalityReport:
    rho = _two_qubit(rho)
    m = horodecki_M(rho)
    spec = eigenvalues(rho)
    lhs = abs_local_lhs(spec)
    return LocalityReport(
        horodecki_M=m,
        chsh_max=chsh_max(m),
        spectrum=tuple(float(x) for x in spec),
        abs_lhs=lhs,
        is_chsh_violating=bool(m > 1.0 + FLAG_TOL),
        is_absolutely_local=bool(lhs <= 1.0 + FLAG_TOL),
    )


def analyze(rho) -> tuple:
    """Report for ``rho`` and for its image under the optimal global unitary."""
    _, sigma = optimal_global_unitary(rho)
    return locality_report(rho), locality_report(sigma)
