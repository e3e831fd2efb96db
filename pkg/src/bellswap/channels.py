"""Kraus-form qubit channels; amplitude damping applied per qubit."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .linalg import as_matrix, dagger, embed, num_qubits

KRAUS_TOL = 1e-12


def check_kraus(kraus, tol: float = KRAUS_TOL) -> tuple:
    """Validate completeness sum K^H K = I and return the set as a tuple."""
    ops = tuple(np.asarray(k, dtype=complex) for k in kraus)
    if not ops:
        raise DomainError("empty Kraus set")
    dim = ops[0].shape[0]
    total = sum(dagger(k) @ k for k in ops)
    defect = float(np.max(np.abs(total - np.eye(dim))))
    if defect > tol:
        raise DomainError(f"Kraus set is not trace preserving: defect {defect:.3e}")
    return ops


def amplitude_damping_kraus(gamma: float) -> tuple:
    """K0 = diag(1, sqrt(1-gamma)), K1 = sqrt(gamma) |0><1|."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma={gamma!r} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return (k0, k1)


def apply_channel(rho, kraus, qubit: int) -> np.ndarray:
    rho = as_matrix(rho)
    n = num_qubits(rho)
    ops = check_kraus(kraus)
    out = np.zeros_like(rho)
    for k in ops:
        big = embed(k, qubit, n)
        out += big @ rho @ dagger(big)
    return out


def damp_both(rho, gamma: float) -> np.ndarray:
    """Amplitude damping with the same gamma on qubit 0, then qubit 1."""
    kraus = amplitude_damping_kraus(gamma)
    return apply_channel(apply_channel(rho, kraus, 0), kraus, 1)
