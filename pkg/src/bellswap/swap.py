"""Entanglement swapping with a Bell measurement on Bob's two qubits.

Qubit order of the joint state is (A, B1, B2, C): B1 is the second qubit of
rho_ab, B2 the first qubit of rho_bc. Bob's outcome is modelled by returning
all four conditional branches in label order b00, b01, b10, b11.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError
from .linalg import as_matrix, dagger, partial_trace, tensor
from .nonlocality import LocalityReport, analyze
from .states import BELL_LABELS, BellLabel, bell_state

ZERO_PROBABILITY = 1e-12


@dataclass(frozen=True)
class SwapOutcome:
    label: BellLabel
    probability: float
    conditional_state: Optional[np.ndarray]


@dataclass(frozen=True)
class SwapAnalysis:
    outcome: SwapOutcome
    report: LocalityReport
    post_unitary_report: LocalityReport


def _measurement_operator(label) -> np.ndarray:
    eye = np.eye(2, dtype=complex)
    return tensor(eye, bell_state(label), eye)


_PROJECTORS = {lab: _measurement_operator(lab) for lab in BELL_LABELS}


def swap(rho_ab, rho_bc) -> list:
    """Bob's Bell measurement on (B1, B2); one SwapOutcome per Bell label."""
    rho_ab = as_matrix(rho_ab)
    rho_bc = as_matrix(rho_bc)
    for name, r in (("rho_ab", rho_ab), ("rho_bc", rho_bc)):
        if r.shape != (4, 4):
            raise DimensionError(f"{name} must be a two-qubit state, got {r.shape}")
    joint = tensor(rho_ab, rho_bc)
    outcomes = []
    for label in BELL_LABELS:
        proj = _PROJECTORS[label]
        post = proj @ joint @ dagger(proj)
        prob = float(np.trace(post).real)
        state = None
        if prob >= ZERO_PROBABILITY:
            reduced = partial_trace(post, keep=(0, 3)) / prob
            state = (reduced + dagger(reduced)) / 2
        outcomes.append(SwapOutcome(label, prob, state))
    return outcomes


def swap_then_analyze(rho_ab, rho_bc) -> list:
    """Locality reports for every outcome with non-negligible probability."""
    results = []
    for outcome in swap(rho_ab, rho_bc):
        if outcome.conditional_state is None:
            continue
        report, post = analyze(outcome.conditional_state)
        results.append(SwapAnalysis(outcome, report, post))
    return results


def success_probability(outcomes, labels) -> float:
    """Total probability that Bob reports one of ``labels``."""
    wanted = {BellLabel.parse(x) for x in labels}
    return sum(o.probability for o in outcomes if o.label in wanted)
