"""Two-qubit state families, Bell basis and seeded random states.

Every constructor returns a plain 4x4 complex ndarray. Random states use
numpy's ``default_rng(seed)`` (PCG64); the Ginibre matrix G is drawn as
``standard_normal((4, 4)) + 1j * standard_normal((4, 4))``, real block first.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError

SUM_TOL = 1e-12

_S2 = 1.0 / math.sqrt(2.0)


class BellLabel(str, enum.Enum):
    """Bob's Bell outcomes: b00=phi+, b01=phi-, b10=psi+, b11=psi-."""

    b00 = "b00"
    b01 = "b01"
    b10 = "b10"
    b11 = "b11"

    @classmethod
    def parse(cls, text) -> "BellLabel":
        if isinstance(text, cls):
            return text
        key = str(text).strip()
        aliases = {"phi+": "b00", "phi-": "b01", "psi+": "b10", "psi-": "b11"}
        key = aliases.get(key.lower(), key)
        try:
            return cls(key)
        except ValueError:
            raise ParseError(f"unknown Bell label {text!r}") from None


BELL_LABELS = tuple(BellLabel)

BELL_VECTORS = {
    BellLabel.b00: np.array([_S2, 0, 0, _S2], dtype=complex),
    BellLabel.b01: np.array([_S2, 0, 0, -_S2], dtype=complex),
    BellLabel.b10: np.array([0, _S2, _S2, 0], dtype=complex),
    BellLabel.b11: np.array([0, _S2, -_S2, 0], dtype=complex),
}


def projector(vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def _check_range(name, value, lo, hi):
    if not (lo - SUM_TOL <= value <= hi + SUM_TOL) or math.isnan(value):
        raise DomainError(f"{name}={value!r} outside [{lo}, {hi}]")


def _check_probabilities(names, values):
    for n, v in zip(names, values):
        if not v >= 0.0:
            raise DomainError(f"{n}={v!r} is negative")
    total = math.fsum(values)
    if abs(total - 1.0) > SUM_TOL:
        raise DomainError(f"{'+'.join(names)} = {total!r}, must equal 1")


def bell_state(label) -> np.ndarray:
    return projector(BELL_VECTORS[BellLabel.parse(label)])


def werner(alpha: float) -> np.ndarray:
    """alpha |psi-><psi-| + (1 - alpha) I/4."""
    _check_range("alpha", alpha, 0.0, 1.0)
    return alpha * bell_state(BellLabel.b11) + (1.0 - alpha) * np.eye(4, dtype=complex) / 4


@dataclass(frozen=True)
class XStateParams:
    """Populations a, b, c, d on |00>..|11>; coherences p (|00><11|) and q (|01><10|)."""

    a: float
    b: float
    c: float
    d: float
    p: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        _check_probabilities("abcd", (self.a, self.b, self.c, self.d))
        if self.p**2 > self.a * self.d + SUM_TOL:
            raise DomainError(f"p^2 <= a*d violated: p^2={self.p**2!r}, a*d={self.a * self.d!r}")
        if self.q**2 > self.b * self.c + SUM_TOL:
            raise DomainError(f"q^2 <= b*c violated: q^2={self.q**2!r}, b*c={self.b * self.c!r}")

    @classmethod
    def werner(cls, alpha: float) -> "XStateParams":
        return cls((1 - alpha) / 4, (1 + alpha) / 4, (1 + alpha) / 4, (1 - alpha) / 4, 0.0, -alpha / 2)


def x_state(params: XStateParams) -> np.ndarray:
    a, b, c, d, p, q = params.a, params.b, params.c, params.d, params.p, params.q
    return np.array(
        [
            [a, 0, 0, p],
            [0, b, q, 0],
            [0, q, c, 0],
            [p, 0, 0, d],
        ],
        dtype=complex,
    )


def diag_state(a: float, b: float, c: float, d: float) -> np.ndarray:
    _check_probabilities("abcd", (a, b, c, d))
    return np.diag(np.array([a, b, c, d], dtype=complex))


def gisin(lam: float, alpha: float) -> np.ndarray:
    """lam |v><v| + (1 - lam)/2 (|00><00| + |11><11|), v = sin(alpha)|01> + cos(alpha)|10>."""
    _check_range("lambda", lam, 0.0, 1.0)
    _check_range("alpha", alpha, 0.0, math.pi / 4)
    v = np.array([0.0, math.sin(alpha), math.cos(alpha), 0.0], dtype=complex)
    return lam * projector(v) + (1.0 - lam) / 2 * np.diag([1, 0, 0, 1]).astype(complex)


def lhv_state(gamma: float, beta: float) -> np.ndarray:
    """gamma |v><v| + (1 - gamma) |00><00|, v = cos(beta)|01> - sin(beta)|10>."""
    _check_range("gamma", gamma, 0.0, 1.0)
    _check_range("beta", beta, 0.0, math.pi / 2)
    v = np.array([0.0, math.cos(beta), -math.sin(beta), 0.0], dtype=complex)
    return gamma * projector(v) + (1.0 - gamma) * np.diag([1, 0, 0, 0]).astype(complex)


def bell_diagonal(p1: float, p2: float, p3: float, p4: float) -> np.ndarray:
    """Mixture of the Bell projectors b00, b01, b10, b11 with the given weights."""
    weights = (p1, p2, p3, p4)
    _check_probabilities(("p1", "p2", "p3", "p4"), weights)
    return sum(w * bell_state(lab) for w, lab in zip(weights, BELL_LABELS))


def random_density(seed: int, dim: int = 4) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


# --- family spec strings ------------------------------------------------

_FAMILIES = {
    "werner": (werner, ("alpha",)),
    "gisin": (gisin, ("lambda", "alpha")),
    "diag": (diag_state, ("a", "b", "c", "d")),
    "lhv": (lhv_state, ("gamma", "beta")),
    "x": (lambda *v: x_state(XStateParams(*v)), ("a", "b", "c", "d", "p", "q")),
}


def parse_number(text: str) -> float:
    t = text.strip().lower().replace(" ", "")
    # allow pi fractions such as "pi/4" or "0.25*pi"
    if "pi" in t:
        t2 = t.replace("pi", "")
        num, den = 1.0, 1.0
        if "/" in t2:
            t2, d = t2.split("/", 1)
            den = float(d)
        t2 = t2.rstrip("*")
        if t2:
            num = float(t2)
        return num * math.pi / den
    return float(t)


def parse_state_spec(spec: str) -> np.ndarray:
    """Build a state from strings like ``"werner:alpha=0.7"`` or ``"bell:b00"``."""
    family, _, rest = spec.strip().partition(":")
    family = family.strip().lower()
    if family == "bell":
        return bell_state(BellLabel.parse(rest))
    if family not in _FAMILIES:
        raise ParseError(f"unknown state family {family!r} in {spec!r}")
    ctor, names = _FAMILIES[family]
    values = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ParseError(f"expected key=value, got {item!r} in {spec!r}")
        key = key.strip()
        if key not in names:
            raise ParseError(f"unknown parameter {key!r} for family {family!r}")
        try:
            values[key] = parse_number(val)
        except ValueError:
            raise ParseError(f"bad number {val!r} for {key!r}") from None
    if family == "x":
        values.setdefault("p", 0.0)
        values.setdefault("q", 0.0)
    missing = [n for n in names if n not in values]
    if missing:
        raise ParseError(f"missing parameters {missing} for family {family!r}")
    return ctor(*(values[n] for n in names))
