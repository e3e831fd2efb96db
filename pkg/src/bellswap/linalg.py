"""Dense complex-matrix kernel for qubit density matrices.

Basis convention: computational basis |00>, |01>, |10>, |11>, with qubit 0
the leftmost (most significant) tensor factor.
"""

from __future__ import annotations

import json
import math
from functools import reduce
from pathlib import Path

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    HermiticityError,
    ParseError,
    PositivityError,
    TraceError,
)

VALIDATION_TOL = 1e-9
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square complex ndarray, raising on bad shapes."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def num_qubits(m) -> int:
    dim = np.shape(m)[0]
    n = int(round(math.log2(dim))) if dim > 0 else -1
    if n < 1 or 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def tensor(*mats) -> np.ndarray:
    """Kronecker product, first argument major."""
    if not mats:
        raise ValueError("tensor() needs at least one matrix")
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def partial_trace(rho, keep) -> np.ndarray:
    """Trace out every qubit not listed in ``keep``.

    The kept qubits appear in the result in the order given by ``keep``.
    """
    rho = as_matrix(rho)
    n = num_qubits(rho)
    keep = [int(k) for k in keep]
    if not keep:
        raise ValueError("keep must name at least one qubit")
    for k in keep:
        if not 0 <= k < n:
            raise IndexError(f"qubit index {k} out of range for {n} qubits")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate qubit indices in {keep}")

    traced = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    # bra axes sit at n + q; contract each traced ket axis with its bra axis
    row = list(range(n))
    col = [n + q for q in range(n)]
    for q in traced:
        col[q] = row[q]
    out_axes = [row[q] for q in keep] + [col[q] for q in keep]
    d = 2 ** len(keep)
    return np.einsum(t, row + col, out_axes).reshape(d, d)


def embed(op, qubit: int, n: int) -> np.ndarray:
    """Lift a single-qubit operator to act on ``qubit`` of an n-qubit register."""
    if not 0 <= qubit < n:
        raise IndexError(f"qubit index {qubit} out of range for {n} qubits")
    eye = np.eye(2, dtype=complex)
    return tensor(*(op if q == qubit else eye for q in range(n)))


def _off_norm(a) -> float:
    n = len(a)
    return math.sqrt(sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j))


def jacobi_eigh(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic complex Jacobi diagonalization of a Hermitian matrix.

    Each pivot (p, q) is first made real by a phase on column q, then
    annihilated by a real plane rotation. Only columns are rotated; rows are
    mirrored as conjugates, so the working matrix stays exactly Hermitian.
    Stops once the off-diagonal Frobenius norm is at most
    ``tol * max(1, ||m||_F)``.

    Returns ``(values, vectors)`` in the solver's own (unsorted) order.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    # scalar complex arithmetic beats numpy call overhead at n <= 16
    a = m.tolist()
    v = np.eye(n, dtype=complex).tolist()
    target = tol * max(1.0, float(np.linalg.norm(m)))
    for _ in range(max_sweeps):
        if _off_norm(a) <= target:
            return np.array([a[i][i].real for i in range(n)]), np.array(v)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                mag = abs(apq)
                if mag < 1e-300:
                    a[p][q] = a[q][p] = 0j
                    continue
                ph = (apq / mag).conjugate()
                app = a[p][p].real
                aqq = a[q][q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # column transform by [[c, s], [-s*ph, c*ph]]
                sph = s * ph
                cph = c * ph
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k][p]
                    akq = a[k][q]
                    nkp = c * akp - sph * akq
                    nkq = s * akp + cph * akq
                    a[k][p] = nkp
                    a[k][q] = nkq
                    a[p][k] = nkp.conjugate()
                    a[q][k] = nkq.conjugate()
                for row in v:
                    vkp = row[p]
                    vkq = row[q]
                    row[p] = c * vkp - sph * vkq
                    row[q] = s * vkp + cph * vkq
                a[p][q] = a[q][p] = 0j
                a[p][p] = complex(app - t * mag)
                a[q][q] = complex(aqq + t * mag)
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def hermitian_eigensystem(m, tol: float = VALIDATION_TOL):
    """Eigenvalues (descending) and matching eigenvector columns.

    The input is symmetrized as (m + m^H)/2 before solving; a Hermiticity
    defect larger than ``tol`` is rejected.
    """
    a = as_matrix(m)
    defect = float(np.max(np.abs(a - dagger(a))))
    if defect > tol:
        raise HermiticityError(f"matrix is not Hermitian: max |m - m^H| = {defect:.3e}", defect)
    values, vectors = jacobi_eigh((a + dagger(a)) / 2)
    order = np.argsort(-values, kind="stable")
    return values[order], vectors[:, order]


def eigenvalues(m) -> np.ndarray:
    return hermitian_eigensystem(m)[0]


def spectrum(rho) -> np.ndarray:
    """Sorted (descending) eigenvalues of a density matrix."""
    return eigenvalues(rho)


def validate_density(m, tol: float = VALIDATION_TOL) -> np.ndarray:
    """Check the three density-matrix invariants and return the Hermitian part.

    Raises the specific ``ValidationError`` subclass for the first violated
    invariant, carrying the offending magnitude.
    """
    a = as_matrix(m)
    num_qubits(a)
    defect = float(np.max(np.abs(a - dagger(a))))
    if defect > tol:
        raise HermiticityError(f"not Hermitian: max |m - m^H| = {defect:.3e}", defect)
    h = (a + dagger(a)) / 2
    tr = float(np.trace(h).real)
    if abs(tr - 1.0) > tol:
        raise TraceError(f"trace is {tr!r}, deviation {abs(tr - 1.0):.3e}", abs(tr - 1.0))
    lowest = float(eigenvalues(h)[-1])
    if lowest < -tol:
        raise PositivityError(f"negative eigenvalue {lowest:.3e}", lowest)
    return h


def is_unitary(u, tol: float = VALIDATION_TOL) -> bool:
    u = as_matrix(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0])))) <= tol


# --- matrix file format -------------------------------------------------


def _fmt17(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    if x == 0.0:
        return "0"
    return format(x, ".17g")


def matrix_to_json(m) -> str:
    """Serialize as ``{"dim", "re", "im"}`` with 17 significant digits."""
    a = as_matrix(m)

    def block(part):
        rows = ("[" + ", ".join(_fmt17(float(x)) for x in row) + "]" for row in part)
        return "[" + ", ".join(rows) + "]"

    return '{"dim": %d, "re": %s, "im": %s}' % (a.shape[0], block(a.real), block(a.imag))


def matrix_to_dict(m) -> dict:
    return json.loads(matrix_to_json(m))


def matrix_from_dict(obj) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix object: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ParseError(f"matrix entries do not match dim={dim}: re {re.shape}, im {im.shape}")
    return re + 1j * im


def matrix_from_json(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return matrix_from_dict(obj)


def save_matrix(path, m) -> None:
    Path(path).write_text(matrix_to_json(m) + "\n")


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(Path(path).read_text())
