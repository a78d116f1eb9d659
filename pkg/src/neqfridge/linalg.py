"""Dense complex linear algebra on the small fixed dimensions used by the model.

Everything works on plain numpy arrays: 2x2 single-qubit operators, 4x4
fridge operators, 8x8 three-qubit operators and the 64x64 vectorized
generator.  Vectorization is column-stacking throughout, so that
vec(A @ rho @ B) = kron(B.T, A) @ vec(rho).

Qubit ordering convention: |q1 q2 q3> with qubit 1 most significant, and
|0> is the *higher*-energy state of each qubit (sigma_z = |0><0| - |1><1|).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateSteadyStateError

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |0><1|
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |1><0|


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the left factor most significant."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def embed(op: np.ndarray, acting_on, n_qubits: int = 3) -> np.ndarray:
    """Tensor `op` with identities so it acts on the listed qubit slots.

    `acting_on` is a 1-based qubit index or tuple of distinct indices; the
    slot order of `op` follows the tuple order.
    """
    if isinstance(acting_on, int):
        acting_on = (acting_on,)
    acting_on = tuple(acting_on)
    if len(set(acting_on)) != len(acting_on):
        raise IndexError(f"repeated qubit index in {acting_on}")
    if any(q < 1 or q > n_qubits for q in acting_on):
        raise IndexError(f"qubit index out of range 1..{n_qubits}: {acting_on}")
    op = np.asarray(op, dtype=complex)
    k = len(acting_on)
    if op.shape != (2 ** k, 2 ** k):
        raise ValueError(f"operator shape {op.shape} does not match {k} qubit slot(s)")
    rest = [q for q in range(1, n_qubits + 1) if q not in acting_on]
    full = np.kron(op, np.eye(2 ** len(rest), dtype=complex))
    order = list(acting_on) + rest
    perm = [order.index(q) for q in range(1, n_qubits + 1)]
    tensor = full.reshape((2,) * (2 * n_qubits))
    tensor = tensor.transpose(tuple(perm) + tuple(n_qubits + p for p in perm))
    return tensor.reshape(2 ** n_qubits, 2 ** n_qubits)


def partial_trace(rho: np.ndarray, keep, n_qubits: int = 3) -> np.ndarray:
    """Reduced operator on the kept qubits (1-based indices, ascending order)."""
    if isinstance(keep, int):
        keep = (keep,)
    keep = tuple(sorted(set(keep)))
    if not keep or any(q < 1 or q > n_qubits for q in keep):
        raise IndexError(f"keep must be a nonempty subset of 1..{n_qubits}: {keep}")
    rho = np.asarray(rho, dtype=complex)
    rows = [chr(ord("a") + i) for i in range(n_qubits)]
    cols = [chr(ord("a") + n_qubits + i) for i in range(n_qubits)]
    for q in range(1, n_qubits + 1):
        if q not in keep:
            cols[q - 1] = rows[q - 1]
    out = "".join(rows[q - 1] for q in keep) + "".join(cols[q - 1] for q in keep)
    tensor = rho.reshape((2,) * (2 * n_qubits))
    d = 2 ** len(keep)
    return np.einsum("".join(rows + cols) + "->" + out, tensor).reshape(d, d)


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(m, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    d = math.isqrt(v.size)
    if d * d != v.size:
        raise ValueError(f"length {v.size} is not a perfect square")
    return v.reshape(d, d, order="F")


def commutator_superop(h: np.ndarray) -> np.ndarray:
    """Matrix of rho -> -i[h, rho] under column-stacking."""
    h = np.asarray(h, dtype=complex)
    eye = np.eye(h.shape[0], dtype=complex)
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def dissipator_superop(jump: np.ndarray, weight: float = 1.0) -> np.ndarray:
    """Matrix of rho -> weight * (L rho L+ - {L+L, rho}/2)."""
    jump = np.asarray(jump, dtype=complex)
    eye = np.eye(jump.shape[0], dtype=complex)
    anti = jump.conj().T @ jump
    return weight * (
        np.kron(jump.conj(), jump)
        - 0.5 * np.kron(eye, anti)
        - 0.5 * np.kron(anti.T, eye)
    )


def steady_null_space(liouvillian: np.ndarray, degeneracy_ratio: float = 1e-9) -> np.ndarray:
    """Unique trace-one Hermitian kernel state of a Lindblad generator matrix.

    The kernel vector is the right singular vector of the smallest singular
    value; a second singular value below ``degeneracy_ratio * s_max`` signals
    a degenerate steady space.
    """
    liouvillian = np.asarray(liouvillian, dtype=complex)
    _, s, vh = np.linalg.svd(liouvillian)
    if s[0] == 0.0 or s[-2] < degeneracy_ratio * s[0]:
        raise DegenerateSteadyStateError(
            f"steady space is degenerate: singular values {s[-2]:.3e}, {s[-1]:.3e} "
            f"below threshold {degeneracy_ratio:.0e} * {s[0]:.3e}"
        )
    rho = unvec(vh[-1].conj())
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise DegenerateSteadyStateError("kernel vector carries no trace")
    rho = rho / tr
    return 0.5 * (rho + rho.conj().T)


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation from m = m+."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T)))


def density_matrix_defects(rho: np.ndarray) -> tuple[float, float, float]:
    """(hermiticity defect, |trace - 1|, smallest eigenvalue) of a candidate state."""
    herm = hermiticity_defect(rho)
    trace_dev = abs(np.trace(rho) - 1.0)
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    return herm, float(trace_dev), min_eig
