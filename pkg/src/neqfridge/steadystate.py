"""The stationary state, two independent ways.

The closed-form route: in the dressed frame the steady state lives in a
nine-operator family (identity, the three dressed sigma_z's, their pair and
triple products, and one antisymmetric coherence operator Y).  The family
closes under the generator, so the coefficients solve a small linear system
whose solution is implemented here verbatim.

The numeric route: the 64x64 generator is assembled and its kernel extracted
by singular value decomposition.  The two routes adjudicate one another; the
package treats the null space as ground truth and the closed form as the
fast path validated against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .dissipation import assemble_liouvillian
from .errors import ParameterError
from .linalg import steady_null_space, vec
from .model import (
    Frame,
    ModelParams,
    ThermalPopulations,
    resolve_resonance,
    thermal_populations,
    tilde_operator,
)


@dataclass(frozen=True)
class SteadyDecomposition:
    """Coefficients of the steady state over the dressed operator family.

    a_i multiply the dressed sigma_z's, b_ij the pair products, c the triple
    product, and d the coherence operator Y; d measures the deviation from
    the product of three thermal states and its sign decides cooling.
    """

    a1: float
    a2: float
    a3: float
    b12: float
    b13: float
    b23: float
    c: float
    d: float

    def as_dict(self) -> dict[str, float]:
        return {
            "a1": self.a1, "a2": self.a2, "a3": self.a3,
            "b12": self.b12, "b13": self.b13, "b23": self.b23,
            "c": self.c, "d": self.d,
        }


@dataclass(frozen=True)
class SteadyStateResult:
    """A steady state with its decomposition and solver diagnostics."""

    rho: np.ndarray
    decomposition: SteadyDecomposition
    method: str  # "analytic" | "numeric"
    residual: float
    off_family_max: float


def coherence_operator(frame: Frame) -> np.ndarray:
    """The Hermitian operator Y = -i s1+ s2~- s3~+ + i s1- s2~+ s3~-."""
    return -1j * tilde_operator(frame, "+", "-+") + 1j * tilde_operator(frame, "-", "+-")


def family_operators(frame: Frame) -> dict[str, np.ndarray]:
    """The nine-operator family spanning the steady state, keyed by name."""
    z1 = tilde_operator(frame, "z", "ii")
    z2 = tilde_operator(frame, "i", "zi")
    z3 = tilde_operator(frame, "i", "iz")
    return {
        "identity": np.eye(8, dtype=complex),
        "a1": z1,
        "a2": z2,
        "a3": z3,
        "b12": z1 @ z2,
        "b13": z1 @ z3,
        "b23": z2 @ z3,
        "c": z1 @ z2 @ z3,
        "d": coherence_operator(frame),
    }


def steady_coefficients(pops: ThermalPopulations, p: float, g: float) -> SteadyDecomposition:
    """Closed-form steady-state coefficients from the bath populations.

    The deviation d is proportional to the imbalance between the two
    directions of the resonant three-body exchange; the remaining
    coefficients follow from the per-channel balance conditions.
    """
    if pops.r1 is None or pops.s1 is None:
        raise ParameterError("populations lack the target entry r1")
    r1, rt2, rt3 = pops.r1, pops.rtilde2, pops.rtilde3
    s1, s2, s3 = pops.s1, pops.s2, pops.s3
    numerator = 48.0 * ((1.0 - r1) * rt2 * (1.0 - rt3) - r1 * (1.0 - rt2) * rt3) * p * g
    om12 = r1 * (1.0 - rt2) + (1.0 - r1) * rt2
    om23 = rt2 * (1.0 - rt3) + (1.0 - rt2) * rt3
    om31 = r1 * rt3 + (1.0 - r1) * (1.0 - rt3)
    d = numerator / (9.0 * p * p + (14.0 + 4.0 * (om12 + om23 + om31)) * g * g)
    k = (g / p) * (0.5 * d)
    a1 = s1 + k
    a2 = s2 - k
    a3 = s3 + k
    b12 = 0.5 * (s1 * a2 + s2 * a1)
    b13 = 0.5 * (s1 * a3 + s3 * a1)
    b23 = 0.5 * (s2 * a3 + s3 * a2)
    c = (s1 * b23 + s2 * b13 + s3 * b12 - k) / 3.0
    return SteadyDecomposition(a1=a1, a2=a2, a3=a3, b12=b12, b13=b13, b23=b23, c=c, d=d)


def reconstruct_state(decomposition: SteadyDecomposition, frame: Frame) -> np.ndarray:
    """Lab-frame density matrix from decomposition coefficients."""
    ops = family_operators(frame)
    rho = np.eye(8, dtype=complex)
    for name, value in decomposition.as_dict().items():
        rho = rho + value * ops[name]
    return rho / 8.0


def decompose(rho: np.ndarray, frame: Frame) -> tuple[SteadyDecomposition, float]:
    """Project a state onto the family; also return the largest leftover.

    Coefficients use the Hilbert-Schmidt convention 8 <B, rho> / <B, B>, so
    the identity coefficient of a unit-trace state is one.  The leftover is
    the largest coefficient on the dressed Pauli strings orthogonal to the
    family.
    """
    ops = family_operators(frame)
    coeffs = {}
    for name, op in ops.items():
        norm_sq = np.trace(op.conj().T @ op).real
        coeffs[name] = 8.0 * np.trace(op.conj().T @ rho).real / norm_sq
    kwargs = {k: v for k, v in coeffs.items() if k != "identity"}
    decomposition = SteadyDecomposition(**kwargs)
    residual_matrix = rho - reconstruct_state(decomposition, frame)
    off = 0.0
    for labels in product("ixyz", repeat=3):
        pauli = tilde_operator(frame, labels[0], labels[1] + labels[2])
        off = max(off, abs(np.trace(pauli.conj().T @ residual_matrix)))
    return decomposition, float(off)


def analytic_steady_state(params: ModelParams) -> SteadyStateResult:
    """Closed-form steady state reconstructed in the lab frame."""
    frame = resolve_resonance(params)
    pops = thermal_populations(params, frame)
    decomposition = steady_coefficients(pops, params.p, params.g)
    rho = reconstruct_state(decomposition, frame)
    liouvillian = assemble_liouvillian(params, frame, pops)
    residual = float(np.linalg.norm(liouvillian @ vec(rho)))
    _, off = decompose(rho, frame)
    return SteadyStateResult(
        rho=rho, decomposition=decomposition, method="analytic",
        residual=residual, off_family_max=off,
    )


def numeric_steady_state(params: ModelParams) -> SteadyStateResult:
    """Steady state from the kernel of the assembled generator."""
    frame = resolve_resonance(params)
    pops = thermal_populations(params, frame)
    liouvillian = assemble_liouvillian(params, frame, pops)
    rho = steady_null_space(liouvillian)
    residual = float(np.linalg.norm(liouvillian @ vec(rho)))
    decomposition, off = decompose(rho, frame)
    return SteadyStateResult(
        rho=rho, decomposition=decomposition, method="numeric",
        residual=residual, off_family_max=off,
    )


@dataclass(frozen=True)
class ValidationReport:
    """Coefficient-level comparison of the two steady-state routes."""

    deltas: dict[str, float]
    max_delta: float
    residual_analytic: float
    residual_numeric: float
    off_family_max: float
    tolerance: float
    passed: bool


def validate(params: ModelParams, tol: float = 1e-8) -> ValidationReport:
    """Run both solvers and compare them coefficient by coefficient."""
    analytic = analytic_steady_state(params)
    numeric = numeric_steady_state(params)
    a = analytic.decomposition.as_dict()
    n = numeric.decomposition.as_dict()
    deltas = {name: abs(a[name] - n[name]) for name in a}
    max_delta = max(deltas.values())
    off = max(analytic.off_family_max, numeric.off_family_max)
    passed = max_delta <= tol and numeric.residual <= 1e-10 and off <= 1e-10
    return ValidationReport(
        deltas=deltas,
        max_delta=max_delta,
        residual_analytic=analytic.residual,
        residual_numeric=numeric.residual,
        off_family_max=off,
        tolerance=tol,
        passed=passed,
    )
