"""Physical parameters, the resonant diagonalization frame and thermal populations.

The machine consists of three qubits: the *target* (1) to be cooled, the
*spiral* (2) extracting heat from it, and the *engine* (3) supplying free
energy, each coupled to its own bath at T1 <= T2 <= T3.  A strong exchange
coupling gamma mixes spiral and engine; diagonalizing the two-qubit machine
Hamiltonian yields two effective free qubits with gaps eps2 > eps3 whose
difference is locked to the target gap E1 (resonance).  The subspace spanned
by the two singly-excited machine eigenstates is the *virtual qubit*, whose
effective temperature and coherence govern cooling.

Convention: |0> is the higher-energy state, so the excited-state population
of a thermal qubit with gap E at temperature T is r = 1/(1 + exp(E/T)) < 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ResonanceInfeasibleError, VirtualTemperaturePoleError
from .linalg import (
    IDENTITY_2,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    embed,
)

_SINGLE_QUBIT = {
    "i": IDENTITY_2,
    "x": SIGMA_X,
    "y": SIGMA_Y,
    "z": SIGMA_Z,
    "+": SIGMA_PLUS,
    "-": SIGMA_MINUS,
}


@dataclass(frozen=True)
class ModelParams:
    """The eight physical inputs defining one refrigerator instance.

    The spiral gap E2 is never an input: it is fixed by the resonance
    condition (see :func:`resolve_resonance`).  Temperatures must satisfy
    T1 <= T2 <= T3 unless ``require_ordered_temps`` is switched off for
    limit studies.
    """

    e1: float
    e3: float
    gamma: float
    t1: float
    t2: float
    t3: float
    p: float
    g: float
    require_ordered_temps: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.e1 <= 0 or self.e3 <= 0:
            raise ParameterError(f"qubit gaps must be positive: E1={self.e1}, E3={self.e3}")
        if self.gamma < 0:
            raise ParameterError(f"internal coupling must be nonnegative: gamma={self.gamma}")
        if self.gamma > 0.5 * self.e1:
            raise ResonanceInfeasibleError(
                f"resonance infeasible: gamma > E1/2 (gamma={self.gamma}, E1={self.e1})"
            )
        if min(self.t1, self.t2, self.t3) <= 0:
            raise ParameterError(
                f"temperatures must be positive: T=({self.t1}, {self.t2}, {self.t3})"
            )
        if self.require_ordered_temps and not (self.t1 <= self.t2 <= self.t3):
            raise ParameterError(
                f"fridge regime requires T1 <= T2 <= T3, got ({self.t1}, {self.t2}, {self.t3})"
            )
        if self.p <= 0:
            raise ParameterError(f"dissipation rate must be positive: p={self.p}")
        if self.g < 0:
            raise ParameterError(f"tripartite coupling must be nonnegative: g={self.g}")

    @property
    def beta1(self) -> float:
        return 1.0 / self.t1

    @property
    def beta2(self) -> float:
        return 1.0 / self.t2

    @property
    def beta3(self) -> float:
        return 1.0 / self.t3

    def as_dict(self) -> dict[str, float]:
        return {
            "e1": self.e1, "e3": self.e3, "gamma": self.gamma,
            "t1": self.t1, "t2": self.t2, "t3": self.t3,
            "p": self.p, "g": self.g,
        }


@dataclass(frozen=True)
class Frame:
    """Derived diagonalization data of the two-qubit machine.

    ``unitary`` is the 4x4 rotation mixing the singly-excited machine states;
    ``eigvecs`` holds the machine eigenvectors as columns ordered
    (psi_00, psi_01, psi_10, psi_11) with eigenvalues (ebar, lam, -lam, -ebar).
    """

    e2: float
    delta_e: float
    ebar: float
    lam: float
    eps2: float
    eps3: float
    theta: float
    unitary: np.ndarray
    eigvecs: np.ndarray

    @property
    def e1(self) -> float:
        return 2.0 * self.lam

    @property
    def cos_half_sq(self) -> float:
        return math.cos(0.5 * self.theta) ** 2

    @property
    def sin_half_sq(self) -> float:
        return math.sin(0.5 * self.theta) ** 2


def resonant_frame(e1: float, e3: float, gamma: float) -> Frame:
    """Diagonalization frame with the spiral gap adjusted for resonance.

    delta_e = sqrt(E1^2 - 4 gamma^2) makes the dressed gap difference
    eps2 - eps3 = 2*lam equal E1 exactly.
    """
    if e1 <= 0 or e3 <= 0:
        raise ParameterError(f"qubit gaps must be positive: E1={e1}, E3={e3}")
    if gamma < 0:
        raise ParameterError(f"internal coupling must be nonnegative: gamma={gamma}")
    if gamma > 0.5 * e1:
        raise ResonanceInfeasibleError(
            f"resonance infeasible: gamma > E1/2 (gamma={gamma}, E1={e1})"
        )
    delta_e = math.sqrt(max(e1 * e1 - 4.0 * gamma * gamma, 0.0))
    e2 = e3 + delta_e
    ebar = 0.5 * (e2 + e3)
    lam = 0.5 * e1  # resonance by construction
    theta = math.atan2(2.0 * gamma, delta_e)
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    unitary = np.eye(4, dtype=complex)
    unitary[1, 1] = c
    unitary[1, 2] = s
    unitary[2, 1] = -s
    unitary[2, 2] = c
    return Frame(
        e2=e2,
        delta_e=delta_e,
        ebar=ebar,
        lam=lam,
        eps2=ebar + lam,
        eps3=ebar - lam,
        theta=theta,
        unitary=unitary,
        eigvecs=unitary.conj().T,
    )


def resolve_resonance(params: ModelParams) -> Frame:
    """Frame for a full parameter set."""
    return resonant_frame(params.e1, params.e3, params.gamma)


def fridge_tilde_operator(frame: Frame, ops: str) -> np.ndarray:
    """4x4 machine-space operator built from dressed single-qubit operators.

    ``ops`` is a two-character string over {'i','x','y','z','+','-'} for the
    dressed spiral and engine slots, e.g. ``'z+'`` for sigma~2^z sigma~3^+.
    """
    bare = np.kron(_SINGLE_QUBIT[ops[0]], _SINGLE_QUBIT[ops[1]])
    return frame.unitary.conj().T @ bare @ frame.unitary


def tilde_operator(frame: Frame, first: str, fridge_ops: str) -> np.ndarray:
    """8x8 operator: bare op on the target times a dressed machine operator."""
    return np.kron(_SINGLE_QUBIT[first], fridge_tilde_operator(frame, fridge_ops))


def thermal_population(energy: float, temperature: float) -> float:
    """Excited-state population of a thermal qubit, 1/(1 + exp(E/T))."""
    if energy <= 0 or temperature <= 0:
        raise ParameterError(f"need E > 0 and T > 0, got E={energy}, T={temperature}")
    x = energy / temperature
    if x > 700.0:  # exp would overflow; population is numerically zero
        return 0.0
    return 1.0 / (1.0 + math.exp(x))


@dataclass(frozen=True)
class ThermalPopulations:
    """Excited-state populations seen by the dressed machine qubits.

    ``r22 .. r33`` are the four bath populations r_{nu,mu} at gap eps_nu and
    bath temperature T_mu; ``rtilde`` are the mixed populations of the
    dressed qubits, ``ttilde`` their effective temperatures and ``s*`` the
    Bloch z components.  ``r1``/``s1`` describe the target and are only set
    when a target temperature was supplied.
    """

    r22: float
    r23: float
    r32: float
    r33: float
    rtilde2: float
    rtilde3: float
    ttilde2: float
    ttilde3: float
    s2: float
    s3: float
    r1: float | None = None
    s1: float | None = None

    def r(self, nu: int, mu: int) -> float:
        return {(2, 2): self.r22, (2, 3): self.r23, (3, 2): self.r32, (3, 3): self.r33}[(nu, mu)]

    @property
    def btilde2(self) -> float:
        return 1.0 / self.ttilde2

    @property
    def btilde3(self) -> float:
        return 1.0 / self.ttilde3


def tilde_populations(frame: Frame, t2: float, t3: float, t1: float | None = None) -> ThermalPopulations:
    """Populations and effective temperatures of the dressed machine qubits.

    Each dressed qubit is pushed by both baths; the combined fixed point is
    the mixture rtilde_nu = cos^2(theta/2) r_{nu,nu} + sin^2(theta/2) r_{nu,mu}
    and defines the effective temperature ttilde_nu through the Boltzmann
    ratio at gap eps_nu.
    """
    c2 = frame.cos_half_sq
    s2 = frame.sin_half_sq
    r22 = thermal_population(frame.eps2, t2)
    r23 = thermal_population(frame.eps2, t3)
    r32 = thermal_population(frame.eps3, t2)
    r33 = thermal_population(frame.eps3, t3)
    rtilde2 = c2 * r22 + s2 * r23
    rtilde3 = c2 * r33 + s2 * r32
    ttilde2 = frame.eps2 / math.log((1.0 - rtilde2) / rtilde2)
    ttilde3 = frame.eps3 / math.log((1.0 - rtilde3) / rtilde3)
    r1 = s1 = None
    if t1 is not None:
        r1 = thermal_population(frame.e1, t1)
        s1 = 2.0 * r1 - 1.0
    return ThermalPopulations(
        r22=r22, r23=r23, r32=r32, r33=r33,
        rtilde2=rtilde2, rtilde3=rtilde3,
        ttilde2=ttilde2, ttilde3=ttilde3,
        s2=2.0 * rtilde2 - 1.0, s3=2.0 * rtilde3 - 1.0,
        r1=r1, s1=s1,
    )


def thermal_populations(params: ModelParams, frame: Frame | None = None) -> ThermalPopulations:
    """Full population set (including the target) for a parameter point."""
    frame = frame if frame is not None else resolve_resonance(params)
    return tilde_populations(frame, params.t2, params.t3, t1=params.t1)


def virtual_temperature(frame: Frame, pops: ThermalPopulations) -> float:
    """Effective temperature of the virtual qubit from its population ratio.

    Raises :class:`VirtualTemperaturePoleError` at the pole where the two
    singly-excited machine eigenstates are equally populated.
    """
    log_ratio = math.log(
        ((1.0 - pops.rtilde2) * pops.rtilde3) / (pops.rtilde2 * (1.0 - pops.rtilde3))
    )
    if log_ratio == 0.0:
        raise VirtualTemperaturePoleError("virtual-qubit populations are equal")
    return (frame.eps2 - frame.eps3) / log_ratio


def virtual_coherence(frame: Frame, pops: ThermalPopulations) -> float:
    """l1 coherence of the virtual qubit in the machine steady state."""
    r2, r3 = pops.rtilde2, pops.rtilde3
    return abs(r2 - r3) / (r2 + r3 - 2.0 * r2 * r3) * math.sin(frame.theta)


@dataclass(frozen=True)
class Hamiltonians:
    """The 8x8 target, machine, interaction and total Hamiltonians."""

    h1: np.ndarray
    hfridge: np.ndarray
    hg: np.ndarray
    htot: np.ndarray


def build_hamiltonians(params: ModelParams, frame: Frame) -> Hamiltonians:
    """Assemble the three-qubit Hamiltonians in the lab frame.

    The tripartite term couples the target ladder operators to the virtual
    qubit raising/lowering operators |psi_01><psi_10| and its adjoint; at
    resonance it commutes with the free part.
    """
    h1 = embed(0.5 * params.e1 * SIGMA_Z, 1)
    hfridge4 = (
        0.5 * frame.e2 * np.kron(SIGMA_Z, IDENTITY_2)
        + 0.5 * params.e3 * np.kron(IDENTITY_2, SIGMA_Z)
        + params.gamma * (np.kron(SIGMA_PLUS, SIGMA_MINUS) + np.kron(SIGMA_MINUS, SIGMA_PLUS))
    )
    hfridge = embed(hfridge4, (2, 3))
    psi01 = frame.eigvecs[:, 1]
    psi10 = frame.eigvecs[:, 2]
    sig_v_plus = np.outer(psi01, psi10.conj())
    hg = params.g * (
        np.kron(SIGMA_PLUS, sig_v_plus.conj().T) + np.kron(SIGMA_MINUS, sig_v_plus)
    )
    return Hamiltonians(h1=h1, hfridge=hfridge, hg=hg, htot=h1 + hfridge + hg)
