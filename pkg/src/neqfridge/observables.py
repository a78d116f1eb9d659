"""Heat currents, temperatures, COPs and their bounds.

Bath currents are evaluated two ways: as traces of the total Hamiltonian
against each dissipator at the steady state, and through closed forms in the
deviation coefficient d.  The tripartite-interaction currents Q_i^g isolate
the part of the flow caused by the weak three-body coupling; the machine
COP eta_g = Q1^g / Q3^g depends only on the diagonalization frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dissipation import build_generator_parts
from .errors import NonCoolingRegimeError, ParameterError, PopulationInversionError, VirtualTemperaturePoleError
from .model import (
    Frame,
    ModelParams,
    ThermalPopulations,
    tilde_operator,
    virtual_coherence,
    virtual_temperature,
)
from .steadystate import SteadyStateResult


@dataclass(frozen=True)
class CurrentReport:
    """Stationary heat currents (energy per unit time, raw model units).

    q1..q3 flow from the baths into the system (trace route), q23 is the
    machine-internal current, q1g..q3g the tripartite-interaction currents
    and qt2g/qt3g their dressed-frame counterparts.  q1_closed..q3_closed
    repeat the bath currents through the closed forms in d.
    """

    q1: float
    q2: float
    q3: float
    q23: float
    q1g: float
    q2g: float
    q3g: float
    qt2g: float
    qt3g: float
    q1_closed: float
    q2_closed: float
    q3_closed: float

    @property
    def max_route_delta(self) -> float:
        return max(
            abs(self.q1 - self.q1_closed),
            abs(self.q2 - self.q2_closed),
            abs(self.q3 - self.q3_closed),
        )


@dataclass(frozen=True)
class PerformanceReport:
    """COPs, reference bounds and the temperatures reached."""

    eta_g: float | None
    eta_tot: float | None
    eta_c: float
    eta_tilde: float | None
    tv: float | None
    t1s: float | None
    coherence: float
    cooling: bool


def product_state(frame: Frame, pops: ThermalPopulations) -> np.ndarray:
    """Lab-frame product of the target thermal state and the dressed machine state."""
    if pops.r1 is None:
        raise ParameterError("populations lack the target entry r1")
    target = np.diag([pops.r1, 1.0 - pops.r1]).astype(complex)
    fridge_diag = np.diag(
        [
            pops.rtilde2 * pops.rtilde3,
            pops.rtilde2 * (1.0 - pops.rtilde3),
            (1.0 - pops.rtilde2) * pops.rtilde3,
            (1.0 - pops.rtilde2) * (1.0 - pops.rtilde3),
        ]
    ).astype(complex)
    fridge = frame.unitary.conj().T @ fridge_diag @ frame.unitary
    return np.kron(target, fridge)


def heat_currents(
    params: ModelParams,
    frame: Frame,
    pops: ThermalPopulations,
    steady: SteadyStateResult,
) -> CurrentReport:
    """All stationary currents, with the closed forms alongside the traces."""
    parts = build_generator_parts(params, frame, pops)
    rho = steady.rho
    htot = parts.hams.htot
    q1 = float(np.trace(htot @ parts.d1.apply(rho)).real)
    q2 = float(np.trace(htot @ parts.d2.apply(rho)).real)
    q3 = float(np.trace(htot @ parts.d3.apply(rho)).real)

    rho0 = product_state(frame, pops)
    q23 = float(np.trace(parts.hams.hfridge @ parts.d3.apply(rho0)).real)

    hg = parts.hams.hg
    dg_rho = -1j * (hg @ rho - rho @ hg)
    q1g = -float(np.trace(parts.hams.h1 @ dg_rho).real)
    qt2g = -float(np.trace(0.5 * frame.eps2 * tilde_operator(frame, "i", "zi") @ dg_rho).real)
    qt3g = -float(np.trace(0.5 * frame.eps3 * tilde_operator(frame, "i", "iz") @ dg_rho).real)

    d = steady.decomposition.d
    c2, s2 = frame.cos_half_sq, frame.sin_half_sq
    q1_closed = -0.25 * params.g * d * params.e1
    q2_closed = -q23 + 0.25 * params.g * d * (frame.eps2 * c2 - frame.eps3 * s2)
    q3_closed = q23 - 0.25 * params.g * d * (frame.eps3 * c2 - frame.eps2 * s2)

    return CurrentReport(
        q1=q1, q2=q2, q3=q3, q23=q23,
        q1g=q1g, q2g=q2 + q23, q3g=q3 - q23,
        qt2g=qt2g, qt3g=qt3g,
        q1_closed=q1_closed, q2_closed=q2_closed, q3_closed=q3_closed,
    )


def internal_current(frame: Frame, pops: ThermalPopulations, p: float) -> float:
    """Machine-internal current q23 as a scalar closed form.

    Equivalent to the trace of the machine Hamiltonian against the engine
    dissipator at the dressed product state (property-tested against it).
    """
    c2, s2 = frame.cos_half_sq, frame.sin_half_sq
    return (
        p * c2 * s2 * (
            frame.eps2 * (pops.r23 - pops.r22) + frame.eps3 * (pops.r33 - pops.r32)
        )
    )


def currents_closed(
    params: ModelParams, frame: Frame, pops: ThermalPopulations, d: float
) -> dict[str, float]:
    """Matrix-free current set used by sweeps; validated against the traces."""
    c2, s2 = frame.cos_half_sq, frame.sin_half_sq
    q23 = internal_current(frame, pops, params.p)
    q1 = -0.25 * params.g * d * params.e1
    q2 = -q23 + 0.25 * params.g * d * (frame.eps2 * c2 - frame.eps3 * s2)
    q3 = q23 - 0.25 * params.g * d * (frame.eps3 * c2 - frame.eps2 * s2)
    return {
        "q1": q1, "q2": q2, "q3": q3, "q23": q23,
        "q1g": q1, "q2g": q2 + q23, "q3g": q3 - q23,
        "qt2g": 0.25 * params.g * d * frame.eps2,
        "qt3g": -0.25 * params.g * d * frame.eps3,
    }


def cooling_condition(e1: float, e3: float, gamma: float) -> bool:
    """Whether heating the engine bath can lower the virtual temperature.

    Requires 2 gamma^2 < E3 * sqrt(E1^2 - 4 gamma^2); equivalently the COP
    denominator is positive.
    """
    if gamma > 0.5 * e1:
        raise ParameterError(f"resonance infeasible: gamma > E1/2 (gamma={gamma}, E1={e1})")
    delta_e = math.sqrt(max(e1 * e1 - 4.0 * gamma * gamma, 0.0))
    return 2.0 * gamma * gamma < e3 * delta_e


def critical_gamma(e1: float, e3: float) -> float:
    """Coupling at which the cooling condition turns off (closed form)."""
    return math.sqrt(0.5 * e3 * (math.sqrt(e3 * e3 + e1 * e1) - e3))


def cop_g(frame: Frame) -> float:
    """Machine COP E1 / (eps3 cos^2(theta/2) - eps2 sin^2(theta/2))."""
    denominator = frame.eps3 * frame.cos_half_sq - frame.eps2 * frame.sin_half_sq
    if denominator <= 0.0:
        raise NonCoolingRegimeError(
            f"COP denominator not positive ({denominator:.3e}); cooling condition violated"
        )
    return frame.e1 / denominator


def cop_carnot(t1: float, t2: float, t3: float) -> float:
    """Carnot COP (b2 - b3) / (b1 - b2) of the three-bath refrigerator."""
    b1, b2, b3 = 1.0 / t1, 1.0 / t2, 1.0 / t3
    if b1 <= b2:
        raise ParameterError(f"Carnot COP needs T1 < T2, got T1={t1}, T2={t2}")
    return (b2 - b3) / (b1 - b2)


def cop_tilde(pops: ThermalPopulations, t1: float) -> float:
    """Current ratio of the dressed two-qubit picture, (bt2 - bt3)/(b1 - bt2)."""
    b1 = 1.0 / t1
    if b1 == pops.btilde2:
        raise ParameterError("dressed COP undefined: beta1 equals dressed beta2")
    return (pops.btilde2 - pops.btilde3) / (b1 - pops.btilde2)


def max_cop_identity(frame: Frame, pops: ThermalPopulations, t1: float) -> float:
    """COP at a cooling-window endpoint from dressed inverse temperatures.

    Valid on the surface T1 = Tv, where it coincides with :func:`cop_g`.
    Derived from the dressed-current identities; the beta~3 term enters with
    a plus sign (the version with a minus sign fails the identity for any
    theta > 0, see the regression test).
    """
    b1 = 1.0 / t1
    bt2, bt3 = pops.btilde2, pops.btilde3
    denominator = (
        b1 * math.cos(frame.theta) - bt2 * frame.cos_half_sq + bt3 * frame.sin_half_sq
    )
    return (bt2 - bt3) / denominator


def eta_star_max(eta_c: float, gamma_over_e3: float) -> float:
    """Tight upper bound on the COP at maximum cooling power."""
    x2 = gamma_over_e3 * gamma_over_e3
    denominator = 0.5 * eta_c - 2.0 * x2
    if denominator <= 0.0:
        raise NonCoolingRegimeError(
            f"bound undefined: gamma/E3 = {gamma_over_e3} outside the cooling range"
        )
    return (0.25 * eta_c * eta_c + 4.0 * x2) / denominator


def eta_star_min(gamma_over_e3: float) -> float:
    """Tight lower bound: the minimum of the machine COP over the target gap.

    Minimizing E1^2 / (E3 * delta_e - 2 gamma^2) over delta_e gives an
    interior optimum at delta_e/E3 = 2x(x + sqrt(1 + x^2)), x = gamma/E3.
    """
    x = gamma_over_e3
    if x < 0:
        raise ParameterError(f"gamma/E3 must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    u = 2.0 * x * (x + math.sqrt(1.0 + x * x))
    return (u * u + 4.0 * x * x) / (u - 2.0 * x * x)


def local_target_temperature(a1: float, e1: float) -> float:
    """Temperature of the reduced target state from its Bloch z component.

    a1 = 0 means equal populations (infinite temperature, returned as inf);
    a1 > 0 means inversion and raises.
    """
    if abs(a1) >= 1.0:
        raise ParameterError(f"Bloch component out of range: a1={a1}")
    if a1 > 0.0:
        raise PopulationInversionError(
            f"target populations inverted (a1={a1:.3e}): no positive temperature"
        )
    if a1 == 0.0:
        return math.inf
    return e1 / math.log((1.0 - a1) / (1.0 + a1))


def performance_report(
    params: ModelParams,
    frame: Frame,
    pops: ThermalPopulations,
    steady: SteadyStateResult,
    currents: CurrentReport,
) -> PerformanceReport:
    """Collect COPs, bounds and achieved temperatures for one point."""
    try:
        eta_g = cop_g(frame)
    except NonCoolingRegimeError:
        eta_g = None
    eta_tot = currents.q1 / currents.q3 if currents.q3 != 0.0 else None
    eta_c = cop_carnot(params.t1, params.t2, params.t3) if params.t1 < params.t2 else math.inf
    try:
        eta_tilde = cop_tilde(pops, params.t1)
    except ParameterError:
        eta_tilde = None
    try:
        tv = virtual_temperature(frame, pops)
    except VirtualTemperaturePoleError:
        tv = None
    try:
        t1s = local_target_temperature(steady.decomposition.a1, params.e1)
    except PopulationInversionError:
        t1s = None
    return PerformanceReport(
        eta_g=eta_g,
        eta_tot=eta_tot,
        eta_c=eta_c,
        eta_tilde=eta_tilde,
        tv=tv,
        t1s=t1s,
        coherence=virtual_coherence(frame, pops),
        cooling=currents.q1g > 0.0,
    )
