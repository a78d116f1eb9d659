"""Parameter sweeps, root finding and optimization pipelines.

These regenerate the data behind the package's standard figures: the
cooling-current sweeps over the engine-bath inverse temperature, the COP
sweeps over the target gap with cooling-window endpoints, the endpoint-COP
ratio sweeps, the random-refrigerator ensemble for the power-COP bounds,
and the high-temperature saturation study.

All evaluations go through the matrix-free closed-form coefficients, which
are validated against the generator null space elsewhere.  Every emitted row
carries the full resolved parameter set.  Ensembles are driven by a seeded
numpy PCG64 generator and are bit-reproducible.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptyCoolingWindowError, ParameterError
from .model import (
    ModelParams,
    resonant_frame,
    tilde_populations,
    virtual_coherence,
    virtual_temperature,
)
from .observables import (
    cop_carnot,
    cop_g,
    critical_gamma,
    currents_closed,
    eta_star_max,
    eta_star_min,
    local_target_temperature,
)
from .steadystate import steady_coefficients

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepSpec:
    """A 1-D sweep over one parameter of a base model."""

    base: ModelParams
    axis: str  # "beta3" | "e1" | "gamma"
    lo: float
    hi: float
    points: int

    def __post_init__(self) -> None:
        if self.axis not in ("beta3", "e1", "gamma"):
            raise ParameterError(f"unknown sweep axis {self.axis!r}")
        if not self.lo < self.hi:
            raise ParameterError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.points < 2:
            raise ParameterError(f"need at least 2 points, got {self.points}")


@dataclass(frozen=True)
class EnsembleSpec:
    """Sampling plan for the random-refrigerator ensemble.

    The internal coupling is an integer multiple of E3*eta_c/gamma_steps and
    the cold-bath temperature is fixed by the Carnot constraint
    b1 = b2 + (b2 - b3)/eta_c.  Infeasible draws (empty cooling window) are
    rejected and redrawn.
    """

    n: int
    eta_c: float = 1.0
    seed: int = 7
    e3_range: tuple[float, float] = (2.0, 8.0)
    t2_range: tuple[float, float] = (1.0, 4.0)
    t3_mult_range: tuple[float, float] = (1.0, 5.0)
    gamma_steps: int = 200
    max_gamma_step: int = 40

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError(f"ensemble size must be >= 1, got {self.n}")
        if self.eta_c <= 0:
            raise ParameterError(f"eta_c must be positive, got {self.eta_c}")


@dataclass(frozen=True)
class CoolingWindow:
    """Target-gap interval with positive extracted current.

    When the deviation is already negative at the lower scan limit (only
    possible as gamma -> 0) the left edge is the scan boundary, not a root.
    """

    left: float
    right: float
    left_is_boundary: bool = False


@dataclass(frozen=True)
class MaxPowerResult:
    e1_star: float
    q1g_max: float
    eta_g_star: float
    window: CoolingWindow


@dataclass(frozen=True)
class MinCopResult:
    e1_star: float
    eta_g_min: float
    window: CoolingWindow


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("NEQFRIDGE_THREADS", "1")))
    except ValueError:
        return 1


def _ordered_map(func, items):
    """Map preserving input order; honors the NEQFRIDGE_THREADS cap."""
    workers = _thread_count()
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def deviation(e1: float, base: ModelParams) -> float:
    """Steady-state deviation coefficient d at target gap e1 (scalar path)."""
    frame = resonant_frame(e1, base.e3, base.gamma)
    pops = tilde_populations(frame, base.t2, base.t3, t1=base.t1)
    return steady_coefficients(pops, base.p, base.g).d


def extracted_current(e1: float, base: ModelParams) -> float:
    """Tripartite cooling current Q1^g at target gap e1 (scalar path)."""
    return -0.25 * base.g * deviation(e1, base) * e1


def _bisect(func, a: float, b: float, fa: float, fb: float, tol: float) -> float:
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise ValueError("root not bracketed")
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = func(mid)
        if fm == 0.0:
            return mid
        if fa * fm < 0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def find_root(func, a: float, b: float, tol: float = 1e-10) -> float:
    """Bisection for a sign change of func on [a, b]."""
    return _bisect(func, a, b, func(a), func(b), tol)


def golden_section_max(func, a: float, b: float, tol: float = 1e-8) -> tuple[float, float]:
    """Golden-section maximizer of a unimodal function on [a, b]."""
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = func(x1), func(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = func(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = func(x1)
    x = 0.5 * (a + b)
    return x, func(x)


def cooling_window(
    base: ModelParams,
    e1_lo: float | None = None,
    e1_hi: float | None = None,
    scan_points: int = 400,
    tol: float = 1e-13,
) -> CoolingWindow:
    """Locate the d(E1) = 0 roots bounding the cooling region.

    The E1 field of ``base`` is ignored.  The default scan range is
    (2*gamma, E3 * Carnot COP); the right end always lies outside the
    window, so a 400-point scan brackets both sign changes.  The default
    root tolerance is tight enough that the endpoint COP identity holds to
    better than 1e-10.
    """
    if e1_lo is None:
        e1_lo = 2.0 * base.gamma * (1.0 + 1e-9) if base.gamma > 0 else 1e-9 * base.e3
    if e1_hi is None:
        if base.t1 >= base.t2:
            raise ParameterError("window scan needs T1 < T2 or an explicit e1_hi")
        # the right root never exceeds E3 * eta_c; at gamma = 0 it sits exactly
        # there, so pad the scan a little past it
        e1_hi = base.e3 * cop_carnot(base.t1, base.t2, base.t3) * (1.0 + 1e-6)
    if e1_hi <= e1_lo:
        raise EmptyCoolingWindowError(
            f"scan range empty: [{e1_lo:.6g}, {e1_hi:.6g}] for gamma={base.gamma}"
        )

    def f(e1: float) -> float:
        return deviation(e1, base)

    grid = np.linspace(e1_lo, e1_hi, scan_points)
    values = [f(e) for e in grid]
    if min(values) >= 0.0:
        raise EmptyCoolingWindowError(
            f"no cooling found in [{e1_lo:.6g}, {e1_hi:.6g}] for gamma={base.gamma}"
        )
    crossings = [
        i for i in range(len(grid) - 1)
        if values[i] == 0.0 or (values[i] > 0.0) != (values[i + 1] > 0.0)
    ]
    if not crossings:
        raise EmptyCoolingWindowError(
            f"cooling region extends beyond the scan range [{e1_lo:.6g}, {e1_hi:.6g}]; "
            "pass an explicit e1_hi"
        )
    if values[0] < 0.0:
        left = grid[0]
        left_is_boundary = True
        right = _bisect(f, grid[crossings[0]], grid[crossings[0] + 1],
                        values[crossings[0]], values[crossings[0] + 1], tol)
    else:
        left_is_boundary = False
        left = _bisect(f, grid[crossings[0]], grid[crossings[0] + 1],
                       values[crossings[0]], values[crossings[0] + 1], tol)
        right = _bisect(f, grid[crossings[-1]], grid[crossings[-1] + 1],
                        values[crossings[-1]], values[crossings[-1] + 1], tol)
    return CoolingWindow(left=left, right=right, left_is_boundary=left_is_boundary)


def maximize_cooling_power(
    base: ModelParams,
    window: CoolingWindow | None = None,
    grid_points: int = 400,
    tol: float = 1e-8,
) -> MaxPowerResult:
    """Maximize Q1^g over the cooling window and report the COP there."""
    window = window if window is not None else cooling_window(base)

    def objective(e1: float) -> float:
        return extracted_current(e1, base)

    grid = np.linspace(window.left, window.right, grid_points)
    values = [objective(e) for e in grid]
    i = int(np.argmax(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    e1_star, q1g_max = golden_section_max(objective, lo, hi, tol)
    frame = resonant_frame(e1_star, base.e3, base.gamma)
    return MaxPowerResult(
        e1_star=e1_star, q1g_max=q1g_max, eta_g_star=cop_g(frame), window=window
    )


def minimize_cop(
    base: ModelParams,
    window: CoolingWindow | None = None,
    grid_points: int = 400,
    tol: float = 1e-8,
) -> MinCopResult:
    """Minimize the machine COP over the cooling window."""
    window = window if window is not None else cooling_window(base)

    def negative_cop(e1: float) -> float:
        return -cop_g(resonant_frame(e1, base.e3, base.gamma))

    grid = np.linspace(window.left, window.right, grid_points)
    values = [negative_cop(e) for e in grid]
    i = int(np.argmax(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    e1_star, neg = golden_section_max(negative_cop, lo, hi, tol)
    return MinCopResult(e1_star=e1_star, eta_g_min=-neg, window=window)


def _row(params: ModelParams, **extra) -> dict:
    row = params.as_dict()
    row.update(extra)
    return row


def sweep_fig3(
    points: int = 200,
    gammas: tuple[float, ...] | None = None,
    beta3_lo: float = 0.01,
    e1: float = 1.0,
    e3: float = 4.0,
    t1: float = 2.0,
    t2: float = 2.0,
    p: float = 0.01,
    g: float = 0.01,
) -> list[dict]:
    """Cooling current and coherence change versus engine-bath coldness.

    One curve per coupling value; defaults bracket the critical coupling of
    the (E1=1, E3=4) machine.  The coherence change is relative to the
    degenerate-bath point T3 = T2.
    """
    if gammas is None:
        gammas = (0.48, 0.49, critical_gamma(e1, e3), 0.50)
    beta2 = 1.0 / t2
    rows = []
    for gamma in gammas:
        frame = resonant_frame(e1, e3, gamma)
        base_coh = virtual_coherence(frame, tilde_populations(frame, t2, t2))
        for beta3 in np.linspace(beta3_lo, beta2, points):
            t3 = 1.0 / beta3
            params = ModelParams(e1=e1, e3=e3, gamma=gamma, t1=t1, t2=t2, t3=t3, p=p, g=g)
            pops = tilde_populations(frame, t2, t3, t1=t1)
            d = steady_coefficients(pops, p, g).d
            rows.append(_row(
                params,
                beta3=beta3,
                q1g=-0.25 * g * d * e1,
                delta_c=virtual_coherence(frame, pops) - base_coh,
            ))
    return rows


def sweep_fig4(
    points: int = 200,
    gammas: tuple[float, ...] = (0.2, 0.4, 0.6),
    e3: float = 4.0,
    t1: float = 4.0 / 3.0,
    t2: float = 2.0,
    t3: float = 4.0,
    p: float = 0.01,
    g: float = 0.01,
) -> tuple[list[dict], dict[float, CoolingWindow]]:
    """COPs and coherence versus target gap inside each cooling window."""
    rows = []
    windows: dict[float, CoolingWindow] = {}
    for gamma in gammas:
        base = ModelParams(
            e1=max(1.0, 2.5 * gamma) if gamma > 0 else 1.0,
            e3=e3, gamma=gamma, t1=t1, t2=t2, t3=t3, p=p, g=g,
        )
        window = cooling_window(base)
        windows[gamma] = window
        for e1 in np.linspace(window.left, window.right, points):
            params = replace(base, e1=e1)
            frame = resonant_frame(e1, e3, gamma)
            pops = tilde_populations(frame, t2, t3, t1=t1)
            d = steady_coefficients(pops, p, g).d
            currents = currents_closed(params, frame, pops, d)
            rows.append(_row(
                params,
                eta_g=cop_g(frame),
                eta_tot=currents["q1"] / currents["q3"],
                coherence=virtual_coherence(frame, pops),
                window_left=window.left,
                window_right=window.right,
            ))
    return rows, windows


def sweep_fig5(
    points: int = 200,
    gammas: tuple[float, ...] = (0.1, 0.2, 0.3),
    beta3_lo: float = 0.01,
    beta3_hi: float | None = None,
    e1: float = 1.0,
    e3: float = 4.0,
    t2: float = 2.0,
    p: float = 0.01,
    g: float = 0.01,
) -> tuple[list[dict], list[dict]]:
    """Endpoint COP over Carnot, and coherence, versus engine-bath coldness.

    The cold-bath temperature is set to the virtual temperature at every
    point (the d = 0 surface).  Points with a nonpositive virtual
    temperature are skipped and reported separately.
    """
    beta2 = 1.0 / t2
    if beta3_hi is None:
        beta3_hi = beta2 - 1e-4  # the Carnot ratio is 0/0 at beta3 = beta2
    rows: list[dict] = []
    skipped: list[dict] = []
    for gamma in gammas:
        frame = resonant_frame(e1, e3, gamma)
        eta_g = cop_g(frame)
        for beta3 in np.linspace(beta3_lo, beta3_hi, points):
            t3 = 1.0 / beta3
            pops = tilde_populations(frame, t2, t3)
            tv = virtual_temperature(frame, pops)
            if tv <= 0.0:
                skipped.append({"gamma": gamma, "beta3": beta3, "tv": tv})
                continue
            params = ModelParams(e1=e1, e3=e3, gamma=gamma, t1=tv, t2=t2, t3=t3, p=p, g=g)
            rows.append(_row(
                params,
                beta3=beta3,
                eta_ratio=eta_g / cop_carnot(tv, t2, t3),
                coherence=virtual_coherence(frame, pops),
            ))
    return rows, skipped


def sweep(spec: SweepSpec) -> tuple[list[dict], list[dict]]:
    """Generic 1-D sweep emitting the standard observable set per point."""
    rows: list[dict] = []
    skipped: list[dict] = []
    for value in np.linspace(spec.lo, spec.hi, spec.points):
        try:
            if spec.axis == "beta3":
                params = replace(spec.base, t3=1.0 / value)
            elif spec.axis == "e1":
                params = replace(spec.base, e1=value)
            else:
                params = replace(spec.base, gamma=value)
            frame = resonant_frame(params.e1, params.e3, params.gamma)
            pops = tilde_populations(frame, params.t2, params.t3, t1=params.t1)
        except ParameterError as exc:
            skipped.append({"axis": spec.axis, "value": float(value), "reason": str(exc)})
            continue
        decomp = steady_coefficients(pops, params.p, params.g)
        currents = currents_closed(params, frame, pops, decomp.d)
        try:
            eta_g = cop_g(frame)
        except Exception:
            eta_g = math.nan
        try:
            tv = virtual_temperature(frame, pops)
        except Exception:
            tv = math.nan
        try:
            t1s = local_target_temperature(decomp.a1, params.e1)
        except Exception:
            t1s = math.nan
        rows.append(_row(
            params,
            axis_value=float(value),
            d=decomp.d,
            q1g=currents["q1g"],
            q23=currents["q23"],
            eta_g=eta_g,
            eta_tot=currents["q1"] / currents["q3"] if currents["q3"] != 0 else math.nan,
            tv=tv,
            t1s=t1s,
            coherence=virtual_coherence(frame, pops),
        ))
    return rows, skipped


def _draw_model(rng: np.random.Generator, spec: EnsembleSpec) -> ModelParams:
    e3 = rng.uniform(*spec.e3_range)
    t2 = rng.uniform(*spec.t2_range)
    mult_lo, mult_hi = spec.t3_mult_range
    t3 = t2 * (mult_lo + (mult_hi - mult_lo) * (1.0 - rng.random()))
    k = int(rng.integers(1, spec.max_gamma_step + 1))
    gamma = k * e3 * spec.eta_c / spec.gamma_steps
    beta1 = 1.0 / t2 + (1.0 / t2 - 1.0 / t3) / spec.eta_c
    t1 = 1.0 / beta1
    p = g = 0.01 * e3 / 4.0
    return ModelParams(
        e1=max(1.0, 2.5 * gamma), e3=e3, gamma=gamma, t1=t1, t2=t2, t3=t3, p=p, g=g
    )


def random_ensemble(spec: EnsembleSpec) -> tuple[list[dict], dict]:
    """Max-power COPs of seeded random refrigerators at fixed Carnot COP.

    Each accepted model is optimized over the target gap; rows carry the
    COP-at-max-power ratio, the thermodynamic COP there, the virtual-qubit
    coherence at the optimum, and whether the model sits within 5% of the
    upper bound (relative to the bound gap).
    """
    rng = np.random.default_rng(spec.seed)
    accepted: list[tuple[ModelParams, CoolingWindow]] = []
    resamples = 0
    attempts_cap = 200 * spec.n
    while len(accepted) < spec.n:
        if resamples > attempts_cap:
            raise ParameterError(
                f"ensemble sampling stalled after {resamples} rejected draws"
            )
        try:
            base = _draw_model(rng, spec)
            window = cooling_window(base)
        except (ParameterError, EmptyCoolingWindowError):
            resamples += 1
            continue
        accepted.append((base, window))

    def evaluate(item: tuple[ModelParams, CoolingWindow]) -> dict:
        base, window = item
        result = maximize_cooling_power(base, window=window)
        x = base.gamma / base.e3
        frame = resonant_frame(result.e1_star, base.e3, base.gamma)
        pops = tilde_populations(frame, base.t2, base.t3, t1=base.t1)
        d = steady_coefficients(pops, base.p, base.g).d
        currents = currents_closed(replace(base, e1=result.e1_star), frame, pops, d)
        upper = eta_star_max(spec.eta_c, x)
        lower = eta_star_min(x)
        gap = (upper - result.eta_g_star) / (upper - lower) if upper > lower else 0.0
        return _row(
            replace(base, e1=result.e1_star),
            gamma_over_e3=x,
            eta_star=result.eta_g_star,
            eta_star_ratio=result.eta_g_star / spec.eta_c,
            eta_star_max=upper,
            eta_star_min=lower,
            eta_tot_star=currents["q1"] / currents["q3"],
            coherence=virtual_coherence(frame, pops),
            q1g_max=result.q1g_max,
            near_bound=int(gap < 0.05),
        )

    rows = _ordered_map(evaluate, accepted)
    meta = {
        "rng": "numpy-PCG64",
        "seed": spec.seed,
        "n": spec.n,
        "eta_c": spec.eta_c,
        "resamples": resamples,
        "e3_range": list(spec.e3_range),
        "t2_range": list(spec.t2_range),
        "t3_mult_range": list(spec.t3_mult_range),
        "gamma_steps": spec.gamma_steps,
        "max_gamma_step": spec.max_gamma_step,
    }
    return rows, meta


def high_temperature_saturation(
    x_values: tuple[float, ...] = (0.0, 0.05, 0.1),
    kappas: tuple[float, ...] = (1.0, 2.0, 5.0, 10.0, 20.0),
    e3: float = 4.0,
    t1: float = 4.0 / 3.0,
    t2: float = 2.0,
    t3: float = 4.0,
    p: float = 0.01,
    g: float = 0.01,
) -> list[dict]:
    """Approach of the max-power COP to its upper bound as temperatures grow.

    All three bath temperatures are scaled by kappa, which leaves the Carnot
    COP fixed; the relative gap to the bound should shrink toward zero.
    """
    eta_c = cop_carnot(t1, t2, t3)
    rows = []
    for x in x_values:
        gamma = x * e3
        bound = eta_star_max(eta_c, x)
        for kappa in kappas:
            base = ModelParams(
                e1=max(1.0, 2.5 * gamma) if gamma > 0 else 1.0,
                e3=e3, gamma=gamma,
                t1=t1 * kappa, t2=t2 * kappa, t3=t3 * kappa, p=p, g=g,
            )
            result = maximize_cooling_power(base)
            rows.append(_row(
                replace(base, e1=result.e1_star),
                gamma_over_e3=x,
                kappa=kappa,
                eta_star=result.eta_g_star,
                eta_star_bound=bound,
                rel_gap=(bound - result.eta_g_star) / bound,
                e1_over_t1=result.e1_star / (t1 * kappa),
            ))
    return rows
