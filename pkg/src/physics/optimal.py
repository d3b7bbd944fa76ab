"""
Optimal squeezing phase, purity, detuning and drive power, with derivative-free numeric
minimizers used to cross-check the analytic optima.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np
import numpy.typing as npt

from src.core.exceptions import NumericalError, ParameterError
from src.core.utils import FloatArray, as_frequency_array

from .model import PURITY_RTOL, MechanicalParams, SensorParams
from .response import chi_m, inverse_chi_m_sq
from .spectra import ultimate_limit

logger = logging.getLogger(__name__)

PHI_RATIO = 2.0 / (1.0 + math.sqrt(5.0))
RELATIVE_TOLERANCE = 1e-10
GOLDEN_MAX_ITER = 200
COORDINATE_MAX_SWEEPS = 100

Bounds = Mapping[str, Tuple[float, float]]


@dataclass(frozen=True)
class ShotNoiseObjective:
    """The shot-noise bracket as a function of squeezing moments, phase and y = Delta/kappa."""

    n_sq: float
    m_mag: float
    phi: float
    y: float

    def __post_init__(self) -> None:
        if self.n_sq < 0 or self.m_mag < 0:
            raise ParameterError("n_sq", "squeezing moments must be non-negative")
        if self.m_mag**2 > self.n_sq * (self.n_sq + 1.0) * (1.0 + PURITY_RTOL):
            raise ParameterError("m_mag", "squeezing moments violate |M|^2 <= N(N+1)")

    def value(self) -> float:
        return h(self.m_mag, self.n_sq, self.y, self.phi)


@dataclass(frozen=True)
class OptimumResult:
    point: Dict[str, float]
    value: float
    iterations: int
    converged: bool
    method: str


@dataclass(frozen=True)
class UltimatePhase:
    """Squeezing phase that brings the standard spectrum down to the ultimate limit.

    When the required Im M exceeds what N allows, feasible is False and phi is NaN.
    """

    feasible: bool
    im_m: float
    sin_phi: float
    phi: float
    value: float
    coupling_sq_per_kappa: float


def detuning_coefficients(y: float) -> Tuple[float, float]:
    """a(y) = 2y(1 - 4y^2) and b(y) = (1/2 + 2y^2)^2 - 8y^2."""
    a = 2.0 * y * (1.0 - 4.0 * y**2)
    b = (0.5 + 2.0 * y**2) ** 2 - 8.0 * y**2
    return a, b


def phi_opt(y: float) -> float:
    """Squeezing phase that minimizes the shot noise at detuning ratio y, in (-pi, pi]."""
    a, b = detuning_coefficients(y)
    return math.atan2(a, b)


def h(m_mag: float, n_sq: float, y: float, phi: float) -> float:
    """Shot-noise bracket (N + 1/2)(1/2 + 2y^2)^2 - |M| sqrt(a^2 + b^2) cos(phi - phi_opt)."""
    a, b = detuning_coefficients(y)
    return (n_sq + 0.5) * (0.5 + 2.0 * y**2) ** 2 - m_mag * math.hypot(a, b) * math.cos(
        phi - phi_opt(y)
    )


def h_opt_phase(m_mag: float, n_sq: float, y: float) -> float:
    return (n_sq + 0.5 - m_mag) * (0.5 + 2.0 * y**2) ** 2


def h_min(n_sq: float) -> float:
    """
    Minimum of the bracket over phase, purity and detuning: (1/4)[N + 1/2 - sqrt(N(N+1))].

    Written as 1/(16 (N + 1/2 + sqrt(N(N+1)))) to avoid the cancellation at large N.
    """
    if n_sq < 0:
        raise ParameterError("n_sq", "must be non-negative")
    return 1.0 / (16.0 * (n_sq + 0.5 + math.sqrt(n_sq * (n_sq + 1.0))))


def shot_noise_optimized(omega: npt.ArrayLike, params: SensorParams, n_sq: float) -> FloatArray:
    """Shot noise after optimizing phase, purity and detuning at squeezing N."""
    params = params.ensure_resolved()
    g = params.g
    if g <= 0:
        raise ParameterError("g", "must be positive")
    mech = params.mechanical
    w = as_frequency_array(omega)
    inv_cm2 = inverse_chi_m_sq(w, mech.omega_m, mech.gamma_m)
    return params.cavity.kappa / (g**2 * mech.gamma_m) * inv_cm2 * h_min(n_sq)


def g2_sql_optimum(
    omega: npt.ArrayLike, mech: MechanicalParams, kappa: float, n_sq: float, re_m: float
) -> FloatArray:
    """
    Coupling g^2 that minimizes the standard squeezed spectrum.

    Args:
        omega: Angular frequencies
        mech: Mechanical parameters
        kappa: Cavity decay rate
        n_sq: Squeezing moment N
        re_m: Real part of M

    Returns:
        g^2 = (kappa/4)(1/|chi_m|) sqrt((2N+1-2ReM)/(2N+1+2ReM))

    Raises:
        ParameterError: If 2N + 1 <= 2|Re M|
    """
    plus = 2.0 * n_sq + 1.0 + 2.0 * re_m
    minus = 2.0 * n_sq + 1.0 - 2.0 * re_m
    if plus <= 0 or minus <= 0:
        raise ParameterError("re_m", f"need 2N+1 > 2|Re M|, got N={n_sq}, Re M={re_m}")
    w = as_frequency_array(omega)
    inv_chi = np.sqrt(inverse_chi_m_sq(w, mech.omega_m, mech.gamma_m))
    return 0.25 * kappa * inv_chi * math.sqrt(minus / plus)


def ultimate_phase(omega: float, mech: MechanicalParams, n_sq: float) -> UltimatePhase:
    """
    Pure-squeezing phase for which the optimized standard spectrum reaches the ultimate limit.

    The required anomalous moment is Im M = -Re chi_m/(2|Im chi_m|); the phase follows from
    sin(phi) = Im M/sqrt(N(N+1)) with cos(phi) >= 0.
    """
    response = complex(chi_m(omega, mech.omega_m, mech.gamma_m))
    amplitude = math.sqrt(n_sq * (n_sq + 1.0))
    value = float(ultimate_limit(omega, mech)[0])

    if response.imag == 0.0:
        logger.info(f"Ultimate phase infeasible at omega={omega}: Im chi_m vanishes")
        return UltimatePhase(False, math.nan, math.nan, math.nan, value, math.nan)

    target = -response.real / (2.0 * abs(response.imag))
    if amplitude == 0.0:
        sin_phi = 0.0 if target == 0.0 else math.copysign(math.inf, target)
    else:
        sin_phi = target / amplitude

    if abs(sin_phi) > 1.0:
        logger.info(f"Ultimate phase infeasible at omega={omega}, N={n_sq}: sin(phi)={sin_phi:.3g}")
        return UltimatePhase(False, target, sin_phi, math.nan, value, math.nan)

    phi = math.asin(sin_phi)
    re_m = amplitude * math.cos(phi)
    coupling_sq_per_kappa = float(g2_sql_optimum(omega, mech, 1.0, n_sq, re_m)[0])
    return UltimatePhase(True, target, sin_phi, phi, value, coupling_sq_per_kappa)


def _checked(value: float, where: str) -> float:
    if not math.isfinite(value):
        raise NumericalError(f"objective is not finite at {where}")
    return value


def golden_section(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    tol: float = RELATIVE_TOLERANCE,
    max_iter: int = GOLDEN_MAX_ITER,
) -> Tuple[float, float, int]:
    """
    Minimize a unimodal function on [lower, upper].

    Args:
        f: Objective
        lower: Lower bound
        upper: Upper bound
        tol: Relative width at which the bracket is accepted
        max_iter: Iteration budget

    Returns:
        Tuple of (argmin, minimum, iterations)

    Raises:
        NumericalError: If the objective is not finite somewhere it is evaluated
    """
    if not lower < upper:
        raise ParameterError("bounds", f"need lower < upper, got [{lower}, {upper}]")

    a, b = lower, upper
    x1 = b - PHI_RATIO * (b - a)
    x2 = a + PHI_RATIO * (b - a)
    f1 = _checked(f(x1), f"x={x1}")
    f2 = _checked(f(x2), f"x={x2}")

    iteration = 0
    while iteration < max_iter and (b - a) > tol * max(abs(a) + abs(b), 1.0):
        iteration += 1
        if f2 > f1:
            b, x2, f2 = x2, x1, f1
            x1 = b - PHI_RATIO * (b - a)
            f1 = _checked(f(x1), f"x={x1}")
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + PHI_RATIO * (b - a)
            f2 = _checked(f(x2), f"x={x2}")

    candidates = [(f1, x1), (f2, x2)]
    midpoint = 0.5 * (a + b)
    candidates.append((_checked(f(midpoint), f"x={midpoint}"), midpoint))
    best_value, best_x = min(candidates)
    return best_x, best_value, iteration


def coordinate_descent(
    objective: Callable[[Dict[str, float]], float],
    bounds: Bounds,
    initial: Optional[Mapping[str, float]] = None,
    tol: float = RELATIVE_TOLERANCE,
    max_sweeps: int = COORDINATE_MAX_SWEEPS,
) -> OptimumResult:
    """Minimize over several bounded variables, one golden-section line search at a time."""
    point = {name: 0.5 * (lo + hi) for name, (lo, hi) in bounds.items()}
    if initial:
        point.update(initial)
    value = _checked(objective(dict(point)), f"{point}")

    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        previous = value
        largest_step = 0.0
        for name, (lo, hi) in bounds.items():

            def line(x: float, name: str = name) -> float:
                trial = dict(point)
                trial[name] = x
                return objective(trial)

            x_best, v_best, _ = golden_section(line, lo, hi, tol)
            if v_best <= value:
                largest_step = max(largest_step, abs(x_best - point[name]) / max(hi - lo, 1e-300))
                point[name] = x_best
                value = v_best
        if abs(previous - value) <= tol * max(abs(value), 1e-300) and largest_step <= math.sqrt(tol):
            converged = True
            break

    logger.debug(f"Coordinate descent finished after {sweeps} sweeps, value={value:.6e}")
    return OptimumResult(
        point=dict(point), value=value, iterations=sweeps, converged=converged, method="coordinate"
    )


def minimize_numeric(
    objective: Callable[[Dict[str, float]], float],
    bounds: Bounds,
    initial: Optional[Mapping[str, float]] = None,
    tol: float = RELATIVE_TOLERANCE,
) -> OptimumResult:
    """
    Minimize an objective over named, bounded variables.

    One variable uses golden-section search, more use coordinate descent. Both are
    deterministic.

    Args:
        objective: Function of a mapping from variable name to value
        bounds: Search interval per variable
        initial: Starting point for coordinate descent
        tol: Relative tolerance

    Returns:
        OptimumResult with the argmin, the minimum and the iteration count
    """
    if not bounds:
        raise ParameterError("bounds", "at least one variable is required")

    if len(bounds) == 1:
        (name, (lo, hi)), = bounds.items()
        x, value, iterations = golden_section(lambda x: objective({name: x}), lo, hi, tol)
        return OptimumResult(
            point={name: x},
            value=value,
            iterations=iterations,
            converged=iterations < GOLDEN_MAX_ITER,
            method="golden",
        )

    return coordinate_descent(objective, bounds, initial, tol)
