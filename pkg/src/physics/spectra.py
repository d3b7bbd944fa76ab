"""
Closed-form force-noise spectra and the reference limits.

Every spectrum is dimensionless, in units of hbar m omega_m gamma_m per Hz; multiply by
model.si_scale_factor for N^2/Hz. All spectra are symmetrized.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
import numpy.typing as npt

from src.core.exceptions import ParameterError
from src.core.utils import FloatArray, as_frequency_array

from .model import MechanicalParams, MismatchSpec, SensorParams, SqueezingParams, thermal_number
from .response import (
    RatioForm,
    backaction_residual,
    chi_a,
    chi_a_eff,
    inverse_chi_m_sq,
    mechanical_denominator,
    mismatch_functions,
)

logger = logging.getLogger(__name__)

__all__ = [
    "COMPONENTS",
    "MismatchSpec",
    "SpectrumBreakdown",
    "ThermalMode",
    "cqnc_breakdown",
    "cqnc_floor",
    "sigma_squeezing",
    "spectrum_cqnc",
    "spectrum_exact",
    "spectrum_standard",
    "spectrum_standard_squeezed",
    "spectrum_zero_detuning",
    "sql",
    "sql_squeezed",
    "standard_breakdown",
    "thermal_noise",
    "ultimate_limit",
]

COMPONENTS: Tuple[str, ...] = ("total", "thermal", "field", "backaction", "atomic", "interference")

MARKOV_ADVISORY_RATIO = 10.0


class ThermalMode(str, Enum):
    EXACT = "exact"  # n_bar + 1/2
    HIGH_TEMPERATURE = "high_temperature"  # k_B T/(hbar omega_m)


@dataclass(frozen=True)
class SpectrumBreakdown:
    """Force-noise spectrum split into its contributions.

    Every contribution except the interference term is non-negative; total is their sum.
    """

    total: FloatArray
    thermal: FloatArray
    field: FloatArray
    backaction: FloatArray
    atomic: FloatArray
    interference: FloatArray

    @classmethod
    def from_components(
        cls,
        thermal: FloatArray,
        field: FloatArray,
        backaction: FloatArray,
        atomic: FloatArray,
        interference: FloatArray,
    ) -> "SpectrumBreakdown":
        total = thermal + field + backaction + atomic + interference
        if np.any(total < 0):
            logger.warning(f"Non-physical negative total at {int(np.sum(total < 0))} points")
        return cls(total, thermal, field, backaction, atomic, interference)

    def as_dict(self) -> Dict[str, FloatArray]:
        return {name: getattr(self, name) for name in COMPONENTS}


def thermal_noise(mech: MechanicalParams, mode: ThermalMode = ThermalMode.EXACT) -> float:
    """Thermal force noise: n_bar + 1/2, or k_B T/(hbar omega_m) in the high-temperature form."""
    occupation = thermal_number(mech)
    if mode == ThermalMode.HIGH_TEMPERATURE:
        return occupation.high_temperature
    return occupation.n_bar + 0.5


def _require_coupling(params: SensorParams) -> float:
    g = params.g
    if g <= 0:
        raise ParameterError("g", "the force estimator divides by g; g must be positive")
    return g


def _moments(squeezing: SqueezingParams) -> Tuple[float, float, float]:
    """(N + 1/2 + Re M, N + 1/2 - Re M, Im M)."""
    base = squeezing.n_sq + 0.5
    return base + squeezing.re_m, base - squeezing.re_m, squeezing.im_m


def _markov_advisory(w: FloatArray, kappa: float) -> None:
    peak = float(np.max(np.abs(w))) if w.size else 0.0
    if peak > 0 and kappa / peak < MARKOV_ADVISORY_RATIO:
        logger.warning(
            f"kappa/omega = {kappa / peak:.3g} < {MARKOV_ADVISORY_RATIO}; "
            "the Markov-limit closed form is inaccurate here"
        )


def spectrum_exact(
    omega: npt.ArrayLike,
    params: SensorParams,
    squeezing: SqueezingParams,
    thermal_mode: ThermalMode = ThermalMode.EXACT,
    ratio_form: RatioForm = RatioForm.HIGH_Q,
) -> SpectrumBreakdown:
    """
    Force noise for arbitrary detuning and mismatch.

    Args:
        omega: Angular frequencies
        params: Sensor parameters
        squeezing: Injected squeezed vacuum
        thermal_mode: Thermal-noise form
        ratio_form: Form of R used for the atomic response

    Returns:
        SpectrumBreakdown with field, backaction, atomic and interference terms
    """
    params = params.ensure_resolved()
    g = _require_coupling(params)
    w = as_frequency_array(omega)
    mech = params.mechanical
    kappa = params.cavity.kappa
    detuning = params.cavity.detuning_c
    gamma = mech.gamma_m
    plus, minus, im_m = _moments(squeezing)

    functions = mismatch_functions(w, params, ratio_form)
    cavity = chi_a(w, kappa)
    effective = chi_a_eff(w, params, ratio_form)
    inv_cm2 = inverse_chi_m_sq(w, mech.omega_m, gamma)
    # residual * conj(D_m)/omega_m = (1 + G^2 R/g^2)/chi_m*
    weighted = functions.residual * np.conj(mechanical_denominator(w, mech.omega_m, gamma)) / mech.omega_m
    cavity_sq = np.abs(cavity) ** 2

    shot = (
        detuning * np.imag(functions.Z * (-2j * im_m))
        + np.abs(1.0 - 1.0 / (kappa * effective)) ** 2 * minus
        + detuning**2 * cavity_sq * plus
    )
    field = kappa / (g**2 * gamma) * inv_cm2 * shot
    backaction = (kappa / gamma) * g**2 * cavity_sq * plus * np.abs(functions.residual) ** 2
    atomic = 0.5 * np.abs(functions.A) ** 2 * (1.0 + (w**2 + 0.25 * params.Gamma**2) / params.omega_s**2)
    interference = (kappa / gamma) * np.imag(2j * im_m * functions.Z * weighted) - 2.0 * (
        kappa / gamma
    ) * detuning * cavity_sq * plus * np.real(weighted)

    thermal = np.full_like(w, thermal_noise(mech, thermal_mode))
    return SpectrumBreakdown.from_components(
        thermal, np.real(field), backaction, atomic, np.real(interference)
    )


def spectrum_zero_detuning(
    omega: npt.ArrayLike,
    params: SensorParams,
    squeezing: SqueezingParams,
    thermal_mode: ThermalMode = ThermalMode.EXACT,
    ratio_form: RatioForm = RatioForm.HIGH_Q,
    advise: bool = True,
) -> SpectrumBreakdown:
    """Resonant-drive spectrum in the kappa >> omega limit.

    advise=False silences the Markov-regime warning for callers that report it once themselves.
    """
    params = params.ensure_resolved()
    g = _require_coupling(params)
    detuning = params.cavity.detuning_c
    if detuning != 0.0:
        raise ParameterError(
            "detuning_c", f"zero-detuning form needs detuning 0, got {detuning}; use spectrum_exact"
        )
    w = as_frequency_array(omega)
    mech = params.mechanical
    kappa = params.cavity.kappa
    gamma = mech.gamma_m
    if advise:
        _markov_advisory(w, kappa)
    plus, minus, im_m = _moments(squeezing)

    residual = backaction_residual(w, params, ratio_form)
    functions = mismatch_functions(w, params, ratio_form)
    inv_cm2 = inverse_chi_m_sq(w, mech.omega_m, gamma)
    d_m = mechanical_denominator(w, mech.omega_m, gamma)

    field = kappa / (4.0 * g**2 * gamma) * inv_cm2 * minus
    backaction = 4.0 * g**2 / (kappa * gamma) * plus * np.abs(residual) ** 2
    atomic = 0.5 * np.abs(functions.A) ** 2 * (1.0 + (w**2 + 0.25 * params.Gamma**2) / params.omega_s**2)
    interference = np.imag(2j * im_m * residual * np.conj(d_m)) / (gamma * mech.omega_m)

    thermal = np.full_like(w, thermal_noise(mech, thermal_mode))
    return SpectrumBreakdown.from_components(thermal, field, backaction, atomic, interference)


def sigma_squeezing(n_sq: float, m: complex, y: float) -> float:
    """Squeezing contribution to the shot-noise bracket at detuning ratio y = Delta/kappa."""
    base = 0.5 + 2.0 * y**2
    return n_sq * base**2 + 2.0 * y * m.imag * (4.0 * y**2 - 1.0) + m.real * (8.0 * y**2 - base**2)


def cqnc_breakdown(
    omega: npt.ArrayLike,
    params: SensorParams,
    squeezing: SqueezingParams,
    thermal_mode: ThermalMode = ThermalMode.EXACT,
) -> SpectrumBreakdown:
    """
    Spectrum with perfect backaction cancellation, kappa >> omega.

    The atomic noise is the cancellation floor; backaction and interference vanish.
    """
    params = params.ensure_resolved()
    g = _require_coupling(params)
    w = as_frequency_array(omega)
    mech = params.mechanical
    kappa = params.cavity.kappa
    y = params.cavity.detuning_c / kappa

    bracket = 0.5 * (0.5 + 2.0 * y**2) ** 2 + sigma_squeezing(squeezing.n_sq, squeezing.m, y)
    field = kappa / (g**2 * mech.gamma_m) * inverse_chi_m_sq(w, mech.omega_m, mech.gamma_m) * bracket
    zeros = np.zeros_like(w)
    thermal = np.full_like(w, thermal_noise(mech, thermal_mode))
    return SpectrumBreakdown.from_components(thermal, field, zeros, cqnc_floor(w, mech), zeros.copy())


def spectrum_cqnc(
    omega: npt.ArrayLike,
    params: SensorParams,
    squeezing: SqueezingParams,
    thermal_mode: ThermalMode = ThermalMode.EXACT,
) -> FloatArray:
    return cqnc_breakdown(omega, params, squeezing, thermal_mode).total


def standard_breakdown(
    omega: npt.ArrayLike,
    params: SensorParams,
    squeezing: Optional[SqueezingParams] = None,
    thermal_mode: ThermalMode = ThermalMode.EXACT,
) -> SpectrumBreakdown:
    """
    Single resonant cavity without atoms, with optional squeezed input.

    The detuning and atomic fields of params are not used.
    """
    params = params.ensure_resolved()
    g = _require_coupling(params)
    squeezing = squeezing or SqueezingParams.vacuum()
    w = as_frequency_array(omega)
    mech = params.mechanical
    kappa = params.cavity.kappa
    gamma = mech.gamma_m
    plus, minus, im_m = _moments(squeezing)

    field = kappa / (4.0 * g**2 * gamma) * inverse_chi_m_sq(w, mech.omega_m, gamma) * minus
    backaction = np.full_like(w, 4.0 * g**2 / (kappa * gamma) * plus)
    interference = 2.0 * im_m * (mech.omega_m - w) * (mech.omega_m + w) / (gamma * mech.omega_m)
    thermal = np.full_like(w, thermal_noise(mech, thermal_mode))
    return SpectrumBreakdown.from_components(
        thermal, field, backaction, np.zeros_like(w), interference
    )


def spectrum_standard(
    omega: npt.ArrayLike, params: SensorParams, thermal_mode: ThermalMode = ThermalMode.EXACT
) -> FloatArray:
    """Standard optomechanical spectrum with vacuum input."""
    return standard_breakdown(omega, params, None, thermal_mode).total


def spectrum_standard_squeezed(
    omega: npt.ArrayLike,
    params: SensorParams,
    squeezing: SqueezingParams,
    thermal_mode: ThermalMode = ThermalMode.EXACT,
) -> FloatArray:
    return standard_breakdown(omega, params, squeezing, thermal_mode).total


def sql(omega: npt.ArrayLike, mech: MechanicalParams) -> FloatArray:
    """Standard quantum limit 1/(gamma_m |chi_m|)."""
    w = as_frequency_array(omega)
    return np.sqrt(inverse_chi_m_sq(w, mech.omega_m, mech.gamma_m)) / mech.gamma_m


def sql_squeezed(omega: npt.ArrayLike, mech: MechanicalParams, n_sq: float, re_m: float) -> FloatArray:
    """SQL modified by squeezing, sqrt((2N+1)^2 - 4 Re(M)^2) S_SQL."""
    factor = max((2.0 * n_sq + 1.0) ** 2 - 4.0 * re_m**2, 0.0)
    return np.sqrt(factor) * sql(omega, mech)


def ultimate_limit(omega: npt.ArrayLike, mech: MechanicalParams) -> FloatArray:
    """|Im chi_m|/(gamma_m |chi_m|^2), which reduces to |omega|/omega_m."""
    w = as_frequency_array(omega)
    return np.abs(w) / mech.omega_m


def cqnc_floor(omega: npt.ArrayLike, mech: MechanicalParams) -> FloatArray:
    """Atomic noise left behind by perfect cancellation, (1/2)(1 + (omega^2 + gamma_m^2/4)/omega_m^2)."""
    w = as_frequency_array(omega)
    return 0.5 * (1.0 + (w**2 + 0.25 * mech.gamma_m**2) / mech.omega_m**2)
