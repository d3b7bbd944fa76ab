"""
Complex susceptibilities and the auxiliary frequency-domain functions shared by the spectra.

Signals are decomposed on e^{+i omega t}, so a time derivative becomes +i omega. Every function
accepts a scalar or an array of angular frequencies and broadcasts.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
import numpy.typing as npt

from src.core.exceptions import ParameterError
from src.core.utils import ComplexArray, FloatArray

from .model import SensorParams

logger = logging.getLogger(__name__)

ComplexResponse = Union[complex, ComplexArray]


class RatioForm(str, Enum):
    """How the atomic-to-mechanical susceptibility ratio R is evaluated."""

    HIGH_Q = "high_q"  # R = -(1 + r), the Gamma^2/4 shift dropped
    EXACT = "exact"  # R = chi_d/chi_m literally


def _omega(omega: npt.ArrayLike) -> FloatArray:
    return np.asarray(omega, dtype=np.float64)


def chi_a(omega: npt.ArrayLike, kappa: float) -> ComplexResponse:
    """Cavity susceptibility 1/(kappa/2 + i omega)."""
    w = _omega(omega)
    return 1.0 / (0.5 * kappa + 1j * w)


def mechanical_denominator(omega: npt.ArrayLike, omega_m: float, gamma_m: float) -> ComplexResponse:
    """(omega_m^2 - omega^2) + i omega gamma_m, factored to keep precision near resonance."""
    w = _omega(omega)
    return (omega_m - w) * (omega_m + w) + 1j * w * gamma_m


def atomic_denominator(
    omega: npt.ArrayLike, omega_s: float, gamma_d: float, form: RatioForm = RatioForm.EXACT
) -> ComplexResponse:
    """(omega_s^2 - omega^2 + Gamma^2/4) + i omega Gamma; HIGH_Q drops the Gamma^2/4 shift."""
    w = _omega(omega)
    shift = 0.25 * gamma_d**2 if form == RatioForm.EXACT else 0.0
    return (omega_s - w) * (omega_s + w) + shift + 1j * w * gamma_d


def chi_m(omega: npt.ArrayLike, omega_m: float, gamma_m: float) -> ComplexResponse:
    """Mechanical susceptibility omega_m/((omega_m^2 - omega^2) + i omega gamma_m)."""
    return omega_m / mechanical_denominator(omega, omega_m, gamma_m)


def chi_d(omega: npt.ArrayLike, omega_s: float, gamma_d: float) -> ComplexResponse:
    """Atomic susceptibility -omega_s/((omega_s^2 - omega^2 + Gamma^2/4) + i omega Gamma).

    The negative sign is the negative effective mass of the inverted spin.
    """
    return -omega_s / atomic_denominator(omega, omega_s, gamma_d, RatioForm.EXACT)


def inverse_chi_m_sq(omega: npt.ArrayLike, omega_m: float, gamma_m: float) -> FloatArray:
    """|chi_m|^-2 evaluated directly, so that high-Q resonances neither overflow nor underflow."""
    w = _omega(omega)
    detune = (omega_m - w) * (omega_m + w)
    return (detune**2 + (w * gamma_m) ** 2) / omega_m**2


def ratio(omega: npt.ArrayLike, params: SensorParams, form: RatioForm = RatioForm.HIGH_Q) -> ComplexResponse:
    """
    R = chi_d/chi_m = -(omega_s/omega_m) D_m/D_d, evaluated as -(1 + r).

    The HIGH_Q form drops Gamma^2/4 from D_d, so that R = -1 exactly when Gamma = gamma_m.
    """
    return -(1.0 + ratio_mismatch(omega, params, form))


def ratio_mismatch(
    omega: npt.ArrayLike, params: SensorParams, form: RatioForm = RatioForm.HIGH_Q
) -> ComplexResponse:
    """
    r = -(1 + R) without cancellation.

    With omega_s = omega_m and the HIGH_Q form this is i omega (gamma_m - Gamma)/((omega_m^2 -
    omega^2) + i omega Gamma).
    """
    w = _omega(omega)
    mech = params.mechanical
    omega_m, omega_s = mech.omega_m, params.omega_s
    shift = 0.25 * params.Gamma**2 if form == RatioForm.EXACT else 0.0
    numerator = (
        (omega_s - omega_m) * (omega_m * omega_s + w**2)
        + omega_m * shift
        + 1j * w * (omega_m * params.Gamma - omega_s * mech.gamma_m)
    )
    return -numerator / (omega_m * atomic_denominator(w, omega_s, params.Gamma, form))


def backaction_residual(
    omega: npt.ArrayLike, params: SensorParams, form: RatioForm = RatioForm.HIGH_Q
) -> ComplexResponse:
    """
    1 + (G^2/g^2) R, the fraction of radiation-pressure noise left after the atoms.

    Evaluated over a common denominator, so it is exactly zero for G = g, Gamma = gamma_m and
    omega_s = omega_m in the HIGH_Q form.
    """
    g = params.g
    if g <= 0:
        raise ParameterError("g", "backaction residual needs g > 0")
    w = _omega(omega)
    mech = params.mechanical
    omega_m, omega_s = mech.omega_m, params.omega_s
    q = (params.G / g) ** 2 * omega_s / omega_m
    shift = 0.25 * params.Gamma**2 if form == RatioForm.EXACT else 0.0
    numerator = (
        (omega_s - omega_m) * (omega_s + omega_m)
        + (1.0 - q) * (omega_m - w) * (omega_m + w)
        + shift
        + 1j * w * (params.Gamma - q * mech.gamma_m)
    )
    return numerator / atomic_denominator(w, omega_s, params.Gamma, form)


def ratio_discrepancy(omega: npt.ArrayLike, params: SensorParams) -> FloatArray:
    """Relative difference |R_exact - R_high_q|/|R_exact|, a measure of the Gamma^2/4 shift."""
    exact = ratio(omega, params, RatioForm.EXACT)
    high_q = ratio(omega, params, RatioForm.HIGH_Q)
    return np.asarray(np.abs(exact - high_q) / np.abs(exact), dtype=np.float64)


def chi_a_eff(
    omega: npt.ArrayLike, params: SensorParams, form: RatioForm = RatioForm.EXACT
) -> ComplexResponse:
    """
    Cavity susceptibility modified by the detuned coupling to both oscillators.

    1/chi'_a = 1/chi_a - chi_a Delta (g^2 chi_m + G^2 chi_d - Delta). Zero detuning returns
    chi_a unchanged.

    Args:
        omega: Angular frequencies
        params: Sensor parameters
        form: Ratio form used for G^2 chi_d = g^2 chi_m (G^2/g^2) R

    Returns:
        chi'_a at every frequency
    """
    params = params.ensure_resolved()
    w = _omega(omega)
    mech = params.mechanical
    detuning = params.cavity.detuning_c
    cavity = chi_a(w, params.cavity.kappa)
    if detuning == 0.0:
        return cavity

    mechanical = chi_m(w, mech.omega_m, mech.gamma_m)
    g = params.g
    if g > 0:
        coupling = mechanical * g**2 * backaction_residual(w, params, form)
    else:
        coupling = mechanical * params.G**2 * ratio(w, params, form)
    return 1.0 / (1.0 / cavity - cavity * detuning * (coupling - detuning))


def chi_a_eff_cqnc(omega: npt.ArrayLike, kappa: float, detuning: float) -> ComplexResponse:
    """(1/chi_a + chi_a Delta^2)^-1, the modified susceptibility once the backaction cancels."""
    cavity = chi_a(omega, kappa)
    return 1.0 / (1.0 / cavity + cavity * detuning**2)


@dataclass(frozen=True)
class MismatchFunctions:
    """The auxiliary functions R, r, Z and A, plus the cancellation residual 1 + (G^2/g^2) R."""

    R: ComplexResponse
    r: ComplexResponse
    Z: ComplexResponse
    A: ComplexResponse
    residual: ComplexResponse


def mismatch_functions(
    omega: npt.ArrayLike, params: SensorParams, form: RatioForm = RatioForm.HIGH_Q
) -> MismatchFunctions:
    """
    Evaluate R, r, Z = chi_a (1 - 1/(kappa chi'_a*)) and A = (G/g) sqrt(Gamma/gamma_m) R.

    Raises:
        ParameterError: If g = 0, where A and the ratio forms are undefined
    """
    params = params.ensure_resolved()
    g = params.g
    if g <= 0:
        raise ParameterError("g", "mismatch functions need g > 0")

    w = _omega(omega)
    kappa = params.cavity.kappa
    r_value = ratio(w, params, form)
    effective = chi_a_eff(w, params, form)
    cavity = chi_a(w, kappa)
    z_value = cavity * (1.0 - 1.0 / (kappa * np.conj(effective)))
    a_value = (params.G / g) * np.sqrt(params.Gamma / params.mechanical.gamma_m) * r_value

    return MismatchFunctions(
        R=r_value,
        r=ratio_mismatch(w, params, form),
        Z=z_value,
        A=a_value,
        residual=backaction_residual(w, params, form),
    )
