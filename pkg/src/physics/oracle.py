"""
Brute-force frequency-domain solution of the six linearized Langevin equations.

The state is (X, P, X_a, P_a, X_d, P_d) and the inputs are (f, X_a_in, P_a_in, X_d_in, P_d_in).
The estimated force is read from the phase quadrature of the output field and its symmetrized
spectrum is built from the ordered input correlation table without using any closed form.
"""

import logging
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Tuple

import numpy as np
import numpy.typing as npt
from scipy import linalg

from src.core.exceptions import ParameterError, SingularSystemError
from src.core.utils import ComplexArray, FloatArray, as_frequency_array

from .model import SensorParams, SqueezingParams
from .response import RatioForm, chi_a_eff, chi_m
from .spectra import SpectrumBreakdown, ThermalMode, thermal_noise

logger = logging.getLogger(__name__)

STATE_LABELS: Tuple[str, ...] = ("X", "P", "X_a", "P_a", "X_d", "P_d")
INPUT_LABELS: Tuple[str, ...] = ("f", "X_a_in", "P_a_in", "X_d_in", "P_d_in")
CHANNEL_GROUPS: Dict[str, Tuple[int, ...]] = {
    "thermal": (0,),
    "optical": (1, 2),
    "atomic": (3, 4),
}

_P_A = STATE_LABELS.index("P_a")
_P_A_IN = INPUT_LABELS.index("P_a_in")
_EPS = float(np.finfo(np.float64).eps)


class FourierConvention(IntEnum):
    """Sign s in d/dt -> s i omega."""

    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class DriftMatrix:
    matrix: FloatArray

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))


@dataclass(frozen=True)
class NoiseModel:
    """Input couplings and the ordered correlation table <n_i(omega) n_j(-omega')> = C_ij delta."""

    coupling: FloatArray
    correlations: ComplexArray


@dataclass(frozen=True)
class EstimatorWeights:
    """Weights c_i with F_est = F_ext + sum_i c_i n_i; gain is the F_ext -> P_a_out transfer."""

    gain: ComplexArray
    weights: ComplexArray


@dataclass(frozen=True)
class OracleSpectrum:
    omega: FloatArray
    total: FloatArray
    ordered: FloatArray
    channels: Dict[str, FloatArray]
    estimator: EstimatorWeights

    def to_breakdown(self) -> SpectrumBreakdown:
        """Map channels onto a breakdown; the whole optical channel is reported as field."""
        zeros = np.zeros_like(self.total)
        return SpectrumBreakdown(
            total=self.total,
            thermal=self.channels["thermal"],
            field=self.channels["optical"],
            backaction=zeros,
            atomic=self.channels["atomic"],
            interference=zeros.copy(),
        )


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    marginal: bool
    eigenvalues: ComplexArray
    max_real_part: float


def build_drift(params: SensorParams) -> DriftMatrix:
    """
    Drift matrix of the linearized equations.

    Args:
        params: Sensor parameters

    Returns:
        6x6 real DriftMatrix in the state order of STATE_LABELS
    """
    params = params.ensure_resolved()
    mech = params.mechanical
    kappa = params.cavity.kappa
    detuning = params.cavity.detuning_c
    g, big_g, gamma_d, omega_s = params.g, params.G, params.Gamma, params.omega_s

    a = np.zeros((6, 6))
    a[0, 1] = mech.omega_m
    a[1, 0] = -mech.omega_m
    a[1, 1] = -mech.gamma_m
    a[1, 2] = -g
    a[2, 2] = -0.5 * kappa
    a[2, 3] = detuning
    a[3, 0] = -g
    a[3, 2] = -detuning
    a[3, 3] = -0.5 * kappa
    a[3, 4] = -big_g
    a[4, 4] = -0.5 * gamma_d
    a[4, 5] = -omega_s
    a[5, 2] = -big_g
    a[5, 4] = omega_s
    a[5, 5] = -0.5 * gamma_d
    return DriftMatrix(a)


def input_coupling(params: SensorParams) -> FloatArray:
    """6x5 map from inputs to state derivatives: sqrt(gamma_m), sqrt(kappa), sqrt(Gamma)."""
    params = params.ensure_resolved()
    b = np.zeros((6, 5))
    b[1, 0] = math.sqrt(params.mechanical.gamma_m)
    b[2, 1] = b[3, 2] = math.sqrt(params.cavity.kappa)
    b[4, 3] = b[5, 4] = math.sqrt(params.Gamma)
    return b


def input_spectral_matrix(
    params: SensorParams,
    squeezing: SqueezingParams,
    thermal_mode: ThermalMode = ThermalMode.EXACT,
    convention: FourierConvention = FourierConvention.PLUS,
) -> NoiseModel:
    """
    Ordered input correlations in the white-noise limit.

    The optical block carries the squeezing moments and the +-i/2 commutator parts; atoms are
    in the vacuum of an inverted ensemble; thermal noise is uncorrelated with both. The
    opposite Fourier convention conjugates the table.
    """
    n_sq = squeezing.n_sq
    c = np.zeros((5, 5), dtype=np.complex128)
    c[0, 0] = thermal_noise(params.mechanical, thermal_mode)
    c[1, 1] = n_sq + 0.5 + squeezing.re_m
    c[2, 2] = n_sq + 0.5 - squeezing.re_m
    c[1, 2] = squeezing.im_m + 0.5j
    c[2, 1] = squeezing.im_m - 0.5j
    c[3, 3] = c[4, 4] = 0.5
    c[3, 4] = -0.5j
    c[4, 3] = 0.5j
    if convention == FourierConvention.MINUS:
        c = np.conj(c)
    return NoiseModel(coupling=input_coupling(params), correlations=c)


def _condition_numbers(system: ComplexArray) -> FloatArray:
    with np.errstate(all="ignore"):
        return np.asarray(np.linalg.cond(system), dtype=np.float64)


def _raise_singular(w: FloatArray, system: ComplexArray) -> None:
    condition = _condition_numbers(system)
    condition = np.where(np.isfinite(condition), condition, np.inf)
    worst = int(np.argmax(condition))
    if condition[worst] >= 1.0 / _EPS:
        raise SingularSystemError(float(w[worst]), float(condition[worst]))


def state_response(
    omega: npt.ArrayLike,
    drift: DriftMatrix,
    coupling: FloatArray,
    convention: FourierConvention = FourierConvention.PLUS,
) -> ComplexArray:
    """
    Solve (s i omega I - A) T = B at every frequency.

    Returns:
        Array of shape (n_omega, 6, 5)

    Raises:
        SingularSystemError: If the system is numerically singular at some frequency
    """
    w = as_frequency_array(omega)
    identity = np.eye(6)
    system = int(convention) * 1j * w[:, None, None] * identity - drift.matrix
    rhs = np.broadcast_to(coupling.astype(np.complex128), (w.size, 6, coupling.shape[1]))
    try:
        solution = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        _raise_singular(w, system)
        raise
    if not np.all(np.isfinite(solution)):
        _raise_singular(w, system)
    return solution


def estimator_weights(
    omega: npt.ArrayLike,
    params: SensorParams,
    convention: FourierConvention = FourierConvention.PLUS,
) -> EstimatorWeights:
    """
    Output phase quadrature P_a_out = sqrt(kappa) P_a - P_a_in, normalized by the signal gain.

    The signal enters on the thermal port, so the gain is the f -> P_a_out transfer and the
    thermal weight is exactly one.
    """
    params = params.ensure_resolved()
    if params.g <= 0:
        raise ParameterError("g", "the force estimator divides by g; g must be positive")
    transfer = state_response(omega, build_drift(params), input_coupling(params), convention)
    output = math.sqrt(params.cavity.kappa) * transfer[:, _P_A, :]
    output[:, _P_A_IN] -= 1.0
    gain = output[:, 0].copy()
    return EstimatorWeights(gain=gain, weights=output / gain[:, None])


def closed_form_gain(omega: npt.ArrayLike, params: SensorParams) -> ComplexArray:
    """-g chi'_a chi_m sqrt(kappa gamma_m) with the exact atomic response."""
    params = params.ensure_resolved()
    w = as_frequency_array(omega)
    mech = params.mechanical
    return np.asarray(
        -params.g
        * chi_a_eff(w, params, RatioForm.EXACT)
        * chi_m(w, mech.omega_m, mech.gamma_m)
        * math.sqrt(params.cavity.kappa * mech.gamma_m)
    )


def _quadratic(left: ComplexArray, table: ComplexArray, right: ComplexArray) -> ComplexArray:
    """sum_ij left_i C_ij right_j at every frequency."""
    return np.sum(left[:, :, None] * table[None, :, :] * right[:, None, :], axis=(1, 2))


def estimator_spectrum(
    omega: npt.ArrayLike,
    params: SensorParams,
    squeezing: SqueezingParams,
    thermal_mode: ThermalMode = ThermalMode.EXACT,
    convention: FourierConvention = FourierConvention.PLUS,
) -> OracleSpectrum:
    """
    Symmetrized added-force spectrum from the full linear system.

    Args:
        omega: Angular frequencies
        params: Sensor parameters
        squeezing: Injected squeezed vacuum
        thermal_mode: Thermal-noise form of the f-f correlation
        convention: Fourier sign convention

    Returns:
        OracleSpectrum with the total, the ordered spectrum and the per-channel split

    Raises:
        ParameterError: If g = 0
        SingularSystemError: If the system is singular at some frequency
    """
    params = params.ensure_resolved()
    w = as_frequency_array(omega)
    estimator = estimator_weights(w, params, convention)
    table = input_spectral_matrix(params, squeezing, thermal_mode, convention).correlations
    c = estimator.weights
    c_bar = np.conj(c)

    ordered = _quadratic(c, table, c_bar)
    reversed_order = _quadratic(c_bar, table, c)
    total = np.real(0.5 * (ordered + reversed_order))

    channels: Dict[str, FloatArray] = {}
    for name, indices in CHANNEL_GROUPS.items():
        idx = np.array(indices)
        block = table[np.ix_(idx, idx)]
        part = _quadratic(c[:, idx], block, c_bar[:, idx]) + _quadratic(c_bar[:, idx], block, c[:, idx])
        channels[name] = np.real(0.5 * part)

    logger.debug(f"Oracle spectrum evaluated at {w.size} frequencies")
    return OracleSpectrum(
        omega=w, total=total, ordered=np.real(ordered), channels=channels, estimator=estimator
    )


def classify_eigenvalues(matrix: FloatArray) -> StabilityReport:
    """Stable iff every eigenvalue has Re < 0; marginal if some Re is zero within tolerance."""
    eigenvalues = linalg.eigvals(matrix)
    tolerance = 1e-12 * max(1.0, float(np.linalg.norm(matrix)))
    real_parts = np.real(eigenvalues)
    marginal = bool(np.any(np.abs(real_parts) <= tolerance))
    stable = bool(np.all(real_parts < -tolerance))
    return StabilityReport(
        stable=stable,
        marginal=marginal,
        eigenvalues=eigenvalues,
        max_real_part=float(np.max(real_parts)),
    )


def stability(params: SensorParams) -> StabilityReport:
    report = classify_eigenvalues(build_drift(params).matrix)
    if not report.stable:
        logger.warning(
            f"Drift matrix is not stable (max Re lambda = {report.max_real_part:.3e}, "
            f"marginal={report.marginal})"
        )
    return report
