"""
Physical parameters of the sensor, unit conventions, the steady-state intracavity amplitude,
the power-to-coupling map and regime checks.

All rates are angular (rad/s). Configuration files quote ordinary frequencies and are
converted by the bench loader.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import constants, optimize

from src.core.exceptions import ConvergenceError, ParameterError

logger = logging.getLogger(__name__)

HBAR = constants.hbar
K_B = constants.k
SPEED_OF_LIGHT = constants.c

# 10 ng, a typical SiN membrane; only used to convert to N^2/Hz
DEFAULT_MEMBRANE_MASS = 1.0e-11
DEFAULT_WAVELENGTH = 780e-9

PURITY_RTOL = 1e-12
STEADY_STATE_RTOL = 1e-12
FIXED_POINT_DAMPING = 0.5
FIXED_POINT_MAX_ITER = 500
FIXED_POINT_RTOL = 1e-14

WHITE_NOISE_MIN_RATIO = 10.0
ROTATING_WAVE_MIN_RATIO = 1.0e3
DEPHASING_MAX_RATIO = 1.0e-2
QUALITY_FACTOR_MIN = 1.0e3
MARKOV_MIN_RATIO = 10.0
FREQUENCY_MATCH_MAX = 1.0e-6

_FROZEN = ConfigDict(frozen=True, extra="forbid")


class MechanicalParams(BaseModel):
    """Mechanical oscillator: frequency, damping, effective mass and bath temperature."""

    model_config = _FROZEN

    omega_m: float = Field(..., gt=0, description="Mechanical frequency (rad/s)")
    gamma_m: float = Field(..., gt=0, description="Mechanical damping rate (rad/s)")
    mass: float = Field(DEFAULT_MEMBRANE_MASS, gt=0, description="Effective mass (kg)")
    temperature: float = Field(0.0, ge=0, description="Bath temperature (K)")

    @property
    def quality_factor(self) -> float:
        return self.omega_m / self.gamma_m


class CavityParams(BaseModel):
    """Cavity mode and its coherent drive."""

    model_config = _FROZEN

    kappa: float = Field(..., gt=0, description="Total decay rate (rad/s)")
    kappa_in: Optional[float] = Field(None, gt=0, description="Input-port rate, defaults to kappa")
    detuning_c: float = Field(0.0, description="Effective detuning (rad/s)")
    g0: float = Field(0.0, ge=0, description="Single-photon coupling (rad/s)")
    laser_wavelength: float = Field(DEFAULT_WAVELENGTH, gt=0, description="Wavelength (m)")
    laser_power: float = Field(0.0, ge=0, description="Drive power (W)")
    detuning_is_bare: bool = Field(
        False, description="Treat detuning_c as the bare detuning and solve for the shifted one"
    )

    @model_validator(mode="after")
    def check_input_port(self) -> "CavityParams":
        if self.kappa_in is not None and self.kappa_in > self.kappa:
            raise ValueError("kappa_in must satisfy 0 < kappa_in <= kappa")
        return self

    @property
    def input_rate(self) -> float:
        return self.kappa if self.kappa_in is None else self.kappa_in

    @property
    def laser_frequency(self) -> float:
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.laser_wavelength


class AtomicParams(BaseModel):
    """Collective atomic oscillator.

    Unset fields are matched to the optomechanical side when the sensor is resolved:
    G locks to g, Gamma to gamma_m and the transition rate to omega_m.
    """

    model_config = _FROZEN

    coupling_G: Optional[float] = Field(None, ge=0, description="Collective coupling (rad/s)")
    dephasing_Gamma: Optional[float] = Field(None, gt=0, description="Dephasing rate (rad/s)")
    transition_rate: Optional[float] = Field(None, gt=0, description="Splitting omega_s (rad/s)")

    @classmethod
    def undamped(cls, transition_rate: Optional[float] = None) -> "AtomicParams":
        """Uncoupled ensemble with Gamma = 0, the marginally stable limit; skips validation."""
        return cls.model_construct(
            coupling_G=0.0, dephasing_Gamma=0.0, transition_rate=transition_rate
        )


class MismatchSpec(BaseModel):
    """Relative deviations from the noise-cancellation matching conditions."""

    model_config = _FROZEN

    coupling_mismatch: float = Field(0.0, ge=-1.0, description="(G - g)/g")
    decay_mismatch: float = Field(0.0, gt=-1.0, description="(Gamma - gamma_m)/gamma_m")

    @property
    def is_zero(self) -> bool:
        return self.coupling_mismatch == 0.0 and self.decay_mismatch == 0.0


class SqueezingParams(BaseModel):
    """Second moments of the injected squeezed vacuum in the white-noise limit."""

    model_config = _FROZEN

    n_sq: float = Field(0.0, ge=0, description="Photon-number moment N")
    m_mag: float = Field(0.0, ge=0, description="Anomalous moment |M|")
    phi: float = Field(0.0, description="Squeezing phase (rad)")
    bandwidth_x: Optional[float] = Field(None, ge=0, description="OPO bandwidth b_x (rad/s)")
    bandwidth_y: Optional[float] = Field(None, ge=0, description="OPO bandwidth b_y (rad/s)")

    @model_validator(mode="after")
    def check_moments(self) -> "SqueezingParams":
        bound = self.n_sq * (self.n_sq + 1.0)
        if self.m_mag**2 > bound * (1.0 + PURITY_RTOL):
            raise ValueError(
                f"squeezing moments violate |M|^2 <= N(N+1): "
                f"|M|^2 = {self.m_mag**2:.17g} > {bound:.17g}"
            )
        if (
            self.bandwidth_x is not None
            and self.bandwidth_y is not None
            and self.bandwidth_y < self.bandwidth_x
        ):
            raise ValueError("bandwidth_y must be >= bandwidth_x")
        return self

    @classmethod
    def vacuum(cls) -> "SqueezingParams":
        return cls()

    @classmethod
    def pure(cls, n_sq: float, phi: float = 0.0, **bandwidths: Optional[float]) -> "SqueezingParams":
        """Pure squeezed vacuum with |M| = sqrt(N(N+1))."""
        return cls(n_sq=n_sq, m_mag=math.sqrt(n_sq * (n_sq + 1.0)), phi=phi, **bandwidths)

    @classmethod
    def from_squeeze_factor(cls, r: float, phi: float = 0.0) -> "SqueezingParams":
        """N = sinh^2 r and |M| = sinh(2r)/2."""
        if r < 0:
            raise ParameterError("r", "squeeze factor must be non-negative")
        return cls(n_sq=math.sinh(r) ** 2, m_mag=0.5 * math.sinh(2.0 * r), phi=phi)

    @classmethod
    def from_opo(cls, epsilon: float, gamma_opo: float, phi: float = 0.0) -> "SqueezingParams":
        """
        Output of a degenerate OPO below threshold.

        Args:
            epsilon: Magnitude of the parametric gain (rad/s), below gamma_opo/2
            gamma_opo: OPO output coupling rate (rad/s)
            phi: Phase of the pump

        Returns:
            Squeezing moments with b_x = gamma/2 - epsilon and b_y = gamma/2 + epsilon
        """
        half = 0.5 * gamma_opo
        if gamma_opo <= 0 or not 0 <= epsilon < half:
            raise ParameterError("epsilon", "OPO requires 0 <= epsilon < gamma_opo/2")
        b_x = half - epsilon
        b_y = half + epsilon
        scale = epsilon * half
        n_sq = scale * (1.0 / b_x**2 - 1.0 / b_y**2)
        m_mag = scale * (1.0 / b_x**2 + 1.0 / b_y**2)
        # the two moments saturate the purity bound; clip the last-bit excess
        m_mag = min(m_mag, math.sqrt(n_sq * (n_sq + 1.0)))
        return cls(n_sq=n_sq, m_mag=m_mag, phi=phi, bandwidth_x=b_x, bandwidth_y=b_y)

    @property
    def m(self) -> complex:
        return complex(self.re_m, self.im_m)

    @property
    def re_m(self) -> float:
        return self.m_mag * math.cos(self.phi)

    @property
    def im_m(self) -> float:
        return self.m_mag * math.sin(self.phi)

    @property
    def is_pure(self) -> bool:
        return self.m_mag**2 >= self.n_sq * (self.n_sq + 1.0) * (1.0 - 1e-9)


class SensorParams(BaseModel):
    """The full linearized sensor: mechanics, cavity, atoms and the optomechanical coupling g.

    When coupling_g is unset it is derived from the drive power through the steady state.
    """

    model_config = _FROZEN

    mechanical: MechanicalParams
    cavity: CavityParams
    atomic: AtomicParams = AtomicParams()
    coupling_g: Optional[float] = Field(None, ge=0, description="Linearized coupling g (rad/s)")

    @property
    def g(self) -> float:
        if self.coupling_g is not None:
            return self.coupling_g
        return coupling_from_power(self)

    @property
    def G(self) -> float:
        if self.atomic.coupling_G is not None:
            return self.atomic.coupling_G
        return self.g

    @property
    def Gamma(self) -> float:
        if self.atomic.dephasing_Gamma is not None:
            return self.atomic.dephasing_Gamma
        return self.mechanical.gamma_m

    @property
    def omega_s(self) -> float:
        if self.atomic.transition_rate is not None:
            return self.atomic.transition_rate
        return self.mechanical.omega_m

    @property
    def detuning(self) -> float:
        if not self.cavity.detuning_is_bare:
            return self.cavity.detuning_c
        return self.resolved().cavity.detuning_c

    @property
    def is_resolved(self) -> bool:
        atomic = self.atomic
        return (
            self.coupling_g is not None
            and atomic.coupling_G is not None
            and atomic.dephasing_Gamma is not None
            and atomic.transition_rate is not None
            and not self.cavity.detuning_is_bare
        )

    def ensure_resolved(self) -> "SensorParams":
        return self if self.is_resolved else self.resolved()

    def with_coupling(self, g: float) -> "SensorParams":
        return self.model_copy(update={"coupling_g": g})

    def with_detuning(self, detuning: float) -> "SensorParams":
        cavity = self.cavity.model_copy(update={"detuning_c": detuning})
        return self.model_copy(update={"cavity": cavity})

    def without_atoms(self) -> "SensorParams":
        return self.model_copy(update={"atomic": self.atomic.model_copy(update={"coupling_G": 0.0})})

    def resolved(self, mismatch: Optional[MismatchSpec] = None) -> "SensorParams":
        """
        Return a copy with every derived quantity explicit.

        Args:
            mismatch: Relative deviations applied to the atomic fields that are unset

        Returns:
            Parameters with g, G, Gamma, omega_s and the effective detuning filled in
        """
        mismatch = mismatch or MismatchSpec()
        atomic = self.atomic
        mech = self.mechanical

        if atomic.coupling_G is not None and mismatch.coupling_mismatch != 0.0:
            raise ParameterError("coupling_mismatch", "requires coupling_G to be unset (locked to g)")
        if atomic.dephasing_Gamma is not None and mismatch.decay_mismatch != 0.0:
            raise ParameterError("decay_mismatch", "requires dephasing_Gamma to be unset")

        gamma_d = (
            atomic.dephasing_Gamma
            if atomic.dephasing_Gamma is not None
            else mech.gamma_m * (1.0 + mismatch.decay_mismatch)
        )
        omega_s = atomic.transition_rate if atomic.transition_rate is not None else mech.omega_m
        lock = None if atomic.coupling_G is not None else 1.0 + mismatch.coupling_mismatch

        partial = self.model_copy(
            update={
                "atomic": atomic.model_copy(
                    update={"dephasing_Gamma": gamma_d, "transition_rate": omega_s}
                )
            }
        )

        detuning = self.cavity.detuning_c
        if self.coupling_g is not None:
            g = self.coupling_g
            if self.cavity.detuning_is_bare:
                detuning = self.cavity.detuning_c - g**2 / (4.0 * mech.omega_m)
        else:
            state = solve_steady_state(partial, coupling_lock=lock)
            g = state.coupling_g
            detuning = state.detuning

        big_g = atomic.coupling_G if atomic.coupling_G is not None else lock * g  # type: ignore
        return SensorParams(
            mechanical=mech,
            cavity=self.cavity.model_copy(update={"detuning_c": detuning, "detuning_is_bare": False}),
            atomic=atomic.model_copy(
                update={"coupling_G": big_g, "dephasing_Gamma": gamma_d, "transition_rate": omega_s}
            ),
            coupling_g=g,
        )


@dataclass(frozen=True)
class SteadyState:
    """Solution of the steady-state amplitude equation."""

    alpha: float
    coupling_g: float
    detuning: float
    residual: float
    iterations: int
    method: str


@dataclass(frozen=True)
class ThermalOccupation:
    """Bose occupation of the mechanical bath and its high-temperature form."""

    n_bar: float
    high_temperature: float
    approximation_ok: bool


@dataclass(frozen=True)
class ValidityCheck:
    name: str
    passed: bool
    ratio: float
    threshold: float
    description: str
    advisory: bool = False
    flag: Optional[bool] = None


@dataclass(frozen=True)
class ValidityReport:
    """Named regime checks. Advisory checks are reported but never fail the report."""

    checks: Tuple[ValidityCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks if not check.advisory)

    def get(self, name: str) -> ValidityCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def failures(self) -> List[ValidityCheck]:
        return [c for c in self.checks if not c.passed and not c.advisory]

    def to_dict(self) -> List[Dict[str, Any]]:
        return [asdict(check) for check in self.checks]


def drive_amplitude(cavity: CavityParams) -> float:
    """E_L = sqrt(P_L kappa_in / (hbar omega_L)) in rad/s."""
    if cavity.laser_wavelength <= 0:
        raise ParameterError("laser_wavelength", "must be positive")
    if cavity.laser_power < 0:
        raise ParameterError("laser_power", "must be non-negative")
    photon_energy = HBAR * cavity.laser_frequency
    return math.sqrt(cavity.laser_power * cavity.input_rate / photon_energy)


def _atomic_shift_factor(params: SensorParams) -> float:
    omega_s = params.omega_s
    return omega_s / (params.Gamma**2 / 4.0 + omega_s**2)


def _cavity_shift(params: SensorParams, alpha: float, coupling_lock: Optional[float]) -> float:
    """Detuning plus the atomic frequency pull at amplitude alpha."""
    cavity = params.cavity
    detuning = cavity.detuning_c
    if cavity.detuning_is_bare:
        detuning -= cavity.g0**2 * alpha**2 / params.mechanical.omega_m
    if coupling_lock is None:
        big_g = params.atomic.coupling_G or 0.0
    else:
        big_g = coupling_lock * 2.0 * cavity.g0 * alpha
    return detuning + big_g**2 * _atomic_shift_factor(params)


def solve_steady_state(
    params: SensorParams,
    e_l: Optional[float] = None,
    coupling_lock: Optional[float] = None,
) -> SteadyState:
    """
    Solve (kappa/2 + i Delta) alpha = E_L - i G^2 omega_s Re(alpha)/(Gamma^2/4 + omega_s^2).

    The drive phase is absorbed so that alpha is real and positive; the equation then fixes
    alpha |kappa/2 + i(Delta + G^2 omega_s/(Gamma^2/4 + omega_s^2))| = |E_L|, which is
    nonlinear when G is locked to g = 2 g0 alpha or the detuning carries the radiation-pressure
    shift.

    Args:
        params: Sensor parameters
        e_l: Drive rate, defaults to drive_amplitude(params.cavity)
        coupling_lock: If set, G = coupling_lock * 2 g0 alpha. Defaults to 1 when coupling_G
            is unset.

    Returns:
        SteadyState with alpha, the coupling g = 2 g0 alpha and the effective detuning
    """
    cavity = params.cavity
    if e_l is None:
        e_l = drive_amplitude(cavity)
    drive = abs(e_l)
    if coupling_lock is None and params.atomic.coupling_G is None:
        coupling_lock = 1.0

    def effective_detuning(alpha: float) -> float:
        if not cavity.detuning_is_bare:
            return cavity.detuning_c
        return cavity.detuning_c - cavity.g0**2 * alpha**2 / params.mechanical.omega_m

    if drive == 0.0:
        return SteadyState(0.0, 0.0, effective_detuning(0.0), 0.0, 0, "trivial")

    half_kappa = 0.5 * cavity.kappa

    def response(alpha: float) -> float:
        return abs(complex(half_kappa, _cavity_shift(params, alpha, coupling_lock)))

    def residual(alpha: float) -> float:
        return alpha * response(alpha) - drive

    alpha = drive / response(0.0)
    previous_step = math.inf
    growing = 0
    converged = False
    iterations = 0
    for iterations in range(1, FIXED_POINT_MAX_ITER + 1):
        target = drive / response(alpha)
        new_alpha = (1.0 - FIXED_POINT_DAMPING) * alpha + FIXED_POINT_DAMPING * target
        step = abs(new_alpha - alpha)
        alpha = new_alpha
        if step <= FIXED_POINT_RTOL * alpha:
            converged = True
            break
        growing = growing + 1 if step > previous_step else 0
        if growing >= 10:
            break
        previous_step = step

    method = "fixed_point"
    if not converged:
        logger.warning(
            f"Fixed-point iteration stalled after {iterations} iterations, falling back to bisection"
        )
        upper = drive / half_kappa
        alpha = optimize.bisect(
            residual, 0.0, upper, xtol=upper * 1e-17, rtol=4.0 * np.finfo(float).eps, maxiter=400
        )
        method = "bisection"

    error = abs(residual(alpha))
    if error > STEADY_STATE_RTOL * drive:
        raise ConvergenceError("steady_state_amplitude", error / drive, iterations)

    logger.debug(f"Steady state alpha={alpha:.6e} via {method} in {iterations} iterations")
    return SteadyState(
        alpha=alpha,
        coupling_g=2.0 * cavity.g0 * alpha,
        detuning=effective_detuning(alpha),
        residual=error / drive,
        iterations=iterations,
        method=method,
    )


def steady_state_amplitude(
    params: SensorParams, e_l: float, coupling_lock: Optional[float] = None
) -> float:
    """Real intracavity amplitude alpha_s for drive rate e_l."""
    return solve_steady_state(params, e_l, coupling_lock).alpha


def coupling_from_power(params: SensorParams, coupling_lock: Optional[float] = None) -> float:
    """g = 2 g0 alpha_s at the configured drive power."""
    return solve_steady_state(params, coupling_lock=coupling_lock).coupling_g


def power_for_coupling(params: SensorParams, g: float, coupling_lock: Optional[float] = None) -> float:
    """
    Drive power (W) that produces coupling g; inverse of coupling_from_power.

    Args:
        params: Sensor parameters (laser_power is ignored)
        g: Target linearized coupling (rad/s)
        coupling_lock: As in solve_steady_state

    Returns:
        Laser power in W
    """
    cavity = params.cavity
    if cavity.g0 <= 0:
        raise ParameterError("g0", "must be positive to map coupling to power")
    if g < 0:
        raise ParameterError("g", "must be non-negative")
    if coupling_lock is None and params.atomic.coupling_G is None:
        coupling_lock = 1.0
    alpha = g / (2.0 * cavity.g0)
    drive = alpha * abs(complex(0.5 * cavity.kappa, _cavity_shift(params, alpha, coupling_lock)))
    return drive**2 * HBAR * cavity.laser_frequency / cavity.input_rate


def thermal_number(mech: MechanicalParams) -> ThermalOccupation:
    """Bose factor n_bar = 1/(exp(hbar omega_m / k_B T) - 1) and k_B T/(hbar omega_m)."""
    if mech.temperature == 0.0:
        return ThermalOccupation(n_bar=0.0, high_temperature=0.0, approximation_ok=False)

    x = HBAR * mech.omega_m / (K_B * mech.temperature)
    n_bar = 0.0 if x > 700.0 else 1.0 / math.expm1(x)
    high_temperature = 1.0 / x
    target = n_bar + 0.5
    approximation_ok = abs(high_temperature - target) <= 0.01 * target
    return ThermalOccupation(n_bar, high_temperature, approximation_ok)


def si_scale_factor(mech: MechanicalParams) -> float:
    """hbar m omega_m gamma_m; multiplies a dimensionless spectrum into N^2/Hz."""
    return HBAR * mech.mass * mech.omega_m * mech.gamma_m


def validate(params: SensorParams, squeezing: SqueezingParams) -> ValidityReport:
    """
    Check the regime assumptions behind the closed-form spectra.

    Args:
        params: Sensor parameters
        squeezing: Injected squeezing

    Returns:
        ValidityReport with one entry per check
    """
    mech = params.mechanical
    cavity = params.cavity
    checks: List[ValidityCheck] = []

    bandwidths = [b for b in (squeezing.bandwidth_x, squeezing.bandwidth_y) if b is not None]
    white_ratio = min(bandwidths) / max(mech.omega_m, cavity.kappa) if bandwidths else math.inf
    checks.append(
        ValidityCheck(
            name="white_noise_limit",
            passed=white_ratio >= WHITE_NOISE_MIN_RATIO,
            ratio=white_ratio,
            threshold=WHITE_NOISE_MIN_RATIO,
            description="min(b_x, b_y)/max(omega_m, kappa) >= threshold",
        )
    )

    g = params.g
    rwa_ratio = cavity.laser_frequency / max(cavity.kappa, mech.omega_m, g)
    checks.append(
        ValidityCheck(
            name="rotating_wave",
            passed=rwa_ratio >= ROTATING_WAVE_MIN_RATIO,
            ratio=rwa_ratio,
            threshold=ROTATING_WAVE_MIN_RATIO,
            description="omega_L/max(kappa, omega_m, g) >= threshold",
        )
    )

    dephasing_ratio = params.Gamma / mech.omega_m
    checks.append(
        ValidityCheck(
            name="atomic_dephasing",
            passed=dephasing_ratio <= DEPHASING_MAX_RATIO,
            ratio=dephasing_ratio,
            threshold=DEPHASING_MAX_RATIO,
            description="Gamma/omega_m <= threshold, so Gamma^2/4 is negligible",
        )
    )

    q_factor = mech.quality_factor
    checks.append(
        ValidityCheck(
            name="mechanical_quality",
            passed=q_factor >= QUALITY_FACTOR_MIN,
            ratio=q_factor,
            threshold=QUALITY_FACTOR_MIN,
            description="Q_m = omega_m/gamma_m >= threshold",
        )
    )

    bound = squeezing.n_sq * (squeezing.n_sq + 1.0)
    purity_ratio = squeezing.m_mag**2 / bound if bound > 0 else 0.0
    checks.append(
        ValidityCheck(
            name="squeezing_purity",
            passed=squeezing.m_mag**2 <= bound * (1.0 + PURITY_RTOL),
            ratio=purity_ratio,
            threshold=1.0,
            description="|M|^2/(N(N+1)) <= 1; flag marks a saturated (pure) state",
            flag=squeezing.is_pure,
        )
    )

    markov_ratio = cavity.kappa / mech.omega_m
    checks.append(
        ValidityCheck(
            name="markov_cavity",
            passed=markov_ratio >= MARKOV_MIN_RATIO,
            ratio=markov_ratio,
            threshold=MARKOV_MIN_RATIO,
            description="kappa/omega_m >= threshold for the kappa >> omega closed forms",
            advisory=True,
        )
    )

    match_ratio = abs(params.omega_s - mech.omega_m) / mech.omega_m
    checks.append(
        ValidityCheck(
            name="frequency_matching",
            passed=match_ratio <= FREQUENCY_MATCH_MAX,
            ratio=match_ratio,
            threshold=FREQUENCY_MATCH_MAX,
            description="|omega_s - omega_m|/omega_m <= threshold",
            advisory=True,
        )
    )

    report = ValidityReport(tuple(checks))
    for failure in report.failures():
        logger.warning(f"Validity check '{failure.name}' failed: ratio {failure.ratio:.3e}")
    return report
