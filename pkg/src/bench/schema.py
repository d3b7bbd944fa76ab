"""
Versioned schema of sweep configuration files.

Rates are ordinary frequencies in Hz, as quoted in experiments; they become angular rates when the
physics parameter objects are built. Wavelength is in m, power in W, mass in kg and temperature in K.
"""

import math
from enum import Enum
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.exceptions import ConfigurationError
from src.core.utils import hz_to_angular
from src.physics.model import (
    DEFAULT_MEMBRANE_MASS,
    DEFAULT_WAVELENGTH,
    PURITY_RTOL,
    AtomicParams,
    CavityParams,
    MechanicalParams,
    MismatchSpec,
    SensorParams,
    SqueezingParams,
)
from src.physics.optimal import phi_opt
from src.physics.response import RatioForm
from src.physics.spectra import ThermalMode

SCHEMA_VERSION = 1

_STRICT = ConfigDict(extra="forbid", frozen=True)


def _angular(value: Optional[float]) -> Optional[float]:
    return None if value is None else hz_to_angular(value)


class AxisKind(str, Enum):
    FREQUENCY = "frequency"  # omega/omega_m
    POWER_RATIO = "power_ratio"  # (g/g0)^2
    COUPLING_MISMATCH = "coupling_mismatch"
    DECAY_MISMATCH = "decay_mismatch"
    SQUEEZING_N = "squeezing_n"


class Spacing(str, Enum):
    LINEAR = "linear"
    LOG = "log"


class Overlay(str, Enum):
    SQL = "sql"
    SQL_SQUEEZED = "sql_squeezed"
    ULTIMATE = "ultimate"
    CQNC_FLOOR = "cqnc_floor"


class MechanicalConfig(BaseModel):
    model_config = _STRICT

    omega_m: float = Field(..., gt=0, description="Resonance frequency (Hz)")
    gamma_m: float = Field(..., gt=0, description="Damping rate (Hz)")
    mass: float = Field(DEFAULT_MEMBRANE_MASS, gt=0)
    temperature: float = Field(0.0, ge=0)


class CavityConfig(BaseModel):
    model_config = _STRICT

    kappa: float = Field(..., gt=0, description="Decay rate (Hz)")
    kappa_in: Optional[float] = Field(None, gt=0)
    detuning: float = Field(0.0, description="Detuning (Hz)")
    detuning_is_bare: bool = False
    g0: float = Field(0.0, ge=0, description="Single-photon coupling (Hz)")
    laser_wavelength: float = Field(DEFAULT_WAVELENGTH, gt=0)
    laser_power: float = Field(0.0, ge=0)


class AtomicConfig(BaseModel):
    """Unset fields are locked to the optomechanical side."""

    model_config = _STRICT

    coupling_G: Optional[float] = Field(None, ge=0)
    dephasing_Gamma: Optional[float] = Field(None, gt=0)
    transition_rate: Optional[float] = Field(None, gt=0)


class SensorConfig(BaseModel):
    model_config = _STRICT

    mechanical: MechanicalConfig
    cavity: CavityConfig
    atomic: AtomicConfig = AtomicConfig()
    coupling_g: Optional[float] = Field(None, ge=0, description="Explicit g (Hz); else from power")

    def to_params(self) -> SensorParams:
        """Build angular-rate parameters."""
        mech, cavity, atomic = self.mechanical, self.cavity, self.atomic
        return SensorParams(
            mechanical=MechanicalParams(
                omega_m=hz_to_angular(mech.omega_m),
                gamma_m=hz_to_angular(mech.gamma_m),
                mass=mech.mass,
                temperature=mech.temperature,
            ),
            cavity=CavityParams(
                kappa=hz_to_angular(cavity.kappa),
                kappa_in=_angular(cavity.kappa_in),
                detuning_c=hz_to_angular(cavity.detuning),
                detuning_is_bare=cavity.detuning_is_bare,
                g0=hz_to_angular(cavity.g0),
                laser_wavelength=cavity.laser_wavelength,
                laser_power=cavity.laser_power,
            ),
            atomic=AtomicParams(
                coupling_G=_angular(atomic.coupling_G),
                dephasing_Gamma=_angular(atomic.dephasing_Gamma),
                transition_rate=_angular(atomic.transition_rate),
            ),
            coupling_g=_angular(self.coupling_g),
        )


class SqueezingConfig(BaseModel):
    """
    Injected squeezed vacuum.

    m_mag defaults to the pure-state value sqrt(N(N+1)). phase may be a number (rad) or
    "optimal", which picks phi_opt for the detuning of each curve.
    """

    model_config = _STRICT

    n_sq: float = Field(0.0, ge=0)
    m_mag: Optional[float] = Field(None, ge=0)
    phase: Union[float, Literal["optimal"]] = 0.0
    bandwidth_x: Optional[float] = Field(None, gt=0, description="OPO bandwidth b_x (Hz)")
    bandwidth_y: Optional[float] = Field(None, gt=0, description="OPO bandwidth b_y (Hz)")

    @model_validator(mode="after")
    def check_purity(self) -> "SqueezingConfig":
        bound = self.n_sq * (self.n_sq + 1.0)
        if self.m_mag is not None and self.m_mag**2 > bound * (1.0 + PURITY_RTOL):
            raise ValueError("squeezing moments violate |M|^2 <= N(N+1)")
        return self

    def to_params(self, detuning_ratio: float = 0.0, n_sq: Optional[float] = None) -> SqueezingParams:
        n = self.n_sq if n_sq is None else n_sq
        phi = phi_opt(detuning_ratio) if self.phase == "optimal" else float(self.phase)
        bound = math.sqrt(n * (n + 1.0))
        if self.m_mag is not None and self.m_mag > bound * (1.0 + PURITY_RTOL):
            raise ConfigurationError(
                f"m_mag = {self.m_mag:g} exceeds sqrt(N(N+1)) = {bound:g} at N = {n:g}",
                field="squeezing.m_mag",
            )
        return SqueezingParams(
            n_sq=n,
            m_mag=min(bound if self.m_mag is None else self.m_mag, bound),
            phi=phi,
            bandwidth_x=_angular(self.bandwidth_x),
            bandwidth_y=_angular(self.bandwidth_y),
        )


class MismatchConfig(BaseModel):
    model_config = _STRICT

    coupling_mismatch: float = Field(0.0, ge=-1.0)
    decay_mismatch: float = Field(0.0, gt=-1.0)

    def to_spec(self) -> MismatchSpec:
        return MismatchSpec(
            coupling_mismatch=self.coupling_mismatch, decay_mismatch=self.decay_mismatch
        )


class ProbeConfig(BaseModel):
    """Fixed frequency omega = omega_ratio * omega_m + gamma_offset * gamma_m for non-frequency axes."""

    model_config = _STRICT

    omega_ratio: float = Field(1.0, gt=0)
    gamma_offset: float = 0.0


class AxisSpec(BaseModel):
    """
    Sweep axis.

    Frequency values are omega/omega_m. A power-ratio axis may be centred on the optimal
    coupling of the single-cavity readout instead of giving min and max.
    """

    model_config = _STRICT

    kind: AxisKind
    min: Optional[float] = None
    max: Optional[float] = None
    count: int = Field(..., ge=2)
    spacing: Spacing = Spacing.LINEAR
    centered_on_optimum: bool = False
    decades: float = Field(6.0, gt=0)

    @model_validator(mode="after")
    def check_range(self) -> "AxisSpec":
        if self.centered_on_optimum:
            if self.kind != AxisKind.POWER_RATIO:
                raise ValueError("centered_on_optimum is only valid for a power_ratio axis")
            if self.spacing != Spacing.LOG:
                raise ValueError("a centred power axis must use log spacing")
            return self
        if self.min is None or self.max is None:
            raise ValueError("min and max are required unless centered_on_optimum is set")
        if not self.min < self.max:
            raise ValueError(f"need min < max, got [{self.min}, {self.max}]")
        if self.spacing == Spacing.LOG and self.min <= 0:
            raise ValueError("log spacing requires min > 0")
        return self


class CurveSpec(BaseModel):
    """One labelled curve; unset fields fall back to the sweep-level values."""

    model_config = _STRICT

    label: str = Field(..., pattern=r"^[A-Za-z0-9_+\-]+$")
    engine: Optional[str] = None
    n_sq: Optional[float] = Field(None, ge=0)
    detuning_ratio: Optional[float] = None
    coupling_mismatch: Optional[float] = Field(None, ge=-1.0)
    decay_mismatch: Optional[float] = Field(None, gt=-1.0)
    atoms: bool = True


class SweepSpec(BaseModel):
    """A complete, versioned sweep document."""

    model_config = _STRICT

    schema_version: Literal[1] = SCHEMA_VERSION
    name: str = Field(..., pattern=r"^[A-Za-z0-9_.\-]+$")
    description: str = ""
    sensor: SensorConfig
    squeezing: SqueezingConfig = SqueezingConfig()
    mismatch: MismatchConfig = MismatchConfig()
    axis: AxisSpec
    probe: ProbeConfig = ProbeConfig()
    engine: str = "exact"
    thermal_mode: ThermalMode = ThermalMode.EXACT
    ratio_form: RatioForm = RatioForm.HIGH_Q
    overlays: List[Overlay] = Field(default_factory=list)
    curves: List[CurveSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_curves(self) -> "SweepSpec":
        labels = [curve.label for curve in self.curves]
        if len(set(labels)) != len(labels):
            raise ValueError(f"curve labels must be unique, got {labels}")
        if len(set(self.overlays)) != len(self.overlays):
            raise ValueError("overlays must not repeat")
        return self

    @property
    def is_multi_curve(self) -> bool:
        return bool(self.curves)

    def effective_curves(self) -> List[CurveSpec]:
        """The configured curves, or a single unlabelled curve built from the sweep-level values."""
        return list(self.curves) or [CurveSpec(label="main")]
