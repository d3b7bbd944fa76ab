from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.core.exceptions import EngineMismatchError
from src.core.utils import FloatArray
from src.physics.model import MismatchSpec, SensorParams, SqueezingParams
from src.physics.response import RatioForm
from src.physics.spectra import SpectrumBreakdown, ThermalMode


class PointStatus(Enum):
    OK = "ok"
    FLAGGED = "flagged"


@dataclass(frozen=True)
class EngineCapability:
    """Describes what an engine evaluates and which sweeps it accepts."""

    name: str
    description: str
    supports_detuning: bool
    supports_mismatch: bool
    needs_atoms: bool


@dataclass(frozen=True)
class EvaluationOptions:
    thermal_mode: ThermalMode = ThermalMode.EXACT
    ratio_form: RatioForm = RatioForm.HIGH_Q


@dataclass
class EngineResult:
    """Standard result format for all engines."""

    breakdown: SpectrumBreakdown
    status: PointStatus = PointStatus.OK
    message: Optional[str] = None

    @classmethod
    def failed(cls, size: int, message: str) -> "EngineResult":
        nan = np.full(size, np.nan)
        breakdown = SpectrumBreakdown(nan, nan.copy(), nan.copy(), nan.copy(), nan.copy(), nan.copy())
        return cls(breakdown=breakdown, status=PointStatus.FLAGGED, message=message)


class BaseEngine(ABC):
    """
    Abstract base class for spectrum engines.
    Each engine must implement this interface to be discoverable by the registry.
    """

    @property
    @abstractmethod
    def capabilities(self) -> EngineCapability:
        """Describes this engine; the name is the key used in configuration files."""
        pass

    @abstractmethod
    def evaluate(
        self,
        omega: FloatArray,
        params: SensorParams,
        squeezing: SqueezingParams,
        options: EvaluationOptions,
    ) -> EngineResult:
        """
        Evaluate the spectrum breakdown at the given angular frequencies.

        params is already resolved.
        """
        pass

    def check_compatible(self, params: SensorParams, mismatch: MismatchSpec) -> None:
        """
        Reject sweeps this engine cannot evaluate.

        Args:
            params: Resolved sensor parameters of the curve
            mismatch: Mismatch the curve was resolved with

        Raises:
            EngineMismatchError: If the engine's assumptions are violated
        """
        capabilities = self.capabilities
        if not capabilities.supports_detuning and params.cavity.detuning_c != 0.0:
            raise EngineMismatchError(
                capabilities.name, f"requires zero detuning, got {params.cavity.detuning_c}"
            )
        if not capabilities.supports_mismatch and not mismatch.is_zero:
            raise EngineMismatchError(
                capabilities.name, "assumes perfect matching; the sweep sets a nonzero mismatch"
            )
        if capabilities.needs_atoms and params.G == 0.0:
            raise EngineMismatchError(capabilities.name, "requires the atomic ensemble")

    def __str__(self) -> str:
        return f"{self.__class__.__name__}(name={self.capabilities.name})"

    def __repr__(self) -> str:
        return self.__str__()
