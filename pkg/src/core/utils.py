"""
Utility functions shared by the physics and bench packages.
"""

import math
from pathlib import Path
from typing import Union

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
ArrayLike = Union[float, FloatArray]

TWO_PI = 2.0 * math.pi


def hz_to_angular(value: float) -> float:
    """Convert an ordinary frequency (Hz) to an angular rate (rad/s)."""
    return TWO_PI * value


def angular_to_hz(value: float) -> float:
    """Convert an angular rate (rad/s) to an ordinary frequency (Hz)."""
    return value / TWO_PI


def as_frequency_array(omega: ArrayLike) -> FloatArray:
    """Return omega as a one-dimensional float array."""
    return np.atleast_1d(np.asarray(omega, dtype=np.float64))


def relative_deviation(a: npt.ArrayLike, b: npt.ArrayLike) -> FloatArray:
    """
    Pointwise |a - b| / max(|a|, |b|).

    Points where both values are zero have zero deviation. NaN propagates.
    """
    a_arr = np.asarray(a, dtype=np.float64)
    b_arr = np.asarray(b, dtype=np.float64)
    scale = np.maximum(np.abs(a_arr), np.abs(b_arr))
    diff = np.abs(a_arr - b_arr)
    with np.errstate(divide="ignore", invalid="ignore"):
        deviation = np.where(scale > 0.0, diff / np.where(scale > 0.0, scale, 1.0), 0.0)
    return np.where(np.isnan(a_arr) | np.isnan(b_arr), np.nan, deviation)


def ensure_directory(path: Union[str, Path]) -> Path:
    """
    Ensure directory exists, creating it if necessary.

    Args:
        path: Directory path

    Returns:
        Path object
    """
    path_obj = Path(path)
    path_obj.mkdir(parents=True, exist_ok=True)
    return path_obj
