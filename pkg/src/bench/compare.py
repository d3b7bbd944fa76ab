"""
Column-by-column comparison of two result tables.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.core.exceptions import ComparisonError
from src.core.utils import relative_deviation

from .table import ResultTable

logger = logging.getLogger(__name__)

AXIS_RTOL = 1e-12


@dataclass
class ColumnDeviation:
    name: str
    max_relative: float
    mean_relative: float
    nan_mismatch: int = 0  # points where exactly one side is NaN

    def passed(self, tolerance: float) -> bool:
        return self.nan_mismatch == 0 and self.max_relative <= tolerance


@dataclass
class CompareReport:
    """Per-column deviations of result B from result A."""

    tolerance: float
    columns: List[ColumnDeviation] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)

    @property
    def failures(self) -> List[ColumnDeviation]:
        return [c for c in self.columns if not c.passed(self.tolerance)]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def max_relative(self) -> float:
        return max((c.max_relative for c in self.columns), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tolerance": self.tolerance,
            "passed": self.passed,
            "max_relative": self.max_relative,
            "columns": [
                {
                    "name": c.name,
                    "max_relative": c.max_relative,
                    "mean_relative": c.mean_relative,
                    "nan_mismatch": c.nan_mismatch,
                    "passed": c.passed(self.tolerance),
                }
                for c in self.columns
            ],
            "skipped": self.skipped,
        }

    def summary(self) -> str:
        lines = [f"{'column':<40} {'max rel':>12} {'mean rel':>12}  status"]
        for c in self.columns:
            status = "ok" if c.passed(self.tolerance) else "FAIL"
            lines.append(f"{c.name:<40} {c.max_relative:>12.3e} {c.mean_relative:>12.3e}  {status}")
        if self.skipped:
            lines.append(f"skipped (only in one result): {', '.join(self.skipped)}")
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"{verdict}: max relative deviation {self.max_relative:.3e} (tolerance {self.tolerance:g})")
        return "\n".join(lines)


def _deviation(name: str, a: np.ndarray, b: np.ndarray) -> ColumnDeviation:
    nan_a, nan_b = np.isnan(a), np.isnan(b)
    both = ~(nan_a | nan_b)
    deviation = relative_deviation(a[both], b[both])
    return ColumnDeviation(
        name=name,
        max_relative=float(deviation.max()) if deviation.size else 0.0,
        mean_relative=float(deviation.mean()) if deviation.size else 0.0,
        nan_mismatch=int(np.count_nonzero(nan_a != nan_b)),
    )


def compare(
    a: ResultTable,
    b: ResultTable,
    tolerance: float,
    columns: Optional[Sequence[str]] = None,
) -> CompareReport:
    """
    Compare two results with matching axes.

    Args:
        a: Reference result
        b: Result under test
        tolerance: Maximum relative deviation allowed per column
        columns: Restrict the comparison to these data columns (default: all shared ones)

    Returns:
        CompareReport with the max and mean relative deviation of every compared column

    Raises:
        ComparisonError: If the axes differ or no data column is shared
    """
    if tolerance < 0:
        raise ComparisonError(f"tolerance must be non-negative, got {tolerance}")
    if a.axis_name != b.axis_name:
        raise ComparisonError(f"axis mismatch: '{a.axis_name}' vs '{b.axis_name}'")
    if len(a) != len(b):
        raise ComparisonError(f"axis mismatch: {len(a)} vs {len(b)} points")
    if not np.allclose(a.axis, b.axis, rtol=AXIS_RTOL, atol=0.0):
        worst = float(np.nanmax(relative_deviation(a.axis, b.axis)))
        raise ComparisonError(f"axis mismatch: values differ (max relative {worst:.3e})")

    shared = [name for name in a.data_columns if name in b.columns]
    if columns is not None:
        missing = [name for name in columns if name not in shared]
        if missing:
            raise ComparisonError(f"columns not present in both results: {', '.join(missing)}")
        shared = list(columns)
    if not shared:
        raise ComparisonError("the results share no data column")

    skipped = sorted(set(a.data_columns).symmetric_difference(b.data_columns))
    report = CompareReport(
        tolerance=tolerance,
        columns=[_deviation(name, a.columns[name], b.columns[name]) for name in shared],
        skipped=skipped,
    )
    logger.info(
        f"Compared {len(report.columns)} column(s): max relative deviation "
        f"{report.max_relative:.3e}, {'pass' if report.passed else 'fail'}"
    )
    return report
