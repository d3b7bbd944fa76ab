from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from src.core.utils import FloatArray


@dataclass
class ResultTable:
    """Ordered numeric columns, the first of which is the sweep axis, plus run metadata."""

    columns: Dict[str, FloatArray]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.columns:
            raise ValueError("a result table needs at least the axis column")
        lengths = {name: len(values) for name, values in self.columns.items()}
        if len(set(lengths.values())) != 1:
            raise ValueError(f"column lengths differ: {lengths}")
        self.columns = {
            name: np.asarray(values, dtype=np.float64) for name, values in self.columns.items()
        }

    @property
    def axis_name(self) -> str:
        return next(iter(self.columns))

    @property
    def axis(self) -> FloatArray:
        return self.columns[self.axis_name]

    @property
    def data_columns(self) -> List[str]:
        return list(self.columns)[1:]

    def __len__(self) -> int:
        return len(self.axis)
