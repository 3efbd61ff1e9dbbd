"""Shared numerical tolerance configuration."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

TOL_ENV_VAR = "DIPOLEFRONT_TOL"


@dataclass(frozen=True)
class Tolerance:
    """Relative tolerance with an absolute floor."""

    rel: float = 1e-12
    abs: float = 1e-300

    def __post_init__(self):
        if not (self.rel > 0 and math.isfinite(self.rel)):
            raise ValueError(f"rel must be positive and finite, got {self.rel!r}")
        if not (self.abs >= 0 and math.isfinite(self.abs)):
            raise ValueError(f"abs must be non-negative and finite, got {self.abs!r}")

    def target(self, value: float) -> float:
        return max(self.rel * abs(value), self.abs)


def default_tolerance() -> Tolerance:
    """Package-wide default, overridable via the DIPOLEFRONT_TOL environment variable."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw:
        return Tolerance(rel=float(raw))
    return Tolerance()
