"""Model parameters for u_t = D u_xx - u + kappa * e^u / int e^u."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError

__all__ = ["ModelParams"]


@dataclass(frozen=True)
class ModelParams:
    """Diffusivity D and production strength kappa, both strictly positive."""

    D: float
    kappa: float

    def __post_init__(self):
        for name, val in (("D", self.D), ("kappa", self.kappa)):
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise ConfigurationError(f"{name} must be a finite positive real, got {val!r}")
        object.__setattr__(self, "D", float(self.D))
        object.__setattr__(self, "kappa", float(self.kappa))
