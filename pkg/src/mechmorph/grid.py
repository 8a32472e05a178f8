"""Periodic spatial discretization of the unit interval.

Uniform collocation grid on [0, 1) with the endpoints identified, real
half-complex Fourier transforms, spectral differentiation and quadrature.
The transform convention is ``norm="forward"``: coefficient ``k`` multiplies
the basis function ``exp(2*pi*1j*k*x)``, so the k = 0 coefficient is the
mean of the field.  The trapezoid rule degenerates to the plain grid mean
here and is spectrally accurate for smooth periodic integrands.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "Grid",
    "Field",
    "Spectrum",
    "make_grid",
    "to_spectral",
    "from_spectral",
    "second_derivative",
    "first_derivative",
    "integrate",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid x_j = j / n_points, j = 0 .. n_points - 1."""

    n_points: int
    spacing: float
    nodes: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers 0 .. n_points // 2 of the half spectrum."""
        return np.arange(self.n_points // 2 + 1)

    @property
    def laplacian_eigenvalues(self) -> np.ndarray:
        """mu_k = (2 pi k)^2 for the half-spectrum wavenumbers."""
        return (2.0 * np.pi * self.wavenumbers) ** 2


def make_grid(n_points: int = 256) -> Grid:
    """Create a periodic grid; n_points must be a power of two, >= 8."""
    if not isinstance(n_points, (int, np.integer)):
        raise ConfigurationError(f"n_points must be an integer, got {n_points!r}")
    n = int(n_points)
    if n < 8 or (n & (n - 1)) != 0:
        raise ConfigurationError(
            f"n_points must be a power of two >= 8, got {n}"
        )
    return Grid(n_points=n, spacing=1.0 / n, nodes=np.arange(n) / n)


@dataclass(frozen=True)
class Field:
    """Real-valued function sampled on a Grid; immutable after construction."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"field has {vals.shape} values for a grid of {self.grid.n_points} points"
            )
        if not np.all(np.isfinite(vals)):
            raise ConfigurationError("field values must all be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class Spectrum:
    """Half-complex spectrum of a real Field (wavenumbers 0 .. n/2)."""

    grid: Grid
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=complex)
        if coef.shape != (self.grid.n_points // 2 + 1,):
            raise ConfigurationError(
                f"spectrum has {coef.shape} coefficients for n_points={self.grid.n_points}"
            )
        coef = coef.copy()
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)

    @property
    def parseval_weights(self) -> np.ndarray:
        """Weights w_k with mean(f^2) = sum_k w_k |c_k|^2 for real fields."""
        n = self.grid.n_points
        w = np.full(n // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0  # Nyquist coefficient appears once for even n
        return w


def to_spectral(f: Field) -> Spectrum:
    """Forward real FFT; coefficient k multiplies exp(2*pi*1j*k*x)."""
    return Spectrum(f.grid, np.fft.rfft(f.values, norm="forward"))


def from_spectral(s: Spectrum) -> Field:
    """Inverse of :func:`to_spectral`."""
    return Field(s.grid, np.fft.irfft(s.coefficients, s.grid.n_points, norm="forward"))


def second_derivative(s: Spectrum) -> Spectrum:
    """Spectral second derivative: coefficient k is scaled by -(2 pi k)^2."""
    return Spectrum(s.grid, -s.grid.laplacian_eigenvalues * s.coefficients)


def first_derivative(s: Spectrum) -> Spectrum:
    """Spectral first derivative: coefficient k is scaled by 2*pi*1j*k.

    The Nyquist coefficient is zeroed (its derivative is not representable
    on the grid), which is the usual convention for real data.
    """
    n = s.grid.n_points
    mult = 2.0j * np.pi * s.grid.wavenumbers
    coef = mult * s.coefficients
    coef[-1] = 0.0 if n % 2 == 0 else coef[-1]
    return Spectrum(s.grid, coef)


def integrate(f: Field) -> float:
    """Integral over [0, 1); the grid mean (trapezoid rule, domain length 1)."""
    return float(np.mean(f.values))
