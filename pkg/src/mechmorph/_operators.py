"""Shared field-level operators: reaction density, PDE right-hand side,
trigonometric Galerkin bases and dense operator assembly.

Everything here works on raw value arrays so that the public modules can
expose their own domain types without import cycles.  All quadratures are
grid means (exact for trigonometric polynomials below the Nyquist mode).
"""

from __future__ import annotations

import numpy as np

from .errors import AmplitudeOverflowError
from .grid import Grid
from .model import ModelParams

EXP_GUARD = 700.0  # stay inside double-precision exp() range


def check_exp_range(values: np.ndarray) -> None:
    m = float(np.max(np.abs(values)))
    if m > EXP_GUARD:
        raise AmplitudeOverflowError(
            f"max |u| = {m:.3g} exceeds the exp() range guard ({EXP_GUARD:g})"
        )


def density(values: np.ndarray) -> np.ndarray:
    """Normalized production profile p = e^u / int e^u (integrates to 1).

    Computed with the max shifted out of the exponent, so it is well
    conditioned for fields near the overflow guard.
    """
    check_exp_range(values)
    shifted = np.exp(values - values.max())
    return shifted / shifted.mean()


def log_mean_exp(values: np.ndarray) -> float:
    """log(int e^u) via the shifted form max(u) + log(mean e^(u-max))."""
    check_exp_range(values)
    m = float(values.max())
    return m + float(np.log(np.mean(np.exp(values - m))))


def evolution_rhs(values: np.ndarray, grid: Grid, params: ModelParams) -> np.ndarray:
    """D u_xx - u + kappa p(u); also the stationary residual."""
    uxx = np.fft.irfft(
        -grid.laplacian_eigenvalues * np.fft.rfft(values, norm="forward"),
        grid.n_points,
        norm="forward",
    )
    return params.D * uxx - values + params.kappa * density(values)


def residual_floor(values: np.ndarray, grid: Grid, params: ModelParams) -> float:
    """Round-off floor of the spectral stationary residual.

    The FFT second derivative amplifies coefficient noise by D * mu_max, so
    no iteration can push the residual below this scale.
    """
    eps = float(np.finfo(float).eps)
    return eps * (1.0 + params.D * grid.laplacian_eigenvalues[-1]) * max(
        1.0, float(np.max(np.abs(values)))
    )


def trig_basis(grid: Grid, n_modes: int, kind: str = "full") -> tuple[np.ndarray, np.ndarray]:
    """Sampled orthonormal eigenbasis of the periodic Laplacian.

    kind="full": [1, sqrt2 cos(2 pi x), sqrt2 sin(2 pi x), sqrt2 cos(4 pi x), ...],
    i.e. the constant followed by alternating (cos k, sin k) pairs,
    2*n_modes + 1 rows.  kind="even": constant plus the cosines only,
    n_modes + 1 rows.  Returns (basis matrix, Laplacian eigenvalue per row).
    """
    x = grid.nodes
    k = np.arange(1, n_modes + 1)
    phases = 2.0 * np.pi * np.outer(k, x)
    cos = np.sqrt(2.0) * np.cos(phases)
    if kind == "even":
        rows = [np.ones((1, grid.n_points)), cos]
        mu = np.concatenate([[0.0], (2.0 * np.pi * k) ** 2])
    elif kind == "full":
        sin = np.sqrt(2.0) * np.sin(phases)
        inter = np.empty((2 * n_modes, grid.n_points))
        inter[0::2] = cos
        inter[1::2] = sin
        rows = [np.ones((1, grid.n_points)), inter]
        mu = np.concatenate([[0.0], np.repeat((2.0 * np.pi * k) ** 2, 2)])
    else:
        raise ValueError(f"unknown basis kind {kind!r}")
    return np.vstack(rows), mu


def hessian_dense(
    values: np.ndarray, grid: Grid, params: ModelParams, basis: np.ndarray, mu: np.ndarray
) -> np.ndarray:
    """Second variation of the energy in the given eigenbasis.

    Entries (1 + D mu_i) delta_ij - kappa (int f_i f_j p - int f_i p int f_j p)
    with the probability density p = e^u / int e^u.
    """
    n = grid.n_points
    p = density(values)
    w = (basis * p) @ basis.T / n
    v = basis @ p / n
    return np.diag(1.0 + params.D * mu) - params.kappa * (w - np.outer(v, v))


def linearization_dense(
    values: np.ndarray, grid: Grid, params: ModelParams, basis: np.ndarray, mu: np.ndarray
) -> np.ndarray:
    """Galerkin matrix of the linearization L h = D h_xx + A h - M C int(C h).

    A = kappa e^U / int e^U - 1, C = e^U, M = kappa / (int e^U)^2.  The
    exponential is shifted by max(U) before assembly; the combination
    M * C(x) C(y) is invariant under that shift.
    """
    check_exp_range(values)
    n = grid.n_points
    shifted = np.exp(values - values.max())  # C up to the constant e^max
    mean_c = shifted.mean()
    a = params.kappa * shifted / mean_c - 1.0
    m_coef = params.kappa / mean_c**2
    w_a = (basis * a) @ basis.T / n
    c_vec = basis @ shifted / n
    return np.diag(-params.D * mu) + w_a - m_coef * np.outer(c_vec, c_vec)
