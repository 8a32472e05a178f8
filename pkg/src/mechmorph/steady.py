"""Stationary solutions of 0 = D U_xx - U + kappa e^U / int e^U.

The constant state U = kappa always exists.  Nonconstant states are found
either by damped Newton iteration restricted to the even (cosine) subspace,
which removes the translation zero mode, or by relaxing the gradient flow
and polishing the result.  Every stationary solution carries mass
int U = kappa; this is verified a posteriori rather than imposed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._operators import evolution_rhs, linearization_dense, residual_floor, trig_basis
from .dynamics import simulate
from .energy import energy
from .errors import ConfigurationError, ConvergenceError, ResolutionError, SingularJacobianError
from .grid import Field, integrate
from .model import ModelParams

__all__ = [
    "SteadyState",
    "constant_state",
    "newton_steady",
    "relax_to_steady",
    "rescale_modal",
    "count_modes",
]

FLAT_TOL = 1e-7  # below this peak-to-peak range a field counts as constant
MASS_TOL = 1e-6
RESIDUAL_CERT = 1e-8  # certification threshold for SteadyState


@dataclass(frozen=True)
class SteadyState:
    """A Field certified as a stationary solution.

    residual_norm is the L^2 norm of the full-grid stationary residual,
    modality the number of peaks per period (0 for the constant state).
    """

    field: Field
    params: ModelParams
    residual_norm: float
    modality: int
    energy: float

    def __post_init__(self):
        if self.residual_norm >= RESIDUAL_CERT:
            raise ConvergenceError(
                f"residual norm {self.residual_norm:.3e} exceeds {RESIDUAL_CERT:g}"
            )
        mass_defect = abs(integrate(self.field) - self.params.kappa)
        if mass_defect >= MASS_TOL:
            raise ResolutionError(
                f"stationary mass defect |int U - kappa| = {mass_defect:.3e} exceeds {MASS_TOL:g}"
            )


def _certify(field: Field, params: ModelParams) -> SteadyState:
    residual = evolution_rhs(field.values, field.grid, params)
    return SteadyState(
        field=field,
        params=params,
        residual_norm=float(np.sqrt(np.mean(residual**2))),
        modality=count_modes(field),
        energy=energy(field, params),
    )


def constant_state(params: ModelParams, grid=None) -> SteadyState:
    """The homogeneous state U = kappa (residual identically zero)."""
    from .grid import make_grid

    grid = grid if grid is not None else make_grid()
    field = Field(grid, np.full(grid.n_points, params.kappa))
    return SteadyState(
        field=field,
        params=params,
        residual_norm=0.0,
        modality=0,
        energy=-0.5 * params.kappa**2,
    )


def count_modes(u: Field) -> int:
    """Number of peaks per period.

    Strict local maxima over the periodic index set, after discarding
    oscillations of amplitude below 1e-7 * (max - min).  Fields with
    max - min < 1e-7 count as constant (0 modes).
    """
    v = u.values
    span = float(v.max() - v.min())
    if span < FLAT_TOL:
        return 0
    n = v.size
    # turning points on the circle; exact ties inherit the previous direction
    diffs = np.roll(v, -1) - v
    direction = np.sign(diffs)
    last = 0.0
    for j in range(n):
        if direction[j] == 0.0:
            direction[j] = last
        else:
            last = direction[j]
    if last == 0.0:
        return 0
    for j in range(n):  # resolve leading ties using the wrapped direction
        if direction[j] == 0.0:
            direction[j] = last
        else:
            break
    flips = np.nonzero(direction != np.roll(direction, 1))[0]
    extrema = [(int(j), direction[j] < 0) for j in flips]  # True = maximum
    if not extrema:
        return 0
    # prune max/min pairs whose value gap is below the prominence threshold
    tol = FLAT_TOL * span
    values = [float(v[j]) for j, _ in extrema]
    kinds = [is_max for _, is_max in extrema]
    while len(kinds) > 2:
        gaps = [abs(values[i] - values[(i + 1) % len(values)]) for i in range(len(values))]
        i = int(np.argmin(gaps))
        if gaps[i] >= tol:
            break
        j = (i + 1) % len(values)
        for idx in sorted((i, j), reverse=True):
            del values[idx]
            del kinds[idx]
    if len(kinds) == 2 and abs(values[0] - values[1]) < tol:
        return 0
    return sum(kinds)


def _even_project(values: np.ndarray, n: int) -> np.ndarray:
    # center the max at node 0, then keep the cosine (even) part
    centered = np.roll(values, -int(np.argmax(values)))
    coef = np.fft.rfft(centered, norm="forward")
    return np.fft.irfft(coef.real.astype(complex), n, norm="forward")


def newton_steady(
    guess: Field,
    params: ModelParams,
    tol: float = 1e-10,
    max_iter: int = 50,
    n_modes: int | None = None,
    history: list | None = None,
) -> SteadyState:
    """Damped Newton iteration on the stationary equation in the even subspace.

    The guess is recentered at its maximum and projected onto cosine modes,
    which fixes the translation phase and makes the Jacobian (the nonlocal
    linearization restricted to even modes) nonsingular away from folds.
    Residuals are always evaluated on the full grid; on fine grids the
    tolerance is raised to the round-off floor of the spectral residual,
    which the certification threshold still sits far above.
    """
    if tol < 1e-12:
        raise ConfigurationError(f"tol must be >= 1e-12, got {tol}")
    grid = guess.grid
    n = grid.n_points
    if n_modes is None:
        n_modes = n // 2 - 1
    if n_modes < 1 or n_modes > n // 2 - 1:
        raise ConfigurationError(f"n_modes must be in [1, n_points/2 - 1], got {n_modes}")

    basis, mu = trig_basis(grid, n_modes, kind="even")
    values = _even_project(guess.values, n)

    def residual_pair(vals):
        r = evolution_rhs(vals, grid, params)
        return r, float(np.sqrt(np.mean(r**2)))

    residual, res_norm = residual_pair(values)
    for _ in range(max_iter):
        if history is not None:
            history.append(res_norm)
        if res_norm < max(tol, residual_floor(values, grid, params)):
            return _certify(Field(grid, values), params)
        jac = linearization_dense(values, grid, params, basis, mu)
        rhs = basis @ residual / n
        try:
            delta = np.linalg.solve(jac, -rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(
                "singular Jacobian in Newton iteration (possible fold)"
            ) from exc
        if not np.all(np.isfinite(delta)):
            raise SingularJacobianError("non-finite Newton step (possible fold)")
        # damping: halve the step until the residual decreases
        scale = 1.0
        for _halving in range(21):
            trial = values + scale * (delta @ basis)
            trial_res, trial_norm = residual_pair(trial)
            if trial_norm < res_norm:
                values, residual, res_norm = trial, trial_res, trial_norm
                break
            scale *= 0.5
        else:
            raise ConvergenceError(
                f"Newton line search stalled at residual {res_norm:.3e}"
            )
    if res_norm < max(tol, residual_floor(values, grid, params)):
        return _certify(Field(grid, values), params)
    raise ConvergenceError(
        f"Newton did not reach tol={tol:g} within {max_iter} iterations "
        f"(residual {res_norm:.3e})"
    )


def relax_to_steady(
    u0: Field,
    params: ModelParams,
    dt: float = 1e-3,
    t_end: float = 500.0,
    steady_tol: float = 1e-9,
    newton_tol: float = 1e-10,
    n_modes: int | None = None,
) -> SteadyState:
    """Relax the gradient flow until quasi-steady, then polish with Newton.

    steady_tol is the dynamic detector threshold on max|u_{n+1}-u_n|/dt; a
    looser value hands over to Newton earlier.  Raises ConvergenceError if
    neither the flow nor the polish reaches its tolerance.
    """
    summary = simulate(u0, params, t_end=t_end, dt=dt, steady_tol=steady_tol)
    if not summary.converged:
        raise ConvergenceError(
            f"gradient flow not steady by t = {t_end} (detector {steady_tol:g})"
        )
    state = newton_steady(summary.final_state, params, tol=newton_tol, n_modes=n_modes)
    # compare against the recentered even projection Newton actually started from
    baseline = _even_project(summary.final_state.values, u0.grid.n_points)
    moved = float(np.max(np.abs(state.field.values - baseline)))
    if moved > 0.05 * max(1.0, float(np.max(np.abs(baseline)))):
        raise ConvergenceError(
            f"Newton polish moved the relaxed state by {moved:.3e}; "
            "the flow had not settled into a basin"
        )
    return state


def rescale_modal(state: SteadyState, m: int) -> SteadyState:
    """Compress a steady state m-fold: U(m x mod 1) at diffusivity D/m^2.

    A 1-modal input at diffusivity m^2 D yields an m-modal steady state at
    diffusivity D (compressing the profile lowers the effective diffusivity
    by m^2).  The result is sampled on the same grid and re-verified against
    the stationary equation at the new diffusivity; a residual above 1e-7
    means the grid cannot represent the compression (aliasing) and raises
    ResolutionError.
    """
    if m < 1 or not isinstance(m, (int, np.integer)):
        raise ConfigurationError(f"m must be a positive integer, got {m!r}")
    if m == 1:
        return state
    grid = state.field.grid
    n = grid.n_points
    values = state.field.values[(m * np.arange(n)) % n]
    new_params = ModelParams(D=state.params.D / m**2, kappa=state.params.kappa)
    residual = evolution_rhs(values, grid, new_params)
    res_norm = float(np.sqrt(np.mean(residual**2)))
    if res_norm >= 1e-7:
        raise ResolutionError(
            f"rescaled state residual {res_norm:.3e} >= 1e-7; grid too coarse for m={m}"
        )
    field = Field(grid, values)
    modality = count_modes(field)
    if modality != m * state.modality:
        raise ResolutionError(
            f"rescaled state has {modality} peaks, expected {m * state.modality}"
        )
    return SteadyState(
        field=field,
        params=new_params,
        residual_norm=res_norm,
        modality=modality,
        energy=energy(field, new_params),
    )
