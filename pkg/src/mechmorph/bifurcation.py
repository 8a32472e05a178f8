"""Bifurcation structure of the constant branch.

The constant state loses stability to the mode cos(2 pi n x) at
kappa_n = 1 + 4 pi^2 n^2 D.  Near each such point a pitchfork branch
exists with closed-form normal-form data:

    state(s)  = kappa(s) + s sqrt2 cos(2 pi n x) + s^2 z_amp cos(4 pi n x) + O(s^3)
    kappa(s)  = kappa_n + curvature * s^2 + O(s^3)

where s is the amplitude of the sqrt2 cos(2 pi n x) component,
z_amp = kappa_n / (24 pi^2 n^2 D), and the branch is subcritical
(curvature < 0) exactly for kappa_n < 3/2, i.e. D < 1/(8 pi^2 n^2).

``alpha_pp`` stores the conventional normal-form constant
1/4 - 1/(16 D n^2 pi^2) + 2 D n^2 pi^2.  The measured quadratic
coefficient of kappa versus amplitude along corrected branches is
alpha_pp / 3 (confirmed numerically to three digits at several D and by a
third-order expansion of the reduced equation); the corrected value is
what the predictor uses, while alpha_pp is reported as the classification
constant.  Both share the sign and the type threshold.

Branches are tracked with pseudo-arclength continuation in the even
(cosine) subspace with kappa as an unknown, so folds pose no singularity.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._operators import evolution_rhs, density, linearization_dense, trig_basis
from .energy import bounds
from .errors import ConfigurationError, ConvergenceError, MechmorphError, SingularJacobianError
from .grid import Field, Grid, make_grid
from .model import ModelParams
from .stability import nonlocal_spectrum
from .steady import relax_to_steady
from .steady import _certify as _certify_steady

__all__ = [
    "BifPoint",
    "BranchPoint",
    "Branch",
    "SweepCell",
    "SweepResult",
    "critical_kappas",
    "predictor_from_normal_form",
    "continue_branch",
    "detect_folds",
    "sweep",
]

TYPE_TOL = 1e-12


@dataclass(frozen=True)
class BifPoint:
    """Bifurcation point (constant state, kappa_n) for mode number n."""

    n: int
    D: float
    kappa_n: float
    alpha_pp: float
    z_amp: float
    type: str

    @property
    def curvature(self) -> float:
        """Quadratic coefficient of kappa versus amplitude along the branch."""
        return self.alpha_pp / 3.0


@dataclass(frozen=True)
class BranchPoint:
    """One corrected point on a bifurcating branch (even-symmetric field)."""

    s: float
    kappa: float
    field: Field = field(repr=False)
    amplitude: float
    stable: bool
    leading_nu: float
    energy: float


@dataclass(frozen=True)
class Branch:
    origin: BifPoint
    points: list[BranchPoint]
    folds: list[tuple[int, float]]
    terminated_by: str


def critical_kappas(D: float, n_max: int) -> list[BifPoint]:
    """Closed-form bifurcation data for modes n = 1 .. n_max."""
    if not (D > 0):
        raise ConfigurationError(f"D must be positive, got {D}")
    if n_max < 1:
        raise ConfigurationError(f"n_max must be >= 1, got {n_max}")
    points = []
    for n in range(1, n_max + 1):
        q = 4.0 * np.pi**2 * n**2 * D
        kappa_n = 1.0 + q
        alpha_pp = 0.25 - 1.0 / (16.0 * D * n**2 * np.pi**2) + 2.0 * D * n**2 * np.pi**2
        if alpha_pp < -TYPE_TOL:
            kind = "subcritical"
        elif alpha_pp > TYPE_TOL:
            kind = "supercritical"
        else:
            kind = "degenerate"
        points.append(
            BifPoint(
                n=n,
                D=float(D),
                kappa_n=kappa_n,
                alpha_pp=alpha_pp,
                z_amp=kappa_n / (24.0 * np.pi**2 * n**2 * D),
                type=kind,
            )
        )
    return points


def predictor_from_normal_form(bp: BifPoint, s: float, grid: Grid | None = None) -> tuple[Field, float]:
    """Second-order branch predictor at amplitude s (|s| <= 0.2 recommended)."""
    grid = grid if grid is not None else make_grid()
    kappa = bp.kappa_n + bp.curvature * s**2
    x = grid.nodes
    values = (
        kappa
        + s * np.sqrt(2.0) * np.cos(2.0 * np.pi * bp.n * x)
        + s**2 * bp.z_amp * np.cos(4.0 * np.pi * bp.n * x)
    )
    return Field(grid, values), kappa


def _predictor_coefficients(bp: BifPoint, s: float, n_modes: int) -> np.ndarray:
    coeffs = np.zeros(n_modes + 2)
    kappa = bp.kappa_n + bp.curvature * s**2
    coeffs[0] = kappa
    coeffs[bp.n] = s
    if 2 * bp.n <= n_modes:
        coeffs[2 * bp.n] = s**2 * bp.z_amp / np.sqrt(2.0)
    coeffs[-1] = kappa
    return coeffs


class _EvenCorrector:
    """Newton corrector for the extended system (residual + normalization).

    Unknowns z = (cosine coefficients a_0..a_K, kappa); the normalization
    row is tangent . (z - anchor) - ds = 0.
    """

    def __init__(self, grid: Grid, D: float, n_modes: int):
        self.grid = grid
        self.D = D
        self.basis, self.mu = trig_basis(grid, n_modes, kind="even")
        self.n_unknowns = n_modes + 2

    def field_values(self, z: np.ndarray) -> np.ndarray:
        return z[:-1] @ self.basis

    def residual(self, z: np.ndarray) -> np.ndarray:
        params = ModelParams(D=self.D, kappa=float(z[-1]))
        r = evolution_rhs(self.field_values(z), self.grid, params)
        return self.basis @ r / self.grid.n_points

    def solve(self, z0, tangent, anchor, ds, tol=1e-11, max_iter=12):
        # convergence is measured on the residual projected into the even
        # subspace (the system Newton actually solves); the unprojected tail
        # is checked later by the steady-state certification
        z = z0.copy()
        n = self.grid.n_points
        for _ in range(max_iter):
            proj = self.residual(z)
            res_norm = float(np.linalg.norm(proj))
            norm_eq = float(tangent @ (z - anchor)) - ds
            if res_norm < tol and abs(norm_eq) < 1e-12:
                return z, res_norm
            kappa = float(z[-1])
            if kappa <= 0:
                raise ConvergenceError("corrector left the kappa > 0 domain")
            params = ModelParams(D=self.D, kappa=kappa)
            vals = self.field_values(z)
            jac = np.empty((self.n_unknowns, self.n_unknowns))
            jac[:-1, :-1] = linearization_dense(vals, self.grid, params, self.basis, self.mu)
            jac[:-1, -1] = self.basis @ density(vals) / n
            jac[-1, :] = tangent
            rhs = -np.concatenate([proj, [norm_eq]])
            try:
                z = z + np.linalg.solve(jac, rhs)
            except np.linalg.LinAlgError as exc:
                raise SingularJacobianError("singular extended Jacobian") from exc
            if not np.all(np.isfinite(z)):
                raise ConvergenceError("corrector diverged")
        raise ConvergenceError("corrector did not converge")


def continue_branch(
    bp: BifPoint,
    step: float = 0.05,
    max_points: int = 200,
    kappa_range: tuple[float, float] | None = None,
    grid: Grid | None = None,
    n_modes: int | None = None,
    spectrum_modes: int | None = None,
) -> Branch:
    """Trace the branch emanating from (constant, kappa_n) at positive amplitude.

    The first point comes from the normal-form predictor with an
    amplitude-pinning corrector; afterwards a secant predictor with
    pseudo-arclength normalization is used, with kappa free.  The step is
    halved on corrector failure and regrown (x1.3, capped at the initial
    step) after four easy successes.  Stability is evaluated at every point
    through the full nonlocal spectrum.
    """
    if step <= 0:
        raise ConfigurationError(f"step must be positive, got {step}")
    grid = grid if grid is not None else make_grid()
    n = grid.n_points
    if n_modes is None:
        n_modes = max(min(96, n // 2 - 1), 4 * bp.n)
    if n_modes < 2 * bp.n or n_modes > n // 2 - 1:
        raise ConfigurationError(
            f"n_modes must be in [2 n, n_points/2 - 1] for mode number {bp.n}, got {n_modes}"
        )
    lo, hi = kappa_range if kappa_range is not None else (0.0, math.inf)
    corrector = _EvenCorrector(grid, bp.D, n_modes)

    def make_point(z, s_coord) -> BranchPoint:
        state = _certify_steady(
            Field(grid, corrector.field_values(z)), ModelParams(D=bp.D, kappa=float(z[-1]))
        )
        report = nonlocal_spectrum(state, n_modes=spectrum_modes)
        return BranchPoint(
            s=s_coord,
            kappa=float(z[-1]),
            field=state.field,
            amplitude=float(z[bp.n]),
            stable=report.leading_nu <= 1e-8,
            leading_nu=report.leading_nu,
            energy=state.energy,
        )

    points: list[BranchPoint] = []
    zs: list[np.ndarray] = []
    terminated_by = "step_limit"

    # first point: normal-form predictor, amplitude pinned at s = step
    z_pred = _predictor_coefficients(bp, step, n_modes)
    pin = np.zeros(corrector.n_unknowns)
    pin[bp.n] = 1.0
    try:
        z, _ = corrector.solve(z_pred, pin, z_pred, 0.0)
    except MechmorphError as exc:
        raise ConvergenceError(f"could not correct the first branch point: {exc}") from exc
    points.append(make_point(z, step))
    zs.append(z)

    # secant anchor behind the first point: the bifurcation point itself
    z_origin = np.zeros(corrector.n_unknowns)
    z_origin[0] = bp.kappa_n
    z_origin[-1] = bp.kappa_n

    ds = step
    easy = 0
    while len(points) < max_points:
        prev = zs[-2] if len(zs) >= 2 else z_origin
        diff = zs[-1] - prev
        tangent = diff / np.linalg.norm(diff)
        z_pred = zs[-1] + tangent * ds
        try:
            z, _ = corrector.solve(z_pred, tangent, zs[-1], ds)
            easy += 1
        except MechmorphError:
            easy = 0
            ds *= 0.5
            if ds < step / 64.0:
                terminated_by = "failure"
                break
            continue
        try:
            point = make_point(z, points[-1].s + ds)
        except MechmorphError:
            terminated_by = "failure"
            break
        points.append(point)
        zs.append(z)
        if easy >= 4:
            ds = min(ds * 1.3, step)
            easy = 0
        span = float(np.max(np.abs(point.field.values - np.mean(point.field.values))))
        if span < 1e-6:
            terminated_by = "reconnect"
            break
        if not (lo <= point.kappa <= hi):
            terminated_by = "kappa_bound"
            break

    folds = _detect_folds([p.s for p in points], [p.kappa for p in points])
    return Branch(origin=bp, points=points, folds=folds, terminated_by=terminated_by)


def _detect_folds(svals, kappas) -> list[tuple[int, float]]:
    if len(svals) < 3:
        return []
    s = np.asarray(svals, dtype=float)
    k = np.asarray(kappas, dtype=float)
    dk = np.diff(k)
    folds = []
    for i in range(dk.size - 1):
        if dk[i] == 0.0 or dk[i + 1] == 0.0:
            continue
        if np.sign(dk[i]) != np.sign(dk[i + 1]):
            tri = slice(i, i + 3)
            a, b, c = np.polyfit(s[tri], k[tri], 2)
            kappa_f = float(c - b**2 / (4.0 * a)) if a != 0.0 else float(k[i + 1])
            folds.append((i + 1, kappa_f))
    return folds


def detect_folds(branch: Branch) -> list[tuple[int, float]]:
    """Sign changes of dkappa/ds with the fold kappa refined by a local
    quadratic fit of kappa(s)."""
    return _detect_folds([p.s for p in branch.points], [p.kappa for p in branch.points])


@dataclass(frozen=True)
class SweepCell:
    D: float
    kappa: float
    classification: str  # constant-only | pattern-only | bistable | unknown
    n_outcomes: int
    kappa_c: float  # constant-state instability threshold 1 + 4 pi^2 D


@dataclass(frozen=True)
class SweepResult:
    cells: list[SweepCell]
    d_values: np.ndarray
    kappa_values: np.ndarray
    overlays: dict


def _even_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    noise = rng.standard_normal(n)
    coef = np.fft.rfft(noise, norm="forward")
    even = np.fft.irfft(coef.real.astype(complex), n, norm="forward")
    even -= even.mean()
    peak = np.max(np.abs(even))
    return even / peak if peak > 0 else even


def _classify_cell(args) -> SweepCell:
    (d_val, kappa, trials, child_seed, n_points, dt, t_end, handoff_tol, amplitude) = args
    grid = make_grid(n_points)
    params = ModelParams(D=d_val, kappa=kappa)
    rng = np.random.Generator(np.random.PCG64(child_seed))
    x = grid.nodes
    bump = np.exp(np.cos(2.0 * np.pi * x))
    seeds = [kappa * bump / bump.mean()]
    for _ in range(trials):
        seeds.append(kappa * (1.0 + amplitude * _even_noise(rng, n_points)))
    outcomes = set()
    for u0 in seeds:
        try:
            state = relax_to_steady(
                Field(grid, u0), params, dt=dt, t_end=t_end, steady_tol=handoff_tol
            )
        except MechmorphError:
            continue
        outcomes.add("constant" if state.modality == 0 else "pattern")
    if not outcomes:
        classification = "unknown"
    elif outcomes == {"constant"}:
        classification = "constant-only"
    elif outcomes == {"pattern"}:
        classification = "pattern-only"
    else:
        classification = "bistable"
    return SweepCell(
        D=d_val,
        kappa=kappa,
        classification=classification,
        n_outcomes=len(outcomes),
        kappa_c=1.0 + 4.0 * np.pi**2 * d_val,
    )


def sweep(
    d_values,
    kappa_values,
    trials: int = 3,
    seed: int = 0,
    n_points: int = 128,
    dt: float = 1e-3,
    t_end: float = 400.0,
    handoff_tol: float = 1e-7,
    perturb_amplitude: float = 0.01,
    workers: int = 1,
) -> SweepResult:
    """Classify each (D, kappa) cell by the outcomes of relaxation runs.

    Each cell runs ``trials`` random even perturbations of the constant
    state (relative amplitude ``perturb_amplitude``) plus one deterministic
    large seed, the bump kappa e^cos(2 pi x) / int e^cos.  Solver failures
    are recorded, never raised.  Cells are independent; with workers > 1
    they are distributed over a process pool.  Results are deterministic
    for a fixed seed regardless of worker count.
    """
    d_values = np.asarray(list(d_values), dtype=float)
    kappa_values = np.asarray(list(kappa_values), dtype=float)
    if d_values.size == 0 or kappa_values.size == 0 or (d_values <= 0).any() or (kappa_values <= 0).any():
        raise ConfigurationError("d_values and kappa_values must be non-empty and positive")
    cells_args = []
    children = np.random.SeedSequence(seed).spawn(d_values.size * kappa_values.size)
    idx = 0
    for d_val in d_values:
        for kappa in kappa_values:
            cells_args.append(
                (float(d_val), float(kappa), trials, children[idx],
                 n_points, dt, t_end, handoff_tol, perturb_amplitude)
            )
            idx += 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_classify_cell, cells_args))
    else:
        cells = [_classify_cell(a) for a in cells_args]
    overlays = {
        "kappa_c": 1.0 + 4.0 * np.pi**2 * d_values,
        "d_min": np.array([bounds(k).d_min for k in kappa_values]),
        "d_max": np.array([bounds(k).d_max for k in kappa_values]),
    }
    return SweepResult(cells=cells, d_values=d_values, kappa_values=kappa_values, overlays=overlays)
