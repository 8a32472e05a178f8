"""Linear stability of stationary solutions.

Two independent routes to the spectrum of the linearization

    L h = D h_xx + A(x) h - M C(x) int C(y) h(y) dy,
    A = kappa e^U / int e^U - 1,  C = e^U,  M = kappa / (int e^U)^2.

The direct route assembles the dense Galerkin matrix of L in the
trigonometric eigenbasis and diagonalizes it.  The secular route removes
the rank-one coupling: with (lambda_n, psi_n) the eigenpairs of the local
Sturm-Liouville problem D psi_xx + A psi = lambda psi and
beta_n = int C psi_n, every nonlocal eigenvalue not shared with the local
problem solves

    1/M = sum_n beta_n^2 / (lambda_n - nu),

with exactly one root between consecutive distinct lambdas that carry
beta != 0, plus one root below the smallest of them.  Local eigenvalues
with beta = 0 carry over verbatim.  Agreement of the two routes is the
package's main spectral self-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._operators import check_exp_range, linearization_dense, trig_basis
from .errors import BracketError, ConfigurationError, ResolutionError
from .grid import Field, first_derivative, from_spectral, to_spectral
from .steady import SteadyState

__all__ = [
    "LocalSpectrum",
    "EigenReport",
    "CrosscheckReport",
    "assemble_linearization",
    "local_spectrum",
    "nonlocal_spectrum",
    "secular_roots",
    "spectrum_crosscheck",
]

MARGINAL_TOL = 1e-8
TRANSLATION_TOL = 1e-5  # search window for the translation zero mode
BETA_TOL = 1e-9
MERGE_TOL = 1e-9
BISECT_TOL = 1e-12
BRACKET_INSET = 1e-10


def _default_modes(state) -> int:
    """Truncation adapted to the state's own spectral content.

    The eigenfunctions of the linearization concentrate on the scale of the
    reaction density, roughly half the state's shortest scale, so twice the
    state's significant bandwidth is kept (at least 64 modes, at most
    n_points/4 where the Galerkin quadrature stays alias-safe).
    """
    n = state.field.grid.n_points
    coef = np.abs(np.fft.rfft(state.field.values, norm="forward"))
    top = coef.max()
    significant = np.nonzero(coef > 1e-12 * top)[0]
    bandwidth = int(significant.max()) if significant.size else 0
    return min(n // 4, max(64, 2 * bandwidth))


@dataclass(frozen=True)
class LocalSpectrum:
    """Spectrum of the local problem D psi_xx + A(x) psi = lambda psi.

    lambdas are sorted decreasing; eigenfunctions are L^2-orthonormal
    Fields; zero_counts holds the number of sign changes per period.
    """

    lambdas: np.ndarray
    eigenfunctions: list[Field] = field(repr=False)
    zero_counts: np.ndarray


@dataclass(frozen=True)
class EigenReport:
    """Stability report for one stationary solution.

    nonlocal_eigs are sorted decreasing.  verdict follows the thresholds
    max nu > 1e-8 (unstable) and |max nu| <= 1e-8 (marginal); a nonconstant
    state always carries a translation eigenvalue at zero, so a pattern
    that is stable modulo shifts reports "marginal".  leading_nu is the
    largest eigenvalue excluding that translation mode and is the quantity
    that changes sign at folds.
    """

    local: LocalSpectrum
    betas: np.ndarray
    M: float
    nonlocal_eigs: np.ndarray
    verdict: str
    route: tuple[str, ...]
    leading_nu: float
    translation_nu: float | None


@dataclass(frozen=True)
class CrosscheckReport:
    """Comparison of the direct and secular spectra (leading eigenvalues)."""

    direct: np.ndarray
    secular: np.ndarray
    max_deviation: float
    n_compared: int
    interlacing_ok: bool


def _count_sign_changes(values: np.ndarray, floor: float = 0.0) -> int:
    threshold = max(1e-9 * np.max(np.abs(values)), floor)
    significant = np.abs(values) > threshold
    signs = np.sign(values[significant])
    if signs.size == 0:
        return 0
    return int(np.sum(signs != np.roll(signs, 1)))


def _local_matrix(state: SteadyState, n_modes: int):
    grid = state.field.grid
    basis, mu = trig_basis(grid, n_modes, kind="full")
    values = state.field.values
    check_exp_range(values)
    shifted = np.exp(values - values.max())
    mean_c = shifted.mean()
    a = state.params.kappa * shifted / mean_c - 1.0
    mat = np.diag(-state.params.D * mu) + (basis * a) @ basis.T / grid.n_points
    return basis, mu, mat, shifted, mean_c


def _check_modes(state: SteadyState, n_modes: int | None) -> int:
    n = state.field.grid.n_points
    if n_modes is None:
        n_modes = _default_modes(state)
    if n_modes < 1 or n_modes > n // 4:
        raise ConfigurationError(
            f"n_modes must be in [1, n_points/4], got {n_modes} at n_points={n}"
        )
    return n_modes


def assemble_linearization(state: SteadyState, n_modes: int | None = None) -> np.ndarray:
    """Dense Galerkin matrix of L in the full trigonometric basis.

    Basis ordering matches :func:`mechmorph.energy.hessian_matrix`
    (constant, then alternating cos/sin), of which this matrix is the
    negative; here it is assembled independently from A, C and M.
    """
    n_modes = _check_modes(state, n_modes)
    grid = state.field.grid
    basis, mu = trig_basis(grid, n_modes, kind="full")
    return linearization_dense(state.field.values, grid, state.params, basis, mu)


def local_spectrum(
    state: SteadyState, n_modes: int | None = None, n_verify: int = 5
) -> LocalSpectrum:
    """Eigen-decomposition of the local problem, sorted decreasing.

    The leading ``n_verify`` eigenfunctions are checked against the
    oscillation pattern (the 0th does not vanish; the pair 2j+1, 2j+2 has
    2j+2 zeros per period) and the ordering chain; a mismatch raises
    :class:`ResolutionError`.
    """
    n_modes = _check_modes(state, n_modes)
    basis, _mu, mat, _shifted, _mean_c = _local_matrix(state, n_modes)
    eigvals, eigvecs = np.linalg.eigh(mat)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    grid = state.field.grid
    functions = [Field(grid, eigvecs[:, i] @ basis) for i in range(eigvals.size)]
    # significance floor per eigenfunction: truncation ripples in the flat
    # exponential tails scale with the energy in the last coefficient pairs
    tail = max(2, n_modes // 4)
    floors = 10.0 * np.linalg.norm(eigvecs[-2 * tail :, :], axis=0)
    counts = np.array(
        [_count_sign_changes(f.values, float(fl)) for f, fl in zip(functions, floors)]
    )

    # the oscillation pattern is only checkable for eigenvalues that are
    # numerically isolated: inside degenerate clusters (exact sin/cos pairs,
    # or the exponentially small tunneling splittings of multimodal states)
    # the eigensolver returns an arbitrary rotation of the cluster basis
    spread = max(1.0, float(eigvals[0] - eigvals[-1]))
    cluster_tol = 1e-9 * spread
    gaps = np.abs(np.diff(eigvals))
    isolated = np.ones(eigvals.size, dtype=bool)
    isolated[:-1] &= gaps > cluster_tol
    isolated[1:] &= gaps > cluster_tol

    if state.modality <= 1 and eigvals.size >= 2 and eigvals[0] - eigvals[1] <= 1e-10:
        raise ResolutionError("leading local eigenvalue is not simple at this resolution")
    limit = min(n_verify, eigvals.size)
    for i in range(limit):
        if not isolated[i]:
            continue
        expected = 0 if i == 0 else 2 * ((i + 1) // 2)
        if counts[i] != expected:
            raise ResolutionError(
                f"local eigenfunction {i} has {counts[i]} sign changes, expected {expected}"
            )
    return LocalSpectrum(lambdas=eigvals, eigenfunctions=functions, zero_counts=counts)


def _coupling(state: SteadyState, local: LocalSpectrum) -> tuple[np.ndarray, float]:
    """True coupling data beta_n = int e^U psi_n and M = kappa / (int e^U)^2."""
    values = state.field.values
    check_exp_range(values)
    c = np.exp(values)
    mean_c = c.mean()
    if not np.isfinite(mean_c) or mean_c > 1e150:
        raise ConfigurationError("state too large to form the nonlocal coupling data")
    betas = np.array([float(np.mean(c * f.values)) for f in local.eigenfunctions])
    return betas, state.params.kappa / mean_c**2


def _verdict(max_nu: float) -> str:
    if max_nu > MARGINAL_TOL:
        return "unstable"
    if abs(max_nu) <= MARGINAL_TOL:
        return "marginal"
    return "stable"


def nonlocal_spectrum(state: SteadyState, n_modes: int | None = None) -> EigenReport:
    """Direct-route spectrum of the full linearization, with verdict.

    For a nonconstant state the translation mode U_x produces an eigenvalue
    at zero; it is identified by correlation with U_x and excluded from
    ``leading_nu`` (but not from the verdict thresholds).
    """
    n_modes = _check_modes(state, n_modes)
    local = local_spectrum(state, n_modes)
    betas, m_coef = _coupling(state, local)

    grid = state.field.grid
    basis, mu = trig_basis(grid, n_modes, kind="full")
    dense = linearization_dense(state.field.values, grid, state.params, basis, mu)
    eigvals, eigvecs = np.linalg.eigh(dense)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    translation_index = None
    translation_nu = None
    if state.modality > 0:
        ux = from_spectral(first_derivative(to_spectral(state.field))).values
        ux_norm = np.linalg.norm(ux)
        best_corr = 0.0
        for i, nu in enumerate(eigvals):
            if abs(nu) > TRANSLATION_TOL:
                continue
            mode_vals = eigvecs[:, i] @ basis
            corr = abs(float(mode_vals @ ux)) / (np.linalg.norm(mode_vals) * ux_norm)
            if corr > best_corr:
                best_corr, translation_index = corr, i
        if translation_index is not None and best_corr > 0.9:
            translation_nu = float(eigvals[translation_index])
        else:
            translation_index = None
    keep = [i for i in range(eigvals.size) if i != translation_index]
    leading_nu = float(np.max(eigvals[keep])) if keep else float(eigvals[0])

    return EigenReport(
        local=local,
        betas=betas,
        M=m_coef,
        nonlocal_eigs=eigvals,
        verdict=_verdict(float(eigvals[0])),
        route=("direct-matrix",) * eigvals.size,
        leading_nu=leading_nu,
        translation_nu=translation_nu,
    )


def _bisect(g, lo: float, hi: float) -> float:
    glo = g(lo)
    ghi = g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if np.sign(glo) == np.sign(ghi):
        raise BracketError(
            f"no sign change in bracket ({lo:.12g}, {hi:.12g}); "
            "a coupling coefficient may be misclassified at the current tolerance"
        )
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if np.sign(gm) == np.sign(glo):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class _SecularSolution:
    """Internal: secular roots with their brackets, plus the verbatim set."""

    roots: list[tuple[float, float, float]]  # (root, lower bracket, upper bracket)
    verbatim: list[float]
    coupled: np.ndarray  # merged coupled eigenvalues, decreasing

    def all_sorted(self) -> np.ndarray:
        values = self.verbatim + [r for r, _, _ in self.roots]
        return np.sort(np.asarray(values))[::-1]


def _secular_solve(
    local: LocalSpectrum,
    betas: np.ndarray,
    M: float,
    beta_tol: float = BETA_TOL,
    merge_tol: float = MERGE_TOL,
) -> _SecularSolution:
    if M <= 0:
        raise ConfigurationError(f"M must be positive, got {M}")
    lambdas = np.asarray(local.lambdas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    if betas.shape != lambdas.shape:
        raise ConfigurationError("betas must align with local.lambdas")

    verbatim = list(lambdas[np.abs(betas) < beta_tol])
    coupled = [(lam, b) for lam, b in zip(lambdas, betas) if abs(b) >= beta_tol]

    # merge coincident coupled eigenvalues (sorted decreasing already); the
    # shared value stays an eigenvalue through the decoupled combination
    merged: list[tuple[float, float]] = []
    for lam, b in coupled:
        if merged and abs(merged[-1][0] - lam) < merge_tol:
            prev_lam, prev_b = merged[-1]
            merged[-1] = (prev_lam, float(np.hypot(prev_b, b)))
            verbatim.append(prev_lam)
        else:
            merged.append((lam, float(b)))

    if not merged:
        return _SecularSolution(roots=[], verbatim=verbatim, coupled=np.empty(0))

    lam_b = np.array([lam for lam, _ in merged])
    scale = max(abs(b) for _, b in merged)
    b_norm = np.array([b / scale for _, b in merged])
    target = (1.0 / M) / scale / scale

    def g(nu):
        with np.errstate(divide="ignore"):
            return float(np.sum(b_norm**2 / (lam_b - nu)) - target)

    def shrink_towards(endpoint, sign, want_negative):
        # move the probe closer to the pole at `endpoint` until g has the
        # required sign; a probe that collapses onto the pole means the root
        # coincides with the eigenvalue to machine precision
        inset = BRACKET_INSET
        while inset > 1e-18:
            probe = endpoint + sign * inset
            if probe == endpoint:
                return endpoint, True
            value = g(probe)
            if (value < 0.0) == want_negative:
                return probe, False
            inset *= 1e-3
        return endpoint, True

    roots: list[tuple[float, float, float]] = []
    # one root inside each interval between consecutive coupled eigenvalues
    for upper, lower in zip(lam_b[:-1], lam_b[1:]):
        if upper - lower <= 2 * BRACKET_INSET:  # narrower than the insets
            roots.append((0.5 * (lower + upper), lower, upper))
            continue
        lo, pinned_lo = shrink_towards(lower, +1.0, want_negative=True)
        hi, pinned_hi = shrink_towards(upper, -1.0, want_negative=False)
        if pinned_lo:
            roots.append((lower, lower, upper))
        elif pinned_hi:
            roots.append((upper, lower, upper))
        else:
            roots.append((_bisect(g, lo, hi), lower, upper))
    # one root below the smallest coupled eigenvalue (g -> 0- as nu -> -inf)
    lowest = lam_b[-1]
    hi, pinned = shrink_towards(lowest, -1.0, want_negative=False)
    if pinned:
        roots.append((lowest, -np.inf, lowest))
    else:
        span = max(1.0, abs(lowest))
        lo = lowest - span
        for _ in range(200):
            if g(lo) < 0.0:
                break
            span *= 2.0
            lo = lowest - span
        else:
            raise BracketError("could not bracket the lowest secular root")
        roots.append((_bisect(g, lo, hi), -np.inf, lowest))

    return _SecularSolution(roots=roots, verbatim=verbatim, coupled=lam_b)


def secular_roots(
    local: LocalSpectrum,
    betas: np.ndarray,
    M: float,
    beta_tol: float = BETA_TOL,
    merge_tol: float = MERGE_TOL,
) -> np.ndarray:
    """All nonlocal eigenvalues via the secular equation, sorted decreasing.

    Local eigenvalues with |beta| < beta_tol are nonlocal eigenvalues
    verbatim and enter the result directly.  Coincident local eigenvalues
    (within merge_tol) that both couple are merged with
    beta <- sqrt(beta_i^2 + beta_j^2); the shared eigenvalue itself then
    also remains a nonlocal eigenvalue (the orthogonal combination
    decouples).  One root is bisected inside every interval between
    consecutive distinct coupled eigenvalues, plus one below the smallest.
    """
    return _secular_solve(local, betas, M, beta_tol, merge_tol).all_sorted()


def spectrum_crosscheck(
    state: SteadyState,
    n_modes: int | None = None,
    tol: float = 1e-6,
    n_compare: int = 10,
) -> CrosscheckReport:
    """Compare the direct and secular spectra on the leading eigenvalues.

    Raises :class:`ResolutionError` (with both lists attached) if the
    maximum pairwise deviation over the leading ``n_compare`` eigenvalues
    exceeds ``tol``.  Also verifies the interlacing brackets: every secular
    root must lie strictly between the coupled local eigenvalues around it.
    """
    report = nonlocal_spectrum(state, n_modes)
    solution = _secular_solve(report.local, report.betas, report.M)
    secular = solution.all_sorted()
    direct = report.nonlocal_eigs
    k = min(n_compare, direct.size, secular.size)
    max_dev = float(np.max(np.abs(direct[:k] - secular[:k])))

    # every bisected root must sit inside its own bracket of consecutive
    # coupled local eigenvalues (the lowest one is only bounded above)
    interlacing_ok = all(lower <= root <= upper for root, lower, upper in solution.roots)

    if max_dev >= tol:
        err = ResolutionError(
            f"spectrum cross-check deviation {max_dev:.3e} exceeds {tol:g} "
            f"on the leading {k} eigenvalues"
        )
        err.direct = direct[:k]
        err.secular = secular[:k]
        raise err
    return CrosscheckReport(
        direct=direct,
        secular=secular,
        max_deviation=max_dev,
        n_compared=k,
        interlacing_ok=interlacing_ok,
    )
