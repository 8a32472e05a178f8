import numpy as np
import pytest

import mechmorph as mm
from mechmorph.errors import ConfigurationError
from mechmorph.stability import _secular_solve

MU_1 = 4.0 * np.pi**2


def constant_report(grid, D, kappa, n_modes=None):
    state = mm.constant_state(mm.ModelParams(D=D, kappa=kappa), grid)
    return state, mm.nonlocal_spectrum(state, n_modes=n_modes)


def test_linearization_diagonal_at_constant(grid256):
    D, kappa = 0.01, 1.2
    state = mm.constant_state(mm.ModelParams(D=D, kappa=kappa), grid256)
    dense = mm.assemble_linearization(state, 6)
    mu = np.concatenate([[0.0], np.repeat(MU_1 * np.arange(1, 7) ** 2, 2)])
    expected = np.diag(kappa - 1.0 - D * mu)
    expected[0, 0] = -1.0
    assert np.max(np.abs(dense - expected)) < 1e-12


def test_linearization_is_symmetric(unimodal_16):
    dense = mm.assemble_linearization(unimodal_16, 20)
    assert np.max(np.abs(dense - dense.T)) < 1e-10


def test_linearization_is_negative_hessian(unimodal_16):
    # assembled from A, C, M; the energy Hessian from the density formulas
    dense = mm.assemble_linearization(unimodal_16, 16)
    hess = mm.hessian_matrix(unimodal_16.field, unimodal_16.params, 16)
    assert np.max(np.abs(dense + hess)) < 1e-10


def test_energy_hessian_duality_of_spectra(unimodal_16):
    dense = mm.assemble_linearization(unimodal_16, 24)
    hess = mm.hessian_matrix(unimodal_16.field, unimodal_16.params, 24)
    lead_l = np.linalg.eigvalsh(dense).max()
    small_h = np.linalg.eigvalsh(hess).min()
    assert abs(lead_l + small_h) < 1e-8


def test_constant_state_spectrum_closed_form(grid256):
    D, kappa = 0.01, 1.2
    _, report = constant_report(grid256, D, kappa)
    expected_nu1 = kappa - 1.0 - D * MU_1
    assert report.nonlocal_eigs[0] == pytest.approx(expected_nu1, abs=1e-12)
    assert report.verdict == "stable"
    assert np.min(np.abs(report.nonlocal_eigs + 1.0)) < 1e-10  # mass mode at -1


def test_constant_state_threshold_flip(grid256):
    D = 0.01
    kappa_c = 1.0 + MU_1 * D
    _, below = constant_report(grid256, D, kappa_c - 1e-3)
    _, above = constant_report(grid256, D, kappa_c + 1e-3)
    assert below.verdict == "stable"
    assert above.verdict == "unstable"


def test_constant_state_marginal_at_threshold(grid256):
    D = 0.01
    _, report = constant_report(grid256, D, 1.0 + MU_1 * D)
    assert report.verdict == "marginal"


def test_local_spectrum_constant_state(grid256):
    D, kappa = 0.008, 1.3
    state = mm.constant_state(mm.ModelParams(D=D, kappa=kappa), grid256)
    local = mm.local_spectrum(state, n_modes=8)
    # A(x) = kappa - 1 constant: lambda_0 = kappa - 1, pairs at kappa-1-D mu_k
    assert local.lambdas[0] == pytest.approx(kappa - 1.0, abs=1e-12)
    for k in range(1, 9):
        expected = kappa - 1.0 - D * MU_1 * k**2
        assert local.lambdas[2 * k - 1] == pytest.approx(expected, abs=1e-11)
        assert local.lambdas[2 * k] == pytest.approx(expected, abs=1e-11)
    assert local.zero_counts[0] == 0
    assert list(local.zero_counts[1:5]) == [2, 2, 4, 4]


def test_local_ordering_chain(unimodal_16):
    local = mm.local_spectrum(unimodal_16)
    lam = local.lambdas
    assert lam[0] - lam[1] > 1e-10  # simple leading eigenvalue
    assert np.all(np.diff(lam) <= 1e-12)  # sorted decreasing
    for j in range(3):
        assert lam[2 * j] - lam[2 * j + 1] >= -1e-12


def test_translation_mode_in_local_spectrum(unimodal_16):
    local = mm.local_spectrum(unimodal_16)
    idx = int(np.argmin(np.abs(local.lambdas)))
    assert abs(local.lambdas[idx]) < 1e-7
    ux = mm.from_spectral(mm.first_derivative(mm.to_spectral(unimodal_16.field))).values
    mode = local.eigenfunctions[idx].values
    corr = abs(mode @ ux) / (np.linalg.norm(mode) * np.linalg.norm(ux))
    assert corr > 1.0 - 1e-6


def test_translation_mode_in_nonlocal_spectrum(unimodal_16, twomodal_16):
    for state in (unimodal_16, twomodal_16):
        report = mm.nonlocal_spectrum(state)
        assert report.translation_nu is not None
        assert abs(report.translation_nu) < 1e-7


def test_single_term_secular_equation():
    lam0, beta, m_coef = 2.0, 0.7, 3.0
    local = mm.LocalSpectrum(
        lambdas=np.array([lam0]), eigenfunctions=[], zero_counts=np.array([0])
    )
    roots = mm.secular_roots(local, np.array([beta]), m_coef)
    assert roots.size == 1
    assert roots[0] == pytest.approx(lam0 - m_coef * beta**2, abs=1e-10)


def test_secular_requires_positive_m():
    local = mm.LocalSpectrum(
        lambdas=np.array([1.0]), eigenfunctions=[], zero_counts=np.array([0])
    )
    with pytest.raises(ConfigurationError):
        mm.secular_roots(local, np.array([1.0]), 0.0)


def test_secular_merge_rule():
    # a double eigenvalue with two couplings merges into one summand and
    # keeps the shared value as an eigenvalue of the full problem
    lam = np.array([1.0, 1.0, -1.0])
    betas = np.array([0.6, 0.8, 0.5])
    local = mm.LocalSpectrum(lambdas=lam, eigenfunctions=[], zero_counts=np.zeros(3, int))
    m_coef = 0.5
    roots = mm.secular_roots(local, betas, m_coef)
    assert roots.size == 3
    assert np.min(np.abs(roots - 1.0)) < 1e-12  # the decoupled combination
    # remaining roots solve 1/M = 1/(1 - nu) + 0.25/(-1 - nu) with merged
    # beta^2 = 1.0; verify by substitution
    others = sorted(r for r in roots if abs(r - 1.0) > 1e-9)
    for nu in others:
        lhs = 1.0 / (1.0 - nu) + 0.25 / (-1.0 - nu)
        assert lhs == pytest.approx(1.0 / m_coef, abs=1e-9)


def test_constant_state_secular_structure(grid256):
    # only the constant eigenfunction couples: its bracket root sits at -1
    # and every trigonometric eigenvalue carries over verbatim
    state, report = constant_report(grid256, 0.01, 1.2)
    solution = _secular_solve(report.local, report.betas, report.M)
    assert len(solution.roots) == 1
    root, lower, upper = solution.roots[0]
    assert root == pytest.approx(-1.0, abs=1e-10)
    assert lower == -np.inf and upper == pytest.approx(0.2, abs=1e-12)
    assert len(solution.verbatim) == report.local.lambdas.size - 1


def test_crosscheck_constant_exact(grid256):
    state = mm.constant_state(mm.ModelParams(D=0.01, kappa=1.2), grid256)
    check = mm.spectrum_crosscheck(state)
    assert check.max_deviation < 1e-10
    assert check.interlacing_ok


def test_crosscheck_unimodal(unimodal_16):
    check = mm.spectrum_crosscheck(unimodal_16)
    assert check.max_deviation < 1e-6
    assert check.interlacing_ok


def test_crosscheck_two_modal(twomodal_16):
    check = mm.spectrum_crosscheck(twomodal_16)
    assert check.max_deviation < 1e-6
    assert check.interlacing_ok
    report = mm.nonlocal_spectrum(twomodal_16)
    assert report.verdict == "unstable"
    assert report.nonlocal_eigs[0] > 0


def test_instability_criterion_from_oscillation(twomodal_16):
    # the profile derivative has >= 3 sign changes, hence instability
    ux = mm.from_spectral(mm.first_derivative(mm.to_spectral(twomodal_16.field))).values
    signs = np.sign(ux[np.abs(ux) > 1e-9 * np.abs(ux).max()])
    changes = int(np.sum(signs != np.roll(signs, 1)))
    assert changes >= 3
    assert mm.nonlocal_spectrum(twomodal_16).verdict == "unstable"


def test_stable_pattern_reports_marginal_with_negative_leading(unimodal_16):
    report = mm.nonlocal_spectrum(unimodal_16)
    assert report.verdict == "marginal"  # translation zero mode
    assert report.leading_nu < -1e-3
    assert report.route == ("direct-matrix",) * report.nonlocal_eigs.size


def test_betas_of_odd_eigenfunctions_vanish(unimodal_16):
    report = mm.nonlocal_spectrum(unimodal_16)
    # parity: roughly half of the local eigenfunctions are odd and decouple
    n_zero = int(np.sum(np.abs(report.betas) < 1e-9))
    assert n_zero >= report.betas.size // 3
    assert report.M > 0


def test_spectrum_rejects_oversized_truncation(unimodal_16):
    with pytest.raises(ConfigurationError):
        mm.nonlocal_spectrum(unimodal_16, n_modes=unimodal_16.field.grid.n_points)
