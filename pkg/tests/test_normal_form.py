"""Double-entry bookkeeping for the bifurcation normal form.

The reduced-map derivative operators are validated against finite
differences, then the branch constants are re-derived by numerical
projection and compared with the closed forms used by the bifurcation
module, and with the curvature actually measured along corrected branches.
"""

import numpy as np
import pytest

import mechmorph as mm

from gfun_oracle import ReducedMap, rederive_branch_constants
from oracles import random_smooth_field

D_VALUES = (0.004, 0.005, 0.01, 0.02, 0.05)


def closed_form_alpha_pp(D, n=1):
    return 0.25 - 1.0 / (16.0 * D * n**2 * np.pi**2) + 2.0 * D * n**2 * np.pi**2


@pytest.fixture(scope="module")
def reduced(grid256=None):
    grid = mm.make_grid(256)
    return ReducedMap(grid, D=0.02, kappa_n=1.0 + 4.0 * np.pi**2 * 0.02), grid


def test_reduced_map_zero_at_origin(reduced):
    rm, grid = reduced
    chi = np.zeros(grid.n_points)
    assert np.max(np.abs(rm.g(chi, 0.0))) < 1e-14
    assert np.max(np.abs(rm.g(chi, 0.37))) < 1e-14  # trivial branch for all alpha


def test_g_chi_matches_finite_difference(reduced):
    rm, grid = reduced
    rng = np.random.Generator(np.random.PCG64(51))
    for _ in range(5):
        chi = random_smooth_field(grid, rng, amplitude=0.5).values
        h = random_smooth_field(grid, rng, amplitude=1.0).values
        # the spectral-derivative round-off of g divided by 2 eps sets the
        # noise floor of this comparison, around 1e-7 at this grid size
        eps = 1e-5
        approx = (rm.g(chi + eps * h, 0.1) - rm.g(chi - eps * h, 0.1)) / (2.0 * eps)
        exact = rm.g_chi(chi, 0.1, h)
        assert np.max(np.abs(exact - approx)) < 2e-6


def test_g_chichi_matches_finite_difference(reduced):
    rm, grid = reduced
    rng = np.random.Generator(np.random.PCG64(52))
    for _ in range(5):
        chi = random_smooth_field(grid, rng, amplitude=0.5).values
        h = random_smooth_field(grid, rng, amplitude=1.0).values
        eps = 1e-4
        approx = (
            rm.g_chi(chi + eps * h, 0.0, h) - rm.g_chi(chi - eps * h, 0.0, h)
        ) / (2.0 * eps)
        exact = rm.g_chichi(chi, 0.0, h, h)
        assert np.max(np.abs(exact - approx)) < 1e-6


def test_g_chichichi_matches_finite_difference(reduced):
    rm, grid = reduced
    rng = np.random.Generator(np.random.PCG64(53))
    for _ in range(5):
        chi = random_smooth_field(grid, rng, amplitude=0.4).values
        h = random_smooth_field(grid, rng, amplitude=1.0).values
        eps = 1e-4
        approx = (
            rm.g_chichi(chi + eps * h, 0.0, h, h) - rm.g_chichi(chi - eps * h, 0.0, h, h)
        ) / (2.0 * eps)
        exact = rm.g_chichichi(chi, 0.0, h)
        assert np.max(np.abs(exact - approx)) < 1e-5


def test_g_alpha_and_mixed_derivative(reduced):
    rm, grid = reduced
    rng = np.random.Generator(np.random.PCG64(54))
    chi = random_smooth_field(grid, rng, amplitude=0.5).values
    h = random_smooth_field(grid, rng, amplitude=1.0).values
    eps = 1e-6
    approx_alpha = (rm.g(chi, eps) - rm.g(chi, -eps)) / (2.0 * eps)
    assert np.max(np.abs(rm.g_alpha(chi, 0.0) - approx_alpha)) < 1e-9
    approx_mixed = (rm.g_chi(chi, eps, h) - rm.g_chi(chi, -eps, h)) / (2.0 * eps)
    assert np.max(np.abs(rm.g_chialpha(chi, 0.0, h) - approx_mixed)) < 1e-8


@pytest.mark.parametrize("D", D_VALUES)
def test_rederived_alpha_pp_matches_closed_form(D):
    alpha_pp, _, _ = rederive_branch_constants(D)
    assert abs(alpha_pp - closed_form_alpha_pp(D)) < 1e-10


@pytest.mark.parametrize("D", D_VALUES)
def test_rederived_z_amp_matches_closed_form(D):
    kappa_n = 1.0 + 4.0 * np.pi**2 * D
    _, _, z_amp = rederive_branch_constants(D)
    assert abs(z_amp - kappa_n / (24.0 * np.pi**2 * D)) < 1e-10


def test_rederived_curvature_is_one_third_of_alpha_pp():
    for D in D_VALUES:
        alpha_pp, curvature, _ = rederive_branch_constants(D)
        assert curvature == pytest.approx(alpha_pp / 3.0, rel=1e-12)


def test_rederivation_for_higher_modes():
    for n in (2, 3):
        alpha_pp, _, z_amp = rederive_branch_constants(0.003, n=n)
        assert abs(alpha_pp - closed_form_alpha_pp(0.003, n)) < 1e-10
        kappa_n = 1.0 + 4.0 * np.pi**2 * n**2 * 0.003
        assert abs(z_amp - kappa_n / (24.0 * np.pi**2 * n**2 * 0.003)) < 1e-10


def test_curvature_matches_measured_branch(grid256):
    # the corrected branch is the final arbiter: its fitted quadratic
    # coefficient agrees with the chain-rule curvature, not with alpha_pp
    D = 0.02
    bp = mm.critical_kappas(D, 1)[0]
    _, curvature, _ = rederive_branch_constants(D)
    branch = mm.continue_branch(bp, step=0.02, max_points=4, grid=grid256)
    amps = np.array([p.amplitude for p in branch.points])
    kappas = np.array([p.kappa for p in branch.points])
    fit = float(np.sum((kappas - bp.kappa_n) * amps**2) / np.sum(amps**4))
    assert fit == pytest.approx(curvature, rel=0.02)
