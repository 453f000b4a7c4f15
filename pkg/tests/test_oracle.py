import math

import numpy as np
import pytest

from rydslp import oracle, params, scattering, spectrum
from rydslp.errors import InsufficientSamples, StepCountInsufficient
from rydslp.scattering import Impurity, InteractionModel, MediumSpec


def synthetic_branch(p, kappa, a, b):
    samples = []
    for k in kappa:
        w = 1j * p.gamma_bar * (a + b * k**2)
        state = spectrum.PolaritonState(np.eye(6, dtype=complex)[0], w, 1.0)
        samples.append(spectrum.DispersionSample(k / p.l_abs, w, state))
    return spectrum.DispersionBranch(tuple(samples), p)


def test_fit_recovers_quadratic(fig2):
    branch = synthetic_branch(fig2, np.linspace(-1, 1, 401), 0.003, -1.75)
    coef, rms = oracle.fit_quadratic_dispersion(branch)
    assert coef == pytest.approx(-1.75, abs=1e-12)
    assert rms < 1e-14


def test_fit_needs_samples(fig2):
    branch = synthetic_branch(fig2, np.linspace(-1, 1, 21), 0.0, -2.0)
    with pytest.raises(InsufficientSamples):
        oracle.fit_quadratic_dispersion(branch, window=0.05)


def test_dark_state_residual(fig2):
    h = spectrum.build_heff(fig2)
    ref = spectrum.dark_state_coefficients(fig2)
    assert oracle.eigen_residual(h, (0.0, ref)) <= 1e-14
    state = spectrum.dark_state(fig2)
    assert oracle.eigen_residual(h, (state.eigenvalue, state)) <= 1e-14


def test_residual_grows_linearly_with_perturbation(fig2):
    h = spectrum.build_heff(fig2)
    ref = spectrum.dark_state_coefficients(fig2)
    ref = ref / np.linalg.norm(ref)
    kick = np.eye(6)[spectrum.P_PLUS]
    r = [oracle.eigen_residual(h, (0.0, ref + eps * kick)) for eps in (1e-3, 2e-3, 4e-3)]
    assert r[1] / r[0] == pytest.approx(2.0, rel=1e-2)
    assert r[2] / r[1] == pytest.approx(2.0, rel=1e-2)


def test_observed_order_is_four():
    p = params.canonical(omega_c=0.7, delta=0.3)
    order = oracle.observed_order(p, MediumSpec(3.0), steps=20)
    assert order == pytest.approx(4.0, abs=0.1)


def test_shooting_baseline(fig3):
    p, med = fig3
    res = oracle.shoot_scatter(p, med.without_impurity())
    assert res.T == pytest.approx(0.4, abs=1e-9)
    assert res.R == pytest.approx(0.6, abs=1e-9)


def test_shooting_two_level():
    res = oracle.shoot_scatter(params.canonical(omega_c=0.0), MediumSpec(3.0))
    assert res.T == pytest.approx(math.exp(-3), abs=1e-9)


def test_shooting_rejects_coarse_steps():
    p = params.canonical(omega_c=0.7, delta=0.3)
    with pytest.raises(StepCountInsufficient):
        oracle.shoot_scatter(p, MediumSpec(3.0), oracle.ShootingConfig(step_count=4))
    with pytest.raises(ValueError):
        oracle.ShootingConfig(step_count=1)


def test_shooting_agrees_with_transfer_matrix(fig2):
    med = MediumSpec(2.0, Impurity(0.7, InteractionModel.from_c6(0.05)))
    a = scattering.scatter(fig2, med)
    b = oracle.shoot_until_accepted(fig2, med)
    assert abs(a.T - b.T) < 1e-6 and abs(a.R - b.R) < 1e-6
