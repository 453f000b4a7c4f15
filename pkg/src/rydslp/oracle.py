"""Brute-force cross-checks for the spectrum and scattering engines.

The shooting integrator shares only the propagation matrix with the
transfer-matrix engine: it integrates ``dE/dz = -i M(z) E`` with classical
fixed-step RK4 from two independent initial vectors, then applies the
boundary conditions through a dense linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InsufficientSamples, StepCountInsufficient
from .params import ModelParams, to_dimensionless
from .scattering import MediumSpec, ScatterResult, propagation_matrix, vdw_potential
from .spectrum import DispersionBranch, EffectiveHamiltonian


@dataclass(frozen=True)
class ShootingConfig:
    step_count: int = 4000
    tolerance: float = 1e-7

    def __post_init__(self):
        if self.step_count < 2:
            raise ValueError("step_count must be at least 2")


def _field_matrix(p: ModelParams, med: MediumSpec, z: np.ndarray) -> np.ndarray:
    if med.impurity is None:
        v = np.zeros_like(z)
    else:
        v = np.asarray(vdw_potential(med.impurity.interaction, z, med.impurity.position))
    return -1j * propagation_matrix(p, v)


def rk4_fundamental(p: ModelParams, med: MediumSpec, steps: int) -> np.ndarray:
    """Fundamental matrix at ``z = L`` (columns start from (1,0) and (0,1)).

    `p` and `med` must already be in consistent units.
    """
    h = med.length / steps
    z = np.linspace(0.0, med.length, 2 * steps + 1)
    a = _field_matrix(p, med, z)
    a_start, a_mid, a_end = a[0:-1:2], a[1::2], a[2::2]
    eye = np.eye(2, dtype=complex)
    # one RK4 step applied to the identity gives the step propagator
    k1 = a_start
    k2 = a_mid @ (eye + 0.5 * h * k1)
    k3 = a_mid @ (eye + 0.5 * h * k2)
    k4 = a_end @ (eye + h * k3)
    steps_ = eye + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return reduce(lambda acc, step: step @ acc, steps_, eye)


def _boundary_solve(phi: np.ndarray) -> tuple[complex, complex]:
    # unknowns (r, t): phi @ (1, r) = (t, 0)
    lhs = np.array([[phi[0, 1], -1.0], [phi[1, 1], 0.0]], dtype=complex)
    rhs = -phi[:, 0]
    r, t = np.linalg.solve(lhs, rhs)
    return complex(r), complex(t)


def shoot_scatter(p: ModelParams, med: MediumSpec, cfg: ShootingConfig = ShootingConfig()) -> ScatterResult:
    """Scatter by shooting with `cfg.step_count` and twice as many steps.

    The finer solution is returned.  The Richardson estimate
    ``|x_2N - x_N| / 15`` of its error in ``T`` and ``R`` must stay below
    `cfg.tolerance`.
    """
    pc = to_dimensionless(p)
    mc = med.scaled(p.gamma, p.l_abs)
    coarse = _boundary_solve(rk4_fundamental(pc, mc, cfg.step_count))
    fine = _boundary_solve(rk4_fundamental(pc, mc, 2 * cfg.step_count))
    estimate = max(abs(abs(f) - abs(c)) for f, c in zip(fine, coarse)) / 15
    if estimate > cfg.tolerance:
        raise StepCountInsufficient(
            f"Richardson error estimate {estimate:.2e} exceeds {cfg.tolerance:.1e} "
            f"at {cfg.step_count} steps"
        )
    r, t = fine
    return ScatterResult(t, r, True, 2 * cfg.step_count)


def shoot_until_accepted(p: ModelParams, med: MediumSpec, cfg: ShootingConfig = ShootingConfig(),
                         max_steps: int = 2**17) -> ScatterResult:
    """Repeat :func:`shoot_scatter`, doubling the step count until accepted."""
    steps = cfg.step_count
    while True:
        try:
            return shoot_scatter(p, med, ShootingConfig(steps, cfg.tolerance))
        except StepCountInsufficient:
            if 2 * steps > max_steps:
                raise
            steps *= 2


def observed_order(p: ModelParams, med: MediumSpec, steps: int = 50) -> float:
    """Empirical convergence order of the RK4 shooting in the transmitted amplitude."""
    pc = to_dimensionless(p)
    mc = med.scaled(p.gamma, p.l_abs)
    t = [_boundary_solve(rk4_fundamental(pc, mc, steps * 2**j))[1] for j in range(3)]
    return float(np.log2(abs(t[0] - t[1]) / abs(t[1] - t[2])))


def fit_quadratic_dispersion(branch: DispersionBranch, window: float = 0.05) -> tuple[float, float]:
    """Least-squares curvature of ``Im w / gamma_bar`` against ``kappa**2``.

    Fits ``Im w / gb = a + b kappa**2`` over ``|kappa| <= window``
    (``kappa = k l_abs``) and returns ``(b, rms residual)``.
    """
    kappa = branch.kappa
    mask = np.abs(kappa) <= window
    if mask.sum() < 10:
        raise InsufficientSamples(f"only {int(mask.sum())} samples within |kappa| <= {window}")
    x = kappa[mask] ** 2
    y = branch.omega_over_gamma_bar.imag[mask]
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return float(coef[1]), float(np.sqrt(np.mean(resid**2)))


def eigen_residual(h: EffectiveHamiltonian, pair) -> float:
    """``||H v - w v|| / ||H||_F`` for an ``(w, state-or-vector)`` pair."""
    w, vec = pair
    vec = getattr(vec, "amplitudes", vec)
    vec = np.asarray(vec, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return float(np.linalg.norm(h.matrix @ vec - w * vec) / np.linalg.norm(h.matrix))
