"""Named verification checks run by ``rydslp verify``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import oracle, scattering, spectrum
from .errors import EmptySuite
from .params import RB87, ModelParams, canonical

DEFAULT_SEED = 20210705


@dataclass(frozen=True)
class CheckResult:
    test_name: str
    observed: float
    expected: float
    tolerance: float
    passed: bool

    @property
    def max_error(self) -> float:
        return abs(self.observed - self.expected)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        out["max_error"] = self.max_error
        return out


def within(name: str, observed: float, expected: float, tolerance: float) -> CheckResult:
    ok = bool(abs(observed - expected) <= tolerance)
    return CheckResult(name, float(observed), float(expected), float(tolerance), ok)


def at_most(name: str, observed: float, bound: float) -> CheckResult:
    return CheckResult(name, float(observed), 0.0, float(bound), bool(observed <= bound))


def at_least(name: str, observed: float, bound: float) -> CheckResult:
    # expected is the bound; tolerance 0 marks a one-sided check
    return CheckResult(name, float(observed), float(bound), 0.0, bool(observed > bound))


def summarize(results: list[CheckResult]) -> dict:
    if not results:
        raise EmptySuite("no checks were run")
    return {
        "overall_pass": all(r.passed for r in results),
        "results": [r.as_dict() for r in results],
    }


def fig3_setup(omega_c: float = 1.0, omega_s: float = 1.0, n: int = 60):
    """87Rb slab (40 um, OD 3) with the impurity mid-slab, in SI units."""
    return RB87.model_params(omega_c=omega_c, omega_s=omega_s), RB87.medium(n=n)


def random_draw(rng: np.random.Generator) -> tuple[ModelParams, scattering.MediumSpec]:
    """Random canonical parameters and impurity medium for oracle comparisons."""
    omega_s = rng.uniform(0.2, 5.0)
    p = canonical(
        omega_c=rng.uniform(0.1, 5.0),
        omega_s=omega_s,
        delta=omega_s * rng.choice([-1.0, 1.0]),
        big_g=rng.uniform(0.2, 5.0),
    )
    length = rng.uniform(0.5, 5.0)
    z0 = length * rng.uniform(0.1, 0.9)
    c6 = 10 ** rng.uniform(-6, 2)
    med = scattering.MediumSpec(length, scattering.Impurity(z0, scattering.InteractionModel.from_c6(c6)))
    return p, med


def check_dark_state(rng: np.random.Generator, draws: int = 50) -> list[CheckResult]:
    worst_w = worst_deficit = worst_p = 0.0
    for _ in range(draws):
        # uniform on (0, 10]
        oc, os_, g = 10.0 * (1.0 - rng.random(3))
        p = canonical(omega_c=oc, omega_s=os_, big_g=g)
        st = spectrum.dark_state(p)
        ref = spectrum.dark_state_coefficients(p)
        ref = ref / np.linalg.norm(ref)
        worst_w = max(worst_w, abs(st.eigenvalue) / p.gamma)
        worst_deficit = max(worst_deficit, 1 - st.overlap(ref))
        worst_p = max(worst_p, abs(st.amplitudes[spectrum.P_PLUS]), abs(st.amplitudes[spectrum.P_MINUS]))
    return [
        at_most("dark_state.eigenvalue_modulus", worst_w, 1e-10),
        at_most("dark_state.overlap_deficit", worst_deficit, 1e-10),
        at_most("dark_state.intermediate_amplitude", worst_p, 1e-10),
    ]


def check_dispersion() -> list[CheckResult]:
    coefs = []
    for os_ in (0.5, 1.0, 2.0):
        branch = spectrum.dispersion_scan(canonical(omega_s=os_), spectrum.kappa_grid())
        coefs.append(oracle.fit_quadratic_dispersion(branch, 0.05)[0])
    main = coefs[1]
    spread = (max(coefs) - min(coefs)) / abs(main)
    return [
        within("dispersion.curvature", main, -2.0, 0.02),
        at_most("dispersion.curvature_spread_over_omega_s", spread, 1e-3),
    ]


def check_population() -> list[CheckResult]:
    p = canonical()
    pops = dict(spectrum.intermediate_population(p, [1.0, -1.0, 0.0, 0.5, -0.5, 2.0, -2.0]))
    return [
        at_most("population.zero_at_plus_one", pops[1.0], 1e-10),
        at_most("population.zero_at_minus_one", pops[-1.0], 1e-10),
        at_least("population.min_off_resonance", min(pops[r] for r in (0.0, 0.5, -0.5, 2.0, -2.0)), 1e-3),
    ]


def check_baseline() -> list[CheckResult]:
    p, med = fig3_setup()
    med = med.without_impurity()
    res = scattering.scatter(p, med)
    shot = oracle.shoot_scatter(p, med)
    return [
        within("baseline.T", res.T, 0.4, 1e-6),
        within("baseline.R", res.R, 0.6, 1e-6),
        within("baseline.A", res.A, 0.0, 1e-6),
        within("baseline.T_shooting", shot.T, 0.4, 1e-6),
        within("baseline.R_shooting", shot.R, 0.6, 1e-6),
    ]


def check_two_level() -> list[CheckResult]:
    p, med = fig3_setup(omega_c=0.0)
    res = scattering.scatter(p, med.without_impurity())
    return [
        within("two_level.T", res.T, math.exp(-3), 1e-6),
        at_most("two_level.R", res.R, 1e-10),
    ]


def check_oracle(rng: np.random.Generator, draws: int = 100) -> list[CheckResult]:
    d_t = d_r = d_det = 0.0
    for _ in range(draws):
        p, med = random_draw(rng)
        res = scattering.scatter(p, med)
        shot = oracle.shoot_until_accepted(p, med)
        u = scattering.transfer_through_medium(p, med).matrix
        d_t = max(d_t, abs(res.T - shot.T))
        d_r = max(d_r, abs(res.R - shot.R))
        d_det = max(d_det, abs(np.linalg.det(u) - 1))
    return [
        at_most("oracle.max_delta_T", d_t, 1e-6),
        at_most("oracle.max_delta_R", d_r, 1e-6),
        at_most("oracle.max_det_error", d_det, 1e-9),
    ]


def check_trends() -> list[CheckResult]:
    p, med = fig3_setup()
    upper = scattering.scan_quantum_number(p, med, range(40, 101, 10))
    step = float(np.min(np.diff(upper.column("A"))))
    lower = scattering.scan_ratio(p, med, [20.0], n=60)
    res = lower.rows[0].result
    small = scattering.scatter(*fig3_setup(omega_c=0.5, omega_s=0.5))
    large = scattering.scatter(*fig3_setup(omega_c=2.0, omega_s=2.0))
    return [
        at_least("trend.A_vs_n_min_increment", step, 0.0),
        at_most("trend.A_at_ratio_20", res.A, 0.05),
        within("trend.T_rel_at_ratio_20", res.T / 0.4, 1.0, 0.02),
        within("trend.R_rel_at_ratio_20", res.R / 0.6, 1.0, 0.02),
        at_least("trend.A_small_minus_large_omega_s", small.A - large.A, 0.0),
    ]


def multiset_distance(a: np.ndarray, b: np.ndarray) -> float:
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def check_symmetries() -> list[CheckResult]:
    p, med = fig3_setup()
    med = med.without_impurity()
    plus = scattering.scatter(p, med)
    minus = scattering.scatter(p.replace(delta=-p.omega_s), med)
    sign_gap = max(abs(plus.T - minus.T), abs(plus.R - minus.R), abs(plus.A - minus.A))
    worst = 0.0
    q = canonical(omega_c=1.3, omega_s=0.7, delta=0.4, delta_s=0.2)
    for k in (0.01, 0.3, 1.0, 2.5):
        h_plus = spectrum.build_heff(q, k)
        h_minus = spectrum.build_heff(q, -k)
        gap = multiset_distance(np.linalg.eigvals(h_plus.matrix), np.linalg.eigvals(h_minus.matrix))
        worst = max(worst, gap / h_plus.frobenius_norm)
    return [
        at_most("symmetry.delta_sign", sign_gap, 1e-10),
        at_most("symmetry.k_mirror_spectrum", worst, 1e-10),
    ]


def check_dressed() -> list[CheckResult]:
    p = canonical(omega_s=1.0, delta=0.0, delta_s=20.0)
    state, deficit = spectrum.dressed_dark_state(p)
    ratio = p.omega_s / p.delta_s
    n_dressed = math.sqrt(p.big_g**2 * (1 + ratio**2) + 2 * p.omega_c**2)
    expected = ratio * p.big_g / n_dressed
    return [
        at_most("dressed.overlap_deficit", deficit, ratio**2),
        within("dressed.rydberg_amplitude_rel", abs(state.amplitudes[spectrum.S]) / expected, 1.0, 0.1),
    ]


def run_all(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    results += check_dark_state(rng)
    results += check_dispersion()
    results += check_population()
    results += check_baseline()
    results += check_two_level()
    results += check_oracle(rng)
    results += check_trends()
    results += check_symmetries()
    results += check_dressed()
    return results
