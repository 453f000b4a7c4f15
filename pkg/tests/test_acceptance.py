"""Acceptance criteria 1-10, each at its stated tolerance.

Every test appends one ``[PASS]``/``[FAIL]`` line that is printed in the
"acceptance criteria" section of the pytest summary.
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from rydslp import checks, cli, oracle, params, scattering, spectrum

SEED = checks.DEFAULT_SEED


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_dark_state():
    rng = np.random.default_rng(SEED)
    worst_w = worst_deficit = worst_p = 0.0
    for _ in range(50):
        oc, os_, g = 10.0 * (1.0 - rng.random(3))
        p = params.canonical(omega_c=oc, omega_s=os_, delta=os_, big_g=g)
        state = spectrum.dark_state(p)
        ref = np.array([oc, oc, -g, -g, 0, 0]) / math.sqrt(g**2 + 2 * oc**2)
        ref /= np.linalg.norm(ref)
        worst_w = max(worst_w, abs(state.eigenvalue) / p.gamma)
        worst_deficit = max(worst_deficit, 1 - state.overlap(ref))
        worst_p = max(worst_p, abs(state.amplitudes[spectrum.P_PLUS]), abs(state.amplitudes[spectrum.P_MINUS]))
    ok = worst_w <= 1e-10 and worst_deficit <= 1e-10 and worst_p <= 1e-10
    report(1, "dark state", ok,
           f"|w|/gamma={worst_w:.2e}, overlap deficit={worst_deficit:.2e}, |P+-|={worst_p:.2e}, bound 1e-10")


def test_criterion_02_dispersion_law():
    coefs = {}
    for os_ in (0.5, 1.0, 2.0):
        branch = spectrum.dispersion_scan(params.canonical(omega_s=os_), spectrum.kappa_grid())
        coefs[os_] = oracle.fit_quadratic_dispersion(branch, window=0.05)[0]
    main = coefs[1.0]
    rel = abs(main + 2.0) / 2.0
    spread = (max(coefs.values()) - min(coefs.values())) / abs(main)
    ok = rel <= 0.01 and spread <= 1e-3
    report(2, "dispersion law", ok,
           f"coefficient={main:.5f} vs -2 (rel err {rel:.2e} <= 1e-2), spread over omega_s={spread:.2e} <= 1e-3")


def test_criterion_03_population_zeros():
    p = params.canonical()
    pops = dict(spectrum.intermediate_population(p, [1.0, -1.0, 0.0, 0.5, -0.5, 2.0, -2.0]))
    zeros = max(pops[1.0], pops[-1.0])
    floor = min(pops[r] for r in (0.0, 0.5, -0.5, 2.0, -2.0))
    report(3, "population zeros", zeros <= 1e-10 and floor > 1e-3,
           f"at +-1: {zeros:.2e} <= 1e-10, elsewhere min {floor:.4f} > 1e-3")


def test_criterion_04_baseline():
    p = params.RB87.model_params()
    med = params.RB87.medium(impurity=False)
    assert p.optical_depth(med.length) == pytest.approx(3.0, rel=1e-12)
    res = scattering.scatter(p, med)
    shot = oracle.shoot_scatter(p, med, oracle.ShootingConfig(step_count=4000))
    errs = [abs(res.T - 0.4), abs(res.R - 0.6), abs(res.A), abs(shot.T - 0.4), abs(shot.R - 0.6)]
    report(4, "no-impurity baseline", max(errs) <= 1e-6,
           f"T={res.T:.9f}, R={res.R:.9f}, A={res.A:.1e}, shooting T={shot.T:.9f} R={shot.R:.9f}, "
           f"max err {max(errs):.1e} <= 1e-6")


def test_criterion_05_two_level():
    p = params.RB87.model_params(omega_c=0.0)
    res = scattering.scatter(p, params.RB87.medium(impurity=False))
    err = abs(res.T - math.exp(-3))
    report(5, "two-level limit", err <= 1e-6 and res.R <= 1e-10,
           f"T-e^-3={err:.1e} <= 1e-6, R={res.R:.1e} <= 1e-10")


def test_criterion_06_oracle_equivalence():
    rng = np.random.default_rng(SEED)
    d_t = d_r = d_det = 0.0
    for _ in range(100):
        p, med = checks.random_draw(rng)
        assert med.impurity is not None
        res = scattering.scatter(p, med)
        shot = oracle.shoot_until_accepted(p, med, oracle.ShootingConfig(step_count=4000))
        u = scattering.transfer_through_medium(p, med).matrix
        d_t = max(d_t, abs(res.T - shot.T))
        d_r = max(d_r, abs(res.R - shot.R))
        d_det = max(d_det, abs(np.linalg.det(u) - 1))
    ok = d_t <= 1e-6 and d_r <= 1e-6 and d_det <= 1e-9
    report(6, "oracle equivalence", ok,
           f"100 draws: max|dT|={d_t:.1e}, max|dR|={d_r:.1e} <= 1e-6, max|det U - 1|={d_det:.1e} <= 1e-9")


def test_criterion_07_fig3_trends():
    p, med = checks.fig3_setup()
    upper = scattering.scan_quantum_number(p, med, range(40, 101, 10))
    a_n = upper.column("A")
    monotone = bool(np.all(np.diff(a_n) >= 0))
    res = scattering.scan_ratio(p, med, [20.0], n=60).rows[0].result
    base = scattering.scatter(p, med.without_impurity())
    t_rel = abs(res.T / base.T - 1)
    r_rel = abs(res.R / base.R - 1)
    small = scattering.scatter(*checks.fig3_setup(omega_c=0.5, omega_s=0.5, n=60))
    large = scattering.scatter(*checks.fig3_setup(omega_c=2.0, omega_s=2.0, n=60))
    ok = monotone and res.A <= 0.05 and t_rel <= 0.02 and r_rel <= 0.02 and small.A > large.A
    report(7, "scattering trends", ok,
           f"A(n)={np.round(a_n, 3).tolist()} non-decreasing={monotone}; ratio 20: A={res.A:.1e}, "
           f"T,R rel dev {t_rel:.1e},{r_rel:.1e} <= 0.02; A(Os=0.5)={small.A:.3f} > A(Os=2)={large.A:.3f}")


def test_criterion_08_symmetries():
    p = params.RB87.model_params()
    med = params.RB87.medium(impurity=False)
    plus = scattering.scatter(p, med)
    minus = scattering.scatter(p.replace(delta=-p.omega_s), med)
    gap = max(abs(plus.T - minus.T), abs(plus.R - minus.R), abs(plus.A - minus.A))
    worst = 0.0
    for q in (params.canonical(), params.canonical(omega_c=1.3, omega_s=0.7, delta=0.4, delta_s=0.2)):
        for k in (0.01, 0.3, 1.0, 2.5):
            a = np.linalg.eigvals(spectrum.build_heff(q, k).matrix)
            b = np.linalg.eigvals(spectrum.build_heff(q, -k).matrix)
            worst = max(worst, checks.multiset_distance(a, b) / np.linalg.norm(a))
    report(8, "symmetries", gap <= 1e-10 and worst <= 1e-10,
           f"delta sign gap={gap:.1e} <= 1e-10, k-mirror eigenvalue distance={worst:.1e} <= 1e-10")


def test_criterion_09_dressed_dark_state():
    p = params.canonical(omega_c=1.0, omega_s=1.0, delta=0.0, delta_s=20.0, big_g=1.0)
    state, deficit = spectrum.dressed_dark_state(p)
    ratio = p.omega_s / p.delta_s
    expected = ratio * p.big_g / math.sqrt(p.big_g**2 * (1 + ratio**2) + 2 * p.omega_c**2)
    rel = abs(abs(state.amplitudes[spectrum.S]) / expected - 1)
    report(9, "dressed dark state", deficit <= ratio**2 and rel <= 0.1,
           f"overlap deficit={deficit:.2e} <= {ratio**2:.1e}, |S| rel dev={rel:.2e} <= 0.1")


def test_criterion_10_determinism(tmp_path):
    codes = [cli.main(["verify", "--output", str(tmp_path / d)]) for d in ("first", "second")]
    first = (tmp_path / "first" / "report.json").read_bytes()
    second = (tmp_path / "second" / "report.json").read_bytes()
    ok = first == second and codes == [0, 0]
    report(10, "determinism", ok, f"exit codes {codes}, report.json byte-identical={first == second}")
