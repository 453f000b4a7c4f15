import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydslp import params, scattering
from rydslp.errors import ParameterError
from rydslp.params import ModelParams, to_dimensionless, validate

UNIT = dict(gamma=1, omega_c=1, omega_s=1, delta=1, delta_s=0, big_g=1, light_speed=1)


def test_validate_derived_accessors():
    p = validate(UNIT)
    assert p.gamma_bar == 0.5
    assert p.l_abs == 0.5
    assert p.delta_r == 1.0


def test_validate_reports_every_violation():
    raw = dict(UNIT, gamma=0, big_g=-1, omega_s=-2)
    with pytest.raises(ParameterError) as info:
        validate(raw)
    found = {str(v) for v in info.value.violations}
    assert found == {"NonPositive(gamma)", "NonPositive(big_g)", "NegativeRabi(omega_s)"}


def test_validate_missing_and_unknown():
    raw = dict(UNIT)
    del raw["light_speed"]
    raw["colour"] = 3
    with pytest.raises(ParameterError) as info:
        validate(raw)
    assert {str(v) for v in info.value.violations} == {"Missing(light_speed)", "Unknown(colour)"}


def test_detunings_may_be_negative():
    p = validate(dict(UNIT, delta=-3, delta_s=-1))
    assert p.delta_r == -4


def test_params_are_immutable():
    p = validate(UNIT)
    with pytest.raises(AttributeError):
        p.gamma = 2


def test_rb87_preset():
    p = params.RB87.model_params()
    assert p.gamma == pytest.approx(2 * math.pi * 6e6, rel=1e-15)
    assert p.big_g**2 == pytest.approx(3 * params.SPEED_OF_LIGHT * p.gamma_bar / 40e-6, rel=1e-12)
    assert p.optical_depth(params.RB87.slab_length) == pytest.approx(3.0, rel=1e-12)


def test_rb87_dimensionless():
    p = to_dimensionless(params.RB87.model_params(omega_c=2.0, omega_s=0.5))
    assert p.gamma == 1.0
    assert p.l_abs == pytest.approx(1.0, rel=1e-14)
    assert p.omega_c == pytest.approx(2.0, rel=1e-14)
    assert p.omega_s == p.delta == pytest.approx(0.5, rel=1e-14)


def test_to_dimensionless_idempotent():
    p = params.canonical(omega_c=3.0, omega_s=0.2, delta=0.7)
    assert to_dimensionless(p) == p
    q = to_dimensionless(params.RB87.model_params())
    assert to_dimensionless(q) == q


def test_si_and_gamma_units_give_same_observable():
    # Omega_c = 2 pi * 6 MHz is one gamma; compare scattering in both unit systems
    si = params.RB87.model_params(omega_c=1.0)
    assert si.omega_c == pytest.approx(2 * math.pi * 6e6)
    can = to_dimensionless(si)
    assert can.omega_c == pytest.approx(1.0)
    med_si = params.RB87.medium()
    med_can = med_si.scaled(si.gamma, si.l_abs)
    a = scattering.scatter(si, med_si)
    b = scattering.scatter(can, med_can)
    assert (a.T, a.R) == pytest.approx((b.T, b.R), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(s=st.floats(0.01, 100.0))
def test_scale_invariance(s):
    base = params.canonical(omega_c=0.8, omega_s=1.3, big_g=1.1)
    med = scattering.MediumSpec(3.0, scattering.Impurity(1.2, scattering.InteractionModel.from_c6(0.05)))
    scaled = ModelParams(
        gamma=s * base.gamma, omega_c=s * base.omega_c, omega_s=s * base.omega_s,
        delta=s * base.delta, delta_s=s * base.delta_s, big_g=math.sqrt(s) * base.big_g,
        light_speed=base.light_speed,
    )
    # G^2 and gamma scale alike, so l_abs and all lengths are unchanged; C6 scales like V
    med_s = scattering.MediumSpec(3.0, scattering.Impurity(1.2, scattering.InteractionModel.from_c6(0.05 * s)))
    a = scattering.scatter(base, med)
    b = scattering.scatter(scaled, med_s)
    assert abs(a.T - b.T) < 1e-12 and abs(a.R - b.R) < 1e-12


def test_load_params_gamma_units():
    p = params.load_params({"omega_c": 2, "omega_s": 1, "delta": 1, "delta_s": 0, "big_g": 1.5, "units": "gamma"})
    assert p.gamma == 1.0 and p.l_abs == pytest.approx(1.0)


def test_load_params_preset_overrides_in_gamma():
    p = params.load_params({"preset": "rb87", "omega_s": 0.5})
    assert p.omega_s / p.gamma == pytest.approx(0.5)
    assert p.delta == p.omega_s


def test_load_params_rejects_unknown_preset():
    with pytest.raises(ParameterError):
        params.load_params({"preset": "fig9"})


def test_load_params_rejects_inconsistent_gamma():
    with pytest.raises(ParameterError):
        params.load_params({"gamma": 2, "omega_c": 1, "omega_s": 1, "delta": 1, "delta_s": 0, "big_g": 1})
