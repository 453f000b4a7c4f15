"""Model parameters, unit conventions and the 87Rb preset.

Every frequency-like symbol (decay rate, Rabi frequencies, detunings,
collective coupling) is an angular frequency.  Two unit systems are used:

* ``"si"``: frequencies in rad/s, lengths in metres.
* ``"gamma"`` (canonical): frequencies in units of the intermediate-state
  decay rate, lengths in units of the absorption length ``l_abs``.  In this
  system ``gamma == 1`` and ``light_speed == big_g**2 / gamma_bar``.

Observables depend only on the dimensionless ratios, so the numerical
modules convert to canonical units with :func:`to_dimensionless` on entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, Mapping

from scipy import constants

from .errors import ParameterError, Violation

SPEED_OF_LIGHT = constants.c  # m/s
MICROMETRE = 1e-6

FREQUENCY_FIELDS = ("gamma", "omega_c", "omega_s", "delta", "delta_s", "big_g")
PARAM_FIELDS = FREQUENCY_FIELDS + ("light_speed",)


def _violations(values: Mapping[str, float]) -> list[Violation]:
    found = []
    for name in PARAM_FIELDS:
        if name in values and not math.isfinite(values[name]):
            found.append(Violation("NonFinite", name))
    for name in ("gamma", "light_speed", "big_g"):
        v = values.get(name)
        if v is not None and math.isfinite(v) and v <= 0:
            found.append(Violation("NonPositive", name))
    for name in ("omega_c", "omega_s"):
        v = values.get(name)
        if v is not None and math.isfinite(v) and v < 0:
            found.append(Violation("NegativeRabi", name))
    return found


@dataclass(frozen=True)
class ModelParams:
    """Couplings, detunings and decay of the dual-V + Rydberg scheme.

    Instances are validated on construction and immutable afterwards.

    Parameters
    ----------
    gamma : float
        Decay rate of the intermediate states.
    omega_c : float
        Control-field Rabi frequency (both counter-propagating beams).
    omega_s : float
        Rabi frequency of the meta-stable to Rydberg coupling.
    delta : float
        Two-photon detuning.
    delta_s : float
        Detuning of the Rydberg coupling field.
    big_g : float
        Collective probe coupling ``g * sqrt(density)``.
    light_speed : float
        Speed of light in the chosen length/time units.
    """

    gamma: float
    omega_c: float
    omega_s: float
    delta: float
    delta_s: float
    big_g: float
    light_speed: float

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        problems = _violations({f.name: getattr(self, f.name) for f in fields(self)})
        if problems:
            raise ParameterError(problems)

    @property
    def gamma_bar(self) -> float:
        return self.gamma / 2

    @property
    def l_abs(self) -> float:
        """Absorption length ``c * gamma_bar / G**2``."""
        return self.light_speed * self.gamma_bar / self.big_g**2

    @property
    def delta_r(self) -> float:
        return self.delta + self.delta_s

    def optical_depth(self, length: float) -> float:
        return length / self.l_abs

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PARAM_FIELDS}


def validate(raw: Mapping[str, Any]) -> ModelParams:
    """Build :class:`ModelParams` from a plain mapping.

    Every problem is reported at once through :class:`ParameterError`.
    """
    problems = []
    values: dict[str, float] = {}
    for key in raw:
        if key not in PARAM_FIELDS:
            problems.append(Violation("Unknown", str(key)))
    for name in PARAM_FIELDS:
        if name not in raw:
            problems.append(Violation("Missing", name))
            continue
        try:
            values[name] = float(raw[name])
        except (TypeError, ValueError):
            problems.append(Violation("NotANumber", name))
    problems.extend(_violations(values))
    if problems:
        raise ParameterError(problems)
    return ModelParams(**values)


def scale_factors(p: ModelParams) -> tuple[float, float]:
    """Return ``(frequency_unit, length_unit) = (gamma, l_abs)`` of `p`."""
    return p.gamma, p.l_abs


def to_dimensionless(p: ModelParams) -> ModelParams:
    """Rescale `p` so that ``gamma == 1`` and ``l_abs == 1``.

    Frequencies are divided by ``gamma``; the speed of light becomes
    ``light_speed / (gamma * l_abs)``.  Applying it twice is a no-op.
    """
    freq, length = scale_factors(p)
    if freq == 1.0 and length == 1.0:
        return p
    scaled = {name: getattr(p, name) / freq for name in FREQUENCY_FIELDS}
    # equals light_speed / (gamma * l_abs), written so that l_abs == 1 exactly
    scaled["light_speed"] = scaled["big_g"] ** 2 / 0.5
    return ModelParams(**scaled)


def canonical(omega_c=1.0, omega_s=1.0, delta=None, delta_s=0.0, big_g=1.0) -> ModelParams:
    """Parameters in canonical units (gamma = 1, l_abs = 1).

    `delta` defaults to ``omega_s``, the stationary-polariton condition.
    """
    if delta is None:
        delta = omega_s
    gamma = 1.0
    return ModelParams(
        gamma=gamma,
        omega_c=omega_c,
        omega_s=omega_s,
        delta=delta,
        delta_s=delta_s,
        big_g=big_g,
        light_speed=big_g**2 / (gamma / 2),
    )


def big_g_for_optical_depth(optical_depth: float, length: float, gamma: float,
                            light_speed: float = SPEED_OF_LIGHT) -> float:
    """Collective coupling giving ``length / l_abs == optical_depth``."""
    return math.sqrt(optical_depth * light_speed * (gamma / 2) / length)


@dataclass(frozen=True)
class Rb87Preset:
    """Experimental scales for an implementation with 87Rb atoms.

    The van der Waals coefficient is not a model output: ``c6_ref_si`` is an
    approximate literature value for the 60S1/2 pair state, (2 pi) x 140
    GHz um^6, shipped so that quantum-number scans run out of the box.
    """

    gamma_si: float = 2 * math.pi * 6e6  # rad/s
    slab_length: float = 40 * MICROMETRE  # m
    optical_depth: float = 3.0
    density: float = 1.0  # atoms per um^3, documentation only
    n_ref: int = 60
    c6_ref_si: float = 2 * math.pi * 140e9 * MICROMETRE**6  # rad/s * m^6
    levels: Mapping[str, str] = field(default_factory=lambda: {
        "g": "5S1/2, F=1, mF=0",
        "d": "5S1/2, F=2, mF=0",
        "e+-": "5P3/2, F=1, mF=+-1",
        "r": "nS1/2, J=1/2, mJ=1/2",
    })

    @property
    def big_g_si(self) -> float:
        return big_g_for_optical_depth(self.optical_depth, self.slab_length, self.gamma_si)

    def model_params(self, omega_c=1.0, omega_s=1.0, delta=None, delta_s=0.0) -> ModelParams:
        """SI parameters; Rabi frequencies and detunings given in units of gamma."""
        if delta is None:
            delta = omega_s
        g = self.gamma_si
        return ModelParams(
            gamma=g,
            omega_c=omega_c * g,
            omega_s=omega_s * g,
            delta=delta * g,
            delta_s=delta_s * g,
            big_g=self.big_g_si,
            light_speed=SPEED_OF_LIGHT,
        )

    def medium(self, n: int | None = None, z0: float | None = None, impurity: bool = True):
        """Slab of the preset length (SI) with an impurity at `z0` (default mid-slab)."""
        from .scattering import Impurity, InteractionModel, MediumSpec

        if not impurity:
            return MediumSpec(length=self.slab_length)
        model = InteractionModel.from_quantum_number(
            self.n_ref if n is None else n, n_ref=self.n_ref, c6_ref=self.c6_ref_si
        )
        position = self.slab_length / 2 if z0 is None else z0
        return MediumSpec(length=self.slab_length, impurity=Impurity(position, model))


RB87 = Rb87Preset()

PRESETS = ("fig2", "fig3", "rb87")


def load_params(obj: Mapping[str, Any]) -> ModelParams:
    """Parse the JSON parameter schema.

    Either explicit keys ``gamma, omega_c, omega_s, delta, delta_s, big_g``
    with ``"units": "gamma" | "si"``, or ``{"preset": name, ...overrides}``.
    Preset overrides are read in units of gamma unless ``"units": "si"``.
    """
    obj = dict(obj)
    preset = obj.pop("preset", None)
    units = obj.pop("units", None)
    if units not in (None, "gamma", "si"):
        raise ParameterError([Violation("Unknown", f"units={units}")])

    if preset is None:
        units = units or "gamma"
        if units == "gamma":
            if "gamma" in obj and float(obj["gamma"]) != 1.0:
                raise ParameterError([Violation("Inconsistent", "gamma")])
            obj["gamma"] = 1.0
            if "big_g" in obj and "light_speed" not in obj:
                try:
                    obj["light_speed"] = float(obj["big_g"]) ** 2 / 0.5
                except (TypeError, ValueError):
                    pass
        else:
            obj.setdefault("light_speed", SPEED_OF_LIGHT)
        return validate(obj)

    if preset == "fig2":
        base = canonical()
    elif preset in ("fig3", "rb87"):
        base = RB87.model_params()
    else:
        raise ParameterError([Violation("Unknown", f"preset={preset}")])
    unknown = [k for k in obj if k not in PARAM_FIELDS]
    if unknown:
        raise ParameterError([Violation("Unknown", k) for k in unknown])
    merged = base.as_dict()
    if "omega_s" in obj and "delta" not in obj:
        # keep the preset on the stationary-polariton condition
        obj["delta"] = obj["omega_s"]
    for key, value in obj.items():
        value = float(value)
        if units != "si" and key in FREQUENCY_FIELDS and key != "gamma":
            value *= base.gamma
        merged[key] = value
    return validate(merged)
