"""Steady-state probe scattering through a slab containing a Rydberg impurity.

The counter-propagating probe amplitudes obey ``i dE/dz = M(z) E`` with a
trace-free 2x2 propagation matrix built from the position-dependent
susceptibilities.  The slab is cut into slices, each slice is propagated
with a two-point Gauss-Legendre Magnus step (fourth order), and the
resulting total transfer matrix ``U`` solves the two-point boundary problem
``E+(0) = E0``, ``E-(L) = 0``.

All heavy lifting happens in canonical units (gamma = 1, l_abs = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import GridNotConverged, IllConditionedBVP, SingularDenominator
from .params import ModelParams, to_dimensionless

SINGULAR_TOL = 1e-14
ILL_CONDITIONED_TOL = 1e-10
_GAUSS = math.sqrt(3) / 6


@dataclass(frozen=True)
class InteractionModel:
    """Van der Waals coupling between the impurity and the Rydberg state.

    Either an explicit ``c6`` or a quantum number ``n`` with a reference
    ``(n_ref, c6_ref)``, scaled as ``c6_ref * (n / n_ref)**11``.  Magnitudes
    are positive; `sign` = -1 flips the shift downwards.
    """

    c6: float | None = None
    n: int | None = None
    n_ref: int | None = None
    c6_ref: float | None = None
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.c6 is not None:
            if self.n is not None:
                raise ValueError("give either c6 or a quantum number, not both")
            if not self.c6 > 0:
                raise ValueError("c6 magnitude must be positive")
            return
        if self.n is None or self.n_ref is None or self.c6_ref is None:
            raise ValueError("quantum-number model needs n, n_ref and c6_ref")
        for name in ("n", "n_ref"):
            value = getattr(self, name)
            if int(value) != value or value < 10:
                raise ValueError(f"{name} must be an integer >= 10")
        if not self.c6_ref > 0:
            raise ValueError("c6_ref must be positive")

    @classmethod
    def from_c6(cls, c6: float, sign: int = 1) -> "InteractionModel":
        return cls(c6=float(c6), sign=sign)

    @classmethod
    def from_quantum_number(cls, n: int, n_ref: int, c6_ref: float, sign: int = 1) -> "InteractionModel":
        return cls(n=int(n), n_ref=int(n_ref), c6_ref=float(c6_ref), sign=sign)

    @property
    def coefficient(self) -> float:
        """Signed C6."""
        if self.c6 is not None:
            return self.sign * self.c6
        return self.sign * self.c6_ref * (self.n / self.n_ref) ** 11

    def with_n(self, n: int) -> "InteractionModel":
        if self.n is None:
            raise ValueError("explicit-c6 model has no quantum number to change")
        return replace(self, n=int(n))

    def scaled(self, frequency_unit: float, length_unit: float) -> "InteractionModel":
        factor = frequency_unit * length_unit**6
        if self.c6 is not None:
            return replace(self, c6=self.c6 / factor)
        return replace(self, c6_ref=self.c6_ref / factor)


@dataclass(frozen=True)
class Impurity:
    position: float
    interaction: InteractionModel


@dataclass(frozen=True)
class GridPolicy:
    """Slicing of the slab.

    A uniform base grid is merged with geometrically graded nodes around the
    impurity (widths ``floor * L * growth**j``).  Every refinement bisects
    all slices; refinement stops when the transfer matrix changes by less
    than `tolerance`.
    """

    base_slices: int = 64
    max_refinements: int = 12
    floor: float = 1e-6
    growth: float = 2.0
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.base_slices < 1 or self.max_refinements < 1:
            raise ValueError("base_slices and max_refinements must be >= 1")
        if not (0 < self.floor < 1) or self.growth <= 1:
            raise ValueError("need 0 < floor < 1 and growth > 1")


@dataclass(frozen=True)
class MediumSpec:
    """Slab ``[0, length]`` in the length unit of the accompanying params."""

    length: float
    impurity: Impurity | None = None
    grid: GridPolicy = field(default_factory=GridPolicy)

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("medium length must be positive")
        if self.impurity is not None and not 0 <= self.impurity.position <= self.length:
            raise ValueError("impurity position must lie inside [0, length]")

    def without_impurity(self) -> "MediumSpec":
        return replace(self, impurity=None)

    def with_n(self, n: int) -> "MediumSpec":
        if self.impurity is None:
            raise ValueError("medium has no impurity")
        imp = replace(self.impurity, interaction=self.impurity.interaction.with_n(n))
        return replace(self, impurity=imp)

    def scaled(self, frequency_unit: float, length_unit: float) -> "MediumSpec":
        imp = self.impurity
        if imp is not None:
            imp = Impurity(imp.position / length_unit, imp.interaction.scaled(frequency_unit, length_unit))
        return replace(self, length=self.length / length_unit, impurity=imp)


@dataclass(frozen=True)
class SusceptibilityPair:
    chi_pp: complex | np.ndarray
    chi_pm: complex | np.ndarray


@dataclass(frozen=True)
class Transfer:
    matrix: np.ndarray
    converged: bool
    slices: int
    change: float
    nodes: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ScatterResult:
    """Boundary amplitudes for unit incident field and derived coefficients.

    ``T = |t_amp|``, ``R = |r_amp|`` and ``A = 1 - T - R`` follow the amplitude
    convention; the ``*_intensity`` properties give the squared counterparts.
    """

    t_amp: complex
    r_amp: complex
    converged: bool = True
    slices: int = 1
    profile: tuple[np.ndarray, np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @property
    def T(self) -> float:
        return abs(self.t_amp)

    @property
    def R(self) -> float:
        return abs(self.r_amp)

    @property
    def A(self) -> float:
        return 1.0 - self.T - self.R

    @property
    def T_intensity(self) -> float:
        return self.T**2

    @property
    def R_intensity(self) -> float:
        return self.R**2

    @property
    def A_intensity(self) -> float:
        return 1.0 - self.T_intensity - self.R_intensity


def vdw_potential(m: InteractionModel, z, z0: float):
    """Level shift ``C6 / (z - z0)**6``; infinite (with the sign of C6) at ``z = z0``."""
    c6 = m.coefficient
    r6 = (np.asarray(z, dtype=float) - z0) ** 6
    with np.errstate(divide="ignore"):
        v = np.where(r6 == 0, math.copysign(math.inf, c6), c6 / np.where(r6 == 0, 1.0, r6))
    return v if v.ndim else float(v)


def susceptibilities(p: ModelParams, v) -> SusceptibilityPair:
    """Position-dependent susceptibilities for Rydberg level shift `v`.

    ``chi_pp = (-i G^2 / c gb) [x(gb d - i Oc^2) + gb Os^2] / [x(gb d - 2i Oc^2) + gb Os^2]``
    and ``chi_pm = (G^2 / c gb) x Oc^2 / [same]`` with ``x = v - delta_r``.
    Accepts scalars or arrays; ``v = +/-inf`` gives the saturated limits.
    Returned in inverse length units of `p`.
    """
    gam = p.gamma
    gb = p.gamma_bar / gam
    d = p.delta / gam
    oc2 = (p.omega_c / gam) ** 2
    os2 = (p.omega_s / gam) ** 2
    prefactor = 1.0 / p.l_abs  # G^2 / (c gamma_bar)
    v = np.asarray(v, dtype=float) / gam
    scalar = v.ndim == 0

    if oc2 == 0.0:
        # the probe decouples from D and S: two-level response for any shift
        chi_pp = np.full(v.shape, -1j * prefactor)
        chi_pm = np.zeros(v.shape, dtype=complex)
    else:
        x = v - p.delta_r / gam
        big = np.abs(x) > 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(big, 1.0 / np.where(big, x, 1.0), 0.0)
        xs = np.where(big, 0.0, x)
        a1 = gb * d - 1j * oc2
        a2 = gb * d - 2j * oc2
        b = gb * os2
        # divide numerator and denominator by x when |x| > 1 to keep V -> inf finite
        num = np.where(big, a1 + b * w, xs * a1 + b)
        den = np.where(big, a2 + b * w, xs * a2 + b)
        pm_num = np.where(big, oc2, xs * oc2)
        if np.any(np.abs(den) < SINGULAR_TOL):
            raise SingularDenominator("susceptibility denominator vanishes for these parameters")
        chi_pp = -1j * prefactor * num / den
        chi_pm = prefactor * pm_num / den
    if scalar:
        return SusceptibilityPair(complex(chi_pp), complex(chi_pm))
    return SusceptibilityPair(chi_pp, chi_pm)


def propagation_matrix(p: ModelParams, v) -> np.ndarray:
    """``[[chi_pp, chi_pm], [-chi_pm, -chi_pp]]``, stacked over the shape of `v`."""
    chi = susceptibilities(p, v)
    a = np.asarray(chi.chi_pp, dtype=complex)
    b = np.asarray(chi.chi_pm, dtype=complex)
    return np.stack([np.stack([a, b], -1), np.stack([-b, -a], -1)], -2)


def slab_transfer(m, dz) -> np.ndarray:
    """``exp(-i m dz)`` for (stacks of) 2x2 matrices held constant over `dz`.

    For trace-free ``B = -i m dz`` one has ``B^2 = mu^2 I`` and
    ``exp(B) = cosh(mu) I + sinh(mu)/mu B``; both factors are even in ``mu``
    and are evaluated by series when ``mu^2`` is small, so nilpotent `m`
    gives ``I - i m dz`` exactly.
    """
    m = np.asarray(m, dtype=complex)
    dz = np.asarray(dz, dtype=float)
    if np.any(dz < 0):
        raise ValueError("slice width must be non-negative")
    dz = dz[..., None, None]
    half_trace = 0.5 * (m[..., 0, 0] + m[..., 1, 1])
    eye = np.eye(2, dtype=complex)
    b = -1j * (m - half_trace[..., None, None] * eye) * dz
    mu2 = b[..., 0, 0] ** 2 + b[..., 0, 1] * b[..., 1, 0]
    small = np.abs(mu2) < 1e-3
    mu = np.sqrt(np.where(small, 1.0, mu2))
    series_c = 1 + mu2 / 2 + mu2**2 / 24 + mu2**3 / 720 + mu2**4 / 40320
    series_s = 1 + mu2 / 6 + mu2**2 / 120 + mu2**3 / 5040 + mu2**4 / 362880
    cosh = np.where(small, series_c, np.cosh(mu))
    sinhc = np.where(small, series_s, np.sinh(mu) / mu)
    phase = np.exp(-1j * half_trace * dz[..., 0, 0])
    out = cosh[..., None, None] * eye + sinhc[..., None, None] * b
    return phase[..., None, None] * out


def ordered_product(mats: np.ndarray) -> np.ndarray:
    """``mats[-1] @ ... @ mats[0]`` by pairwise reduction."""
    mats = np.asarray(mats)
    if len(mats) == 0:
        return np.eye(2, dtype=complex)
    while len(mats) > 1:
        if len(mats) % 2:
            mats = np.concatenate([mats, np.eye(2, dtype=mats.dtype)[None]], axis=0)
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


def base_nodes(med: MediumSpec) -> np.ndarray:
    grid, length = med.grid, med.length
    nodes = [np.linspace(0.0, length, grid.base_slices + 1)]
    if med.impurity is not None:
        z0 = med.impurity.position
        width = length / grid.base_slices
        offsets = []
        step = grid.floor * length
        while step < width:
            offsets.append(step)
            step *= grid.growth
        offsets = np.array(offsets)
        nodes.append(np.array([z0]))
        nodes.append(z0 + offsets)
        nodes.append(z0 - offsets)
    z = np.concatenate(nodes)
    z = np.unique(z[(z >= 0) & (z <= length)])
    keep = np.concatenate([[True], np.diff(z) > 1e-14 * length])
    z = z[keep]
    z[-1] = length
    return z


def _refine(nodes: np.ndarray, level: int) -> np.ndarray:
    if level == 0:
        return nodes
    parts = 2**level
    frac = np.arange(parts) / parts
    left, width = nodes[:-1], np.diff(nodes)
    inner = (left[:, None] + width[:, None] * frac[None, :]).ravel()
    return np.append(inner, nodes[-1])


def _potential(med: MediumSpec, z: np.ndarray) -> np.ndarray:
    if med.impurity is None:
        return np.zeros_like(z)
    return np.asarray(vdw_potential(med.impurity.interaction, z, med.impurity.position))


def slice_transfers(p: ModelParams, med: MediumSpec, nodes: np.ndarray) -> np.ndarray:
    """Per-slice transfer matrices, fourth-order Magnus with two Gauss points."""
    h = np.diff(nodes)
    z1 = nodes[:-1] + (0.5 - _GAUSS) * h
    z2 = nodes[:-1] + (0.5 + _GAUSS) * h
    m1 = propagation_matrix(p, _potential(med, z1))
    m2 = propagation_matrix(p, _potential(med, z2))
    commutator = m2 @ m1 - m1 @ m2
    m_eff = 0.5 * (m1 + m2) - 1j * (math.sqrt(3) / 12) * h[:, None, None] * commutator
    return slab_transfer(m_eff, h)


def transfer_through_medium(p: ModelParams, med: MediumSpec, strict: bool = True) -> Transfer:
    """Total transfer matrix ``U`` with ``E(L) = U E(0)``.

    Slices are bisected until the max-entry change of ``U`` drops below the
    grid tolerance.  Raises :class:`GridNotConverged` when the refinement cap
    is reached (or reports ``converged=False`` with ``strict=False``).
    """
    pc = to_dimensionless(p)
    mc = med.scaled(p.gamma, p.l_abs)
    nodes0 = base_nodes(mc)
    if mc.impurity is None:
        # constant coefficients: one exact exponential per slice
        nodes = nodes0
        u = ordered_product(slab_transfer(propagation_matrix(pc, np.zeros(len(nodes) - 1)), np.diff(nodes)))
        return Transfer(u, True, len(nodes) - 1, 0.0, nodes * p.l_abs)

    tol = mc.grid.tolerance
    prev = ordered_product(slice_transfers(pc, mc, nodes0))
    change = math.inf
    for level in range(1, mc.grid.max_refinements + 1):
        nodes = _refine(nodes0, level)
        u = ordered_product(slice_transfers(pc, mc, nodes))
        change = float(np.max(np.abs(u - prev)) / max(1.0, np.max(np.abs(u))))
        if change < tol:
            return Transfer(u, True, len(nodes) - 1, change, nodes * p.l_abs)
        prev = u
    if strict:
        raise GridNotConverged(f"transfer matrix still changing by {change:.2e} after "
                               f"{mc.grid.max_refinements} refinements")
    return Transfer(u, False, len(nodes) - 1, change, nodes * p.l_abs)


def solve_boundary(u: np.ndarray) -> tuple[complex, complex]:
    """Reflected and transmitted amplitudes for ``E+(0) = 1``, ``E-(L) = 0``."""
    if abs(u[1, 1]) < ILL_CONDITIONED_TOL * np.linalg.norm(u):
        raise IllConditionedBVP("|U22| is negligible: medium is at a transmission resonance")
    r = -u[1, 0] / u[1, 1]
    t = u[0, 0] + u[0, 1] * r
    return complex(r), complex(t)


def _profile(p: ModelParams, med: MediumSpec, nodes: np.ndarray, r: complex):
    pc = to_dimensionless(p)
    mc = med.scaled(p.gamma, p.l_abs)
    mats = slice_transfers(pc, mc, nodes / p.l_abs)
    fields_ = np.empty((len(nodes), 2), dtype=complex)
    fields_[0] = (1.0, r)
    for i, m in enumerate(mats):
        fields_[i + 1] = m @ fields_[i]
    return nodes, fields_[:, 0], fields_[:, 1]


def scatter(p: ModelParams, med: MediumSpec, profile: bool = False, strict: bool = True) -> ScatterResult:
    """Transmission and reflection of a probe incident from ``z = 0``."""
    tr = transfer_through_medium(p, med, strict=strict)
    r, t = solve_boundary(tr.matrix)
    prof = _profile(p, med, tr.nodes, r) if profile else None
    return ScatterResult(t, r, tr.converged, tr.slices, prof)


@dataclass(frozen=True)
class ScanRow:
    value: float
    result: ScatterResult


@dataclass(frozen=True)
class ScanTable:
    variable: str
    rows: tuple[ScanRow, ...]
    baseline: ScatterResult

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.rows])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r.result, name) for r in self.rows])

    def absorption_non_decreasing(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.diff(self.column("A")) >= -tol))


def scan_quantum_number(p: ModelParams, med: MediumSpec, n_grid: Sequence[int]) -> ScanTable:
    """T, R, A versus the impurity's principal quantum number."""
    if med.impurity is None or med.impurity.interaction.n is None:
        raise ValueError("quantum-number scan needs an impurity with a quantum-number model")
    rows = tuple(ScanRow(float(n), scatter(p, med.with_n(n), strict=False)) for n in n_grid)
    return ScanTable("n", rows, scatter(p, med.without_impurity()))


def scan_ratio(p: ModelParams, med: MediumSpec, ratio_grid: Sequence[float], n: int | None = None) -> ScanTable:
    """T, R, A versus ``omega_c / omega_s`` at fixed ``omega_s``, with ``delta = omega_s``."""
    if p.omega_s <= 0:
        raise ValueError("ratio scan needs omega_s > 0")
    if med.impurity is None:
        raise ValueError("ratio scan needs an impurity")
    if n is not None:
        med = med.with_n(n)
    pinned = p.replace(delta=p.omega_s)
    rows = tuple(
        ScanRow(float(r), scatter(pinned.replace(omega_c=r * p.omega_s), med, strict=False))
        for r in ratio_grid
    )
    reference = pinned if pinned.omega_c > 0 else pinned.replace(omega_c=pinned.omega_s)
    return ScanTable("omega_c/omega_s", rows, scatter(reference, med.without_impurity()))


def medium_from_dict(obj, length_unit: float = 1.0, frequency_unit: float = 1.0) -> MediumSpec:
    """Parse ``{"length", "z0", "interaction", "grid"}``.

    JSON lengths are multiplied by `length_unit` and C6 values by
    ``frequency_unit * length_unit**6`` to land in the params' units.
    """
    obj = dict(obj)
    length = float(obj["length"]) * length_unit
    grid = GridPolicy(**obj.get("grid", {}))
    inter = obj.get("interaction")
    if inter is None:
        return MediumSpec(length, None, grid)
    c6_unit = frequency_unit * length_unit**6
    sign = int(inter.get("sign", 1))
    kind = inter.get("type")
    if kind == "c6":
        model = InteractionModel.from_c6(float(inter["c6"]) * c6_unit, sign)
    elif kind == "n":
        model = InteractionModel.from_quantum_number(
            inter["n"], inter["n_ref"], float(inter["c6_ref"]) * c6_unit, sign
        )
    else:
        raise ValueError(f"unknown interaction type {kind!r}")
    z0 = obj.get("z0")
    z0 = length / 2 if z0 is None else float(z0) * length_unit
    return MediumSpec(length, Impurity(z0, model), grid)
