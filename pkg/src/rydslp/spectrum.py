"""Momentum-space eigenanalysis of the effective non-Hermitian Hamiltonian.

Basis order throughout is ``(E+, E-, D, S, P+, P-)``: the two probe modes,
the meta-stable and Rydberg coherences, and the two intermediate-state
coherences.

Sign convention: the two-photon and Rydberg detunings enter the diagonal as
``-delta`` (D) and ``v - (delta + delta_s)`` (S).  With this choice the dark
state ``(Oc, Oc, -G, -G, 0, 0)`` sits at ``delta = +omega_s`` and a positive
level shift ``v`` of the Rydberg state enters as ``v - delta_r``, the same
combination that appears in the scattering susceptibilities.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import BranchAmbiguity, ConvergenceFailure, PreconditionViolated
from .params import ModelParams

E_PLUS, E_MINUS, D, S, P_PLUS, P_MINUS = range(6)
BASIS = ("E+", "E-", "D", "S", "P+", "P-")

RESIDUAL_TOL = 1e-10
AMBIGUITY_GAP = 1e-3
MIN_CONTINUITY = 0.9
CONDITION_TOL = 1e-12


@dataclass(frozen=True)
class EffectiveHamiltonian:
    matrix: np.ndarray
    k: float
    v_shift: float
    params: ModelParams

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


@dataclass(frozen=True)
class PolaritonState:
    """Unit-norm eigenvector with its eigenvalue.

    The global phase is fixed so the first non-negligible amplitude is real
    and positive.  `dark_overlap` is the squared overlap with the reference
    dark-state direction of the parameters the state was computed for.
    """

    amplitudes: np.ndarray
    eigenvalue: complex
    dark_overlap: float

    @property
    def intermediate_population(self) -> float:
        return float(abs(self.amplitudes[P_PLUS]) ** 2 + abs(self.amplitudes[P_MINUS]) ** 2)

    @property
    def probe_population(self) -> float:
        return float(abs(self.amplitudes[E_PLUS]) ** 2 + abs(self.amplitudes[E_MINUS]) ** 2)

    def overlap(self, other: "PolaritonState | np.ndarray") -> float:
        """Squared modulus of the inner product with another unit vector."""
        vec = other.amplitudes if isinstance(other, PolaritonState) else np.asarray(other)
        return float(abs(np.vdot(vec, self.amplitudes)) ** 2)


@dataclass(frozen=True)
class DispersionSample:
    k: float
    omega: complex
    state: PolaritonState


@dataclass(frozen=True)
class DispersionBranch:
    samples: tuple[DispersionSample, ...]
    params: ModelParams

    @property
    def k(self) -> np.ndarray:
        return np.array([s.k for s in self.samples])

    @property
    def omega(self) -> np.ndarray:
        return np.array([s.omega for s in self.samples])

    @property
    def kappa(self) -> np.ndarray:
        """Momenta in units of the inverse absorption length."""
        return self.k * self.params.l_abs

    @property
    def omega_over_gamma_bar(self) -> np.ndarray:
        return self.omega / self.params.gamma_bar

    @property
    def populations(self) -> np.ndarray:
        return np.array([s.state.intermediate_population for s in self.samples])

    @property
    def dark_overlaps(self) -> np.ndarray:
        return np.array([s.state.dark_overlap for s in self.samples])

    def continuity(self) -> np.ndarray:
        """Overlap moduli between consecutive eigenvectors."""
        vecs = [s.state.amplitudes for s in self.samples]
        return np.array([abs(np.vdot(a, b)) for a, b in zip(vecs, vecs[1:])])


def build_heff(p: ModelParams, k: float = 0.0, v: float = 0.0) -> EffectiveHamiltonian:
    """Effective Hamiltonian at photon momentum `k` with Rydberg level shift `v`."""
    c, g, oc, os_ = p.light_speed, p.big_g, p.omega_c, p.omega_s
    h = np.zeros((6, 6), dtype=complex)
    h[E_PLUS, E_PLUS] = c * k
    h[E_MINUS, E_MINUS] = -c * k
    h[E_PLUS, P_PLUS] = h[P_PLUS, E_PLUS] = g
    h[E_MINUS, P_MINUS] = h[P_MINUS, E_MINUS] = g
    h[P_PLUS, D] = h[D, P_PLUS] = oc
    h[P_MINUS, D] = h[D, P_MINUS] = oc
    h[D, S] = h[S, D] = os_
    h[D, D] = -p.delta
    h[S, S] = v - p.delta_r
    h[P_PLUS, P_PLUS] = h[P_MINUS, P_MINUS] = -1j * p.gamma_bar
    return EffectiveHamiltonian(h, float(k), float(v), p)


def dark_state_coefficients(p: ModelParams) -> np.ndarray:
    """Closed-form dark-state coefficients ``(Oc, Oc, -G, -/+G, 0, 0) / N``.

    ``N = sqrt(G**2 + 2 Oc**2)`` as conventionally quoted; note this does not
    make the 6-vector unit length (its squared norm is
    ``(2 G**2 + 2 Oc**2) / N**2``).  The Rydberg entry takes the opposite sign
    for negative `delta`, where the resonant D/S combination is ``D - S``.
    """
    g, oc = p.big_g, p.omega_c
    sign = 1.0 if p.delta >= 0 else -1.0
    norm = np.sqrt(g**2 + 2 * oc**2)
    return np.array([oc, oc, -g, -sign * g, 0, 0], dtype=complex) / norm


def dressed_state_coefficients(p: ModelParams) -> np.ndarray:
    """Dressed dark-state coefficients ``(Oc, Oc, -G, -G Os/Ds, 0, 0) / N'``."""
    g, oc = p.big_g, p.omega_c
    ratio = p.omega_s / p.delta_s
    norm = np.sqrt(g**2 * (1 + ratio**2) + 2 * oc**2)
    return np.array([oc, oc, -g, -g * ratio, 0, 0], dtype=complex) / norm


def _unit(vec: np.ndarray) -> np.ndarray:
    return vec / np.linalg.norm(vec)


def fix_gauge(vec: np.ndarray) -> np.ndarray:
    vec = _unit(np.asarray(vec, dtype=complex))
    big = np.abs(vec) > 1e-8 * np.abs(vec).max()
    first = vec[np.argmax(big)]
    return vec * (abs(first) / first)


def eigensystem(h: EffectiveHamiltonian) -> list[tuple[complex, PolaritonState]]:
    """All six eigenpairs, sorted by ascending ``|Im w|`` then ``Re w``.

    Raises
    ------
    ConvergenceFailure
        If LAPACK fails or an eigenpair misses the residual bound
        ``||Hv - wv|| <= 1e-10 ||H||_F``.
    """
    if not np.all(np.isfinite(h.matrix)):
        raise ConvergenceFailure("Hamiltonian has non-finite entries")
    try:
        values, vectors = np.linalg.eig(h.matrix)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    order = np.lexsort((values.real, np.abs(values.imag)))
    ref = _unit(dark_state_coefficients(h.params))
    scale = max(h.frobenius_norm, np.finfo(float).tiny)
    pairs = []
    for i in order:
        vec = fix_gauge(vectors[:, i])
        w = complex(values[i])
        residual = np.linalg.norm(h.matrix @ vec - w * vec) / scale
        if residual > RESIDUAL_TOL:
            raise ConvergenceFailure(f"eigenpair residual {residual:.3e} exceeds {RESIDUAL_TOL}")
        overlap = float(abs(np.vdot(ref, vec)) ** 2)
        pairs.append((w, PolaritonState(vec, w, overlap)))
    return pairs


def _best_match(scores: np.ndarray, what: str) -> int:
    ranked = np.argsort(scores)[::-1]
    if scores[ranked[0]] - scores[ranked[1]] < AMBIGUITY_GAP:
        raise BranchAmbiguity(
            f"{what}: candidates {scores[ranked[0]]:.6f} and {scores[ranked[1]]:.6f} are indistinguishable"
        )
    return int(ranked[0])


def seed_state(p: ModelParams, k: float = 0.0, v: float = 0.0) -> PolaritonState:
    """Eigenstate with the largest dark-state overlap."""
    states = [s for _, s in eigensystem(build_heff(p, k, v))]
    best = _best_match(np.array([s.dark_overlap for s in states]), "dark-state seed")
    return states[best]


def _on_condition(p: ModelParams) -> bool:
    tol = CONDITION_TOL * max(1.0, abs(p.omega_s), abs(p.delta))
    return p.omega_s > 0 and abs(abs(p.delta) - p.omega_s) <= tol and abs(p.delta_s) <= tol


def dark_state(p: ModelParams, k: float = 0.0) -> PolaritonState:
    """Stationary Rydberg polariton at ``delta = +/- omega_s``, ``delta_s = 0``.

    For general parameters use :func:`eigensystem` directly.
    """
    if not _on_condition(p):
        raise PreconditionViolated(
            f"dark_state needs |delta| == omega_s > 0 and delta_s == 0 "
            f"(got delta={p.delta}, omega_s={p.omega_s}, delta_s={p.delta_s})"
        )
    return seed_state(p, k)


def _track(p: ModelParams, ks: Sequence[float], start: PolaritonState) -> list[DispersionSample]:
    out = []
    prev = start.amplitudes
    for k in ks:
        states = [s for _, s in eigensystem(build_heff(p, k))]
        scores = np.array([abs(np.vdot(prev, s.amplitudes)) for s in states])
        best = _best_match(scores, f"branch continuation at k={k:g}")
        if scores[best] < MIN_CONTINUITY:
            raise BranchAmbiguity(
                f"consecutive overlap {scores[best]:.3f} < {MIN_CONTINUITY} at k={k:g}; grid too coarse"
            )
        prev = states[best].amplitudes
        out.append(DispersionSample(float(k), states[best].eigenvalue, states[best]))
    return out


def dispersion_scan(p: ModelParams, k_grid: Sequence[float]) -> DispersionBranch:
    """Follow the dark branch across `k_grid`.

    The branch is seeded at the grid point closest to ``k = 0`` by maximal
    dark-state overlap and continued outward in both directions by maximal
    overlap with the previous eigenvector.
    """
    ks = np.asarray(k_grid, dtype=float)
    if ks.ndim != 1 or ks.size == 0:
        raise ValueError("k_grid must be a non-empty 1-D sequence")
    if np.any(np.diff(ks) <= 0):
        raise ValueError("k_grid must be strictly increasing")
    i0 = int(np.argmin(np.abs(ks)))
    seed = seed_state(p, ks[i0])
    centre = DispersionSample(float(ks[i0]), seed.eigenvalue, seed)
    right = _track(p, ks[i0 + 1:], seed)
    left = _track(p, ks[:i0][::-1], seed)
    return DispersionBranch(tuple(left[::-1] + [centre] + right), p)


def kappa_grid(start: float = -1.0, stop: float = 1.0, count: int = 401) -> np.ndarray:
    """Uniform grid in units of the inverse absorption length."""
    return np.linspace(start, stop, count)


def analytic_dispersion(p: ModelParams, k):
    """Small-momentum dispersion ``-i c^2 gb Oc^2 k^2 / (G^2 (G^2 + Oc^2))``."""
    if p.omega_c <= 0:
        raise PreconditionViolated("analytic dispersion needs omega_c > 0")
    g2, oc2 = p.big_g**2, p.omega_c**2
    curvature = p.light_speed**2 * p.gamma_bar * oc2 / (g2 * (g2 + oc2))
    return -1j * curvature * np.asarray(k, dtype=float) ** 2


def composition_scan(p: ModelParams, ratio_grid: Sequence[float]) -> list[tuple[float, PolaritonState]]:
    """k = 0 dark-branch state for each ``delta / omega_s`` in `ratio_grid`."""
    if p.omega_s <= 0:
        raise PreconditionViolated("composition scan needs omega_s > 0")
    return [(float(r), seed_state(p.replace(delta=r * p.omega_s))) for r in ratio_grid]


def intermediate_population(p: ModelParams, ratio_grid: Sequence[float]) -> list[tuple[float, float]]:
    """``|P+|^2 + |P-|^2`` of the k = 0 dark branch versus ``delta / omega_s``."""
    return [(r, s.intermediate_population) for r, s in composition_scan(p, ratio_grid)]


def dressed_dark_state(p: ModelParams) -> tuple[PolaritonState, float]:
    """k = 0 eigenstate closest to the Rydberg-dressed dark state.

    Requires ``delta = 0`` and ``|delta_s| >= 10 omega_s > 0``.  Returns the
    state (its `dark_overlap` measured against the dressed reference) and the
    overlap deficit ``1 - |<ref|state>|^2``.
    """
    tol = CONDITION_TOL * max(1.0, abs(p.delta_s))
    if not (p.omega_s > 0 and abs(p.delta) <= tol and abs(p.delta_s) >= 10 * p.omega_s):
        raise PreconditionViolated(
            "dressed dark state needs delta == 0 and |delta_s| >= 10 omega_s > 0"
        )
    ref = _unit(dressed_state_coefficients(p))
    states = [s for _, s in eigensystem(build_heff(p))]
    scores = np.array([abs(np.vdot(ref, s.amplitudes)) ** 2 for s in states])
    best = _best_match(scores, "dressed-state seed")
    state = replace(states[best], dark_overlap=float(scores[best]))
    return state, 1.0 - float(scores[best])
