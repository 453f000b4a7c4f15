"""Exception types shared across the simulator."""

from __future__ import annotations

from dataclasses import dataclass


class SimulationError(Exception):
    """Base class for every error raised by :mod:`rydslp`."""


@dataclass(frozen=True)
class Violation:
    kind: str  # "NonPositive", "NegativeRabi", "NonFinite", "Missing", "Unknown"
    field: str

    def __str__(self) -> str:
        return f"{self.kind}({self.field})"


class ParameterError(SimulationError, ValueError):
    """Raised when a parameter record breaks one or more invariants.

    All violations found are collected in :attr:`violations` rather than
    stopping at the first one.
    """

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("invalid parameters: " + ", ".join(map(str, self.violations)))


class PreconditionViolated(SimulationError, ValueError):
    pass


class ConvergenceFailure(SimulationError):
    pass


class BranchAmbiguity(SimulationError):
    pass


class SingularDenominator(SimulationError, ZeroDivisionError):
    pass


class GridNotConverged(SimulationError):
    pass


class IllConditionedBVP(SimulationError):
    pass


class StepCountInsufficient(SimulationError):
    pass


class InsufficientSamples(SimulationError, ValueError):
    pass


class ConfigParseError(SimulationError, ValueError):
    pass


class EmptySuite(SimulationError):
    pass
