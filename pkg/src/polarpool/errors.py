"""Exception types shared across the engine.

Every failure mode maps to one of these so the CLI can translate them
into stable exit codes (validation = 2, infeasible trade = 3, numeric = 4).
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""


class DomainError(EngineError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ShapeError(EngineError, ValueError):
    """Vector length does not match the pool dimension."""


class ValidationError(EngineError, ValueError):
    """Structurally invalid parameters, positions, or files."""


class NotFoundError(EngineError, KeyError):
    """Referenced object (e.g. position id) does not exist."""


class RangeError(EngineError, ArithmeticError):
    """Result leaves the representable range or the feasible arc."""


class NumericError(EngineError, ArithmeticError):
    """Internal numeric failure (non-convergence, broken postcondition)."""


class InsufficientLiquidityError(RangeError):
    """A trade ran out of curve or liquidity before the input was consumed.

    Carries how much was fillable so callers can report partial-fill data.
    """

    def __init__(self, message: str, *, filled_in=None, filled_out=None,
                 boundary_angle_deg=None):
        super().__init__(message)
        self.filled_in = filled_in
        self.filled_out = filled_out
        self.boundary_angle_deg = boundary_angle_deg
