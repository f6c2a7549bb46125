"""Exception hierarchy shared by every layer of the toolkit.

InputError subclasses map to CLI exit code 2 / HTTP 422,
NumericalError subclasses to exit code 3 / HTTP 500.
"""

from __future__ import annotations

from typing import Any


class ToolkitError(Exception):
    """Base class for all toolkit failures."""


# ── Input / precondition failures ────────────────────────────────────────────

class InputError(ToolkitError):
    pass


class InvalidGroup(InputError):
    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class DisjointnessViolation(InputError):
    pass


class DegenerateRadius(InputError):
    pass


class LetterOutOfRange(InputError):
    pass


class TauNonPositive(InputError):
    pass


class DepthExceeded(InputError):
    pass


class CapExceeded(InputError):
    pass


class MismatchedTerminalLetter(InputError):
    pass


class HypothesisViolated(InputError):
    pass


class ExhaustiveTooLarge(InputError):
    pass


class ConvergenceRegionViolated(InputError):
    pass


class OutsideDisk(InputError):
    pass


# ── Numerical failures ───────────────────────────────────────────────────────

class NumericalError(ToolkitError):
    pass


class PoleEvaluation(NumericalError):
    pass


class BranchCutHit(NumericalError):
    pass


class SingularMatrix(NumericalError):
    pass


class DegreeTooSmall(NumericalError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class BoundaryZeroSuspected(NumericalError):
    pass


class NonIntegerWinding(NumericalError):
    pass


class MaxDepthExceeded(NumericalError):
    pass


class NewtonDiverged(NumericalError):
    pass


class PerronViolation(NumericalError):
    pass


class NoSignChange(NumericalError):
    pass


def exit_code_for(exc: BaseException) -> int:
    """CLI exit code for an exception raised by a subcommand."""
    if isinstance(exc, InputError):
        return 2
    if isinstance(exc, NumericalError):
        return 3
    return 1
