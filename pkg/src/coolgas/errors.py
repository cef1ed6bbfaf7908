"""Shared exception types."""


class CoolgasError(Exception):
    """Base class for all package errors."""


class InputError(CoolgasError, ValueError):
    """Caller passed invalid arguments or malformed data."""


class KernelError(InputError):
    """Collision kernel configuration violates its hypotheses."""


class DivergenceError(CoolgasError, RuntimeError):
    """Rescaled-frame energy escaped its admissible band."""

    def __init__(self, message, energy=None, s=None):
        super().__init__(message)
        self.energy = energy
        self.s = s


class CorruptedStateError(CoolgasError, RuntimeError):
    """Non-finite velocities appeared; carries the last good snapshot."""

    def __init__(self, message, snapshot=None, t=None):
        super().__init__(message)
        self.snapshot = snapshot
        self.t = t


class UsageError(CoolgasError):
    """Command-line usage or configuration-file error (exit code 2)."""
