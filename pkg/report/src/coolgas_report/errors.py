"""Error types for the report tool.

Deliberately independent of the simulation package: the report consumes
artifact files only, so it carries its own small hierarchy.
"""


class ReportError(Exception):
    """Base class for report failures."""


class InputError(ReportError):
    """An artifact is missing, malformed, or violates its documented format."""


class UsageError(ReportError):
    """Command line arguments are invalid."""
