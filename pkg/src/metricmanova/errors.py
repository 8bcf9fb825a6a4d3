"""Exception hierarchy.

Plain ``ValueError`` is raised for usage errors (wrong argument values,
mismatched dimensions).  The classes below mark conditions that depend on the
*data*, so callers can distinguish "fix your input" from "this statistic is
undefined on this sample".
"""


class MetricManovaError(Exception):
    """Base class for errors raised by this package."""


class DataError(MetricManovaError, ValueError):
    """Invalid data: broken invariants, non-finite values, malformed files."""


class DegenerateDataError(MetricManovaError):
    """A statistic is undefined on this sample (for example a zero
    moment-variance that would appear in a denominator)."""


class SingularMatrixError(DegenerateDataError):
    """A matrix operation required strict positive definiteness and an
    eigenvalue at or below the singularity floor was found."""


class UnstableStatisticError(DegenerateDataError):
    """Too many permutation or simulation replicates were degenerate for the
    result to be trusted."""
