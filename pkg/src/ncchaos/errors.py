"""Exception types and resource limits shared by every module."""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, replace


class NCChaosError(Exception):
    """Base class for all package errors."""


class ValidationError(NCChaosError, ValueError):
    """Malformed input object (bad partition, bad kernel file, ...)."""


class DomainError(NCChaosError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ResourceLimitError(NCChaosError, RuntimeError):
    """A configured cap would be exceeded.

    ``estimate`` carries the estimated cost when one is known.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class Limits:
    nc_cap: int = 14
    tuple_budget: int = 10**8
    dense_cap: int = 10**7
    matrix_budget: int = 5 * 10**8


LIMITS = Limits()


def get_limits() -> Limits:
    return LIMITS


@contextlib.contextmanager
def limits(**overrides):
    """Temporarily override the global caps (``with limits(nc_cap=16): ...``)."""
    global LIMITS
    old = LIMITS
    LIMITS = replace(old, **overrides)
    try:
        yield LIMITS
    finally:
        LIMITS = old


def set_limits(**overrides) -> Limits:
    global LIMITS
    LIMITS = replace(LIMITS, **overrides)
    return LIMITS
