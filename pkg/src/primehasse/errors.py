"""Exception types and enumeration budgets shared by every module."""

from __future__ import annotations

import os

# Default work limits. PHL_BUDGET (an integer) overrides all of them at once.
RESIDUE_BUDGET = 2**26
ENUMERATION_BUDGET = 20_000_000


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ResourceError(RuntimeError):
    """A computation would exceed its enumeration or memory budget."""


class CertificateRejected(DomainError):
    """A counterexample construction or verification failed one of its conditions.

    ``failures`` holds ``(condition, note)`` pairs, one per violated condition.
    """

    def __init__(self, message: str, failures=(), witness=None):
        super().__init__(message)
        self.failures = list(failures)
        self.witness = witness


def budget(default: int) -> int:
    env = os.environ.get("PHL_BUDGET")
    if env:
        try:
            return int(float(env))
        except ValueError:
            raise DomainError(f"PHL_BUDGET must be an integer, got {env!r}") from None
    return default


def check_budget(work: int, default: int, what: str) -> None:
    limit = budget(default)
    if work > limit:
        raise ResourceError(f"{what}: {work} units of work exceeds budget {limit}"
                            " (set PHL_BUDGET to raise it)")
