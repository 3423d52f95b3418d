"""Working-precision bookkeeping threaded through every numeric routine."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from mpmath import mpf, mp

from .errors import DomainError

DEFAULT_GUARD_DIGITS = 15
DEFAULT_PRIME_CUTOFF = 100


@dataclass(frozen=True)
class PrecisionContext:
    """Requested accuracy plus the knobs that control series truncation.

    ``target_digits`` is the number of decimal digits the caller wants to be
    able to certify; arithmetic is carried at ``target_digits + guard_digits``.
    Every truncated series (Euler-Maclaurin, the Mobius series for P(s), ...)
    is cut once its remainder falls below ``series_cutoff_epsilon``.
    """

    target_digits: int = 20
    guard_digits: int = DEFAULT_GUARD_DIGITS
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF

    def __post_init__(self):
        if self.target_digits < 1:
            raise DomainError("target_digits must be positive")
        if self.guard_digits < 10:
            raise DomainError("guard_digits must be at least 10")
        if self.prime_cutoff < 2:
            raise DomainError("prime_cutoff must be at least 2")

    @property
    def working_digits(self) -> int:
        return self.target_digits + self.guard_digits

    @property
    def series_cutoff_epsilon(self) -> mpf:
        with mp.workdps(self.working_digits):
            return mpf(10) ** (-(self.target_digits + self.guard_digits // 2))

    @property
    def singularity_floor(self) -> mpf:
        """Smallest admissible s - 1 when s is passed as a plain number."""
        with mp.workdps(self.working_digits):
            return mpf(10) ** (-self.target_digits)

    def with_target(self, target_digits: int) -> "PrecisionContext":
        return replace(self, target_digits=target_digits)

    def for_order(self, k: int) -> "PrecisionContext":
        """Context with extra guard digits for k-fold products near s = 1."""
        extra = math.ceil(0.302 * k)
        return replace(self, guard_digits=self.guard_digits + extra)

    def workdps(self):
        return mp.workdps(self.working_digits)
