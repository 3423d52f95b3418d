"""k-almost-prime zeta functions P_k(s) and their squarefree analogues P*_k(s).

Both are polynomials in the values P(js):

    P_k(s)  = (1/k) sum_{j=1}^{k} P(js) P_{k-j}(s)
    P*_k(s) = (1/k) sum_{j=1}^{k} (-1)^{j+1} P(js) P*_{k-j}(s)

and equivalently sums over partitions of k (the exponential formula).  The
recursions are the production path; the partition sums are kept as an
independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import mpmath
from mpmath import mp, mpf

from .errors import CancellationError, CapacityError, DomainError
from .precision import PrecisionContext
from .zeta_core import prime_zeta_multiples

PARTITION_CROSSCHECK_MAX = 40


@dataclass(frozen=True)
class PartitionVector:
    """Multiplicities (n_1, ..., n_k) with sum j * n_j = k."""

    multiplicities: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum((j + 1) * n for j, n in enumerate(self.multiplicities))


def partitions(k: int) -> Iterator[PartitionVector]:
    """Stream every multiplicity vector of k once, in reverse-lexicographic order."""
    if k < 1:
        raise DomainError("partitions needs k >= 1")
    counts = [0] * k

    def fill(j: int, remaining: int):
        # parts of size j..k still to place, `remaining` left to cover
        if remaining == 0:
            yield PartitionVector(tuple(counts))
            return
        if j > k:
            return
        for n in range(remaining // j, -1, -1):
            rest = remaining - n * j
            # what is left must be coverable by parts larger than j
            if rest != 0 and rest <= j:
                continue
            counts[j - 1] = n
            yield from fill(j + 1, rest)
        counts[j - 1] = 0

    yield from fill(1, k)


@dataclass
class PkEvaluator:
    """P_k(s) and P*_k(s) for k = 0..k_max at a single point s.

    ``errors[k]`` bounds the absolute error of both ``pk_values[k]`` and
    ``pk_star_values[k]``: the signed recursion has the unsigned one as its
    majorant, so one error recursion serves both.
    """

    k_max: int
    s: mpf
    p_cache: List[mpf]
    p_errors: List[mpf]
    pk_values: List[mpf] = field(default_factory=list)
    pk_star_values: List[mpf] = field(default_factory=list)
    errors: List[mpf] = field(default_factory=list)
    working_digits: int = 0

    @classmethod
    def at(cls, s, k_max: int, ctx: PrecisionContext, s_minus_1=None) -> "PkEvaluator":
        if k_max < 0:
            raise DomainError("k_max must be nonnegative")
        wctx = ctx.for_order(k_max)
        count = max(k_max, 1)
        values, errs = prime_zeta_multiples(s, count, wctx, s_minus_1)
        with wctx.workdps():
            point = 1 + mpf(s_minus_1) if s_minus_1 is not None else mpf(s)
            ev = cls(k_max, point, [mpf(1)] + values, [mpf(0)] + errs)
            ev.working_digits = wctx.working_digits
            ev._run_recursions()
        return ev

    def _run_recursions(self):
        P, dP = self.p_cache, self.p_errors
        ulp = mpf(2) ** (-mp.prec)
        pk, pks, err = [mpf(1)], [mpf(1)], [mpf(0)]
        for k in range(1, self.k_max + 1):
            acc = mpf(0)
            acc_star = mpf(0)
            e = mpf(0)
            for j in range(1, k + 1):
                acc += P[j] * pk[k - j]
                term = P[j] * pks[k - j]
                acc_star += term if j % 2 else -term
                e += dP[j] * (pk[k - j] + err[k - j]) + P[j] * err[k - j]
            acc /= k
            acc_star /= k
            e = e / k + 3 * k * ulp * acc
            pk.append(acc)
            pks.append(acc_star)
            err.append(e)
        self.pk_values, self.pk_star_values, self.errors = pk, pks, err

    def pk(self, k: int) -> mpf:
        self._check(k)
        return self.pk_values[k]

    def pk_star(self, k: int) -> mpf:
        self._check(k)
        value = self.pk_star_values[k]
        if value + self.errors[k] <= 0:
            raise CancellationError(
                f"P*_{k}(s) = {mpmath.nstr(value, 5)} is negative beyond its error bar"
            )
        return value

    def _check(self, k: int):
        if k < 0 or k > self.k_max:
            raise CapacityError(f"k = {k} outside evaluator range 0..{self.k_max}")


def pk(k: int, s, ctx: PrecisionContext, s_minus_1=None) -> mpf:
    """P_k(s) = sum over Omega(n) = k of n^-s, by the recursion."""
    return PkEvaluator.at(s, k, ctx, s_minus_1).pk(k)


def pk_star(k: int, s, ctx: PrecisionContext, s_minus_1=None) -> mpf:
    """P*_k(s): the same sum restricted to squarefree n, by the signed recursion."""
    return PkEvaluator.at(s, k, ctx, s_minus_1).pk_star(k)


def _partition_sum(k: int, p_values: List[mpf], sign: int) -> mpf:
    total = mpf(0)
    for part in partitions(k):
        term = mpf(1)
        for j, n in enumerate(part.multiplicities, start=1):
            if n:
                term *= (sign * p_values[j] / j) ** n / math.factorial(n)
        total += term
    return total


def _partition_inputs(k: int, s, ctx: PrecisionContext, s_minus_1):
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k > PARTITION_CROSSCHECK_MAX:
        raise CapacityError(f"partition cross-check limited to k <= {PARTITION_CROSSCHECK_MAX}")
    wctx = ctx.for_order(k)
    values, _ = prime_zeta_multiples(s, max(k, 1), wctx, s_minus_1)
    return wctx, [mpf(1)] + values


def pk_via_partitions(k: int, s, ctx: PrecisionContext, s_minus_1=None) -> mpf:
    """P_k(s) = sum over partitions of prod_j (P(js)/j)^{n_j} / n_j!."""
    wctx, values = _partition_inputs(k, s, ctx, s_minus_1)
    if k == 0:
        return mpf(1)
    with wctx.workdps():
        return _partition_sum(k, values, 1)


def pk_star_via_partitions(k: int, s, ctx: PrecisionContext, s_minus_1=None) -> mpf:
    """P*_k(s) = (-1)^k sum over partitions of prod_j (-P(js)/j)^{n_j} / n_j!."""
    wctx, values = _partition_inputs(k, s, ctx, s_minus_1)
    if k == 0:
        return mpf(1)
    with wctx.workdps():
        return (-1) ** k * _partition_sum(k, values, -1)
