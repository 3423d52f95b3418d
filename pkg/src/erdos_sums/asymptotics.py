"""Sathe-Selberg densities and main terms for N_k(x).

Expanding both logarithms in (1 - z/p)^-1 (1 - 1/p)^z gives

    sum_{m>=1} (z^m - z) / (m p^m),

whose m = 1 term vanishes, so log prod_p = sum_{m>=2} (z^m - z) P(m) / m.
The squarefree factor (1 + z/p)(1 - 1/p)^z gives -(-z)^m - z in place of
z^m - z.  Primes up to the cutoff are taken directly, and the series runs
over the remaining primes only, where it converges like (z/101)^m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import mp, mpf

from .errors import DomainError
from .precision import PrecisionContext
from .zeta_core import _small_primes, next_prime, prime_zeta_integers

VALIDITY_RATIO = 1.99  # k <= 1.99 log log x
STANDARD, SQUAREFREE, PROGRESSION = "standard", "squarefree", "progression"


def gamma_function(x, ctx: PrecisionContext) -> mpf:
    if x <= 0:
        raise DomainError("gamma_function needs x > 0")
    with ctx.workdps():
        return mpmath.gamma(mpf(x))


def _series_context(ctx: PrecisionContext) -> PrecisionContext:
    # P_{>A}(m) comes from P(m) minus the small primes; z^m <= 2^m amplifies
    # its absolute error, so carry ten more digits.
    return PrecisionContext(ctx.target_digits, ctx.guard_digits + 10, ctx.prime_cutoff)


def _log_product(z, ctx: PrecisionContext, squarefree: bool) -> mpf:
    wctx = _series_context(ctx)
    q = next_prime(ctx.prime_cutoff)
    with wctx.workdps():
        z = mpf(z)
        primes, logs, _ = _small_primes(ctx.prime_cutoff, mp.prec)
        if squarefree:
            direct = mpmath.fsum(mpmath.log1p(z / p) + z * mpmath.log1p(-mpf(1) / p) for p in primes)
        else:
            direct = mpmath.fsum(-mpmath.log1p(-z / p) + z * mpmath.log1p(-mpf(1) / p) for p in primes)
        # terms are below 2 (z/q)^m q / (m - 1); stop once the geometric tail is negligible
        ratio = max(z, mpf(1)) / q
        eps = wctx.series_cutoff_epsilon
        M = 2
        while 2 * q * ratio**M / (1 - ratio) > eps:
            M += 1
        P, _ = prime_zeta_integers(M, wctx)
        total = direct
        for m in range(2, M + 1):
            large = P[m] - mpmath.fsum(mpmath.exp(-m * lp) for lp in logs)
            coeff = -((-z) ** m) - z if squarefree else z**m - z
            total += coeff * large / m
        return total


def G(z, ctx: PrecisionContext) -> mpf:
    """(1/Gamma(1+z)) prod_p (1 - z/p)^-1 (1 - 1/p)^z for 0 <= z < 2."""
    if not 0 <= z < 2:
        raise DomainError("G(z) needs 0 <= z < 2")
    log_prod = _log_product(z, ctx, squarefree=False)
    with ctx.workdps():
        return mpmath.exp(log_prod) / mpmath.gamma(1 + mpf(z))


def G_star(z, ctx: PrecisionContext) -> mpf:
    """(1/Gamma(1+z)) prod_p (1 + z/p)(1 - 1/p)^z for 0 <= z <= 2."""
    if not 0 <= z <= 2:
        raise DomainError("G*(z) is supported for 0 <= z <= 2")
    log_prod = _log_product(z, ctx, squarefree=True)
    with ctx.workdps():
        return mpmath.exp(log_prod) / mpmath.gamma(1 + mpf(z))


def prime_divisors(q: int):
    out, p = [], 2
    while p * p <= q:
        if q % p == 0:
            out.append(p)
            while q % p == 0:
                q //= p
        p += 1
    if q > 1:
        out.append(q)
    return out


def euler_phi(q: int) -> int:
    out = q
    for p in prime_divisors(q):
        out = out // p * (p - 1)
    return out


def G_q(z, q: int, ctx: PrecisionContext) -> mpf:
    """G(z) prod_{p | q} (1 - z/p)."""
    if q < 1:
        raise DomainError("modulus must be >= 1")
    g = G(z, ctx)
    with ctx.workdps():
        for p in prime_divisors(q):
            g *= 1 - mpf(z) / p
        return g


@dataclass(frozen=True)
class DensityFunction:
    kind: str = STANDARD
    q: int = 1

    def __post_init__(self):
        if self.kind not in (STANDARD, SQUAREFREE, PROGRESSION):
            raise DomainError(f"unknown density kind {self.kind!r}")
        if self.q < 1:
            raise DomainError("modulus must be >= 1")

    @property
    def domain(self):
        return (0.0, 2.0)

    def __call__(self, z, ctx: PrecisionContext) -> mpf:
        if self.kind == STANDARD:
            return G(z, ctx)
        if self.kind == SQUAREFREE:
            return G_star(z, ctx)
        return G_q(z, self.q, ctx)

    def at_one(self, ctx: PrecisionContext) -> mpf:
        """The closed form the density takes at z = 1."""
        with ctx.workdps():
            if self.kind == STANDARD:
                return mpf(1)
            if self.kind == SQUAREFREE:
                return 6 / mp.pi**2
            return mpf(euler_phi(self.q)) / self.q


def main_term(k: int, x, variant: DensityFunction = DensityFunction(),
              ctx: Optional[PrecisionContext] = None, ratio: float = VALIDITY_RATIO) -> mpf:
    """Main term for the count of n <= x with k + 1 prime factors.

    G(k/L) (x / log x) L^k / k! with L = log log x; the progression variant
    carries an extra 1/phi(q) and uses G_q, and counts one residue class
    coprime to q.
    """
    ctx = ctx or PrecisionContext()
    if k < 0:
        raise DomainError("k must be nonnegative")
    if x <= math.e:
        raise DomainError("x must exceed e")
    with ctx.workdps():
        x = mpf(x)
        L = mpmath.log(mpmath.log(x))
        if k > ratio * L:
            raise DomainError(f"k = {k} exceeds {ratio} log log x = {mpmath.nstr(ratio * L, 6)}")
        z = k / L
    density = variant(z, ctx)
    with ctx.workdps():
        value = density * x / mpmath.log(x) * L**k / math.factorial(k)
        if variant.kind == PROGRESSION:
            value /= euler_phi(variant.q)
        return value
