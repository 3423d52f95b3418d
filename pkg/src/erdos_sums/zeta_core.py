"""Riemann zeta, prime-truncated zeta and the prime zeta function for real s > 1.

All evaluations carry an explicit absolute error bound.  ``zeta`` and
``zeta_deriv`` use Euler-Maclaurin summation with the standard remainder
estimate; the prime zeta function is obtained by Mobius inversion of
log zeta after removing the primes up to a cutoff ``A``:

    P(s) = sum_{p <= A} p^-s + sum_{m >= 1} mu(m)/m * log zeta_A(m s),

where zeta_A(s) = zeta(s) * prod_{p <= A} (1 - p^-s).

Points very close to the pole are addressed through ``s_minus_1`` so that
s - 1 = e^-u with u in the hundreds is represented exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import mpmath
from mpmath import mp, mpf

from .errors import DomainError, SingularityError
from .precision import PrecisionContext

# 2*zeta(2M+1) <= 2*zeta(3) < 2.41 for M >= 1
_TWO_ZETA_ODD = 2.41


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: tuple
    log_primes: tuple

    def __len__(self):
        return len(self.primes)


def _sieve(limit: int) -> list:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]


def generate_primes(limit: int, digits: int = 30) -> PrimeTable:
    """All primes <= ``limit`` with their logarithms at ``digits`` digits."""
    if limit < 2:
        raise DomainError(f"prime table needs limit >= 2, got {limit}")
    primes = _sieve(int(limit))
    with mp.workdps(digits):
        logs = tuple(mpmath.log(p) for p in primes)
    return PrimeTable(int(limit), tuple(primes), logs)


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    c = n + 1
    while True:
        if c >= 2 and all(c % d for d in range(2, math.isqrt(c) + 1)):
            return c
        c += 1


def mobius(n: int) -> int:
    if n < 1:
        raise DomainError("mobius is defined for n >= 1")
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def _bernoulli_ratio(j: int) -> Fraction:
    """B_{2j} / (2j)! as an exact fraction."""
    b = Fraction(*[int(x) for x in mpmath.bernfrac(2 * j)])
    return b / math.factorial(2 * j)


@lru_cache(maxsize=64)
def _em_coefficients(count: int, prec: int) -> tuple:
    """B_{2j}/(2j)! for j = 1..count at the given precision."""
    with mp.workprec(prec):
        out = []
        for j in range(1, count + 1):
            r = _bernoulli_ratio(j)
            out.append(mpf(r.numerator) / r.denominator)
        return tuple(out)


@lru_cache(maxsize=None)
def _log_rem_coeff(j: int) -> float:
    """log of 2 zeta(3) / (2 pi)^{2j+1}, with 2 zeta(3) rounded up."""
    return math.log(_TWO_ZETA_ODD) - (2 * j + 1) * math.log(2 * math.pi)


def _coefficients(j: int, prec: int) -> tuple:
    # tables grow in chunks of 32 so the cache holds few entries per precision
    return _em_coefficients(32 * ((j + 31) // 32), prec)


@lru_cache(maxsize=4096)
def _log_int(n: int, prec: int) -> mpf:
    with mp.workprec(prec):
        return mpmath.log(n)


def _start_terms(eps: mpf) -> int:
    digits = float(-mpmath.log10(eps))
    return max(2, int(digits * math.log(10) / (2 * math.pi)) + 2)


@lru_cache(maxsize=None)
def _least_factor(n: int) -> int:
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


def _head_powers(s: mpf, N: int, prime_powers: dict, prec: int) -> list:
    """[n^-s for n < N] (index n), built multiplicatively from prime powers.

    ``prime_powers`` maps p to p^-s and is extended in place when needed.
    """
    out = [mpf(0), mpf(1)]
    for n in range(2, N + 1):
        p = _least_factor(n)
        if p not in prime_powers:
            prime_powers[p] = mpmath.exp(-s * _log_int(p, prec))
        out.append(out[n // p] * prime_powers[p])
    return out


def _zeta_em(s: mpf, sm1: mpf, eps: mpf, deriv: bool = False, prime_powers: dict = None):
    """Euler-Maclaurin value of zeta(s) (or zeta'(s)) and an absolute error bound.

    Must be called with the desired working precision already active.
    ``prime_powers`` optionally supplies p^-s for small primes p.
    """
    prec = mp.prec
    N = _start_terms(eps)
    # for large s a short head suffices
    n_fast = int(math.exp(min(700.0, float(-mpmath.log(eps)) / float(s)))) + 2
    N = max(2, min(N, n_fast))
    ulp = mpf(2) ** (-prec)
    coeffs = _coefficients(40, prec)
    if prime_powers is None:
        prime_powers = {}
    while True:
        logN = _log_int(N, prec)
        hp = _head_powers(s, N, prime_powers, prec)
        Nms = hp[N]  # N^-s
        # N^{1-s} / (s-1) without forming 1 - s from a rounded s
        N1ms = Nms * N if sm1 >= 1 else mpmath.exp(-sm1 * logN)
        if not deriv:
            total = mpmath.fsum(hp[1:N]) + N1ms / sm1 + Nms / 2
        else:
            head = -mpmath.fsum(_log_int(n, prec) * hp[n] for n in range(2, N))
            total = (
                head
                - N1ms * (logN / sm1 + 1 / sm1**2)
                - logN * Nms / 2
            )
        # rising factorial (s)_{2j-1} and N^{-s-2j+1}, updated incrementally
        poch = s
        power = Nms / N  # N^{-s-1}
        N2 = N * N
        harmonic = 1 / s if deriv else None
        # the remainder bound only steers the loop, so it is tracked as a float
        # logarithm (no underflow) and widened by a relative 1e-9 at the end
        s_f, logN_f = float(s), math.log(N)
        lpoch = math.log(s_f)
        lpower = -(s_f + 1) * logN_f
        h_f = 1 / s_f
        log_eps = float(mpmath.log(eps))
        prev = None
        j = 1
        while True:
            if j > len(coeffs):
                coeffs = _coefficients(j, prec)
            bern = coeffs[j - 1]
            term = bern * poch * power
            if deriv:
                total += term * (harmonic - logN)
            else:
                total += term
            # bound on the remainder after j terms: 2 zeta(3) (s)_{2j} N^{-s-2j} / (2 pi)^{2j+1}
            lrem = _log_rem_coeff(j) + lpoch + math.log(s_f + 2 * j - 1) + lpower - logN_f
            if deriv:
                h_next = h_f + 1 / (s_f + 2 * j - 1) + 1 / (s_f + 2 * j)
                lrem += math.log(h_next + logN_f + 1 / (s_f + 2 * j))
            if lrem < log_eps:
                rem = mpmath.exp(mpf(lrem) + mpf("1e-9"))
                rounding = (4 * (N + j) + 8) * ulp * (abs(total) + 1)
                return total, rem + rounding
            if prev is not None and lrem >= prev:
                break
            prev = lrem
            poch = poch * (s + 2 * j - 1) * (s + 2 * j)
            lpoch += math.log(s_f + 2 * j - 1) + math.log(s_f + 2 * j)
            power = power / N2
            lpower -= 2 * logN_f
            if deriv:
                harmonic += 1 / (s + 2 * j - 1) + 1 / (s + 2 * j)
                h_f += 1 / (s_f + 2 * j - 1) + 1 / (s_f + 2 * j)
            j += 1
        N = N + N // 2 + 1


def _check_s(s, s_minus_1, ctx: PrecisionContext):
    """Normalize (s, s-1) and enforce the singularity floor."""
    if s_minus_1 is not None:
        sm1 = mpf(s_minus_1)
        if sm1 <= 0:
            raise SingularityError("s - 1 must be positive")
        return 1 + sm1, sm1
    s = mpf(s)
    sm1 = s - 1
    if sm1 < ctx.singularity_floor:
        raise SingularityError(
            f"s = {mpmath.nstr(s, 15)} is within 10^-{ctx.target_digits} of the pole"
        )
    return s, sm1


def zeta_with_error(s, ctx: PrecisionContext, s_minus_1=None):
    with ctx.workdps():
        s, sm1 = _check_s(s, s_minus_1, ctx)
        return _zeta_em(s, sm1, ctx.series_cutoff_epsilon)


def zeta(s, ctx: PrecisionContext, s_minus_1=None) -> mpf:
    """zeta(s) for real s > 1 with absolute error <= ctx.series_cutoff_epsilon."""
    return zeta_with_error(s, ctx, s_minus_1)[0]


def zeta_deriv(s, ctx: PrecisionContext, s_minus_1=None) -> mpf:
    """zeta'(s) = -sum log(n) n^-s by the differentiated Euler-Maclaurin formula."""
    with ctx.workdps():
        s, sm1 = _check_s(s, s_minus_1, ctx)
        return _zeta_em(s, sm1, ctx.series_cutoff_epsilon, deriv=True)[0]


@lru_cache(maxsize=32)
def _small_primes(A: int, prec: int):
    table = _sieve(A)
    with mp.workprec(prec):
        logs = tuple(mpmath.log(p) for p in table)
    return tuple(table), logs, next_prime(A)


def zeta_truncated(s, A: int, ctx: PrecisionContext, s_minus_1=None) -> mpf:
    """zeta_A(s) = zeta(s) prod_{p <= A} (1 - p^-s), the Euler product over p > A."""
    if A < 2:
        raise DomainError("zeta_truncated needs A >= 2")
    with ctx.workdps():
        s, sm1 = _check_s(s, s_minus_1, ctx)
        z, _ = _zeta_em(s, sm1, ctx.series_cutoff_epsilon)
        primes, logs, _ = _small_primes(A, mp.prec)
        for lp in logs:
            z *= 1 - mpmath.exp(-s * lp)
        return z


def _log_zeta_tail_bound(x: mpf, q: int) -> mpf:
    """Upper bound for log zeta_A(x) = sum_{p >= q} -log(1 - p^-x), x > 1."""
    qx = mpmath.exp(-x * _log_int(q, mp.prec))
    return qx * (1 + q / (x - 1)) / (1 - qx)


def _log_deriv_tail_bound(x: mpf, q: int) -> mpf:
    """Upper bound for |zeta_A'/zeta_A(x)| = sum_{p >= q} log p p^-x / (1 - p^-x)."""
    lq = _log_int(q, mp.prec)
    qx = mpmath.exp(-x * lq)
    integral = q * qx * (lq / (x - 1) + 1 / (x - 1) ** 2)
    return (lq * qx + integral) / (1 - qx)


def _check_count(count: int):
    if count < 1:
        raise DomainError("count must be >= 1")


def prime_zeta_multiples(s, count: int, ctx: PrecisionContext, s_minus_1=None):
    """P(j s) for j = 1..count together with absolute error bounds.

    The values log zeta_A(n s) are shared between all multiples, so the
    whole family costs about as much as a single P(s).
    Returns ``(values, errors)`` as lists indexed from j = 1 at position 0.
    """
    _check_count(count)
    with ctx.workdps():
        s, sm1 = _check_s(s, s_minus_1, ctx)
        return _prime_zeta_family(s, sm1, range(1, count + 1), ctx)


def prime_zeta_integers(m_max: int, ctx: PrecisionContext):
    """P(m) for m = 2..m_max as a dict, with a dict of error bounds."""
    if m_max < 2:
        raise DomainError("m_max must be >= 2")
    with ctx.workdps():
        js = range(2, m_max + 1)
        values, errors = _prime_zeta_family(mpf(1), mpf(0), js, ctx)
        return dict(zip(js, values)), dict(zip(js, errors))


def _prime_zeta_family(s: mpf, sm1: mpf, js, ctx: PrecisionContext):
    eps = ctx.series_cutoff_epsilon
    primes, logs, q = _small_primes(ctx.prime_cutoff, mp.prec)
    tiny = mpf(2) ** (-mp.prec - 8)
    log_q = _log_int(q, mp.prec)
    qs = mpmath.exp(-s * log_q)

    # powers[n-1][i] = p_i^{-n s}, truncated once below the rounding level
    first = [mpmath.exp(-s * lp) for lp in logs]
    powers = [first]

    def power_row(n: int):
        while len(powers) < n:
            prev = powers[-1]
            row = []
            for b, y in zip(first, prev):
                y = y * b
                if y < tiny:
                    break
                row.append(y)
            powers.append(row)
        return powers[n - 1]

    lz_cache = {}

    def log_zeta_A(n: int):
        if n not in lz_cache:
            x = n * s
            x_sm1 = sm1 if n == 1 else x - 1
            row = power_row(n)
            z, zerr = _zeta_em(x, x_sm1, eps / 4, prime_powers=dict(zip(primes, row)))
            prod = mpf(1)
            for y in row:
                prod *= 1 - y
            val = z * prod
            lz_cache[n] = (mpmath.log(val), (zerr * prod) / val + 4 * tiny)
        return lz_cache[n]

    values, errors = [], []
    for j in js:
        total = mpmath.fsum(power_row(j))
        err = len(logs) * tiny
        qsj = qs**j
        m = 1
        while True:
            if m * j > 1:
                tail = _log_zeta_tail_bound(m * j * s, q) / (m * (1 - qsj))
                if tail < eps / 4:
                    err += tail
                    break
            mu = _mobius_small(m)
            if mu:
                lz, lerr = log_zeta_A(m * j)
                total += mu * lz / m
                err += lerr / m
            m += 1
        values.append(total)
        errors.append(err)
    return values, errors


@lru_cache(maxsize=None)
def _mobius_small(m: int) -> int:
    return mobius(m)


def prime_zeta(s, ctx: PrecisionContext, s_minus_1=None) -> mpf:
    """P(s) = sum_p p^-s for real s > 1."""
    return prime_zeta_multiples(s, 1, ctx, s_minus_1)[0][0]


def prime_zeta_deriv(s, ctx: PrecisionContext, s_minus_1=None) -> mpf:
    """P'(s) = -sum_p log(p) p^-s via term-wise differentiation of the Mobius series.

    d/ds [(1/m) log zeta_A(m s)] = (zeta_A'/zeta_A)(m s), and
    zeta_A'/zeta_A(x) = zeta'/zeta(x) + sum_{p <= A} log p p^-x / (1 - p^-x).
    """
    with ctx.workdps():
        s, sm1 = _check_s(s, s_minus_1, ctx)
        eps = ctx.series_cutoff_epsilon
        primes, logs, q = _small_primes(ctx.prime_cutoff, mp.prec)
        base = [mpmath.exp(-s * lp) for lp in logs]
        qs = mpmath.exp(-s * _log_int(q, mp.prec))
        total = -sum(lp * b for lp, b in zip(logs, base))
        m = 1
        while True:
            if m > 1:
                tail = _log_deriv_tail_bound(m * s, q) / (1 - qs)
                if tail < eps / 4:
                    break
            mu = mobius(m)
            if mu:
                x = m * s
                x_sm1 = sm1 if m == 1 else x - 1
                z, _ = _zeta_em(x, x_sm1, eps / 4)
                dz, _ = _zeta_em(x, x_sm1, eps / 4, deriv=True)
                ld = dz / z
                for lp, b in zip(logs, base):
                    y = b**m
                    ld += lp * y / (1 - y)
                total += mu * ld
            m += 1
        return total


def log_deriv_zeta_truncated(x, ctx: PrecisionContext) -> mpf:
    """(zeta_A'/zeta_A)(x) = -sum_{p > A} log p p^-x / (1 - p^-x), x > 1."""
    with ctx.workdps():
        x, xm1 = _check_s(x, None, ctx)
        eps = ctx.series_cutoff_epsilon
        _, logs, _ = _small_primes(ctx.prime_cutoff, mp.prec)
        z, _ = _zeta_em(x, xm1, eps / 4)
        dz, _ = _zeta_em(x, xm1, eps / 4, deriv=True)
        out = dz / z
        for lp in logs:
            y = mpmath.exp(-x * lp)
            out += lp * y / (1 - y)
        return out


def log_deriv_tail_bound(x, ctx: PrecisionContext) -> mpf:
    with ctx.workdps():
        _, _, q = _small_primes(ctx.prime_cutoff, mp.prec)
        return _log_deriv_tail_bound(mpf(x), q)


def log_zeta(s, ctx: PrecisionContext, s_minus_1=None) -> mpf:
    with ctx.workdps():
        s, sm1 = _check_s(s, s_minus_1, ctx)
        return mpmath.log(_zeta_em(s, sm1, ctx.series_cutoff_epsilon)[0])


def euler_product_partial(s, primes: Sequence[int], ctx: PrecisionContext) -> mpf:
    """prod_{p in primes} (1 - p^-s); helper for tests and zeta_A identities."""
    with ctx.workdps():
        s = mpf(s)
        out = mpf(1)
        for p in primes:
            out *= 1 - mpf(p) ** (-s)
        return out
