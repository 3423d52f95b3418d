"""Constants of the large-k theory and the explicit lower bound beta_k.

h(s) = log zeta(s) - P(s) = sum_{m>=2} P(ms)/m is smooth at s = 1; its value
c = h(1) and slope h'(1) govern the expansion

    P(s) = log(1/(s-1)) - c + (gamma - h'(1)) (s-1) + O((s-1)^2),

and alpha = e^-c is the limit of (1/k!) int P(s)^k ds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional

import mpmath
from mpmath import mp, mpf

from .almost_prime_zeta import partitions
from .errors import CapacityError, ConsistencyError, DomainError
from .precision import PrecisionContext
from .zeta_core import (
    _small_primes,
    log_deriv_tail_bound,
    log_deriv_zeta_truncated,
    mobius,
    prime_zeta,
    prime_zeta_deriv,
    prime_zeta_integers,
    zeta,
)

Q_MAX = 200
BETA_PARTS = range(2, 7)


@dataclass
class ConstantsBundle:
    alpha: mpf
    c: mpf
    h_prime_1: mpf
    euler_gamma: mpf
    six_over_pi2: mpf
    precision_digits: int
    alpha_product: mpf = None
    p_values: Dict[int, mpf] = field(default_factory=dict)
    p_derivs: Dict[int, mpf] = field(default_factory=dict)

    def as_strings(self, digits: Optional[int] = None) -> Dict[str, str]:
        digits = digits or self.precision_digits
        out = {
            name: mpmath.nstr(getattr(self, name), digits)
            for name in ("alpha", "c", "h_prime_1", "euler_gamma", "six_over_pi2")
        }
        for j, v in self.p_values.items():
            out[f"P({j})"] = mpmath.nstr(v, digits)
        for j, v in self.p_derivs.items():
            out[f"P'({j})"] = mpmath.nstr(v, digits)
        return out


def _integer_series_terms(ctx: PrecisionContext) -> int:
    # 2^-m below the series cutoff
    return int((ctx.working_digits + 5) * math.log2(10)) + 2


def _c_from_prime_zeta(ctx: PrecisionContext) -> mpf:
    """c = sum_{m>=2} P(m)/m, with P(m) <= 2 * 2^-m bounding the tail."""
    M = _integer_series_terms(ctx)
    values, _ = prime_zeta_integers(M, ctx)
    with ctx.workdps():
        return mpmath.fsum(values[m] / m for m in range(2, M + 1))


def _alpha_from_zeta_product(ctx: PrecisionContext) -> mpf:
    """alpha = prod_{m>=2} zeta(m)^{mu(m)/m}; log zeta(m) < 2^{1-m} bounds the tail."""
    M = _integer_series_terms(ctx)
    with ctx.workdps():
        log_alpha = mpmath.fsum(
            mobius(m) * mpmath.log(zeta(m, ctx)) / m for m in range(2, M + 1) if mobius(m)
        )
        return mpmath.exp(log_alpha)


def h_prime_at_one(ctx: PrecisionContext) -> mpf:
    """h'(1) = -sum_p log p / (p(p-1)).

    Primes up to the cutoff A are summed directly.  For p > A expand
    1/(p(p-1)) = sum_{m>=2} p^-m and Mobius-invert each P'_{>A}(m); grouping
    by n = rm leaves -sum_{n>=2} mu(n) (zeta_A'/zeta_A)(n).
    """
    with ctx.workdps():
        eps = ctx.series_cutoff_epsilon
        primes, logs, _ = _small_primes(ctx.prime_cutoff, mp.prec)
        total = -mpmath.fsum(lp / (p * (p - 1)) for p, lp in zip(primes, logs))
        n = 2
        while log_deriv_tail_bound(n, ctx) * 2 > eps:
            mu = mobius(n)
            if mu:
                total -= mu * log_deriv_zeta_truncated(n, ctx)
            n += 1
        return total


def constants(ctx: PrecisionContext, cache=None) -> ConstantsBundle:
    """alpha, c, h'(1), gamma and 6/pi^2, plus P(j), P'(j) for j = 2..6.

    alpha is computed both as exp(-sum P(m)/m) and as prod zeta(m)^{mu(m)/m};
    the two must agree to within 10^-(target_digits - 5).
    """
    if cache is not None:
        hit = cache.load_constants(ctx)
        if hit is not None:
            return hit
    c = _c_from_prime_zeta(ctx)
    alpha_prod = _alpha_from_zeta_product(ctx)
    with ctx.workdps():
        alpha = mpmath.exp(-c)
        tol = mpf(10) ** (-(ctx.target_digits - 5))
        if abs(alpha - alpha_prod) > tol:
            raise ConsistencyError(
                f"alpha routes disagree: {mpmath.nstr(alpha, 20)} vs {mpmath.nstr(alpha_prod, 20)}"
            )
        bundle = ConstantsBundle(
            alpha=alpha,
            c=c,
            h_prime_1=h_prime_at_one(ctx),
            euler_gamma=+mp.euler,
            six_over_pi2=6 / mp.pi**2,
            precision_digits=ctx.target_digits,
            alpha_product=alpha_prod,
            p_values={j: prime_zeta(j, ctx) for j in BETA_PARTS},
            p_derivs={j: prime_zeta_deriv(j, ctx) for j in BETA_PARTS},
        )
    if cache is not None:
        cache.store_constants(ctx, bundle)
    return bundle


def q_weights(m_max: int, ctx: PrecisionContext) -> List[mpf]:
    """Q(0..m_max): coefficients of exp(sum_{j>=2} P(j) z^j / j).

    Q(m) sums prod_j (P(j)/j)^{n_j} / n_j! over partitions of m without
    parts equal to 1; the exponential formula gives m Q(m) = sum_j P(j) Q(m-j).
    """
    if m_max < 0:
        raise DomainError("m_max must be nonnegative")
    if m_max > Q_MAX:
        raise CapacityError(f"q_weights supports m_max <= {Q_MAX}")
    P, _ = prime_zeta_integers(max(m_max, 2), ctx)
    with ctx.workdps():
        Q = [mpf(1)]
        for m in range(1, m_max + 1):
            Q.append(mpmath.fsum(P[j] * Q[m - j] for j in range(2, m + 1)) / m)
        return Q


def q_weight_by_partitions(m: int, ctx: PrecisionContext) -> mpf:
    """Q(m) by direct enumeration of partitions of m into parts >= 2."""
    if m == 0:
        return mpf(1)
    if m == 1:
        return mpf(0)
    P, _ = prime_zeta_integers(m, ctx)
    with ctx.workdps():
        total = mpf(0)
        for part in partitions(m):
            if part.multiplicities[0]:
                continue
            term = mpf(1)
            for j, n in enumerate(part.multiplicities, start=1):
                if n:
                    term *= (P[j] / j) ** n / math.factorial(n)
            total += term
        return total


def q_tilde_exact(k: int) -> Fraction:
    """2^-k sum_{n=0}^{k} (k-n+1) 2^n / n!: Q(k) with every P(j) replaced by 2^{1-j}."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    return sum(Fraction((k - n + 1) * 2**n, math.factorial(n)) for n in range(k + 1)) / 2**k


def q_tilde(k: int) -> mpf:
    q = q_tilde_exact(k)
    return mpf(q.numerator) / q.denominator


def beta_lower_bound(k: int, ctx: PrecisionContext, consts: Optional[ConstantsBundle] = None) -> mpf:
    """Lower bound for f(N_k) from the partitions k = (k-j) + j and k = (k-j-2) + 2 + j, j <= 6.

    Each partition integral is bounded below using P(s) > log(alpha/(s-1)) and
    the tangent-line bound P(js) > P(j) + P'(j)(s - 1).
    """
    if k < 9:
        raise DomainError("beta_k is defined for k >= 9")
    consts = consts or constants(ctx)
    a, P, dP = consts.alpha, consts.p_values, consts.p_derivs
    with ctx.workdps():
        single = mpmath.fsum((P[j] + a * dP[j] / mpf(2) ** (k - j)) / j for j in BETA_PARTS)
        double_two = (
            P[2] ** 2 + a * P[2] * dP[2] / mpf(2) ** (k - 4) + a**2 * dP[2] ** 2 / mpf(3) ** (k - 3)
        ) / 8
        double_mixed = mpmath.fsum(
            (
                P[2] * P[j]
                + a / mpf(2) ** (k - j - 1) * (dP[2] * P[j] + P[2] * dP[j])
                + a**2 * dP[2] * dP[j] / mpf(3) ** (k - j - 1)
            )
            / (2 * j)
            for j in range(3, 7)
        )
        return a * (1 + single + double_two + double_mixed)


@dataclass
class MinimumCertificate:
    """Outcome of assembling f(N_6) < f(N_k) for all k != 6."""

    passed: bool
    f6_high: mpf
    margins: Dict[int, mpf]  # k -> (lower bound for f(N_k)) - f6_high
    sources: Dict[int, str]
    beta_monotone: bool

    @property
    def worst(self):
        k = min(self.margins, key=lambda key: self.margins[key])
        return k, self.margins[k]


def global_minimum_certificate(
    brackets: Mapping[int, tuple],
    ctx: PrecisionContext,
    consts: Optional[ConstantsBundle] = None,
    beta_range=range(21, 61),
) -> MinimumCertificate:
    """Certify f(N_6) < f(N_k) for every k != 6.

    ``brackets`` maps k = 1..20 to certified (low, high) pairs for f(N_k).
    Orders k > 20 are handled by beta_k, which increases in k; its
    monotonicity is checked on ``beta_range`` so beta_21 exceeding f(N_6)
    extends to every larger k.
    """
    missing = [k for k in range(1, 21) if k not in brackets]
    if missing:
        raise DomainError(f"brackets needed for k = {missing}")
    consts = consts or constants(ctx)
    f6_high = brackets[6][1]
    margins, sources = {}, {}
    for k in range(1, 21):
        if k == 6:
            continue
        margins[k] = brackets[k][0] - f6_high
        sources[k] = "quadrature"
    betas = [beta_lower_bound(k, ctx, consts) for k in beta_range]
    monotone = all(b1 < b2 for b1, b2 in zip(betas, betas[1:]))
    for k, b in zip(beta_range, betas):
        margins[k] = b - f6_high
        sources[k] = "beta"
    passed = monotone and all(m > 0 for m in margins.values())
    return MinimumCertificate(passed, f6_high, margins, sources, monotone)


def upper_bound_audit(k: int, ctx: PrecisionContext, prime_pow_highs: Mapping[int, mpf],
                      Q: Optional[List[mpf]] = None) -> Dict[str, mpf]:
    """Numeric form of f(N_k) <= sum_{m} Q(m) * (1/(k-m)!) int P^{k-m} ds.

    ``prime_pow_highs[n]`` is a certified upper bound for (1/n!) int P(s)^n ds
    for 1 <= n <= k.  The partition with no part equal to 1 is bounded by
    Q(k) / (k log 2), using P(js) <= P(j) 2^{-j(s-1)}.
    Returns the bound and the implied constant C in 1 + C k 2^{-k/2}.
    """
    Q = Q if Q is not None else q_weights(k, ctx)
    with ctx.workdps():
        total = mpmath.fsum(Q[m] * prime_pow_highs[k - m] for m in range(0, k))
        total += Q[k] / (k * mpmath.log(2))
        C = (total - 1) / (k * mpf(2) ** (-mpf(k) / 2))
        return {"bound": total, "constant": C}
