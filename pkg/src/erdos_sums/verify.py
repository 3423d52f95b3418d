"""Verification suites behind ``erdos-sums verify``.

Each suite returns a SuiteReport of named checks with a signed margin
(positive means the check holds with that much room).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np
import mpmath
from mpmath import mp, mpf

from . import asymptotics, bounds
from .almost_prime_zeta import PkEvaluator, pk_star_via_partitions, pk_via_partitions
from .precision import PrecisionContext
from .quadrature import FamilyConfig, integrate_family
from .sieve_oracle import iter_segments, sieve_summary, trial_division
from .zeta_core import zeta

SUITES = ("identities", "inequalities", "oracle", "asymptotics", "minimum")
IDENTITY_POINTS = ("1.1", "1.5", "2", "3")


@dataclass
class Check:
    name: str
    passed: bool
    margin: str
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, margin, detail: str = "", passed: Optional[bool] = None):
        if passed is None:
            passed = margin > 0
        self.checks.append(Check(name, bool(passed), mpmath.nstr(mpf(margin), 6), detail))

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self):
        return {"suite": self.suite, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}


# identities


def identities(ctx: PrecisionContext, k_max: int = 15) -> SuiteReport:
    rep = SuiteReport("identities")
    tol = 10 * ctx.series_cutoff_epsilon
    for s in IDENTITY_POINTS:
        with ctx.workdps():
            point = mpf(s)
        ev = PkEvaluator.at(point, k_max, ctx)
        worst = worst_star = mpf(0)
        for k in range(1, k_max + 1):
            with mp.workdps(ev.working_digits):
                worst = max(worst, abs(ev.pk(k) - pk_via_partitions(k, point, ctx)))
                worst_star = max(worst_star, abs(ev.pk_star_values[k] - pk_star_via_partitions(k, point, ctx)))
        rep.add(f"recursion=partitions P_k({s}), k<={k_max}", tol - worst, f"max diff {mpmath.nstr(worst, 3)}")
        rep.add(f"recursion=partitions P*_k({s}), k<={k_max}", tol - worst_star,
                f"max diff {mpmath.nstr(worst_star, 3)}")
        dom = min(ev.pk_values[k] - ev.pk_star_values[k] + ev.errors[k] for k in range(1, k_max + 1))
        rep.add(f"P*_k({s}) <= P_k({s})", dom, passed=dom >= 0)

    ev = PkEvaluator.at(mpf(2), 60, ctx)
    with mp.workdps(ev.working_digits):
        z2, z4 = zeta(2, ctx), zeta(4, ctx)
        d = abs(mpmath.fsum(ev.pk_values) - z2)
        rep.add("sum_{k<=60} P_k(2) = zeta(2)", mpf("1e-15") - d, f"diff {mpmath.nstr(d, 3)}")
        d = abs(mpmath.fsum(ev.pk_star_values) - z2 / z4)
        rep.add("sum_{k<=60} P*_k(2) = zeta(2)/zeta(4)", mpf("1e-15") - d, f"diff {mpmath.nstr(d, 3)}")

    for check in log_power_bound_checks(ctx):
        rep.checks.append(check)
    return rep


def log_power_bound_checks(ctx: PrecisionContext, ks=range(2, 9)) -> List[Check]:
    """P_k(s) <= log(1/(s-1))^k / k! sampled on s - 1 = e^-u, u > 2k."""
    out = []
    for k in ks:
        worst = None
        for factor in (1.05, 1.5, 3, 6):
            u = mpf(2 * k) * mpf(factor)
            ev = PkEvaluator.at(None, k, ctx, s_minus_1=mpmath.exp(-u))
            with mp.workdps(ev.working_digits):
                slack = (u**k / math.factorial(k) - ev.pk(k) - ev.errors[k]) / ev.pk(k)
            worst = slack if worst is None else min(worst, slack)
        out.append(Check(f"P_{k}(s) <= log(1/(s-1))^{k}/{k}! near s=1", bool(worst > 0), mpmath.nstr(worst, 6),
                         "relative slack, u in {2.1k, 3k, 6k, 12k}"))
    return out


def alpha_routes(ctx: PrecisionContext) -> Check:
    consts = bounds.constants(ctx)
    with ctx.workdps():
        d = abs(consts.alpha - consts.alpha_product)
    tol = mpf(10) ** (-(ctx.target_digits - 5))
    return Check("alpha: exp(-sum P(m)/m) = prod zeta(m)^(mu(m)/m)", bool(d <= tol), mpmath.nstr(tol - d, 6),
                 f"diff {mpmath.nstr(d, 3)}")


# inequalities


def table_family(ctx: PrecisionContext, k_max: int = 20, config: Optional[FamilyConfig] = None):
    return integrate_family(("pk", "pk_star"), range(1, k_max + 1), ctx, config)


def power_family(ctx: PrecisionContext, ks=range(1, 41), config: Optional[FamilyConfig] = None):
    return integrate_family(("log_zeta_pow", "prime_zeta_pow"), ks, ctx, config)


def inequalities(ctx: PrecisionContext, table=None, powers=None) -> SuiteReport:
    rep = SuiteReport("inequalities")
    table = table or table_family(ctx)
    powers = powers or power_family(ctx)
    pk, pks = table["pk"], table["pk_star"]
    K = max(pk)
    with ctx.workdps():
        for k in range(1, K):
            lo_next, hi_next = pk[k + 1].bracket_low, pk[k + 1].bracket_high
            if k == 6:
                gap = lo_next - pk[6].bracket_high
                rep.add("f(N_6) < f(N_7), certified gap >= 2.2e-3", gap - mpf("2.2e-3"),
                        f"gap {mpmath.nstr(gap, 6)}")
            elif k < 6:
                rep.add(f"f(N_{k}) > f(N_{k + 1})", pk[k].bracket_low - hi_next)
            else:
                rep.add(f"f(N_{k}) < f(N_{k + 1})", lo_next - pk[k].bracket_high)
            rep.add(f"f(N*_{k}) > f(N*_{k + 1})", pks[k].bracket_low - pks[k + 1].bracket_high)

        consts = bounds.constants(ctx)
        alpha = consts.alpha
        for k in sorted(powers["log_zeta_pow"]):
            if k < 10:
                continue
            r = powers["log_zeta_pow"][k]
            dev = max(abs(r.bracket_low - 1), abs(r.bracket_high - 1)) * mpf(2) ** k
            rep.add(f"|(1/k!) int (log zeta)^k - 1| 2^k <= 10, k={k}", 10 - dev, f"{mpmath.nstr(dev, 4)}")
        for k in sorted(powers["prime_zeta_pow"]):
            r = powers["prime_zeta_pow"][k]
            if k >= 10:
                dev = max(abs(r.bracket_low - alpha), abs(r.bracket_high - alpha)) * mpf(2) ** k
                rep.add(f"|(1/k!) int P^k - alpha| 2^k <= 10, k={k}", 10 - dev, f"{mpmath.nstr(dev, 4)}")
            rep.add(f"(1/k!) int P^k > alpha, k={k}", r.bracket_low - alpha)

        highs = {n: r.bracket_high for n, r in powers["prime_zeta_pow"].items()}
        Q = bounds.q_weights(max(highs), ctx)
        for k in range(20, max(highs) + 1):
            if all(n in highs for n in range(1, k + 1)):
                audit = bounds.upper_bound_audit(k, ctx, highs, Q)
                rep.add(f"upper-bound audit k={k}: C <= 10", 10 - audit["constant"],
                        f"C = {mpmath.nstr(audit['constant'], 4)}")
        Q100 = bounds.q_weights(100, ctx)
        # Q(0) = Q~(0) = 1; the inequality is strict from k = 1 on
        worst = min(1 - Q100[k] / bounds.q_tilde(k) for k in range(1, 101))
        rep.add("Q(k) < Q~(k) for 1 <= k <= 100", worst, "relative slack")
    return rep


# oracle


def oracle(ctx: PrecisionContext, limit: int = 10**7, k_max: int = 8, table=None, summary=None) -> SuiteReport:
    rep = SuiteReport("oracle")
    bad = 0
    for seg in iter_segments(10**5):
        for n, om, sq in zip(seg.n.tolist(), seg.omega.tolist(), seg.squarefree.tolist()):
            if (om, sq) != trial_division(n):
                bad += 1
    rep.add("sieve Omega and mu^2 = trial division, n <= 1e5", -bad, f"{bad} mismatches", passed=bad == 0)

    summary = summary or sieve_summary(limit, k_max, ctx)
    table = table or integrate_family(("pk", "pk_star"), range(1, k_max + 1), ctx)
    with ctx.workdps():
        for k in range(1, k_max + 1):
            rep.add(f"partial f(N_{k})({limit}) < bracket", table["pk"][k].bracket_low - summary.partial_f[k])
            rep.add(f"partial f(N*_{k})({limit}) < bracket",
                    table["pk_star"][k].bracket_low - summary.partial_f_star[k])
    total = sum(summary.counts)
    rep.add("sum_k N_k(X) = X - 1", -abs(total - (limit - 1)), f"{total}", passed=total == limit - 1)
    for q in (2, 3, 4, 5):
        bad = [k for k in range(len(summary.counts))
               if sum(summary.count_ap(k, q, a) for a in range(q)) != summary.counts[k]]
        rep.add(f"sum_a N_k(X; {q}, a) = N_k(X)", -len(bad), f"bad k: {bad}", passed=not bad)
    return rep


# asymptotics


def direct_log_product(z: float, limit: int = 10**6, squarefree: bool = False):
    """log of the Sathe-Selberg product over p <= limit in float64, with a tail bound.

    The omitted primes contribute at most sum_{m>=2} |coeff_m| Y^{1-m} / (m(m-1)).
    """
    from .sieve_oracle import _sieve_primes

    ps = _sieve_primes(limit).astype(np.float64)
    if squarefree:
        terms = np.log1p(z / ps) + z * np.log1p(-1 / ps)
    else:
        terms = -np.log1p(-z / ps) + z * np.log1p(-1 / ps)
    value = math.fsum(terms.tolist())
    tail = 0.0
    for m in range(2, 60):
        coeff = abs(-((-z) ** m) - z) if squarefree else abs(z**m - z)
        tail += coeff * float(limit) ** (1 - m) / (m * (m - 1))
    rounding = 4e-16 * len(ps) * max(1.0, abs(value))
    return value, tail + rounding


def asymptotics_suite(ctx: PrecisionContext, limit: int = 10**8, summary=None) -> SuiteReport:
    rep = SuiteReport("asymptotics")
    tol = mpf("1e-20")
    with ctx.workdps():
        rep.add("G(1) = 1", tol - abs(asymptotics.G(1, ctx) - 1))
        rep.add("G*(1) = 6/pi^2", tol - abs(asymptotics.G_star(1, ctx) - 6 / mp.pi**2))
        for q in range(1, 13):
            g = asymptotics.G_q(1, q, ctx)
            rep.add(f"G_{q}(1) = phi({q})/{q}", tol - abs(g - mpf(asymptotics.euler_phi(q)) / q))
    for z in (0.25, 0.5, 0.75, 1.5):
        for sf in (False, True):
            f = asymptotics.G_star if sf else asymptotics.G
            with ctx.workdps():
                series = mpmath.log(f(z, ctx) * mpmath.gamma(1 + mpf(z)))
            direct, bracket = direct_log_product(z, squarefree=sf)
            d = abs(float(series) - direct)
            rep.add(f"{'G*' if sf else 'G'}({z}): series = product within bracket", bracket - d,
                    f"diff {d:.3g}, bracket {bracket:.3g}")
    for q in range(2, 31):
        worst = min(asymptotics.G(z, ctx) - asymptotics.G_q(z, q, ctx) for z in (0, 0.25, 0.5, 0.75, 1))
        rep.add(f"G_{q}(z) <= G(z) on [0,1]", worst, passed=worst >= 0)

    summary = summary or sieve_summary(limit, 2, ctx, moduli=(3,))
    m = asymptotics.main_term(1, limit, ctx=ctx)
    ratio = float(m) / summary.counts[2]
    rep.add(f"main term / N_2({limit:.0e}) within 15%", 0.15 - abs(ratio - 1), f"ratio {ratio:.4f}")
    m = asymptotics.main_term(2, limit, asymptotics.DensityFunction(asymptotics.PROGRESSION, 3), ctx=ctx)
    ratio = float(m) / summary.count_ap(3, 3, 1)
    rep.add(f"main term / N_3({limit:.0e}; 3, 1) within 20%", 0.2 - abs(ratio - 1), f"ratio {ratio:.4f}")
    return rep


# minimum


def minimum(ctx: PrecisionContext, table=None) -> SuiteReport:
    rep = SuiteReport("minimum")
    table = table or integrate_family(("pk",), range(1, 21), ctx)
    brackets = {k: (r.bracket_low, r.bracket_high) for k, r in table["pk"].items()}
    consts = bounds.constants(ctx)
    cert = bounds.global_minimum_certificate(brackets, ctx, consts)
    for k in sorted(cert.margins):
        rep.add(f"f(N_6) < f(N_{k}) [{cert.sources[k]}]", cert.margins[k])
    betas = [bounds.beta_lower_bound(k, ctx, consts) for k in range(9, 61)]
    steps = [b - a for a, b in zip(betas, betas[1:])]
    rep.add("beta_k increasing on [9, 60]", min(steps))
    b20 = bounds.beta_lower_bound(20, ctx, consts)
    rep.add("beta_20 > 0.99", b20 - mpf("0.99"), f"beta_20 = {mpmath.nstr(b20, 10)}")
    rep.add("0.99 > f(N_6)", mpf("0.99") - brackets[6][1])
    return rep


def run_suite(name: str, ctx: PrecisionContext, **kw) -> SuiteReport:
    if name == "identities":
        rep = identities(ctx)
        rep.checks.append(alpha_routes(PrecisionContext(max(30, ctx.target_digits))))
        return rep
    if name == "inequalities":
        return inequalities(ctx)
    if name == "oracle":
        return oracle(ctx, limit=kw.get("limit") or 10**7, k_max=kw.get("k_max") or 8)
    if name == "asymptotics":
        return asymptotics_suite(ctx, limit=kw.get("limit") or 10**8)
    if name == "minimum":
        return minimum(ctx)
    raise KeyError(name)
