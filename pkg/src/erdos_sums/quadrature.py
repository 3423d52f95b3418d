"""Certified integrals of almost-prime zeta functions over s in (1, infinity).

Every integral is split into three pieces:

* (1, 1 + e^-L]: bracketed analytically.  For P_k (and P*_k <= P_k) the bound
  P_k(s) <= log(1/(s-1))^k / k!, valid for s - 1 < e^{-2k}, gives
  [0, Gamma(k+1, L) / k!].
* [1 + e^-L, S]: Gauss-Legendre panels.  Below s = 2 the variable is
  u = -log(s - 1), which turns the logarithmic endpoint singularity into a
  u^k e^-u profile; above s = 2 panels in s grow geometrically.  Each panel
  is integrated at orders n and 2n and bisected until the difference meets
  its share of the tolerance.
* [S, infinity): every n in the sum has n >= n_min (2^k, or the primorial in
  the squarefree case), so F(s) <= F(S) n_min^{-(s-S)} and
  n_min^{-S}/log n_min <= integral <= F(S)/log n_min.

Several orders k, and both P_k and P*_k, are integrated on one shared set of
nodes; a single call to ``integrate_family`` therefore produces a whole table.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp, mpf

from .almost_prime_zeta import PkEvaluator
from .errors import ConsistencyError, DomainError, PrecisionNotAchieved
from .precision import PrecisionContext
from .zeta_core import _sieve, prime_zeta_multiples, zeta_with_error

KINDS = ("pk", "pk_star", "log_zeta_pow", "prime_zeta_pow")
K_LIMIT = 60
DEFAULT_TAIL_POINT = 10
DEFAULT_SINGULARITY_RATE = 4  # epsilon_k = e^{-rate * k}
MAX_BISECTIONS = 10


@dataclass
class IntegralResult:
    value: mpf
    bracket_low: mpf
    bracket_high: mpf
    singularity_bound: mpf
    tail_bound: mpf
    main_value: mpf
    main_error: mpf
    nodes_used: int
    kind: str = "pk"
    k: int = 0
    singularity_cut: int = 0  # L, with epsilon = e^-L
    tail_point: int = 0  # S

    @property
    def width(self) -> mpf:
        return self.bracket_high - self.bracket_low

    @property
    def digits_certified(self) -> int:
        if self.width <= 0:
            return mp.dps
        return int(mpmath.floor(-mpmath.log10(self.width))) - 1

    def contains(self, x) -> bool:
        return self.bracket_low <= x <= self.bracket_high


def upper_incomplete_gamma_int(k: int, x) -> mpf:
    """Gamma(k+1, x) = k! e^-x sum_{i=0}^{k} x^i / i! for integer k >= 0."""
    if k < 0:
        raise DomainError("integer order must be nonnegative")
    x = mpf(x)
    if x < 0:
        raise DomainError("x must be nonnegative")
    term = mpf(1)
    total = mpf(1)
    for i in range(1, k + 1):
        term = term * x / i
        total += term
    return math.factorial(k) * mpmath.exp(-x) * total


def _normalized_upper_gamma(k: int, L) -> mpf:
    """Gamma(k+1, L) / k!."""
    L = mpf(L)
    term = mpf(1)
    total = mpf(1)
    for i in range(1, k + 1):
        term = term * L / i
        total += term
    return mpmath.exp(-L) * total


@lru_cache(maxsize=32)
def gauss_legendre(n: int, prec: int) -> Tuple[tuple, tuple]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    with mp.workprec(prec + 20):
        nodes, weights = [], []
        for i in range(1, n + 1):
            x = mpmath.cos(mp.pi * (i - mpf(1) / 4) / (n + mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpf(1), x
                for m in range(2, n + 1):
                    p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpf(2) ** (-prec - 10):
                    break
            p0, p1 = mpf(1), x
            for m in range(2, n + 1):
                p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
            dp = n * (x * p1 - p0) / (x * x - 1)
            nodes.append(+x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    with mp.workprec(prec):
        return tuple(+x for x in nodes), tuple(+w for w in weights)


def default_order(target_digits: int) -> int:
    """Panel rule order; panels see an analytic strip of half-width pi."""
    return max(8, math.ceil(0.62 * (target_digits + 4)))


@lru_cache(maxsize=None)
def primorial(k: int) -> int:
    out, count = 1, 0
    for p in _sieve(max(30, 4 * k * max(1, int(math.log(k + 2)) + 1))):
        if count == k:
            break
        out *= p
        count += 1
    return out


@dataclass(frozen=True)
class Panel:
    """A quadrature panel; ``variable`` is 'u' (s = 1 + e^-u) or 's'."""

    variable: str
    a: Fraction
    b: Fraction
    level: int = 0


@dataclass(frozen=True)
class _Job:
    panel: Panel
    order: int
    kinds: Tuple[str, ...]
    k_max: int
    ctx: PrecisionContext


def _node_values(kinds, k_max: int, ctx: PrecisionContext, s=None, s_minus_1=None):
    """Integrand values F_kind[k] at one point, with absolute error bounds."""
    out = {}
    need_pk = "pk" in kinds or "pk_star" in kinds
    if need_pk:
        ev = PkEvaluator.at(s, k_max, ctx, s_minus_1)
        if "pk" in kinds:
            out["pk"] = (ev.pk_values, ev.errors)
        if "pk_star" in kinds:
            out["pk_star"] = (ev.pk_star_values, ev.errors)
        p1, p1err = ev.p_cache[1], ev.p_errors[1]
    wctx = ctx.for_order(k_max)
    if "prime_zeta_pow" in kinds:
        if not need_pk:
            vals, errs = prime_zeta_multiples(s, 1, wctx, s_minus_1)
            p1, p1err = vals[0], errs[0]
        out["prime_zeta_pow"] = _normalized_powers(p1, p1err, k_max, wctx)
    if "log_zeta_pow" in kinds:
        with wctx.workdps():
            z, zerr = zeta_with_error(s, wctx, s_minus_1)
            lz = mpmath.log(z)
            out["log_zeta_pow"] = _normalized_powers(lz, zerr / z, k_max, wctx)
    return out


def _normalized_powers(x, xerr, k_max, ctx):
    """x^k / k! and bounds for the propagated error, k = 0..k_max."""
    with ctx.workdps():
        ulp = mpf(2) ** (-mp.prec)
        vals, errs = [mpf(1)], [mpf(0)]
        hi = abs(x) + xerr
        hi_pow = mpf(1)
        for k in range(1, k_max + 1):
            vals.append(vals[-1] * x / k)
            hi_pow = hi_pow * hi / k
            errs.append(hi_pow - abs(vals[-1]) + 2 * k * ulp * abs(vals[-1]))
        return vals, errs


def _panel_rule(job: _Job, order: int):
    """Order-`order` GL sums over one panel for every kind and k, plus node error."""
    panel, ctx = job.panel, job.ctx.for_order(job.k_max)
    nodes, weights = gauss_legendre(order, _prec_bits(ctx))
    with ctx.workdps():
        a = mpf(panel.a.numerator) / panel.a.denominator
        b = mpf(panel.b.numerator) / panel.b.denominator
        half, mid = (b - a) / 2, (b + a) / 2
        sums = {kind: [mpf(0)] * (job.k_max + 1) for kind in job.kinds}
        errs = {kind: [mpf(0)] * (job.k_max + 1) for kind in job.kinds}
        for x, w in zip(nodes, weights):
            t = mid + half * x
            if panel.variable == "u":
                sm1 = mpmath.exp(-t)
                vals = _node_values(job.kinds, job.k_max, job.ctx, s_minus_1=sm1)
                jac = sm1 * w * half
            else:
                vals = _node_values(job.kinds, job.k_max, job.ctx, s=t)
                jac = w * half
            for kind in job.kinds:
                fv, fe = vals[kind]
                row, erow = sums[kind], errs[kind]
                for k in range(job.k_max + 1):
                    row[k] += jac * fv[k]
                    erow[k] += jac * fe[k]
        return sums, errs


def _prec_bits(ctx: PrecisionContext) -> int:
    return mpmath.libmp.dps_to_prec(ctx.working_digits)


def _evaluate_panel(job: _Job):
    low, _ = _panel_rule(job, job.order)
    high, node_err = _panel_rule(job, 2 * job.order)
    return low, high, node_err


def _initial_panels(L_max: int, S_max: int, s_breaks: Iterable[int]) -> List[Panel]:
    panels = [Panel("u", Fraction(a), Fraction(a + 2)) for a in range(0, L_max, 2)]
    edges = {2, S_max}
    edge = 2
    while edge < S_max:
        step = min(max(edge - 1, 1), 4)
        edge = edge + step
        edges.add(min(edge, S_max))
    edges.update(b for b in s_breaks if 2 <= b <= S_max)
    edges = sorted(edges)
    panels += [Panel("s", Fraction(a), Fraction(b)) for a, b in zip(edges, edges[1:])]
    return panels


def _split(panel: Panel) -> Tuple[Panel, Panel]:
    a, b = panel.a, panel.b
    m = (a + b) / 2
    return Panel(panel.variable, a, m, panel.level + 1), Panel(panel.variable, m, b, panel.level + 1)


def _in_range(panel: Panel, L: int, S: int) -> bool:
    return panel.b <= (L if panel.variable == "u" else S)


def singularity_cut(k: int, budget: mpf, rate: int = DEFAULT_SINGULARITY_RATE) -> int:
    """Even L >= max(rate*k, 2k+2) with Gamma(k+1, L)/k! <= budget."""
    L = max(rate * k, 2 * k + 2)
    L += L % 2
    while _normalized_upper_gamma(k, L) > budget:
        L += 2
    return L


def _tail_decay(kind: str, k: int) -> mpf:
    """log of the smallest n contributing to the integrand (decay rate in s)."""
    if kind == "pk_star":
        return mpmath.log(primorial(k))
    return k * mpmath.log(2)


def _tail_width_estimate(kind: str, k: int, S: int) -> mpf:
    """Generous estimate of the tail bracket width before F(S) is known."""
    if kind == "pk_star":
        n0 = primorial(k)
        nxt = primorial(k + 1) // _nth_prime(k)
        return 4 * mpf(nxt) ** (-S) / mpmath.log(n0)
    base = mpf(2) ** (-k * S) * (mpf(2) / 3) ** S / (k * mpmath.log(2))
    if kind == "pk":
        return 4 * base
    return 4 * k * base / mpmath.factorial(k)


@lru_cache(maxsize=None)
def _nth_prime(k: int) -> int:
    return primorial(k) // primorial(k - 1)


def tail_point(kind: str, k: int, budget: mpf, S_default: int = DEFAULT_TAIL_POINT) -> int:
    S = S_default
    while _tail_width_estimate(kind, k, S) > budget:
        S += 1
    return S


def _singularity_bracket(kind: str, k: int, L: int) -> Tuple[mpf, mpf]:
    g = _normalized_upper_gamma(k, L)
    if kind == "log_zeta_pow":
        # log(1/(s-1)) < log zeta(s) < log(1/(s-1)) + 0.6 (s-1) on (1, 2]
        return g, g * (1 + mpf("0.6") * mpmath.exp(-L) / L) ** k
    return mpf(0), g


@dataclass
class FamilyConfig:
    tail_point: int = DEFAULT_TAIL_POINT
    singularity_rate: int = DEFAULT_SINGULARITY_RATE
    order: Optional[int] = None
    threads: int = 1
    require_target: bool = True


def integrate_family(
    kinds: Sequence[str],
    ks: Sequence[int],
    ctx: PrecisionContext,
    config: Optional[FamilyConfig] = None,
) -> Dict[str, Dict[int, IntegralResult]]:
    """Certified integrals over (1, infinity) for every kind in ``kinds`` and k in ``ks``.

    kinds: any of 'pk' (P_k), 'pk_star' (P*_k), 'log_zeta_pow'
    ([log zeta]^k / k!) and 'prime_zeta_pow' (P^k / k!).
    """
    config = config or FamilyConfig()
    kinds = tuple(kinds)
    for kind in kinds:
        if kind not in KINDS:
            raise DomainError(f"unknown integrand kind {kind!r}")
    ks = sorted(set(int(k) for k in ks))
    if not ks or ks[0] < 1 or ks[-1] > K_LIMIT:
        raise DomainError(f"orders must lie in 1..{K_LIMIT}")
    k_max = ks[-1]
    wctx = ctx.for_order(k_max)
    order = config.order or default_order(ctx.target_digits)

    with wctx.workdps():
        allowed = mpf(10) ** (-(ctx.target_digits + 1))
        piece_budget = allowed / 8
        cuts = {k: singularity_cut(k, piece_budget, config.singularity_rate) for k in ks}
        points = {
            (kind, k): tail_point(kind, k, piece_budget, config.tail_point)
            for kind in kinds
            for k in ks
        }
    L_max = max(cuts.values())
    S_by_k = {k: max(points[(kind, k)] for kind in kinds) for k in ks}
    S_max = max(S_by_k.values())
    panels = _initial_panels(L_max, S_max, S_by_k.values())
    n_initial = len(panels)

    accepted: List[Tuple[Panel, dict, dict]] = []
    pending = [(p, allowed / 4 / n_initial) for p in panels]
    nodes_used = 0
    while pending:
        jobs = [_Job(p, order, kinds, k_max, ctx) for p, _ in pending]
        results = _map(jobs, config.threads)
        nodes_used += 3 * order * len(jobs)
        retry = []
        with wctx.workdps():
            for (panel, tol), (low, high, node_err) in zip(pending, results):
                worst = mpf(0)
                for kind in kinds:
                    for k in ks:
                        est = 4 * abs(high[kind][k] - low[kind][k])
                        worst = max(worst, est - tol if est > tol else mpf(0))
                if worst > 0:
                    if panel.level >= MAX_BISECTIONS:
                        raise PrecisionNotAchieved(
                            f"panel {panel} did not converge after {MAX_BISECTIONS} bisections"
                        )
                    retry.extend((child, tol / 2) for child in _split(panel))
                    continue
                errs = {
                    kind: [4 * abs(high[kind][k] - low[kind][k]) + node_err[kind][k] for k in range(k_max + 1)]
                    for kind in kinds
                }
                accepted.append((panel, high, errs))
        pending = retry

    # fixed summation order keeps results independent of scheduling
    accepted.sort(key=lambda item: (item[0].variable == "s", item[0].a))

    out: Dict[str, Dict[int, IntegralResult]] = {kind: {} for kind in kinds}
    with wctx.workdps():
        tail_cache = {}
        for S in sorted(set(S_by_k.values())):
            tail_cache[S] = _node_values(kinds, k_max, ctx, s=mpf(S))
        for kind in kinds:
            for k in ks:
                L, S = cuts[k], S_by_k[k]
                main = mpf(0)
                main_err = mpf(0)
                for panel, sums, errs in accepted:
                    if _in_range(panel, L, S):
                        main += sums[kind][k]
                        main_err += errs[kind][k]
                sing_lo, sing_hi = _singularity_bracket(kind, k, L)
                F_S, F_S_err = tail_cache[S][kind][0][k], tail_cache[S][kind][1][k]
                decay = _tail_decay(kind, k)
                tail_lo = mpmath.exp(-S * decay) / decay
                if kind in ("log_zeta_pow", "prime_zeta_pow"):
                    tail_lo /= mpmath.factorial(k)
                tail_hi = (F_S + F_S_err) / decay
                tail_lo = min(tail_lo, tail_hi)
                if kind == "pk" and F_S > 2 * mpmath.exp(-S * decay):
                    raise ConsistencyError(f"P_{k}({S}) exceeds 2^(1-{k}S); tail bound unusable")
                value = main + (sing_lo + sing_hi) / 2 + (tail_lo + tail_hi) / 2
                res = IntegralResult(
                    value=value,
                    bracket_low=main - main_err + sing_lo + tail_lo,
                    bracket_high=main + main_err + sing_hi + tail_hi,
                    singularity_bound=sing_hi - sing_lo,
                    tail_bound=tail_hi - tail_lo,
                    main_value=main,
                    main_error=main_err,
                    nodes_used=nodes_used,
                    kind=kind,
                    k=k,
                    singularity_cut=L,
                    tail_point=S,
                )
                if config.require_target and res.width > allowed:
                    raise PrecisionNotAchieved(
                        f"{kind} k={k}: bracket width {mpmath.nstr(res.width, 3)} exceeds "
                        f"10^-{ctx.target_digits + 1}"
                    )
                out[kind][k] = res
    return out


def _map(jobs, threads: int):
    if threads <= 1 or len(jobs) < 2:
        return [_evaluate_panel(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_evaluate_panel, jobs))


def f_Nk(k: int, ctx: PrecisionContext, config: Optional[FamilyConfig] = None) -> IntegralResult:
    """f(N_k) = sum_{Omega(n)=k} 1/(n log n) = int_1^infinity P_k(s) ds."""
    return integrate_family(("pk",), [k], ctx, config)["pk"][k]


def f_Nk_star(k: int, ctx: PrecisionContext, config: Optional[FamilyConfig] = None) -> IntegralResult:
    """f(N*_k): the squarefree analogue, int_1^infinity P*_k(s) ds."""
    return integrate_family(("pk_star",), [k], ctx, config)["pk_star"][k]


def f_table(ks: Sequence[int], ctx: PrecisionContext, squarefree: bool = True,
            config: Optional[FamilyConfig] = None):
    kinds = ("pk", "pk_star") if squarefree else ("pk",)
    return integrate_family(kinds, ks, ctx, config)


def int_log_zeta_pow(k: int, ctx: PrecisionContext, config: Optional[FamilyConfig] = None) -> IntegralResult:
    """(1/k!) int_1^infinity [log zeta(s)]^k ds."""
    return integrate_family(("log_zeta_pow",), [k], ctx, config)["log_zeta_pow"][k]


def int_prime_zeta_pow(k: int, ctx: PrecisionContext, config: Optional[FamilyConfig] = None) -> IntegralResult:
    """(1/k!) int_1^infinity P(s)^k ds."""
    return integrate_family(("prime_zeta_pow",), [k], ctx, config)["prime_zeta_pow"][k]
