"""Command-line front end.

    erdos-sums table --kmax 10 --digits 20 [--squarefree] [--deltas]
    erdos-sums verify {identities,inequalities,oracle,asymptotics,minimum}
    erdos-sums constants --digits 30
    erdos-sums beta --k 20
    erdos-sums sieve --limit 1e6 --kmax 6
    erdos-sums asymptotic --k 2 --x 1e8

Exit status: 0 ok, 1 verification failure, 2 precision failure, 3 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Dict, List, Optional

import mpmath
from mpmath import mp, mpf

from . import __version__, asymptotics, bounds, verify
from .cache import ConstantCache
from .errors import CancellationError, ConsistencyError, ErdosSumError, PrecisionNotAchieved
from .precision import PrecisionContext
from .quadrature import DEFAULT_TAIL_POINT, K_LIMIT, FamilyConfig, integrate_family
from .sieve_oracle import count_ap, sieve_summary

EXIT_OK, EXIT_VERIFY, EXIT_PRECISION, EXIT_USAGE = 0, 1, 2, 3
UNCERTAIN = 2  # trailing digits printed beyond the certified ones


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fixed(x, decimals: int) -> str:
    """x rounded half-even to ``decimals`` places, as a plain decimal string."""
    d = Decimal(mpmath.nstr(mpf(x), decimals + 12, strip_zeros=False))
    return format(d.quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_EVEN), "f")


def sci(x, digits: int = 3) -> str:
    return mpmath.nstr(mpf(x), digits, min_fixed=1, max_fixed=0)


@dataclass
class ReportRow:
    k: int
    value: str
    bracket_width: str
    digits_certified: int
    components: Dict[str, str]
    quantity: str = "f(N_k)"

    def as_dict(self, provenance: Optional[dict] = None) -> dict:
        out = {
            "k": self.k,
            "quantity": self.quantity,
            "value": self.value,
            "bracket_width": self.bracket_width,
            "digits_certified": self.digits_certified,
            "uncertain_digits": UNCERTAIN,
            "components": dict(self.components),
        }
        if provenance:
            out["provenance"] = provenance
        return out

    def plain(self) -> str:
        head, tail = self.value[:-UNCERTAIN], self.value[-UNCERTAIN:]
        return f"{self.k:>3}  {head}[{tail}]  {self.bracket_width:>9}  {self.digits_certified}"


def make_row(result, shift=None, sign: int = 1, quantity: str = "f(N_k)") -> ReportRow:
    """Render an IntegralResult; ``sign * (value - shift)`` is reported when shift is given."""
    decimals = result.digits_certified + UNCERTAIN
    value = result.value if shift is None else sign * (result.value - shift)
    return ReportRow(
        k=result.k,
        value=fixed(value, decimals),
        bracket_width=sci(result.width),
        digits_certified=result.digits_certified,
        components={
            "singularity": sci(result.singularity_bound),
            "main": fixed(result.main_value, decimals),
            "tail": sci(result.tail_bound),
        },
        quantity=quantity,
    )


def render_rows(rows: List[ReportRow], fmt: str, provenance: dict) -> str:
    if fmt == "json":
        return json.dumps([r.as_dict(provenance) for r in rows], indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "value", "bracket_width", "digits"])
        for r in rows:
            w.writerow([r.k, r.value, r.bracket_width, r.digits_certified])
        return buf.getvalue().rstrip("\n")
    title = rows[0].quantity if rows else ""
    lines = [f"# {title}; digits in brackets are not certified", "  k  value  bracket_width  digits"]
    lines += [r.plain() for r in rows]
    return "\n".join(lines)


def _parse_number(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--kmax", type=int, default=None)
    common.add_argument("--digits", type=int, default=20)
    common.add_argument("--format", choices=("csv", "json", "plain"), default="plain")
    common.add_argument("--limit", type=_parse_number, default=None)
    common.add_argument("--squarefree", action="store_true")
    common.add_argument("--deltas", action="store_true")
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--prime-cutoff", type=int, default=100)
    common.add_argument("--tail-point", type=int, default=DEFAULT_TAIL_POINT)

    parser = _Parser(prog="erdos-sums", description="Erdos sums over k-almost primes")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    sub.add_parser("table", parents=[common], help="f(N_k) or f(N*_k) for k = 1..kmax")
    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=verify.SUITES)
    sub.add_parser("constants", parents=[common], help="alpha, c, h'(1), gamma, 6/pi^2")
    p = sub.add_parser("beta", parents=[common], help="the lower bound beta_k")
    p.add_argument("--k", type=int, required=True)
    p = sub.add_parser("sieve", parents=[common], help="sieve counts and partial sums")
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--output", default=None, help="write the snapshot to this file")
    p = sub.add_parser("asymptotic", parents=[common], help="Sathe-Selberg main term")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--q", type=int, default=None)
    return parser


def _context(args) -> PrecisionContext:
    if args.digits < 1:
        raise UsageError("--digits must be positive")
    if args.prime_cutoff < 2:
        raise UsageError("--prime-cutoff must be at least 2")
    return PrecisionContext(target_digits=args.digits, prime_cutoff=args.prime_cutoff)


def _provenance(args, ctx: PrecisionContext) -> dict:
    return {
        "module": "erdos_sums",
        "version": __version__,
        "precision": ctx.target_digits,
        "guard_digits": ctx.guard_digits,
        "prime_cutoff": ctx.prime_cutoff,
        "tail_point": args.tail_point,
    }


def _cache(args) -> Optional[ConstantCache]:
    return ConstantCache(args.cache_dir) if args.cache_dir else None


def cmd_table(args, out) -> int:
    if args.kmax is None:
        args.kmax = 10
    if not 1 <= args.kmax <= K_LIMIT:
        raise UsageError(f"--kmax must lie in 1..{K_LIMIT}")
    ctx = _context(args)
    kind = "pk_star" if args.squarefree else "pk"
    config = FamilyConfig(tail_point=args.tail_point, threads=args.threads)
    results = integrate_family((kind,), range(1, args.kmax + 1), ctx, config)[kind]
    rows = []
    with ctx.for_order(args.kmax).workdps():
        for k in range(1, args.kmax + 1):
            r = results[k]
            if not args.deltas:
                rows.append(make_row(r, quantity="f(N*_k)" if args.squarefree else "f(N_k)"))
            elif args.squarefree:
                rows.append(make_row(r, shift=6 / mp.pi**2, quantity="f(N*_k) - 6/pi^2"))
            else:
                rows.append(make_row(r, shift=mpf(1), sign=-1, quantity="1 - f(N_k)"))
    print(render_rows(rows, args.format, _provenance(args, ctx)), file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    ctx = _context(args)
    kw = {"limit": args.limit}
    if args.suite == "oracle":
        kw["k_max"] = 8 if args.kmax is None else args.kmax
    report = verify.run_suite(args.suite, ctx, **kw)
    if args.format == "json":
        body = report.as_dict()
        body["provenance"] = _provenance(args, ctx)
        print(json.dumps(body, indent=2), file=out)
    else:
        for c in report.checks:
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  margin={c.margin}  {c.detail}".rstrip(), file=out)
        n_fail = len(report.failures())
        print(f"{args.suite}: {len(report.checks) - n_fail}/{len(report.checks)} checks passed", file=out)
    return EXIT_OK if report.passed else EXIT_VERIFY


def _emit_pairs(pairs, args, ctx, out):
    if args.format == "json":
        body = {"values": dict(pairs), "provenance": _provenance(args, ctx)}
        print(json.dumps(body, indent=2), file=out)
    elif args.format == "csv":
        print("name,value", file=out)
        for name, value in pairs:
            print(f"{name},{value}", file=out)
    else:
        width = max(len(name) for name, _ in pairs)
        for name, value in pairs:
            print(f"{name:<{width}}  {value}", file=out)


def cmd_constants(args, out) -> int:
    ctx = _context(args)
    consts = bounds.constants(ctx, cache=_cache(args))
    with ctx.workdps():
        pairs = [(name, mpmath.nstr(getattr(consts, name), ctx.target_digits))
                 for name in ("alpha", "c", "h_prime_1", "euler_gamma", "six_over_pi2")]
    _emit_pairs(pairs, args, ctx, out)
    return EXIT_OK


def cmd_beta(args, out) -> int:
    ctx = _context(args)
    consts = bounds.constants(ctx, cache=_cache(args))
    value = bounds.beta_lower_bound(args.k, ctx, consts)
    with ctx.workdps():
        _emit_pairs([(f"beta_{args.k}", mpmath.nstr(value, ctx.target_digits))], args, ctx, out)
    return EXIT_OK


def cmd_sieve(args, out) -> int:
    ctx = _context(args)
    limit = args.limit or 10**6
    if args.q is not None or args.a is not None:
        if args.q is None or args.a is None or args.k is None:
            raise UsageError("--q, --a and --k go together")
        n = count_ap(limit, args.k, args.q, args.a)
        _emit_pairs([(f"N_{args.k}({limit};{args.q},{args.a})", str(n))], args, ctx, out)
        return EXIT_OK
    summary = sieve_summary(limit, 6 if args.kmax is None else args.kmax, ctx)
    if args.output:
        summary.save(args.output)
    if args.format == "json":
        with ctx.workdps():
            body = {
                "limit": summary.limit,
                "k_max": summary.k_max,
                "precision": summary.precision,
                "partial_f": [mpmath.nstr(v, ctx.target_digits) for v in summary.partial_f],
                "partial_f_star": [mpmath.nstr(v, ctx.target_digits) for v in summary.partial_f_star],
                "counts": summary.counts,
                "counts_star": summary.counts_star,
                "provenance": _provenance(args, ctx),
            }
        print(json.dumps(body, indent=2), file=out)
    else:
        print(summary.to_text().rstrip("\n"), file=out)
    return EXIT_OK


def cmd_asymptotic(args, out) -> int:
    ctx = _context(args)
    if args.squarefree and args.q:
        raise UsageError("--squarefree and --q are exclusive")
    if args.squarefree:
        variant = asymptotics.DensityFunction(asymptotics.SQUAREFREE)
        label = f"N*_{args.k + 1}"
    elif args.q:
        variant = asymptotics.DensityFunction(asymptotics.PROGRESSION, args.q)
        label = f"N_{args.k + 1}(x;{args.q},a)"
    else:
        variant = asymptotics.DensityFunction()
        label = f"N_{args.k + 1}"
    value = asymptotics.main_term(args.k, args.x, variant, ctx)
    with ctx.workdps():
        _emit_pairs([(f"{label} main term at x={args.x:g}", mpmath.nstr(value, ctx.target_digits))], args, ctx, out)
    return EXIT_OK


COMMANDS = {
    "table": cmd_table,
    "verify": cmd_verify,
    "constants": cmd_constants,
    "beta": cmd_beta,
    "sieve": cmd_sieve,
    "asymptotic": cmd_asymptotic,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"erdos-sums: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionNotAchieved, CancellationError) as exc:
        print(f"erdos-sums: precision not achieved: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except ConsistencyError as exc:
        print(f"erdos-sums: consistency check failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ErdosSumError as exc:
        print(f"erdos-sums: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
