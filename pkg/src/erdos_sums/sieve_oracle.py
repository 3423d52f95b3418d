"""Brute-force ground truth from a segmented sieve.

Each segment [lo, hi) is classified with numpy: for every prime p <= sqrt(X)
and every power p^e < hi the multiples of p^e get one more prime factor and
log p added to a running log.  Whatever log n is not accounted for belongs
to a single prime above sqrt(X).  Multiples of p^2 are marked non-squarefree.

Per-segment float64 sums (pairwise) are folded into mpf accumulators in
segment order, so results are deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import mpmath
from mpmath import mpf

from .errors import DomainError, MemoryBudgetError
from .precision import PrecisionContext

MAX_LIMIT = 10**10
DEFAULT_SEGMENT = 1 << 22
DEFAULT_MEMORY_BUDGET = 512 * 2**20
BYTES_PER_ENTRY = 48  # n, log n, running log, weights, omega, flags
SNAPSHOT_VERSION = "erdos-sums-sieve v1"
SUM_CHUNK = 1 << 14


@dataclass
class Segment:
    n: np.ndarray  # int64
    omega: np.ndarray  # int8
    squarefree: np.ndarray  # bool


def _sieve_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.nonzero(flags)[0].astype(np.int64)


def _segment_size(limit: int, segment_size: Optional[int], memory_budget: int) -> int:
    size = segment_size or min(DEFAULT_SEGMENT, max(limit, 1))
    if size * BYTES_PER_ENTRY > memory_budget:
        size = memory_budget // BYTES_PER_ENTRY
        if size < 1024:
            raise MemoryBudgetError(f"memory budget {memory_budget} bytes is too small for the sieve")
    return size


def iter_segments(limit: int, segment_size: Optional[int] = None,
                  memory_budget: int = DEFAULT_MEMORY_BUDGET, start: int = 2) -> Iterator[Segment]:
    """Yield Omega(n) and squarefree flags for n in [start, limit], segment by segment."""
    if limit > MAX_LIMIT:
        raise DomainError(f"limit {limit} exceeds {MAX_LIMIT}")
    if limit < start:
        return
    size = _segment_size(limit, segment_size, memory_budget)
    primes = _sieve_primes(math.isqrt(limit))
    logs = np.log(primes.astype(np.float64))
    lo = start
    while lo <= limit:
        hi = min(lo + size, limit + 1)
        n = np.arange(lo, hi, dtype=np.int64)
        omega = np.zeros(hi - lo, dtype=np.int8)
        logacc = np.zeros(hi - lo, dtype=np.float64)
        sqf = np.ones(hi - lo, dtype=bool)
        for p, lp in zip(primes.tolist(), logs.tolist()):
            if p >= hi:
                break
            q = p
            while q < hi:
                first = (-lo) % q
                if first < hi - lo:
                    omega[first::q] += 1
                    logacc[first::q] += lp
                    if q == p * p:
                        sqf[first::q] = False
                q *= p
        # the leftover cofactor is 1 or a single prime > sqrt(limit) >= 2
        omega += (logacc < np.log(n.astype(np.float64)) - 0.5).astype(np.int8)
        yield Segment(n, omega, sqf)
        lo = hi


@dataclass
class SieveSummary:
    limit: int
    k_max: int
    precision: int
    partial_f: List[mpf] = field(default_factory=list)  # index k = 0..k_max
    partial_f_star: List[mpf] = field(default_factory=list)
    counts: List[int] = field(default_factory=list)  # every k, n in [2, limit]
    counts_star: List[int] = field(default_factory=list)
    ap_counts: Dict[int, List[List[int]]] = field(default_factory=dict)  # q -> [k][a]

    def count_ap(self, k: int, q: int, a: int) -> int:
        _check_residue(q, a)
        if q == 1:
            return self.counts[k] if k < len(self.counts) else 0
        if q not in self.ap_counts:
            raise DomainError(f"modulus {q} was not tallied")
        table = self.ap_counts[q]
        return table[k][a] if k < len(table) else 0

    def to_text(self) -> str:
        lines = [
            SNAPSHOT_VERSION,
            f"limit {self.limit}",
            f"k_max {self.k_max}",
            f"precision {self.precision}",
        ]
        with mpmath.workdps(self.precision + 5):
            for k, v in enumerate(self.partial_f):
                lines.append(f"f {k} {mpmath.nstr(v, self.precision + 5)}")
            for k, v in enumerate(self.partial_f_star):
                lines.append(f"fs {k} {mpmath.nstr(v, self.precision + 5)}")
        lines += [f"N {k} {c}" for k, c in enumerate(self.counts)]
        lines += [f"Ns {k} {c}" for k, c in enumerate(self.counts_star)]
        for q in sorted(self.ap_counts):
            for k, row in enumerate(self.ap_counts[q]):
                lines.append(f"ap {q} {k} " + " ".join(map(str, row)))
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "SieveSummary":
        with open(path) as fh:
            lines = fh.read().split("\n")
        if lines[0] != SNAPSHOT_VERSION:
            raise DomainError(f"{path}: not a sieve snapshot (header {lines[0]!r})")
        head = dict(line.split() for line in lines[1:4])
        out = cls(int(head["limit"]), int(head["k_max"]), int(head["precision"]))
        ap: Dict[int, Dict[int, List[int]]] = {}
        with mpmath.workdps(out.precision + 5):
            for line in lines[4:]:
                if not line:
                    continue
                tag, *rest = line.split()
                if tag == "f":
                    out.partial_f.append(mpf(rest[1]))
                elif tag == "fs":
                    out.partial_f_star.append(mpf(rest[1]))
                elif tag == "N":
                    out.counts.append(int(rest[1]))
                elif tag == "Ns":
                    out.counts_star.append(int(rest[1]))
                elif tag == "ap":
                    ap.setdefault(int(rest[0]), {})[int(rest[1])] = [int(x) for x in rest[2:]]
        out.ap_counts = {q: [rows[k] for k in sorted(rows)] for q, rows in ap.items()}
        return out


def _check_residue(q: int, a: int):
    if q < 1:
        raise DomainError("modulus must be >= 1")
    if not 0 <= a < q:
        raise DomainError(f"residue {a} out of range for modulus {q}")


def sieve_summary(limit: int, k_max: int, ctx: Optional[PrecisionContext] = None,
                  moduli: Sequence[int] = (2, 3, 4, 5), segment_size: Optional[int] = None,
                  memory_budget: int = DEFAULT_MEMORY_BUDGET) -> SieveSummary:
    """Counts N_k(X), N*_k(X), AP tallies and partial sums of f(N_k), f(N*_k)."""
    if limit < 1:
        raise DomainError("limit must be positive")
    if k_max < 0:
        raise DomainError("k_max must be nonnegative")
    ctx = ctx or PrecisionContext()
    summary = SieveSummary(limit, k_max, ctx.target_digits)
    width = max(1, limit.bit_length())
    moduli = [q for q in moduli if q > 1]
    L = math.lcm(*moduli) if moduli else 1
    if L > 10**4:
        raise DomainError("moduli too large to tally together")
    n_classes = (k_max + 2) * 2  # k clipped at k_max + 1, times squarefree flag
    with ctx.workdps():
        f = [mpf(0)] * (k_max + 1)
        fs = [mpf(0)] * (k_max + 1)
        counts = np.zeros((width + 1, 2), dtype=np.int64)
        residues = np.zeros((width + 1, L), dtype=np.int64)
        for seg in iter_segments(limit, segment_size, memory_budget):
            nf = seg.n.astype(np.float64)
            w = 1.0 / (nf * np.log(nf))
            om = seg.omega.astype(np.int64)
            sq = seg.squarefree.astype(np.int64)
            counts += np.bincount(om * 2 + sq, minlength=counts.size).reshape(counts.shape)
            if L > 1:
                residues += np.bincount(om * L + seg.n % L, minlength=residues.size).reshape(residues.shape)
            # bincount sums sequentially, so keep each run short and add the runs pairwise
            key = np.minimum(om, k_max + 1) * 2 + sq
            chunk = np.arange(len(om)) // SUM_CHUNK
            sums = np.bincount(chunk * n_classes + key, weights=w,
                               minlength=(chunk[-1] + 1) * n_classes)
            sums = np.sum(sums.reshape(-1, k_max + 2, 2), axis=0)
            for k in range(1, k_max + 1):
                f[k] += mpf(float(sums[k, 0])) + mpf(float(sums[k, 1]))
                fs[k] += mpf(float(sums[k, 1]))
        summary.partial_f, summary.partial_f_star = f, fs
    summary.counts = counts.sum(axis=1).tolist()
    summary.counts_star = counts[:, 1].tolist()
    for q in moduli:
        folded = residues.reshape(width + 1, L // q, q).sum(axis=1)
        summary.ap_counts[q] = folded.tolist()
    return summary


def count_ap(limit: int, k: int, q: int, a: int, **kw) -> int:
    """#{n <= limit : Omega(n) = k, n = a mod q}."""
    _check_residue(q, a)
    if k == 0:
        return int(limit >= 1 and 1 % q == a)
    total = 0
    for seg in iter_segments(limit, **kw):
        mask = seg.omega == k
        if q > 1:
            mask &= seg.n % q == a
        total += int(np.count_nonzero(mask))
    return total


def ap_partial_f(limit: int, k_max: int, q: int, ctx: Optional[PrecisionContext] = None,
                 **kw) -> List[List[mpf]]:
    """out[k][a] = sum of 1/(n log n) over n <= limit with Omega(n) = k and n = a mod q."""
    _check_residue(q, 0)
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        out = [[mpf(0)] * q for _ in range(k_max + 1)]
        for seg in iter_segments(limit, **kw):
            nf = seg.n.astype(np.float64)
            w = 1.0 / (nf * np.log(nf))
            om = seg.omega.astype(np.int64)
            keep = om <= k_max
            sums = np.bincount(om[keep] * q + seg.n[keep] % q, weights=w[keep],
                               minlength=(k_max + 1) * q).reshape(k_max + 1, q)
            for k in range(k_max + 1):
                for a in range(q):
                    out[k][a] += mpf(float(sums[k, a]))
        return out


def partial_pk(s, limit: int, k: int, ctx: Optional[PrecisionContext] = None, **kw) -> mpf:
    """sum_{Omega(n)=k, n<=limit} n^-s, a lower bound for P_k(s)."""
    if k == 0:
        return mpf(1) if limit >= 1 else mpf(0)
    ctx = ctx or PrecisionContext()
    s = float(s)
    with ctx.workdps():
        total = mpf(0)
        for seg in iter_segments(limit, **kw):
            mask = seg.omega == k
            total += mpf(float(np.sum(seg.n[mask].astype(np.float64) ** -s)))
        return total


def restricted_partial_f(limit: int, k: int, forbidden: Iterable[Tuple[int, int]] = (),
                         ctx: Optional[PrecisionContext] = None, **kw) -> mpf:
    """Partial sum of 1/(n log n) over Omega(n) = k, n <= limit, with no p^e in ``forbidden`` dividing n.

    ``forbidden`` holds (p, e) pairs.
    """
    ctx = ctx or PrecisionContext()
    powers = [p**e for p, e in forbidden]
    with ctx.workdps():
        total = mpf(0)
        for seg in iter_segments(limit, **kw):
            mask = seg.omega == k
            for m in powers:
                mask &= seg.n % m != 0
            nf = seg.n[mask].astype(np.float64)
            total += mpf(float(np.sum(1.0 / (nf * np.log(nf)))))
        return total


def trial_division(n: int) -> Tuple[int, bool]:
    """(Omega(n), n squarefree) by plain trial division."""
    omega, sqf, p = 0, True, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        omega += e
        sqf &= e <= 1
        p += 1
    return omega + (n > 1), sqf
