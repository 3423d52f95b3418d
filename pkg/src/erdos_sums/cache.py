"""Versioned text cache of constants keyed by (name, precision)."""
from __future__ import annotations

import os
from pathlib import Path
from typing import Dict, Optional, Tuple

import mpmath
from mpmath import mpf

from .errors import DomainError
from .precision import PrecisionContext

CACHE_VERSION = "erdos-sums-constants v1"
CACHE_FILE = "constants.txt"
BUNDLE_SCALARS = ("alpha", "c", "h_prime_1", "euler_gamma", "six_over_pi2", "alpha_product")


class ConstantCache:
    """One line per entry: ``name precision decimal``, sorted for byte-stable files.

    A lookup at precision d is served by the entry for d, or failing that the
    lowest stored precision above d; a request above every stored precision
    misses and the caller recomputes.
    """

    def __init__(self, directory):
        self.path = Path(directory) / CACHE_FILE
        self.entries: Dict[Tuple[str, int], str] = {}
        if self.path.exists():
            self._read()

    def _read(self):
        lines = self.path.read_text().splitlines()
        if not lines or lines[0] != CACHE_VERSION:
            raise DomainError(f"{self.path}: unrecognized cache version")
        for line in lines[1:]:
            if line.strip():
                name, prec, value = line.split()
                self.entries[(name, int(prec))] = value

    def get(self, name: str, precision: int) -> Optional[str]:
        if (name, precision) in self.entries:
            return self.entries[(name, precision)]
        higher = sorted(p for n, p in self.entries if n == name and p > precision)
        return self.entries[(name, higher[0])] if higher else None

    def put(self, name: str, precision: int, value: str):
        self.entries[(name, precision)] = value

    def save(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        body = [f"{n} {p} {v}" for (n, p), v in sorted(self.entries.items())]
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text("\n".join([CACHE_VERSION] + body) + "\n")
        os.replace(tmp, self.path)

    # ConstantsBundle round trip

    def load_constants(self, ctx: PrecisionContext):
        from .bounds import BETA_PARTS, ConstantsBundle

        d = ctx.target_digits
        names = list(BUNDLE_SCALARS) + [f"P({j})" for j in BETA_PARTS] + [f"P'({j})" for j in BETA_PARTS]
        raw = {name: self.get(name, d) for name in names}
        if any(v is None for v in raw.values()):
            return None
        with ctx.workdps():
            vals = {name: mpf(v) for name, v in raw.items()}
            return ConstantsBundle(
                **{name: vals[name] for name in BUNDLE_SCALARS},
                precision_digits=d,
                p_values={j: vals[f"P({j})"] for j in BETA_PARTS},
                p_derivs={j: vals[f"P'({j})"] for j in BETA_PARTS},
            )

    def store_constants(self, ctx: PrecisionContext, bundle):
        d, w = ctx.target_digits, ctx.working_digits
        for name in BUNDLE_SCALARS:
            self.put(name, d, mpmath.nstr(getattr(bundle, name), w))
        for j, v in bundle.p_values.items():
            self.put(f"P({j})", d, mpmath.nstr(v, w))
        for j, v in bundle.p_derivs.items():
            self.put(f"P'({j})", d, mpmath.nstr(v, w))
        self.save()
