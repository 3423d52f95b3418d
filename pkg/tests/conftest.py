"""Shared expensive computations, built once per test session."""
import time

import pytest

from erdos_sums.precision import PrecisionContext
from erdos_sums.quadrature import integrate_family
from erdos_sums.sieve_oracle import sieve_summary

ACCEPTANCE_LINES = []


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


@pytest.fixture(scope="session")
def f1_run():
    """f(N_1) at 30 target digits, with wall time."""
    fam, seconds = _timed(integrate_family, ("pk",), [1], PrecisionContext(30))
    return fam["pk"][1], seconds


@pytest.fixture(scope="session")
def table_20digits():
    """f(N_k), f(N*_k) for k <= 10 at 20 target digits, with wall time."""
    return _timed(integrate_family, ("pk", "pk_star"), range(1, 11), PrecisionContext(20))


@pytest.fixture(scope="session")
def table_k20():
    """f(N_k), f(N*_k) for k <= 20 at 12 target digits."""
    return integrate_family(("pk", "pk_star"), range(1, 21), PrecisionContext(12))


@pytest.fixture(scope="session")
def powers_k40():
    """(1/k!) int [log zeta]^k and (1/k!) int P^k for k <= 40 at 16 target digits."""
    return integrate_family(("log_zeta_pow", "prime_zeta_pow"), range(1, 41), PrecisionContext(16))


@pytest.fixture(scope="session")
def sieve_1e7():
    return sieve_summary(10**7, 8, PrecisionContext(20))


@pytest.fixture(scope="session")
def sieve_1e8():
    return sieve_summary(10**8, 4, PrecisionContext(20), moduli=(3,))


@pytest.fixture
def record():
    """record(criterion, passed, detail) adds a line to the acceptance summary."""
    def _record(criterion, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
