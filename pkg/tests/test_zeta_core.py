import math
import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from erdos_sums import zeta_core as zc
from erdos_sums.errors import DomainError, SingularityError
from erdos_sums.precision import PrecisionContext

CTX = PrecisionContext(30)


def _close(a, b, tol):
    with mp.workdps(60):
        return abs(mpf(a) - mpf(b)) <= tol


def test_primes_and_mobius():
    t = zc.generate_primes(30)
    assert t.primes == (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
    assert len(zc.generate_primes(10**4)) == 1229
    assert [zc.mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]
    assert zc.next_prime(100) == 101
    with pytest.raises(DomainError):
        zc.generate_primes(1)


@pytest.mark.parametrize("s", ["1.001", "1.1", "1.5", "2", "3.7", "10", "40"])
def test_zeta_against_mpmath(s):
    with mp.workdps(60):
        ref = mpmath.zeta(mpf(s))
        dref = mpmath.zeta(mpf(s), derivative=1)
    assert _close(zc.zeta(s, CTX), ref, mpf(10) ** -32)
    assert _close(zc.zeta_deriv(s, CTX), dref, mpf(10) ** -30)


def test_zeta_error_bar_is_honest():
    for s in ["1.01", "2", "7"]:
        v, err = zc.zeta_with_error(s, CTX)
        with mp.workdps(60):
            assert abs(v - mpmath.zeta(mpf(s))) <= err + mpf(10) ** -44
        assert err <= CTX.series_cutoff_epsilon


def test_zeta_near_pole_via_s_minus_1():
    with mp.workdps(60):
        d = mpmath.exp(-200)
        ref = 1 / d + mp.euler - mpmath.stieltjes(1) * d
        v = zc.zeta(None, CTX, s_minus_1=d)
        assert abs(v / ref - 1) < mpf(10) ** -35


def test_singularity_floor():
    with pytest.raises(SingularityError):
        zc.zeta("1.0000000000000000000000000000000001", CTX)
    with pytest.raises(SingularityError):
        zc.zeta(None, CTX, s_minus_1=0)


@pytest.mark.parametrize("s", ["1.01", "1.5", "2", "5"])
def test_prime_zeta_against_mpmath(s):
    with mp.workdps(60):
        ref = mpmath.primezeta(mpf(s))
    assert _close(zc.prime_zeta(s, CTX), ref, mpf(10) ** -31)


def test_prime_zeta_derivative_against_numeric():
    with mp.workdps(60):
        ref = mpmath.diff(mpmath.primezeta, mpf(2))
    assert _close(zc.prime_zeta_deriv(2, CTX), ref, mpf(10) ** -28)


def test_prime_zeta_multiples_and_errors():
    vals, errs = zc.prime_zeta_multiples("1.3", 6, CTX)
    with mp.workdps(60):
        for j, (v, e) in enumerate(zip(vals, errs), start=1):
            assert abs(v - mpmath.primezeta(j * mpf("1.3"))) <= e + mpf(10) ** -40
            assert e < CTX.series_cutoff_epsilon


def test_prime_zeta_integers():
    vals, _ = zc.prime_zeta_integers(6, CTX)
    with mp.workdps(60):
        for m in range(2, 7):
            assert _close(vals[m], mpmath.primezeta(m), mpf(10) ** -32)


@pytest.mark.parametrize("A", [50, 500])
def test_prime_cutoff_invariance(A):
    ctx = PrecisionContext(30, prime_cutoff=A)
    base = zc.prime_zeta("1.05", CTX)
    assert _close(zc.prime_zeta("1.05", ctx), base, mpf(10) ** -30)


def test_zeta_truncated_matches_euler_factor():
    with mp.workdps(60):
        prod = mpf(1)
        for p in zc.generate_primes(100).primes:
            prod *= 1 - mpf(p) ** -2
        ref = mpmath.zeta(2) * prod
    assert _close(zc.zeta_truncated(2, 100, CTX), ref, mpf(10) ** -32)
    with pytest.raises(DomainError):
        zc.zeta_truncated(2, 1, CTX)


def test_log_deriv_truncated_bound():
    ctx = PrecisionContext(20)
    v = zc.log_deriv_zeta_truncated(3, ctx)
    assert v < 0
    assert -v <= zc.log_deriv_tail_bound(3, ctx)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=1.01, max_value=30))
def test_prime_zeta_bounded_by_log_zeta(s):
    # P(s) <= log zeta(s) <= P(s) + P(2s) sum ... so in particular P < log zeta
    ctx = PrecisionContext(15)
    p = zc.prime_zeta(s, ctx)
    lz = zc.log_zeta(s, ctx)
    assert 0 < p < lz
    assert lz - p < zc.prime_zeta(2 * s, ctx) * 2


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=1.01, max_value=30))
def test_zeta_monotone_decreasing(s):
    ctx = PrecisionContext(15)
    assert zc.zeta(s, ctx) > zc.zeta(s + 0.01, ctx) > 1
    assert zc.zeta_deriv(s, ctx) < 0


ALPHA = mpf("0.729264744257119")
GRID_1_2 = ["1.0001", "1.001", "1.01", "1.1", "1.3", "1.6", "2"]


def test_spec_examples():
    assert zc.generate_primes(10).primes == (2, 3, 5, 7)
    assert zc.generate_primes(2).primes == (2,)
    assert len(zc.generate_primes(10**6)) == 78498
    with pytest.raises(DomainError):
        zc.mobius(0)
    with mp.workdps(50):
        assert abs(zc.zeta(4, CTX) - mp.pi**4 / 90) < mpf(10) ** -32
        assert abs(zc.zeta_truncated(3, 2, CTX) - mpmath.zeta(3) * (1 - mpf(1) / 8)) < mpf(10) ** -32
        z = zc.zeta_truncated(2, 100, CTX)
        # every n > 1 with all prime factors above 100 is >= 101, so z - 1 < sum_{n>100} n^-2 < 1/100
        assert 1 + mpf(101) ** -2 < z < 1 + mpf(1) / 100
        ref = mpmath.zeta(2) * (1 - mpf(1) / 4) * (1 - mpf(1) / 9) * (1 - mpf(1) / 25) * (1 - mpf(1) / 49)
        assert abs(zc.zeta_truncated(2, 10, CTX) - ref) < mpf(10) ** -32
    assert zc.prime_zeta(2, CTX) < 0.5


def test_zeta_deriv_large_s_domination():
    ctx = PrecisionContext(20)
    for s in (8, 15, 30):
        with mp.workdps(40):
            lead = mpmath.log(2) * mpf(2) ** -s
            assert abs(zc.zeta_deriv(s, ctx) + lead) <= 2 * mpmath.log(3) * mpf(3) ** -s


def test_finite_differences():
    ctx = PrecisionContext(30)
    h = mpf(10) ** -15
    with mp.workdps(50):
        fd = (zc.zeta(3 + h, ctx) - zc.zeta(3 - h, ctx)) / (2 * h)
        assert abs(fd - zc.zeta_deriv(3, ctx)) < mpf(10) ** -14
        fd = (zc.prime_zeta(3 + h, ctx) - zc.prime_zeta(3 - h, ctx)) / (2 * h)
        assert abs(fd - zc.prime_zeta_deriv(3, ctx)) < mpf(10) ** -14


def test_zeta_three_against_direct_sum():
    import numpy as np
    X = 10**6
    n = np.arange(1, X + 1, dtype=np.float64)
    head = math.fsum((1 / n**3).tolist())
    # tail in [1/(2(X+1)^2), 1/(2X^2)]
    z = float(zc.zeta(3, PrecisionContext(20)))
    assert head + 1 / (2 * (X + 1) ** 2) - 1e-15 < z < head + 1 / (2 * X**2) + 1e-15


def test_prime_zeta_two_and_deriv_against_prime_sums():
    import numpy as np
    from erdos_sums.sieve_oracle import _sieve_primes
    X = 10**7
    p = _sieve_primes(X).astype(np.float64)
    head = math.fsum((1 / p**2).tolist())
    dhead = -math.fsum((np.log(p) / p**2).tolist())
    ctx = PrecisionContext(20)
    # sum_{n > X} 1/n^2 < 1/X and sum_{n > X} log n/n^2 < (log X + 1)/X
    assert head < zc.prime_zeta(2, ctx) < head + 1 / X
    assert dhead - (math.log(X) + 1) / X < zc.prime_zeta_deriv(2, ctx) < dhead
    assert abs(zc.prime_zeta(2, ctx) - mpf("0.452247420041065")) < 1e-15


@pytest.mark.parametrize("s", GRID_1_2)
def test_log_zeta_near_pole(s):
    ctx = PrecisionContext(20)
    with mp.workdps(40):
        sm1 = mpf(s) - 1
        d = zc.log_zeta(s, ctx) + mpmath.log(sm1)
        assert 0 < d < mpf("0.6") * sm1


@pytest.mark.parametrize("s", GRID_1_2)
def test_prime_zeta_near_pole(s):
    ctx = PrecisionContext(20)
    with mp.workdps(40):
        sm1 = mpf(s) - 1
        d = zc.prime_zeta(s, ctx) - mpmath.log(ALPHA / sm1)
        assert 0 < d < mpf("1.4") * sm1


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=2, max_value=60))
def test_log_zeta_above_two(s):
    v = zc.log_zeta(s, PrecisionContext(15))
    assert 0 < v < mpf(2) ** (1 - mpf(s))


def test_truncated_times_factors_is_zeta():
    ctx = PrecisionContext(25)
    for A in (2, 10, 100):
        with mp.workdps(50):
            prod = mpf(1)
            for p in zc.generate_primes(A).primes:
                prod *= 1 - mpf(p) ** mpf("-1.7")
            assert abs(zc.zeta_truncated("1.7", A, ctx) / prod - zc.zeta("1.7", ctx)) < mpf(10) ** -27
