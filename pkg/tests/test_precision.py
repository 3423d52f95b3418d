import pytest
from mpmath import mpf

from erdos_sums.errors import DomainError
from erdos_sums.precision import PrecisionContext


def test_defaults():
    ctx = PrecisionContext()
    assert ctx.working_digits == ctx.target_digits + ctx.guard_digits
    assert ctx.prime_cutoff == 100


def test_epsilon_below_target():
    ctx = PrecisionContext(30)
    assert ctx.series_cutoff_epsilon < mpf(10) ** -30
    assert abs(ctx.singularity_floor / mpf("1e-30") - 1) < mpf(10) ** -14


def test_for_order_adds_guard_digits():
    ctx = PrecisionContext(20)
    assert ctx.for_order(10).guard_digits == ctx.guard_digits + 4
    assert ctx.for_order(10).target_digits == 20
    assert ctx.for_order(0) == ctx


def test_with_target():
    assert PrecisionContext(20).with_target(40).target_digits == 40


@pytest.mark.parametrize("kw", [{"target_digits": 0}, {"guard_digits": 5}, {"prime_cutoff": 1}])
def test_invalid(kw):
    with pytest.raises(DomainError):
        PrecisionContext(**kw)
