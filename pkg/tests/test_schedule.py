import pytest

from platonav.errors import ConfigError, ContractViolation
from platonav.learners.schedule import BetaSchedule, beta_value


def test_linear_full():
    assert BetaSchedule("linear-full", 5).values() == (1.0, 0.75, 0.5, 0.25, 0.0)


def test_linear_half_reaches_zero_at_the_midpoint():
    values = BetaSchedule("linear-half", 10).values()
    assert values[:5] == (1.0, 0.75, 0.5, 0.25, 0.0)
    assert all(v == 0.0 for v in values[5:])


def test_linear_quarter():
    assert BetaSchedule("linear-quarter", 10).values() == (1.0, 0.5) + (0.0,) * 8


def test_one_zero():
    assert BetaSchedule("one-zero", 4).values() == (1.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("variant", ["linear-full", "linear-half", "linear-quarter", "one-zero"])
def test_first_iteration_always_executes_the_supervisor(variant):
    assert beta_value(BetaSchedule(variant, 1), 1) == 1.0
    assert beta_value(BetaSchedule(variant, 7), 1) == 1.0


@pytest.mark.parametrize("variant", ["linear-full", "linear-half", "linear-quarter"])
def test_linear_variants_are_non_increasing(variant):
    values = BetaSchedule(variant, 13).values()
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert all(0.0 <= v <= 1.0 for v in values)


def test_iteration_out_of_range():
    with pytest.raises(ContractViolation):
        beta_value(BetaSchedule("linear-full", 3), 4)
    with pytest.raises(ContractViolation):
        beta_value(BetaSchedule("linear-full", 3), 0)


def test_unknown_variant():
    with pytest.raises(ConfigError):
        BetaSchedule("exponential", 3)
