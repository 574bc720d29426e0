"""Mixing schedules β_i for DAgger-style data collection."""

import math
from dataclasses import dataclass

from ..errors import ConfigError, ContractViolation

SCHEDULE_VARIANTS = ("linear-full", "linear-half", "linear-quarter", "one-zero")


@dataclass(frozen=True)
class BetaSchedule:
    """
    Probability β_i of executing the supervisor at iteration i.

    Args:
        variant: "linear-full", "linear-half", "linear-quarter" or "one-zero"
        iterations: Total iterations N
    """
    variant: str = "linear-full"
    iterations: int = 1

    def __post_init__(self):
        if self.variant not in SCHEDULE_VARIANTS:
            raise ConfigError(f"unknown schedule '{self.variant}'", field="schedule")
        if self.iterations < 1:
            raise ConfigError("schedule needs at least one iteration", field="iterations")

    def zero_iteration(self):
        """First iteration at which β reaches 0 (linear variants)"""
        n = self.iterations
        if self.variant == "linear-full":
            return n
        if self.variant == "linear-half":
            return math.ceil(n / 2)
        if self.variant == "linear-quarter":
            return math.ceil(n / 4)
        return 2

    def values(self):
        return tuple(beta_value(self, i) for i in range(1, self.iterations + 1))


def beta_value(schedule, i):
    """
    β_i for 1 <= i <= N.

    Linear variants fall from 1 at i = 1 to 0 at their zero iteration z and
    stay there: β_i = max(0, (z - i) / (z - 1)); a zero iteration of 1 means
    β_1 = 1 and 0 afterwards. one-zero is 1 only at i = 1.
    """
    if not 1 <= i <= schedule.iterations:
        raise ContractViolation(f"iteration {i} outside 1..{schedule.iterations}")
    if i == 1:
        return 1.0
    if schedule.variant == "one-zero":
        return 0.0
    zero = schedule.zero_iteration()
    if zero <= 1:
        return 0.0
    return max(0.0, (zero - i) / (zero - 1))
