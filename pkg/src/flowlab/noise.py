"""Deterministic two-sided Brownian increment source.

Every increment is a pure function of (seed, driver, step): counter-based
generation (Philox4x32-10 keyed by the seed, with driver index and step
index in the counter) means a pullback run over [-t, 0] literally reuses
the increments of any longer run over [-t', 0], and worker count cannot
change any value.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend as bk


class InvalidDriverError(ValueError):
    """Driver index outside 1..driver_count."""


@dataclass(frozen=True)
class NoiseSource:
    """Increment generator for `driver_count` independent drivers on a step-h grid.

    Step k covers the time interval [k*h, (k+1)*h] for every integer k;
    negative k encodes time before zero.
    """

    seed: int
    driver_count: int = 1
    step_size: float = 1e-3

    def __post_init__(self):
        if self.driver_count < 1:
            raise ValueError("driver_count must be >= 1")
        if not self.step_size > 0:
            raise ValueError("step_size must be > 0")

    def _check_driver(self, driver):
        if not 1 <= driver <= self.driver_count:
            raise InvalidDriverError(
                f"driver {driver} outside 1..{self.driver_count}")

    def increment(self, driver, step):
        """Brownian increment of one driver over [step*h, (step+1)*h]."""
        self._check_driver(driver)
        z = bk.std_normals(self.seed, driver, step, 1)[0]
        return float(np.sqrt(self.step_size) * z)

    def increments(self, driver, start_step, count):
        """Vector of `count` consecutive increments starting at start_step."""
        self._check_driver(driver)
        z = bk.std_normals(self.seed, driver, start_step, count)
        return np.sqrt(self.step_size) * z


def running_max_path(source, driver, steps):
    """Discrete running maximum of one driver path over its first `steps` steps.

    The supremum includes W_0 = 0, so the result is never negative.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    incr = source.increments(driver, 0, steps)
    return float(max(0.0, np.cumsum(incr).max()))


def derive_seed(seed, replica):
    """Deterministic per-replica seed (splitmix64 stream of the base seed)."""
    return bk.derive_seed(seed, replica)
