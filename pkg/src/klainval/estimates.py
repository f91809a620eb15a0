"""Small containers for Monte Carlo estimates and two-route comparisons."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np


class Estimate(NamedTuple):
    value: float
    stderr: float
    samples: int

    @classmethod
    def exact(cls, value: float) -> "Estimate":
        return cls(float(value), 0.0, 0)

    @classmethod
    def from_samples(cls, x) -> "Estimate":
        x = np.asarray(x, dtype=float)
        se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
        return cls(float(x.mean()), se, int(x.size))


class CheckResult(NamedTuple):
    """Two independent estimates of the same quantity."""

    lhs: float
    rhs: float
    diff: float
    stderr: float
    passed: bool

    @classmethod
    def compare(cls, a: Estimate, b: Estimate, sigmas: float = 3.0, slack: float = 0.0) -> "CheckResult":
        se = math.hypot(a.stderr, b.stderr)
        diff = a.value - b.value
        ok = abs(diff) <= sigmas * se + slack + 1e-12 * max(1.0, abs(a.value))
        return cls(a.value, b.value, diff, se, bool(ok))
