"""Combining e-values: averaging, and multiplying sequentially into a test
martingale.  Also the antithetic construction showing that averaging
p-values does not give a p-value."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .calibration import e_to_p
from .space import (
    DEFAULT_TOL,
    DomainError,
    DimensionError,
    FiniteSpace,
    RandomVariable,
    expectation,
    is_e_variable,
    is_p_variable,
    p_excess,
    total,
)


def average_e(
    evars: Sequence[RandomVariable],
    weights: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
) -> RandomVariable:
    """Pointwise (weighted) mean of e-variables on one space.

    ``weights`` must be fixed in advance, nonnegative and sum to 1; the
    default is the plain average.
    """
    if not evars:
        raise DomainError("need at least one e-variable to average")
    space = evars[0].space
    for rv in evars:
        if rv.space is not space and rv.space != space:
            raise DimensionError("e-variables live on different spaces")
        if not is_e_variable(space, rv, tol):
            raise DomainError("input is not an e-variable")
    if weights is None:
        weights = [Fraction(1, len(evars))] * len(evars)
    else:
        if len(weights) != len(evars):
            raise DimensionError("one weight per e-variable is required")
        if any(w < 0 for w in weights) or abs(float(total(weights)) - 1) > 1e-12:
            raise DomainError("weights must be nonnegative and sum to 1")
    exact = all(isinstance(v, Fraction) for rv in evars for v in rv.values)
    values = []
    for col in zip(*(rv.values for rv in evars)):
        terms = [w * v if exact else float(w) * float(v) for w, v in zip(weights, col) if w != 0]
        values.append(total(terms) if not any(map(math.isinf, terms)) else math.inf)
    return RandomVariable(space, tuple(values))


@dataclass(frozen=True)
class MartingaleTrace:
    factors: tuple[float, ...]
    wealth: tuple[float, ...]

    @property
    def final(self) -> float:
        return self.wealth[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round", "factor", "wealth"])
        w.writerow([0, "", self.wealth[0]])
        for k, (f, x) in enumerate(zip(self.factors, self.wealth[1:]), start=1):
            w.writerow([k, f, x])
        return buf.getvalue()


def sequential_product(factors: Sequence[float]) -> MartingaleTrace:
    """Running product of per-round e-values, starting from wealth 1."""
    wealth = [1.0]
    for f in factors:
        if math.isnan(f) or f < 0:
            raise DomainError(f"factor {f!r} is negative")
        # 0 * inf stays 0: once broke, always broke
        wealth.append(0.0 if wealth[-1] == 0 else wealth[-1] * f)
    return MartingaleTrace(tuple(factors), tuple(wealth))


BettingRule = Callable[[tuple], RandomVariable]


def expected_wealth(space: FiniteSpace, rule: BettingRule, rounds: int) -> list[float]:
    """Exact ``E[wealth_k]``, k = 0..rounds, by enumerating every outcome path.

    Each round the observation is drawn iid from ``space``; ``rule(history)``
    returns that round's e-variable, which may depend on the past outcomes.
    """
    sums = [0.0] * (rounds + 1)
    for path in itertools.product(range(len(space)), repeat=rounds):
        prob = 1.0
        history: tuple = ()
        factors = []
        for i in path:
            factors.append(rule(history).values[i])
            prob *= space.probs[i]
            history += (space.outcomes[i],)
        trace = sequential_product(factors)
        for k, w in enumerate(trace.wealth):
            sums[k] += prob * w
    return sums


@dataclass(frozen=True)
class CounterexampleCertificate:
    space: FiniteSpace
    p_vars: tuple[RandomVariable, ...]
    threshold: Fraction
    violation: Fraction

    def verify(self) -> bool:
        """Recompute everything from the stored inputs."""
        if not all(is_p_variable(self.space, p, tol=0) for p in self.p_vars):
            return False
        mean = [total(col) / len(self.p_vars) for col in zip(*(p.values for p in self.p_vars))]
        mass = total(q for q, m in zip(self.space.probs, mean) if m <= self.threshold)
        return mass - self.threshold == self.violation and self.violation > 0

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "p_vars": [p.to_dict()["values"] for p in self.p_vars],
            "threshold": float(self.threshold),
            "violation": float(self.violation),
        }


def p_average_counterexample(grid_size: int) -> CounterexampleCertificate:
    """Two exactly valid p-variables, ``i/N`` and ``(N+1-i)/N``, whose average
    is the constant ``(N+1)/(2N)`` and so fails the p-variable condition."""
    n = grid_size
    if n < 2:
        raise DomainError("grid_size must be at least 2")
    space = FiniteSpace.uniform(n, exact=True, labels=range(1, n + 1))
    up = RandomVariable(space, tuple(Fraction(i, n) for i in range(1, n + 1)))
    down = RandomVariable(space, tuple(Fraction(n + 1 - i, n) for i in range(1, n + 1)))
    t = Fraction(n + 1, 2 * n)
    return CounterexampleCertificate(space, (up, down), t, 1 - t)


def p_mean_violation(p_vars: Sequence[RandomVariable]) -> float:
    """Largest ``P(mean <= v) - v`` over achieved values ``v < 1`` of the
    pointwise mean; positive means the mean is not a p-variable."""
    space = p_vars[0].space
    mean = RandomVariable(space, tuple(total(col) / len(p_vars) for col in zip(*(p.values for p in p_vars))))
    pts = p_excess(space, mean)
    return max((float(m - v) for v, m in pts), default=0.0)


def combine_report(
    evars: Sequence[RandomVariable],
    p_vars: Sequence[RandomVariable] | None = None,
    tol: float = DEFAULT_TOL,
) -> dict:
    """Summary juxtaposing e-averaging with p-averaging."""
    mean = average_e(evars, tol=tol)
    space = mean.space
    report = {
        "e_mean": [float(v) for v in mean.values],
        "e_mean_expectation": float(expectation(space, mean)),
        "e_mean_valid": is_e_variable(space, mean, tol),
        "e_mean_to_p": [e_to_p(float(v)) for v in mean.values],
    }
    if p_vars:
        v = p_mean_violation(p_vars)
        report["p_violation"] = v
        report["p_mean_valid"] = v <= tol
    return report
