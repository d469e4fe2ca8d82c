"""Cournot tests, their p- and e-embeddings, and likelihood-ratio tests of a
simple null against a simple alternative on a finite space."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Hashable

import numpy as np

from .space import (
    DEFAULT_TOL,
    DomainError,
    FiniteSpace,
    RandomVariable,
    RejectionRegion,
    p_excess,
    total,
)


class Decision(enum.Enum):
    REJECT = "reject"
    NO_EVIDENCE = "no_evidence"


@dataclass(frozen=True)
class CournotTest:
    region: RejectionRegion

    @property
    def alpha(self):
        return self.region.alpha

    @property
    def space(self) -> FiniteSpace:
        return self.region.space


def cournot_decide(test: CournotTest, outcome: Hashable) -> Decision:
    test.space.index(outcome)
    return Decision.REJECT if outcome in test.region else Decision.NO_EVIDENCE


def _nondegenerate_alpha(test: CournotTest):
    alpha = test.alpha
    if alpha == 0:
        raise DomainError("rejection region has null probability 0")
    return alpha


def embed_p(test: CournotTest) -> RandomVariable:
    """alpha on the region, 1 elsewhere."""
    alpha = _nondegenerate_alpha(test)
    space = test.space
    one = Fraction(1) if isinstance(alpha, Fraction) else 1.0
    return RandomVariable(space, tuple(alpha if y in test.region else one for y in space.outcomes))


def embed_e(test: CournotTest) -> RandomVariable:
    """1/alpha on the region, 0 elsewhere."""
    alpha = _nondegenerate_alpha(test)
    space = test.space
    if isinstance(alpha, Fraction):
        hit, miss = 1 / alpha, Fraction(0)
    else:
        hit, miss = 1.0 / alpha, 0.0
    return RandomVariable(space, tuple(hit if y in test.region else miss for y in space.outcomes))


@dataclass(frozen=True)
class HypothesisPair:
    """Simple null ``null`` and simple alternative ``alt`` on shared outcomes."""

    outcomes: tuple[Hashable, ...]
    null: tuple[float, ...]
    alt: tuple[float, ...]
    space: FiniteSpace = field(init=False, repr=False, compare=False)
    alt_space: FiniteSpace = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(self, "space", FiniteSpace(self.outcomes, tuple(self.null)))
        object.__setattr__(self, "alt_space", FiniteSpace(self.outcomes, tuple(self.alt)))
        object.__setattr__(self, "null", self.space.probs)
        object.__setattr__(self, "alt", self.alt_space.probs)

    @property
    def shared_support(self) -> bool:
        return all((p > 0) == (q > 0) for p, q in zip(self.null, self.alt))

    def to_dict(self) -> dict:
        return {"outcomes": list(self.outcomes), "null": [float(x) for x in self.null],
                "alt": [float(x) for x in self.alt]}

    @classmethod
    def from_dict(cls, d: dict) -> HypothesisPair:
        return cls(tuple(d["outcomes"]), tuple(float(x) for x in d["null"]),
                   tuple(float(x) for x in d["alt"]))

    @classmethod
    def from_json(cls, text: str) -> HypothesisPair:
        return cls.from_dict(json.loads(text))


def likelihood_ratio_e(pair: HypothesisPair) -> RandomVariable:
    """``alt/null`` outcome by outcome, ``inf`` where the null has no mass."""
    vals = tuple(math.inf if p == 0 else q / p for p, q in zip(pair.null, pair.alt))
    return RandomVariable(pair.space, vals)


def _lr_cmp(a: tuple, b: tuple) -> int:
    # exact comparison of q_a/p_a with q_b/p_b by cross-multiplication
    (pa, qa), (pb, qb) = a, b
    if pa == 0 and pb == 0:
        return 0
    if pa == 0:
        return 1
    if pb == 0:
        return -1
    lhs, rhs = Fraction(qa) * Fraction(pb), Fraction(qb) * Fraction(pa)
    return (lhs > rhs) - (lhs < rhs)


def np_p_variable(pair: HypothesisPair) -> RandomVariable:
    """``p(y) = P({z : LR(z) >= LR(y)})``; ties in the likelihood ratio are grouped."""
    keys = list(zip(pair.null, pair.alt))
    order = sorted(range(len(keys)), key=cmp_to_key(lambda i, j: _lr_cmp(keys[i], keys[j])))
    values = [None] * len(keys)
    # walk from the largest ratio down, assigning each tie group its upper-set mass
    pos = len(order)
    while pos > 0:
        start = pos - 1
        while start > 0 and _lr_cmp(keys[order[start - 1]], keys[order[pos - 1]]) == 0:
            start -= 1
        mass = total(pair.null[i] for i in order[start:])
        for i in order[start:pos]:
            values[i] = mass
        pos = start
    return RandomVariable(pair.space, tuple(values))


@dataclass
class OptimalityReport:
    n_trials: int
    growth_lr: float
    best_random_growth: float
    max_violation: float
    violations: int
    tol: float

    def to_dict(self) -> dict:
        return dict(vars(self))


def expected_log(pair: HypothesisPair, values) -> float:
    """``E_alt[log e]`` with the convention ``0 * log(anything) = 0``."""
    terms = []
    for q, v in zip(pair.alt, values):
        if q == 0:
            continue
        if v == 0:
            return -math.inf
        terms.append(float(q) * math.log(v))
    return math.fsum(terms)


def log_optimality_check(
    pair: HypothesisPair, n_trials: int = 1000, seed: int = 0, tol: float = 1e-12
) -> OptimalityReport:
    """Compare ``E_alt[log LR]`` with ``E_alt[log e]`` for random e-variables.

    Each trial draws iid uniform values and rescales them to null
    expectation 1.  No trial should beat the likelihood ratio by more
    than ``tol`` (Gibbs' inequality).
    """
    if not pair.shared_support:
        raise DomainError("log-optimality check needs null and alternative with shared support")
    if n_trials < 1:
        raise DomainError("n_trials must be positive")
    rng = np.random.default_rng(seed)
    growth_lr = expected_log(pair, likelihood_ratio_e(pair).values)
    null = np.array(pair.null, dtype=float)
    best = -math.inf
    worst_gap = -math.inf
    n_bad = 0
    for _ in range(n_trials):
        u = rng.random(len(null))
        u = u / math.fsum(null * u)
        g = expected_log(pair, u)
        best = max(best, g)
        gap = g - growth_lr
        worst_gap = max(worst_gap, gap)
        n_bad += gap > tol
    return OptimalityReport(
        n_trials=n_trials,
        growth_lr=growth_lr,
        best_random_growth=best,
        max_violation=max(0.0, worst_gap),
        violations=n_bad,
        tol=tol,
    )


@dataclass
class UniformityReport:
    achieved: list
    cdf: list
    max_excess: float
    superuniform: bool
    exactly_uniform: bool

    def to_dict(self) -> dict:
        return {
            "achieved": [float(v) for v in self.achieved],
            "cdf": [float(c) for c in self.cdf],
            "max_excess": self.max_excess,
            "superuniform": self.superuniform,
            "exactly_uniform": self.exactly_uniform,
        }


def p_uniformity_check(
    target: HypothesisPair | RandomVariable, tol: float = DEFAULT_TOL
) -> UniformityReport:
    """Exact null CDF of a p-variable at its achieved values.

    ``target`` is either a hypothesis pair (its Neyman-Pearson p-variable is
    used) or a p-variable directly.
    """
    rv = np_p_variable(target) if isinstance(target, HypothesisPair) else target
    space = rv.space
    points = p_excess(space, rv)
    if any(v >= 1 for v in rv.values):
        points.append((1, total(q for q, v in zip(space.probs, rv.values) if v <= 1)))
    achieved = [v for v, _ in points]
    cdf = [m for _, m in points]
    excess = [float(m) - float(v) for v, m in points]
    max_excess = max(excess)
    return UniformityReport(
        achieved=achieved,
        cdf=cdf,
        max_excess=max_excess,
        superuniform=max_excess <= tol,
        exactly_uniform=all(abs(x) <= tol for x in excess),
    )
