"""Finite probability spaces and the exact validity oracles.

Everything else in the package is checked against the three functions here:
:func:`expectation`, :func:`is_e_variable` and :func:`is_p_variable`.
Probabilities may be floats or :class:`fractions.Fraction`; when every
number involved is rational the sums are exact, otherwise they go through
:func:`math.fsum`, which is correctly rounded and therefore independent of
summation order.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Any, Hashable, Iterable, Sequence

DEFAULT_TOL = float(os.environ.get("EVALTK_TOL", "1e-9"))
_NORMALIZATION_TOL = 1e-12


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DimensionError(DomainError):
    """A random variable does not live on the space it is used with."""


Number = float | Fraction


def total(xs: Iterable[Number]) -> Number:
    """Exact sum for rationals, correctly rounded sum otherwise."""
    xs = list(xs)
    if all(isinstance(x, Rational) for x in xs):
        return sum(xs, Fraction(0))
    return math.fsum(float(x) for x in xs)


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float, Fraction)) and not isinstance(x, bool)


@dataclass(frozen=True)
class FiniteSpace:
    """A finite set of labelled outcomes with their probabilities."""

    outcomes: tuple[Hashable, ...]
    probs: tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(self, "probs", tuple(self.probs))
        if len(self.outcomes) == 0:
            raise DomainError("a space needs at least one outcome")
        if len(self.outcomes) != len(self.probs):
            raise DimensionError(
                f"{len(self.outcomes)} outcomes but {len(self.probs)} probabilities"
            )
        if len(set(self.outcomes)) != len(self.outcomes):
            raise DomainError("outcome labels must be unique")
        for q in self.probs:
            if not _is_number(q) or math.isnan(q) or q < 0 or q > 1:
                raise DomainError(f"probability {q!r} not in [0, 1]")
        s = total(self.probs)
        if isinstance(s, Fraction):
            if s != 1:
                raise DomainError(f"rational probabilities sum to {s}, not 1")
        elif abs(s - 1.0) > _NORMALIZATION_TOL:
            raise DomainError(f"probabilities sum to {s!r}, not 1")
        object.__setattr__(
            self, "_index", {label: i for i, label in enumerate(self.outcomes)}
        )

    @classmethod
    def uniform(cls, n: int, exact: bool = False, labels: Sequence[Hashable] | None = None) -> FiniteSpace:
        if n < 1:
            raise DomainError("n must be positive")
        q = Fraction(1, n) if exact else 1.0 / n
        if labels is None:
            labels = range(n)
        return cls(tuple(labels), (q,) * n)

    def __len__(self) -> int:
        return len(self.outcomes)

    def index(self, label: Hashable) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise DomainError(f"unknown outcome {label!r}") from None

    def prob(self, labels: Iterable[Hashable]) -> Number:
        """Probability of a set of outcome labels."""
        idx = {self.index(label) for label in labels}
        return total(self.probs[i] for i in sorted(idx))

    def to_dict(self) -> dict:
        return {"outcomes": list(self.outcomes), "probs": [_encode(q) for q in self.probs]}

    @classmethod
    def from_dict(cls, d: dict) -> FiniteSpace:
        return cls(tuple(d["outcomes"]), tuple(_decode(q) for q in d["probs"]))

    @classmethod
    def from_json(cls, text: str) -> FiniteSpace:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class RandomVariable:
    """Nonnegative extended-real values, one per outcome of ``space``."""

    space: FiniteSpace
    values: tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != len(self.space):
            raise DimensionError(
                f"{len(self.values)} values for a space of {len(self.space)} outcomes"
            )
        for v in self.values:
            if not _is_number(v) or math.isnan(v) or v < 0:
                raise DomainError(f"random variable value {v!r} is not a nonnegative number")

    @classmethod
    def constant(cls, space: FiniteSpace, c: Number) -> RandomVariable:
        return cls(space, (c,) * len(space))

    def __call__(self, label: Hashable) -> Number:
        return self.values[self.space.index(label)]

    def map(self, f) -> RandomVariable:
        return RandomVariable(self.space, tuple(f(v) for v in self.values))

    def to_dict(self) -> dict:
        return {"values": [_encode(v) for v in self.values]}

    @classmethod
    def from_dict(cls, space: FiniteSpace, d: dict) -> RandomVariable:
        return cls(space, tuple(_decode(v) for v in d["values"]))


@dataclass(frozen=True)
class RejectionRegion:
    """A set of outcomes chosen in advance; its null probability is ``alpha``."""

    space: FiniteSpace
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        unknown = [m for m in self.members if m not in self.space._index]
        if unknown:
            raise DomainError(f"region members not in space: {unknown!r}")

    @property
    def alpha(self) -> Number:
        return self.space.prob(self.members)

    def __contains__(self, label: Hashable) -> bool:
        return label in self.members


def _check_same_space(space: FiniteSpace, rv: RandomVariable) -> None:
    if rv.space is not space and rv.space != space:
        raise DimensionError("random variable is defined on a different space")


def expectation(space: FiniteSpace, rv: RandomVariable) -> Number:
    """``sum(probs[i] * values[i])``; infinite values on null outcomes contribute 0."""
    _check_same_space(space, rv)
    terms = []
    for q, v in zip(space.probs, rv.values):
        if q == 0:
            continue
        if math.isinf(v):
            return math.inf
        terms.append(q * v)
    return total(terms)


def is_e_variable(space: FiniteSpace, rv: RandomVariable, tol: float = DEFAULT_TOL) -> bool:
    if tol < 0:
        raise DomainError("tolerance must be nonnegative")
    return expectation(space, rv) <= 1 + tol


def p_excess(space: FiniteSpace, rv: RandomVariable) -> list[tuple[Number, Number]]:
    """``(v, P(rv <= v))`` for every achieved value ``v < 1``, in increasing ``v``.

    On a finite space ``alpha -> P(rv <= alpha)`` is a right-continuous step
    function that only jumps at achieved values, so these points are the
    only places where ``P(rv <= alpha) <= alpha`` can fail.
    """
    _check_same_space(space, rv)
    out = []
    for v in sorted(set(rv.values)):
        if v >= 1:
            break
        mass = total(q for q, x in zip(space.probs, rv.values) if x <= v)
        out.append((v, mass))
    return out


def is_p_variable(space: FiniteSpace, rv: RandomVariable, tol: float = DEFAULT_TOL) -> bool:
    if tol < 0:
        raise DomainError("tolerance must be nonnegative")
    return all(mass <= v + tol for v, mass in p_excess(space, rv))


def _encode(x: Number) -> Any:
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _decode(x: Any) -> Number:
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise DomainError(f"cannot decode number {x!r}")
    if not _is_number(x):
        raise DomainError(f"cannot decode number {x!r}")
    return float(x)
