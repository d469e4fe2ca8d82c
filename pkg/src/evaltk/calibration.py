"""Moving between p-values and e-values.

p-to-e calibrators: Shafer's ``1/sqrt(p) - 1`` and the power family
``kappa * p**(kappa - 1)``.  Both are decreasing on (0, 1] and integrate to
exactly 1.  The e-to-p direction has one admissible map, ``min(1, 1/e)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .space import DEFAULT_TOL, DomainError, FiniteSpace, RandomVariable, expectation

JEFFREYS = ((0.05, 10 ** 0.5), (0.01, 10.0))


def _check_p(p: float) -> None:
    if not (0 < p <= 1):
        raise DomainError(f"p = {p!r} outside (0, 1]")


def shafer_calibrate(p: float) -> float:
    _check_p(p)
    return 1.0 / math.sqrt(p) - 1.0


def power_calibrate(kappa: float, p: float) -> float:
    if not (0 < kappa < 1):
        raise DomainError(f"kappa = {kappa!r} outside (0, 1)")
    _check_p(p)
    return kappa * p ** (kappa - 1)


@dataclass(frozen=True)
class Calibrator:
    """A built-in p-to-e calibrator, ``Calibrator("shafer")`` or ``Calibrator("power", 0.5)``."""

    kind: str
    kappa: float | None = None

    def __post_init__(self):
        if self.kind == "shafer":
            if self.kappa is not None:
                raise DomainError("the Shafer calibrator takes no kappa")
        elif self.kind == "power":
            if self.kappa is None or not (0 < self.kappa < 1):
                raise DomainError(f"power calibrator needs kappa in (0, 1), got {self.kappa!r}")
        else:
            raise DomainError(f"unknown calibrator kind {self.kind!r}")

    @classmethod
    def parse(cls, spec: str) -> Calibrator:
        """Parse ``shafer`` or ``power:<kappa>``."""
        name, _, arg = spec.strip().partition(":")
        name = name.lower()
        if name == "shafer" and not arg:
            return cls("shafer")
        if name == "power" and arg:
            try:
                kappa = float(arg)
            except ValueError:
                raise DomainError(f"bad kappa in calibrator spec {spec!r}") from None
            return cls("power", kappa)
        raise DomainError(f"bad calibrator spec {spec!r}; expected 'shafer' or 'power:<kappa>'")

    def __str__(self) -> str:
        return "shafer" if self.kind == "shafer" else f"power:{self.kappa:g}"

    def __call__(self, p: float) -> float:
        if self.kind == "shafer":
            return shafer_calibrate(p)
        return power_calibrate(self.kappa, p)

    @property
    def exact_integral(self) -> float:
        return 1.0


def e_to_p(e: float, floor: float = 0.0) -> float:
    """``min(1, 1/e)``, rounded upward so validity survives floating point.

    ``e = 0`` gives 1 and ``e = inf`` gives ``floor``.
    """
    if (isinstance(e, float) and math.isnan(e)) or e < 0:
        raise DomainError(f"e = {e!r} is negative")
    if e <= 1:
        return 1.0
    if math.isinf(e):
        return floor
    p = 1.0 / e
    # the nearest double may sit just below 1/e
    if Fraction(p) * Fraction(e) < 1:
        p = math.nextafter(p, math.inf)
    return max(floor, min(1.0, p))


def calibrate_rv(cal: Callable[[float], float], rv: RandomVariable) -> RandomVariable:
    """Apply a calibrator outcome by outcome.

    Values above 1 are clipped to 1 first (``min(p, 1)`` is still a
    p-variable) and a zero p-value becomes an infinite e-value.
    """
    return rv.map(lambda p: math.inf if p == 0 else cal(min(float(p), 1.0)))


def e_to_p_rv(rv: RandomVariable, floor: float = 0.0) -> RandomVariable:
    return rv.map(lambda e: e_to_p(e, floor))


@dataclass(frozen=True)
class RoundTripResult:
    p_in: float
    e_mid: float
    p_out: float


def round_trip(p: float, cal: Callable[[float], float]) -> RoundTripResult:
    e = cal(p)
    return RoundTripResult(p, e, e_to_p(e))


@dataclass(frozen=True)
class JeffreysRow:
    p: float
    jeffreys_e: float
    shafer_e: float
    verdict: str


def jeffreys_table() -> list[JeffreysRow]:
    rows = []
    for p, j in JEFFREYS:
        s = shafer_calibrate(p)
        rows.append(JeffreysRow(p, j, s, "overshoot" if s > j else "undershoot"))
    return rows


@dataclass
class CalibrationReport:
    monotone: bool
    integral: float
    integral_ok: bool
    evar_check: bool
    grid_expectation: float
    grid_size: int

    @property
    def ok(self) -> bool:
        return self.monotone and self.integral_ok and self.evar_check

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def midpoint_integral(f: Callable[[float], float], panels: int = 100_000) -> float:
    """Composite midpoint rule on [0, 1]; never evaluates at 0."""
    mids = (np.arange(panels) + 0.5) / panels
    return math.fsum(f(float(x)) for x in mids) / panels


def validate_calibrator(
    cal: Callable[[float], float],
    grid_size: int = 1000,
    tol: float = DEFAULT_TOL,
    panels: int = 100_000,
) -> CalibrationReport:
    """Check that ``cal`` is nonincreasing, integrates to at most 1 and maps
    the grid p-variable ``i/N`` on the uniform N-point space to an e-variable.

    Failures are reported, not raised.  Built-in calibrators use their
    analytic integral; any other callable is integrated numerically.
    """
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    grid = [i / grid_size for i in range(1, grid_size + 1)]
    vals = [cal(p) for p in grid]
    monotone = all(a >= b for a, b in zip(vals, vals[1:]))

    if isinstance(cal, Calibrator):
        integral = cal.exact_integral
    else:
        integral = midpoint_integral(cal, panels)

    space = FiniteSpace.uniform(grid_size)
    grid_e = expectation(space, RandomVariable(space, tuple(vals)))
    return CalibrationReport(
        monotone=monotone,
        integral=integral,
        integral_ok=integral <= 1 + tol,
        evar_check=grid_e <= 1 + tol,
        grid_expectation=float(grid_e),
        grid_size=grid_size,
    )
