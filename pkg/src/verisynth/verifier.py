"""Verifier geometry: acceptance rule, induced truncation bounds, contraction rate.

A verifier holds an approximate parameter vector (the ball center) and accepts
a candidate pair (x, y) when the residual against its own model is small:

    |y - x . center| <= radius * ||x|| + slack.

Restricted to a unit direction v, acceptance of y = v . theta_hat + sigma * xi
is exactly a truncation of the standard-normal noise xi to an interval, which
is what couples the verifier to the truncated-moment machinery.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidBoundsError, NonUnitDirectionError
from .truncnorm import Bounds, std_moments

#: |  ||v|| - 1 | below this is treated as exactly unit
UNIT_NORM_TOL = 1e-10
#: up to this deviation the direction is silently renormalized; beyond it, error
UNIT_NORM_RENORM_TOL = 1e-6


def default_slack(sigma: float) -> float:
    """Default verifier slack: the mean absolute Gaussian residual sqrt(2/pi)*sigma."""
    return math.sqrt(2.0 / math.pi) * sigma


@dataclass(frozen=True)
class KnowledgeBall:
    """Region of parameter space the verifier treats as plausible.

    center : the verifier's own parameter estimate (1-D array, length p)
    radius : per-unit-covariate residual allowance r >= 0
    slack  : additive residual allowance sigma_c >= 0; radius + slack must be > 0
    """

    center: np.ndarray
    radius: float
    slack: float

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        if center.ndim != 1 or center.size == 0:
            raise DimensionMismatchError("center must be a nonempty 1-D vector")
        if not np.all(np.isfinite(center)):
            raise InvalidBoundsError("center must be finite")
        if math.isnan(self.radius) or self.radius < 0.0:
            raise InvalidBoundsError(f"radius must be >= 0, got {self.radius}")
        if math.isnan(self.slack) or self.slack < 0.0:
            raise InvalidBoundsError(f"slack must be >= 0, got {self.slack}")
        if not self.radius + self.slack > 0.0:
            raise InvalidBoundsError("radius + slack must be positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "slack", float(self.slack))

    @property
    def dimension(self) -> int:
        return self.center.size


@dataclass(frozen=True)
class Interval1D:
    """Plausibility interval (lower, upper) for the scalar-mean verifier."""

    lower: float
    upper: float

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if math.isnan(lo) or math.isnan(hi):
            raise InvalidBoundsError("interval endpoints may not be NaN")
        if not lo < hi:
            raise InvalidBoundsError(f"interval must satisfy lower < upper: ({lo}, {hi})")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def midpoint(self) -> float:
        """Interval midpoint; NaN when either endpoint is infinite."""
        if math.isfinite(self.lower) and math.isfinite(self.upper):
            return 0.5 * (self.lower + self.upper)
        return math.nan


@dataclass(frozen=True)
class VerifierBias:
    """Distance between the data-generating parameter and the verifier center."""

    delta: float

    def __post_init__(self):
        if math.isnan(self.delta) or self.delta < 0.0:
            raise InvalidBoundsError(f"bias magnitude must be >= 0, got {self.delta}")

    @classmethod
    def between(cls, true_theta: np.ndarray, center: np.ndarray) -> "VerifierBias":
        t = np.asarray(true_theta, dtype=float)
        c = np.asarray(center, dtype=float)
        if t.shape != c.shape:
            raise DimensionMismatchError(f"shape mismatch {t.shape} vs {c.shape}")
        return cls(float(np.linalg.norm(t - c)))


def verify_point(ball: KnowledgeBall, x: np.ndarray, y: float) -> bool:
    """Acceptance decision for one candidate pair; the boundary is accepted."""
    x = np.asarray(x, dtype=float)
    if x.shape != (ball.dimension,):
        raise DimensionMismatchError(
            f"covariate has shape {x.shape}, verifier expects ({ball.dimension},)"
        )
    residual = abs(float(y) - float(x @ ball.center))
    return residual <= ball.radius * float(np.linalg.norm(x)) + ball.slack


def _as_unit(direction: np.ndarray) -> np.ndarray:
    nrm = float(np.linalg.norm(direction))
    if abs(nrm - 1.0) <= UNIT_NORM_TOL:
        return direction
    if abs(nrm - 1.0) <= UNIT_NORM_RENORM_TOL:
        return direction / nrm
    raise NonUnitDirectionError(f"direction norm {nrm!r} deviates from 1 beyond tolerance")


def direction_bounds(
    ball: KnowledgeBall, direction: np.ndarray, generator_mean: np.ndarray, sigma: float
) -> Bounds:
    """Standardized acceptance interval for noise along a unit direction.

    For covariate x = v (unit norm) and response y = v . generator_mean + sigma * xi,
    acceptance by the ball is equivalent to xi falling in the returned bounds:

        ( -(radius + slack) + v . (center - generator_mean) ) / sigma
        up to
        ( +(radius + slack) + v . (center - generator_mean) ) / sigma
    """
    if not sigma > 0.0:
        raise InvalidBoundsError(f"sigma must be positive, got {sigma}")
    direction = np.asarray(direction, dtype=float)
    generator_mean = np.asarray(generator_mean, dtype=float)
    if direction.shape != (ball.dimension,) or generator_mean.shape != (ball.dimension,):
        raise DimensionMismatchError(
            f"direction {direction.shape} / mean {generator_mean.shape} vs dimension {ball.dimension}"
        )
    v = _as_unit(direction)
    offset = float(v @ (ball.center - generator_mean))
    halfwidth = ball.radius + ball.slack
    return Bounds((-halfwidth + offset) / sigma, (halfwidth + offset) / sigma)


def interval_bounds_1d(interval: Interval1D, generator_mean: float, sigma: float) -> Bounds:
    """Standardized truncation bounds for scalar noise under an interval verifier."""
    if not sigma > 0.0:
        raise InvalidBoundsError(f"sigma must be positive, got {sigma}")
    return Bounds(
        (interval.lower - generator_mean) / sigma,
        (interval.upper - generator_mean) / sigma,
    )


def contraction_rate(ball: KnowledgeBall, sigma: float) -> float:
    """Per-round contraction factor rho of the verified retraining dynamics.

    rho equals the variance of a standard normal truncated to the symmetric
    interval of standardized half-width (radius + slack)/sigma; it always lies
    strictly between 0 and 1, approaching 0 for a maximally selective verifier
    and 1 for a vacuous one.
    """
    if not sigma > 0.0:
        raise InvalidBoundsError(f"sigma must be positive, got {sigma}")
    halfwidth = (ball.radius + ball.slack) / sigma
    if not math.isfinite(halfwidth):
        raise InvalidBoundsError("contraction rate requires finite radius and slack")
    return std_moments(Bounds(-halfwidth, halfwidth)).m2
