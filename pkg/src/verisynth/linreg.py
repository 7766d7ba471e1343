"""Linear-regression retraining on the spectral block design.

The pipeline mirrors the scalar dynamics one covariate direction at a time.
From the real dataset (X0, Y0) we take the OLS estimate and the right singular
vectors v_1..v_p of X0. Each retraining round builds, for every direction j, a
block of verified synthetic responses at covariate x = v_j, averages them into
a per-direction coordinate, and reassembles

    theta_{k+1} = sum_j v_j * (v_j . theta_k + sigma * mean of truncated noise).

Because the directions are orthonormal, each coordinate evolves exactly like
the scalar mean-retraining process with bounds given by the verifier geometry,
which is what makes the closed-form one-step risk and the k-round contraction
bound below exact statements about this simulator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidBoundsError,
    MaxAttemptsError,
    RankDeficientError,
    VerisynthError,
)
from .truncnorm import sample_truncated, std_moments
from .verifier import KnowledgeBall, contraction_rate, direction_bounds

FILTER_DIRECT = "direct"
FILTER_REJECT = "reject"
FILTER_NONE = "none"
FILTER_MODES = (FILTER_DIRECT, FILTER_REJECT, FILTER_NONE)

#: REJECT-mode attempt budget per needed sample
MAX_REJECT_ATTEMPTS_PER_SAMPLE = 10 ** 6

COVARIATE_GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class Dataset:
    """A regression sample: covariate rows and matching responses."""

    covariates: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.covariates, dtype=float)
        y = np.asarray(self.responses, dtype=float)
        if x.ndim != 2:
            raise DimensionMismatchError(f"covariates must be 2-D, got shape {x.shape}")
        if y.shape != (x.shape[0],):
            raise DimensionMismatchError(
                f"responses shape {y.shape} does not match {x.shape[0]} covariate rows"
            )
        object.__setattr__(self, "covariates", x)
        object.__setattr__(self, "responses", y)

    @property
    def n(self) -> int:
        return self.covariates.shape[0]

    @property
    def dimension(self) -> int:
        return self.covariates.shape[1]


@dataclass(frozen=True)
class SpectralDesign:
    """Singular values and right singular directions of the real design matrix.

    ``directions`` holds v_j as rows (shape p x p), orthonormal within 1e-10,
    ordered by descending singular value, each row sign-fixed so its
    largest-magnitude entry is positive.
    """

    singular_values: np.ndarray
    directions: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.singular_values, dtype=float)
        v = np.asarray(self.directions, dtype=float)
        p = s.size
        if v.shape != (p, p):
            raise DimensionMismatchError(f"directions shape {v.shape} vs {p} singular values")
        if np.any(s <= 0.0) or not np.all(np.isfinite(s)):
            raise RankDeficientError("singular values must be finite and positive")
        if np.any(np.diff(s) > 0.0):
            raise InvalidBoundsError("singular values must be non-increasing")
        if not np.allclose(v @ v.T, np.eye(p), atol=1e-10):
            raise InvalidBoundsError("directions must be orthonormal within 1e-10")
        object.__setattr__(self, "singular_values", s)
        object.__setattr__(self, "directions", v)

    @property
    def dimension(self) -> int:
        return int(self.singular_values.size)


@dataclass(frozen=True)
class RetrainState:
    """Current estimator and round counter of a retraining run."""

    theta_hat: np.ndarray
    round_index: int

    def __post_init__(self):
        th = np.asarray(self.theta_hat, dtype=float)
        if th.ndim != 1:
            raise DimensionMismatchError("theta_hat must be a 1-D vector")
        if not np.all(np.isfinite(th)):
            raise InvalidBoundsError("theta_hat must be finite")
        if self.round_index < 0:
            raise InvalidBoundsError("round_index must be >= 0")
        object.__setattr__(self, "theta_hat", th)


@dataclass(frozen=True)
class LinRegConfig:
    """Regression retraining problem.

    ``schedule`` holds per-direction verified counts for each round. ``sigma``
    may be zero only in NONE (unfiltered) mode, where the update is exact.
    """

    dimension: int
    true_theta: np.ndarray
    ball: KnowledgeBall
    sigma: float
    n0: int
    schedule: np.ndarray
    filter_mode: str = FILTER_DIRECT
    covariate_law: str = COVARIATE_GAUSSIAN

    def __post_init__(self):
        theta = np.asarray(self.true_theta, dtype=float)
        if theta.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"true_theta shape {theta.shape} vs dimension {self.dimension}"
            )
        if self.ball.dimension != self.dimension:
            raise DimensionMismatchError(
                f"ball dimension {self.ball.dimension} vs problem dimension {self.dimension}"
            )
        if self.filter_mode not in FILTER_MODES:
            raise InvalidBoundsError(f"unknown filter mode {self.filter_mode!r}")
        if self.sigma < 0.0 or (self.sigma == 0.0 and self.filter_mode != FILTER_NONE):
            raise InvalidBoundsError("sigma must be > 0 (>= 0 allowed only in NONE mode)")
        if self.n0 < 1:
            raise InvalidBoundsError(f"n0 must be >= 1, got {self.n0}")
        schedule = np.asarray(self.schedule, dtype=int)
        if schedule.ndim != 1:
            raise InvalidBoundsError("schedule must be a 1-D integer array (may be empty)")
        if np.any(schedule < 1):
            raise InvalidBoundsError("schedule entries must be >= 1")
        if np.any(np.diff(schedule) < 0):
            raise InvalidBoundsError("schedule must be non-decreasing")
        if self.covariate_law != COVARIATE_GAUSSIAN:
            raise InvalidBoundsError(f"unknown covariate law {self.covariate_law!r}")
        object.__setattr__(self, "true_theta", theta)
        object.__setattr__(self, "schedule", schedule)

    @property
    def rounds(self) -> int:
        return int(self.schedule.size)


@dataclass(frozen=True)
class RetrainTrajectory:
    """Per-round records of one regression retraining run (index 0 = OLS fit)."""

    rounds: np.ndarray
    theta: np.ndarray            # (rounds+1, p)
    dist_true: np.ndarray        # ||theta_k - true_theta||
    dist_center: np.ndarray      # ||theta_k - ball center||
    verified_counts: np.ndarray  # per-direction count producing round k (n0 at k=0)
    bound: np.ndarray            # contraction bound on E||theta_k - center||^2
    rho: float


def generate_real_data(config: LinRegConfig, rng: np.random.Generator) -> Dataset:
    """Draw the real dataset: i.i.d. standard-normal covariate rows, Gaussian noise."""
    x = rng.standard_normal((config.n0, config.dimension))
    y = x @ config.true_theta + config.sigma * rng.standard_normal(config.n0)
    return Dataset(x, y)


def ols_fit(data: Dataset) -> np.ndarray:
    """Least-squares estimate via orthogonal factorization; errors on rank deficiency."""
    theta, _, rank, _ = np.linalg.lstsq(data.covariates, data.responses, rcond=None)
    if rank < data.dimension:
        raise RankDeficientError(
            f"covariates have rank {rank} < dimension {data.dimension}"
        )
    return theta


def spectral_design(covariates: np.ndarray) -> SpectralDesign:
    """SVD of the design with a deterministic sign convention on the directions."""
    x = np.asarray(covariates, dtype=float)
    if x.ndim != 2 or x.shape[0] < x.shape[1]:
        raise DimensionMismatchError(f"need at least p rows, got shape {x.shape}")
    _, s, vt = np.linalg.svd(x, full_matrices=False)
    tol = max(x.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    if s.size < x.shape[1] or np.any(s <= tol):
        raise RankDeficientError("design matrix is numerically rank deficient")
    # sign fix: make the largest-magnitude entry of each direction positive
    idx = np.argmax(np.abs(vt), axis=1)
    signs = np.sign(vt[np.arange(vt.shape[0]), idx])
    signs[signs == 0.0] = 1.0
    return SpectralDesign(s, vt * signs[:, None])


def _direction_rngs(
    rngs: np.random.Generator | Sequence[np.random.Generator], p: int
) -> list[np.random.Generator]:
    if isinstance(rngs, np.random.Generator):
        return [rngs] * p
    rngs = list(rngs)
    if len(rngs) != p:
        raise DimensionMismatchError(f"need {p} per-direction streams, got {len(rngs)}")
    return rngs


def _reject_direction_draws(
    proj_mean: float,
    direction: np.ndarray,
    config: LinRegConfig,
    n_k: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Generate-and-verify loop for one direction; returns standardized residuals.

    Applies the verifier's acceptance rule vectorized at covariate x = direction.
    """
    ball = config.ball
    halfwidth = ball.radius * float(np.linalg.norm(direction)) + ball.slack
    center_proj = float(direction @ ball.center)
    kept = np.empty(n_k)
    filled = 0
    attempts = 0
    budget = MAX_REJECT_ATTEMPTS_PER_SAMPLE * n_k
    while filled < n_k:
        k = min(max(2 * (n_k - filled), 64), budget - attempts)
        if k <= 0:
            raise MaxAttemptsError(f"REJECT filter exhausted {budget} attempts")
        y = proj_mean + config.sigma * rng.standard_normal(k)
        attempts += k
        got = y[np.abs(y - center_proj) <= halfwidth]
        take = min(got.size, n_k - filled)
        kept[filled : filled + take] = got[:take]
        filled += take
    return (kept - proj_mean) / config.sigma


def retrain_round(
    state: RetrainState,
    design: SpectralDesign,
    config: LinRegConfig,
    n_k: int,
    rngs: np.random.Generator | Sequence[np.random.Generator],
) -> RetrainState:
    """One block-design retraining round with ``n_k`` verified samples per direction.

    ``rngs`` is either a single generator (consumed direction by direction) or a
    sequence of one independent generator per direction.
    """
    if n_k < 1:
        raise InvalidBoundsError(f"n_k must be >= 1, got {n_k}")
    p = design.dimension
    if state.theta_hat.shape != (p,):
        raise DimensionMismatchError(
            f"state dimension {state.theta_hat.shape} vs design dimension {p}"
        )
    streams = _direction_rngs(rngs, p)
    new_theta = np.zeros(p)
    for j in range(p):
        v = design.directions[j]
        proj = float(v @ state.theta_hat)
        try:
            if config.filter_mode == FILTER_NONE:
                noise = streams[j].standard_normal(n_k)
            elif config.filter_mode == FILTER_DIRECT:
                bounds = direction_bounds(config.ball, v, state.theta_hat, config.sigma)
                noise = sample_truncated(bounds, n_k, streams[j])
            else:
                noise = _reject_direction_draws(proj, v, config, n_k, streams[j])
        except VerisynthError as exc:
            raise type(exc)(f"direction {j}: {exc}") from exc
        new_theta += v * (proj + config.sigma * float(noise.mean()))
    return RetrainState(new_theta, state.round_index + 1)


def baseline_mse(design: SpectralDesign, sigma: float) -> float:
    """Exact OLS risk conditional on the design: sigma^2 * sum_j mu_j^-2."""
    return float(sigma * sigma * np.sum(design.singular_values ** -2.0))


def one_step_prediction(
    design: SpectralDesign,
    true_theta: np.ndarray,
    ball: KnowledgeBall,
    sigma: float,
    n1: int,
) -> float:
    """Closed-form E||theta_1 - true_theta||^2 after one verified retraining round.

    Per direction, with standardized acceptance bounds evaluated at the true
    parameter, the risk contribution is m2/n1 + m1^2 + (m1 m3 + m2^2)/mu_j^2,
    all scaled by sigma^2. Raises DegenerateIntervalError when some direction's
    acceptance region carries no mass.
    """
    if n1 < 1:
        raise InvalidBoundsError(f"n1 must be >= 1, got {n1}")
    true_theta = np.asarray(true_theta, dtype=float)
    if true_theta.shape != (design.dimension,):
        raise DimensionMismatchError(
            f"true_theta shape {true_theta.shape} vs design dimension {design.dimension}"
        )
    total = 0.0
    for j in range(design.dimension):
        bounds = direction_bounds(ball, design.directions[j], true_theta, sigma)
        m = std_moments(bounds)
        mu_sq = float(design.singular_values[j]) ** 2
        total += m.m2 / n1 + m.m1 ** 2 + (m.m1 * m.m3 + m.m2 ** 2) / mu_sq
    return float(sigma * sigma * total)


def long_term_bound(
    ball: KnowledgeBall,
    sigma: float,
    dimension: int,
    initial_sq_error: float,
    schedule: np.ndarray,
    k: int,
) -> float:
    """k-round bound on E||theta_k - center||^2 under per-direction schedule n_j.

    rho^(2k) * initial + dimension * sigma^2 * sum_{j<k} rho^(2(k-j)-1) / n_j,
    with rho the verifier's contraction rate.
    """
    if initial_sq_error < 0.0:
        raise InvalidBoundsError("initial squared error must be >= 0")
    rho = contraction_rate(ball, sigma)
    schedule = np.asarray(schedule, dtype=float)
    if k < 0 or k > schedule.size:
        raise InvalidBoundsError(f"k must lie in [0, len(schedule)], got {k}")
    if k == 0:
        return float(initial_sq_error)
    j = np.arange(k)
    noise = np.sum(rho ** (2 * (k - j) - 1) / schedule[:k])
    return float(rho ** (2 * k) * initial_sq_error + dimension * sigma * sigma * noise)


def run_retraining(config: LinRegConfig, rng: np.random.Generator) -> RetrainTrajectory:
    """Full sequential run: real data, OLS, spectral design, scheduled rounds.

    Consumes a single stream; the experiment harness drives the same primitives
    with per-(replication, round, direction) streams instead.
    """
    data = generate_real_data(config, rng)
    design = spectral_design(data.covariates)
    state = RetrainState(ols_fit(data), 0)
    p = config.dimension
    k_rounds = config.rounds
    theta = np.empty((k_rounds + 1, p))
    theta[0] = state.theta_hat
    counts = np.empty(k_rounds + 1, dtype=int)
    counts[0] = config.n0
    for k, n_k in enumerate(config.schedule, start=1):
        state = retrain_round(state, design, config, int(n_k), rng)
        theta[k] = state.theta_hat
        counts[k] = n_k
    dist_true = np.linalg.norm(theta - config.true_theta[None, :], axis=1)
    dist_center = np.linalg.norm(theta - config.ball.center[None, :], axis=1)
    if config.filter_mode == FILTER_NONE:
        rho = math.nan
        bound = np.full(k_rounds + 1, math.nan)
    else:
        rho = contraction_rate(config.ball, config.sigma)
        init = float(dist_center[0] ** 2)
        bound = np.array(
            [long_term_bound(config.ball, config.sigma, p, init, config.schedule, k)
             for k in range(k_rounds + 1)]
        )
    return RetrainTrajectory(
        np.arange(k_rounds + 1), theta, dist_true, dist_center, counts, bound, rho
    )
