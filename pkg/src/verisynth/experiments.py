"""Experiment drivers: deterministic Monte Carlo over the three study designs.

Each driver maps an ExperimentConfig to a list of row dicts matching the CSV
schemas in :mod:`verisynth.output`. All randomness flows through
:func:`verisynth.seeding.derive_stream`, keyed by (master_seed, replication,
round, direction), so results are byte-identical for any worker count:
replications write into disjoint slots of preallocated arrays and every
reduction happens after the pool drains, in index order.

Arms of an iterative experiment (e.g. verified vs unfiltered) reuse the same
stream keys — common random numbers — which makes between-arm comparisons
conservative when paired with per-arm standard errors.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from .config import (
    KIND_ITERATE_1D,
    KIND_ITERATE_LINREG,
    KIND_LANDSCAPE,
    ExperimentConfig,
)
from .errors import (
    ConfigError,
    DegenerateIntervalError,
    InsufficientRoundsError,
)
from .gaussian1d import (
    Gaussian1DConfig,
    initial_mean,
    long_term_bound_1d,
    one_step_mse_prediction_1d,
    retrain_step,
)
from .linreg import (
    FILTER_NONE,
    LinRegConfig,
    RetrainState,
    baseline_mse,
    long_term_bound,
    one_step_prediction,
    retrain_round,
    spectral_design,
)
from .seeding import derive_stream
from .truncnorm import Bounds, std_moments
from .verifier import Interval1D, KnowledgeBall, contraction_rate, interval_bounds_1d

STATUS_OK = "ok"
STATUS_DEGENERATE = "degenerate"

#: rounds dropped from the front of a trajectory before fitting the decay rate
CONTRACTION_BURN_IN = 10


# ---------------------------------------------------------------------------
# shared experiment-level draws


def design_matrix(config: ExperimentConfig) -> np.ndarray:
    """The real covariate matrix X0, fixed per experiment from a reserved stream."""
    rng = derive_stream(config.master_seed, 0, 0, 0)
    return rng.standard_normal((config.n0, config.dimension))


def bias_direction(config: ExperimentConfig) -> np.ndarray:
    """Unit vector along which verifier centers are displaced from truth."""
    rng = derive_stream(config.master_seed, 0, 0, 1)
    raw = rng.standard_normal(config.dimension)
    return raw / np.linalg.norm(raw)


def resolve_ball(config: ExperimentConfig) -> KnowledgeBall:
    """The experiment's verifier ball, placing the center for delta-style configs."""
    theta = np.asarray(config.true_theta, dtype=float)
    if config.ball_center is not None:
        center = np.asarray(config.ball_center, dtype=float)
    else:
        center = theta + config.ball_delta * bias_direction(config)
    return KnowledgeBall(center, config.ball_radius, config.slack)


def _real_theta_hat(
    covariates: np.ndarray, theta: np.ndarray, sigma: float, seed: int, rep: int
) -> np.ndarray:
    rng = derive_stream(seed, rep, 0, 0)
    responses = covariates @ theta + sigma * rng.standard_normal(covariates.shape[0])
    theta_hat, *_ = np.linalg.lstsq(covariates, responses, rcond=None)
    return theta_hat


def _round_streams(seed: int, rep: int, round_index: int, p: int):
    return [derive_stream(seed, rep, round_index, j) for j in range(1, p + 1)]


def _run_pool(worker: Callable[[int], None], replications: int, threads: int) -> None:
    if threads <= 1:
        for rep in range(1, replications + 1):
            worker(rep)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for future in [pool.submit(worker, rep) for rep in range(1, replications + 1)]:
            future.result()


def _mean_se(samples: np.ndarray, axis: int = 0) -> tuple[np.ndarray, np.ndarray]:
    mean = samples.mean(axis=axis)
    n = samples.shape[axis]
    if n > 1:
        se = samples.std(axis=axis, ddof=1) / math.sqrt(n)
    else:
        se = np.zeros_like(mean)
    return mean, se


# ---------------------------------------------------------------------------
# one-step landscape


def run_landscape(config: ExperimentConfig, threads: int = 1) -> list[dict]:
    """Mean log error-reduction ratio over a (delta, r) verifier grid.

    Returns one row per grid cell with the empirical statistic, its standard
    error, and the closed-form prediction. Cells whose acceptance region is
    degenerate for the theory point or any replication are emitted with
    status 'degenerate' and NaN statistics rather than dropped.
    """
    if config.kind != KIND_LANDSCAPE:
        raise ConfigError(f"run_landscape needs a landscape config, got {config.kind}")
    theta = np.asarray(config.true_theta, dtype=float)
    covariates = design_matrix(config)
    design = spectral_design(covariates)
    direction = bias_direction(config)
    reps, p = config.replications, config.dimension
    base = baseline_mse(design, config.sigma)

    cells = [(d, r) for d in config.delta_values for r in config.r_values]
    balls: list[KnowledgeBall | None] = []
    theory: list[float] = []
    degenerate = np.zeros(len(cells), dtype=bool)
    for i, (delta, radius) in enumerate(cells):
        ball = KnowledgeBall(theta + delta * direction, radius, config.sigma_c)
        balls.append(ball)
        try:
            one_step = one_step_prediction(design, theta, ball, config.sigma, config.n1)
            theory.append(0.5 * math.log(base / one_step))
        except DegenerateIntervalError:
            degenerate[i] = True
            theory.append(math.nan)

    cell_configs = [
        None if degenerate[i] else LinRegConfig(
            dimension=p, true_theta=theta, ball=balls[i], sigma=config.sigma,
            n0=config.n0, schedule=np.array([config.n1]),
        )
        for i in range(len(cells))
    ]
    norm0 = np.empty(reps)
    norm1 = np.full((len(cells), reps), math.nan)

    def worker(rep: int) -> None:
        theta_hat = _real_theta_hat(covariates, theta, config.sigma, config.master_seed, rep)
        norm0[rep - 1] = np.linalg.norm(theta_hat - theta)
        state0 = RetrainState(theta_hat, 0)
        for i, cell_config in enumerate(cell_configs):
            if cell_config is None:
                continue
            streams = _round_streams(config.master_seed, rep, 1, p)
            try:
                state1 = retrain_round(state0, design, cell_config, config.n1, streams)
            except DegenerateIntervalError:
                degenerate[i] = True
                continue
            norm1[i, rep - 1] = np.linalg.norm(state1.theta_hat - theta)

    _run_pool(worker, reps, threads)

    rows = []
    for i, (delta, radius) in enumerate(cells):
        if degenerate[i] or np.any(~np.isfinite(norm1[i])):
            mean = se = math.nan
            status = STATUS_DEGENERATE
        else:
            status = STATUS_OK
            if config.log_ratio_of_means:
                m0, m1 = norm0.mean(), norm1[i].mean()
                mean = math.log(m0 / m1)
                cov = np.cov(norm0, norm1[i], ddof=1)
                var = (cov[0, 0] / m0 ** 2 + cov[1, 1] / m1 ** 2
                       - 2.0 * cov[0, 1] / (m0 * m1)) / reps
                se = math.sqrt(max(var, 0.0))
            else:
                logs = np.log(norm0 / norm1[i])
                mean, se = (float(v) for v in _mean_se(logs))
        rows.append({
            "delta": delta, "r": radius, "sigma_c": config.sigma_c,
            "log_ratio_mean": mean, "log_ratio_se": se,
            "theory_log_ratio": theory[i] if not degenerate[i] else math.nan,
            "n_reps": reps, "status": status,
        })
    return rows


# ---------------------------------------------------------------------------
# iterative retraining (linear regression)


def _run_iterative_linreg(config: ExperimentConfig, threads: int) -> list[dict]:
    theta = np.asarray(config.true_theta, dtype=float)
    covariates = design_matrix(config)
    design = spectral_design(covariates)
    ball = resolve_ball(config)
    reps, p = config.replications, config.dimension
    per_dir = config.schedule.per_direction_counts(p)
    k_rounds = per_dir.size

    arm_configs = {
        arm: LinRegConfig(
            dimension=p, true_theta=theta, ball=ball, sigma=config.sigma,
            n0=config.n0, schedule=per_dir, filter_mode=arm,
        )
        for arm in config.arms
    }
    sq_star = {arm: np.empty((reps, k_rounds + 1)) for arm in config.arms}
    sq_center = {arm: np.empty((reps, k_rounds + 1)) for arm in config.arms}

    def worker(rep: int) -> None:
        theta_hat = _real_theta_hat(covariates, theta, config.sigma, config.master_seed, rep)
        for arm, arm_config in arm_configs.items():
            state = RetrainState(theta_hat, 0)
            sq_star[arm][rep - 1, 0] = np.sum((theta_hat - theta) ** 2)
            sq_center[arm][rep - 1, 0] = np.sum((theta_hat - ball.center) ** 2)
            for k in range(1, k_rounds + 1):
                streams = _round_streams(config.master_seed, rep, k, p)
                state = retrain_round(state, design, arm_config, int(per_dir[k - 1]), streams)
                sq_star[arm][rep - 1, k] = np.sum((state.theta_hat - theta) ** 2)
                sq_center[arm][rep - 1, k] = np.sum((state.theta_hat - ball.center) ** 2)

    _run_pool(worker, reps, threads)

    delta_sq = float(np.sum((ball.center - theta) ** 2))
    init_expected = baseline_mse(design, config.sigma) + delta_sq
    rows = []
    for arm in config.arms:
        if arm == FILTER_NONE:
            rho = math.nan
            bounds = [math.nan] * (k_rounds + 1)
        else:
            rho = contraction_rate(ball, config.sigma)
            bounds = [
                long_term_bound(ball, config.sigma, p, init_expected, per_dir, k)
                for k in range(k_rounds + 1)
            ]
        star_mean, star_se = _mean_se(sq_star[arm])
        center_mean, center_se = _mean_se(sq_center[arm])
        for k in range(k_rounds + 1):
            rows.append({
                "arm": arm, "round": k,
                "n_k_per_direction": 0 if k == 0 else int(per_dir[k - 1]),
                "dist_theta_star_mean": float(star_mean[k]),
                "dist_theta_star_se": float(star_se[k]),
                "dist_center_mean": float(center_mean[k]),
                "dist_center_se": float(center_se[k]),
                "theory_bound": bounds[k], "rho": rho, "n_reps": reps,
            })
    return rows


# ---------------------------------------------------------------------------
# iterative retraining (1-D Gaussian mean)


def _interval_contraction(interval: Interval1D, sigma: float) -> float:
    """Contraction rate of the 1-D retraining map: truncated variance at the
    fixed point (the interval midpoint). NaN for semi-infinite intervals,
    whose dynamics do not contract."""
    if not (math.isfinite(interval.lower) and math.isfinite(interval.upper)):
        return math.nan
    half_width = 0.5 * (interval.upper - interval.lower) / sigma
    return std_moments(Bounds(-half_width, half_width)).m2


def _run_iterative_1d(config: ExperimentConfig, threads: int) -> list[dict]:
    interval = Interval1D(config.interval_lower, config.interval_upper)
    per_dir = config.schedule.per_direction_counts(1)
    k_rounds = per_dir.size
    reps = config.replications
    arm = config.arms[0]
    cfg1d = Gaussian1DConfig(
        true_mean=config.true_mean, sigma=config.sigma, interval=interval,
        n0=config.n0, schedule=per_dir, filter_mode=arm,
    )
    estimates = np.empty((reps, k_rounds + 1))

    def worker(rep: int) -> None:
        mean = initial_mean(cfg1d, derive_stream(config.master_seed, rep, 0, 0))
        estimates[rep - 1, 0] = mean
        for k in range(1, k_rounds + 1):
            stream = derive_stream(config.master_seed, rep, k, 1)
            mean = retrain_step(mean, cfg1d, int(per_dir[k - 1]), stream)
            estimates[rep - 1, k] = mean

    _run_pool(worker, reps, threads)

    midpoint = interval.midpoint
    rho = _interval_contraction(interval, config.sigma)
    est_mean, est_se = _mean_se(estimates)
    if math.isfinite(midpoint):
        sq = (estimates - midpoint) ** 2
        sq_mean, sq_se = _mean_se(sq)
        init_std = 1.0 / config.n0 + ((config.true_mean - midpoint) / config.sigma) ** 2
        bounds = [
            config.sigma ** 2 * long_term_bound_1d(rho, init_std, per_dir, k)
            for k in range(k_rounds + 1)
        ]
    else:
        sq_mean = sq_se = np.full(k_rounds + 1, math.nan)
        bounds = [math.nan] * (k_rounds + 1)

    rows = []
    for k in range(k_rounds + 1):
        rows.append({
            "round": k, "n_k": 0 if k == 0 else int(per_dir[k - 1]),
            "mean_estimate_mean": float(est_mean[k]),
            "mean_estimate_se": float(est_se[k]),
            "dist_midpoint_mean": float(sq_mean[k]),
            "dist_midpoint_se": float(sq_se[k]),
            "theory_bound": bounds[k], "n_reps": reps,
        })
    return rows


def run_iterative(config: ExperimentConfig, threads: int = 1) -> list[dict]:
    """Per-round Monte Carlo trajectory statistics with the matching theory bound.

    Linear-regression configs yield one row block per arm (trajectory.csv
    schema); 1-D configs yield one block (gaussian1d.csv schema). Distance
    columns hold mean SQUARED distances so they are directly comparable to the
    contraction bound.
    """
    if config.kind == KIND_ITERATE_LINREG:
        return _run_iterative_linreg(config, threads)
    if config.kind == KIND_ITERATE_1D:
        return _run_iterative_1d(config, threads)
    raise ConfigError(f"run_iterative needs an iterate config, got {config.kind}")


# ---------------------------------------------------------------------------
# empirical contraction rate and closed-form summaries


def estimate_contraction(
    rounds: np.ndarray, mean_sq_dist: np.ndarray, burn_in: int = CONTRACTION_BURN_IN
) -> float:
    """Empirical contraction rate from a mean-squared-distance trajectory.

    Fits log E-distance^2 against the round index by least squares on rounds
    >= ``burn_in`` and returns exp(slope / 2). Requires at least 10 usable
    (finite, positive) points after burn-in.
    """
    rounds = np.asarray(rounds, dtype=float)
    mean_sq = np.asarray(mean_sq_dist, dtype=float)
    if rounds.shape != mean_sq.shape or rounds.ndim != 1:
        raise InsufficientRoundsError("rounds and mean_sq_dist must be matching 1-D arrays")
    keep = (rounds >= burn_in) & np.isfinite(mean_sq) & (mean_sq > 0.0)
    if keep.sum() < 10:
        raise InsufficientRoundsError(
            f"need >= 10 usable rounds after burn-in {burn_in}, got {int(keep.sum())}"
        )
    slope = np.polyfit(rounds[keep], np.log(mean_sq[keep]), 1)[0]
    return float(math.exp(0.5 * slope))


def theory_summary(config: ExperimentConfig) -> dict:
    """Closed-form predictions for a config, computed without simulation."""
    if config.kind == KIND_LANDSCAPE:
        design = spectral_design(design_matrix(config))
        theta = np.asarray(config.true_theta, dtype=float)
        direction = bias_direction(config)
        base = baseline_mse(design, config.sigma)
        cells = []
        for delta in config.delta_values:
            for radius in config.r_values:
                ball = KnowledgeBall(theta + delta * direction, radius, config.sigma_c)
                try:
                    one_step = one_step_prediction(
                        design, theta, ball, config.sigma, config.n1
                    )
                    ratio = 0.5 * math.log(base / one_step)
                except DegenerateIntervalError:
                    one_step = math.nan
                    ratio = math.nan
                cells.append({"delta": delta, "r": radius,
                              "one_step_mse": one_step, "theory_log_ratio": ratio})
        return {"experiment": config.kind, "baseline_mse": base, "cells": cells}
    if config.kind == KIND_ITERATE_LINREG:
        design = spectral_design(design_matrix(config))
        theta = np.asarray(config.true_theta, dtype=float)
        ball = resolve_ball(config)
        per_dir = config.schedule.per_direction_counts(config.dimension)
        base = baseline_mse(design, config.sigma)
        init = base + float(np.sum((ball.center - theta) ** 2))
        rho = contraction_rate(ball, config.sigma)
        return {
            "experiment": config.kind,
            "rho": rho,
            "baseline_mse": base,
            "initial_expected_sq_center": init,
            "one_step_mse": one_step_prediction(
                design, theta, ball, config.sigma, int(per_dir[0])
            ),
            "final_round_bound": long_term_bound(
                ball, config.sigma, config.dimension, init, per_dir, per_dir.size
            ),
        }
    if config.kind == KIND_ITERATE_1D:
        interval = Interval1D(config.interval_lower, config.interval_upper)
        per_dir = config.schedule.per_direction_counts(1)
        rho = _interval_contraction(interval, config.sigma)
        bounds = interval_bounds_1d(interval, config.true_mean, config.sigma)
        out = {
            "experiment": config.kind,
            "rho": rho,
            "fixed_point": interval.midpoint,
            "one_step_mse": config.sigma ** 2 * one_step_mse_prediction_1d(
                bounds, config.n0, int(per_dir[0])
            ),
        }
        if math.isfinite(interval.midpoint):
            init_std = (1.0 / config.n0
                        + ((config.true_mean - interval.midpoint) / config.sigma) ** 2)
            out["final_round_bound"] = config.sigma ** 2 * long_term_bound_1d(
                rho, init_std, per_dir, per_dir.size
            )
        return out
    raise ConfigError(f"unknown experiment kind {config.kind}")
