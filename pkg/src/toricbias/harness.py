"""Monte Carlo experiment orchestration and threshold estimation.

A sweep evaluates decoder failure frequencies over a grid of actual
rates at several lattice sizes.  Trials are keyed by (stream, trial)
through the counter-based RNG policy and reduced in index order, so the
result is bit-identical for any worker count.  The threshold estimate
is the mean crossing point of linearly interpolated failure curves for
consecutive lattice sizes.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .decoder import decode_and_classify
from .lattice import LatticeGeometry, LogicalClass
from .noise import IndependentXZModel, RngSeedPolicy, sample_xz

MATCHED = "matched"
SYMMETRIC_AVERAGE = "symmetric_average"
FIXED = "fixed"

# Curves must reach below/above these failure levels to count as
# spanning the transition for crossing estimation.
SPAN_LOW = 0.2
SPAN_HIGH = 0.4


class InsufficientDataError(ValueError):
    """A failure curve does not span the transition region."""


@dataclass(frozen=True)
class AssumedPolicy:
    """How the decoder's assumed rates follow the actual rates.

    ``matched`` uses the actual rates; ``symmetric_average`` uses
    p_X = p_Z = (actual_X + actual_Z)/2; ``fixed`` always uses
    ``fixed_rates``.
    """

    kind: str
    fixed_rates: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind not in (MATCHED, SYMMETRIC_AVERAGE, FIXED):
            raise ValueError(f"unknown assumed policy {self.kind!r}")
        if self.kind == FIXED and self.fixed_rates is None:
            raise ValueError("fixed policy requires rates")

    def assumed_for(self, actual: IndependentXZModel) -> IndependentXZModel:
        if self.kind == MATCHED:
            return actual
        if self.kind == SYMMETRIC_AVERAGE:
            mean = 0.5 * (actual.p_x + actual.p_z)
            return IndependentXZModel(mean, mean)
        assert self.fixed_rates is not None
        return IndependentXZModel(*self.fixed_rates)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: sizes x rate grid, a policy, trials, and a seed."""

    sizes: tuple[int, ...]
    actual_grid: tuple[IndependentXZModel, ...]
    assumed_policy: AssumedPolicy
    trials: int
    master_seed: int
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.sizes or any(n < 2 for n in self.sizes):
            raise ValueError("need at least one lattice size, all >= 2")
        if not self.actual_grid:
            raise ValueError("rate grid must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def grid_sum_rates(self) -> list[float]:
        return [m.p_x + m.p_z for m in self.actual_grid]


@dataclass
class CurvePoint:
    """Failure statistics at one (size, rate) grid point."""

    n: int
    actual: IndependentXZModel
    assumed: IndependentXZModel
    trials: int
    failures: int
    lattice_failures: tuple[int, int]

    @property
    def failure_probability(self) -> float:
        return self.failures / self.trials

    @property
    def stderr(self) -> float:
        f = self.failure_probability
        return float(np.sqrt(f * (1.0 - f) / self.trials))


@dataclass
class ThresholdCurve:
    """Failure-vs-rate curve at a fixed lattice size."""

    n: int
    points: list[CurvePoint] = field(default_factory=list)

    def sum_rates(self) -> np.ndarray:
        return np.array([p.actual.p_x + p.actual.p_z for p in self.points])

    def failure_probabilities(self) -> np.ndarray:
        return np.array([p.failure_probability for p in self.points])

    def stderrs(self) -> np.ndarray:
        return np.array([p.stderr for p in self.points])


@dataclass
class CrossingEstimate:
    """Threshold in total rate p_X + p_Z, from pairwise curve crossings."""

    rate: float
    uncertainty: float
    pairwise: list[float]


def _point_stream(config: ExperimentConfig, size_index: int, point_index: int) -> int:
    """Distinct RNG stream per (size, grid point) pair."""
    return size_index * len(config.actual_grid) + point_index


def _run_point(args) -> tuple[int, int, int, int, int]:
    """One grid point, all trials; returns failure counts.

    Sequential over trial index with a counter-based generator per
    trial, so the result only depends on (master_seed, stream, trial).
    """
    config, size_index, point_index = args
    n = config.sizes[size_index]
    actual = config.actual_grid[point_index]
    assumed = config.assumed_policy.assumed_for(actual)
    geometry = LatticeGeometry(n)
    stream = _point_stream(config, size_index, point_index)

    failures = fail1 = fail2 = 0
    for trial in range(config.trials):
        policy = RngSeedPolicy(config.master_seed, stream, trial)
        pattern = sample_xz(actual, geometry, policy)
        outcome = decode_and_classify(pattern, assumed, geometry)
        if not outcome.success:
            failures += 1
        if outcome.classes[0] is not LogicalClass.IDENTITY:
            fail1 += 1
        if outcome.classes[1] is not LogicalClass.IDENTITY:
            fail2 += 1
    return size_index, point_index, failures, fail1, fail2


def run_sweep(config: ExperimentConfig, log=None) -> list[ThresholdCurve]:
    """Evaluate every (size, rate) grid point; deterministic in the seed.

    Results are reduced in (size, point) index order whatever the
    scheduling, and each trial draws from its own counter-based stream,
    so the worker count has no semantic effect.
    """
    jobs = [
        (config, si, pi)
        for si in range(len(config.sizes))
        for pi in range(len(config.actual_grid))
    ]
    if config.workers > 1:
        with multiprocessing.Pool(config.workers) as pool:
            raw = pool.map(_run_point, jobs)
    else:
        raw = [_run_point(job) for job in jobs]
    raw.sort(key=lambda item: (item[0], item[1]))

    curves = [ThresholdCurve(n=n) for n in config.sizes]
    for size_index, point_index, failures, fail1, fail2 in raw:
        actual = config.actual_grid[point_index]
        point = CurvePoint(
            n=config.sizes[size_index],
            actual=actual,
            assumed=config.assumed_policy.assumed_for(actual),
            trials=config.trials,
            failures=failures,
            lattice_failures=(fail1, fail2),
        )
        curves[size_index].points.append(point)
        if log is not None:
            log(
                f"n={point.n} p_x={actual.p_x:.6f} p_z={actual.p_z:.6f} "
                f"failure={point.failure_probability:.4f} "
                f"stderr={point.stderr:.4f}"
            )
    return curves


def _pair_crossing(a: ThresholdCurve, b: ThresholdCurve) -> float:
    """Crossing of two linearly interpolated failure curves.

    Scans for a sign change of the difference (smaller size minus
    larger); the interpolated zero is the finite-size crossing point.
    """
    rates = a.sum_rates()
    if not np.array_equal(rates, b.sum_rates()):
        raise ValueError("curves must share a rate grid")
    diff = a.failure_probabilities() - b.failure_probabilities()
    for i in range(len(diff) - 1):
        if diff[i] == 0.0:
            return float(rates[i])
        if (diff[i] < 0.0) != (diff[i + 1] < 0.0):
            span = diff[i + 1] - diff[i]
            frac = -diff[i] / span if span != 0.0 else 0.5
            return float(rates[i] + frac * (rates[i + 1] - rates[i]))
    if diff[-1] == 0.0:
        return float(rates[-1])
    # no sign change: nearest approach as a degraded estimate
    return float(rates[int(np.argmin(np.abs(diff)))])


def estimate_threshold(curves: list[ThresholdCurve]) -> CrossingEstimate:
    """Mean pairwise crossing of consecutive-size curves.

    Every curve must span the transition (failure below 0.2 somewhere
    and above 0.4 somewhere); otherwise the offending size is named in
    an InsufficientDataError.  Uncertainty is the half-spread of the
    pairwise crossings plus the binomial error propagated through the
    local slope of the steepest-available curve.
    """
    if len(curves) < 2:
        raise InsufficientDataError("need curves at >= 2 sizes")
    for curve in curves:
        fails = curve.failure_probabilities()
        if fails.min() >= SPAN_LOW or fails.max() <= SPAN_HIGH:
            raise InsufficientDataError(
                f"curve at n={curve.n} does not span the transition "
                f"(failure range [{fails.min():.3f}, {fails.max():.3f}], "
                f"need min < {SPAN_LOW} and max > {SPAN_HIGH})"
            )

    ordered = sorted(curves, key=lambda c: c.n)
    pairwise = [
        _pair_crossing(ordered[i], ordered[i + 1])
        for i in range(len(ordered) - 1)
    ]
    rate = float(np.mean(pairwise))
    half_spread = 0.5 * (max(pairwise) - min(pairwise))

    # propagate binomial noise through the local slope of the largest
    # (steepest) curve near the crossing
    steep = ordered[-1]
    rates = steep.sum_rates()
    idx = int(np.argmin(np.abs(rates - rate)))
    lo = max(idx - 1, 0)
    hi = min(idx + 1, len(rates) - 1)
    drate = rates[hi] - rates[lo]
    dfail = steep.failure_probabilities()[hi] - steep.failure_probabilities()[lo]
    slope = abs(dfail / drate) if drate > 0 and dfail != 0 else None
    noise = float(steep.stderrs()[idx] / slope) if slope else float(
        rates[min(idx + 1, len(rates) - 1)] - rates[max(idx - 1, 0)]
    )
    return CrossingEstimate(rate, half_spread + noise, pairwise)


def biased_grid(
    ratio: float, totals, sizes: tuple[int, ...], trials: int, seed: int,
    policy: AssumedPolicy | None = None, workers: int = 1,
) -> ExperimentConfig:
    """Config for a fixed-bias slice: p_x/p_z = ratio, sweeping the total."""
    grid = []
    for total in totals:
        p_z = total / (1.0 + ratio)
        grid.append(IndependentXZModel(total - p_z, p_z))
    return ExperimentConfig(
        sizes=tuple(sizes),
        actual_grid=tuple(grid),
        assumed_policy=policy or AssumedPolicy(MATCHED),
        trials=trials,
        master_seed=seed,
        workers=workers,
    )
