"""Monte Carlo accuracy sweeps and the long-tail iteration race.

Every trial draws its noise from its own PCG64 stream keyed by
``(base_seed, axis index, trial index)``, so results do not depend on how
trials are split across worker processes.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errmodel import K1_DEFAULT, K2_DEFAULT, predict_relative_error
from .errors import GaussFitError
from .fitters import ONE_SHOT, Algorithm, IterationPolicy, fit, residual_sum_of_squares
from .model import Dataset, GaussianParams, Scenario, evaluate

DEFAULT_TRUTH = GaussianParams(1.0, 10.0, 2.0)
DEFAULT_ALGORITHMS = (Algorithm.CARUANA, Algorithm.GUO, Algorithm.ROONIZI, Algorithm.FAS)
DEFAULT_TRIALS = 10_000
_CHUNK = 2_000


class Axis(str, enum.Enum):
    SNR = "snr"
    W = "w"
    N = "n"

    def __str__(self):
        return self.value


def are_percent(estimate: float, truth: float) -> float:
    """Absolute relative error in percent."""
    if not truth > 0:
        raise ValueError(f"truth must be positive, got {truth!r}")
    return 100.0 * abs(estimate - truth) / truth


def trial_rng(base_seed: int, axis_index: int, trial: int) -> np.random.Generator:
    seq = np.random.SeedSequence([int(base_seed), int(axis_index), int(trial)])
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class SweepConfig:
    """One Monte Carlo experiment: vary ``axis`` over ``values``, hold the rest.

    ``snr`` may be ``math.inf`` for noiseless runs.
    """

    axis: Axis
    values: tuple
    truth: GaussianParams = DEFAULT_TRUTH
    snr: float = 25.0
    width_ratio: float = 12.0
    n: int = 200
    trials: int = DEFAULT_TRIALS
    algorithms: tuple = DEFAULT_ALGORITHMS
    policy: IterationPolicy = ONE_SHOT
    base_seed: int = 0
    k1: float = K1_DEFAULT
    k2: float = K2_DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis(self.axis))
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("values must not be empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("values must be strictly increasing")
        if self.axis is Axis.N:
            if any(v != int(v) or v < 3 for v in values):
                raise ValueError("n values must be integers >= 3")
            values = tuple(int(v) for v in values)
        elif not all(v > 0 for v in values):
            raise ValueError(f"{self.axis.value} values must be positive")
        object.__setattr__(self, "values", values)
        algorithms = tuple(Algorithm(a) for a in self.algorithms)
        if not algorithms or len(set(algorithms)) != len(algorithms):
            raise ValueError("algorithms must be a non-empty list without repeats")
        object.__setattr__(self, "algorithms", algorithms)
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must fit in an unsigned 64-bit integer")
        if not (self.snr > 0 and self.width_ratio > 0):
            raise ValueError("snr and width_ratio must be positive")
        if int(self.n) != self.n or self.n < 3:
            raise ValueError("n must be an integer >= 3")

    def point(self, value) -> tuple[float, float, int]:
        """``(snr, width_ratio, n)`` at one axis value."""
        snr, w, n = self.snr, self.width_ratio, int(self.n)
        if self.axis is Axis.SNR:
            snr = value
        elif self.axis is Axis.W:
            w = value
        else:
            n = int(value)
        return snr, w, n


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    mean_are_pct: dict = field(default_factory=dict)
    worst_are_pct: dict = field(default_factory=dict)
    theoretical_worst_pct: float = 0.0
    failures: dict = field(default_factory=dict)

    @property
    def algorithms(self) -> tuple:
        return tuple(self.mean_are_pct)


def _run_trials(config: SweepConfig, axis_index: int, start: int, stop: int) -> np.ndarray:
    """ARE% of sigma for trials ``start..stop``; shape (trials, algorithms), NaN on failure."""
    snr, w, n = config.point(config.values[axis_index])
    truth = config.truth
    xs = Scenario(truth, n, w).grid()
    clean = evaluate(truth, xs)
    noise_sd = truth.amplitude / snr
    out = np.full((stop - start, len(config.algorithms)), np.nan)
    for row, trial in enumerate(range(start, stop)):
        ys = clean
        if noise_sd > 0:
            ys = clean + trial_rng(config.base_seed, axis_index, trial).normal(0.0, noise_sd, n)
        data = Dataset(xs, ys)
        for col, algorithm in enumerate(config.algorithms):
            try:
                result = fit(data, algorithm, config.policy)
            except GaussFitError:
                continue
            out[row, col] = are_percent(result.params.sigma, truth.sigma)
    return out


def _run_chunk(args):
    return _run_trials(*args)


def _summarize(config: SweepConfig, axis_index: int, errors: np.ndarray) -> SweepRow:
    value = config.values[axis_index]
    snr, w, n = config.point(value)
    alpha = predict_relative_error(snr, w, n, config.k1, config.k2).alpha_total
    means, worst, failures = {}, {}, {}
    for col, algorithm in enumerate(config.algorithms):
        column = errors[:, col]
        ok = column[~np.isnan(column)]
        failures[algorithm] = int(column.size - ok.size)
        if ok.size:
            means[algorithm] = math.fsum(ok) / ok.size
            worst[algorithm] = float(ok.max())
        else:
            means[algorithm] = worst[algorithm] = math.nan
    return SweepRow(float(value), means, worst, 100.0 * alpha, failures)


def run_sweep(config: SweepConfig, workers: int = 1) -> list[SweepRow]:
    """Run every trial of every axis value and aggregate ARE% of sigma.

    Failed fits are excluded from the mean and worst case and counted in
    ``failures``.  The output is identical for any ``workers``.
    """
    tasks = [
        (config, i, start, min(start + _CHUNK, config.trials))
        for i in range(len(config.values))
        for start in range(0, config.trials, _CHUNK)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_chunk, tasks))
    else:
        chunks = [_run_chunk(t) for t in tasks]

    rows = []
    for i in range(len(config.values)):
        parts = [c for t, c in zip(tasks, chunks) if t[1] == i]
        rows.append(_summarize(config, i, np.concatenate(parts)))
    return rows


# Long-tail geometry: a fixed window with the peak near its right edge, so most
# samples sit in the low-amplitude left tail and moving the peak right lengthens
# the tail.  The left edge is set so that iterative Guo still fits the
# width poorly after 3 reweights at mu=18 while FAS needs more iterations at
# mu=19 than at mu=18.
LONG_TAIL_WINDOW = (-5.0, 20.0)


@dataclass(frozen=True)
class RaceOutcome:
    seed: int
    guo_rss: float
    fas_rss: float

    @property
    def fas_wins(self) -> bool:
        return self.fas_rss < self.guo_rss


def long_tail_dataset(mu: float, seed: int, n: int = 200, noise_sd: float = 0.1,
                      amplitude: float = 1.0, sigma: float = 2.0,
                      window: tuple = LONG_TAIL_WINDOW) -> Dataset:
    xs = np.linspace(window[0], window[1], n)
    ys = evaluate(GaussianParams(amplitude, mu, sigma), xs)
    ys = ys + trial_rng(seed, 0, 0).normal(0.0, noise_sd, n)
    return Dataset(xs, ys)


def iteration_race(mu: float = 18.0, seeds=range(100), iterations: int = 3,
                   fas_policy: IterationPolicy | None = None, **dataset_kwargs) -> list[RaceOutcome]:
    """Residual sum of squares of iterative Guo vs iterative FAS after a fixed iteration budget.

    A fit that fails scores an infinite residual.
    """
    guo_policy = IterationPolicy(max_iters=iterations, rel_tol=1e-300)
    if fas_policy is None:
        fas_policy = guo_policy
    outcomes = []
    for seed in seeds:
        data = long_tail_dataset(mu, seed, **dataset_kwargs)
        scores = []
        for algorithm, policy in ((Algorithm.GUO_ITERATIVE, guo_policy), (Algorithm.FAS_ITERATIVE, fas_policy)):
            try:
                scores.append(residual_sum_of_squares(data, fit(data, algorithm, policy).params))
            except GaussFitError:
                scores.append(math.inf)
        outcomes.append(RaceOutcome(int(seed), *scores))
    return outcomes


def accuracy_panel_config(panel: str, trials: int = DEFAULT_TRIALS, base_seed: int = 0) -> SweepConfig:
    """Sweep settings for the six accuracy panels (a)-(f).

    The snr axis spacing is not published; a 1-2-5 decade progression is used.
    """
    snr_values = (1, 2, 5, 10, 20, 25, 50, 100)
    w_values = (2, 4, 6, 8, 12, 16, 20, 24)
    panels = {
        "a": dict(axis=Axis.SNR, values=snr_values, width_ratio=12, n=30),
        "b": dict(axis=Axis.SNR, values=snr_values, width_ratio=12, n=200),
        "c": dict(axis=Axis.W, values=w_values, snr=25, n=30),
        "d": dict(axis=Axis.W, values=w_values, snr=25, n=200),
        "e": dict(axis=Axis.N, values=(20, 40, 60, 80, 100), snr=25, width_ratio=12),
        "f": dict(axis=Axis.N, values=(200, 400, 600, 800, 1000), snr=25, width_ratio=12),
    }
    try:
        settings = panels[panel.lower()]
    except KeyError:
        raise ValueError(f"unknown panel {panel!r}; expected one of a-f") from None
    return SweepConfig(trials=trials, base_seed=base_seed, **settings)
