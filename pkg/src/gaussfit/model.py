"""Gaussian model, observation datasets and synthetic data generation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDataset, NonIncreasingX, TooFewPoints

MIN_POINTS = 3


@dataclass(frozen=True)
class GaussianParams:
    """Amplitude, center and width of ``A * exp(-(x - mu)**2 / (2 sigma**2))``."""

    amplitude: float
    mu: float
    sigma: float

    def __post_init__(self):
        if not (np.isfinite(self.amplitude) and self.amplitude > 0):
            raise ValueError(f"amplitude must be positive and finite, got {self.amplitude!r}")
        if not np.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu!r}")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma!r}")

    def __call__(self, xs):
        return evaluate(self, xs)


def evaluate(params: GaussianParams, xs) -> np.ndarray:
    """Evaluate the Gaussian element-wise over ``xs``."""
    if params.sigma <= 0:
        raise ValueError("sigma must be positive")
    xs = np.asarray(xs, dtype=float)
    z = (xs - params.mu) / params.sigma
    return params.amplitude * np.exp(-0.5 * z * z)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Paired observations on a strictly increasing abscissa.

    The arrays are copied on construction and made read-only.
    """

    xs: np.ndarray
    ys: np.ndarray
    step_sizes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        xs = _frozen(self.xs)
        ys = _frozen(self.ys)
        if xs.ndim != 1 or ys.ndim != 1:
            raise InvalidDataset("xs and ys must be one-dimensional")
        if xs.shape != ys.shape:
            raise InvalidDataset(f"length mismatch: {xs.size} xs vs {ys.size} ys")
        if xs.size < MIN_POINTS:
            raise TooFewPoints(f"need at least {MIN_POINTS} points, got {xs.size}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InvalidDataset("observations must be finite")
        gaps = np.diff(xs)
        if np.any(gaps <= 0):
            bad = int(np.argmax(gaps <= 0))
            raise NonIncreasingX(
                f"xs must be strictly increasing (x[{bad}]={xs[bad]!r}, x[{bad + 1}]={xs[bad + 1]!r})"
            )
        # the last gap is replicated so that every sample owns one rectangle
        steps = _frozen(np.append(gaps, gaps[-1]))
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "step_sizes", steps)

    def __len__(self):
        return self.xs.size

    @property
    def n(self) -> int:
        return self.xs.size

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.xs, other.xs) and np.array_equal(self.ys, other.ys)

    __hash__ = None


@dataclass(frozen=True)
class Scenario:
    """A synthetic experiment: truth, grid size ``n``, width ratio and noise level.

    The grid spans ``width_ratio`` standard deviations centred on the mean.
    """

    truth: GaussianParams
    n: int
    width_ratio: float
    noise_sd: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise TooFewPoints(f"need at least {MIN_POINTS} points, got {self.n}")
        if not self.width_ratio > 0:
            raise ValueError("width_ratio must be positive")
        if not self.noise_sd >= 0:
            raise ValueError("noise_sd must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    @property
    def snr(self) -> float:
        if self.noise_sd == 0:
            return float("inf")
        return self.truth.amplitude / self.noise_sd

    def grid(self) -> np.ndarray:
        half = 0.5 * self.width_ratio * self.truth.sigma
        return np.linspace(self.truth.mu - half, self.truth.mu + half, int(self.n))


def noise_rng(seed) -> np.random.Generator:
    """PCG64 generator; Gaussian deviates come from numpy's ziggurat transform."""
    return np.random.Generator(np.random.PCG64(seed))


def synthesize(scenario: Scenario, rng: np.random.Generator | None = None) -> Dataset:
    """Sample the scenario's Gaussian on its grid and add white Gaussian noise.

    Without ``rng`` the noise stream is seeded from ``scenario.seed``, which makes
    the result a pure function of the scenario.
    """
    xs = scenario.grid()
    ys = evaluate(scenario.truth, xs)
    if scenario.noise_sd > 0:
        if rng is None:
            rng = noise_rng(scenario.seed)
        ys = ys + rng.normal(0.0, scenario.noise_sd, size=xs.size)
    return Dataset(xs, ys)
