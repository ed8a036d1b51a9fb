"""Closed-form Gaussian fitters.

All log-domain fitters solve for ``ln y = a + b t + c t**2`` where
``t = (x - origin) / scale`` is the abscissa mapped onto [-1, 1].  The
least-squares solution is the same as with raw ``x`` but the moment
matrices stay well conditioned however far the data sit from zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    FitFailure,
    InvalidCurvature,
    NonPositivePeak,
    SingularSystem,
    TooFewPoints,
)
from .linalg import solve_linear
from .model import MIN_POINTS, Dataset, GaussianParams, evaluate

SQRT_2PI = math.sqrt(2.0 * math.pi)


class Algorithm(str, enum.Enum):
    CARUANA = "caruana"
    GUO = "guo"
    GUO_ITERATIVE = "guo-iter"
    ROONIZI = "roonizi"
    FAS = "fas"
    FAS_ITERATIVE = "fas-iter"

    def __str__(self):
        return self.value

    @property
    def iterative(self) -> bool:
        return self in (Algorithm.GUO_ITERATIVE, Algorithm.FAS_ITERATIVE)


@dataclass(frozen=True)
class QuadraticCoeffs:
    """Coefficients of ``a + b t + c t**2`` with ``t = (x - origin) / scale``."""

    a: float
    b: float
    c: float
    origin: float = 0.0
    scale: float = 1.0


@dataclass(frozen=True)
class RooniziCoeffs:
    """``y(t) = beta1 * phi1(t) + beta2 * phi2(t)`` in the same mapped abscissa."""

    beta1: float
    beta2: float
    origin: float = 0.0
    scale: float = 1.0


@dataclass(frozen=True)
class IterationPolicy:
    """Reweighting schedule for the iterative variants.

    ``max_iters=0`` runs the one-shot algorithm.  Iteration stops early once the
    infinity-norm change of the coefficient vector, relative to its own norm,
    drops below ``rel_tol``.  ``refresh_sigma_every=m`` (FAS only) re-derives
    the width from the area formula every ``m`` iterations using the current
    amplitude instead of the largest observation.
    """

    max_iters: int = 0
    rel_tol: float = 1e-8
    refresh_sigma_every: int | None = None

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            raise ValueError("max_iters must be a non-negative integer")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.refresh_sigma_every is not None and (
            int(self.refresh_sigma_every) != self.refresh_sigma_every or self.refresh_sigma_every < 1
        ):
            raise ValueError("refresh_sigma_every must be a positive integer")


ONE_SHOT = IterationPolicy()


@dataclass(frozen=True)
class FitResult:
    params: GaussianParams
    algorithm: Algorithm
    iterations_used: int
    points_used: int
    dropped_nonpositive: int
    coeffs: QuadraticCoeffs | RooniziCoeffs | None = None


def params_from_quadratic(coeffs: QuadraticCoeffs) -> GaussianParams:
    """Map log-quadratic coefficients back to amplitude, mean and width."""
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    if not c < 0:
        raise InvalidCurvature(f"log-domain curvature c={c!r} is not negative")
    try:
        amplitude = math.exp(a - b * b / (4.0 * c))
    except OverflowError:
        raise FitFailure("amplitude overflows") from None
    mu = coeffs.origin + coeffs.scale * (-b / (2.0 * c))
    sigma = coeffs.scale * math.sqrt(-1.0 / (2.0 * c))
    return _checked_params(amplitude, mu, sigma)


def quadratic_from_params(params: GaussianParams) -> QuadraticCoeffs:
    """Inverse of :func:`params_from_quadratic` in the raw abscissa."""
    s2 = params.sigma**2
    return QuadraticCoeffs(
        a=math.log(params.amplitude) - params.mu**2 / (2.0 * s2),
        b=params.mu / s2,
        c=-1.0 / (2.0 * s2),
    )


def params_from_roonizi(coeffs: RooniziCoeffs) -> tuple[float, float]:
    """Return ``(sigma, mu)`` for the integral-form coefficients."""
    if not coeffs.beta1 < 0:
        raise InvalidCurvature(f"beta1={coeffs.beta1!r} is not negative")
    sigma = coeffs.scale * math.sqrt(-1.0 / coeffs.beta1)
    mu = coeffs.origin + coeffs.scale * (-coeffs.beta2 / coeffs.beta1)
    return sigma, mu


def _checked_params(amplitude, mu, sigma) -> GaussianParams:
    if not (math.isfinite(amplitude) and amplitude > 0 and math.isfinite(mu) and math.isfinite(sigma)):
        raise FitFailure(f"degenerate estimate A={amplitude!r}, mu={mu!r}, sigma={sigma!r}")
    return GaussianParams(amplitude, mu, sigma)


def _frame(data: Dataset) -> tuple[float, float]:
    x0, x1 = float(data.xs[0]), float(data.xs[-1])
    return 0.5 * (x0 + x1), 0.5 * (x1 - x0)


class _LogDomain:
    """Positive observations in the mapped abscissa, with their logs."""

    __slots__ = ("origin", "scale", "t", "y", "log_y", "dropped")

    def __init__(self, data: Dataset):
        self.origin, self.scale = _frame(data)
        keep = data.ys > 0
        kept = int(np.count_nonzero(keep))
        if kept < MIN_POINTS:
            raise TooFewPoints(f"only {kept} positive observations, need {MIN_POINTS}")
        self.dropped = data.n - kept
        if self.dropped:
            self.t = (data.xs[keep] - self.origin) / self.scale
            self.y = data.ys[keep]
        else:
            self.t = (data.xs - self.origin) / self.scale
            self.y = data.ys
        self.log_y = np.log(self.y)

    def quadratic(self, a, b, c) -> QuadraticCoeffs:
        return QuadraticCoeffs(float(a), float(b), float(c), self.origin, self.scale)

    def fitted(self, a, b, c) -> np.ndarray:
        t = self.t
        with np.errstate(over="ignore"):
            return np.exp(a + t * (b + c * t))

    def reweight(self, a, b, c) -> np.ndarray:
        """Squared fitted curve; a diverging fit overflows to inf and fails in the solver."""
        return self.fitted(2.0 * a, 2.0 * b, 2.0 * c)


def _power_sums(t, weights, upto):
    """``[sum(w * t**k) for k in 0..upto]``; unit weights when ``weights`` is None."""
    sums = [float(t.size) if weights is None else float(weights.sum())]
    term = np.ones_like(t) if weights is None else weights
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(upto):
            term = term * t
            sums.append(float(term.sum()))
    return sums


def _solve_log_quadratic(t, log_y, weights=None) -> np.ndarray:
    """Least-squares ``(a, b, c)`` for ``log_y ~ a + b t + c t**2``.

    ``weights`` multiply the squared residuals; ``None`` gives the plain
    (unweighted) normal equations built from point counts.
    """
    s = _power_sums(t, weights, 4)
    with np.errstate(invalid="ignore"):
        wl = log_y if weights is None else weights * log_y
    rhs = (float(wl.sum()), float(np.dot(wl, t)), float(np.dot(wl, t * t)))
    matrix = ((s[0], s[1], s[2]), (s[1], s[2], s[3]), (s[2], s[3], s[4]))
    return solve_linear(matrix, rhs)


def _solve_log_linear(t, log_y, c, weights) -> np.ndarray:
    """Weighted least-squares ``(a, b)`` with the curvature ``c`` held fixed."""
    s = _power_sums(t, weights, 3)
    with np.errstate(invalid="ignore"):
        wl = weights * log_y
    rhs = (
        float(wl.sum()) - c * s[2],
        float(np.dot(wl, t)) - c * s[3],
    )
    return solve_linear(((s[0], s[1]), (s[1], s[2])), rhs)


def _relative_change(new, old) -> float:
    norm = max(abs(v) for v in new)
    if norm == 0.0:
        return 0.0
    return max(abs(p - q) for p, q in zip(new, old)) / norm


def fit_caruana(data: Dataset) -> FitResult:
    """Unweighted least squares on the logarithm of the positive observations."""
    dom = _LogDomain(data)
    a, b, c = _solve_log_quadratic(dom.t, dom.log_y)
    coeffs = dom.quadratic(a, b, c)
    return FitResult(
        params=params_from_quadratic(coeffs),
        algorithm=Algorithm.CARUANA,
        iterations_used=0,
        points_used=dom.y.size,
        dropped_nonpositive=dom.dropped,
        coeffs=coeffs,
    )


def fit_guo(data: Dataset, policy: IterationPolicy = ONE_SHOT) -> FitResult:
    """Log-domain least squares weighted by the squared observations.

    With ``policy.max_iters > 0`` the weights are replaced, iteration after
    iteration, by the squared values of the previous fitted curve.  Weights that
    underflow to zero are kept and simply drop the point from the sums.
    """
    dom = _LogDomain(data)
    coef = _solve_log_quadratic(dom.t, dom.log_y, dom.y * dom.y)
    k = 0
    while k < policy.max_iters:
        new = _solve_log_quadratic(dom.t, dom.log_y, dom.reweight(*coef))
        k += 1
        change = _relative_change(new, coef)
        coef = new
        if change < policy.rel_tol:
            break
    coeffs = dom.quadratic(*coef)
    return FitResult(
        params=params_from_quadratic(coeffs),
        algorithm=Algorithm.GUO_ITERATIVE if policy.max_iters > 0 else Algorithm.GUO,
        iterations_used=k,
        points_used=dom.y.size,
        dropped_nonpositive=dom.dropped,
        coeffs=coeffs,
    )


def roonizi_basis(data: Dataset) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Running integrals of ``t*y`` and ``y`` from the first sample (trapezoid rule).

    Returns ``(phi1, phi2, origin, scale)`` in the mapped abscissa.
    """
    origin, scale = _frame(data)
    t = (data.xs - origin) / scale
    y = data.ys
    dt = np.diff(t)
    phi2 = np.zeros_like(t)
    phi1 = np.zeros_like(t)
    np.cumsum(0.5 * (y[1:] + y[:-1]) * dt, out=phi2[1:])
    ty = t * y
    np.cumsum(0.5 * (ty[1:] + ty[:-1]) * dt, out=phi1[1:])
    return phi1, phi2, origin, scale


def fit_roonizi(data: Dataset) -> FitResult:
    """Integral-equation fit: regress ``y`` on the running integrals of ``t*y`` and ``y``.

    The amplitude is the least-squares scale of the fitted unit-height bell
    against all observations.
    """
    phi1, phi2, origin, scale = roonizi_basis(data)
    y = data.ys
    matrix = (
        (float(np.dot(phi1, phi1)), float(np.dot(phi1, phi2))),
        (float(np.dot(phi1, phi2)), float(np.dot(phi2, phi2))),
    )
    rhs = (float(np.dot(phi1, y)), float(np.dot(phi2, y)))
    beta1, beta2 = solve_linear(matrix, rhs)
    coeffs = RooniziCoeffs(float(beta1), float(beta2), origin, scale)
    sigma, mu = params_from_roonizi(coeffs)

    z = (data.xs - mu) / sigma
    shape = np.exp(-0.5 * z * z)
    norm = float(np.dot(shape, shape))
    if not norm > 1e-300:
        raise SingularSystem("fitted bell does not overlap the observations")
    amplitude = float(np.dot(y, shape)) / norm
    if not amplitude > 0:
        raise FitFailure(f"non-positive amplitude estimate {amplitude!r}")
    return FitResult(
        params=_checked_params(amplitude, mu, sigma),
        algorithm=Algorithm.ROONIZI,
        iterations_used=0,
        points_used=data.n,
        dropped_nonpositive=0,
        coeffs=coeffs,
    )


def fas_area(data: Dataset) -> float:
    """Rectangle-rule area under the observations."""
    return float(np.dot(data.step_sizes, data.ys))


def estimate_sigma_fas(data: Dataset) -> float:
    """Width from equating the rectangle-rule area with ``sqrt(2 pi) * A * sigma``.

    The amplitude is taken as the largest observation, so no other parameter
    has to be estimated first.

    Raises
    ------
    NonPositivePeak
        If no observation is positive, or the observed area is not positive.
    """
    peak = float(data.ys.max())
    if not peak > 0:
        raise NonPositivePeak(f"largest observation {peak!r} is not positive")
    area = fas_area(data)
    if not area > 0:
        raise NonPositivePeak(f"observed area {area!r} is not positive")
    return area / (SQRT_2PI * peak)


def fit_fas(data: Dataset, policy: IterationPolicy = ONE_SHOT) -> FitResult:
    """Width from the area formula, then weighted least squares for ``a`` and ``b`` only."""
    sigma_hat = estimate_sigma_fas(data)
    dom = _LogDomain(data)
    c = -(dom.scale**2) / (2.0 * sigma_hat**2)
    a, b = _solve_log_linear(dom.t, dom.log_y, c, dom.y * dom.y)
    coef = (float(a), float(b), c)

    area = None
    refresh = policy.refresh_sigma_every
    k = 0
    while k < policy.max_iters:
        weights = dom.reweight(*coef)
        k += 1
        if refresh is not None and k % refresh == 0:
            if area is None:
                area = fas_area(data)
            amplitude = params_from_quadratic(dom.quadratic(*coef)).amplitude
            sigma_hat = area / (SQRT_2PI * amplitude)
            ratio = dom.scale / sigma_hat if sigma_hat > 0 else math.inf
            c = -0.5 * ratio * ratio
            if not math.isfinite(c):
                raise FitFailure(f"refreshed width {sigma_hat!r} is degenerate")
        a, b = _solve_log_linear(dom.t, dom.log_y, c, weights)
        new = (float(a), float(b), c)
        change = _relative_change(new, coef)
        coef = new
        if change < policy.rel_tol:
            break
    coeffs = dom.quadratic(*coef)
    return FitResult(
        params=params_from_quadratic(coeffs),
        algorithm=Algorithm.FAS_ITERATIVE if policy.max_iters > 0 else Algorithm.FAS,
        iterations_used=k,
        points_used=dom.y.size,
        dropped_nonpositive=dom.dropped,
        coeffs=coeffs,
    )


def fit(data: Dataset, algorithm: Algorithm | str, policy: IterationPolicy = ONE_SHOT) -> FitResult:
    """Run ``algorithm`` on ``data``; the policy only applies to iterative variants."""
    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.CARUANA:
        return fit_caruana(data)
    if algorithm is Algorithm.ROONIZI:
        return fit_roonizi(data)
    if algorithm is Algorithm.GUO:
        return fit_guo(data)
    if algorithm is Algorithm.FAS:
        return fit_fas(data)
    if algorithm is Algorithm.GUO_ITERATIVE:
        result = fit_guo(data, policy)
    else:
        result = fit_fas(data, policy)
    return replace(result, algorithm=algorithm)


def residual_sum_of_squares(data: Dataset, params: GaussianParams) -> float:
    r = data.ys - evaluate(params, data.xs)
    return float(np.dot(r, r))
