import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import erf

from gaussfit import (
    Algorithm,
    Dataset,
    GaussianParams,
    IterationPolicy,
    QuadraticCoeffs,
    RooniziCoeffs,
    Scenario,
    estimate_sigma_fas,
    evaluate,
    fit,
    fit_caruana,
    fit_fas,
    fit_guo,
    fit_roonizi,
    params_from_quadratic,
    synthesize,
)
from gaussfit.errors import (
    GaussFitError,
    InvalidCurvature,
    NonPositivePeak,
    SingularSystem,
    TooFewPoints,
)
from gaussfit.fitters import (
    SQRT_2PI,
    _LogDomain,
    _solve_log_quadratic,
    params_from_roonizi,
    quadratic_from_params,
    residual_sum_of_squares,
    roonizi_basis,
)

ALL = list(Algorithm)
ONE_SHOT = [Algorithm.CARUANA, Algorithm.GUO, Algorithm.ROONIZI, Algorithm.FAS]


def rel(a, b):
    return abs(a - b) / abs(b)


class TestParamsFromQuadratic:
    def test_unit_gaussian(self):
        p = params_from_quadratic(QuadraticCoeffs(0.0, 0.0, -0.5))
        assert (p.amplitude, p.mu, p.sigma) == (1.0, 0.0, 1.0)

    def test_round_trip(self):
        p = params_from_quadratic(quadratic_from_params(GaussianParams(2.0, 10.0, 2.0)))
        assert p.amplitude == pytest.approx(2.0, rel=1e-12)
        assert p.mu == pytest.approx(10.0, rel=1e-12)
        assert p.sigma == pytest.approx(2.0, rel=1e-12)

    @pytest.mark.parametrize("c", [0.1, 0.0])
    def test_rejects_non_negative_curvature(self, c):
        with pytest.raises(InvalidCurvature):
            params_from_quadratic(QuadraticCoeffs(1.0, 1.0, c))

    def test_frame(self):
        # t = (x - 5) / 2, so the unit Gaussian in t is centred at 5 with width 2
        p = params_from_quadratic(QuadraticCoeffs(0.0, 0.0, -0.5, origin=5.0, scale=2.0))
        assert (p.mu, p.sigma) == (5.0, 2.0)


class TestRooniziMapping:
    @pytest.mark.parametrize("sigma,mu", [(1.0, 0.0), (2.0, 10.0), (0.5, -3.0)])
    def test_inverse(self, sigma, mu):
        s, m = params_from_roonizi(RooniziCoeffs(-1 / sigma**2, mu / sigma**2))
        assert s == pytest.approx(sigma, rel=1e-15)
        assert m == pytest.approx(mu, rel=1e-15, abs=1e-15)

    def test_rejects_non_negative_beta1(self):
        with pytest.raises(InvalidCurvature):
            params_from_roonizi(RooniziCoeffs(0.0, 1.0))


class TestNoiselessRecovery:
    def test_caruana(self):
        d = synthesize(Scenario(GaussianParams(2.0, 10.0, 2.0), 50, 12.0))
        p = fit_caruana(d).params
        for got, want in zip((p.amplitude, p.mu, p.sigma), (2.0, 10.0, 2.0)):
            assert rel(got, want) < 1e-6

    def test_guo(self, noiseless_200):
        p = fit_guo(noiseless_200).params
        for got, want in zip((p.amplitude, p.mu, p.sigma), (1.0, 10.0, 2.0)):
            assert rel(got, want) < 1e-6

    def test_fas(self):
        d = synthesize(Scenario(GaussianParams(2.0, 10.0, 2.0), 50, 12.0))
        p = fit_fas(d).params
        for got, want in zip((p.amplitude, p.mu, p.sigma), (2.0, 10.0, 2.0)):
            assert rel(got, want) < 0.01

    @pytest.mark.parametrize("w,n", [(8, 50), (12, 200), (16, 500)])
    def test_invariant_regime(self, w, n):
        truth = GaussianParams(1.5, -4.0, 0.7)
        d = synthesize(Scenario(truth, n, w))
        for alg in (Algorithm.CARUANA, Algorithm.GUO):
            p = fit(d, alg).params
            assert rel(p.amplitude, 1.5) < 1e-6 and rel(p.mu, -4.0) < 1e-6 and rel(p.sigma, 0.7) < 1e-6
        p = fit_fas(d).params
        assert rel(p.amplitude, 1.5) < 5e-3 and abs(p.mu + 4.0) < 1e-3 * 0.7
        assert rel(p.sigma, 0.7) < 0.01


class TestCaruanaGridSearchOracle:
    """Brute-force minimisation of the log-domain squared error over an (a, b, c) grid."""

    @staticmethod
    def objective(xs, logy, a, b, c):
        r = logy[None, :] - (a[:, None] + b[:, None] * xs[None, :] + c[:, None] * xs[None, :] ** 2)
        return (r * r).sum(axis=1)

    def grid_min(self, xs, logy, centre, half, steps):
        axes = [np.linspace(c0 - h, c0 + h, steps) for c0, h in zip(centre, half)]
        a, b, c = (g.ravel() for g in np.meshgrid(*axes, indexing="ij"))
        obj = self.objective(xs, logy, a, b, c)
        i = int(np.argmin(obj))
        return np.array([a[i], b[i], c[i]]), obj[i], [ax[1] - ax[0] for ax in axes]

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_grid_minimiser(self, seed):
        # window [-1, 1] keeps the fitter's internal frame equal to raw x
        xs = np.linspace(-1.0, 1.0, 9)
        truth = GaussianParams(1.0, 0.2, 0.6)
        ys = evaluate(truth, xs) + np.random.default_rng(seed).normal(0, 0.01, xs.size)
        ys = np.abs(ys)
        logy = np.log(ys)

        best, _, _ = self.grid_min(xs, logy, (0.0, 0.5, -1.5), (1.0, 1.0, 1.5), 61)
        best, best_obj, step = self.grid_min(xs, logy, best, (0.05, 0.05, 0.08), 81)

        res = fit_caruana(Dataset(xs, ys))
        got = np.array([res.coeffs.a, res.coeffs.b, res.coeffs.c])
        assert (res.coeffs.origin, res.coeffs.scale) == (0.0, 1.0)
        got_obj = self.objective(xs, logy, *(np.array([v]) for v in got))[0]
        assert got_obj <= best_obj + 1e-12
        assert np.all(np.abs(got - best) <= 3 * np.array(step))


class TestCaruanaErrors:
    def test_drops_nonpositive(self):
        xs = np.linspace(-3, 3, 11)
        ys = evaluate(GaussianParams(1, 0, 1), xs)
        ys[[0, 10]] = [-0.01, 0.0]
        r = fit_caruana(Dataset(xs, ys))
        assert r.dropped_nonpositive == 2 and r.points_used == 9
        assert rel(r.params.sigma, 1.0) < 1e-9

    def test_too_few_positive(self):
        with pytest.raises(TooFewPoints):
            fit_caruana(Dataset([0, 1, 2, 3], [1.0, -1.0, 0.5, -0.2]))

    def test_flat_data_has_no_curvature(self):
        with pytest.raises(GaussFitError):
            fit_caruana(Dataset(np.arange(10.0), np.full(10, 0.5)))

    def test_upward_curvature(self):
        xs = np.linspace(-1, 1, 9)
        with pytest.raises(InvalidCurvature):
            fit_caruana(Dataset(xs, np.exp(xs**2)))


class TestGuo:
    def test_unit_weights_reduce_to_caruana(self):
        d = synthesize(Scenario(GaussianParams(1.0, 10.0, 2.0), 60, 8.0, 0.05, seed=3))
        dom = _LogDomain(d)
        unit = _solve_log_quadratic(dom.t, dom.log_y, np.ones_like(dom.y))
        car = fit_caruana(d).coeffs
        np.testing.assert_allclose(unit, [car.a, car.b, car.c], rtol=1e-10, atol=1e-12)

    def test_iteration_counts_and_label(self):
        d = synthesize(Scenario(GaussianParams(1.0, 10.0, 2.0), 200, 12.0, 0.05, seed=1))
        r = fit_guo(d, IterationPolicy(max_iters=4, rel_tol=1e-300))
        assert r.iterations_used == 4 and r.algorithm is Algorithm.GUO_ITERATIVE
        r = fit_guo(d, IterationPolicy(max_iters=500, rel_tol=1e-6))
        assert 0 < r.iterations_used < 500

    def test_converged_iteration_is_fixed_point(self):
        d = synthesize(Scenario(GaussianParams(1.0, 10.0, 2.0), 200, 12.0, 0.05, seed=2))
        r = fit_guo(d, IterationPolicy(max_iters=200, rel_tol=1e-13))
        dom = _LogDomain(d)
        c = r.coeffs
        again = _solve_log_quadratic(dom.t, dom.log_y, dom.fitted(c.a, c.b, c.c) ** 2)
        np.testing.assert_allclose(again, [c.a, c.b, c.c], rtol=1e-10)


class TestRoonizi:
    def test_trapezoid_against_exact_integrals(self):
        """Exact running integrals via erf bound the quadrature error behind the 1e-3 tolerance."""
        d = synthesize(Scenario(GaussianParams(1.0, 0.0, 1.0), 2000, 16.0))
        phi1, phi2, origin, scale = roonizi_basis(d)
        assert (origin, scale) == (0.0, 8.0)
        x, x1 = d.xs, d.xs[0]
        exact2 = math.sqrt(math.pi / 2) * (erf(x / math.sqrt(2)) - erf(x1 / math.sqrt(2)))
        exact1 = -(np.exp(-x * x / 2) - math.exp(-x1 * x1 / 2))
        # back to raw x: dx = scale dt and x = scale t
        err2 = np.max(np.abs(scale * phi2 - exact2)) / exact2.max()
        err1 = np.max(np.abs(scale**2 * phi1 - exact1)) / np.abs(exact1).max()
        assert err2 < 1e-5 and err1 < 1e-5

        # with the exact integrals the regression recovers the truth to rounding
        m = [[exact1 @ exact1, exact1 @ exact2], [exact1 @ exact2, exact2 @ exact2]]
        b1, b2 = np.linalg.solve(m, [exact1 @ d.ys, exact2 @ d.ys])
        s, mu = params_from_roonizi(RooniziCoeffs(b1, b2))
        assert rel(s, 1.0) < 1e-9 and abs(mu) < 1e-9

    def test_noiseless_dense(self):
        d = synthesize(Scenario(GaussianParams(1.0, 0.0, 1.0), 2000, 16.0))
        r = fit_roonizi(d)
        assert rel(r.params.amplitude, 1.0) < 1e-3
        assert abs(r.params.mu) < 1e-3
        assert rel(r.params.sigma, 1.0) < 1e-3
        assert r.dropped_nonpositive == 0 and r.points_used == 2000

    def test_uses_nonpositive_points(self):
        d = synthesize(Scenario(GaussianParams(1.0, 10.0, 2.0), 200, 12.0, 0.05, seed=5))
        assert np.any(d.ys <= 0)
        r = fit_roonizi(d)
        assert r.points_used == d.n and r.dropped_nonpositive == 0

    def test_amplitude_is_least_squares_scale(self):
        d = synthesize(Scenario(GaussianParams(1.3, 10.0, 2.0), 200, 12.0, 0.05, seed=6))
        p = fit_roonizi(d).params
        shape = evaluate(GaussianParams(1.0, p.mu, p.sigma), d.xs)
        ss = [np.sum((d.ys - a * shape) ** 2) for a in (p.amplitude * 0.999, p.amplitude, p.amplitude * 1.001)]
        assert ss[1] < ss[0] and ss[1] < ss[2]

    def test_zero_data_is_singular(self):
        with pytest.raises(SingularSystem):
            fit_roonizi(Dataset(np.arange(5.0), np.zeros(5)))


class TestEstimateSigmaFas:
    def test_exact_area_identity(self):
        assert 1.0 * 2.0 * SQRT_2PI == pytest.approx(5.01326, abs=1e-5)

    @pytest.mark.parametrize("a,n", [(1.0, 200), (2.0, 50)])
    def test_noiseless_systematic_error(self, a, n):
        sc = Scenario(GaussianParams(a, 10.0, 2.0), n, 12.0)
        d = synthesize(sc)
        lo, hi = sc.grid()[0], sc.grid()[-1]
        area, _ = quad(lambda u: a * math.exp(-((u - 10.0) ** 2) / 8.0), lo, hi, epsabs=1e-13)
        assert area == pytest.approx(a * 2.0 * SQRT_2PI * erf(12 / (2 * math.sqrt(2))), rel=1e-10)
        # the rectangle sum tracks the truncated integral; the rest is the sampled peak
        sigma_hat = estimate_sigma_fas(d)
        assert sigma_hat == pytest.approx(area / (SQRT_2PI * d.ys.max()), rel=1e-6)
        assert rel(sigma_hat, 2.0) < 0.01

    def test_non_uniform_grid(self):
        xs = np.sort(np.random.default_rng(0).uniform(-8, 8, 3000))
        d = Dataset(xs, evaluate(GaussianParams(1.0, 0.0, 1.0), xs))
        assert rel(estimate_sigma_fas(d), 1.0) < 0.01

    def test_nonpositive_peak(self):
        with pytest.raises(NonPositivePeak):
            estimate_sigma_fas(Dataset([0, 1, 2], [-1.0, 0.0, -0.5]))

    def test_nonpositive_area(self):
        with pytest.raises(NonPositivePeak):
            estimate_sigma_fas(Dataset([0, 1, 2, 3], [0.1, -1.0, -1.0, -1.0]))

    def test_needs_no_least_squares(self, monkeypatch):
        import gaussfit.fitters as f

        def boom(*a, **k):
            raise AssertionError("solver touched")

        monkeypatch.setattr(f, "solve_linear", boom)
        d = synthesize(Scenario(GaussianParams(1.0, 10.0, 2.0), 200, 12.0))
        estimate_sigma_fas(d)
        with pytest.raises(AssertionError):
            fit_fas(d)


class TestFasIterative:
    def test_label_and_count(self):
        d = synthesize(Scenario(GaussianParams(1.0, 10.0, 2.0), 200, 12.0, 0.1, seed=1))
        r = fit_fas(d, IterationPolicy(3, 1e-300))
        assert r.algorithm is Algorithm.FAS_ITERATIVE and r.iterations_used == 3

    def test_sigma_fixed_without_refresh(self):
        d = synthesize(Scenario(GaussianParams(1.0, 10.0, 2.0), 200, 12.0, 0.1, seed=1))
        r = fit_fas(d, IterationPolicy(5, 1e-300))
        assert r.params.sigma == pytest.approx(estimate_sigma_fas(d), rel=1e-12)

    def test_refresh_uses_fitted_amplitude(self):
        d = synthesize(Scenario(GaussianParams(1.0, 10.0, 2.0), 200, 12.0, 0.1, seed=1))
        prev = fit_fas(d, IterationPolicy(1, 1e-300))
        r = fit_fas(d, IterationPolicy(2, 1e-300, refresh_sigma_every=2))
        area = float(np.dot(d.step_sizes, d.ys))
        assert r.params.sigma == pytest.approx(area / (SQRT_2PI * prev.params.amplitude), rel=1e-12)

    def test_refresh_corrects_peak_noise_bias(self):
        errs = {None: [], 2: []}
        for seed in range(40):
            d = synthesize(Scenario(GaussianParams(1.0, 10.0, 2.0), 200, 12.0, 0.1, seed=seed))
            for m in errs:
                errs[m].append(abs(fit_fas(d, IterationPolicy(6, 1e-300, m)).params.sigma - 2.0))
        assert np.mean(errs[2]) < np.mean(errs[None])


def test_dispatch_and_residuals(noiseless_200):
    for alg in ALL:
        r = fit(noiseless_200, alg, IterationPolicy(2))
        assert r.algorithm is alg
        assert residual_sum_of_squares(noiseless_200, r.params) < 1e-3
    with pytest.raises(ValueError):
        fit(noiseless_200, "newton")


def test_policy_validation():
    for bad in (dict(max_iters=-1), dict(rel_tol=0.0), dict(refresh_sigma_every=0), dict(max_iters=1.5)):
        with pytest.raises(ValueError):
            IterationPolicy(**bad)


# ---------------------------------------------------------------- properties

scenarios = st.builds(
    lambda a, mu, s, w, n, snr, seed: Scenario(GaussianParams(a, mu, s), n, w, a / snr, seed),
    a=st.floats(0.1, 10), mu=st.floats(-50, 50), s=st.floats(0.2, 5), w=st.floats(6, 14),
    n=st.integers(40, 300), snr=st.floats(40, 400), seed=st.integers(0, 2**32),
)


def _fit_or_error(data, alg):
    try:
        return fit(data, alg, IterationPolicy(3))
    except GaussFitError as exc:
        return type(exc)


@settings(max_examples=1000, suppress_health_check=[HealthCheck.too_slow])
@given(scenarios, st.floats(-1e3, 1e3), st.sampled_from(ALL))
def test_shift_equivariance(sc, shift, alg):
    d = synthesize(sc)
    moved = Dataset(d.xs + shift, d.ys)
    r0, r1 = _fit_or_error(d, alg), _fit_or_error(moved, alg)
    if isinstance(r0, type):
        assert r0 is r1
        return
    p0, p1 = r0.params, r1.params
    assert p1.amplitude == pytest.approx(p0.amplitude, rel=1e-8)
    assert p1.sigma == pytest.approx(p0.sigma, rel=1e-8)
    assert p1.mu - shift == pytest.approx(p0.mu, rel=1e-8, abs=1e-8 * p0.sigma)


@settings(max_examples=1000, suppress_health_check=[HealthCheck.too_slow])
@given(scenarios, st.floats(1e-3, 1e3), st.sampled_from(ALL))
def test_amplitude_scaling(sc, factor, alg):
    d = synthesize(sc)
    scaled = Dataset(d.xs, d.ys * factor)
    assert estimate_sigma_fas(scaled) == pytest.approx(estimate_sigma_fas(d), rel=1e-14)
    r0, r1 = _fit_or_error(d, alg), _fit_or_error(scaled, alg)
    if isinstance(r0, type):
        assert r0 is r1
        return
    assert r1.params.amplitude == pytest.approx(factor * r0.params.amplitude, rel=1e-8)
    assert r1.params.sigma == pytest.approx(r0.params.sigma, rel=1e-8)
    assert r1.params.mu == pytest.approx(r0.params.mu, rel=1e-8, abs=1e-8 * r0.params.sigma)


@given(scenarios, st.integers(-20, 20))
def test_power_of_two_scaling_is_exact(sc, k):
    d = synthesize(sc)
    assert estimate_sigma_fas(Dataset(d.xs, d.ys * 2.0**k)) == estimate_sigma_fas(d)


@settings(max_examples=1000)
@given(scenarios, st.floats(1e-12, 1.0))
def test_iteration_zero_is_base_algorithm(sc, tol):
    d = synthesize(sc)
    zero = IterationPolicy(0, tol, refresh_sigma_every=1)
    for base, iterative in ((Algorithm.GUO, Algorithm.GUO_ITERATIVE), (Algorithm.FAS, Algorithm.FAS_ITERATIVE)):
        a = _fit_or_error(d, base)
        c = _fit_or_error(d, iterative) if isinstance(a, type) else fit(d, iterative, zero)
        if isinstance(a, type):
            assert c is a
            continue
        assert c.params == a.params and c.iterations_used == 0
