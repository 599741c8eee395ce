import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from anticonc import marginals as m
from anticonc.errors import DomainError, NumericError, ParameterError

mpmath.mp.dps = 40

FAMILIES = [
    m.Uniform01(),
    m.Gaussian(0.0, 1.0),
    m.Gaussian(1.5, 0.3),
    m.Weibull(1.0, 1.0),
    m.Weibull(2.0, 1.5),
    m.ReverseGumbel(1.0),
    m.ReverseGumbel(0.4),
    m.Pareto(1.0, 1.0),
    m.Pareto(3.0, 2.0),
    m.Gamma(1.0, 1.0),
    m.Gamma(4.5, 2.0),
    m.Gamma.chi_squared(10),
    m.GaussianMixture((0.5, 0.5), (1.0, 0.2)),
    m.GaussianMixture((0.2, 0.3, 0.5), (1.0, 0.5, 0.05)),
]
IDS = [f"{d.family}-{i}" for i, d in enumerate(FAMILIES)]

# scipy equivalents as independent references
SCIPY = {
    1: stats.norm(0, 1),
    2: stats.norm(1.5, 0.3),
    4: stats.weibull_min(2.0, scale=1.5),
    8: stats.pareto(3.0, scale=2.0),
    10: stats.gamma(4.5, scale=2.0),
    11: stats.chi2(10),
}


def test_examples():
    assert m.cdf(m.Uniform01(), 0.3) == 0.3
    assert m.cdf(m.Pareto(1, 1), 2.0) == pytest.approx(0.5, abs=1e-15)
    ref = float(mpmath.ncdf(mpmath.mpf("0.1")))
    assert m.cdf(m.Gaussian(0, 1), 0.1) == pytest.approx(ref, abs=1e-15)
    assert round(ref, 7) == 0.5398278
    assert m.quantile(m.Uniform01(), 0.3) == 0.3
    assert m.quantile(m.Pareto(1, 1), 0.5) == pytest.approx(2.0, abs=1e-14)
    assert m.quantile(m.GaussianMixture((0.5, 0.5), (1.0, 0.2)), 0.5) == pytest.approx(0.0, abs=1e-12)
    assert m.pdf(m.Gaussian(0, 1), 0.0) == pytest.approx(0.3989423, abs=1e-7)
    assert m.pdf(m.Pareto(3, 2), 2.0) == pytest.approx(1.5, abs=1e-14)
    assert m.pdf(m.Weibull(2, 1), 1.0) == pytest.approx(2 * math.exp(-1), abs=1e-14)
    assert m.hazard(m.ReverseGumbel(1), 0.0) == pytest.approx(1.0, abs=1e-14)
    assert m.hazard(m.Pareto(3, 1), 2.0) == pytest.approx(1.5, abs=1e-14)
    assert m.hazard(m.Weibull(1, 1), 5.0) == pytest.approx(1.0, abs=1e-14)


def test_gaussian_cdf_against_mpmath_grid():
    g = m.Gaussian(0, 1)
    for x in np.linspace(-30, 8, 77):
        ref = mpmath.ncdf(mpmath.mpf(float(x)))
        got = g.cdf(float(x))
        assert got == pytest.approx(float(ref), rel=1e-12, abs=1e-300)


def test_gamma_cdf_against_mpmath():
    g = m.Gamma(3.5, 2.0)
    for x in (0.01, 0.5, 3.0, 7.0, 9.0, 25.0, 80.0):
        ref = mpmath.gammainc(3.5, 0, mpmath.mpf(x) / 2, regularized=True)
        assert g.cdf(x) == pytest.approx(float(ref), rel=1e-12)
        assert g.sf(x) == pytest.approx(float(1 - ref), rel=1e-10)


@pytest.mark.parametrize("idx", sorted(SCIPY))
def test_against_scipy(idx):
    dist, ref = FAMILIES[idx], SCIPY[idx]
    t = np.linspace(0.001, 0.999, 101)
    x = ref.ppf(t)
    assert np.allclose(dist.cdf(x), ref.cdf(x), rtol=1e-12, atol=1e-14)
    assert np.allclose(dist.pdf(x), ref.pdf(x), rtol=1e-11, atol=1e-14)
    assert np.allclose(dist.quantile(t), x, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("dist", FAMILIES, ids=IDS)
def test_round_trip_and_monotone(dist):
    t = np.linspace(1e-6, 1 - 1e-6, 1001)
    x = dist.quantile(t)
    assert np.all(np.diff(x) >= 0)
    assert np.max(np.abs(dist.cdf(x) - t)) < 1e-10
    xs = np.linspace(x[0] - 1, x[-1] + 1, 2000)
    assert np.all(np.diff(dist.cdf(xs)) >= 0)
    assert np.allclose(dist.cdf(xs) + dist.sf(xs), 1.0, atol=1e-15)


@pytest.mark.parametrize("dist", FAMILIES, ids=IDS)
def test_hazard_identity(dist):
    x = dist.quantile(np.linspace(0.001, 0.999, 500))
    keep = dist.cdf(x) < 1 - 1e-12
    x = x[keep]
    lhs = dist.hazard(x) * dist.sf(x)
    assert np.allclose(lhs, dist.pdf(x), rtol=1e-10, atol=1e-10)


def test_endpoints():
    assert m.quantile(m.Gaussian(0, 1), 0.0) == -math.inf
    assert m.quantile(m.Gaussian(0, 1), 1.0) == math.inf
    assert m.quantile(m.Pareto(2, 3), 0.0) == 3.0
    assert m.quantile(m.Uniform01(), 1.0) == 1.0
    with pytest.raises(DomainError):
        m.quantile(m.Uniform01(), 1.5)
    with pytest.raises(NumericError):
        m.hazard(m.Uniform01(), 1.0)


def test_mixture_is_weighted_sum():
    mix = FAMILIES[-1]
    x = np.linspace(-4, 4, 801)
    ref = sum(p * stats.norm(0, s).cdf(x) for p, s in zip(mix.p, mix.sigma))
    assert np.max(np.abs(mix.cdf(x) - ref)) < 1e-12


def test_mills_ratio_bounds():
    # Birnbaum and Sampford bounds on the Gaussian hazard
    g = m.Gaussian(0, 1)
    x = np.linspace(0, 35, 351)
    h = g.hazard(x)
    assert np.all(h <= (np.sqrt(x * x + 4) + x) / 2 * (1 + 1e-12))
    assert np.all(h >= (3 * x + np.sqrt(x * x + 8)) / 4 * (1 - 1e-12))


def test_upper_incomplete_gamma_lower_bound():
    # Gamma(a, x) >= x^(a-1) e^(-x) whenever a >= 1
    for a in (1.0, 2.0, 3.5, 10.0):
        g = m.Gamma(a, 1.0)
        for x in np.linspace(0.01, a + 40, 80):
            upper = g.sf(x) * math.gamma(a)
            assert upper >= x ** (a - 1) * math.exp(-x) * (1 - 1e-12)


def test_from_dict_and_errors():
    assert m.marginal_from_dict({"family": "weibull", "alpha": 2.0, "lambda": 1.0}) == m.Weibull(2.0, 1.0)
    assert m.marginal_from_dict({"family": "chi_squared", "df": 4}) == m.Gamma(2.0, 2.0)
    mix = m.marginal_from_dict({"family": "gaussian_mixture", "p": [0.5, 0.5], "sigma": [1, 0.2]})
    assert isinstance(mix, m.GaussianMixture)
    with pytest.raises(ParameterError) as err:
        m.marginal_from_dict({"family": "weibull", "alpha": 0.5})
    assert err.value.field == "alpha"
    with pytest.raises(ParameterError):
        m.GaussianMixture((0.5, 0.6), (1.0, 1.0))
    with pytest.raises(ParameterError):
        m.Gamma.chi_squared(1)
    with pytest.raises(ParameterError):
        m.marginal_from_dict({"family": "cauchy"})


@settings(max_examples=200, deadline=None)
@given(mu=st.floats(-5, 5), sigma=st.floats(0.05, 10), t=st.floats(1e-9, 1 - 1e-9))
def test_gaussian_roundtrip_property(mu, sigma, t):
    g = m.Gaussian(mu, sigma)
    assert abs(g.cdf(g.quantile(t)) - t) < 1e-10


@settings(max_examples=150, deadline=None)
@given(alpha=st.floats(1.0, 20.0), lam=st.floats(0.1, 5.0), t=st.floats(1e-8, 1 - 1e-8))
def test_gamma_roundtrip_property(alpha, lam, t):
    g = m.Gamma(alpha, lam)
    assert abs(g.cdf(g.quantile(t)) - t) < 1e-10


@settings(max_examples=150, deadline=None)
@given(w=st.floats(0.05, 0.95), s2=st.floats(0.01, 1.0), t=st.floats(1e-8, 1 - 1e-8))
def test_mixture_roundtrip_property(w, s2, t):
    g = m.GaussianMixture((w, 1 - w), (1.0, s2))
    assert abs(g.cdf(g.quantile(t)) - t) < 1e-10
