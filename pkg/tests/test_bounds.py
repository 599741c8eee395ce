import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anticonc import bounds as B
from anticonc import marginals as m
from anticonc.errors import ParameterError

U = m.Uniform01()
N01 = m.Gaussian(0.0, 1.0)
MARGINALS = [U, N01, m.Gaussian(2.0, 0.5), m.Weibull(1.0, 1.0), m.Weibull(2.0, 1.0), m.ReverseGumbel(1.0),
             m.Pareto(3.0, 2.0), m.Gamma(2.5, 1.0), m.Gamma.chi_squared(6),
             m.GaussianMixture((0.5, 0.5), (1.0, 0.2))]


def q(x, eps, d, f):
    return B.BoundQuery(x, eps, d, f)


def phi_mp(x):
    return float(mpmath.ncdf(mpmath.mpf(x)))


def test_thm1_upper_examples():
    assert B.thm1_upper(q(0.5, 0.1, 3, U)).value == pytest.approx(0.3, abs=1e-15)
    ref = 5 * (phi_mp(0.1) - 0.5)
    assert B.thm1_upper(q(0.0, 0.1, 5, N01)).value == pytest.approx(ref, abs=1e-14)
    assert ref == pytest.approx(0.1991389, abs=1e-6)
    for f in MARGINALS:
        assert B.thm1_upper(q(0.3, 0.0, 4, f)).value == 0.0


def test_thm1_lower_examples():
    assert B.thm1_lower(q(0.5, 0.1, 3, U)).value == 0.0
    assert B.thm1_lower(q(0.5, 0.45, 2, U)).value == pytest.approx(0.4, abs=1e-15)
    for d in (1, 2, 50):
        assert B.thm1_lower(q(0.0, 1.0, d, U)).value == 1.0


def test_thm2_examples():
    assert B.thm2_upper(q(0.5, 0.1, 3, U)).value == pytest.approx(0.2, abs=1e-15)
    assert B.thm2_upper(q(0.5, 0.1, 1, U)).value == pytest.approx(0.1, abs=1e-15)
    ref = (phi_mp(0.1) - 0.5) * 2
    assert B.thm2_upper(q(0.0, 0.1, 100, N01)).value == pytest.approx(ref, abs=1e-14)
    assert round(ref, 7) == 0.0796557


def test_nazarov_and_closed_forms():
    assert B.nazarov_bound(1, 100, 0.01) == pytest.approx(0.0503486, abs=1e-7)
    assert B.nazarov_bound(1, 1, 0.5) == 1.0
    assert B.nazarov_bound(2, 1, 1) == 1.0
    assert B.closed_form_bound("gaussian", {"sigma": 1}, 100, 0.01) == pytest.approx(0.0403486, abs=1e-7)
    assert B.closed_form_bound("weibull", {"alpha": 2, "lambda": 1}, 100, 0.01) == pytest.approx(0.0473505, abs=1e-7)
    assert B.closed_form_bound("reverse_gumbel", {"lambda": 1}, 100, 0.01) == pytest.approx(0.0560517, abs=1e-7)
    for d in (1, 7, 10**6):
        assert B.closed_form_bound("pareto", {"alpha": 3, "lambda": 2}, d, 0.1) == pytest.approx(0.15)
        assert B.closed_form_bound("weibull", {"alpha": 1, "lambda": 2.5}, d, 0.1) == 0.1 / 2.5
    assert B.closed_form_bound("chi_squared", {"df": 8}, 10, 0.1) == pytest.approx(0.05)
    with pytest.raises(ParameterError):
        B.closed_form_bound("gamma", {"alpha": 0.5, "lambda": 1}, 10, 0.1)


@pytest.mark.parametrize("d", [1, 2, 10, 1000, 10**6])
def test_gaussian_closed_form_beats_nazarov(d):
    for sigma in (0.3, 1.0, 4.0):
        for eps in (1e-3, 0.1):
            assert B.closed_form_bound("gaussian", {"sigma": sigma}, d, eps) < B.nazarov_bound(sigma, d, eps)


def test_gmm_examples():
    g = B.gmm_bound((0.5, 0.5), (1.0, 0.2), 100, 0.01)
    assert g.value == pytest.approx(0.1806971, abs=1e-7)
    assert g.conditioning_branch == pytest.approx(0.2517428, abs=1e-7)
    assert g.regime == "mixture"
    assert g.conditioning_branch == B.nazarov_bound(0.2, 100, 0.01)
    k1 = B.gmm_bound((1.0,), (1.0,), 100, 0.01)
    assert k1.value == pytest.approx(0.0503486, abs=1e-7)
    assert k1.mixture_branch == pytest.approx(k1.conditioning_branch, rel=1e-15)
    assert B.gmm_bound((0.3, 0.7), (1.0, 0.5), 20, 0.0).value == 0.0
    with pytest.raises(ParameterError):
        B.gmm_bound((0.5, 0.5), (0.5, 1.0), 10, 0.1)


def test_hazard_crossing_examples():
    assert B.hazard_crossing(m.ReverseGumbel(1.0), 100) == pytest.approx(math.log(math.log(100)), abs=1e-9)
    assert round(math.log(math.log(100)), 7) == 1.5271796
    ref = float(mpmath.sqrt(2) * mpmath.erfinv(mpmath.mpf("0.98")))
    assert B.hazard_crossing(N01, 100) == pytest.approx(ref, abs=1e-10)
    assert B.hazard_crossing(U, 4) == pytest.approx(0.75, abs=1e-15)


@pytest.mark.parametrize("f", [N01, m.Weibull(2.0, 1.0), m.Weibull(3.0, 0.5), m.ReverseGumbel(1.0)],
                         ids=lambda f: f.family)
@pytest.mark.parametrize("d", [2, 10, 100, 10**4])
def test_hazard_crossing_identity(f, d):
    x = B.hazard_crossing(f, d)
    assert abs(f.hazard(x) - d * f.pdf(x)) <= 1e-6 * d * f.pdf(x)


def test_sup_min_envelope():
    assert B.sup_min_envelope(1) == pytest.approx(0.3989423, abs=1e-7)
    assert B.sup_min_envelope(2) <= 2.177
    assert B.sup_min_envelope(100) <= 4.034855
    for d in (3, 10, 100, 10**4):
        v = B.sup_min_envelope(d)
        # at the crossing both branches agree
        x = v - 1.0
        assert d * math.exp(-x * x / 2) / math.sqrt(2 * math.pi) == pytest.approx(v, abs=1e-9)
        # brute force maximum on a fine grid
        xs = np.linspace(0, 10, 200001)
        brute = np.max(np.minimum(xs + 1, d * np.exp(-xs**2 / 2) / math.sqrt(2 * math.pi)))
        assert brute <= v + 1e-9 and brute >= v - 1e-4


def _lattice():
    for f in MARGINALS:
        for t in np.linspace(0.0, 1.0, 21):
            x = float(f.quantile(min(max(t, 1e-9), 1 - 1e-9)))
            for eps in (1e-4, 0.01, 0.1, 0.5, 2.0):
                for d in (1, 2, 3, 10, 100, 10**4):
                    yield f, x, eps, d


def test_dominance_lattice():
    n = 0
    for f, x, eps, d in _lattice():
        qq = q(x, eps, d, f)
        lo, t2, t1 = B.thm1_lower(qq).value, B.thm2_upper(qq).value, B.thm1_upper(qq).value
        assert t2 <= t1, (f, x, eps, d, t2, t1)
        assert lo <= t2 + 1e-15, (f, x, eps, d, lo, t2)
        assert 0.0 <= lo and t1 <= 1.0
        n += 1
    assert n > 5000


@pytest.mark.parametrize("d", [2, 10, 100, 10**4])
def test_thm2_gaussian_sup_below_closed_form(d):
    eps = 1e-4
    for sigma in (1.0, 0.5):
        xs = np.linspace(-2, 8, 4001) * sigma
        sup = B.thm2_sup_over_grid(m.Gaussian(0.0, sigma), d, eps, xs)
        assert sup / eps <= (math.sqrt(2 * math.log(d)) + 1) / sigma


def test_regime_tags():
    assert B.thm1_upper(q(0.5, 0.1, 3, U)).regime == "linear"
    assert B.thm1_upper(q(0.0, 0.1, 3, U)).regime == "cdf"
    assert B.thm2_upper(q(0.5, 0.1, 3, U)).regime == "hazard"
    assert B.thm2_upper(q(0.9, 0.05, 3, U)).regime == "dimension"
    assert B.thm1_lower(q(0.5, 0.45, 2, U)).sense == "lower"


def test_evaluate_dispatch():
    mix = m.GaussianMixture((0.5, 0.5), (1.0, 0.2))
    assert B.evaluate("gmm", q(0, 0.01, 100, mix)).value == pytest.approx(0.1806971, abs=1e-7)
    assert B.evaluate("nazarov", q(0, 0.01, 100, N01)).value == pytest.approx(0.0503486, abs=1e-7)
    assert B.evaluate("closed-form", q(0, 0.1, 7, m.Pareto(3, 2))).value == pytest.approx(0.15)
    with pytest.raises(ParameterError):
        B.evaluate("gmm", q(0, 0.1, 2, N01))
    with pytest.raises(ParameterError):
        B.evaluate("closed-form", q(0, 0.1, 2, U))
    with pytest.raises(ParameterError):
        q(0, -0.1, 2, U)


@settings(max_examples=300, deadline=None)
@given(x=st.floats(-6, 6), eps=st.floats(0, 3), d=st.integers(1, 10**5),
       mu=st.floats(-2, 2), sigma=st.floats(0.1, 5))
def test_gaussian_ordering_property(x, eps, d, mu, sigma):
    f = m.Gaussian(mu, sigma)
    qq = q(x, eps, d, f)
    lo, t2, t1 = B.thm1_lower(qq).value, B.thm2_upper(qq).value, B.thm1_upper(qq).value
    assert 0.0 <= lo <= t2 <= t1 <= 1.0


@settings(max_examples=300, deadline=None)
@given(u=st.floats(0, 1), delta=st.floats(0, 1), d=st.integers(1, 1000))
def test_uniform_bounds_match_increment_formulas(u, delta, d):
    delta = min(delta, 1 - u)
    qq = q(u, delta, d, U)
    assert B.thm1_upper(qq).value == pytest.approx(min(d * delta, u + delta), abs=1e-12)
    assert B.thm1_lower(qq).value == pytest.approx(max(0.0, 1 - u - d * (1 - u - delta)), abs=1e-12)
    assert B.thm2_upper(qq).value == pytest.approx(delta * (d if u >= 1 else min(1 / (1 - u), d)), abs=1e-12)
