import math

import numpy as np
import pytest

from anticonc import diagonals as D
from anticonc.archimedean import Clayton
from anticonc import marginals as m
from anticonc import montecarlo as mc
from anticonc.bounds import BoundQuery, thm1_upper
from anticonc.errors import ParameterError, UsageError
from anticonc.inference import (
    CouplingProfile,
    InferenceScenario,
    factor_model_scenario,
    quantile_qalpha,
    scenario_from_dict,
    size_distortion_bound,
)

U = m.Uniform01()


def test_qalpha_examples():
    assert quantile_qalpha(D.Independence(2), U, 0.19) == pytest.approx(0.9, abs=1e-12)
    assert quantile_qalpha(D.FrechetHoeffdingUpper(7), m.Gaussian(0, 1), 0.5) == pytest.approx(0.0, abs=1e-14)
    assert quantile_qalpha(D.Independence(1), U, 0.25) == pytest.approx(0.75, abs=1e-15)


@pytest.mark.parametrize("diag", [D.Independence(5), D.GaussianEquicorr(10, 0.5), D.Archimedean(3, Clayton(2.0))],
                         ids=lambda d: d.kind)
@pytest.mark.parametrize("f", [m.Gaussian(0, 1), m.Weibull(2.0, 1.0), m.Gamma(3.0, 1.0)], ids=lambda f: f.family)
@pytest.mark.parametrize("alpha", [0.01, 0.05, 0.2, 0.5])
def test_qalpha_is_the_infimum(diag, f, alpha):
    q = quantile_qalpha(diag, f, alpha)
    assert diag.eval(f.cdf(q)) >= 1 - alpha - 1e-12
    assert diag.eval(f.cdf(q - 1e-9)) < 1 - alpha


def test_coupling_profile_lookup():
    prof = CouplingProfile.from_pairs([(0.1, 0.0), (0.0, 1.0)])
    assert prof(0.05) == 1.0 and prof(0.1) == 0.0 and prof(3.0) == 0.0
    assert CouplingProfile((0.2,), (0.3,))(0.1) == 1.0
    with pytest.raises(ParameterError):
        CouplingProfile((0.0, 0.1), (0.1, 0.2))
    with pytest.raises(ParameterError):
        CouplingProfile((0.0,), (1.5,))


def test_size_distortion_examples():
    sc = InferenceScenario(D.Independence(2), U, 0.19, CouplingProfile.from_pairs([(0, 1), (0.1, 0)]), (0.05, 0.1))
    res = size_distortion_bound(sc)
    assert res.bound == pytest.approx(0.19, abs=1e-12) and res.argmin_epsilon == 0.1
    row = res.breakdown[1]
    assert row.left == pytest.approx(0.17, abs=1e-12) and row.right == pytest.approx(0.19, abs=1e-12)

    zero = InferenceScenario(D.Independence(2), U, 0.19, CouplingProfile((0.0,), (0.0,)), (0.0, 0.1))
    res = size_distortion_bound(zero)
    assert res.bound == 0.0 and res.argmin_epsilon == 0.0

    vac = InferenceScenario(D.Independence(2), U, 0.19, CouplingProfile((0.0,), (1.0,)), (0.0, 0.1, 0.3))
    assert size_distortion_bound(vac).bound == 1.0

    with pytest.raises(UsageError):
        size_distortion_bound(InferenceScenario(D.Independence(2), U, 0.1, CouplingProfile((0.0,), (0.0,)), ()))
    with pytest.raises(ParameterError):
        InferenceScenario(D.Independence(2), U, 1.0, CouplingProfile((0.0,), (0.0,)), (0.1,))


def test_size_distortion_envelope_and_thm2_mode():
    f = m.Gaussian(0, 1)
    prof = CouplingProfile.from_pairs([(0.0, 1.0), (0.01, 0.2), (0.05, 0.05), (0.2, 0.001)])
    grid = tuple(np.linspace(0.0, 0.5, 26))
    for diag in (D.Independence(10), D.GaussianEquicorr(10, 0.5), D.DeltaConvexMax(10, 0.7)):
        sc = InferenceScenario(diag, f, 0.05, prof, grid)
        exact = size_distortion_bound(sc)
        conv = size_distortion_bound(sc, "thm2")
        q = exact.q_alpha
        for r in exact.breakdown:
            # one all-copula window on each side of q
            env = (r.coupling + thm1_upper(BoundQuery(q - r.epsilon, r.epsilon, diag.d, f)).value
                   + thm1_upper(BoundQuery(q, r.epsilon, diag.d, f)).value)
            assert r.total <= env + 1e-12
        # thm2 terms dominate the exact terms for convex diagonals
        for a, b in zip(exact.breakdown, conv.breakdown):
            assert a.left <= b.left + 1e-12 and a.right <= b.right + 1e-12
        assert exact.bound <= conv.bound + 1e-12


def test_perfect_coupling_simulation():
    sc = InferenceScenario(D.Independence(2), U, 0.19, CouplingProfile((0.0,), (0.0,)), (0.0,))
    q = quantile_qalpha(sc.diagonal, sc.marginal, sc.alpha)
    s = mc.sample_max_via_diagonal(sc.diagonal, sc.marginal, mc.SampleConfig(10**6, 42, 2)).values
    p = np.mean(s > q)
    assert abs(p - 0.19) <= 4 * math.sqrt(0.19 * 0.81 / s.size)


def test_factor_model():
    rep = factor_model_scenario((0.5, 0.5), (1.0, 0.2), 100, 0.01, cfg=mc.SampleConfig(10**6, 42, 4))
    assert rep.bound == pytest.approx(0.1806971, abs=1e-7)
    assert rep.conditioning_value == pytest.approx(0.2517428, abs=1e-7)
    assert rep.winner == "mixture" and rep.mc_passed and len(rep.mc) == 5
    same = factor_model_scenario((0.5, 0.5), (1.0, 1.0), 10, 0.01)
    root = math.sqrt(2 * math.log(10))
    assert same.mixture_branch == pytest.approx(0.01 / 0.5 * (root + 2))
    assert same.conditioning_value == pytest.approx(0.01 * (root + 2))
    k1 = factor_model_scenario((1.0,), (1.0,), 100, 0.01)
    assert k1.mixture_branch == pytest.approx(k1.conditioning_value)
    with pytest.raises(ParameterError):
        factor_model_scenario((0.5, 0.5), (0.2, 1.0), 100, 0.01)


def test_scenario_json():
    sc = scenario_from_dict({"diagonal": {"kind": "independence", "d": 2}, "marginal": {"family": "uniform01"},
                             "alpha": 0.19, "coupling": {"eps": [0, 0.1], "p": [1, 0]}, "eps_grid": [0.1, 0.05]})
    assert sc.epsilon_grid == (0.05, 0.1)
    assert size_distortion_bound(sc).bound == pytest.approx(0.19)
    with pytest.raises(ParameterError) as err:
        scenario_from_dict({"diagonal": {"kind": "independence", "d": 2}})
    assert err.value.field == "marginal"
