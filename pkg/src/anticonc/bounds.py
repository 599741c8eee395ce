"""Closed-form anti-concentration bounds for max(X_1, ..., X_d).

All bounds concern P(x < max_i X_i <= x + eps) where the X_i share the
marginal F. ``thm1_upper``/``thm1_lower`` are sharp over all copulas,
``thm2_upper`` is sharp over diagonally convex copulas, the rest are the
per-family consequences and benchmarks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .marginals import Gamma, GaussianMixture, MarginalDistribution

_PHI0 = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BoundQuery:
    x: float
    epsilon: float
    d: int
    marginal: MarginalDistribution

    def __post_init__(self):
        if not (self.epsilon >= 0.0):
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon}", field="eps")
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise ParameterError(f"d must be a positive integer, got {self.d}", field="d")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "epsilon", float(self.epsilon))


@dataclass(frozen=True)
class BoundResult:
    """A bound value with the branch of the min/max that produced it.

    ``sense`` is "upper" or "lower" and tells :func:`montecarlo.verify_bound`
    which side to check.
    """

    value: float
    regime: str
    formula_id: str
    sense: str = "upper"

    def to_dict(self):
        return {
            "value": self.value,
            "regime": self.regime,
            "formula_id": self.formula_id,
            "sense": self.sense,
        }


def _window(q: BoundQuery):
    """(F(x), F(x+eps), increment, 1 - F(x)) with the increment taken from the
    smaller tail to avoid cancellation."""
    f = q.marginal
    fx = float(f.cdf(q.x))
    if q.epsilon == 0.0:
        return fx, fx, 0.0, float(f.sf(q.x))
    fxe = float(f.cdf(q.x + q.epsilon))
    sx = float(f.sf(q.x))
    if fx > 0.5:
        inc = sx - float(f.sf(q.x + q.epsilon))
    else:
        inc = fxe - fx
    return fx, fxe, max(inc, 0.0), sx


def thm1_upper(q: BoundQuery) -> BoundResult:
    """min(d (F(x+eps) - F(x)), F(x+eps)), the largest value over all copulas."""
    _, fxe, inc, _ = _window(q)
    lin = q.d * inc
    if lin <= fxe:
        return BoundResult(min(lin, 1.0), "linear", "thm1_upper")
    return BoundResult(fxe, "cdf", "thm1_upper")


def thm1_lower(q: BoundQuery) -> BoundResult:
    """max(0, 1 - F(x) - d (1 - F(x+eps))), the smallest value over all copulas."""
    _, _, inc, _ = _window(q)
    # (1 - F(x)) - d (1 - F(x+eps)) = increment - (d - 1)(1 - F(x+eps))
    val = inc - (q.d - 1) * float(q.marginal.sf(q.x + q.epsilon)) if q.d > 1 else inc
    if val <= 0.0:
        return BoundResult(0.0, "zero", "thm1_lower", sense="lower")
    return BoundResult(min(val, 1.0), "linear", "thm1_lower", sense="lower")


def thm2_upper(q: BoundQuery) -> BoundResult:
    """(F(x+eps) - F(x)) * min(1/(1 - F(x)), d), the largest value over convex diagonals."""
    _, _, inc, sx = _window(q)
    if sx <= 0.0 or 1.0 / sx >= q.d:
        return BoundResult(min(q.d * inc, 1.0), "dimension", "thm2_upper")
    return BoundResult(min(inc / sx, 1.0), "hazard", "thm2_upper")


def nazarov_bound(sigma: float, d: int, epsilon: float) -> float:
    """(eps / sigma)(sqrt(2 log d) + 2), the jointly Gaussian benchmark."""
    if not (sigma > 0.0):
        raise ParameterError(f"sigma must be > 0, got {sigma}", field="sigma")
    _check_d_eps(d, epsilon)
    return epsilon / sigma * (math.sqrt(2.0 * math.log(d)) + 2.0)


class FamilyBound(str, enum.Enum):
    GAUSSIAN = "gaussian"
    GAUSSIAN_ABS = "gaussian_abs"
    WEIBULL = "weibull"
    REVERSE_GUMBEL = "reverse_gumbel"
    PARETO = "pareto"
    GAMMA = "gamma"
    CHI_SQUARED = "chi_squared"


def _check_d_eps(d, epsilon):
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise ParameterError(f"d must be a positive integer, got {d}", field="d")
    if not (epsilon >= 0.0):
        raise ParameterError(f"epsilon must be >= 0, got {epsilon}", field="eps")


def _param(params, *names):
    for n in names:
        if n in params:
            return float(params[n])
    raise ParameterError(f"missing parameter {names[0]!r}", field=names[0])


def closed_form_bound(family_bound, params: dict, d: int, epsilon: float) -> float:
    """Dimension-explicit bounds for diagonally convex copulas with a named marginal.

    gaussian        (eps/sigma)(sqrt(2 log d) + 1)
    gaussian_abs    (eps/sigma)(sqrt(2 log 2d) + 1), for max |X_i - mu| under joint Gaussianity
    weibull         (eps alpha / lambda)(log d + 1)^((alpha-1)/alpha), alpha >= 1
    reverse_gumbel  (eps / lambda)(1 + log d)
    pareto          alpha eps / lambda
    gamma           eps / lambda, alpha >= 1
    chi_squared     the gamma bound with alpha = df/2, lambda = 2, df >= 2
    """
    fam = FamilyBound(family_bound)
    _check_d_eps(d, epsilon)
    logd = math.log(d)
    if fam is FamilyBound.GAUSSIAN:
        sigma = _param(params, "sigma")
        if not sigma > 0:
            raise ParameterError("sigma must be > 0", field="sigma")
        return epsilon / sigma * (math.sqrt(2.0 * logd) + 1.0)
    if fam is FamilyBound.GAUSSIAN_ABS:
        sigma = _param(params, "sigma")
        if not sigma > 0:
            raise ParameterError("sigma must be > 0", field="sigma")
        return epsilon / sigma * (math.sqrt(2.0 * math.log(2 * d)) + 1.0)
    if fam is FamilyBound.WEIBULL:
        alpha, lam = _param(params, "alpha"), _param(params, "lambda", "lam")
        if not alpha >= 1.0:
            raise ParameterError("Weibull bound needs shape alpha >= 1", field="alpha")
        if not lam > 0:
            raise ParameterError("lambda must be > 0", field="lambda")
        return epsilon * alpha / lam * (logd + 1.0) ** ((alpha - 1.0) / alpha)
    if fam is FamilyBound.REVERSE_GUMBEL:
        lam = _param(params, "lambda", "lam")
        if not lam > 0:
            raise ParameterError("lambda must be > 0", field="lambda")
        return epsilon / lam * (1.0 + logd)
    if fam is FamilyBound.PARETO:
        alpha, lam = _param(params, "alpha"), _param(params, "lambda", "lam")
        if not (alpha > 0 and lam > 0):
            raise ParameterError("Pareto bound needs alpha > 0 and lambda > 0", field="alpha")
        return alpha * epsilon / lam
    if fam is FamilyBound.GAMMA:
        alpha, lam = _param(params, "alpha"), _param(params, "lambda", "lam")
        if not alpha >= 1.0:
            raise ParameterError(
                "Gamma bound needs alpha >= 1; for alpha < 1 the density is unbounded near zero",
                field="alpha",
            )
        if not lam > 0:
            raise ParameterError("lambda must be > 0", field="lambda")
        return epsilon / lam
    df = _param(params, "df")
    if not df >= 2.0:
        raise ParameterError("chi-squared bound needs df >= 2", field="df")
    return closed_form_bound(FamilyBound.GAMMA, {"alpha": df / 2.0, "lambda": 2.0}, d, epsilon)


def closed_form_for_marginal(marginal: MarginalDistribution, d: int, epsilon: float) -> float:
    """:func:`closed_form_bound` with the family and parameters read off a marginal."""
    fam = marginal.family
    if fam == "gaussian":
        return closed_form_bound("gaussian", {"sigma": marginal.sigma}, d, epsilon)
    if fam in ("weibull", "pareto", "gamma"):
        return closed_form_bound(fam, {"alpha": marginal.alpha, "lambda": marginal.lam}, d, epsilon)
    if fam == "reverse_gumbel":
        return closed_form_bound(fam, {"lambda": marginal.lam}, d, epsilon)
    raise ParameterError(f"no closed-form bound for marginal family {fam!r}", field="family")


@dataclass(frozen=True)
class GmmBound:
    value: float
    mixture_branch: float
    conditioning_branch: float
    regime: str


def gmm_bound(p, sigma, d: int, epsilon: float) -> GmmBound:
    """Bound for the max of i.i.d. zero-mean Gaussian scale mixtures.

    min of (eps/p_1)(sqrt(2 log d) + 2 sum_k p_k/sigma_k) and
    (eps/sigma_min)(sqrt(2 log d) + 2); requires sigma_1 = 1 and all sigma_k <= 1.
    """
    p = [float(v) for v in p]
    sigma = [float(v) for v in sigma]
    _check_d_eps(d, epsilon)
    if len(p) == 0 or len(p) != len(sigma):
        raise ParameterError("need one weight per component", field="p")
    if any(not (0.0 < v <= 1.0) for v in p) or abs(math.fsum(p) - 1.0) > 1e-12:
        raise ParameterError("weights must lie in (0, 1] and sum to 1", field="p")
    if sigma[0] != 1.0:
        raise ParameterError("the first component must have unit scale (sigma_1 = 1)", field="sigma")
    if any(not (0.0 < s <= 1.0) for s in sigma):
        raise ParameterError("component scales must lie in (0, 1]", field="sigma")
    root = math.sqrt(2.0 * math.log(d))
    first = epsilon / p[0] * (root + 2.0 * math.fsum(pk / sk for pk, sk in zip(p, sigma)))
    second = nazarov_bound(min(sigma), d, epsilon)
    if first <= second:
        return GmmBound(first, first, second, "mixture")
    return GmmBound(second, first, second, "conditioning")


def gmm_bound_result(p, sigma, d, epsilon) -> BoundResult:
    g = gmm_bound(p, sigma, d, epsilon)
    return BoundResult(min(g.value, 1.0), g.regime, "gmm")


def hazard_crossing(dist: MarginalDistribution, d: int) -> float:
    """F^{-1}(1 - 1/d), where the hazard meets d times the density."""
    _check_d_eps(d, 0.0)
    if d == 1:
        return float(dist.quantile(0.0))
    return float(dist.quantile(1.0 - 1.0 / d))


def sup_min_envelope(d: int, tol: float = 1e-10) -> float:
    """sup_{x >= 0} min(x + 1, d phi(x)).

    x + 1 increases and d phi(x) decreases on [0, inf), so the supremum is at
    their crossing when d phi(0) > 1 and equals d phi(0) otherwise.
    """
    _check_d_eps(d, 0.0)
    if d * _PHI0 <= 1.0:
        return d * _PHI0

    def gap(x):
        return d * _PHI0 * math.exp(-0.5 * x * x) - (x + 1.0)

    lo, hi = 0.0, math.sqrt(2.0 * math.log(d)) + 1.0
    while gap(hi) > 0.0:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    x = lo
    return min(x + 1.0, d * _PHI0 * math.exp(-0.5 * x * x))


BOUND_KINDS = ("thm1-upper", "thm1-lower", "thm2", "nazarov", "closed-form", "gmm")


def evaluate(kind: str, q: BoundQuery) -> BoundResult:
    """Dispatch by CLI bound kind."""
    if kind == "thm1-upper":
        return thm1_upper(q)
    if kind == "thm1-lower":
        return thm1_lower(q)
    if kind == "thm2":
        return thm2_upper(q)
    m = q.marginal
    if kind == "nazarov":
        sigma = getattr(m, "sigma", None)
        if isinstance(m, GaussianMixture):
            sigma = min(m.sigma)
        if not isinstance(sigma, float):
            raise ParameterError("nazarov bound needs a Gaussian or Gaussian-mixture marginal", field="marginal")
        return BoundResult(min(nazarov_bound(sigma, q.d, q.epsilon), 1.0), "benchmark", "nazarov")
    if kind == "closed-form":
        return BoundResult(min(closed_form_for_marginal(m, q.d, q.epsilon), 1.0), m.family, "closed_form")
    if kind == "gmm":
        if not isinstance(m, GaussianMixture):
            raise ParameterError("gmm bound needs a gaussian_mixture marginal", field="marginal")
        return gmm_bound_result(m.p, m.sigma, q.d, q.epsilon)
    raise ParameterError(f"unknown bound kind {kind!r}", field="kind")


def chi_squared_marginal(df) -> Gamma:
    return Gamma.chi_squared(df)


def thm2_sup_over_grid(marginal: MarginalDistribution, d: int, epsilon: float, xs) -> float:
    """max over the grid of thm2_upper; used to compare with closed forms."""
    return max(thm2_upper(BoundQuery(float(x), epsilon, d, marginal)).value for x in np.asarray(xs))
