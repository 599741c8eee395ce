"""One-dimensional marginal laws.

Each family is an immutable dataclass exposing ``cdf``, ``sf``, ``pdf``,
``hazard`` and ``quantile``; all accept scalars or numpy arrays and return
the same shape. ``quantile`` is the left-continuous generalized inverse
``inf{s : F(s) >= t}``, with the support endpoints (possibly infinite) at
``t = 0`` and ``t = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri

from . import kernels
from .errors import DomainError, NumericError, ParameterError

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _as_array(x):
    return np.asarray(x, dtype=np.float64)


def _like(x, arr):
    """Return a Python float for scalar input, the array otherwise."""
    if np.ndim(x) == 0:
        return float(arr)
    return arr


def _check_probability(t):
    t = _as_array(t)
    if np.any(~((t >= 0.0) & (t <= 1.0))):
        raise DomainError("quantile level must lie in [0, 1]")
    return t


def _positive(name, value):
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be a positive finite number, got {value}", field=name)
    return value


class MarginalDistribution:
    """Common interface; concrete families below."""

    family: str = ""

    # support endpoints
    lower = -math.inf
    upper = math.inf

    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        """Survival function 1 - F(x), computed without cancellation where possible."""
        return _like(x, 1.0 - _as_array(self.cdf(x)))

    def pdf(self, x):
        raise NotImplementedError

    def hazard(self, x):
        """f(x) / (1 - F(x)); raises NumericError beyond the support."""
        xa = _as_array(x)
        s = _as_array(self.sf(xa))
        if np.any(s <= 0.0):
            raise NumericError("hazard undefined where F(x) = 1 (point beyond the support)")
        return _like(x, _as_array(self.pdf(xa)) / s)

    def quantile(self, t):
        t = _check_probability(t)
        return _like(t, self._quantile(t))

    def _quantile(self, t):
        return _numeric_quantile(self, t)

    def _bracket_hint(self):
        """(center, scale) used to seed the quantile root bracket."""
        return 0.0, 1.0

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform01(MarginalDistribution):
    family = "uniform01"
    lower = 0.0
    upper = 1.0

    def cdf(self, x):
        return _like(x, np.clip(_as_array(x), 0.0, 1.0))

    def sf(self, x):
        return _like(x, np.clip(1.0 - _as_array(x), 0.0, 1.0))

    def pdf(self, x):
        xa = _as_array(x)
        return _like(x, ((xa >= 0.0) & (xa <= 1.0)).astype(np.float64))

    def _quantile(self, t):
        return t.copy()

    def to_dict(self):
        return {"family": self.family}


@dataclass(frozen=True)
class Gaussian(MarginalDistribution):
    mu: float = 0.0
    sigma: float = 1.0
    family = "gaussian"

    def __post_init__(self):
        if not math.isfinite(float(self.mu)):
            raise ParameterError("mu must be finite", field="mu")
        _positive("sigma", self.sigma)

    def _z(self, x):
        return (_as_array(x) - self.mu) / self.sigma

    def cdf(self, x):
        return _like(x, ndtr(self._z(x)))

    def sf(self, x):
        return _like(x, ndtr(-self._z(x)))

    def pdf(self, x):
        z = self._z(x)
        return _like(x, np.exp(-0.5 * z * z - _LOG_SQRT_2PI) / self.sigma)

    def hazard(self, x):
        z = self._z(x)
        with np.errstate(divide="ignore"):
            log_sf = log_ndtr(-z)
        if np.any(np.isneginf(log_sf)):
            raise NumericError("hazard undefined where F(x) = 1 (point beyond the support)")
        return _like(x, np.exp(-0.5 * z * z - _LOG_SQRT_2PI - log_sf) / self.sigma)

    def _quantile(self, t):
        return self.mu + self.sigma * ndtri(t)

    def _bracket_hint(self):
        return self.mu, self.sigma

    def to_dict(self):
        return {"family": self.family, "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class Weibull(MarginalDistribution):
    """F(x) = 1 - exp(-(x / lam)**alpha) on x >= 0, with alpha >= 1."""

    alpha: float
    lam: float = 1.0
    family = "weibull"
    lower = 0.0

    def __post_init__(self):
        if not (float(self.alpha) >= 1.0 and math.isfinite(self.alpha)):
            raise ParameterError(f"Weibull shape alpha must be >= 1, got {self.alpha}", field="alpha")
        _positive("lambda", self.lam)

    def _pow(self, x):
        return np.maximum(_as_array(x), 0.0) / self.lam

    def cdf(self, x):
        return _like(x, -np.expm1(-self._pow(x) ** self.alpha))

    def sf(self, x):
        return _like(x, np.exp(-self._pow(x) ** self.alpha))

    def pdf(self, x):
        xa = _as_array(x)
        y = self._pow(xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = (self.alpha / self.lam) * y ** (self.alpha - 1.0) * np.exp(-y**self.alpha)
        return _like(x, np.where(xa < 0.0, 0.0, val))

    def hazard(self, x):
        xa = _as_array(x)
        y = self._pow(xa)
        return _like(x, np.where(xa < 0.0, 0.0, (self.alpha / self.lam) * y ** (self.alpha - 1.0)))

    def _quantile(self, t):
        with np.errstate(divide="ignore"):
            return self.lam * (-np.log1p(-t)) ** (1.0 / self.alpha)

    def _bracket_hint(self):
        return self.lam, self.lam

    def to_dict(self):
        return {"family": self.family, "alpha": self.alpha, "lambda": self.lam}


@dataclass(frozen=True)
class ReverseGumbel(MarginalDistribution):
    """F(x) = 1 - exp(-exp(x / lam)) on the real line."""

    lam: float = 1.0
    family = "reverse_gumbel"

    def __post_init__(self):
        _positive("lambda", self.lam)

    def cdf(self, x):
        return _like(x, -np.expm1(-np.exp(_as_array(x) / self.lam)))

    def sf(self, x):
        return _like(x, np.exp(-np.exp(_as_array(x) / self.lam)))

    def pdf(self, x):
        y = _as_array(x) / self.lam
        return _like(x, np.exp(y - np.exp(y)) / self.lam)

    def hazard(self, x):
        return _like(x, np.exp(_as_array(x) / self.lam) / self.lam)

    def _quantile(self, t):
        with np.errstate(divide="ignore"):
            return self.lam * np.log(-np.log1p(-t))

    def _bracket_hint(self):
        return 0.0, self.lam

    def to_dict(self):
        return {"family": self.family, "lambda": self.lam}


@dataclass(frozen=True)
class Pareto(MarginalDistribution):
    """F(x) = 1 - (lam / x)**alpha on x >= lam."""

    alpha: float
    lam: float = 1.0
    family = "pareto"

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("lambda", self.lam)

    @property
    def lower(self):
        return self.lam

    def sf(self, x):
        xa = _as_array(x)
        with np.errstate(divide="ignore"):
            val = (self.lam / np.maximum(xa, self.lam)) ** self.alpha
        return _like(x, val)

    def cdf(self, x):
        xa = _as_array(x)
        with np.errstate(divide="ignore"):
            val = -np.expm1(self.alpha * np.log(self.lam / np.maximum(xa, self.lam)))
        return _like(x, val)

    def pdf(self, x):
        xa = _as_array(x)
        safe = np.maximum(xa, self.lam)
        val = self.alpha * self.lam**self.alpha / safe ** (self.alpha + 1.0)
        return _like(x, np.where(xa < self.lam, 0.0, val))

    def hazard(self, x):
        xa = _as_array(x)
        return _like(x, np.where(xa < self.lam, 0.0, self.alpha / np.maximum(xa, self.lam)))

    def _quantile(self, t):
        with np.errstate(divide="ignore"):
            return self.lam * np.exp(-np.log1p(-t) / self.alpha)

    def _bracket_hint(self):
        return self.lam, self.lam

    def to_dict(self):
        return {"family": self.family, "alpha": self.alpha, "lambda": self.lam}


@dataclass(frozen=True)
class Gamma(MarginalDistribution):
    """Density x**(alpha-1) exp(-x/lam) / (lam**alpha Gamma(alpha)) on x >= 0, alpha >= 1."""

    alpha: float
    lam: float = 1.0
    family = "gamma"
    lower = 0.0

    def __post_init__(self):
        if not (float(self.alpha) >= 1.0 and math.isfinite(self.alpha)):
            raise ParameterError(
                f"Gamma shape alpha must be >= 1 (for alpha < 1 the density is unbounded "
                f"near zero), got {self.alpha}",
                field="alpha",
            )
        _positive("lambda", self.lam)

    @classmethod
    def chi_squared(cls, df):
        """The chi-squared law with ``df`` degrees of freedom, df >= 2."""
        if not (float(df) >= 2.0):
            raise ParameterError(f"chi-squared degrees of freedom must be >= 2, got {df}", field="df")
        return cls(alpha=float(df) / 2.0, lam=2.0)

    def cdf(self, x):
        p, _ = kernels.gamma_pq(self.alpha, _as_array(x) / self.lam)
        return _like(x, p)

    def sf(self, x):
        _, q = kernels.gamma_pq(self.alpha, _as_array(x) / self.lam)
        return _like(x, q)

    def pdf(self, x):
        xa = _as_array(x)
        y = np.maximum(xa, 0.0) / self.lam
        with np.errstate(divide="ignore"):
            logf = (self.alpha - 1.0) * np.log(y) - y - math.lgamma(self.alpha) - math.log(self.lam)
        val = np.exp(logf)
        if self.alpha == 1.0:
            val = np.exp(-y) / self.lam
        return _like(x, np.where(xa < 0.0, 0.0, val))

    def _bracket_hint(self):
        return self.alpha * self.lam, math.sqrt(self.alpha) * self.lam

    def to_dict(self):
        return {"family": self.family, "alpha": self.alpha, "lambda": self.lam}


@dataclass(frozen=True)
class GaussianMixture(MarginalDistribution):
    """Zero-mean scale mixture: F(x) = sum_k p_k Phi(x / sigma_k)."""

    p: tuple[float, ...]
    sigma: tuple[float, ...]
    family = "gaussian_mixture"

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        s = tuple(float(v) for v in self.sigma)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "sigma", s)
        if len(p) == 0 or len(p) != len(s):
            raise ParameterError("mixture needs equally many weights and scales", field="p")
        if any(not (w >= 0.0) for w in p) or abs(math.fsum(p) - 1.0) > 1e-12:
            raise ParameterError("mixture weights must be nonnegative and sum to 1", field="p")
        for v in s:
            _positive("sigma", v)

    def _components(self, x):
        xa = _as_array(x)
        return xa[..., None] / np.asarray(self.sigma)

    def cdf(self, x):
        return _like(x, ndtr(self._components(x)) @ np.asarray(self.p))

    def sf(self, x):
        return _like(x, ndtr(-self._components(x)) @ np.asarray(self.p))

    def pdf(self, x):
        z = self._components(x)
        dens = np.exp(-0.5 * z * z - _LOG_SQRT_2PI) / np.asarray(self.sigma)
        return _like(x, dens @ np.asarray(self.p))

    def _bracket_hint(self):
        return 0.0, math.sqrt(math.fsum(w * s * s for w, s in zip(self.p, self.sigma)))

    def to_dict(self):
        return {"family": self.family, "p": list(self.p), "sigma": list(self.sigma)}


def _numeric_quantile(dist, t):
    """Bracketed Newton/bisection for families without a closed-form inverse."""
    out = np.empty_like(t)
    out[t == 0.0] = dist.lower
    out[t == 1.0] = dist.upper
    inner = (t > 0.0) & (t < 1.0)
    if not inner.any():
        return out
    tt = t[inner]
    upper_tail = tt > 0.5
    target = np.where(upper_tail, 1.0 - tt, tt)

    def g(x):
        # increasing in x, zero at the root; small tail computed directly
        return np.where(upper_tail, target - _as_array(dist.sf(x)), _as_array(dist.cdf(x)) - target)

    center, scale = dist._bracket_hint()
    lo = np.full_like(tt, max(center - 12.0 * scale, dist.lower))
    hi = np.full_like(tt, center + 12.0 * scale)
    width = 12.0 * scale
    for _ in range(200):
        bad = g(lo) > 0.0
        if not bad.any():
            break
        width *= 2.0
        lo[bad] = max(center - width, dist.lower)
        if width > 1e300:
            raise NumericError("could not bracket quantile from below")
    width = 12.0 * scale
    for _ in range(200):
        bad = g(hi) < 0.0
        if not bad.any():
            break
        width *= 2.0
        hi[bad] = center + width
        if width > 1e300:
            raise NumericError("could not bracket quantile from above")

    x = 0.5 * (lo + hi)
    for _ in range(300):
        gx = g(x)
        lo = np.where(gx < 0.0, x, lo)
        hi = np.where(gx >= 0.0, x, hi)
        dens = _as_array(dist.pdf(x))
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = x - gx / dens
        bisect = ~np.isfinite(nxt) | (nxt <= lo) | (nxt >= hi)
        nxt = np.where(bisect, 0.5 * (lo + hi), nxt)
        tol = 1e-15 * np.maximum(1.0, np.abs(nxt))
        done = (np.abs(nxt - x) <= tol) | (hi - lo <= tol)
        x = nxt
        if done.all():
            break
    else:  # pragma: no cover - defensive
        raise NumericError("quantile iteration did not converge")
    out[inner] = x
    return out


# -- module-level operations -------------------------------------------------

def cdf(dist: MarginalDistribution, x):
    return dist.cdf(x)


def sf(dist: MarginalDistribution, x):
    return dist.sf(x)


def quantile(dist: MarginalDistribution, t):
    return dist.quantile(t)


def pdf(dist: MarginalDistribution, x):
    return dist.pdf(x)


def hazard(dist: MarginalDistribution, x):
    return dist.hazard(x)


def _get(spec, *names, default=None, required=True):
    for name in names:
        if name in spec:
            value = spec[name]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ParameterError(f"field {name!r} must be a number", field=name)
            return float(value)
    if required and default is None:
        raise ParameterError(f"missing field {names[0]!r}", field=names[0])
    return default


def marginal_from_dict(spec: dict) -> MarginalDistribution:
    """Build a marginal from its JSON form, e.g. {"family": "weibull", "alpha": 2, "lambda": 1}."""
    if not isinstance(spec, dict):
        raise ParameterError("marginal specification must be a JSON object", field="marginal")
    family = str(spec.get("family", "")).lower().replace("-", "_")
    if family in ("uniform01", "uniform"):
        return Uniform01()
    if family in ("gaussian", "normal"):
        return Gaussian(mu=_get(spec, "mu", default=0.0), sigma=_get(spec, "sigma", default=1.0))
    if family == "weibull":
        return Weibull(alpha=_get(spec, "alpha"), lam=_get(spec, "lambda", "lam", default=1.0))
    if family == "reverse_gumbel":
        return ReverseGumbel(lam=_get(spec, "lambda", "lam", default=1.0))
    if family == "pareto":
        return Pareto(alpha=_get(spec, "alpha"), lam=_get(spec, "lambda", "lam", default=1.0))
    if family == "gamma":
        return Gamma(alpha=_get(spec, "alpha"), lam=_get(spec, "lambda", "lam", default=1.0))
    if family in ("chi_squared", "chi2"):
        return Gamma.chi_squared(_get(spec, "df"))
    if family == "gaussian_mixture":
        p, s = spec.get("p"), spec.get("sigma")
        if not isinstance(p, list):
            raise ParameterError("field 'p' must be a list of weights", field="p")
        if not isinstance(s, list):
            raise ParameterError("field 'sigma' must be a list of scales", field="sigma")
        return GaussianMixture(p=tuple(p), sigma=tuple(s))
    raise ParameterError(f"unknown marginal family {spec.get('family')!r}", field="family")
