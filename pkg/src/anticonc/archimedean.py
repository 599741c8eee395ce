"""Archimedean generators psi with closed-form inverse and derivatives.

A generator psi: [0, 1] -> [0, inf] is continuous and strictly decreasing
with psi(0) = inf and psi(1) = 0; the copula is psi^{-1}(sum_i psi(x_i))
and its diagonal is psi^{-1}(d * psi(x)).

Besides psi, psi^{-1} and their derivatives, each family provides
``diagonal``/``diagonal_inverse`` in a form that stays accurate near 0 and 1
(the naive composition loses digits there), and ``log_neg_dpsi_inv`` so the
ratio (psi^{-1})'(d x) / (psi^{-1})'(x) can be formed without underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

_E = math.e


def _arr(x):
    return np.asarray(x, dtype=np.float64)


def _like(x, arr):
    if np.ndim(x) == 0:
        return float(arr)
    return arr


class ArchimedeanGenerator:
    family: str = ""

    def psi(self, x):
        raise NotImplementedError

    def psi_inv(self, y):
        raise NotImplementedError

    def dpsi(self, x):
        """psi'(x)."""
        raise NotImplementedError

    def log_neg_dpsi_inv(self, y):
        """log(-(psi^{-1})'(y)) for y > 0."""
        raise NotImplementedError

    def dpsi_inv(self, y):
        """(psi^{-1})'(y)."""
        return _like(y, -np.exp(self.log_neg_dpsi_inv(_arr(y))))

    def diagonal(self, x, d):
        """psi^{-1}(d psi(x))."""
        raise NotImplementedError

    def diagonal_inverse(self, y, d):
        """psi^{-1}(psi(y) / d), the inverse of :meth:`diagonal`."""
        raise NotImplementedError

    def psi_ratio(self, x, d):
        """(psi^{-1})'(d x) / (psi^{-1})'(x) for x > 0."""
        xa = _arr(x)
        return _like(x, np.exp(self.log_neg_dpsi_inv(d * xa) - self.log_neg_dpsi_inv(xa)))

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Clayton(ArchimedeanGenerator):
    """psi(x) = x**-theta - 1, theta > 0."""

    theta: float
    family = "clayton"

    def __post_init__(self):
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise ParameterError(f"Clayton theta must be > 0, got {self.theta}", field="theta")

    def psi(self, x):
        with np.errstate(divide="ignore"):
            return _like(x, np.expm1(-self.theta * np.log(_arr(x))))

    def psi_inv(self, y):
        return _like(y, np.exp(-np.log1p(_arr(y)) / self.theta))

    def dpsi(self, x):
        with np.errstate(divide="ignore"):
            return _like(x, -self.theta * _arr(x) ** (-self.theta - 1.0))

    def log_neg_dpsi_inv(self, y):
        return -math.log(self.theta) - (1.0 / self.theta + 1.0) * np.log1p(_arr(y))

    def diagonal(self, x, d):
        xa = _arr(x)
        xt = xa**self.theta
        return _like(x, xa * (d - (d - 1) * xt) ** (-1.0 / self.theta))

    def diagonal_inverse(self, y, d):
        ya = _arr(y)
        yt = ya**self.theta
        return _like(y, ya * (yt + (1.0 - yt) / d) ** (-1.0 / self.theta))

    def to_dict(self):
        return {"family": self.family, "theta": self.theta}


@dataclass(frozen=True)
class Frank(ArchimedeanGenerator):
    """psi(x) = log((e^-theta - 1) / (e^(-theta x) - 1)), theta > 0."""

    theta: float
    family = "frank"

    def __post_init__(self):
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise ParameterError(
                f"Frank theta must be > 0 (negative-theta Frank copulas are not supported), "
                f"got {self.theta}",
                field="theta",
            )

    @property
    def _a(self):
        return -math.expm1(-self.theta)

    def _ratio(self, x):
        # e^{-psi(x)} = (1 - e^{-theta x}) / (1 - e^{-theta}), in [0, 1]
        return np.expm1(-self.theta * _arr(x)) / math.expm1(-self.theta)

    def psi(self, x):
        with np.errstate(divide="ignore"):
            return _like(x, -np.log(self._ratio(x)))

    def psi_inv(self, y):
        return _like(y, -np.log1p(-self._a * np.exp(-_arr(y))) / self.theta)

    def dpsi(self, x):
        with np.errstate(divide="ignore"):
            return _like(x, -self.theta / np.expm1(self.theta * _arr(x)))

    def log_neg_dpsi_inv(self, y):
        ya = _arr(y)
        return -math.log(self.theta) + math.log(self._a) - ya - np.log1p(-self._a * np.exp(-ya))

    def diagonal(self, x, d):
        return _like(x, -np.log1p(-self._a * self._ratio(x) ** d) / self.theta)

    def diagonal_inverse(self, y, d):
        return _like(y, -np.log1p(-self._a * self._ratio(y) ** (1.0 / d)) / self.theta)

    def to_dict(self):
        return {"family": self.family, "theta": self.theta}


@dataclass(frozen=True)
class GumbelHougaard(ArchimedeanGenerator):
    """psi(x) = (-log x)**theta, theta >= 1."""

    theta: float
    family = "gumbel_hougaard"

    def __post_init__(self):
        if not (self.theta >= 1 and math.isfinite(self.theta)):
            raise ParameterError(f"Gumbel-Hougaard theta must be >= 1, got {self.theta}", field="theta")

    def psi(self, x):
        with np.errstate(divide="ignore"):
            return _like(x, (-np.log(_arr(x))) ** self.theta)

    def psi_inv(self, y):
        return _like(y, np.exp(-_arr(y) ** (1.0 / self.theta)))

    def dpsi(self, x):
        xa = _arr(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return _like(x, -self.theta * (-np.log(xa)) ** (self.theta - 1.0) / xa)

    def log_neg_dpsi_inv(self, y):
        ya = _arr(y)
        inv = 1.0 / self.theta
        return -math.log(self.theta) + (inv - 1.0) * np.log(ya) - ya**inv

    def diagonal(self, x, d):
        return _like(x, _arr(x) ** (d ** (1.0 / self.theta)))

    def diagonal_inverse(self, y, d):
        return _like(y, _arr(y) ** (d ** (-1.0 / self.theta)))

    def to_dict(self):
        return {"family": self.family, "theta": self.theta}


@dataclass(frozen=True)
class ExpCounterexample(ArchimedeanGenerator):
    """psi(x) = e^{1/x} - e, psi^{-1}(y) = 1 / log(y + e).

    A valid generator whose copulas are not diagonally convex for d >= 2.
    """

    family = "exp_counterexample"

    def psi(self, x):
        xa = _arr(x)
        with np.errstate(divide="ignore", over="ignore"):
            return _like(x, np.exp(1.0 / xa) - _E)

    def psi_inv(self, y):
        ya = _arr(y)
        with np.errstate(divide="ignore"):
            return _like(y, 1.0 / np.log(ya + _E))

    def dpsi(self, x):
        xa = _arr(x)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return _like(x, -np.exp(1.0 / xa) / (xa * xa))

    def log_neg_dpsi_inv(self, y):
        ya = _arr(y)
        return -np.log(ya + _E) - 2.0 * np.log(np.log(ya + _E))

    def diagonal(self, x, d):
        # 1 / log(d e^{1/x} - (d-1) e) with the exponential factored out
        xa = _arr(x)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            inv = 1.0 / xa
            val = 1.0 / (inv + np.log(d - (d - 1) * np.exp(1.0 - inv)))
        return _like(x, np.where(xa <= 0.0, 0.0, val))

    def diagonal_inverse(self, y, d):
        ya = _arr(y)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            inv = 1.0 / ya
            val = 1.0 / (inv + np.log(1.0 / d + (1.0 - 1.0 / d) * np.exp(1.0 - inv)))
        return _like(y, np.where(ya <= 0.0, 0.0, val))

    def to_dict(self):
        return {"family": self.family}


def generator_from_dict(spec: dict) -> ArchimedeanGenerator:
    family = str(spec.get("family", "")).lower().replace("-", "_")
    theta = spec.get("theta")
    if family != "exp_counterexample":
        if not isinstance(theta, (int, float)) or isinstance(theta, bool):
            raise ParameterError("field 'theta' must be a number", field="theta")
        theta = float(theta)
    if family == "clayton":
        return Clayton(theta)
    if family == "frank":
        return Frank(theta)
    if family in ("gumbel_hougaard", "gumbel"):
        return GumbelHougaard(theta)
    if family == "exp_counterexample":
        return ExpCounterexample()
    raise ParameterError(f"unknown Archimedean family {spec.get('family')!r}", field="family")
