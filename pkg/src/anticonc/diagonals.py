"""Diagonal sections Delta(t) = C(t, ..., t) of d-dimensional copulas.

The maximum of (X_1, ..., X_d) with common marginal F and copula C has CDF
Delta(F(x)), so the diagonal is all that is needed for the anti-concentration
of the maximum. This module holds the diagonal families, the copula-diagonal
validator, the grid convexity certificate and the Archimedean ratio check.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Sequence

import numpy as np
from scipy.special import ndtr, ndtri, roots_hermite

from . import kernels
from .archimedean import ArchimedeanGenerator, generator_from_dict
from .errors import DomainError, NumericError, ParameterError

QUAD_START_NODES = 128
QUAD_MAX_NODES = 1 << 16
QUAD_TOL = 1e-10
BISECT_TOL = 1e-12
# half-width (on the normal scale) of the quadrature calibration probe
_PROBE = np.linspace(-9.0, 9.0, 181)


def _arr(t):
    return np.asarray(t, dtype=np.float64)


def _like(t, arr):
    if np.ndim(t) == 0:
        return float(arr)
    return arr


def _check_unit(t, name="t"):
    ta = _arr(t)
    if np.any(~((ta >= 0.0) & (ta <= 1.0))):
        raise DomainError(f"{name} must lie in [0, 1]")
    return ta


def _check_d(d):
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 1:
        raise ParameterError(f"dimension d must be a positive integer, got {d!r}", field="d")
    return int(d)


def _check_u(u):
    u = float(u)
    if not (0.0 <= u <= 1.0):
        raise ParameterError(f"u must lie in [0, 1], got {u}", field="u")
    return u


def _dedupe_knots(kt, kv):
    kt = np.asarray(kt, dtype=np.float64)
    kv = np.asarray(kv, dtype=np.float64)
    keep = np.concatenate(([True], np.diff(kt) > 0.0))
    # when two knots share t keep the later value (the right limit)
    idx = np.flatnonzero(keep)
    last = np.concatenate((idx[1:] - 1, [kt.size - 1]))
    return kt[idx], kv[last]


class DiagonalSection:
    """Base class. Subclasses set ``d`` and implement ``_eval``."""

    d: int
    kind: str = ""

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        ta = _check_unit(t)
        return _like(t, np.clip(self._eval(ta), 0.0, 1.0))

    def _eval(self, t):
        raise NotImplementedError

    def _eval_fast(self, t):
        """Vectorized evaluation used inside sampling loops; exact unless overridden."""
        return self._eval(t)

    def knots(self):
        """(t, value) knots for piecewise-linear diagonals, else None."""
        return None

    def inverse(self, t):
        """Generalized inverse inf{s in [0, 1] : Delta(s) >= t}."""
        ta = _check_unit(t)
        return _like(t, self._inverse(ta))

    def _inverse(self, t):
        k = self.knots()
        if k is not None:
            return kernels.pwl_inverse(k[0], k[1], t)
        return _bisect_inverse(self._eval, t)

    def sampling_inverse(self, v):
        """Inverse used by the Monte Carlo sampler (vectorized, may use cached tables)."""
        return self._inverse(_arr(v))

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError


def _bisect_inverse(fn, t, tol=BISECT_TOL):
    lo = np.zeros_like(t)
    hi = np.ones_like(t)
    iters = int(math.ceil(math.log2(1.0 / tol))) + 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        up = fn(mid) >= t
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    return np.where(t <= 0.0, 0.0, hi)


@dataclass(frozen=True)
class Independence(DiagonalSection):
    d: int
    kind = "independence"

    def __post_init__(self):
        _check_d(self.d)

    def _eval(self, t):
        return t**self.d

    def _inverse(self, t):
        return t ** (1.0 / self.d)

    def to_dict(self):
        return {"kind": self.kind, "d": self.d}


@dataclass(frozen=True)
class FrechetHoeffdingUpper(DiagonalSection):
    d: int
    kind = "fhu"

    def __post_init__(self):
        _check_d(self.d)

    def _eval(self, t):
        return t.copy()

    def knots(self):
        return np.array([0.0, 1.0]), np.array([0.0, 1.0])

    def to_dict(self):
        return {"kind": self.kind, "d": self.d}


@dataclass(frozen=True)
class FrechetHoeffdingLower(DiagonalSection):
    """max(0, d t - d + 1)."""

    d: int
    kind = "fhl"

    def __post_init__(self):
        _check_d(self.d)

    def _eval(self, t):
        return np.maximum(0.0, self.d * t - self.d + 1.0)

    def knots(self):
        return _dedupe_knots([0.0, (self.d - 1) / self.d, 1.0], [0.0, 0.0, 1.0])

    def to_dict(self):
        return {"kind": self.kind, "d": self.d}


@dataclass(frozen=True)
class DeltaUp(DiagonalSection):
    """Diagonal maximizing the increment over (u, u + delta].

    Zero up to c = min(u, (d-1)/d), slope d up to d u / (d-1), then the
    identity. For d = 1 it is the identity.
    """

    d: int
    u: float
    kind = "delta_up"

    def __post_init__(self):
        _check_d(self.d)
        object.__setattr__(self, "u", _check_u(self.u))

    def _corners(self):
        d, u = self.d, self.u
        c = min(u, (d - 1) / d)
        b = d * u / (d - 1) if u < (d - 1) / d else math.inf
        return c, b

    def _eval(self, t):
        if self.d == 1:
            return t.copy()
        c, b = self._corners()
        ramp = self.d * (t - c)
        out = np.where((t > c) & (t <= b), ramp, 0.0)
        out = np.where(t > min(b, 1.0), t, out)
        return np.where(t >= 1.0, 1.0, out)

    def knots(self):
        if self.d == 1:
            return np.array([0.0, 1.0]), np.array([0.0, 1.0])
        c, b = self._corners()
        top = min(b, 1.0)
        top_v = 1.0 if top >= 1.0 else self.d * (top - c)
        return _dedupe_knots([0.0, c, top, 1.0], [0.0, 0.0, top_v, 1.0])

    def to_dict(self):
        return {"kind": self.kind, "d": self.d, "u": self.u}


@dataclass(frozen=True)
class DeltaLo(DiagonalSection):
    """Diagonal minimizing the increment over (u, u + delta].

    Identity up to u, flat at height u up to (d + u - 1)/d, then 1 - d + d t.
    """

    d: int
    u: float
    kind = "delta_lo"

    def __post_init__(self):
        _check_d(self.d)
        object.__setattr__(self, "u", _check_u(self.u))

    def _eval(self, t):
        d, u = self.d, self.u
        e = (d + u - 1) / d
        return np.where(t <= u, t, np.where(t <= e, u, 1.0 - d + d * t))

    def knots(self):
        d, u = self.d, self.u
        return _dedupe_knots([0.0, u, (d + u - 1) / d, 1.0], [0.0, u, u, 1.0])

    def to_dict(self):
        return {"kind": self.kind, "d": self.d, "u": self.u}


@dataclass(frozen=True)
class DeltaConvexMax(DiagonalSection):
    """Convex diagonal maximizing the increment over (u, u + delta].

    (t - c) * min(1/(1-u), d) for t > c = min(u, (d-1)/d), zero before.
    """

    d: int
    u: float
    kind = "delta_convex_max"

    def __post_init__(self):
        _check_d(self.d)
        object.__setattr__(self, "u", _check_u(self.u))

    def _slope(self):
        if self.u >= 1.0:
            return float(self.d)
        return min(1.0 / (1.0 - self.u), float(self.d))

    def _eval(self, t):
        c = min(self.u, (self.d - 1) / self.d)
        out = np.where(t > c, (t - c) * self._slope(), 0.0)
        return np.where(t >= 1.0, 1.0, out)

    def knots(self):
        c = min(self.u, (self.d - 1) / self.d)
        return _dedupe_knots([0.0, c, 1.0], [0.0, 0.0, 1.0])

    def to_dict(self):
        return {"kind": self.kind, "d": self.d, "u": self.u}


@dataclass(frozen=True)
class Archimedean(DiagonalSection):
    """psi^{-1}(d psi(t)) for an Archimedean generator psi."""

    d: int
    generator: ArchimedeanGenerator
    kind = "archimedean"

    def __post_init__(self):
        _check_d(self.d)

    def _eval(self, t):
        if self.d == 1:
            return t.copy()
        out = self.generator.diagonal(t, self.d)
        return np.where(t >= 1.0, 1.0, np.where(t <= 0.0, 0.0, out))

    def _inverse(self, t):
        if self.d == 1:
            return t.copy()
        out = self.generator.diagonal_inverse(t, self.d)
        return np.where(t >= 1.0, 1.0, np.where(t <= 0.0, 0.0, out))

    def to_dict(self):
        return {"kind": self.kind, "d": self.d, **self.generator.to_dict()}


@lru_cache(maxsize=64)
def _hermite_rule(n):
    x, w = roots_hermite(n)
    return x * math.sqrt(2.0), w / math.sqrt(math.pi)


@lru_cache(maxsize=64)
def equicorr_quadrature(rho: float, d: int):
    """Gauss-Hermite rule for the equicorrelated diagonal, calibrated for (rho, d).

    Starts at 128 nodes and doubles until two successive rules agree to 1e-10
    on a probe grid spanning the normal scale; returns the finer rule.
    """
    sr, s1 = math.sqrt(rho), math.sqrt(1.0 - rho)
    n = QUAD_START_NODES
    nodes, weights = _hermite_rule(n)
    prev = kernels.equicorr_diag(_PROBE, nodes, weights, sr, s1, d)
    while True:
        n *= 2
        if n > QUAD_MAX_NODES:
            raise NumericError(
                f"Gauss-Hermite quadrature did not converge for rho={rho}, d={d} "
                f"with {QUAD_MAX_NODES} nodes"
            )
        nodes, weights = _hermite_rule(n)
        cur = kernels.equicorr_diag(_PROBE, nodes, weights, sr, s1, d)
        if np.max(np.abs(cur - prev)) < QUAD_TOL:
            return nodes, weights
        prev = cur


@lru_cache(maxsize=32)
def _equicorr_table(rho: float, d: int, size: int = 4097):
    """Knots (a, G(a), G'(a)) of G(a) = Delta(Phi(a)) for Hermite-table inversion."""
    nodes, weights = equicorr_quadrature(rho, d)
    sr, s1 = math.sqrt(rho), math.sqrt(1.0 - rho)
    a_lo = float(ndtri(1e-17))
    a_hi = -float(ndtri(1e-18 / d))
    a = np.linspace(a_lo, a_hi, size)
    g = kernels.equicorr_diag(a, nodes, weights, sr, s1, d)
    dg = kernels.equicorr_diag_deriv(a, nodes, weights, sr, s1, d)
    g = np.maximum.accumulate(np.clip(g, 0.0, 1.0))
    return a, g, dg


@dataclass(frozen=True)
class GaussianEquicorr(DiagonalSection):
    """Diagonal of the Gaussian copula with all pairwise correlations rho in [0, 1].

    Delta(t) = int phi(w) Phi((Phi^{-1}(t) - sqrt(rho) w) / sqrt(1 - rho))^d dw,
    evaluated by Gauss-Hermite quadrature.
    """

    d: int
    rho: float
    kind = "gaussian_equicorr"

    def __post_init__(self):
        _check_d(self.d)
        rho = float(self.rho)
        if not (0.0 <= rho <= 1.0):
            raise ParameterError(f"rho must lie in [0, 1], got {rho}", field="rho")
        object.__setattr__(self, "rho", rho)

    @property
    def _trivial(self):
        return self.d == 1 or self.rho == 0.0 or self.rho == 1.0

    def _eval_trivial(self, t):
        if self.rho == 0.0:
            return t**self.d
        return t.copy()

    def _eval(self, t):
        if self._trivial:
            return self._eval_trivial(t)
        nodes, weights = equicorr_quadrature(self.rho, self.d)
        a = ndtri(t)
        out = kernels.equicorr_diag(a, nodes, weights, math.sqrt(self.rho), math.sqrt(1.0 - self.rho), self.d)
        return np.where(t >= 1.0, 1.0, np.where(t <= 0.0, 0.0, out))

    def _eval_fast(self, t):
        if self._trivial:
            return self._eval_trivial(t)
        ka, kg, kdg = _equicorr_table(self.rho, self.d)
        a = np.clip(ndtri(t), ka[0], ka[-1])
        k = np.clip(np.searchsorted(ka, a, side="right"), 1, ka.size - 1)
        h = ka[k] - ka[k - 1]
        s = (a - ka[k - 1]) / h
        s2, s3 = s * s, s * s * s
        val = ((2 * s3 - 3 * s2 + 1) * kg[k - 1] + (s3 - 2 * s2 + s) * h * kdg[k - 1]
               + (-2 * s3 + 3 * s2) * kg[k] + (s3 - s2) * h * kdg[k])
        val = np.where(ndtri(t) < ka[0], 0.0, val)
        val = np.where(ndtri(t) > ka[-1], 1.0, val)
        return np.clip(val, 0.0, 1.0)

    def _inverse(self, t):
        if self.rho == 1.0 or self.d == 1:
            return t.copy()
        if self.rho == 0.0:
            return t ** (1.0 / self.d)
        return _bisect_inverse(self._eval, t)

    def sampling_inverse(self, v):
        v = _arr(v)
        if self._trivial:
            return self._inverse(v)
        ka, kg, kdg = _equicorr_table(self.rho, self.d)
        return ndtr(kernels.hermite_invert(ka, kg, kdg, v))

    def to_dict(self):
        return {"kind": self.kind, "d": self.d, "rho": self.rho}


@dataclass(frozen=True)
class Mixture(DiagonalSection):
    """sum_k w_k Delta_k(t) over diagonals of a common dimension."""

    weights: tuple[float, ...]
    components: tuple[DiagonalSection, ...]
    d: int = field(init=False)
    kind = "mixture"

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        comps = tuple(self.components)
        if len(w) == 0 or len(w) != len(comps):
            raise ParameterError("mixture needs one weight per component", field="weights")
        if any(not (x >= 0.0) for x in w) or abs(math.fsum(w) - 1.0) > 1e-12:
            raise ParameterError("mixture weights must be nonnegative and sum to 1", field="weights")
        dims = {c.d for c in comps}
        if len(dims) != 1:
            raise ParameterError("mixture components must share the same dimension d", field="components")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "d", dims.pop())

    def _eval(self, t):
        return sum(w * c._eval(t) for w, c in zip(self.weights, self.components))

    def _eval_fast(self, t):
        return sum(w * c._eval_fast(t) for w, c in zip(self.weights, self.components))

    def knots(self):
        parts = [c.knots() for c in self.components]
        if any(p is None for p in parts):
            return None
        kt = np.unique(np.concatenate([p[0] for p in parts]))
        kv = sum(w * kernels.pwl_eval(p[0], p[1], kt) for w, p in zip(self.weights, parts))
        return kt, kv

    def sampling_inverse(self, v):
        v = _arr(v)
        if self.knots() is not None:
            return self._inverse(v)
        return _bisect_inverse(self._eval_fast, v)

    def to_dict(self):
        return {
            "kind": self.kind,
            "weights": list(self.weights),
            "components": [c.to_dict() for c in self.components],
        }


@dataclass(frozen=True)
class Tabulated(DiagonalSection):
    """Piecewise-linear diagonal through user knots spanning [0, 1]."""

    d: int
    t: tuple[float, ...]
    values: tuple[float, ...]
    kind = "tabulated"

    def __post_init__(self):
        _check_d(self.d)
        t = np.asarray(self.t, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if t.ndim != 1 or t.size < 2 or t.size != v.size:
            raise ParameterError("tabulated diagonal needs at least two (t, value) knots", field="knots")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise ParameterError("tabulated knots must start at t=0 and end at t=1", field="knots")
        if np.any(np.diff(t) <= 0.0):
            raise ParameterError("tabulated knots must be strictly increasing in t", field="knots")
        if np.any(np.diff(v) < 0.0):
            raise ParameterError("tabulated values must be nondecreasing", field="knots")
        if np.any((v < 0.0) | (v > 1.0)):
            raise ParameterError("tabulated values must lie in [0, 1]", field="knots")
        object.__setattr__(self, "t", tuple(float(x) for x in t))
        object.__setattr__(self, "values", tuple(float(x) for x in v))

    @classmethod
    def from_pairs(cls, d: int, pairs: Sequence[Sequence[float]]):
        pairs = list(pairs)
        return cls(d=d, t=tuple(p[0] for p in pairs), values=tuple(p[1] for p in pairs))

    @classmethod
    def from_csv(cls, d: int, path):
        """Read (t, value) rows; a non-numeric first row is treated as a header."""
        rows = []
        with open(path, newline="") as fh:
            for i, row in enumerate(csv.reader(fh)):
                if not row or not "".join(row).strip():
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError):
                    if i == 0:
                        continue
                    raise ParameterError(f"bad knot row {i + 1} in {path}", field="csv") from None
        return cls.from_pairs(d, rows)

    def knots(self):
        return np.asarray(self.t), np.asarray(self.values)

    def _eval(self, t):
        kt, kv = self.knots()
        return kernels.pwl_eval(kt, kv, t)

    def to_dict(self):
        return {"kind": self.kind, "d": self.d, "knots": [list(p) for p in zip(self.t, self.values)]}


# -- operations ---------------------------------------------------------------

def eval(diag: DiagonalSection, t):  # noqa: A001 - mirrors the operation name
    return diag.eval(t)


def inverse(diag: DiagonalSection, t):
    return diag.inverse(t)


def increment(diag: DiagonalSection, u, delta):
    """Delta(u + delta) - Delta(u) for u in [0, 1], delta in [0, 1 - u]."""
    ua, da = _arr(u), _arr(delta)
    _check_unit(ua, "u")
    if np.any(~((da >= 0.0) & (da <= 1.0 - ua + 1e-15))):
        raise DomainError("delta must lie in [0, 1 - u]")
    top = np.minimum(ua + da, 1.0)
    out = _arr(diag.eval(top)) - _arr(diag.eval(ua))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Lemma1Report:
    """Outcome of the copula-diagonal check.

    ``condition`` names the first failing condition ("endpoint", "below_identity",
    "monotone" or "lipschitz"); ``t``/``t_next`` locate it and ``slack`` is the
    signed margin (negative means violated).
    """

    passed: bool
    condition: str | None = None
    t: float | None = None
    t_next: float | None = None
    slack: float = 0.0

    def to_dict(self):
        return {
            "passed": self.passed,
            "condition": self.condition,
            "t": self.t,
            "t_next": self.t_next,
            "slack": self.slack,
        }


def validate_lemma1(diag: DiagonalSection, grid_size: int = 10_000, tol: float = 1e-9) -> Lemma1Report:
    """Check Delta(1) = 1, Delta(t) <= t and 0 <= Delta(t') - Delta(t) <= d (t' - t) on a grid."""
    if grid_size < 2:
        raise ParameterError("grid_size must be at least 2", field="grid_size")
    t = np.linspace(0.0, 1.0, grid_size)
    v = _arr(diag.eval(t))
    d = diag.d
    end_slack = tol - abs(v[-1] - 1.0)
    if end_slack < 0:
        return Lemma1Report(False, "endpoint", 1.0, None, float(end_slack))
    below = t - v + tol
    dv = np.diff(v)
    dt = np.diff(t)
    mono = dv + tol
    lip = d * dt - dv + tol
    candidates = []
    i = np.flatnonzero(below < 0)
    if i.size:
        candidates.append((i[0], 0, "below_identity", below[i[0]]))
    j = np.flatnonzero(mono < 0)
    if j.size:
        candidates.append((j[0], 1, "monotone", mono[j[0]]))
    k = np.flatnonzero(lip < 0)
    if k.size:
        candidates.append((k[0], 1, "lipschitz", lip[k[0]]))
    if not candidates:
        slack = min(below.min(), mono.min(), lip.min()) - tol
        return Lemma1Report(True, None, None, None, float(slack))
    idx, pair, cond, slack = min(candidates, key=lambda c: (c[0] + c[1], c[1]))
    t_next = float(t[idx + 1]) if pair else None
    return Lemma1Report(False, cond, float(t[idx]), t_next, float(slack - tol))


@dataclass(frozen=True)
class ConvexityReport:
    convex: bool
    witness_t: float | None
    min_second_difference: float

    def __bool__(self):
        return self.convex

    def to_dict(self):
        return {
            "convex": self.convex,
            "witness_t": self.witness_t,
            "min_second_difference": self.min_second_difference,
        }


def check_convexity(diag: DiagonalSection, grid_size: int = 10_000, tol: float | None = None) -> ConvexityReport:
    """Grid certificate: Delta(t-h) - 2 Delta(t) + Delta(t+h) >= -tol at every interior node.

    The default tolerance is 1e-9 * d.
    """
    if grid_size < 3:
        raise ParameterError("grid_size must be at least 3", field="grid_size")
    if tol is None:
        tol = 1e-9 * diag.d
    t = np.linspace(0.0, 1.0, grid_size)
    v = _arr(diag.eval(t))
    sd = v[:-2] - 2.0 * v[1:-1] + v[2:]
    i = int(np.argmin(sd))
    worst = float(sd[i])
    if worst >= -tol:
        return ConvexityReport(True, None, worst)
    return ConvexityReport(False, float(t[i + 1]), worst)


@dataclass(frozen=True)
class PsiReport:
    nonincreasing: bool
    witness: tuple[float, float] | None
    max_increase: float

    def __bool__(self):
        return self.nonincreasing

    def to_dict(self):
        return {
            "nonincreasing": self.nonincreasing,
            "witness": list(self.witness) if self.witness else None,
            "max_increase": self.max_increase,
        }


def psi_grid(gen: ArchimedeanGenerator, d: int, grid: int = 2000):
    """Log-spaced points over [1e-8, psi(1e-8)], the upper end capped at a finite value."""
    top = float(gen.psi(1e-8))
    cap = 1e300 / max(d, 1)
    if not math.isfinite(top) or top > cap:
        top = cap
    top = max(top, 1e-7)
    return np.logspace(-8.0, math.log10(top), grid)


def psi_monotonicity_check(gen: ArchimedeanGenerator, d: int, grid: int = 2000, tol: float = 1e-10) -> PsiReport:
    """Is x -> (psi^{-1})'(d x) / (psi^{-1})'(x) non-increasing on a log grid?"""
    d = _check_d(d)
    if grid < 2:
        raise ParameterError("grid must be at least 2", field="grid")
    x = psi_grid(gen, d, grid)
    with np.errstate(all="ignore"):
        r = _arr(gen.psi_ratio(x, d))
    if not np.all(np.isfinite(r)):
        raise NumericError(f"ratio evaluation failed for generator {gen.to_dict()}")
    inc = np.diff(r)
    i = int(np.argmax(inc))
    worst = float(inc[i])
    if worst <= tol:
        return PsiReport(True, None, worst)
    return PsiReport(False, (float(x[i]), float(x[i + 1])), worst)


# -- JSON ---------------------------------------------------------------------

def _int_field(spec, name):
    v = spec.get(name)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or float(v) != int(v):
        raise ParameterError(f"field {name!r} must be an integer", field=name)
    return int(v)


def _num_field(spec, name):
    v = spec.get(name)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParameterError(f"field {name!r} must be a number", field=name)
    return float(v)


def diagonal_from_dict(spec: dict) -> DiagonalSection:
    """Build a diagonal from JSON, e.g. {"kind": "delta_up", "d": 3, "u": 0.5}."""
    if not isinstance(spec, dict):
        raise ParameterError("diagonal specification must be a JSON object", field="diagonal")
    kind = str(spec.get("kind", "")).lower().replace("-", "_")
    if kind == "mixture":
        comps = spec.get("components")
        if not isinstance(comps, list):
            raise ParameterError("field 'components' must be a list", field="components")
        weights = spec.get("weights")
        if not isinstance(weights, list):
            raise ParameterError("field 'weights' must be a list", field="weights")
        return Mixture(tuple(weights), tuple(diagonal_from_dict(c) for c in comps))
    d = _int_field(spec, "d")
    if kind == "independence":
        return Independence(d)
    if kind in ("fhu", "frechet_hoeffding_upper", "comonotone"):
        return FrechetHoeffdingUpper(d)
    if kind in ("fhl", "frechet_hoeffding_lower"):
        return FrechetHoeffdingLower(d)
    if kind == "delta_up":
        return DeltaUp(d, _num_field(spec, "u"))
    if kind == "delta_lo":
        return DeltaLo(d, _num_field(spec, "u"))
    if kind == "delta_convex_max":
        return DeltaConvexMax(d, _num_field(spec, "u"))
    if kind == "archimedean":
        gen = spec.get("generator", spec)
        if not isinstance(gen, dict):
            raise ParameterError("field 'generator' must be a JSON object", field="generator")
        return Archimedean(d, generator_from_dict(gen))
    if kind == "gaussian_equicorr":
        return GaussianEquicorr(d, _num_field(spec, "rho"))
    if kind == "tabulated":
        if "csv" in spec:
            return Tabulated.from_csv(d, spec["csv"])
        knots = spec.get("knots")
        if not isinstance(knots, list):
            raise ParameterError("field 'knots' must be a list of [t, value] pairs", field="knots")
        return Tabulated.from_pairs(d, knots)
    raise ParameterError(f"unknown diagonal kind {spec.get('kind')!r}", field="kind")


def with_dimension(diag: DiagonalSection, d: int) -> DiagonalSection:
    """The same diagonal family rebuilt at dimension d (used by dimension sweeps)."""
    spec = diag.to_dict()
    if spec["kind"] == "mixture":
        return Mixture(diag.weights, tuple(with_dimension(c, d) for c in diag.components))
    spec["d"] = d
    return diagonal_from_dict(spec)
