"""Seeded Monte Carlo for the maximum statistic.

Samples are drawn in ``workers`` contiguous chunks. Chunk ``i`` uses its own
counter-based Philox stream keyed by a splitmix64 mix of (seed, i), and chunks
are concatenated in worker order, so output depends only on (n, seed, workers).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtr, ndtri

from . import kernels
from .bounds import BoundResult
from .diagonals import DiagonalSection, validate_lemma1
from .errors import ParameterError, UsageError, ValidationError
from .marginals import Gaussian, MarginalDistribution

DEFAULT_N = 1_000_000
DEFAULT_K_SIGMA = 4.0
_MASK64 = (1 << 64) - 1
_ROW_BLOCK = 1 << 21


def default_seed() -> int:
    raw = os.environ.get("ANTICONC_SEED")
    return int(raw) if raw else 42


@dataclass(frozen=True)
class SampleConfig:
    n: int = DEFAULT_N
    seed: int = 42
    workers: int = 1

    def __post_init__(self):
        if int(self.n) < 1:
            raise ParameterError("sample count n must be >= 1", field="n")
        if int(self.workers) < 1:
            raise ParameterError("workers must be >= 1", field="workers")
        if not (0 <= int(self.seed) <= _MASK64):
            raise ParameterError("seed must be a 64-bit unsigned integer", field="seed")


@dataclass(frozen=True)
class MaxSample:
    """Draws of the maximum statistic together with their provenance."""

    values: np.ndarray
    seed: int
    workers: int

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class EstimateResult:
    p_hat: float
    stderr: float
    ci_low: float
    ci_high: float
    n: int
    seed: int | None
    count: int

    def to_dict(self):
        return {
            "p_hat": self.p_hat,
            "stderr": self.stderr,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "n": self.n,
            "seed": self.seed,
            "count": self.count,
        }


@dataclass(frozen=True)
class Verdict:
    passed: bool
    slack: float
    bound: float
    p_hat: float
    stderr: float
    k_sigma: float
    sense: str

    @property
    def label(self):
        return "PASS" if self.passed else "FAIL"

    def to_dict(self):
        return {
            "verdict": self.label,
            "slack": self.slack,
            "bound": self.bound,
            "p_hat": self.p_hat,
            "stderr": self.stderr,
            "k_sigma": self.k_sigma,
            "sense": self.sense,
        }


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def substream(seed: int, worker: int) -> np.random.Generator:
    """Independent generator for one worker, derived from the master seed."""
    key = _splitmix64(_splitmix64(int(seed) & _MASK64) ^ int(worker))
    return np.random.Generator(np.random.Philox(key=key))


def open_uniforms(gen: np.random.Generator, size: int) -> np.ndarray:
    """Uniforms on the open interval (0, 1): midpoints of a 2^-53 grid."""
    return (gen.integers(0, 1 << 53, size=size, dtype=np.uint64) + 0.5) * 2.0**-53


def _chunks(n: int, workers: int):
    base, extra = divmod(n, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _run(cfg: SampleConfig, job):
    sizes = _chunks(int(cfg.n), int(cfg.workers))
    tasks = [(i, size) for i, size in enumerate(sizes)]
    if cfg.workers == 1:
        parts = [job(substream(cfg.seed, i), size) for i, size in tasks]
    else:
        with ThreadPoolExecutor(max_workers=int(cfg.workers)) as pool:
            parts = list(pool.map(lambda a: job(substream(cfg.seed, a[0]), a[1]), tasks))
    return np.concatenate(parts) if parts else np.empty(0)


@lru_cache(maxsize=256)
def _lemma1_ok(diag: DiagonalSection):
    return validate_lemma1(diag, 10_000, 1e-9)


def sample_max_via_diagonal(diag: DiagonalSection, marginal: MarginalDistribution,
                            cfg: SampleConfig, validate: bool = True) -> MaxSample:
    """Draw max_i X_i as F^{-1}(Delta^{-1}(V)) with V uniform.

    Delta o F is the CDF of the maximum, so this is exact for continuous F.
    The diagonal is checked against the copula-diagonal conditions first.
    """
    if validate:
        report = _lemma1_ok(diag)
        if not report.passed:
            raise ValidationError(
                f"diagonal {diag.to_dict()} is not a copula diagonal: {report.condition} "
                f"fails at t={report.t} (slack {report.slack:.3g})"
            )

    def job(gen, size):
        v = open_uniforms(gen, size)
        return np.asarray(marginal.quantile(diag.sampling_inverse(v)), dtype=np.float64)

    return MaxSample(_run(cfg, job), int(cfg.seed), int(cfg.workers))


JOINT_COPULAS = ("independence", "comonotone", "gaussian_equicorr")


def sample_max_joint(copula: str, marginal: MarginalDistribution, d: int,
                     cfg: SampleConfig, rho: float | None = None) -> MaxSample:
    """Draw the whole vector (X_1, ..., X_d) and return its maximum.

    independence: d independent uniforms; comonotone: one uniform shared by all
    coordinates; gaussian_equicorr: sqrt(rho) W + sqrt(1 - rho) e_i pushed through
    Phi and the marginal quantile.
    """
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise ParameterError("d must be a positive integer", field="d")
    d = int(d)
    if copula not in JOINT_COPULAS:
        raise ParameterError(f"unknown joint copula {copula!r}", field="copula")
    if copula == "gaussian_equicorr":
        if rho is None or not (0.0 <= rho <= 1.0):
            raise ParameterError("gaussian_equicorr needs rho in [0, 1]", field="rho")
        sr, s1 = math.sqrt(rho), math.sqrt(1.0 - rho)

    def to_marginal(z_max):
        # Gaussian marginals are an affine map of the normal draw
        if isinstance(marginal, Gaussian):
            return marginal.mu + marginal.sigma * z_max
        return np.asarray(marginal.quantile(ndtr(z_max)), dtype=np.float64)

    def job(gen, size):
        out = np.empty(size)
        rows = max(1, _ROW_BLOCK // d)
        for lo in range(0, size, rows):
            m = min(rows, size - lo)
            if copula == "comonotone":
                out[lo:lo + m] = marginal.quantile(open_uniforms(gen, m))
            elif copula == "independence":
                u = open_uniforms(gen, m * d).reshape(m, d).max(axis=1)
                out[lo:lo + m] = marginal.quantile(u)
            else:
                w = gen.standard_normal(m)
                e = gen.standard_normal((m, d)).max(axis=1)
                out[lo:lo + m] = to_marginal(sr * w + s1 * e)
        return out

    return MaxSample(_run(cfg, job), int(cfg.seed), int(cfg.workers))


def estimate_concentration(samples, x: float, epsilon: float, level: float = 0.99) -> EstimateResult:
    """Fraction of samples in (x, x + eps] with a binomial normal-approximation CI."""
    if isinstance(samples, MaxSample):
        values, seed = samples.values, samples.seed
    else:
        values, seed = np.asarray(samples, dtype=np.float64), None
    n = int(values.size)
    if n == 0:
        raise UsageError("cannot estimate from an empty sample")
    if not (epsilon >= 0.0):
        raise ParameterError("epsilon must be >= 0", field="eps")
    count = kernels.window_count(values, float(x), float(x) + float(epsilon)) if epsilon > 0 else 0
    p = count / n
    se = math.sqrt(p * (1.0 - p) / n)
    z = float(-ndtri((1.0 - level) / 2.0))
    return EstimateResult(p, se, max(0.0, p - z * se), min(1.0, p + z * se), n, seed, count)


def verify_bound(bound: BoundResult, est: EstimateResult, k_sigma: float = DEFAULT_K_SIGMA) -> Verdict:
    """PASS when the estimate is on the right side of the bound up to k_sigma standard errors."""
    if bound.sense == "lower":
        slack = est.p_hat - (bound.value - k_sigma * est.stderr)
    else:
        slack = bound.value + k_sigma * est.stderr - est.p_hat
    return Verdict(slack >= 0.0, float(slack), bound.value, est.p_hat, est.stderr, float(k_sigma), bound.sense)
