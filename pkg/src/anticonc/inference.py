"""Size control for max-type tests built on a coupling X ~ T.

Given P(||X - T||_inf > eps) <= p(eps) and the law of max_i T_i (through a
diagonal and a marginal), the rejection probability of the test
``max_i X_i > q_alpha`` differs from alpha by at most

    p(eps) + max(P(q - eps < max T <= q), P(q < max T <= q + eps)),

which is evaluated here on a grid of eps and minimized.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundQuery, gmm_bound, nazarov_bound, thm2_upper
from .diagonals import DiagonalSection, Independence, diagonal_from_dict
from .errors import DomainError, ParameterError, UsageError
from .marginals import GaussianMixture, MarginalDistribution, marginal_from_dict
from .montecarlo import SampleConfig, estimate_concentration, sample_max_via_diagonal, verify_bound


@dataclass(frozen=True)
class CouplingProfile:
    """Tabulated coupling error p(eps), nonincreasing in eps.

    Between table points p is read at the largest tabulated eps not exceeding
    the query, which keeps p(eps) an upper bound on P(||X - T|| > eps). Below
    the first tabulated eps the profile is vacuous (p = 1).
    """

    epsilon: tuple[float, ...]
    p: tuple[float, ...]

    def __post_init__(self):
        e = np.asarray(self.epsilon, dtype=np.float64)
        p = np.asarray(self.p, dtype=np.float64)
        if e.ndim != 1 or e.size == 0 or e.size != p.size:
            raise ParameterError("coupling table needs matching, nonempty eps and p columns", field="coupling")
        if np.any(e < 0) or np.any(np.diff(e) <= 0):
            raise ParameterError("coupling eps values must be nonnegative and strictly increasing", field="coupling")
        if np.any((p < 0) | (p > 1)):
            raise ParameterError("coupling p values must lie in [0, 1]", field="coupling")
        if np.any(np.diff(p) > 0):
            raise ParameterError("coupling p must be nonincreasing in eps", field="coupling")
        object.__setattr__(self, "epsilon", tuple(float(v) for v in e))
        object.__setattr__(self, "p", tuple(float(v) for v in p))

    @classmethod
    def from_pairs(cls, pairs):
        pairs = sorted((float(a), float(b)) for a, b in pairs)
        return cls(tuple(a for a, _ in pairs), tuple(b for _, b in pairs))

    def __call__(self, eps: float) -> float:
        k = int(np.searchsorted(self.epsilon, eps, side="right")) - 1
        if k < 0:
            return 1.0
        return self.p[k]


@dataclass(frozen=True)
class InferenceScenario:
    diagonal: DiagonalSection
    marginal: MarginalDistribution
    alpha: float
    coupling: CouplingProfile
    epsilon_grid: tuple[float, ...]

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ParameterError("alpha must lie in (0, 1)", field="alpha")
        grid = tuple(sorted(float(e) for e in self.epsilon_grid))
        if any(e < 0 for e in grid):
            raise ParameterError("eps grid must be nonnegative", field="eps_grid")
        object.__setattr__(self, "epsilon_grid", grid)


def quantile_qalpha(diag: DiagonalSection, marginal: MarginalDistribution, alpha: float) -> float:
    """inf{q : Delta(F(q)) >= 1 - alpha}."""
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")
    return float(marginal.quantile(diag.inverse(1.0 - alpha)))


@dataclass(frozen=True)
class DistortionRow:
    epsilon: float
    coupling: float
    left: float
    right: float
    total: float


@dataclass(frozen=True)
class DistortionResult:
    bound: float
    argmin_epsilon: float
    q_alpha: float
    mode: str
    breakdown: tuple[DistortionRow, ...] = field(repr=False)

    def to_dict(self):
        return {
            "bound": self.bound,
            "argmin_epsilon": self.argmin_epsilon,
            "q_alpha": self.q_alpha,
            "mode": self.mode,
            "breakdown": [r.__dict__ for r in self.breakdown],
        }

    def csv_rows(self):
        yield ("eps", "coupling", "left", "right", "total")
        for r in self.breakdown:
            yield (r.epsilon, r.coupling, r.left, r.right, r.total)


def size_distortion_bound(scenario: InferenceScenario, mode: str = "exact") -> DistortionResult:
    """Minimize the size-distortion bound over the scenario's eps grid.

    mode="exact" uses Delta o F around q_alpha; mode="thm2" replaces both
    window probabilities by the convex-class bound, for when only diagonal
    convexity (not the diagonal itself) is known.
    """
    if not scenario.epsilon_grid:
        raise UsageError("epsilon grid is empty")
    if mode not in ("exact", "thm2"):
        raise ParameterError(f"unknown mode {mode!r}", field="mode")
    diag, f = scenario.diagonal, scenario.marginal
    q = quantile_qalpha(diag, f, scenario.alpha)

    def law(x):
        return float(diag.eval(float(f.cdf(x))))

    rows = []
    for eps in scenario.epsilon_grid:
        if mode == "exact":
            mid = law(q)
            left = mid - law(q - eps)
            right = law(q + eps) - mid
        else:
            left = thm2_upper(BoundQuery(q - eps, eps, diag.d, f)).value
            right = thm2_upper(BoundQuery(q, eps, diag.d, f)).value
        pe = scenario.coupling(eps)
        total = min(1.0, pe + max(left, right))
        rows.append(DistortionRow(eps, pe, left, right, total))
    best = min(rows, key=lambda r: (r.total, r.epsilon))
    return DistortionResult(best.total, best.epsilon, q, mode, tuple(rows))


@dataclass(frozen=True)
class FactorModelReport:
    mixture_branch: float
    conditioning_value: float
    bound: float
    winner: str
    mc: tuple[dict, ...]

    @property
    def mc_passed(self):
        return all(r["verdict"] == "PASS" for r in self.mc)

    def to_dict(self):
        return {
            "mixture_branch": self.mixture_branch,
            "conditioning_value": self.conditioning_value,
            "bound": self.bound,
            "winner": self.winner,
            "mc_passed": self.mc_passed,
            "mc": list(self.mc),
        }


def factor_model_scenario(p, sigma, d: int, epsilon: float, xs=(0.0, 0.5, 1.0, 2.0, 3.0),
                          cfg: SampleConfig | None = None, k_sigma: float = 4.0) -> FactorModelReport:
    """Compare the mixture bound with Nazarov-after-conditioning and check it by simulation.

    The simulated law is i.i.d. Gaussian-mixture coordinates (independence
    diagonal); pass ``cfg=None`` to skip the simulation.
    """
    g = gmm_bound(p, sigma, d, epsilon)
    conditioning = nazarov_bound(min(float(s) for s in sigma), d, epsilon)
    winner = "mixture" if g.mixture_branch < conditioning else "conditioning"
    mc = []
    if cfg is not None:
        from .bounds import BoundResult

        samples = sample_max_via_diagonal(Independence(d), GaussianMixture(tuple(p), tuple(sigma)), cfg)
        bound = BoundResult(min(g.value, 1.0), g.regime, "gmm")
        for x in xs:
            est = estimate_concentration(samples, float(x), epsilon)
            v = verify_bound(bound, est, k_sigma)
            mc.append({"x": float(x), "p_hat": est.p_hat, "stderr": est.stderr,
                       "bound": bound.value, "verdict": v.label})
    return FactorModelReport(g.mixture_branch, conditioning, g.value, winner, tuple(mc))


def scenario_from_dict(spec: dict) -> InferenceScenario:
    """Scenario JSON: {"diagonal": {...}, "marginal": {...}, "alpha": 0.05,
    "coupling": [[eps, p], ...], "eps_grid": [...]}."""
    for key in ("diagonal", "marginal", "alpha", "coupling", "eps_grid"):
        if key not in spec:
            raise ParameterError(f"scenario is missing field {key!r}", field=key)
    coupling = spec["coupling"]
    if isinstance(coupling, dict):
        pairs = list(zip(coupling.get("eps", []), coupling.get("p", [])))
    elif isinstance(coupling, list):
        pairs = coupling
    else:
        raise ParameterError("field 'coupling' must be a list of [eps, p] pairs", field="coupling")
    alpha = spec["alpha"]
    if isinstance(alpha, bool) or not isinstance(alpha, (int, float)):
        raise ParameterError("field 'alpha' must be a number", field="alpha")
    grid = spec["eps_grid"]
    if not isinstance(grid, list):
        raise ParameterError("field 'eps_grid' must be a list", field="eps_grid")
    return InferenceScenario(
        diagonal=diagonal_from_dict(spec["diagonal"]),
        marginal=marginal_from_dict(spec["marginal"]),
        alpha=float(alpha),
        coupling=CouplingProfile.from_pairs(pairs),
        epsilon_grid=tuple(grid),
    )


def load_scenario(path) -> InferenceScenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))
