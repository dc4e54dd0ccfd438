"""Per-domain modulation of the idea-pool growth rate.

Component interactions slow the assimilation of ideas into a domain's
artifacts (count of successful ideas grows as ``ioi_c ** (1/d)``), and the
scaling of the design variable turns that count into performance
(``Q = s ** A``). The product gives the domain's improvement rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .trend_fit import ols

__all__ = [
    "DomainParams",
    "ArtifactGraph",
    "McNerneyRun",
    "regular_graph",
    "ioi_sc_analytic",
    "log_log_slope",
    "mcnerney_simulate",
    "cost_exponent",
    "scaling_performance",
    "engine_specific_power",
    "design_variable",
    "performance_chain",
    "domain_rate",
    "D_MIN",
    "D_MAX",
]

D_MIN, D_MAX = 1.0, 6.0


@dataclass(frozen=True)
class DomainParams:
    """Interaction level ``d_j``, scaling exponent ``a_j``, assimilation
    constant ``b`` and the +1/-1 larger/smaller-is-better direction."""

    d_j: float = 1.0
    a_j: float = 1.0
    b: float = 1.0
    direction: int = 1
    name: str = ""

    def __post_init__(self):
        if not D_MIN <= self.d_j <= D_MAX:
            raise ValueError(f"d_j must lie in [{D_MIN:g}, {D_MAX:g}], got {self.d_j}")
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if self.direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction}")
        if not math.isfinite(self.a_j):
            raise ValueError("a_j must be finite")

    @property
    def sign_consistent(self) -> bool:
        return self.direction * self.a_j > 0


@dataclass
class ArtifactGraph:
    """Components with out-links (each list starts with the component itself)
    and positive per-component costs."""

    out_links: list[list[int]]
    costs: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.out_links)
        if n < 1:
            raise ValueError("graph needs at least one component")
        for i, links in enumerate(self.out_links):
            if i not in links:
                raise ValueError(f"component {i} must out-link to itself")
            if any(not 0 <= j < n for j in links):
                raise ValueError(f"component {i} links outside the graph")
        if self.costs is None:
            self.costs = np.ones(n)
        self.costs = np.asarray(self.costs, dtype=float)
        if self.costs.shape != (n,) or np.any(~(self.costs > 0)):
            raise ValueError("costs must be one positive value per component")

    @property
    def n_components(self) -> int:
        return len(self.out_links)

    @property
    def out_degree(self) -> list[int]:
        return [len(x) for x in self.out_links]


def regular_graph(n_components: int, d: int, rng: np.random.Generator,
                  costs=None) -> ArtifactGraph:
    """Each component influences itself plus ``d - 1`` distinct others."""
    if not 1 <= d <= n_components:
        raise ValueError("need 1 <= d <= n_components")
    links = []
    for i in range(n_components):
        others = [j for j in range(n_components) if j != i]
        picked = rng.choice(len(others), size=d - 1, replace=False) if d > 1 else []
        links.append([i] + sorted(others[k] for k in picked))
    if costs is None:
        costs = 1.0 - rng.random(n_components)
    return ArtifactGraph(links, costs)


def ioi_sc_analytic(ioi_c, params: DomainParams):
    """Successfully assimilated ideas, ``(b*d*ioi_c + 1) ** (1/d)``."""
    x = np.asarray(ioi_c, dtype=float)
    if np.any(x < 0):
        raise ValueError("ioi_c must be non-negative")
    out = (params.b * params.d_j * x + 1.0) ** (1.0 / params.d_j)
    return float(out) if out.ndim == 0 else out


def log_log_slope(f, x: float, rel_step: float = 1e-4) -> float:
    """Central-difference estimate of d ln f / d ln x at ``x``."""
    h = math.log1p(rel_step)
    lx = math.log(x)
    return (math.log(f(math.exp(lx + h))) - math.log(f(math.exp(lx - h)))) / (2 * h)


@dataclass
class McNerneyRun:
    attempt: np.ndarray
    cost: np.ndarray
    accepted: np.ndarray

    @property
    def normalized(self) -> np.ndarray:
        return self.cost / self.cost[0]


def mcnerney_simulate(graph: ArtifactGraph, attempts: int,
                      rng: np.random.Generator) -> McNerneyRun:
    """Random-redraw improvement of an artifact's total cost.

    Each attempt picks a component, redraws the costs of every component it
    out-links to from uniform(0, 1], and keeps the redraw only if the total
    cost strictly drops. Entry 0 of the returned series is the initial state.
    """
    if attempts < 0:
        raise ValueError("attempts must be >= 0")
    costs = [float(c) for c in graph.costs]
    links = graph.out_links
    n = graph.n_components
    total = math.fsum(costs)
    cost_series = np.empty(attempts + 1)
    accepted = np.zeros(attempts + 1, dtype=bool)
    cost_series[0] = total
    picks = rng.integers(0, n, size=attempts)
    for m in range(attempts):
        affected = links[picks[m]]
        # 1 - U maps [0, 1) onto (0, 1]
        new = 1.0 - rng.random(len(affected))
        delta = float(new.sum()) - sum(costs[j] for j in affected)
        if delta < 0:
            for j, c in zip(affected, new):
                costs[j] = float(c)
            total = math.fsum(costs)
            accepted[m + 1] = True
        cost_series[m + 1] = total
    return McNerneyRun(np.arange(attempts + 1), cost_series, accepted)


def cost_exponent(result: McNerneyRun, start_fraction: float = 0.5,
                  n_points: int = 300) -> float:
    """OLS slope of ln(normalized cost) against ln(attempt).

    Only attempts ``m >= M ** start_fraction`` enter (the later part of the
    run in log-attempt terms), sampled at ``n_points`` log-spaced attempts so
    that each decade carries equal weight.
    """
    total = int(result.attempt[-1])
    if not 0.0 <= start_fraction < 1.0:
        raise ValueError("start_fraction must lie in [0, 1)")
    lo = max(1, int(total ** start_fraction))
    m = np.unique(np.geomspace(lo, total, n_points).astype(np.int64)) if total > lo else None
    if m is None or m.size < 2:
        raise ValueError("too few attempts to fit")
    slope, _, _ = ols(np.log(m), np.log(result.normalized[m]))
    return slope


def scaling_performance(s, a_j: float):
    """Power-law performance ``s ** a_j`` of the design variable."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(~(s_arr > 0)):
        raise ValueError("design variable must be positive")
    out = s_arr ** a_j
    return float(out) if out.ndim == 0 else out


def engine_specific_power(s, a: float, b: float):
    """Specific power ``a - b/s`` of a heat engine of linear size ``s``."""
    if not a > 0 or not b / a < 1:
        raise ValueError("need a > 0 and b/a < 1")
    s_arr = np.asarray(s, dtype=float)
    if np.any(~(s_arr > 0)):
        raise ValueError("size must be positive")
    out = a - b / s_arr
    return float(out) if out.ndim == 0 else out


def design_variable(ioi_sc, direction: int):
    """Design variable moved by assimilated ideas: ``ioi_sc ** direction``."""
    return np.asarray(ioi_sc, dtype=float) ** direction


def performance_chain(ioi_c, params: DomainParams) -> np.ndarray:
    """Pool size -> assimilated ideas -> design variable -> performance."""
    s = design_variable(ioi_sc_analytic(ioi_c, params), params.direction)
    return scaling_performance(s, params.a_j)


def domain_rate(params: DomainParams, k: float) -> float:
    """Annual improvement rate ``direction * a_j * k / d_j`` of a domain.

    Raises ValueError for a negative result, i.e. a direction/exponent pair
    under which ideas would make the artifact worse.
    """
    if not k >= 0:
        raise ValueError(f"k must be non-negative, got {k}")
    k_j = params.direction * params.a_j * k / params.d_j
    if k_j < 0:
        raise ValueError(
            f"sign-inconsistent domain {params.name or params}: "
            f"direction={params.direction}, a_j={params.a_j} gives K_J < 0")
    return k_j
