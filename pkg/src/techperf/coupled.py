"""One coupled Understanding/Operations run, replication and stagnation
analysis."""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import idea_pool as ip
from . import understanding as us
from .trend_fit import FitResult, fit_exponential

__all__ = [
    "SimConfig",
    "RunSeries",
    "ReplicateSummary",
    "run",
    "fit_run",
    "replicate",
    "detect_stagnation",
    "label",
]


@dataclass(frozen=True)
class SimConfig:
    n_basic_init: int = 10
    p_ioi: float = 0.25
    threshold_r: float = 1.5
    n_fields: int = 10
    # None -> z_f_factor times the starting fitness per idea (slack cap at t=0)
    z_f: float | None = None
    z_f_factor: float = 3.0
    n_steps: int = 65
    seed: int = 0
    reuse_constraint: bool = True
    coupling_enabled: bool = True
    pairing: str = "feasible"
    replacement: str = "both"

    def __post_init__(self):
        if self.n_basic_init < 1:
            raise ValueError("n_basic_init must be >= 1")
        if not 0.0 <= self.p_ioi <= 1.0:
            raise ValueError("p_ioi must lie in [0, 1]")
        if not self.threshold_r > 1.0:
            raise ValueError("threshold_r must be > 1")
        if self.n_fields < 2:
            raise ValueError("n_fields must be >= 2")
        if self.z_f is not None and not self.z_f > 0:
            raise ValueError("z_f must be positive")
        if not self.z_f_factor > 0:
            raise ValueError("z_f_factor must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.pairing not in ip.PAIRINGS:
            raise ValueError(f"pairing must be one of {ip.PAIRINGS}")
        if self.replacement not in us.RULES:
            raise ValueError(f"replacement must be one of {us.RULES}")

    def with_seed(self, seed: int) -> SimConfig:
        return replace(self, seed=int(seed))


def label(n_basic: int, r: float) -> str:
    """Run label in the ``10B1.5R`` style."""
    return f"{n_basic}B{r:g}R"


@dataclass
class RunSeries:
    config: SimConfig
    t: list[int] = field(default_factory=list)
    ioi_c: list[int] = field(default_factory=list)
    f_u: list[float] = field(default_factory=list)
    injections: list[int] = field(default_factory=list)
    stagnant: list[bool] = field(default_factory=list)
    z_f: float = math.inf

    @property
    def seed(self) -> int:
        return self.config.seed

    def __len__(self):
        return len(self.t)

    def record(self, t, ioi_c, f_u, injections, stagnant):
        self.t.append(t)
        self.ioi_c.append(ioi_c)
        self.f_u.append(f_u)
        self.injections.append(injections)
        self.stagnant.append(stagnant)

    @property
    def total_injections(self) -> int:
        return sum(self.injections)

    def rows(self):
        return zip(self.t, self.ioi_c, self.f_u, self.injections, self.stagnant)


def run(config: SimConfig) -> RunSeries:
    """Simulate ``config.n_steps`` years.

    Each step: the understanding regime evolves under the cap
    ``z_f * ioi_c`` (start-of-step ioi_c); if the cumulative fitness has grown
    by ``threshold_r`` since the last injection a new basic idea is injected;
    then the idea pool takes its combination step. With coupling disabled the
    two regimes evolve independently (no cap, no injection).
    """
    ss_fields, ss_pool = np.random.SeedSequence(config.seed).spawn(2)
    rng_u = np.random.default_rng(ss_fields)
    rng_p = np.random.default_rng(ss_pool)

    pool = ip.new_pool(config.n_basic_init, config.p_ioi, config.reuse_constraint,
                       config.pairing)
    state = us.init_fields(config.n_fields, rng_u)
    if config.z_f is not None:
        z_f = config.z_f
    else:
        z_f = config.z_f_factor * state.f_u / pool.ioi_c
        if not z_f > 0:
            z_f = math.inf
    state.z_f = z_f

    series = RunSeries(config=config, z_f=z_f)
    series.record(0, pool.ioi_c, state.f_u, 0, pool.saturated)
    baseline = state.f_u
    for t in range(1, config.n_steps + 1):
        cap = z_f * pool.ioi_c if config.coupling_enabled else math.inf
        us.evolve(state, cap, rng_u, config.replacement)
        f_u = state.f_u
        injected = 0
        if config.coupling_enabled and baseline > 0 and f_u / baseline >= config.threshold_r:
            ip.inject_basic(pool)
            baseline = f_u
            injected = 1
        if not pool.saturated:
            ip.step(pool, rng_p)
        series.record(t, pool.ioi_c, f_u, injected, pool.saturated)
    return series


def _fit_start(ioi_c) -> int:
    """Index of the last point of the leading constant prefix."""
    first = ioi_c[0]
    for i, v in enumerate(ioi_c):
        if v != first:
            return max(0, i - 1)
    return 0


def fit_run(series: RunSeries) -> FitResult:
    """Exponential fit of ioi_c(t), skipping any leading stagnant prefix."""
    s = _fit_start(series.ioi_c)
    if len(series.t) - s < 2:
        s = max(0, len(series.t) - 2)
    return fit_exponential(series.t[s:], series.ioi_c[s:])


@dataclass(frozen=True)
class ReplicateSummary:
    config: SimConfig
    seeds: tuple[int, ...]
    ks: tuple[float, ...]
    r2s: tuple[float, ...]

    @property
    def mean_k(self) -> float:
        return float(np.mean(self.ks))

    @property
    def two_sigma(self) -> float:
        if len(self.ks) < 2:
            return math.nan
        return 2.0 * float(np.std(self.ks, ddof=1))

    @property
    def mean_r2(self) -> float:
        return float(np.mean(self.r2s))


def _fit_seed(config: SimConfig) -> tuple[float, float]:
    f = fit_run(run(config))
    return f.slope, f.r_squared


def replicate(config: SimConfig, n_reps: int, seeds=None, workers: int = 1) -> ReplicateSummary:
    """Run ``n_reps`` seeds (``config.seed + i`` unless given) and summarise K.

    ``two_sigma`` uses the sample standard deviation; with a single
    repetition it is NaN and a warning is issued.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")
    if seeds is None:
        seeds = [config.seed + i for i in range(n_reps)]
    seeds = tuple(int(s) for s in seeds)
    if len(seeds) != n_reps:
        raise ValueError("len(seeds) must equal n_reps")
    if n_reps == 1:
        warnings.warn("a single repetition leaves the spread of K undefined",
                      RuntimeWarning, stacklevel=2)
    cfgs = [config.with_seed(s) for s in seeds]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            out = list(ex.map(_fit_seed, cfgs))
    else:
        out = [_fit_seed(c) for c in cfgs]
    return ReplicateSummary(config, seeds, tuple(k for k, _ in out), tuple(r for _, r in out))


def detect_stagnation(series, window: int = 5) -> list[tuple[int, int]]:
    """Maximal intervals ``(start, end)`` of constant ioi_c.

    An interval qualifies when ioi_c is unchanged over at least ``window``
    consecutive steps, i.e. ``end - start >= window``. Accepts a RunSeries or
    a plain sequence of counts (indexed from 0).
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if isinstance(series, RunSeries):
        t, y = series.t, series.ioi_c
    else:
        y = list(series)
        t = list(range(len(y)))
    episodes = []
    start = 0
    for i in range(1, len(y) + 1):
        if i == len(y) or y[i] != y[start]:
            if i - 1 - start >= window:
                episodes.append((t[start], t[i - 1]))
            start = i
    return episodes


def config_dict(config: SimConfig) -> dict:
    return asdict(config)
