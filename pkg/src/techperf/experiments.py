"""Named experiments, flat config files and CSV/JSON persistence.

Every writer emits a fixed column order, ``repr`` floats and sorted JSON keys
and no timestamps, so re-running a command with the same inputs reproduces
its files byte for byte.
"""
from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import json
import math
import typing
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import coupled
from . import domain
from .coupled import ReplicateSummary, RunSeries, SimConfig, fit_run, label
from .idea_pool import theoretical_rate
from .trend_fit import FitResult, fit_exponential

__all__ = [
    "SCHEMA_VERSION",
    "ExperimentSpec",
    "Table1Row",
    "SurfaceRow",
    "DomainRateRow",
    "DomainRateReport",
    "load_config",
    "parse_assignments",
    "write_series",
    "read_series_csv",
    "read_xy_csv",
    "cmd_table1",
    "cmd_plateau",
    "cmd_surface",
    "cmd_domain_rates",
    "cmd_run",
    "cmd_fit",
    "cmd_mcnerney",
    "TABLE1_COLUMNS",
    "SERIES_COLUMNS",
]

SCHEMA_VERSION = 1

SERIES_COLUMNS = ("t", "ioi_c", "f_u", "injections", "stagnant")
TABLE1_COLUMNS = ("run", "initial_ioi0", "threshold_r", "mean_k", "two_sigma",
                  "r_squared", "theoretical_k")
SURFACE_COLUMNS = ("n_basic", "threshold_r", "mean_k", "two_sigma", "r_squared")
DOMAIN_COLUMNS = ("name", "a_j", "d_j", "direction", "b", "k_j", "error")
MCNERNEY_COLUMNS = ("attempt", "cost", "accepted")


@dataclass(frozen=True)
class ExperimentSpec:
    """A grid of (initial basic ideas, threshold ratio) cells, each replicated
    ``n_reps`` times with seeds ``base_seed + cell_index * n_reps + rep``."""

    name: str = "table1"
    n_basic_grid: tuple[int, ...] = (5, 10, 20)
    threshold_grid: tuple[float, ...] = (1.5, 3.0, 5.0)
    p_ioi: float = 0.25
    n_fields: int = 10
    z_f: float | None = None
    z_f_factor: float = 3.0
    n_steps: int = 65
    n_reps: int = 7
    base_seed: int = 0
    output_dir: str = "out"
    pairing: str = "feasible"
    replacement: str = "both"

    def __post_init__(self):
        if not self.n_basic_grid or not self.threshold_grid:
            raise ValueError("grid must be non-empty")
        if self.n_reps < 1:
            raise ValueError("n_reps must be >= 1")
        # builds (and so validates) one config per cell
        for nb, r in self.cells():
            self.config(nb, r, self.base_seed)

    def cells(self) -> list[tuple[int, float]]:
        return [(int(nb), float(r)) for nb in self.n_basic_grid for r in self.threshold_grid]

    def seeds(self, cell_index: int) -> list[int]:
        return [self.base_seed + cell_index * self.n_reps + i for i in range(self.n_reps)]

    def config(self, n_basic: int, threshold_r: float, seed: int) -> SimConfig:
        return SimConfig(n_basic_init=n_basic, p_ioi=self.p_ioi, threshold_r=threshold_r,
                         n_fields=self.n_fields, z_f=self.z_f, z_f_factor=self.z_f_factor,
                         n_steps=self.n_steps, seed=seed, pairing=self.pairing,
                         replacement=self.replacement)


# ---------------------------------------------------------------- config io

def _convert(raw: str, hint):
    """Parse one config value according to a dataclass field annotation."""
    raw = raw.strip()
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)
    if origin is tuple:
        return tuple(_convert(x, args[0]) for x in raw.split(",") if x.strip())
    if origin is typing.Union or (args and type(None) in args):
        if raw.lower() in ("none", ""):
            return None
        return _convert(raw, next(a for a in args if a is not type(None)))
    if hint is bool:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if hint is int:
        return int(raw)
    if hint is float:
        return float(raw)
    return raw


def _apply(cls, values: dict[str, str], base=None):
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, raw in values.items():
        if key not in names:
            raise KeyError(f"unknown key {key!r} for {cls.__name__}; expected one of {sorted(names)}")
        try:
            kwargs[key] = _convert(raw, hints[key])
        except ValueError as exc:
            raise ValueError(f"bad value for {key!r}: {exc}") from None
    if base is not None:
        return dataclasses.replace(base, **kwargs)
    return cls(**kwargs)


def _read_flat(path) -> dict[str, str]:
    """Read ``key = value`` lines (``#`` comments allowed, no sections)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read_string("[top]\n" + text, source=str(path))
    out = dict(parser["top"])
    bad = [k for k in out if k != k.lower()]
    if bad:
        raise KeyError(f"config keys must be lowercase snake case: {bad}")
    return out


def load_config(path, cls=SimConfig, base=None):
    """Build a ``SimConfig`` or ``ExperimentSpec`` from a flat config file."""
    return _apply(cls, _read_flat(path), base)


def parse_assignments(items, cls=SimConfig, base=None):
    """Apply ``key=value`` strings (command-line overrides) to ``base``."""
    values = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {item!r}")
        values[key.strip()] = val
    if base is None and not values:
        return cls()
    return _apply(cls, values, base)


# ------------------------------------------------------------------ writers

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _write_csv(path: Path, columns, rows) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return _write_text(path, buf.getvalue())


def _write_text(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _write_json(path: Path, payload: dict) -> Path:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    return _write_text(path, json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def write_series(series: RunSeries, path) -> Path:
    """Write a run as CSV plus a ``.json`` sidecar echoing config and fit."""
    path = Path(path)
    _write_csv(path, SERIES_COLUMNS, series.rows())
    fit = fit_run(series)
    _write_json(path.with_suffix(".json"), {
        "kind": "run_series",
        "seed": series.seed,
        "config": dataclasses.asdict(series.config),
        "z_f_effective": series.z_f,
        "fit": dataclasses.asdict(fit),
        "stagnation_episodes": coupled.detect_stagnation(series),
    })
    return path


def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        return [], []
    return [c.strip() for c in rows[0]], rows[1:]


def read_series_csv(path) -> dict[str, list]:
    header, rows = _read_rows(path)
    missing = [c for c in SERIES_COLUMNS if c not in header]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    idx = {c: header.index(c) for c in SERIES_COLUMNS}
    conv = {"t": int, "ioi_c": int, "f_u": float, "injections": int,
            "stagnant": lambda s: s.strip() == "1"}
    return {c: [conv[c](r[idx[c]]) for r in rows] for c in SERIES_COLUMNS}


def read_xy_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Two numeric columns from a CSV with a header row.

    A RunSeries file is recognised by its ``t`` and ``ioi_c`` columns;
    otherwise the first two columns are used.
    """
    header, rows = _read_rows(path)
    if len(header) < 2:
        raise ValueError(f"{path}: need a header and at least two columns")
    if "t" in header and "ioi_c" in header:
        ix, iy = header.index("t"), header.index("ioi_c")
    else:
        ix, iy = 0, 1
    try:
        x = np.array([float(r[ix]) for r in rows])
        y = np.array([float(r[iy]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: malformed row ({exc})") from None
    return x, y


# ----------------------------------------------------------------- commands

def _run_cell(cfg: SimConfig) -> RunSeries:
    return coupled.run(cfg)


def _run_many(cfgs, workers: int) -> list[RunSeries]:
    if workers > 1 and len(cfgs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_run_cell, cfgs))
    return [coupled.run(c) for c in cfgs]


def _summarise(cfg: SimConfig, seeds, runs) -> ReplicateSummary:
    fits = [fit_run(s) for s in runs]
    return ReplicateSummary(cfg, tuple(seeds), tuple(f.slope for f in fits),
                            tuple(f.r_squared for f in fits))


def _warn_single(n_reps: int):
    if n_reps == 1:
        warnings.warn("n_reps=1: the spread (2 sigma) of K is undefined and reported empty",
                      RuntimeWarning, stacklevel=3)


@dataclass(frozen=True)
class Table1Row:
    run: str
    initial_ioi0: int
    threshold_r: float
    mean_k: float
    two_sigma: float
    r_squared: float
    theoretical_k: float
    ks: tuple[float, ...] = field(default=(), repr=False)
    stagnation_counts: tuple[int, ...] = field(default=(), repr=False)

    def values(self):
        two_sigma = None if math.isnan(self.two_sigma) else self.two_sigma
        return (self.run, self.initial_ioi0, self.threshold_r, self.mean_k, two_sigma,
                self.r_squared, self.theoretical_k)


def _grid(spec: ExperimentSpec, out: Path | None, workers: int, subdir: str):
    """Run every cell; optionally persist per-run files and per-cell summaries."""
    _warn_single(spec.n_reps)
    results = []
    for ci, (nb, r) in enumerate(spec.cells()):
        seeds = spec.seeds(ci)
        base = spec.config(nb, r, seeds[0])
        runs = _run_many([base.with_seed(s) for s in seeds], workers)
        summ = _summarise(base, seeds, runs)
        stag = tuple(len(coupled.detect_stagnation(s)) for s in runs)
        if out is not None:
            cell_dir = out / subdir / label(nb, r)
            for s in runs:
                write_series(s, cell_dir / f"seed_{s.seed}.csv")
            _write_json(cell_dir / "summary.json", {
                "kind": "replicate_summary",
                "run": label(nb, r),
                "config": dataclasses.asdict(base),
                "seeds": list(seeds),
                "k": list(summ.ks),
                "r_squared": list(summ.r2s),
                "mean_k": summ.mean_k,
                "two_sigma": summ.two_sigma,
                "mean_r_squared": summ.mean_r2,
                "stagnation_episodes": list(stag),
            })
        results.append((nb, r, summ, stag))
    return results


def cmd_table1(spec: ExperimentSpec | None = None, out=None, workers: int = 1) -> list[Table1Row]:
    """Replicate the growth-rate grid and write ``table1.csv`` under ``out``.

    Each row reports the mean fitted K over the cell's seeds, twice the sample
    standard deviation, the mean R² and the unconstrained reference rate.
    """
    spec = spec or ExperimentSpec()
    out = Path(out if out is not None else spec.output_dir)
    theo = theoretical_rate(spec.p_ioi)
    rows = []
    for nb, r, summ, stag in _grid(spec, out, workers, "runs"):
        rows.append(Table1Row(label(nb, r), nb, r, summ.mean_k, summ.two_sigma,
                              summ.mean_r2, theo, summ.ks, stag))
    _write_csv(out / "table1.csv", TABLE1_COLUMNS, (row.values() for row in rows))
    _write_json(out / "manifest.json", {
        "kind": "table1",
        "spec": dataclasses.asdict(spec) | {"output_dir": None},
        "columns": list(TABLE1_COLUMNS),
        "files": ["table1.csv"] + [f"runs/{row.run}/summary.json" for row in rows],
    })
    return rows


@dataclass(frozen=True)
class SurfaceRow:
    n_basic: int
    threshold_r: float
    mean_k: float
    two_sigma: float
    r_squared: float

    def values(self):
        two_sigma = None if math.isnan(self.two_sigma) else self.two_sigma
        return (self.n_basic, self.threshold_r, self.mean_k, two_sigma, self.r_squared)


def cmd_surface(spec: ExperimentSpec, out=None, workers: int = 1) -> list[SurfaceRow]:
    """Mean K on the (n_basic, threshold_r) grid, one CSV row per cell."""
    out = Path(out if out is not None else spec.output_dir)
    rows = [SurfaceRow(nb, r, s.mean_k, s.two_sigma, s.mean_r2)
            for nb, r, s, _ in _grid(spec, None, workers, "")]
    _write_csv(out / "surface.csv", SURFACE_COLUMNS, (row.values() for row in rows))
    _write_json(out / "surface.json", {
        "kind": "surface",
        "spec": dataclasses.asdict(spec) | {"output_dir": None},
        "columns": list(SURFACE_COLUMNS),
    })
    return rows


def cmd_plateau(n_basic: int = 10, p_ioi: float = 0.25, n_steps: int = 400, seed: int = 0,
                out=None) -> RunSeries:
    """Uncoupled, constrained pool: it saturates at ``2**n_basic - 1``."""
    cfg = SimConfig(n_basic_init=n_basic, p_ioi=p_ioi, n_steps=n_steps, seed=seed,
                    reuse_constraint=True, coupling_enabled=False)
    series = coupled.run(cfg)
    if out is not None:
        write_series(series, Path(out) / f"plateau_{n_basic}B.csv")
    return series


def cmd_run(config: SimConfig, out=None) -> tuple[RunSeries, FitResult]:
    series = coupled.run(config)
    if out is not None:
        write_series(series, Path(out) / f"run_{label(config.n_basic_init, config.threshold_r)}"
                                         f"_seed_{config.seed}.csv")
    return series, fit_run(series)


def cmd_fit(path) -> FitResult:
    """Exponential fit of a RunSeries CSV or an external (t, value) CSV."""
    x, y = read_xy_csv(path)
    return fit_exponential(x, y)


@dataclass(frozen=True)
class DomainRateRow:
    name: str
    a_j: float | None
    d_j: float | None
    direction: int | None
    b: float | None
    k_j: float | None
    error: str = ""

    def values(self):
        return (self.name, self.a_j, self.d_j, self.direction, self.b, self.k_j, self.error)


@dataclass(frozen=True)
class DomainRateReport:
    k: float
    rows: tuple[DomainRateRow, ...]

    @property
    def valid(self) -> list[DomainRateRow]:
        return [r for r in self.rows if not r.error]

    @property
    def errors(self) -> list[DomainRateRow]:
        return [r for r in self.rows if r.error]

    @property
    def ratio(self) -> float | None:
        """max K_J / min K_J over valid rows; None if undefined."""
        ks = [r.k_j for r in self.valid]
        if not ks or min(ks) <= 0:
            return None
        return max(ks) / min(ks)


def _num(raw: str | None, conv, default=None):
    if raw is None or raw.strip() == "":
        if default is None:
            raise ValueError("missing value")
        return default
    return conv(raw)


def _direction(raw: str) -> int:
    v = float(raw)
    if v not in (1.0, -1.0):
        raise ValueError(f"direction must be +1 or -1, got {raw}")
    return int(v)


def cmd_domain_rates(k: float, path, out=None) -> DomainRateReport:
    """K_J for every row of a domain CSV (``name, a_j, d_j, direction[, b]``).

    Rows that fail to parse or give a negative rate are kept in the report
    with an error message; the rest of the file is still processed.
    """
    if not k >= 0:
        raise ValueError(f"k must be non-negative, got {k}")
    header, raw_rows = _read_rows(path)
    rows = []
    if header:
        need = ("a_j", "d_j", "direction")
        missing = [c for c in need if c not in header]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        col = {c: i for i, c in enumerate(header)}

        def get(r, c):
            i = col.get(c)
            return r[i] if i is not None and i < len(r) else None

        for n, r in enumerate(raw_rows, start=1):
            name = (get(r, "name") or f"row{n}").strip()
            a = d = direction = b = None
            try:
                a = _num(get(r, "a_j"), float)
                d = _num(get(r, "d_j"), float)
                direction = _num(get(r, "direction"), _direction)
                b = _num(get(r, "b"), float, 1.0)
                params = domain.DomainParams(d_j=d, a_j=a, b=b, direction=direction, name=name)
                rows.append(DomainRateRow(name, a, d, direction, b, domain.domain_rate(params, k)))
            except ValueError as exc:
                rows.append(DomainRateRow(name, a, d, direction, b, None, str(exc)))
    report = DomainRateReport(float(k), tuple(rows))
    if out is not None:
        out = Path(out)
        _write_csv(out / "domain_rates.csv", DOMAIN_COLUMNS, (r.values() for r in rows))
        _write_json(out / "domain_rates.json", {
            "kind": "domain_rates", "k": float(k), "ratio": report.ratio,
            "n_valid": len(report.valid), "n_errors": len(report.errors),
        })
    return report


def cmd_mcnerney(n_components: int = 100, d: int = 1, attempts: int = 100_000, seed: int = 0,
                 out=None) -> tuple[domain.McNerneyRun, float]:
    """Cost-improvement run on a random regular graph; returns run and exponent."""
    rng = np.random.default_rng(seed)
    graph = domain.regular_graph(n_components, d, rng)
    result = domain.mcnerney_simulate(graph, attempts, rng)
    expo = domain.cost_exponent(result)
    if out is not None:
        out = Path(out)
        stem = f"mcnerney_d{d}_seed_{seed}"
        _write_csv(out / f"{stem}.csv", MCNERNEY_COLUMNS,
                   zip(result.attempt.tolist(), result.cost.tolist(), result.accepted.tolist()))
        _write_json(out / f"{stem}.json", {
            "kind": "mcnerney", "n_components": n_components, "d": d,
            "attempts": attempts, "seed": seed, "exponent": expo,
            "expected_exponent": -1.0 / d,
        })
    return result, expo
