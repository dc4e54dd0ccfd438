"""End-to-end acceptance checks. Each test appends one PASS/FAIL line that is
printed in the terminal summary (and to stdout)."""
import math
import time

import numpy as np
import pytest

from techperf import coupled as cs
from techperf import domain as dm
from techperf import experiments as ex
from techperf.idea_pool import theoretical_rate
from techperf.trend_fit import fit_exponential, fit_wright

BANDS = {
    "5B1.5R": (0.123, 0.011), "5B3R": (0.055, 0.019), "5B5R": (0.039, 0.007),
    "10B1.5R": (0.122, 0.011), "10B3R": (0.115, 0.007), "10B5R": (0.117, 0.007),
    "20B1.5R": (0.116, 0.007), "20B3R": (0.116, 0.009), "20B5R": (0.119, 0.016),
}


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    # load compiled kernels once so timings measure simulation work only
    cs.run(cs.SimConfig(n_basic_init=5, n_steps=20))


def report(log, number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} {title}: {detail}"
    log.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def table1(tmp_path_factory):
    out = tmp_path_factory.mktemp("table1")
    t0 = time.perf_counter()
    rows = ex.cmd_table1(ex.ExperimentSpec(), out)
    return {r.run: r for r in rows}, time.perf_counter() - t0


def test_criterion_1_closed_form_rate(acceptance_log):
    t0 = time.perf_counter()
    ks = []
    for seed in range(20):
        cfg = cs.SimConfig(n_basic_init=10, p_ioi=0.25, n_steps=50, seed=seed,
                           reuse_constraint=False, coupling_enabled=False)
        ks.append(cs.fit_run(cs.run(cfg)).slope)
    elapsed = time.perf_counter() - t0
    mean_k = float(np.mean(ks))
    ok = abs(mean_k - 0.118) <= 0.01 and elapsed < 1.0
    report(acceptance_log, 1, "closed-form rate", ok,
           f"mean K={mean_k:.4f} (0.118+-0.01, ln(1+p/2)={theoretical_rate(0.25):.4f}), "
           f"{elapsed:.2f}s (<1s)")
    assert abs(mean_k - 0.118) <= 0.01
    assert elapsed < 1.0


def test_criterion_2_plateau(acceptance_log):
    t0 = time.perf_counter()
    finals = {n: ex.cmd_plateau(n, 0.25, 400, 0).ioi_c[-1] for n in (5, 10)}
    elapsed = time.perf_counter() - t0
    ok = finals == {5: 31, 10: 1023} and elapsed < 1.0
    report(acceptance_log, 2, "plateau", ok,
           f"final ioi_c n=5 -> {finals[5]} (31), n=10 -> {finals[10]} (1023), "
           f"{elapsed:.2f}s (<1s)")
    assert finals == {5: 31, 10: 1023}
    assert elapsed < 1.0


def test_criterion_3_table1_bands(table1, acceptance_log):
    rows, elapsed = table1
    misses = []
    for name, (k, band) in BANDS.items():
        if abs(rows[name].mean_k - k) > band:
            misses.append(f"{name}={rows[name].mean_k:.4f} vs {k}+-{band}")
    order = rows["5B5R"].mean_k < rows["5B3R"].mean_k < rows["5B1.5R"].mean_k
    ok = len(misses) <= 2 and order and elapsed < 30.0
    report(acceptance_log, 3, "growth-rate grid bands", ok,
           f"{9 - len(misses)}/9 bands hit (>=7 needed), ordering 5B5R<5B3R<5B1.5R "
           f"{'holds' if order else 'BROKEN'}, {elapsed:.1f}s (<30s)"
           + (f"; outside band: {', '.join(misses)}" if misses else ""))
    for name, row in rows.items():
        acceptance_log.append(f"       {name:8s} K={row.mean_k:.4f} 2s={row.two_sigma:.4f} "
                              f"R2={row.r_squared:.3f}  band {BANDS[name][0]}+-{BANDS[name][1]}")
    assert len(misses) <= 2, misses
    assert order
    assert elapsed < 30.0


def test_criterion_4_stagnation_structure(table1, acceptance_log):
    rows, _ = table1
    multi = {name: sum(c >= 2 for c in rows[name].stagnation_counts)
             for name in ("5B3R", "5B5R")}
    smooth = sum(rows["20B1.5R"].stagnation_counts)
    ok = all(v >= 5 for v in multi.values()) and smooth == 0
    report(acceptance_log, 4, "stagnation structure", ok,
           f"seeds with >=2 episodes: 5B3R {multi['5B3R']}/7, 5B5R {multi['5B5R']}/7 (>=5); "
           f"20B1.5R episodes {smooth} (0)")
    assert all(v >= 5 for v in multi.values()), multi
    assert smooth == 0


def test_criterion_5_interaction_law(acceptance_log):
    t0 = time.perf_counter()
    errs = []
    for d in range(1, 7):
        p = dm.DomainParams(d_j=d)
        slope = dm.log_log_slope(lambda x: dm.ioi_sc_analytic(x, p), 1e6)
        errs.append(abs(slope * d - 1.0))
    _, expo = ex.cmd_mcnerney(n_components=100, d=1, attempts=200_000, seed=0)
    elapsed = time.perf_counter() - t0
    ok = max(errs) < 0.01 and abs(expo + 1.0) <= 0.15 and elapsed < 10.0
    report(acceptance_log, 5, "interaction law", ok,
           f"max rel. error of slope vs 1/d = {max(errs):.1e} (<1%), "
           f"MC d=1 exponent {expo:.3f} (-1+-15%), {elapsed:.2f}s (<10s)")
    assert max(errs) < 0.01
    assert abs(expo + 1.0) <= 0.15
    assert elapsed < 10.0


def test_criterion_6_chain_composition(acceptance_log):
    series = cs.run(cs.SimConfig(n_basic_init=20, threshold_r=1.5, seed=0))
    t = np.array(series.t, dtype=float)
    ioi_c = np.array(series.ioi_c, dtype=float)
    k_fit = fit_exponential(t, ioi_c).slope
    worst = 0.0
    parts = []
    for a, d, direction in ((1, 1, 1), (3, 2, 1), (-3, 1, -1)):
        params = dm.DomainParams(d_j=d, a_j=a, direction=direction)
        k_j = fit_exponential(t, dm.performance_chain(ioi_c, params)).slope
        expected = direction * a / d * k_fit
        rel = abs(k_j / expected - 1.0)
        worst = max(worst, rel)
        parts.append(f"(A={a},d={d}) {k_j:.4f} vs {expected:.4f}")
    ok = worst <= 0.05
    report(acceptance_log, 6, "chain composition", ok,
           f"K_fit={k_fit:.4f}; " + "; ".join(parts) + f"; worst rel. error {worst:.2%} (<=5%)")
    assert worst <= 0.05


def test_criterion_7_fit_round_trips(acceptance_log):
    t = np.arange(-5.0, 40.0)
    exp_fit = fit_exponential(t, 7.0 * np.exp(0.118 * t))
    p = np.geomspace(1.0, 1e6, 30)
    w_fit = fit_wright(p, 100.0 * p ** -0.3)
    errs = [abs(exp_fit.slope / 0.118 - 1), abs(math.exp(exp_fit.intercept) / 7 - 1),
            abs(w_fit.w / 0.3 - 1), abs(w_fit.c0 / 100 - 1)]
    shifted = fit_exponential(t + 123.0, 7.0 * np.exp(0.118 * t))
    scaled = fit_exponential(t, 5.0 * 7.0 * np.exp(0.118 * t))
    shift_ok = abs(shifted.slope - exp_fit.slope) <= 1e-12
    scale_ok = (abs(scaled.slope - exp_fit.slope) <= 1e-12
                and abs(scaled.intercept - exp_fit.intercept - math.log(5.0)) <= 1e-12)
    ok = max(errs) <= 1e-12 and shift_ok and scale_ok
    report(acceptance_log, 7, "fit round trips", ok,
           f"max rel. error {max(errs):.1e} (<=1e-12), shift invariance "
           f"{'ok' if shift_ok else 'broken'}, scale equivariance {'ok' if scale_ok else 'broken'}")
    assert max(errs) <= 1e-12
    assert shift_ok and scale_ok


def _tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


def test_criterion_8_determinism(tmp_path, acceptance_log):
    dom = tmp_path / "domains.csv"
    dom.write_text("name,a_j,d_j,direction\nengine,1,1,1\nic,-3,1,-1\nbad,3,1,-1\n")
    small = ex.ExperimentSpec(n_basic_grid=(5, 10), threshold_grid=(1.5, 5.0), n_reps=3)
    commands = {
        "table1": lambda out: ex.cmd_table1(small, out),
        "surface": lambda out: ex.cmd_surface(small, out),
        "plateau": lambda out: ex.cmd_plateau(10, 0.25, 400, 3, out),
        "run": lambda out: ex.cmd_run(cs.SimConfig(n_basic_init=20, threshold_r=3.0, seed=9), out),
        "domain-rates": lambda out: ex.cmd_domain_rates(0.118, dom, out),
        "mcnerney": lambda out: ex.cmd_mcnerney(50, 2, 20_000, 4, out),
    }
    differing = []
    n_files = 0
    for name, cmd in commands.items():
        a, b = tmp_path / name / "a", tmp_path / name / "b"
        cmd(a)
        cmd(b)
        ta, tb = _tree(a), _tree(b)
        n_files += len(ta)
        if not ta or ta != tb:
            differing.append(name)
    ok = not differing
    report(acceptance_log, 8, "determinism", ok,
           f"{len(commands)} commands, {n_files} files byte-identical on re-run"
           if ok else f"differing output: {differing}")
    assert not differing
