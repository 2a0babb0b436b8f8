"""End-to-end acceptance criteria, one test per criterion.

Each test records a one-line verdict (printed in the terminal summary) and
then asserts it, so a failing criterion is reported rather than hidden.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy import integrate

from stratdisc.discrepancy import l2_squared
from stratdisc.experiments import MomentSpec, bound, estimate_moment, fit_rate, random_l2_expectation
from stratdisc.hilbert import HilbertParams, hilbert_cells, hilbert_index
from stratdisc.rkhs import get_integrand, worst_case_error_identity
from stratdisc.sampling import make_sampler


def verdict(log, k, checks, detail, t0, limit):
    elapsed = time.perf_counter() - t0
    ok = all(checks) and elapsed < limit
    log[k] = (ok, f"{detail}; {elapsed:.1f}s (limit {limit:g}s)")
    assert all(checks), detail
    assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"


def moment(strategy, d, n, reps, seed, **kw):
    return estimate_moment(MomentSpec(make_sampler(strategy, d, n), reps=reps, seed=seed, **kw))


# ---- oracles -------------------------------------------------------------

def l2_squared_piecewise_1d(x):
    x = np.sort(np.ravel(x))
    edges = np.concatenate([[0.0], x, [1.0]])
    n = len(x)
    return sum(((edges[k + 1] - k / n) ** 3 - (edges[k] - k / n) ** 3) / 3 for k in range(n + 1))


def l2_squared_midpoint_2d(x, cells=1000):
    n = len(x)
    mid = (np.arange(cells) + 0.5) / cells
    hist = np.zeros((cells + 1, cells + 1))
    np.add.at(hist, (np.searchsorted(mid, x[:, 0], "right"), np.searchsorted(mid, x[:, 1], "right")), 1)
    count = hist.cumsum(0).cumsum(1)[:cells, :cells]
    return float(np.mean((count / n - np.multiply.outer(mid, mid)) ** 2))


def indicator_variance_integral(d):
    """int lambda([0,z)) (1 - lambda([0,z))) dz over [0,1]^d by adaptive quadrature."""
    f = lambda *z: math.prod(z) * (1 - math.prod(z))
    return integrate.nquad(f, [(0, 1)] * d, opts={"epsabs": 1e-12, "epsrel": 1e-12})[0]


# ---- criteria ------------------------------------------------------------

def test_c01_exact_l2_oracles(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    sets_1d = [np.array([0.5]), np.array([0.0]), rng.random(7), rng.random(40)]
    err_1d = max(abs(float(l2_squared(x[:, None])) - l2_squared_piecewise_1d(x)) for x in sets_1d)
    half = float(l2_squared(np.array([[0.5]])))
    sets_2d = [np.array([[0.5, 0.5]]), rng.random((10, 2)), rng.random((64, 2))]
    err_2d = max(abs(float(l2_squared(x)) - l2_squared_midpoint_2d(x)) for x in sets_2d)
    verdict(acceptance, 1, [err_1d <= 1e-12, abs(half - 1 / 12) <= 1e-12, err_2d <= 1e-3],
            f"1-d max err {err_1d:.1e}, {{0.5}} -> {half:.15f}, 2-d midpoint max err {err_2d:.1e}",
            t0, 1.0)


def test_c02_simple_random_expectation(acceptance):
    t0 = time.perf_counter()
    checks, worst = [], 0.0
    for d in (1, 2, 3):
        oracle = indicator_variance_integral(d)
        checks.append(abs(oracle - (2.0**-d - 3.0**-d)) <= 1e-10)
        for n in (4, 16):
            rep = moment("simple_random", d, n, 10**5, seed=200 + 10 * d + n)
            z = abs(rep.estimate - oracle / n) / rep.stderr
            worst = max(worst, z)
            checks.append(z <= 3 and rep.exact == pytest.approx(oracle / n, rel=1e-9))
    verdict(acceptance, 2, checks, f"worst |estimate - exact| = {worst:.2f} stderr", t0, 120)


def test_c03_grid_bound(acceptance):
    t0 = time.perf_counter()
    checks, ratios = [], []
    for n in (16, 64, 256):
        rep = moment("jittered", 2, n, 10**4, seed=300 + n)
        checks.append(rep.estimate + 3 * rep.stderr <= rep.bound and rep.bound_id == "grid_mse")
        ratios.append(f"N={n}: {(rep.estimate + 3 * rep.stderr) / rep.bound:.3f}")
    verdict(acceptance, 3, checks, "(est+3se)/bound " + ", ".join(ratios), t0, 120)


def test_c04_hsfc_bound(acceptance):
    t0 = time.perf_counter()
    checks, ratios = [], []
    for n in (16, 64, 256):
        rep = moment("hsfc", 2, n, 10**4, seed=400 + n)
        checks.append(rep.estimate + 3 * rep.stderr <= rep.bound and rep.bound_id == "hsfc_mse")
        ratios.append(f"N={n}: {(rep.estimate + 3 * rep.stderr) / rep.bound:.3f}")
    verdict(acceptance, 4, checks, "(est+3se)/bound " + ", ".join(ratios), t0, 300)


def test_c05_rate_improvement(acceptance):
    t0 = time.perf_counter()
    ns = (16, 64, 256, 1024)
    slopes = {}
    for strategy in ("jittered", "simple_random"):
        pairs = [(n, moment(strategy, 2, n, 2000, seed=500 + n).estimate) for n in ns]
        slopes[strategy] = fit_rate(pairs).slope
    checks = [-1.7 <= slopes["jittered"] <= -1.3, -1.15 <= slopes["simple_random"] <= -0.85]
    verdict(acceptance, 5, checks,
            f"slopes jittered {slopes['jittered']:.3f}, simple_random {slopes['simple_random']:.3f}",
            t0, 600)


def test_c06_worst_case_identity(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(606)
    worst = 0.0
    for trial in range(100):
        d = 1 + trial % 3
        n = int(rng.integers(1, 65))
        err, l2 = worst_case_error_identity(rng.random((n, d)))
        worst = max(worst, abs(err - l2) / l2)
    verdict(acceptance, 6, [worst <= 1e-9], f"max relative gap {worst:.1e} over 100 sets", t0, 10)


def test_c07_lhs_variance(acceptance):
    t0 = time.perf_counter()
    C = get_integrand("f1", 2).variance
    checks, ratios = [abs(C - 7 / 144) <= 1e-15], []
    for n in (8, 32):
        rep = moment("lhs", 2, n, 10**4, seed=700 + n, target="variance_of_mean", integrand="f1")
        checks.append(rep.estimate - 3 * rep.stderr <= C / (n - 1) and rep.bound == C / (n - 1))
        ratios.append(f"N={n}: est/bound {rep.estimate / rep.bound:.3f}")
    verdict(acceptance, 7, checks, ", ".join(ratios), t0, 60)


def test_c08_grid_p_moments(acceptance):
    t0 = time.perf_counter()
    checks, ratios = [], []
    for p in (1, 3):
        for n in (16, 64):
            rep = moment("jittered", 2, n, 5000, seed=800 + 10 * p + n, p=p,
                         target="lp_discrepancy_pth_power", nodes=10**4)
            ok = rep.bound_id == "grid_lp" and rep.bound == bound("grid_lp", 2, n, p)
            checks.append(ok and rep.estimate + 3 * rep.stderr <= rep.bound)
            ratios.append(f"p={p},N={n}: {(rep.estimate + 3 * rep.stderr) / rep.bound:.3f}")
    verdict(acceptance, 8, checks, "(est+3se)/bound " + ", ".join(ratios), t0, 600)


def test_c09_random_p_moment_rate(acceptance):
    t0 = time.perf_counter()
    ns = (16, 64, 256, 1024)
    checks, pairs, ratios = [], [], []
    for n in ns:
        rep = moment("simple_random", 2, n, 2000, seed=900 + n, p=2,
                     target="lp_discrepancy_pth_power")
        limit = bound("random_lp", 2, n, p=2)
        checks.append(rep.bound_id == "random_lp" and abs(limit - 1 / (4 * n)) <= 1e-15)
        checks.append(rep.estimate <= limit)
        pairs.append((n, rep.estimate))
        ratios.append(f"{rep.estimate / limit:.3f}")
    slope = fit_rate(pairs).slope
    checks.append(-1.15 <= slope <= -0.85)
    verdict(acceptance, 9, checks, f"est/bound {', '.join(ratios)}; slope {slope:.3f}", t0, 300)


def test_c10_hilbert_suite(acceptance):
    t0 = time.perf_counter()
    checks, worst = [], 0.0
    for d in range(2, 17):
        for K in range(1, 16 // d + 1):
            params = HilbertParams(d, K)
            h = np.arange(params.n_cells)
            cells = hilbert_cells(params, h)
            flat = np.ravel_multi_index(cells.T, (params.side,) * d)
            checks.append(np.array_equal(np.sort(flat), h))
            checks.append(bool(np.all(np.abs(np.diff(cells, axis=0)).sum(axis=1) == 1)))
            checks.append(np.array_equal(hilbert_index(params, cells), h))
            for s in range(params.bits + 1):
                blocks = cells.reshape(-1, 2**s, d)
                span = (blocks.max(axis=1) + 1 - blocks.min(axis=1)).astype(np.float64)
                diam = np.sqrt(np.sum(span**2, axis=1)) / params.side
                limit = 2 * math.sqrt(d + 3) * (2.0**s / params.n_cells) ** (1 / d)
                worst = max(worst, float(diam.max() / limit))
    checks.append(worst <= 1 + 1e-12)
    verdict(acceptance, 10, checks,
            f"bijection, adjacency, inverse for all dK <= 16; max diameter/limit {worst:.3f}",
            t0, 30)


CLI_COMMANDS = [
    ["sample", "--strategy", "hsfc", "--d", "3", "--n", "64", "--seed", "5"],
    ["expected", "--strategy", "jittered", "--d", "2", "--n", "64", "--reps", "2000", "--seed", "11"],
    ["expected", "--strategy", "lhs", "--d", "2", "--n", "16", "--target", "variance_of_mean",
     "--integrand", "f1", "--reps", "3000", "--seed", "12"],
    ["expected", "--strategy", "simple_random", "--d", "2", "--n", "16", "--p", "3",
     "--target", "lp_discrepancy_pth_power", "--reps", "200", "--nodes", "2000", "--seed", "13"],
    ["rate", "--strategy", "hsfc", "--d", "2", "--n", "16,64,256", "--reps", "300", "--seed", "14"],
    ["bounds", "--theorem", "cor4.5", "--d", "2", "--n", "64", "--p", "3"],
]


def test_c11_cli_determinism(acceptance, tmp_path):
    t0 = time.perf_counter()
    pts = tmp_path / "pts.txt"
    subprocess.run([sys.executable, "-m", "stratdisc", "sample", "--strategy", "lhs", "--d", "2",
                    "--n", "40", "--seed", "3", "--out", str(pts)], check=True)
    commands = CLI_COMMANDS + [["discrepancy", "--in", str(pts), "--p", p, "--seed", "4"]
                               for p in ("2", "1.5", "star")]
    checks = []
    for cmd in commands:
        outs = []
        for threads in ("1", "8"):
            extra = ["--threads", threads] if cmd[0] in ("expected", "rate") else []
            proc = subprocess.run([sys.executable, "-m", "stratdisc", *cmd, *extra],
                                  capture_output=True)
            checks.append(proc.returncode == 0)
            outs.append(proc.stdout)
        checks.append(outs[0] == outs[1] and len(outs[0]) > 0)
    verdict(acceptance, 11, checks, f"{len(commands)} commands byte-identical at 1 and 8 threads",
            t0, 600)
