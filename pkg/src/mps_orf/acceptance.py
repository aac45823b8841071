"""Acceptance suite: thirteen numbered checks, each returning a Result.

Scenario runs are cached per process so criteria that read the same
built-in scenario share one pipeline run.
"""

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
import json
import math
import os
import tempfile
import time

import numpy as np

from .runner import emit_outputs, run_scenario
from .scenarios import builtin, scenario_from_dict
from .schur import SchurParams
from .wall import circle_determinant_residual, two_path_residual, wall_eval

CYCLE = {"kind": "explicit", "points": [[0.0, 0.0], [0.3, 0.0], [0.0, 0.5], [-0.4, 0.0]], "cycle": True}
HALF_Z = {"kind": "scaled_identity", "lambda": [0.5, 0.0]}
BUILTIN_RUNS = ("lebesgue", "half-z-classical", "half-z-radial", "atom-plus-smooth", "inner-stress")
RANDOM_SEED = 20261018


@dataclass
class Result:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def load_reference():
    """Pinned values from the high-resolution reference run."""
    text = resources.files("mps_orf").joinpath("fixtures/reference.json").read_text()
    return json.loads(text)


def regime_scenario(regime, n_max=13):
    """f(z) = z/2 at M = 4096 with classical or cycling points."""
    alphas = {"kind": "classical"} if regime == "classical" else CYCLE
    return scenario_from_dict({
        "id": f"half-z-{regime}-gs", "function": HALF_Z, "alphas": alphas, "M": 4096,
        "n_max": n_max, "diagnostics": {"gram_schmidt_max": n_max},
    })


@lru_cache(maxsize=None)
def report(name):
    if name in ("classical-gs", "cycle-gs"):
        return run_scenario(regime_scenario(name.split("-")[0]))
    return run_scenario(builtin(name))


def _resid(rep, key, n_max=None):
    vals = [v for n, v in rep.residual_maxima[key] if n_max is None or n <= n_max]
    return max((math.inf if v is None else v) for v in vals)


def _series(rep, key):
    return rep.series_values(key)


def _fmt(x):
    return f"{x:.3e}"


def c01_geronimus():
    worst = {r: _resid(report(f"{r}-gs"), "geronimus", 12) for r in ("classical", "cycle")}
    ok = all(v < 1e-7 for v in worst.values())
    return ok, ", ".join(f"{k} {_fmt(v)}" for k, v in worst.items()) + " (< 1e-7)"


def _random_wall_cases(rng, count=24, n_max=30):
    t = np.exp(2j * np.pi * (np.arange(512) + 0.5) / 512)
    for _ in range(count):
        n = int(rng.integers(1, n_max + 1))
        g = 0.9 * np.sqrt(rng.random(n + 1)) * np.exp(2j * np.pi * rng.random(n + 1))
        a = 0.95 * np.sqrt(rng.random(n + 2)) * np.exp(2j * np.pi * rng.random(n + 2))
        a[0] = 0.0
        yield SchurParams.from_gammas(g), a, n, t


def c02_determinant():
    rng = np.random.default_rng(RANDOM_SEED)
    worst = max(float(np.max(circle_determinant_residual(p, a, n, t)))
                for p, a, n, t in _random_wall_cases(rng))
    return worst < 1e-10, f"max relative residual {_fmt(worst)} (< 1e-10)"


def c03_two_path():
    rng = np.random.default_rng(RANDOM_SEED)
    worst = max(float(np.max(two_path_residual(p, a, n, t)))
                for p, a, n, t in _random_wall_cases(rng))
    return worst < 1e-10, f"max relative gap {_fmt(worst)} (< 1e-10)"


def c04_interpolation():
    names = ("half-z-radial", "half-z-classical")
    worst = max(_resid(report(nm), "interpolation", 20) for nm in names)
    return worst < 1e-9, f"max |A/B - f|(1 - |alpha|) {_fmt(worst)} (< 1e-9)"


def c05_metric():
    names = ("half-z-radial", "half-z-classical", "atom-plus-smooth", "inner-stress")
    worst = {nm: _resid(report(nm), "metric_identity", 20) for nm in names}
    ok = all(v < 1e-9 for v in worst.values())
    return ok, f"max {_fmt(max(worst.values()))} over {len(names)} scenarios (< 1e-9)"


def c06_poisson_reconstruction():
    parts = []
    ok = True
    for r in ("classical", "cycle"):
        rep = report(f"{r}-gs")
        a = _resid(rep, "orf_poisson", 12)
        b = _resid(rep, "measure_reconstruction", 12)
        ok &= a < 1e-7 and b < 1e-7
        parts.append(f"{r}: poisson {_fmt(a)}, reconstruction {_fmt(b)}")
    return ok, "; ".join(parts) + " (< 1e-7)"


def c07_e7():
    worst = _resid(report("half-z-radial"), "e7", 20)
    return worst < 1e-6, f"max |log_defect - log quantity| {_fmt(worst)} (< 1e-6)"


def c08_szego():
    ref = load_reference()
    n_star = ref["n_star"]
    top = max(max(_series(report(nm), "szego_quantity"))
              for nm in BUILTIN_RUNS if "szego_quantity" in report(nm).series)
    q = _series(report("half-z-radial"), "szego_quantity")
    low = min(q[n_star:])
    ok = top <= 1.0 + 1e-8 and low >= 0.99
    return ok, f"max quantity {top:.12f} (<= 1 + 1e-8); min for n >= {n_star}: {low:.6f} (>= 0.99)"


def smooth5(x):
    x = np.asarray(x, dtype=float)
    return np.convolve(x, np.ones(5) / 5.0, mode="valid")


def c09_energy_trend():
    n_star = load_reference()["n_star"]
    e = np.asarray(_series(report("half-z-radial"), "remainder_energy"))
    top = float(np.max(e[n_star:]))
    sm = smooth5(e[n_star:])
    mono = bool(np.all(np.diff(sm) <= 0.0))
    return top < 1e-2 and mono, f"max for n >= {n_star}: {_fmt(top)} (< 1e-2); smoothed monotone: {mono}"


def c10_l2_gap():
    ref = load_reference()
    n_star, thr = ref["n_star"], ref["l2_gap_threshold"]
    rep = report("half-z-radial")
    g = max(_series(rep, "l2_gap")[n_star:])
    d = max(_series(rep, "l2_gap_dual")[n_star:])
    ok = g < thr and d < thr
    return ok, f"max l2_gap {_fmt(g)}, dual {_fmt(d)} for n >= {n_star} (< {thr:g})"


def c11_stress_floor():
    e = _series(report("inner-stress"), "remainder_energy")
    low = min(e[:41])
    return low >= 0.1, f"min remainder_energy {low:.6f} over n <= 40 (>= 0.1)"


def c12_cross_path_psi():
    worst = 0.0
    for nm in ("half-z-radial", "half-z-classical", "atom-plus-smooth"):
        rep = report(nm)
        worst = max(worst, _resid(rep, "psi_integral", 6), _resid(rep, "divfmu", 6))
    return worst < 1e-7, f"max transfer/integral/divFmu gap {_fmt(worst)} (< 1e-7)"


def _csv_bytes(rep, scenario, out_dir):
    emit_outputs(rep, scenario, out_dir)
    out = {}
    for fn in sorted(os.listdir(out_dir)):
        if fn.endswith(".csv"):
            with open(os.path.join(out_dir, fn), "rb") as fh:
                out[fn] = fh.read()
    return out


def c13_determinism():
    diffs = []
    with tempfile.TemporaryDirectory() as tmp:
        for nm in BUILTIN_RUNS:
            s = builtin(nm)
            first = _csv_bytes(report(nm), s, os.path.join(tmp, nm, "a"))
            second = _csv_bytes(run_scenario(s), s, os.path.join(tmp, nm, "b"))
            if first != second:
                diffs.append(nm)
    if diffs:
        return False, "CSV bytes differ for " + ", ".join(diffs)
    return True, f"identical CSVs across two runs of {len(BUILTIN_RUNS)} built-in scenarios"


CRITERIA = (
    (1, "geronimus equality", c01_geronimus),
    (2, "circle determinant identity", c02_determinant),
    (3, "two-path Wall agreement", c03_two_path),
    (4, "interpolation", c04_interpolation),
    (5, "pointwise metric identity", c05_metric),
    (6, "ORF-Poisson and measure reconstruction", c06_poisson_reconstruction),
    (7, "harmonic defect identity", c07_e7),
    (8, "Szego bound and asymptotics", c08_szego),
    (9, "remainder energy trend", c09_energy_trend),
    (10, "L2 gap and dual", c10_l2_gap),
    (11, "inner stress floor", c11_stress_floor),
    (12, "cross-path psi", c12_cross_path_psi),
    (13, "determinism", c13_determinism),
)


def run_criterion(number):
    for k, name, fn in CRITERIA:
        if k == number:
            t0 = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # a crash is a failed criterion, not a crashed table
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            return Result(k, name, bool(ok), detail, time.perf_counter() - t0)
    raise KeyError(f"no criterion {number}")


def run_all(only=None):
    return [run_criterion(k) for k, _, _ in CRITERIA if not only or k in only]


def format_line(r):
    return f"[{'PASS' if r.passed else 'FAIL'}] {r.number:2d} {r.name:<40s} {r.detail}"


def print_table(results):
    for r in results:
        print(format_line(r))
    n_ok = sum(r.passed for r in results)
    print(f"{n_ok}/{len(results)} criteria passed")
