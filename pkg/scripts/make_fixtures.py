"""Regenerate src/mps_orf/fixtures/reference.json from a high-resolution run.

The half-z-radial scenario is run at M = 2**16 (about three minutes).  The
pinned index n_star is the first n from which the Szego quantity stays
>= 0.99 and the remainder energy stays < 1e-2; the L2 threshold is the
largest reference l2_gap beyond n_star with a 10% margin.  Schur parameters
are spot-checked against an independent 50-digit chain on f(z) = z/2.

Usage:
    python3 scripts/make_fixtures.py [--M 65536] [--out PATH]
"""

import argparse
import json
import math
from pathlib import Path
import warnings

import mpmath as mp
import numpy as np

from mps_orf.runner import run_scenario
from mps_orf.scenarios import builtin

OUT = Path(__file__).resolve().parents[1] / "src" / "mps_orf" / "fixtures" / "reference.json"
PINNED = ("gamma_abs", "omega", "kappa", "remainder_energy", "szego_quantity", "l2_gap",
          "l2_gap_dual", "log_defect", "pseudo_error")
# absolute tolerance when an M = 4096 run is compared to the reference
TOLERANCE = {"gamma_abs": 1e-12, "omega": 1e-12, "kappa": 1e-9, "remainder_energy": 1e-8,
             "szego_quantity": 1e-6, "l2_gap": 1e-5, "l2_gap_dual": 1e-5,
             "log_defect": 1e-8, "pseudo_error": 1e-8}


def gammas_50_digits(n):
    """Schur chain for f(z) = z/2 at alpha_k = 1 - 1/(k+1), composed symbolically."""
    mp.mp.dps = 50
    alphas = [mp.mpf(0)] + [1 - mp.mpf(1) / (k + 1) for k in range(1, n + 2)]
    funcs = [lambda z: z / 2]
    gam = []
    for k in range(n + 1):
        fk = funcs[-1]
        g = fk(alphas[k + 1])
        gam.append(g)
        a = alphas[k + 1]

        def nxt(z, fk=fk, g=g, a=a):
            return (fk(z) - g) / ((1 - mp.conj(g) * fk(z)) * (z - a) / (1 - mp.conj(a) * z))
        funcs.append(nxt)
    return gam


def first_stable(values, ok):
    n_star = None
    for n, v in enumerate(values):
        if ok(v):
            n_star = n if n_star is None else n_star
        else:
            n_star = None
    return n_star


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, default=2 ** 16)
    ap.add_argument("--out", default=str(OUT))
    args = ap.parse_args()

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ref = run_scenario(builtin("half-z-radial", M=args.M))
        low = run_scenario(builtin("half-z-radial"))
    series = {k: ref.series_values(k) for k in PINNED}
    n_q = first_stable(series["szego_quantity"], lambda v: v >= 0.99)
    n_e = first_stable(series["remainder_energy"], lambda v: v < 1e-2)
    n_star = max(n_q, n_e)
    top = max(max(series["l2_gap"][n_star:]), max(series["l2_gap_dual"][n_star:]))
    threshold = float(f"{1.1 * top:.2g}")

    # 40 steps amplify perturbations by up to ~1e10, so only 12 steps are
    # compared in closed form at 50 digits (plenty for the 1e-12 tolerance)
    spot_n = 12
    exact = gammas_50_digits(spot_n)
    gam = np.asarray(ref.series_values("gamma_re")) + 1j * np.asarray(ref.series_values("gamma_im"))
    spot = [{"n": k, "gamma": mp.nstr(exact[k], 30)} for k in range(spot_n + 1)]
    spot_err = max(abs(complex(exact[k]) - gam[k]) for k in range(spot_n + 1))

    drift = {k: float(np.nanmax(np.abs(np.asarray(low.series_values(k)) - np.asarray(series[k]))))
             for k in PINNED if k != "log_defect"}
    for k, d in sorted(drift.items()):
        flag = "" if d <= TOLERANCE[k] else "  <-- exceeds tolerance"
        print(f"  M=4096 vs M={args.M} {k:18s} {d:.3e}  tol {TOLERANCE[k]:.0e}{flag}")
    print(f"n_star = {n_star} (quantity {n_q}, energy {n_e}); l2 threshold {threshold}")
    print(f"50-digit gamma spot check: max error {spot_err:.3e}")

    doc = {
        "scenario": "half-z-radial",
        "M": args.M,
        "n_star": n_star,
        "l2_gap_threshold": threshold,
        "series": {k: [None if not math.isfinite(v) else v for v in vals] for k, vals in series.items()},
        "tolerance": TOLERANCE,
        "gamma_50_digits": spot,
        "residual_maxima": {k: max((v for _, v in vals if v is not None), default=None)
                            for k, vals in ref.residual_maxima.items()},
    }
    Path(args.out).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
