"""Run scenarios end to end and write CSV / JSON / SVG outputs."""

from concurrent.futures import ThreadPoolExecutor
import json
import logging
import math
import os
import warnings

import jsonschema

from .diagnostics import DiagnosticsReport, Pipeline, PipelineOptions, build_report, cell
from .errors import MpsOrfError, ResolutionRefused, ScenarioError
from .scenarios import report_schema

log = logging.getLogger(__name__)


def pipeline_options(scenario, force=False, seed=None):
    d = dict(scenario.diagnostics)
    opt = PipelineOptions(force=force)
    if "orf" in d:
        opt.orf = bool(d["orf"])
    if "lp_exponents" in d:
        opt.lp_exponents = tuple(float(p) for p in d["lp_exponents"])
    for key in ("arc_I", "arc_K"):
        if key in d:
            setattr(opt, key, tuple(float(x) for x in d[key]))
    if "pointwise_z" in d:
        opt.pointwise_z = dict(d["pointwise_z"])
    if "interior_points" in d:
        opt.interior_points = int(d["interior_points"])
    if "gram_schmidt_max" in d:
        opt.gram_schmidt_max = int(d["gram_schmidt_max"])
    if seed is not None:
        opt.seed = int(seed)
    return opt


def build_pipeline(scenario, force=False, seed=None):
    f = scenario.build_function()
    alphas = scenario.build_alphas()
    return Pipeline(f, alphas, scenario.M, scenario.n_max, pipeline_options(scenario, force, seed))


def run_scenario(scenario, force=False, jobs=1, seed=None):
    """Full pipeline f -> gamma -> Wall -> ORF -> diagnostics for one scenario.

    Module errors are re-raised as ScenarioError carrying the scenario id and
    the order n being computed (None during setup).
    """
    n = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            pipe = build_pipeline(scenario, force, seed)
            if pipe.opt.orf:
                # shared state, built once before any parallel evaluation
                pipe.szego, pipe.szego_dual, pipe.herglotz_b
            if jobs > 1:
                with ThreadPoolExecutor(max_workers=jobs) as ex:
                    cells = list(ex.map(lambda k: cell(pipe, k), range(scenario.n_max + 1)))
            else:
                cells = []
                for n in range(scenario.n_max + 1):
                    cells.append(cell(pipe, n))
                n = None
            meta = {"hypotheses": scenario.hypotheses, "description": scenario.description,
                    "alphas": scenario.alphas, "function": scenario.function}
            return build_report(pipe, scenario.id, cells, meta)
        except ResolutionRefused:
            raise
        except (MpsOrfError, ValueError, ArithmeticError) as exc:
            raise ScenarioError(scenario.id, n, exc) from exc


def fmt(v):
    """17 significant digits; round-trips every finite double."""
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(float(v), ".17g")


def write_csv(path, pairs):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("n,value\n")
        for n, v in pairs:
            fh.write(f"{n},{fmt(v)}\n")


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if lines[0] != "n,value":
        raise ValueError(f"{path}: unexpected header {lines[0]!r}")
    out = []
    for line in lines[1:]:
        n, v = line.split(",")
        out.append((int(n), float(v)))
    return out


def write_svg(path, kind, pairs, scenario_id):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "mps-orf"
    ns = [n for n, v in pairs if math.isfinite(v)]
    vs = [v for n, v in pairs if math.isfinite(v)]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, vs, marker="o", ms=3, lw=1)
    if vs and all(v > 0 for v in vs):
        ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel(kind)
    ax.set_title(f"{scenario_id}: {kind}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_outputs(report, scenario, out_dir=None, plots=False):
    """Write one CSV per series, the report JSON and (optionally) SVG plots.

    Returns the list of written paths.
    """
    out_dir = out_dir or scenario.output_dir
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for kind, pairs in sorted(report.series.items()):
        p = os.path.join(out_dir, f"{scenario.id}.{kind}.csv")
        write_csv(p, pairs)
        written.append(p)
        if plots:
            p = os.path.join(out_dir, f"{scenario.id}.{kind}.svg")
            write_svg(p, kind, pairs, scenario.id)
            written.append(p)
    doc = report.to_json()
    jsonschema.validate(doc, report_schema())
    p = os.path.join(out_dir, f"{scenario.id}.report.json")
    with open(p, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True, default=_jsonable)
        fh.write("\n")
    written.append(p)
    return written


def _jsonable(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"cannot serialize {type(x).__name__}")
