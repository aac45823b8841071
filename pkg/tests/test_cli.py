import json
import os

import jsonschema
import numpy as np
import pytest

from mps_orf.cli import main
from mps_orf.errors import ParseError, ScenarioError, ValidationError
from mps_orf.runner import emit_outputs, read_csv, run_scenario
from mps_orf.scenarios import builtin, parse_config, report_schema

MINIMAL = {"id": "t", "function": {"kind": "constant", "value": [0, 0]},
           "alphas": {"kind": "classical"}, "M": 1024, "n_max": 5}
HALF_Z = {"id": "hz", "function": {"kind": "scaled_identity", "lambda": [0.5, 0]},
          "alphas": {"kind": "radial", "c": 1.0}, "M": 1024, "n_max": 6}


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_minimal_config_loads():
    (s,) = parse_config(json.dumps(MINIMAL))
    assert s.id == "t" and s.M == 1024 and s.n_max == 5


@pytest.mark.parametrize("patch", [{"M": 1000}, {"M": 128}, {"n_max": 0}, {"bogus": 1},
                                   {"diagnostics": {"arc_I": [1.0, 0.5]}},
                                   {"alphas": {"kind": "radial", "c": 3}}])
def test_invalid_configs(patch):
    with pytest.raises(ValidationError):
        parse_config(json.dumps({**MINIMAL, **patch}))


def test_parse_error_has_position():
    with pytest.raises(ParseError, match="line 2"):
        parse_config('{"id": "t",\n "M": }')


def test_duplicate_ids_rejected():
    with pytest.raises(ValidationError):
        parse_config(json.dumps([MINIMAL, MINIMAL]))


def test_zero_scenario_report():
    rep = run_scenario(parse_config(json.dumps(MINIMAL))[0])
    for key in ("remainder_energy", "pseudo_error", "lp_error_p2", "sup_error"):
        assert np.all(rep.series_values(key) == 0)
    assert np.allclose(rep.series_values("szego_quantity"), 1, atol=1e-13)


def test_half_z_classical_gammas():
    s = parse_config(json.dumps({**MINIMAL, "function": HALF_Z["function"]}))[0]
    rep = run_scenario(s)
    assert np.allclose(rep.series_values("gamma_re"), [0, 0.5, 0, 0, 0, 0], atol=1e-15)


def test_csv_round_trip_and_schema(tmp_path):
    s = parse_config(json.dumps(HALF_Z))[0]
    rep = run_scenario(s)
    paths = emit_outputs(rep, s, str(tmp_path))
    assert not any(p.endswith(".svg") for p in paths)
    for kind, pairs in rep.series.items():
        back = read_csv(tmp_path / f"hz.{kind}.csv")
        assert [n for n, _ in back] == [n for n, _ in pairs]
        for (_, a), (_, b) in zip(back, pairs):
            assert a == b or (np.isnan(a) and np.isnan(b))
    doc = json.loads((tmp_path / "hz.report.json").read_text())
    jsonschema.validate(doc, report_schema())


def test_cli_run_and_plots(tmp_path, capsys):
    cfg = write(tmp_path, HALF_Z)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out-dir", str(out)]) == 0
    assert not list(out.glob("*.svg"))
    assert main(["run", "--config", cfg, "--out-dir", str(out), "--plots"]) == 0
    assert (out / "hz.remainder_energy.svg").exists()


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", "--config", write(tmp_path, {**MINIMAL, "M": 1000})]) == 1
    (tmp_path / "bad.json").write_text("{")
    assert main(["run", "--config", str(tmp_path / "bad.json")]) == 1
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 1
    blaschke = {**MINIMAL, "function": {"kind": "rational", "num": [[1, 0], [2, 0]], "den": [[2, 0], [1, 0]]}}
    assert main(["run", "--config", write(tmp_path, blaschke, "b.json"), "--out-dir", str(tmp_path)]) == 1
    assert "scenario 't'" in capsys.readouterr().err
    coarse = {**HALF_Z, "M": 256, "n_max": 40}
    cfg = write(tmp_path, coarse, "c.json")
    assert main(["run", "--config", cfg, "--out-dir", str(tmp_path)]) == 2
    coarse["diagnostics"] = {"orf": False}
    cfg = write(tmp_path, coarse, "c.json")
    assert main(["run", "--config", cfg, "--out-dir", str(tmp_path), "--force"]) == 0


def test_scenario_error_carries_context():
    blaschke = {**MINIMAL, "function": {"kind": "rational", "num": [[1, 0], [2, 0]], "den": [[2, 0], [1, 0]]}}
    with pytest.raises(ScenarioError) as exc:
        run_scenario(parse_config(json.dumps(blaschke))[0])
    assert exc.value.scenario_id == "t"


def csv_bytes(d):
    return {f: open(os.path.join(d, f), "rb").read() for f in sorted(os.listdir(d)) if f.endswith(".csv")}


def test_determinism_and_jobs(tmp_path):
    cfg = write(tmp_path, [HALF_Z, {**MINIMAL, "id": "z"}])
    a, b, c = (str(tmp_path / x) for x in "abc")
    assert main(["run", "--config", cfg, "--out-dir", a]) == 0
    assert main(["run", "--config", cfg, "--out-dir", b]) == 0
    assert main(["run", "--config", cfg, "--out-dir", c, "--jobs", "2"]) == 0
    assert csv_bytes(a) == csv_bytes(b) == csv_bytes(c)
    assert len(csv_bytes(a)) > 20


def test_builtin_library():
    for name in ("lebesgue", "half-z-classical", "half-z-radial", "atom-plus-smooth", "inner-stress"):
        assert builtin(name).id == name
    with pytest.raises(KeyError):
        builtin("nope")
