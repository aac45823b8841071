"""Scenario configuration: JSON loading, validation and the built-in library."""

from dataclasses import dataclass, field, asdict
from importlib import resources
import copy
import json
import math

import jsonschema

from .errors import DomainError, ParseError, ValidationError
from .schur import schur_function_from_spec
from .sequences import alpha_sequence_from_spec

_SCHEMA = None


def scenario_schema():
    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = json.loads(resources.files("mps_orf").joinpath("schemas/scenario.schema.json").read_text())
    return _SCHEMA


def report_schema():
    return json.loads(resources.files("mps_orf").joinpath("schemas/report.schema.json").read_text())


@dataclass(frozen=True)
class Scenario:
    id: str
    function: dict
    alphas: dict
    M: int
    n_max: int
    diagnostics: dict = field(default_factory=dict)
    output_dir: str = "out"
    hypotheses: object = None
    description: str = ""

    def build_function(self):
        return schur_function_from_spec(self.function, self.M)

    def build_alphas(self):
        return alpha_sequence_from_spec(self.alphas)

    def to_json(self):
        out = {k: v for k, v in asdict(self).items() if v not in (None, "", {})}
        return out


def _check_arc(name, arc):
    if not arc[0] < arc[1]:
        raise ValidationError(f"{name}: arc needs theta1 < theta2, got {arc}")
    if arc[1] - arc[0] > 2 * math.pi:
        raise ValidationError(f"{name}: arc longer than the circle")


def scenario_from_dict(obj):
    """Validate a parsed config object and return a Scenario."""
    try:
        jsonschema.validate(obj, scenario_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"{where}: {exc.message}") from None
    M = obj["M"]
    if M < 256 or M & (M - 1):
        raise ValidationError(f"M must be a power of two >= 256, got {M}")
    if obj["n_max"] < 1:
        raise ValidationError(f"n_max must be >= 1, got {obj['n_max']}")
    diag = obj.get("diagnostics", {})
    for name in ("arc_I", "arc_K"):
        if name in diag:
            _check_arc(name, diag[name])
    s = Scenario(obj["id"], obj["function"], obj["alphas"], M, obj["n_max"], diag,
                 obj.get("output_dir", "out"), obj.get("hypotheses"), obj.get("description", ""))
    try:
        s.build_alphas()
        s.build_function()
    except (ValueError, DomainError) as exc:
        raise ValidationError(f"scenario {s.id!r}: {exc}") from None
    return s


def parse_config(text, source="<string>"):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    items = obj if isinstance(obj, list) else [obj]
    if not items:
        raise ValidationError(f"{source}: empty scenario list")
    out = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise ValidationError(f"{source}: entry {i} is not an object")
        out.append(scenario_from_dict(item))
    ids = [s.id for s in out]
    if len(set(ids)) != len(ids):
        raise ValidationError(f"{source}: duplicate scenario ids")
    return out


def load_config(path):
    """Load one scenario (or the first of a list) from a JSON file."""
    return load_configs(path)[0]


def load_configs(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, str(path))


_HALF_Z = {"kind": "scaled_identity", "lambda": [0.5, 0.0]}
_RADIAL = {"kind": "radial", "xi": [1.0, 0.0], "c": 1.0}

BUILTIN = {
    "lebesgue": {
        "id": "lebesgue",
        "description": "f = 0, Lebesgue measure, radial points towards 1",
        "function": {"kind": "constant", "value": [0.0, 0.0]},
        "alphas": _RADIAL,
        "M": 4096,
        "n_max": 40,
        "hypotheses": "divergent Blaschke sum (radial); smooth Szego-class measure",
    },
    "half-z-classical": {
        "id": "half-z-classical",
        "description": "f(z) = z/2 with all interpolation points at the origin",
        "function": _HALF_Z,
        "alphas": {"kind": "classical"},
        "M": 4096,
        "n_max": 20,
        "hypotheses": "divergent Blaschke sum (all points at 0); smooth positive density",
    },
    "half-z-radial": {
        "id": "half-z-radial",
        "description": "f(z) = z/2, alpha_k = (1 - 1/(k+1)) towards 1",
        "function": _HALF_Z,
        "alphas": _RADIAL,
        "M": 4096,
        "n_max": 40,
        "hypotheses": "divergent Blaschke sum (harmonic); density smooth and positive near the accumulation point 1",
    },
    "atom-plus-smooth": {
        "id": "atom-plus-smooth",
        "description": "0.8 times the measure of z/2 plus an atom of mass 0.2 at -1, radial points towards 1",
        "function": {"kind": "measure", "base": _HALF_Z, "atoms": [{"theta": math.pi, "mass": 0.2}]},
        "alphas": _RADIAL,
        "M": 4096,
        "n_max": 30,
        "diagnostics": {"arc_K": [0.6, 2.2]},
        "hypotheses": "divergent Blaschke sum; density positive near 1, atom away from the accumulation point",
    },
    "inner-stress": {
        "id": "inner-stress",
        "description": "singular inner f = exp((z+1)/(z-1)) on its grid samples, radial points towards 1",
        "function": {"kind": "singular_inner", "sigma": 1.0, "xi": [1.0, 0.0]},
        "alphas": _RADIAL,
        "M": 4096,
        "n_max": 40,
        "diagnostics": {"orf": False},
        "hypotheses": "divergent Blaschke sum only; |f| = 1 a.e. so the measure is singular",
    },
}


def builtin(name, **overrides):
    """Built-in scenario by name; keyword overrides replace top-level keys."""
    if name not in BUILTIN:
        raise KeyError(f"unknown built-in scenario {name!r}; choose from {sorted(BUILTIN)}")
    obj = copy.deepcopy(BUILTIN[name])
    obj.update(overrides)
    return scenario_from_dict(obj)
